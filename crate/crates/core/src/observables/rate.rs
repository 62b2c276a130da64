use serde::Serialize;

use crate::error::{invalid, Result};
use crate::spin::StateVector;

/// Echoes below this are treated as zero.
pub const ECHO_FLOOR: f64 = 1e-300;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RateSample {
    /// Loschmidt echo `|<psi_0|psi(t)>|^2`.
    pub echo: f64,
    /// `-(1/N) ln echo`; infinite when the echo underflows.
    pub rate: f64,
}

/// Loschmidt echo and its rate function.
pub fn rate_function(psi0: &StateVector, psi_t: &StateVector, n_sites: usize) -> Result<RateSample> {
    if n_sites == 0 {
        return Err(invalid("rate function needs at least one site"));
    }
    let echo = psi0.inner(psi_t)?.norm_sqr();
    Ok(rate_from_echo(echo, n_sites))
}

pub fn rate_from_echo(echo: f64, n_sites: usize) -> RateSample {
    if echo < ECHO_FLOOR {
        log::warn!("Loschmidt echo {echo:e} below the underflow floor; rate reported as infinite");
        return RateSample {
            echo,
            rate: f64::INFINITY,
        };
    }
    RateSample {
        echo,
        rate: (-echo.ln() / n_sites as f64).max(0.0),
    }
}
