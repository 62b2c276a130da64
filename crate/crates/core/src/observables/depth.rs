use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// How a QFI density is turned into a certified entanglement depth.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DepthConvention {
    /// `F_Q <= s k^2 + r^2` for k-producible states with `N = s k + r`.
    ProducibilityBound,
    /// `f_Q > k` certifies `(k + 1)`-partite entanglement.
    SimpleLinear,
}

impl DepthConvention {
    pub const ALL: [DepthConvention; 2] = [DepthConvention::ProducibilityBound, DepthConvention::SimpleLinear];

    pub fn name(self) -> &'static str {
        match self {
            DepthConvention::ProducibilityBound => "producibility",
            DepthConvention::SimpleLinear => "linear",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EntanglementCertificate {
    pub f_q: f64,
    pub n_sites: usize,
    pub depth: usize,
    pub convention: DepthConvention,
}

/// Relative amount by which a bound must be exceeded before it counts, so
/// rounding noise on a separable state does not certify entanglement.
pub const CERTIFICATE_MARGIN: f64 = 1e-9;

/// Largest QFI reachable by k-producible states of `n` spins.
pub fn producible_bound(n: usize, k: usize) -> f64 {
    let s = n / k;
    let r = n - s * k;
    (s * k * k + r * r) as f64
}

pub fn entanglement_depth(f_q: f64, n_sites: usize, convention: DepthConvention) -> Result<EntanglementCertificate> {
    if n_sites == 0 {
        return Err(invalid("entanglement depth needs at least one site"));
    }
    if !(f_q >= 0.0) || !f_q.is_finite() {
        return Err(invalid(format!("QFI density {f_q} must be finite and non-negative")));
    }
    let depth = match convention {
        DepthConvention::ProducibilityBound => {
            let fisher = n_sites as f64 * f_q;
            let exceeded = (1..=n_sites)
                .filter(|&k| fisher > producible_bound(n_sites, k) * (1.0 + CERTIFICATE_MARGIN))
                .max()
                .unwrap_or(0);
            1 + exceeded
        }
        DepthConvention::SimpleLinear => {
            let f = f_q / (1.0 + CERTIFICATE_MARGIN);
            if f > 1.0 {
                f.ceil() as usize
            } else {
                1
            }
        }
    };
    Ok(EntanglementCertificate {
        f_q,
        n_sites,
        depth: depth.clamp(1, n_sites),
        convention,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use DepthConvention::*;

    #[test]
    fn table_values() {
        assert_eq!(entanglement_depth(12.72, 20, SimpleLinear).unwrap().depth, 13);
        assert_eq!(entanglement_depth(12.72, 20, ProducibilityBound).unwrap().depth, 16);
        for n in [1usize, 5, 20] {
            for c in DepthConvention::ALL {
                assert_eq!(entanglement_depth(1.0, n, c).unwrap().depth, 1);
            }
            assert_eq!(entanglement_depth(n as f64, n, ProducibilityBound).unwrap().depth, n);
        }
    }

    #[test]
    fn bound_table() {
        assert_eq!(producible_bound(20, 1), 20.0);
        assert_eq!(producible_bound(20, 15), 250.0);
        assert_eq!(producible_bound(20, 16), 272.0);
        assert_eq!(producible_bound(10, 7), 58.0);
    }

    #[test]
    fn invalid_inputs() {
        assert!(entanglement_depth(-0.1, 4, SimpleLinear).is_err());
        assert!(entanglement_depth(f64::NAN, 4, SimpleLinear).is_err());
        assert!(entanglement_depth(1.0, 0, SimpleLinear).is_err());
    }
}
