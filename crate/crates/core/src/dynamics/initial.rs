use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{invalid, Result};
use crate::spin::{Parity, Sector, SpinBasis, StateVector};

/// Sector containing the x-polarized initial state of an `n_sites` chain.
pub fn initial_sector(n_sites: usize) -> Sector {
    Sector::Parity(Parity::of_polarized_state(n_sites))
}

/// `(x)_l (|up> - |down>) / sqrt(2)`: every spin in the -1 eigenstate of
/// sigma^x. Full-basis amplitude on label `s` is `2^(-N/2) (-1)^popcount(s)`;
/// in its flip sector each representative carries `sqrt(2)` times that.
pub fn initial_state(basis: &Arc<SpinBasis>) -> Result<StateVector> {
    let n = basis.n_sites();
    let scale = match basis.sector() {
        Sector::Full => 1.0,
        Sector::Parity(p) if p == Parity::of_polarized_state(n) => std::f64::consts::SQRT_2,
        Sector::Parity(_) => {
            return Err(invalid(format!(
                "the polarized state of {n} sites has flip eigenvalue (-1)^{n}; wrong sector requested"
            )))
        }
    };
    let amp = scale * 2f64.powf(-(n as f64) / 2.0);
    let amps = basis
        .states()
        .map(|s| {
            let sign = if s.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            Complex64::new(sign * amp, 0.0)
        })
        .collect();
    StateVector::from_amplitudes(basis.clone(), amps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin::{build_basis, pauli_site, Axis};

    #[test]
    fn single_spin_amplitudes() {
        let b = Arc::new(build_basis(1, Sector::Full).unwrap());
        let psi = initial_state(&b).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((psi.amplitudes()[0].re - r).abs() < 1e-15);
        assert!((psi.amplitudes()[1].re + r).abs() < 1e-15);
    }

    #[test]
    fn every_spin_is_minus_x() {
        let b = Arc::new(build_basis(5, Sector::Full).unwrap());
        let psi = initial_state(&b).unwrap();
        for l in 0..5 {
            let sx = pauli_site(&b, l, Axis::X).unwrap();
            assert!((sx.quadratic_form(psi.amplitudes()).re + 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn sector_state_embeds_to_full_state() {
        for n in 1..=7 {
            let sec = Arc::new(build_basis(n, initial_sector(n)).unwrap());
            let full = Arc::new(build_basis(n, Sector::Full).unwrap());
            let a = initial_state(&sec).unwrap();
            assert!((a.norm() - 1.0).abs() < 1e-14);
            let emb = a.to_full_amplitudes();
            let b = initial_state(&full).unwrap();
            for (x, y) in emb.iter().zip(b.amplitudes()) {
                assert!((x - y).norm() < 1e-15);
            }
            let wrong = Arc::new(
                build_basis(n, Sector::Parity(Parity::of_polarized_state(n).flipped())).unwrap(),
            );
            assert!(initial_state(&wrong).is_err());
        }
    }
}
