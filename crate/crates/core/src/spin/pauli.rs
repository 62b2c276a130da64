use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }

    /// Whether a single sigma^axis anticommutes with the global spin flip.
    pub fn is_parity_odd(self) -> bool {
        !matches!(self, Axis::X)
    }
}

/// Product of single-site Pauli matrices. Factors are applied right to left,
/// so `[(0, X), (0, Z)]` is `sigma^x_0 sigma^z_0`.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliString {
    factors: Vec<(usize, Axis)>,
}

impl PauliString {
    pub fn new(factors: Vec<(usize, Axis)>) -> Self {
        PauliString { factors }
    }

    pub fn single(site: usize, axis: Axis) -> Self {
        PauliString {
            factors: vec![(site, axis)],
        }
    }

    pub fn pair(a: (usize, Axis), b: (usize, Axis)) -> Self {
        PauliString {
            factors: vec![a, b],
        }
    }

    pub fn factors(&self) -> &[(usize, Axis)] {
        &self.factors
    }

    pub fn max_site(&self) -> Option<usize> {
        self.factors.iter().map(|&(s, _)| s).max()
    }

    /// Commutes with `prod_l sigma^x_l` iff the number of y and z factors is
    /// even.
    pub fn is_parity_even(&self) -> bool {
        self.factors.iter().filter(|(_, a)| a.is_parity_odd()).count() % 2 == 0
    }

    /// Acts on product state `label`; returns the image label and amplitude.
    #[inline]
    pub fn apply(&self, label: usize) -> (usize, Complex64) {
        let mut s = label;
        let mut phase = Complex64::new(1.0, 0.0);
        for &(site, axis) in self.factors.iter().rev() {
            let bit = (s >> site) & 1;
            match axis {
                Axis::X => s ^= 1 << site,
                Axis::Y => {
                    // sigma^y |up> = i |down>, sigma^y |down> = -i |up>
                    phase *= if bit == 0 {
                        Complex64::new(0.0, 1.0)
                    } else {
                        Complex64::new(0.0, -1.0)
                    };
                    s ^= 1 << site;
                }
                Axis::Z => {
                    if bit == 1 {
                        phase = -phase;
                    }
                }
            }
        }
        (s, phase)
    }

    /// Same as [`apply`](Self::apply) for the adjoint string (factors in
    /// reverse order; each Pauli matrix is self-adjoint).
    #[inline]
    pub fn apply_adjoint(&self, label: usize) -> (usize, Complex64) {
        let mut s = label;
        let mut phase = Complex64::new(1.0, 0.0);
        for &(site, axis) in self.factors.iter() {
            let bit = (s >> site) & 1;
            match axis {
                Axis::X => s ^= 1 << site,
                Axis::Y => {
                    phase *= if bit == 0 {
                        Complex64::new(0.0, 1.0)
                    } else {
                        Complex64::new(0.0, -1.0)
                    };
                    s ^= 1 << site;
                }
                Axis::Z => {
                    if bit == 1 {
                        phase = -phase;
                    }
                }
            }
        }
        (s, phase)
    }
}

/// Linear combination of Pauli strings.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PauliSum {
    terms: Vec<(Complex64, PauliString)>,
}

impl PauliSum {
    pub fn new() -> Self {
        PauliSum::default()
    }

    pub fn push(&mut self, coefficient: impl Into<Complex64>, string: PauliString) {
        let c = coefficient.into();
        if c != Complex64::new(0.0, 0.0) {
            self.terms.push((c, string));
        }
    }

    pub fn terms(&self) -> &[(Complex64, PauliString)] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_parity_even(&self) -> bool {
        self.terms.iter().all(|(_, s)| s.is_parity_even())
    }

    pub(crate) fn check_sites(&self, n_sites: usize) -> Result<()> {
        for (_, s) in &self.terms {
            if let Some(m) = s.max_site() {
                if m >= n_sites {
                    return Err(invalid(format!(
                        "site {m} out of range for a {n_sites}-site chain"
                    )));
                }
            }
        }
        Ok(())
    }

    pub(crate) fn check_parity(&self, what: &str) -> Result<()> {
        if self.is_parity_even() {
            Ok(())
        } else {
            Err(Error::ParityOdd(what.to_string()))
        }
    }
}
