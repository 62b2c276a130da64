use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Default ceiling on the number of sites (a full 2^24 complex vector is
/// 256 MiB).
pub const DEFAULT_MAX_SITES: usize = 24;

/// Eigenvalue of the global spin flip `P = prod_l sigma^x_l`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Parity {
    Plus,
    Minus,
}

impl Parity {
    pub fn sign(self) -> f64 {
        match self {
            Parity::Plus => 1.0,
            Parity::Minus => -1.0,
        }
    }

    pub fn flipped(self) -> Parity {
        match self {
            Parity::Plus => Parity::Minus,
            Parity::Minus => Parity::Plus,
        }
    }

    /// The sector holding the fully x-polarized product state
    /// `(|up> - |down>)^N / 2^(N/2)`, whose flip eigenvalue is `(-1)^N`.
    pub fn of_polarized_state(n_sites: usize) -> Parity {
        if n_sites.is_multiple_of(2) {
            Parity::Plus
        } else {
            Parity::Minus
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sector {
    Full,
    Parity(Parity),
}

impl fmt::Display for Sector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sector::Full => write!(f, "full"),
            Sector::Parity(Parity::Plus) => write!(f, "parity+"),
            Sector::Parity(Parity::Minus) => write!(f, "parity-"),
        }
    }
}

impl FromStr for Sector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "full" => Ok(Sector::Full),
            "parity+" | "parity(+1)" | "+1" | "even" => Ok(Sector::Parity(Parity::Plus)),
            "parity-" | "parity(-1)" | "-1" | "odd" => Ok(Sector::Parity(Parity::Minus)),
            other => Err(invalid(format!("unknown sector spec '{other}'"))),
        }
    }
}

/// Basis of an `N`-site spin-1/2 chain, either the full product basis or one
/// eigenspace of the global spin flip.
///
/// In a parity sector with eigenvalue `p` the basis vectors are
/// `(|s> + p |~s>) / sqrt(2)` for every flip orbit `{s, ~s}` with `s < ~s`.
/// Since `s` and `~s` always differ in the top bit, the representatives are
/// exactly the labels below `2^(N-1)`, and the representative label doubles
/// as the basis index. Labels and indices therefore need no lookup table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpinBasis {
    n_sites: usize,
    sector: Sector,
}

pub fn build_basis(n_sites: usize, sector: Sector) -> Result<SpinBasis> {
    build_basis_with_cap(n_sites, sector, DEFAULT_MAX_SITES)
}

pub fn build_basis_with_cap(n_sites: usize, sector: Sector, max_sites: usize) -> Result<SpinBasis> {
    if n_sites == 0 {
        return Err(invalid("a spin chain needs at least one site"));
    }
    if n_sites > max_sites {
        return Err(Error::CapExceeded {
            what: "number of sites",
            value: n_sites,
            cap: max_sites,
        });
    }
    if n_sites >= usize::BITS as usize - 1 {
        return Err(invalid("basis labels do not fit in a machine word"));
    }
    Ok(SpinBasis { n_sites, sector })
}

impl SpinBasis {
    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn sector(&self) -> Sector {
        self.sector
    }

    pub fn is_full(&self) -> bool {
        self.sector == Sector::Full
    }

    pub fn parity(&self) -> Option<Parity> {
        match self.sector {
            Sector::Full => None,
            Sector::Parity(p) => Some(p),
        }
    }

    /// Mask with the lowest `N` bits set.
    pub fn mask(&self) -> usize {
        (1usize << self.n_sites) - 1
    }

    pub fn dim(&self) -> usize {
        match self.sector {
            Sector::Full => 1 << self.n_sites,
            Sector::Parity(_) => 1 << (self.n_sites - 1),
        }
    }

    /// Representative label of basis vector `index` (the state itself in the
    /// full basis).
    pub fn label(&self, index: usize) -> usize {
        debug_assert!(index < self.dim());
        index
    }

    /// Ordered list of basis labels (representatives for parity sectors).
    pub fn states(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.dim()).map(|i| self.label(i))
    }

    /// Position of the basis vector that contains product state `label`,
    /// together with the coefficient relating them:
    /// `<b_index| label> = coefficient / sqrt(2)` in a parity sector and
    /// `1` in the full basis.
    pub fn locate(&self, label: usize) -> (usize, f64) {
        debug_assert!(label <= self.mask());
        match self.sector {
            Sector::Full => (label, 1.0),
            Sector::Parity(p) => {
                if label >> (self.n_sites - 1) == 0 {
                    (label, 1.0)
                } else {
                    (label ^ self.mask(), p.sign())
                }
            }
        }
    }

    /// Index of a representative label; `None` for labels that are only the
    /// flip partner of a representative.
    pub fn index_of(&self, label: usize) -> Option<usize> {
        if label > self.mask() {
            return None;
        }
        match self.sector {
            Sector::Full => Some(label),
            Sector::Parity(_) => (label >> (self.n_sites - 1) == 0).then_some(label),
        }
    }
}
