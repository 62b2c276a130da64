use serde::{Deserialize, Serialize};

use super::pauli::Axis;
use crate::error::{invalid, Result};

/// Unit vector on the Bloch sphere.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlochDirection {
    n: [f64; 3],
}

impl BlochDirection {
    /// Requires unit norm within 1e-12.
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let norm = (x * x + y * y + z * z).sqrt();
        if !norm.is_finite() || (norm - 1.0).abs() > 1e-12 {
            return Err(invalid(format!("direction ({x}, {y}, {z}) has norm {norm}")));
        }
        Ok(BlochDirection { n: [x, y, z] })
    }

    /// Rescales any nonzero vector onto the sphere.
    pub fn normalized(x: f64, y: f64, z: f64) -> Result<Self> {
        let norm = (x * x + y * y + z * z).sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(invalid("cannot normalize a zero or non-finite vector"));
        }
        Ok(BlochDirection {
            n: [x / norm, y / norm, z / norm],
        })
    }

    /// Polar angle `theta` from +z, azimuth `phi` from +x.
    pub fn from_angles(theta: f64, phi: f64) -> Self {
        BlochDirection {
            n: [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()],
        }
    }

    pub fn axis(axis: Axis) -> Self {
        let mut n = [0.0; 3];
        n[axis.index()] = 1.0;
        BlochDirection { n }
    }

    pub fn x() -> Self {
        Self::axis(Axis::X)
    }

    pub fn y() -> Self {
        Self::axis(Axis::Y)
    }

    pub fn z() -> Self {
        Self::axis(Axis::Z)
    }

    pub fn components(&self) -> [f64; 3] {
        self.n
    }

    pub fn component(&self, axis: Axis) -> f64 {
        self.n[axis.index()]
    }

    /// The axis this direction points along (either sign), if any.
    pub fn aligned_axis(&self) -> Option<Axis> {
        Axis::ALL
            .into_iter()
            .find(|a| (self.component(*a).abs() - 1.0).abs() < 1e-12)
    }
}
