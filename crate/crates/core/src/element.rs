use crate::error::{invalid, Result};
use crate::field::SampledField;
use std::f64::consts::PI;

/// Wavenumber `2 pi / lambda` in rad/m.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wavenumber(f64);

impl Wavenumber {
    pub fn new(k: f64) -> Result<Self> {
        if !(k.is_finite() && k > 0.0) {
            return Err(invalid(format!("wavenumber must be positive, got {k}")));
        }
        Ok(Self(k))
    }

    pub fn from_wavelength(lambda: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(invalid(format!("wavelength must be positive, got {lambda}")));
        }
        Ok(Self(2.0 * PI / lambda))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn wavelength(self) -> f64 {
        2.0 * PI / self.0
    }
}

/// One stage of an optical arm.
#[derive(Debug, Clone, PartialEq)]
pub enum OpticalElement {
    /// Paraxial propagation over `z` metres (z >= 0).
    FreeSpace { z: f64 },
    /// Thin lens of focal length `f` (either sign, nonzero).
    ThinLens { f: f64 },
    /// Pointwise transmission on its own grid.
    Mask(SampledField),
}

impl OpticalElement {
    pub fn free_space(z: f64) -> Result<Self> {
        if !(z.is_finite() && z >= 0.0) {
            return Err(invalid(format!("free-space distance must be non-negative, got {z}")));
        }
        Ok(Self::FreeSpace { z })
    }

    pub fn thin_lens(f: f64) -> Result<Self> {
        if !(f.is_finite() && f != 0.0) {
            return Err(invalid(format!("focal length must be finite and nonzero, got {f}")));
        }
        Ok(Self::ThinLens { f })
    }

    pub fn mask(transmission: SampledField) -> Self {
        Self::Mask(transmission)
    }
}
