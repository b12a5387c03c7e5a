use crate::element::{OpticalElement, Wavenumber};
use crate::error::{invalid, Result};
use crate::field::SampledField;

/// Pump-idler layout: the object mask sits `z0` before the crystal in the
/// pump beam; each arm runs crystal -> `z1` -> lens `f` -> `z2` -> detector.
///
/// Object and image distances are `O = z0 + z1` and `I = z2`, tied by the
/// thin-lens law, which the constructor enforces by solving for `z2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PumpIdlerGeometry {
    z0: f64,
    z1: f64,
    z2: f64,
    f: f64,
}

impl PumpIdlerGeometry {
    pub fn new(z0: f64, z1: f64, f: f64) -> Result<Self> {
        if !(z0.is_finite() && z0 >= 0.0 && z1.is_finite() && z1 >= 0.0) {
            return Err(invalid(format!("distances must be non-negative, got z0 = {z0}, z1 = {z1}")));
        }
        if !(f.is_finite() && f > 0.0) {
            return Err(invalid(format!("focal length must be positive, got {f}")));
        }
        let o = z0 + z1;
        if o <= f {
            return Err(invalid(format!("object distance {o} m must exceed the focal length {f} m for a real image")));
        }
        let z2 = 1.0 / (1.0 / f - 1.0 / o);
        Ok(Self { z0, z1, z2, f })
    }

    /// Geometry with image magnification `I/O = m` for a given lens and crystal-lens leg.
    pub fn with_magnification(f: f64, z1: f64, m: f64) -> Result<Self> {
        if !(m.is_finite() && m > 0.0) {
            return Err(invalid(format!("magnification must be positive, got {m}")));
        }
        let o = f * (1.0 + 1.0 / m);
        Self::new(o - z1, z1, f)
    }

    pub fn z0(&self) -> f64 {
        self.z0
    }

    pub fn z1(&self) -> f64 {
        self.z1
    }

    pub fn z2(&self) -> f64 {
        self.z2
    }

    pub fn focal_length(&self) -> f64 {
        self.f
    }

    pub fn object_distance(&self) -> f64 {
        self.z0 + self.z1
    }

    pub fn image_distance(&self) -> f64 {
        self.z2
    }

    /// Image magnification `I/O`.
    pub fn magnification(&self) -> f64 {
        self.z2 / (self.z0 + self.z1)
    }

    /// `alpha = k/(2f) - k/(2 z2)`.
    pub fn alpha(&self, k: Wavenumber) -> f64 {
        k.value() / (2.0 * self.f) - k.value() / (2.0 * self.z2)
    }

    /// Coefficient of `q^2` in the phase of one arm's transfer function,
    /// `1/(4 alpha) - z1/(2k)`.
    pub fn b_constant(&self, k: Wavenumber) -> f64 {
        1.0 / (4.0 * self.alpha(k)) - self.z1 / (2.0 * k.value())
    }

    /// Signal arm: crystal -> z1 -> lens -> z2 -> detector.
    pub fn signal_chain(&self) -> Result<Vec<OpticalElement>> {
        Ok(vec![
            OpticalElement::free_space(self.z1)?,
            OpticalElement::thin_lens(self.f)?,
            OpticalElement::free_space(self.z2)?,
        ])
    }

    /// Idler arm: as the signal arm with `A2` in front of the detector.
    pub fn idler_chain(&self, a2: SampledField) -> Result<Vec<OpticalElement>> {
        let mut chain = self.signal_chain()?;
        chain.push(OpticalElement::mask(a2));
        Ok(chain)
    }
}

/// Idler-signal layout with every leg tied to one focal length.
///
/// Idler: crystal -f- lens -2f- A1 -2f- lens -f- detector.
/// Signal: crystal -f- A2 -2f- lens -2f- detector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdlerSignalGeometry {
    f: f64,
}

impl IdlerSignalGeometry {
    pub fn new(f: f64) -> Result<Self> {
        if !(f.is_finite() && f > 0.0) {
            return Err(invalid(format!("focal length must be positive, got {f}")));
        }
        Ok(Self { f })
    }

    pub fn focal_length(&self) -> f64 {
        self.f
    }

    /// Idler legs `[f, 2f, 2f, f]`.
    pub fn idler_legs(&self) -> [f64; 4] {
        [self.f, 2.0 * self.f, 2.0 * self.f, self.f]
    }

    /// Signal legs `[f, 2f, 2f]`.
    pub fn signal_legs(&self) -> [f64; 3] {
        [self.f, 2.0 * self.f, 2.0 * self.f]
    }

    pub fn idler_chain(&self, a1: SampledField) -> Result<Vec<OpticalElement>> {
        let [z1, z2, z3, z4] = self.idler_legs();
        Ok(vec![
            OpticalElement::free_space(z1)?,
            OpticalElement::thin_lens(self.f)?,
            OpticalElement::free_space(z2)?,
            OpticalElement::mask(a1),
            OpticalElement::free_space(z3)?,
            OpticalElement::thin_lens(self.f)?,
            OpticalElement::free_space(z4)?,
        ])
    }

    pub fn signal_chain(&self, a2: SampledField) -> Result<Vec<OpticalElement>> {
        let [z5, z6, z7] = self.signal_legs();
        Ok(vec![
            OpticalElement::free_space(z5)?,
            OpticalElement::mask(a2),
            OpticalElement::free_space(z6)?,
            OpticalElement::thin_lens(self.f)?,
            OpticalElement::free_space(z7)?,
        ])
    }
}

/// Pump-idler coincidence `|A2(x_i)|^2 |A1(-(x_s + x_i) / 2m)|^2` with `m = I/O`.
///
/// Masks are linearly interpolated and read as opaque outside their grids.
pub fn coincidence_pump_idler(a1: &SampledField, a2: &SampledField, geom: &PumpIdlerGeometry, x_s: f64, x_i: f64) -> f64 {
    let arg = -(x_s + x_i) / (2.0 * geom.magnification());
    a2.interpolate(x_i).norm_sqr() * a1.interpolate(arg).norm_sqr()
}

/// Idler-signal coincidence `|A2(-x_s)|^2 |A1(x_s)|^2`; `x_i` does not enter.
pub fn coincidence_idler_signal(a1: &SampledField, a2: &SampledField, x_s: f64, _x_i: f64) -> f64 {
    a2.interpolate(-x_s).norm_sqr() * a1.interpolate(x_s).norm_sqr()
}

/// Which coordinate is scanned while the other detector stays put.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanAxis {
    Signal,
    Idler,
    /// The half-sum `(x_s + x_i)/2` itself.
    HalfSum,
}

/// Period of the `A1` fringe seen in a pump-idler scan.
pub fn conditional_image_period(a1_period: f64, geom: &PumpIdlerGeometry, scan: ScanAxis) -> f64 {
    match scan {
        ScanAxis::Signal | ScanAxis::Idler => 2.0 * a1_period * geom.magnification(),
        ScanAxis::HalfSum => a1_period * geom.magnification(),
    }
}
