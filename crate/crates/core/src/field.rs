use crate::error::{invalid, Result};
use crate::grid::TransverseGrid;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Complex samples on a transverse grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledField {
    grid: TransverseGrid,
    values: Vec<Complex64>,
}

impl SampledField {
    pub fn new(grid: TransverseGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(invalid(format!(
                "field has {} values for a {}-point grid",
                values.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: TransverseGrid, f: impl Fn(f64) -> Complex64) -> Self {
        let values = (0..grid.len()).map(|i| f(grid.sample(i))).collect();
        Self { grid, values }
    }

    pub fn from_real_fn(grid: TransverseGrid, f: impl Fn(f64) -> f64) -> Self {
        Self::from_fn(grid, |x| Complex64::new(f(x), 0.0))
    }

    pub fn from_real(grid: TransverseGrid, values: &[f64]) -> Result<Self> {
        Self::new(grid, values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn zeros(grid: TransverseGrid) -> Self {
        Self { grid, values: vec![Complex64::new(0.0, 0.0); grid.len()] }
    }

    pub fn ones(grid: TransverseGrid) -> Self {
        Self { grid, values: vec![Complex64::new(1.0, 0.0); grid.len()] }
    }

    pub fn grid(&self) -> &TransverseGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn real_parts(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.re).collect()
    }

    pub fn intensities(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm_sqr()).collect()
    }

    /// Rectangle-rule integral of |E|^2.
    pub fn total_power(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.spacing()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Pointwise product; grids must agree.
    pub fn multiply(&self, other: &SampledField) -> Result<SampledField> {
        self.grid.ensure_matches(&other.grid, "pointwise product")?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect();
        Ok(Self { grid: self.grid, values })
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> SampledField {
        Self { grid: self.grid, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    /// Linear interpolation at `x`; zero outside the sampled span.
    pub fn interpolate(&self, x: f64) -> Complex64 {
        let f = self.grid.fractional_index(x);
        let n = self.values.len();
        if f.is_nan() || f < 0.0 || f > (n - 1) as f64 {
            return Complex64::new(0.0, 0.0);
        }
        let i = f.floor() as usize;
        if i >= n - 1 {
            return self.values[n - 1];
        }
        let t = f - i as f64;
        self.values[i] * (1.0 - t) + self.values[i + 1] * t
    }

    /// Second-moment width `2*sqrt(<(x - <x>)^2>)` of |E|^2, the 1/e^2 radius for a Gaussian.
    pub fn rms_width(&self) -> f64 {
        let xs = self.grid.samples();
        let w: Vec<f64> = self.intensities();
        let total: f64 = w.iter().sum();
        let mean = xs.iter().zip(&w).map(|(x, p)| x * p).sum::<f64>() / total;
        let var = xs.iter().zip(&w).map(|(x, p)| (x - mean).powi(2) * p).sum::<f64>() / total;
        2.0 * var.sqrt()
    }
}

/// Below this distance (in units of one period) a grating phase counts as an edge.
const EDGE_SNAP: f64 = 1e-9;

/// Binary amplitude grating: transmits 1 where `((x - offset) mod period) / period < duty`.
pub fn ronchi_grating(
    grid: TransverseGrid,
    period: f64,
    duty: f64,
    phase_offset: f64,
) -> Result<SampledField> {
    if !(period.is_finite() && period > 0.0) {
        return Err(invalid(format!("grating period must be positive, got {period}")));
    }
    if !(0.0..=1.0).contains(&duty) {
        return Err(invalid(format!("duty cycle must lie in [0, 1], got {duty}")));
    }
    Ok(SampledField::from_real_fn(grid, |x| {
        let phase = (x - phase_offset) / period;
        let mut frac = phase - phase.floor();
        if frac > 1.0 - EDGE_SNAP {
            frac = 0.0;
        }
        if frac < duty - EDGE_SNAP {
            1.0
        } else {
            0.0
        }
    }))
}

/// Amplitude grating `(1 + contrast * cos(2 pi nu x)) / 2`.
pub fn sinusoidal_grating(
    grid: TransverseGrid,
    frequency: f64,
    contrast: f64,
) -> Result<SampledField> {
    if !(frequency.is_finite() && frequency >= 0.0) {
        return Err(invalid(format!("grating frequency must be non-negative, got {frequency}")));
    }
    if !(0.0..=1.0).contains(&contrast) {
        return Err(invalid(format!("contrast must lie in [0, 1], got {contrast}")));
    }
    Ok(SampledField::from_real_fn(grid, |x| 0.5 * (1.0 + contrast * (2.0 * PI * frequency * x).cos())))
}

/// Zeroes a mask outside `|x - center| <= half_width`.
pub fn with_aperture(mask: &SampledField, center: f64, half_width: f64) -> SampledField {
    let grid = *mask.grid();
    let values = mask
        .values()
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            if (grid.sample(i) - center).abs() <= half_width * (1.0 + 1e-12) {
                v
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    SampledField { grid, values }
}

/// Gaussian beam field `exp(-(x - x0)^2 / w0^2)` at its waist.
pub fn gaussian_beam(grid: TransverseGrid, waist: f64, x0: f64) -> Result<SampledField> {
    if !(waist.is_finite() && waist > 0.0) {
        return Err(invalid(format!("beam waist must be positive, got {waist}")));
    }
    Ok(SampledField::from_real_fn(grid, |x| (-((x - x0) / waist).powi(2)).exp()))
}
