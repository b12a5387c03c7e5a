use crate::element::{OpticalElement, Wavenumber};
use crate::error::{invalid, Error, Result};
use crate::field::SampledField;
use crate::grid::TransverseGrid;
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::f64::consts::PI;
use std::sync::Arc;

/// Which discretisation of the Fresnel integral to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PropagationMethod {
    /// Zero-padded FFT convolution with the sampled kernel, O(N log N).
    #[default]
    Fft,
    /// Direct O(N^2) rectangle-rule sum of the kernel. The reference.
    Quadrature,
}

/// Rejects chirps `exp(i k x^2 / 2z)` that alias at the window edge.
pub fn check_sampling(grid: &TransverseGrid, distance: f64, k: Wavenumber) -> Result<()> {
    let x_max = grid.half_width();
    let ratio = (k.value() * grid.spacing() * x_max / distance).abs();
    if ratio > PI {
        return Err(Error::SamplingViolation {
            ratio,
            spacing: grid.spacing(),
            x_max,
            distance,
        });
    }
    Ok(())
}

/// Sampled Fresnel kernel `sqrt(k/(2 pi i z)) exp(i k r^2 / 2z) dx` at offset `r = d dx`.
fn kernel_tap(k: f64, z: f64, dx: f64, d: usize) -> Complex64 {
    let r = d as f64 * dx;
    let amp = (k / (2.0 * PI * z)).sqrt() * dx;
    Complex64::from_polar(amp, k * r * r / (2.0 * z) - PI / 4.0)
}

/// Fresnel propagation over a fixed distance on a fixed grid, with the
/// kernel spectrum cached so repeated applications cost two FFTs each.
#[derive(Clone)]
pub struct FresnelOperator {
    grid: TransverseGrid,
    z: f64,
    k: f64,
    method: PropagationMethod,
    taps: Vec<Complex64>,
    kernel_spectrum: Vec<Complex64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for FresnelOperator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FresnelOperator")
            .field("n", &self.grid.len())
            .field("z", &self.z)
            .field("method", &self.method)
            .finish()
    }
}

impl FresnelOperator {
    /// Builds the operator; `z` must be positive and pass the sampling check.
    pub fn new(grid: TransverseGrid, z: f64, k: Wavenumber, method: PropagationMethod) -> Result<Self> {
        if !(z.is_finite() && z > 0.0) {
            return Err(invalid(format!("propagation distance must be positive, got {z}")));
        }
        check_sampling(&grid, z, k)?;
        let n = grid.len();
        let dx = grid.spacing();
        let taps: Vec<Complex64> = (0..n).map(|d| kernel_tap(k.value(), z, dx, d)).collect();
        let padded = 2 * n;
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(padded);
        let inverse = planner.plan_fft_inverse(padded);
        let mut kernel_spectrum = Vec::new();
        if method == PropagationMethod::Fft {
            kernel_spectrum = vec![Complex64::new(0.0, 0.0); padded];
            for d in 0..n {
                kernel_spectrum[d] = taps[d];
                if d > 0 {
                    kernel_spectrum[padded - d] = taps[d];
                }
            }
            forward.process(&mut kernel_spectrum);
            let norm = 1.0 / padded as f64;
            for v in &mut kernel_spectrum {
                *v *= norm;
            }
        }
        Ok(Self { grid, z, k: k.value(), method, taps, kernel_spectrum, forward, inverse })
    }

    pub fn grid(&self) -> &TransverseGrid {
        &self.grid
    }

    pub fn distance(&self) -> f64 {
        self.z
    }

    /// Propagates `values` in place. The operator matrix is symmetric, so
    /// this is also its transpose.
    pub fn apply(&self, values: &mut [Complex64]) {
        assert_eq!(values.len(), self.grid.len(), "field length does not match operator grid");
        match self.method {
            PropagationMethod::Fft => self.apply_fft(values),
            PropagationMethod::Quadrature => self.apply_quadrature(values),
        }
    }

    fn apply_fft(&self, values: &mut [Complex64]) {
        let n = values.len();
        let mut buf = vec![Complex64::new(0.0, 0.0); 2 * n];
        buf[..n].copy_from_slice(values);
        self.forward.process(&mut buf);
        for (b, h) in buf.iter_mut().zip(&self.kernel_spectrum) {
            *b *= h;
        }
        self.inverse.process(&mut buf);
        values.copy_from_slice(&buf[..n]);
    }

    fn apply_quadrature(&self, values: &mut [Complex64]) {
        let input = values.to_vec();
        for (m, out) in values.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (n, &v) in input.iter().enumerate() {
                if v.re != 0.0 || v.im != 0.0 {
                    acc += v * self.taps[m.abs_diff(n)];
                }
            }
            *out = acc;
        }
    }

    /// Wavenumber the operator was built for.
    pub fn wavenumber(&self) -> f64 {
        self.k
    }
}

/// Fresnel integral of `field` over distance `z` using the FFT fast path.
pub fn fresnel_propagate(field: &SampledField, z: f64, k: Wavenumber) -> Result<SampledField> {
    fresnel_propagate_with(field, z, k, PropagationMethod::Fft)
}

pub fn fresnel_propagate_with(
    field: &SampledField,
    z: f64,
    k: Wavenumber,
    method: PropagationMethod,
) -> Result<SampledField> {
    if !(z.is_finite() && z >= 0.0) {
        return Err(invalid(format!("propagation distance must be non-negative, got {z}")));
    }
    if z == 0.0 {
        return Ok(field.clone());
    }
    let op = FresnelOperator::new(*field.grid(), z, k, method)?;
    let mut out = field.clone();
    op.apply(out.values_mut());
    Ok(out)
}

/// Thin-lens phase `exp(-i k x^2 / 2f)` sampled on `grid`, after checking its chirp.
pub fn lens_phase(grid: &TransverseGrid, f: f64, k: Wavenumber) -> Result<Vec<Complex64>> {
    check_sampling(grid, f, k)?;
    Ok((0..grid.len())
        .map(|i| {
            let x = grid.sample(i);
            Complex64::from_polar(1.0, -k.value() * x * x / (2.0 * f))
        })
        .collect())
}

/// Applies one element to a field on its own grid.
pub fn apply_element(field: &SampledField, elem: &OpticalElement, k: Wavenumber) -> Result<SampledField> {
    apply_element_with(field, elem, k, PropagationMethod::Fft)
}

pub fn apply_element_with(
    field: &SampledField,
    elem: &OpticalElement,
    k: Wavenumber,
    method: PropagationMethod,
) -> Result<SampledField> {
    match elem {
        OpticalElement::FreeSpace { z } => fresnel_propagate_with(field, *z, k, method),
        OpticalElement::ThinLens { f } => {
            let phase = lens_phase(field.grid(), *f, k)?;
            let values = field.values().iter().zip(&phase).map(|(a, b)| a * b).collect();
            SampledField::new(*field.grid(), values)
        }
        OpticalElement::Mask(t) => field.multiply(t),
    }
}
