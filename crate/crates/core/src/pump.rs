use crate::element::Wavenumber;
use crate::error::{invalid, Error, Result};
use crate::field::SampledField;
use crate::grid::{rel_close, GridKind, TransverseGrid};
use num_complex::Complex64;
use rustfft::FftPlanner;
use std::f64::consts::PI;

/// Transverse pump field just after the object plane.
#[derive(Debug, Clone, PartialEq)]
pub enum PumpModel {
    PlaneWave,
    /// Gaussian field `exp(-x^2 / w^2)`.
    Gaussian { waist: f64 },
    /// Sampled field `A1(x) E0(x)` on the grid conjugate to the pump q-grid.
    Masked { profile: SampledField },
}

/// Angular spectrum `V(q)` of the pump at the crystal, with the convention
/// `W(x) = integral V(q) exp(i q x) dq`.
#[derive(Debug, Clone, PartialEq)]
pub struct PumpSpectrum {
    model: PumpModel,
    propagation_z: f64,
    spectrum: SampledField,
}

impl PumpSpectrum {
    pub fn model(&self) -> &PumpModel {
        &self.model
    }

    pub fn propagation_z(&self) -> f64 {
        self.propagation_z
    }

    pub fn spectrum(&self) -> &SampledField {
        &self.spectrum
    }

    pub fn q_grid(&self) -> &TransverseGrid {
        self.spectrum.grid()
    }

    /// Same model and grid with every spectral sample multiplied by `c`.
    pub fn scaled(&self, c: Complex64) -> Self {
        Self { spectrum: self.spectrum.map(|v| v * c), ..self.clone() }
    }

    /// Sum of two spectra on the same grid; the model of `self` is kept.
    pub fn superpose(&self, other: &PumpSpectrum) -> Result<Self> {
        other.q_grid().ensure_matches(self.q_grid(), "pump superposition")?;
        let values = self.spectrum.values().iter().zip(other.spectrum.values()).map(|(a, b)| a + b).collect();
        Ok(Self { spectrum: SampledField::new(*self.q_grid(), values)?, ..self.clone() })
    }
}

/// Samples the pump angular spectrum on `q_grid` after free propagation over `z`
/// from the object plane to the crystal.
pub fn build_pump_spectrum(model: PumpModel, z: f64, k_p: Wavenumber, q_grid: &TransverseGrid) -> Result<PumpSpectrum> {
    if q_grid.kind() != GridKind::Frequency {
        return Err(invalid("pump spectrum needs a frequency grid"));
    }
    if !(z.is_finite() && z >= 0.0) {
        return Err(invalid(format!("pump propagation distance must be non-negative, got {z}")));
    }
    let dq = q_grid.spacing();
    let mut values: Vec<Complex64> = match &model {
        PumpModel::PlaneWave => {
            let i0 = q_grid.index_of(0.0, 1e-9).ok_or_else(|| Error::GridMismatch("q = 0 is not a sample of the pump grid".into()))?;
            let mut v = vec![Complex64::new(0.0, 0.0); q_grid.len()];
            v[i0] = Complex64::new(1.0 / dq, 0.0);
            v
        }
        PumpModel::Gaussian { waist } => {
            if !(waist.is_finite() && *waist > 0.0) {
                return Err(invalid(format!("pump waist must be positive, got {waist}")));
            }
            let w = *waist;
            q_grid
                .samples()
                .iter()
                .map(|q| Complex64::new(w / (2.0 * PI.sqrt()) * (-(q * w).powi(2) / 4.0).exp(), 0.0))
                .collect()
        }
        PumpModel::Masked { profile } => masked_spectrum(profile, q_grid)?,
    };
    if z > 0.0 {
        for (v, q) in values.iter_mut().zip(q_grid.samples()) {
            *v *= Complex64::from_polar(1.0, -q * q * z / (2.0 * k_p.value()));
        }
    }
    Ok(PumpSpectrum { model, propagation_z: z, spectrum: SampledField::new(*q_grid, values)? })
}

/// `V(q_j) = (1/2pi) sum_n W(x_n) exp(-i q_j x_n) dx` via one FFT.
fn masked_spectrum(profile: &SampledField, q_grid: &TransverseGrid) -> Result<Vec<Complex64>> {
    let xg = profile.grid();
    let n = q_grid.len();
    if xg.kind() != GridKind::Position
        || xg.len() != n
        || !rel_close(xg.spacing() * q_grid.spacing() * n as f64, 2.0 * PI, 1e-9)
    {
        return Err(Error::GridMismatch(format!(
            "pump profile grid (n = {}, dx = {:e}) is not conjugate to the q grid (n = {}, dq = {:e})",
            xg.len(),
            xg.spacing(),
            n,
            q_grid.spacing()
        )));
    }
    let half = (n / 2) as i64;
    let (cx, cq, dx) = (xg.center(), q_grid.center(), xg.spacing());
    // strip the q-grid centre from the kernel, then FFT over shifted indices
    let mut buf: Vec<Complex64> = profile
        .values()
        .iter()
        .enumerate()
        .map(|(i, &w)| w * Complex64::from_polar(1.0, -cq * xg.sample(i)))
        .collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    Ok((0..n)
        .map(|j| {
            let jj = j as i64 - half;
            let bin = buf[jj.rem_euclid(n as i64) as usize];
            // undo the n/2 index offset of x and the x-grid centre
            let phase = 2.0 * PI * (jj * half) as f64 / n as f64 - jj as f64 * q_grid.spacing() * cx;
            bin * Complex64::from_polar(dx / (2.0 * PI), phase)
        })
        .collect())
}
