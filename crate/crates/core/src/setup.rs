//! Complete pump-idler and idler-signal experiments: gratings, geometry and
//! the numeric grids needed to evaluate them both numerically and in closed form.

use crate::arm::Arm;
use crate::biphoton::{joint_amplitude_at, BiphotonState, EngineOptions, SpectralWindow};
use crate::closed_form::{coincidence_idler_signal, coincidence_pump_idler, IdlerSignalGeometry, PumpIdlerGeometry};
use crate::element::Wavenumber;
use crate::error::{invalid, Result};
use crate::field::{ronchi_grating, sinusoidal_grating, with_aperture, SampledField};
use crate::grid::{GridKind, TransverseGrid};
use crate::pump::{build_pump_spectrum, PumpModel};
use ndarray::Array2;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Transmission profile of a grating, optionally limited by a clear aperture.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GratingShape {
    Open,
    Sinusoidal { frequency: f64, contrast: f64 },
    Ronchi { period: f64, duty: f64, offset: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grating {
    pub shape: GratingShape,
    /// Half width of the clear aperture about x = 0, if finite.
    pub aperture_half_width: Option<f64>,
}

impl Grating {
    pub fn open() -> Self {
        Self { shape: GratingShape::Open, aperture_half_width: None }
    }

    pub fn sinusoidal(frequency: f64, contrast: f64) -> Self {
        Self { shape: GratingShape::Sinusoidal { frequency, contrast }, aperture_half_width: None }
    }

    pub fn ronchi(period: f64, duty: f64, offset: f64) -> Self {
        Self { shape: GratingShape::Ronchi { period, duty, offset }, aperture_half_width: None }
    }

    pub fn with_aperture(mut self, half_width: f64) -> Self {
        self.aperture_half_width = Some(half_width);
        self
    }

    /// Period of the grating, if it has one.
    pub fn period(&self) -> Option<f64> {
        match self.shape {
            GratingShape::Open => None,
            GratingShape::Sinusoidal { frequency, .. } => (frequency > 0.0).then(|| 1.0 / frequency),
            GratingShape::Ronchi { period, .. } => Some(period),
        }
    }

    pub fn sample(&self, grid: TransverseGrid) -> Result<SampledField> {
        let t = match self.shape {
            GratingShape::Open => SampledField::ones(grid),
            GratingShape::Sinusoidal { frequency, contrast } => sinusoidal_grating(grid, frequency, contrast)?,
            GratingShape::Ronchi { period, duty, offset } => ronchi_grating(grid, period, duty, offset)?,
        };
        Ok(match self.aperture_half_width {
            Some(h) => with_aperture(&t, 0.0, h),
            None => t,
        })
    }
}

/// Incident pump before the object mask.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PumpBeam {
    PlaneWave,
    Gaussian { waist: f64 },
}

/// Discretisation shared by both arms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericGrids {
    /// Signal and idler q samples; the pump grid has twice as many.
    pub q_points: usize,
    /// Crystal-plane period `2 pi / dq`.
    pub q_period: f64,
    pub window: SpectralWindow,
    pub work_points: usize,
    pub work_spacing: f64,
}

impl NumericGrids {
    pub fn q_grid(&self) -> Result<TransverseGrid> {
        if !(self.q_period.is_finite() && self.q_period > 0.0) {
            return Err(invalid(format!("q period must be positive, got {}", self.q_period)));
        }
        TransverseGrid::frequency(self.q_points, 2.0 * PI / self.q_period)
    }

    pub fn work_grid(&self) -> Result<TransverseGrid> {
        TransverseGrid::new(self.work_points, 0.0, self.work_spacing, GridKind::Position)
    }

    /// Same grids with the q spacing halved and the q count doubled.
    pub fn refined(&self) -> Self {
        Self { q_points: 2 * self.q_points, q_period: 2.0 * self.q_period, ..*self }
    }
}

/// Common interface for evaluating a setup both ways.
pub trait Experiment {
    /// Numeric joint amplitude, rows = signal positions, columns = idler positions.
    fn numeric_amplitude(&self, xs: &[f64], xi: &[f64], opts: EngineOptions) -> Result<Array2<Complex64>>;
    /// Closed-form coincidence rate on the same positions.
    fn closed_form(&self, xs: &[f64], xi: &[f64]) -> Result<Array2<f64>>;
    fn grids(&self) -> &NumericGrids;

    fn numeric_coincidences(&self, xs: &[f64], xi: &[f64], opts: EngineOptions) -> Result<Array2<f64>> {
        Ok(self.numeric_amplitude(xs, xi, opts)?.mapv(|a| a.norm_sqr()))
    }
}

/// Object grating `A1` in the pump, `A2` in front of the idler detector.
#[derive(Debug, Clone, PartialEq)]
pub struct PumpIdlerSetup {
    pub k_pump: Wavenumber,
    pub pump: PumpBeam,
    pub geometry: PumpIdlerGeometry,
    pub a1: Grating,
    pub a2: Grating,
    pub grids: NumericGrids,
}

fn pump_model(beam: PumpBeam, a1: &Grating, profile_grid: TransverseGrid) -> Result<PumpModel> {
    if beam == PumpBeam::PlaneWave && a1.shape == GratingShape::Open && a1.aperture_half_width.is_none() {
        return Ok(PumpModel::PlaneWave);
    }
    let t = a1.sample(profile_grid)?;
    let profile = match beam {
        PumpBeam::PlaneWave => t,
        PumpBeam::Gaussian { waist } => {
            let e0 = crate::field::gaussian_beam(profile_grid, waist, 0.0)?;
            t.multiply(&e0)?
        }
    };
    Ok(PumpModel::Masked { profile })
}

impl PumpIdlerSetup {
    pub fn state(&self) -> Result<BiphotonState> {
        let q = self.grids.q_grid()?;
        let pg = BiphotonState::pump_grid_for(&q)?;
        let model = pump_model(self.pump, &self.a1, pg.conjugate())?;
        let spectrum = build_pump_spectrum(model, self.geometry.z0(), self.k_pump, &pg)?;
        BiphotonState::degenerate(spectrum, self.k_pump, q, self.grids.window)
    }

    pub fn signal_arm(&self) -> Result<Arm> {
        Arm::new(self.geometry.signal_chain()?, self.grids.work_grid()?)
    }

    pub fn idler_arm(&self) -> Result<Arm> {
        let work = self.grids.work_grid()?;
        Arm::new(self.geometry.idler_chain(self.a2.sample(work)?)?, work)
    }
}

impl Experiment for PumpIdlerSetup {
    fn numeric_amplitude(&self, xs: &[f64], xi: &[f64], opts: EngineOptions) -> Result<Array2<Complex64>> {
        joint_amplitude_at(&self.state()?, &self.signal_arm()?, &self.idler_arm()?, xs, xi, opts)
    }

    fn closed_form(&self, xs: &[f64], xi: &[f64]) -> Result<Array2<f64>> {
        let work = self.grids.work_grid()?;
        let (a1, a2) = (self.a1.sample(work)?, self.a2.sample(work)?);
        Ok(Array2::from_shape_fn((xs.len(), xi.len()), |(m, n)| {
            coincidence_pump_idler(&a1, &a2, &self.geometry, xs[m], xi[n])
        }))
    }

    fn grids(&self) -> &NumericGrids {
        &self.grids
    }
}

/// `A1` in the idler arm's intermediate focal plane, `A2` one focal length after the crystal in the signal arm.
#[derive(Debug, Clone, PartialEq)]
pub struct IdlerSignalSetup {
    pub k_pump: Wavenumber,
    pub pump: PumpBeam,
    pub geometry: IdlerSignalGeometry,
    pub a1: Grating,
    pub a2: Grating,
    pub grids: NumericGrids,
}

impl IdlerSignalSetup {
    pub fn state(&self) -> Result<BiphotonState> {
        let q = self.grids.q_grid()?;
        let pg = BiphotonState::pump_grid_for(&q)?;
        let model = pump_model(self.pump, &Grating::open(), pg.conjugate())?;
        let spectrum = build_pump_spectrum(model, 0.0, self.k_pump, &pg)?;
        BiphotonState::degenerate(spectrum, self.k_pump, q, self.grids.window)
    }

    pub fn signal_arm(&self) -> Result<Arm> {
        let work = self.grids.work_grid()?;
        Arm::new(self.geometry.signal_chain(self.a2.sample(work)?)?, work)
    }

    pub fn idler_arm(&self) -> Result<Arm> {
        let work = self.grids.work_grid()?;
        Arm::new(self.geometry.idler_chain(self.a1.sample(work)?)?, work)
    }
}

impl Experiment for IdlerSignalSetup {
    fn numeric_amplitude(&self, xs: &[f64], xi: &[f64], opts: EngineOptions) -> Result<Array2<Complex64>> {
        joint_amplitude_at(&self.state()?, &self.signal_arm()?, &self.idler_arm()?, xs, xi, opts)
    }

    fn closed_form(&self, xs: &[f64], xi: &[f64]) -> Result<Array2<f64>> {
        let work = self.grids.work_grid()?;
        let (a1, a2) = (self.a1.sample(work)?, self.a2.sample(work)?);
        Ok(Array2::from_shape_fn((xs.len(), xi.len()), |(m, n)| coincidence_idler_signal(&a1, &a2, xs[m], xi[n])))
    }

    fn grids(&self) -> &NumericGrids {
        &self.grids
    }
}

/// Reference pump-idler experiment: sinusoidal gratings at 8/mm (pump) and
/// 5/mm (idler), unit magnification with f = 0.55 m.
pub fn reference_pump_idler() -> Result<PumpIdlerSetup> {
    Ok(PumpIdlerSetup {
        k_pump: Wavenumber::from_wavelength(351e-9)?,
        pump: PumpBeam::PlaneWave,
        geometry: PumpIdlerGeometry::new(1.0, 0.1, 0.55)?,
        a1: Grating::sinusoidal(8e3, 1.0),
        a2: Grating::sinusoidal(5e3, 1.0),
        grids: NumericGrids {
            q_points: 256,
            q_period: 16e-3,
            window: SpectralWindow::Tapered { flat_fraction: 0.7 },
            work_points: 2048,
            work_spacing: 7.8125e-6,
        },
    })
}

/// Reference idler-signal experiment: Ronchi gratings of 200 um (A1, 3 mm
/// clear aperture) and 320 um (A2), both offset by 10 um, with f = 20 mm.
pub fn reference_idler_signal() -> Result<IdlerSignalSetup> {
    Ok(IdlerSignalSetup {
        k_pump: Wavenumber::from_wavelength(351e-9)?,
        pump: PumpBeam::PlaneWave,
        geometry: IdlerSignalGeometry::new(0.02)?,
        a1: Grating::ronchi(200e-6, 0.5, 10e-6).with_aperture(1.5e-3),
        a2: Grating::ronchi(320e-6, 0.5, 10e-6),
        grids: NumericGrids {
            q_points: 4096,
            q_period: 3.2e-3,
            window: SpectralWindow::Tapered { flat_fraction: 0.5 },
            work_points: 131072,
            work_spacing: 0.3125e-6,
        },
    })
}

/// `n` detector positions spaced `pitch` apart with index `n/2` at `center`.
pub fn detector_positions(n: usize, pitch: f64, center: f64) -> Vec<f64> {
    (0..n).map(|i| center + (i as f64 - (n / 2) as f64) * pitch).collect()
}

/// Peak-normalised max deviation and Pearson correlation of two profiles.
pub fn profile_agreement(a: &[f64], b: &[f64]) -> (f64, Option<f64>) {
    let pa = a.iter().copied().fold(0.0, f64::max);
    let pb = b.iter().copied().fold(0.0, f64::max);
    let dev = a.iter().zip(b).map(|(x, y)| (x / pa - y / pb).abs()).fold(0.0, f64::max);
    (dev, pearson(a, b))
}

/// Pearson correlation; `None` when either profile has zero variance.
pub fn pearson(a: &[f64], b: &[f64]) -> Option<f64> {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma).powi(2);
        sbb += (y - mb).powi(2);
    }
    if saa == 0.0 || sbb == 0.0 {
        return None;
    }
    Some(sab / (saa * sbb).sqrt())
}
