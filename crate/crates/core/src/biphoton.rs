use crate::arm::{arm_transfer_matrix_at, Arm, TransferOptions};
use crate::element::Wavenumber;
use crate::error::{invalid, Error, Result};
use crate::exec::{map_range, Execution};
use crate::field::SampledField;
use crate::grid::{rel_close, GridKind, TransverseGrid};
use crate::pump::PumpSpectrum;
use ndarray::Array2;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Weight applied to each signal and idler q sum.
///
/// A hard cutoff of the oscillatory q integrals leaves Gibbs ripple that does
/// not shrink as the grid grows; a smooth roll-off to zero at the grid edge
/// turns the truncated sums into a convergent summation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpectralWindow {
    Hard,
    /// Unit weight for `|q| <= flat_fraction * q_max`, then a smooth fall to 0 at `q_max`.
    Tapered { flat_fraction: f64 },
}

impl Default for SpectralWindow {
    fn default() -> Self {
        Self::Tapered { flat_fraction: 0.5 }
    }
}

impl SpectralWindow {
    pub fn weight(&self, q: f64, q_max: f64) -> f64 {
        match *self {
            Self::Hard => 1.0,
            Self::Tapered { flat_fraction } => {
                let a = q.abs() / q_max;
                let t = ((a - flat_fraction) / (1.0 - flat_fraction)).clamp(0.0, 1.0);
                let s = t * t * t * (t * (6.0 * t - 15.0) + 10.0);
                (0.5 * PI * s).cos().powi(2)
            }
        }
    }

    /// Weights for every sample of a centred q grid, with `q_max = (n/2) dq`.
    pub fn weights(&self, q_grid: &TransverseGrid) -> Vec<f64> {
        let q_max = (q_grid.len() / 2) as f64 * q_grid.spacing();
        q_grid.samples().iter().map(|&q| self.weight(q, q_max)).collect()
    }

    fn validate(&self) -> Result<()> {
        if let Self::Tapered { flat_fraction } = *self {
            if !(0.0..1.0).contains(&flat_fraction) {
                return Err(invalid(format!("taper flat fraction must lie in [0, 1), got {flat_fraction}")));
            }
        }
        Ok(())
    }
}

/// Thin-crystal two-photon state `sum V(q_s + q_i) |q_s>|q_i>`.
#[derive(Debug, Clone, PartialEq)]
pub struct BiphotonState {
    pub pump: PumpSpectrum,
    pub k_signal: Wavenumber,
    pub k_idler: Wavenumber,
    pub q_grid_signal: TransverseGrid,
    pub q_grid_idler: TransverseGrid,
    pub window: SpectralWindow,
}

impl BiphotonState {
    /// Validates that `q_s + q_i` always lands on a pump sample or outside the pump grid.
    pub fn new(
        pump: PumpSpectrum,
        k_signal: Wavenumber,
        k_idler: Wavenumber,
        q_grid_signal: TransverseGrid,
        q_grid_idler: TransverseGrid,
        window: SpectralWindow,
    ) -> Result<Self> {
        window.validate()?;
        let pg = *pump.q_grid();
        for (g, name) in [(&q_grid_signal, "signal"), (&q_grid_idler, "idler")] {
            if g.kind() != GridKind::Frequency {
                return Err(invalid(format!("{name} q grid must be a frequency grid")));
            }
            if !rel_close(g.spacing(), pg.spacing(), 1e-9) || g.center() != 0.0 {
                return Err(Error::GridMismatch(format!(
                    "{name} q grid must share the pump spacing and be centred on zero"
                )));
            }
        }
        if pg.center() != 0.0 {
            return Err(Error::GridMismatch("pump q grid must be centred on zero".into()));
        }
        Ok(Self { pump, k_signal, k_idler, q_grid_signal, q_grid_idler, window })
    }

    /// Degenerate pair `k_s = k_i = k_p / 2` on a common q grid with a pump grid of twice the span.
    pub fn degenerate(pump: PumpSpectrum, k_pump: Wavenumber, q_grid: TransverseGrid, window: SpectralWindow) -> Result<Self> {
        let k = Wavenumber::new(k_pump.value() / 2.0)?;
        Self::new(pump, k, k, q_grid, q_grid, window)
    }

    /// Pump grid of `2n` samples matching a signal/idler q grid of `n` samples.
    pub fn pump_grid_for(q_grid: &TransverseGrid) -> Result<TransverseGrid> {
        TransverseGrid::frequency(2 * q_grid.len(), q_grid.spacing())
    }

    /// Pump-grid index of `q_s[j] + q_i[l]`, if inside the pump grid.
    fn pump_index(&self, j: usize, l: usize) -> Option<usize> {
        let np = self.pump.q_grid().len() as i64;
        let p = j as i64 - (self.q_grid_signal.len() / 2) as i64 + l as i64 - (self.q_grid_idler.len() / 2) as i64 + np / 2;
        (0..np).contains(&p).then_some(p as usize)
    }
}

/// How the double q sum is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Contraction {
    /// Iterate over pump samples `u = q_s + q_i` that are nonzero and sum the pairs on each line.
    #[default]
    PumpSum,
    /// Literal double sum over every `(q_s, q_i)` pair. The reference.
    Direct,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EngineOptions {
    pub transfer: TransferOptions,
    pub contraction: Contraction,
}

impl EngineOptions {
    pub fn with_execution(mut self, exec: Execution) -> Self {
        self.transfer.execution = exec;
        self
    }
}

/// Detection amplitude `<vac| E(x_s) E(x_i) |psi>` on a pair of detector grids.
#[derive(Debug, Clone, PartialEq)]
pub struct JointAmplitude {
    pub x_grid_signal: TransverseGrid,
    pub x_grid_idler: TransverseGrid,
    /// Indexed `(signal sample, idler sample)`.
    pub values: Array2<Complex64>,
}

impl JointAmplitude {
    pub fn new(x_grid_signal: TransverseGrid, x_grid_idler: TransverseGrid, values: Array2<Complex64>) -> Result<Self> {
        if values.dim() != (x_grid_signal.len(), x_grid_idler.len()) {
            return Err(invalid(format!(
                "amplitude shape {:?} does not match grids ({}, {})",
                values.dim(),
                x_grid_signal.len(),
                x_grid_idler.len()
            )));
        }
        Ok(Self { x_grid_signal, x_grid_idler, values })
    }
}

/// Joint amplitude on full detector grids.
pub fn joint_amplitude(
    state: &BiphotonState,
    signal_arm: &Arm,
    idler_arm: &Arm,
    x_grid_signal: &TransverseGrid,
    x_grid_idler: &TransverseGrid,
    opts: EngineOptions,
) -> Result<JointAmplitude> {
    let values = joint_amplitude_at(state, signal_arm, idler_arm, &x_grid_signal.samples(), &x_grid_idler.samples(), opts)?;
    JointAmplitude::new(*x_grid_signal, *x_grid_idler, values)
}

/// Joint amplitude at arbitrary detector positions, rows = signal, columns = idler.
pub fn joint_amplitude_at(
    state: &BiphotonState,
    signal_arm: &Arm,
    idler_arm: &Arm,
    xs: &[f64],
    xi: &[f64],
    opts: EngineOptions,
) -> Result<Array2<Complex64>> {
    let hs = arm_transfer_matrix_at(signal_arm, state.k_signal, &state.q_grid_signal, xs, opts.transfer)?;
    let hi = arm_transfer_matrix_at(idler_arm, state.k_idler, &state.q_grid_idler, xi, opts.transfer)?;
    contract(state, &hs, &hi, opts.contraction, opts.transfer.execution)
}

/// `A[m, n] = sum_{j,l} V(q_j + q_l) Hs[m, j] Hi[n, l] g_j g_l dq^2`.
pub fn contract(
    state: &BiphotonState,
    hs: &Array2<Complex64>,
    hi: &Array2<Complex64>,
    mode: Contraction,
    exec: Execution,
) -> Result<Array2<Complex64>> {
    let (ns, nqs) = hs.dim();
    let (ni, nqi) = hi.dim();
    if nqs != state.q_grid_signal.len() || nqi != state.q_grid_idler.len() {
        return Err(invalid("transfer matrix widths do not match the state's q grids"));
    }
    let dq = state.pump.q_grid().spacing();
    let gs = state.window.weights(&state.q_grid_signal);
    let gi = state.window.weights(&state.q_grid_idler);
    // signal rows pre-weighted; idler stored q-major so the innermost loop is contiguous
    let ws: Vec<Vec<Complex64>> = (0..ns).map(|m| (0..nqs).map(|j| hs[[m, j]] * gs[j]).collect()).collect();
    let wi: Vec<Vec<Complex64>> = (0..nqi).map(|l| (0..ni).map(|n| hi[[n, l]] * gi[l]).collect()).collect();
    let v = state.pump.spectrum().values();
    let scale = dq * dq;

    let rows: Vec<Vec<Complex64>> = match mode {
        Contraction::PumpSum => {
            let vmax = v.iter().map(|c| c.norm()).fold(0.0, f64::max);
            let np = v.len() as i64;
            // each retained pump sample p fixes l = p + offset - j
            let offset = (nqs / 2) as i64 + (nqi / 2) as i64 - np / 2;
            let lines: Vec<(i64, Complex64)> = v
                .iter()
                .enumerate()
                .filter(|(_, c)| c.norm() > 1e-13 * vmax)
                .map(|(p, c)| (p as i64 + offset, c * scale))
                .collect();
            map_range(exec, ns, |m| {
                let mut acc = vec![Complex64::new(0.0, 0.0); ni];
                for &(s, vp) in &lines {
                    let j_lo = (s - nqi as i64 + 1).max(0);
                    let j_hi = s.min(nqs as i64 - 1);
                    for j in j_lo..=j_hi {
                        let c = ws[m][j as usize] * vp;
                        for (a, b) in acc.iter_mut().zip(&wi[(s - j) as usize]) {
                            *a += c * b;
                        }
                    }
                }
                acc
            })
        }
        Contraction::Direct => map_range(exec, ns, |m| {
            let mut acc = vec![Complex64::new(0.0, 0.0); ni];
            for (j, wsj) in ws[m].iter().enumerate() {
                for (l, wil) in wi.iter().enumerate() {
                    let vp = match state.pump_index(j, l) {
                        Some(p) => v[p],
                        None => continue,
                    };
                    let c = wsj * vp * scale;
                    for (a, b) in acc.iter_mut().zip(wil) {
                        *a += c * b;
                    }
                }
            }
            acc
        }),
    };
    let mut out = Array2::zeros((ns, ni));
    for (m, row) in rows.into_iter().enumerate() {
        for (n, val) in row.into_iter().enumerate() {
            out[[m, n]] = val;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    Raw,
    /// Scaled so the maximum is 1.
    PeakOne,
}

/// Coincidence rate `|A|^2` on the detector grids.
#[derive(Debug, Clone, PartialEq)]
pub struct CoincidenceMap {
    pub x_grid_signal: TransverseGrid,
    pub x_grid_idler: TransverseGrid,
    pub values: Array2<f64>,
    pub normalization: Normalization,
}

impl CoincidenceMap {
    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// Box-pixel integration of width `pixel` (metres) along both axes.
    pub fn pixel_integrate(&self, pixel: f64) -> Result<CoincidenceMap> {
        let half_s = (0.5 * pixel / self.x_grid_signal.spacing()).floor() as usize;
        let half_i = (0.5 * pixel / self.x_grid_idler.spacing()).floor() as usize;
        let (ns, ni) = self.values.dim();
        let mut out = Array2::zeros((ns, ni));
        for m in 0..ns {
            for n in 0..ni {
                let (m0, m1) = (m.saturating_sub(half_s), (m + half_s).min(ns - 1));
                let (n0, n1) = (n.saturating_sub(half_i), (n + half_i).min(ni - 1));
                let block = self.values.slice(ndarray::s![m0..=m1, n0..=n1]);
                out[[m, n]] = block.sum() / block.len() as f64;
            }
        }
        Ok(CoincidenceMap { values: out, ..self.clone() })
    }
}

pub fn coincidence_map(amp: &JointAmplitude, normalization: Normalization) -> Result<CoincidenceMap> {
    let mut values = amp.values.mapv(|a| a.norm_sqr());
    if normalization == Normalization::PeakOne {
        let peak = values.iter().copied().fold(0.0, f64::max);
        if peak <= 0.0 {
            return Err(Error::Degenerate("joint amplitude is identically zero".into()));
        }
        values.mapv_inplace(|v| v / peak);
    }
    Ok(CoincidenceMap {
        x_grid_signal: amp.x_grid_signal,
        x_grid_idler: amp.x_grid_idler,
        values,
        normalization,
    })
}

/// Direction of a 1D cut through a coincidence map.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SliceAxis {
    /// `x_s = at`, profile over the idler grid.
    FixedSignal,
    /// `x_i = at`, profile over the signal grid.
    FixedIdler,
    /// `(x_s + x_i)/2 = at`, profile over the idler grid.
    Sum,
    /// `(x_s - x_i)/2 = at`, profile over the idler grid.
    Difference,
}

/// Nearest-sample cut through a coincidence map.
///
/// Sum and difference cuts keep the contiguous run of idler samples whose
/// partner signal coordinate falls inside the signal grid.
pub fn slice(map: &CoincidenceMap, axis: SliceAxis, at: f64) -> Result<SampledField> {
    let (gs, gi) = (&map.x_grid_signal, &map.x_grid_idler);
    let out_of_range = || Error::OutOfRange(format!("slice coordinate {at:e} m lies outside the map"));
    match axis {
        SliceAxis::FixedSignal => {
            let m = gs.nearest_index(at).ok_or_else(out_of_range)?;
            SampledField::from_real(*gi, &map.values.row(m).to_vec())
        }
        SliceAxis::FixedIdler => {
            let n = gi.nearest_index(at).ok_or_else(out_of_range)?;
            SampledField::from_real(*gs, &map.values.column(n).to_vec())
        }
        SliceAxis::Sum | SliceAxis::Difference => {
            let partner = |xi: f64| if axis == SliceAxis::Sum { 2.0 * at - xi } else { 2.0 * at + xi };
            let picks: Vec<(usize, usize)> = (0..gi.len())
                .filter_map(|n| gs.nearest_index(partner(gi.sample(n))).map(|m| (n, m)))
                .collect();
            if picks.len() < 2 {
                return Err(out_of_range());
            }
            let sub = gi.subgrid(picks[0].0, picks.len())?;
            let vals: Vec<f64> = picks.iter().map(|&(n, m)| map.values[[m, n]]).collect();
            SampledField::from_real(sub, &vals)
        }
    }
}
