use crate::element::{OpticalElement, Wavenumber};
use crate::error::{invalid, Error, Result};
use crate::exec::{map_range, Execution};
use crate::grid::{GridKind, TransverseGrid};
use crate::propagate::{lens_phase, FresnelOperator, PropagationMethod};
use ndarray::Array2;
use num_complex::Complex64;
use rustfft::FftPlanner;

/// An element chain from the crystal plane to a detector, plus the grid it is
/// sampled on after the leading free-space legs.
#[derive(Debug, Clone, PartialEq)]
pub struct Arm {
    elements: Vec<OpticalElement>,
    work_grid: TransverseGrid,
}

impl Arm {
    pub fn new(elements: Vec<OpticalElement>, work_grid: TransverseGrid) -> Result<Self> {
        if work_grid.kind() != GridKind::Position {
            return Err(invalid("arm work grid must be a position grid"));
        }
        for e in &elements {
            if let OpticalElement::Mask(t) = e {
                t.grid().ensure_matches(&work_grid, "mask vs arm work grid")?;
            }
        }
        Ok(Self { elements, work_grid })
    }

    /// No optics: detectors sit in the crystal plane.
    pub fn empty(work_grid: TransverseGrid) -> Result<Self> {
        Self::new(Vec::new(), work_grid)
    }

    pub fn elements(&self) -> &[OpticalElement] {
        &self.elements
    }

    pub fn work_grid(&self) -> &TransverseGrid {
        &self.work_grid
    }

    /// Total length of the free-space legs before the first lens or mask.
    pub fn leading_distance(&self) -> f64 {
        self.elements
            .iter()
            .map_while(|e| match e {
                OpticalElement::FreeSpace { z } => Some(*z),
                _ => None,
            })
            .sum()
    }

    fn sampled_elements(&self) -> &[OpticalElement] {
        let lead = self
            .elements
            .iter()
            .take_while(|e| matches!(e, OpticalElement::FreeSpace { .. }))
            .count();
        &self.elements[lead..]
    }
}

/// How the transfer matrix is assembled. All routes give the same matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TransferRoute {
    /// Adjoint when the grids are commensurate and there are fewer detectors than q samples.
    #[default]
    Auto,
    /// One column per q sample: launch a plane wave and push it through.
    Forward,
    /// One row per detector: back-propagate a point source and Fourier-sum it.
    Adjoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct TransferOptions {
    pub propagation: PropagationMethod,
    pub route: TransferRoute,
    pub execution: Execution,
}

enum Stage {
    Propagate(FresnelOperator),
    Multiply(Vec<Complex64>),
}

impl Stage {
    fn apply(&self, v: &mut [Complex64]) {
        match self {
            Stage::Propagate(op) => op.apply(v),
            Stage::Multiply(t) => {
                for (a, b) in v.iter_mut().zip(t) {
                    *a *= b;
                }
            }
        }
    }
}

fn build_stages(arm: &Arm, k: Wavenumber, method: PropagationMethod) -> Result<Vec<Stage>> {
    let grid = *arm.work_grid();
    let mut stages = Vec::new();
    for e in arm.sampled_elements() {
        match e {
            OpticalElement::FreeSpace { z } if *z == 0.0 => {}
            OpticalElement::FreeSpace { z } => {
                stages.push(Stage::Propagate(FresnelOperator::new(grid, *z, k, method)?))
            }
            OpticalElement::ThinLens { f } => stages.push(Stage::Multiply(lens_phase(&grid, *f, k)?)),
            OpticalElement::Mask(t) => stages.push(Stage::Multiply(t.values().to_vec())),
        }
    }
    Ok(stages)
}

/// `H[m, j]`: amplitude at detector `x_m` for a unit plane wave `exp(i q_j x)`
/// leaving the crystal plane. Rows follow `x_grid`, columns follow `q_grid`.
pub fn arm_transfer_matrix(
    arm: &Arm,
    k: Wavenumber,
    q_grid: &TransverseGrid,
    x_grid: &TransverseGrid,
) -> Result<Array2<Complex64>> {
    if x_grid.kind() != GridKind::Position {
        return Err(invalid("detector grid must be a position grid"));
    }
    arm_transfer_matrix_at(arm, k, q_grid, &x_grid.samples(), TransferOptions::default())
}

/// Transfer matrix for an arbitrary list of detector positions.
pub fn arm_transfer_matrix_at(
    arm: &Arm,
    k: Wavenumber,
    q_grid: &TransverseGrid,
    xs: &[f64],
    opts: TransferOptions,
) -> Result<Array2<Complex64>> {
    if q_grid.kind() != GridKind::Frequency {
        return Err(invalid("q grid must be a frequency grid"));
    }
    let qs = q_grid.samples();
    let z_lead = arm.leading_distance();
    let lead_phase: Vec<Complex64> = qs
        .iter()
        .map(|&q| Complex64::from_polar(1.0, -q * q * z_lead / (2.0 * k.value())))
        .collect();

    if arm.sampled_elements().is_empty() {
        let mut h = Array2::zeros((xs.len(), qs.len()));
        for (m, &x) in xs.iter().enumerate() {
            for (j, &q) in qs.iter().enumerate() {
                h[[m, j]] = Complex64::from_polar(1.0, q * x) * lead_phase[j];
            }
        }
        return Ok(h);
    }

    let work = *arm.work_grid();
    let det: Vec<usize> = xs
        .iter()
        .map(|&x| {
            work.index_of(x, 1e-6).ok_or_else(|| {
                Error::GridMismatch(format!("detector position {x:e} m is not a sample of the arm work grid"))
            })
        })
        .collect::<Result<_>>()?;
    let stages = build_stages(arm, k, opts.propagation)?;

    let fold = fold_length(q_grid, &work);
    let route = match opts.route {
        TransferRoute::Auto if fold.is_some() && xs.len() < qs.len() => TransferRoute::Adjoint,
        TransferRoute::Auto => TransferRoute::Forward,
        r => r,
    };

    match route {
        TransferRoute::Adjoint => {
            let m_len = fold.ok_or_else(|| {
                Error::GridMismatch(format!(
                    "adjoint route needs 2*pi/(dq*dx) to be an integer (dq = {}, dx = {})",
                    q_grid.spacing(),
                    work.spacing()
                ))
            })?;
            adjoint_rows(&stages, &work, q_grid, &det, &lead_phase, m_len, opts.execution)
        }
        _ => forward_columns(&stages, &work, &qs, &det, &lead_phase, opts.execution),
    }
}

/// `M = 2 pi / (dq dx)` when it is an integer.
fn fold_length(q_grid: &TransverseGrid, work: &TransverseGrid) -> Option<usize> {
    let m = 2.0 * std::f64::consts::PI / (q_grid.spacing() * work.spacing());
    let r = m.round();
    if r >= 1.0 && (m - r).abs() <= 1e-6 * r {
        Some(r as usize)
    } else {
        None
    }
}

fn forward_columns(
    stages: &[Stage],
    work: &TransverseGrid,
    qs: &[f64],
    det: &[usize],
    lead_phase: &[Complex64],
    exec: Execution,
) -> Result<Array2<Complex64>> {
    let xw = work.samples();
    let cols = map_range(exec, qs.len(), |j| {
        let q = qs[j];
        let mut v: Vec<Complex64> = xw.iter().map(|&x| Complex64::from_polar(1.0, q * x) * lead_phase[j]).collect();
        for s in stages {
            s.apply(&mut v);
        }
        det.iter().map(|&i| v[i]).collect::<Vec<_>>()
    });
    let mut h = Array2::zeros((det.len(), qs.len()));
    for (j, col) in cols.into_iter().enumerate() {
        for (m, v) in col.into_iter().enumerate() {
            h[[m, j]] = v;
        }
    }
    Ok(h)
}

/// Each row is the back-propagated point source `g(x_n)` summed against the
/// plane waves: `H[m, j] = sum_n g(x_n) exp(i q_j x_n)`. Because `dq dx = 2 pi / M`
/// the sum folds to length `M` and becomes one inverse FFT.
fn adjoint_rows(
    stages: &[Stage],
    work: &TransverseGrid,
    q_grid: &TransverseGrid,
    det: &[usize],
    lead_phase: &[Complex64],
    m_len: usize,
    exec: Execution,
) -> Result<Array2<Complex64>> {
    let nw = work.len();
    let nq = q_grid.len();
    let half_w = (nw / 2) as i64;
    let half_q = (nq / 2) as i64;
    let cq = q_grid.center();
    let cx = work.center();
    let dx = work.spacing();
    let ifft = FftPlanner::new().plan_fft_inverse(m_len);
    let qs = q_grid.samples();
    let center_phase: Vec<Complex64> = qs
        .iter()
        .zip(lead_phase)
        .map(|(&q, &l)| Complex64::from_polar(1.0, q * cx) * l)
        .collect();
    let shift: Vec<Complex64> = (0..nw)
        .map(|n| Complex64::from_polar(1.0, cq * (n as i64 - half_w) as f64 * dx))
        .collect();
    let rows = map_range(exec, det.len(), |m| {
        let mut v = vec![Complex64::new(0.0, 0.0); nw];
        v[det[m]] = Complex64::new(1.0, 0.0);
        for s in stages.iter().rev() {
            s.apply(&mut v);
        }
        let mut folded = vec![Complex64::new(0.0, 0.0); m_len];
        for (n, g) in v.iter().enumerate() {
            let s = (n as i64 - half_w).rem_euclid(m_len as i64) as usize;
            folded[s] += g * shift[n];
        }
        ifft.process(&mut folded);
        (0..nq)
            .map(|j| {
                let jj = (j as i64 - half_q).rem_euclid(m_len as i64) as usize;
                folded[jj] * center_phase[j]
            })
            .collect::<Vec<_>>()
    });
    let mut h = Array2::zeros((det.len(), nq));
    for (m, row) in rows.into_iter().enumerate() {
        for (j, v) in row.into_iter().enumerate() {
            h[[m, j]] = v;
        }
    }
    Ok(h)
}
