use crate::error::{invalid, Error, Result};
use std::f64::consts::PI;

/// What a grid's samples measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridKind {
    /// Transverse position in metres.
    Position,
    /// Transverse wavenumber in rad/m.
    Frequency,
}

/// Uniform 1D sampling, `sample(i) = center + (i - n/2) * spacing`.
///
/// With even `n` the grid holds `center` exactly at index `n/2` and is one
/// sample short on the positive side, matching FFT ordering after a shift.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransverseGrid {
    n: usize,
    center: f64,
    spacing: f64,
    kind: GridKind,
}

impl TransverseGrid {
    pub fn new(n: usize, center: f64, spacing: f64, kind: GridKind) -> Result<Self> {
        if n < 2 {
            return Err(invalid(format!("grid needs at least 2 points, got {n}")));
        }
        if !(spacing.is_finite() && spacing > 0.0) {
            return Err(invalid(format!("grid spacing must be positive, got {spacing}")));
        }
        if !center.is_finite() {
            return Err(invalid("grid center must be finite"));
        }
        Ok(Self { n, center, spacing, kind })
    }

    /// Position grid of `n` points covering `extent` metres.
    pub fn position(n: usize, extent: f64, center: f64) -> Result<Self> {
        if !(extent.is_finite() && extent > 0.0) {
            return Err(invalid(format!("grid extent must be positive, got {extent}")));
        }
        if n < 2 {
            return Err(invalid(format!("grid needs at least 2 points, got {n}")));
        }
        Self::new(n, center, extent / n as f64, GridKind::Position)
    }

    /// Frequency grid centred on zero.
    pub fn frequency(n: usize, spacing: f64) -> Result<Self> {
        Self::new(n, 0.0, spacing, GridKind::Frequency)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn kind(&self) -> GridKind {
        self.kind
    }

    pub fn extent(&self) -> f64 {
        self.n as f64 * self.spacing
    }

    /// Index of the sample equal to `center`.
    pub fn center_index(&self) -> usize {
        self.n / 2
    }

    pub fn sample(&self, i: usize) -> f64 {
        self.center + (i as f64 - (self.n / 2) as f64) * self.spacing
    }

    pub fn samples(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.sample(i)).collect()
    }

    pub fn first(&self) -> f64 {
        self.sample(0)
    }

    pub fn last(&self) -> f64 {
        self.sample(self.n - 1)
    }

    /// Half the window width, the largest offset a Fresnel kernel sees.
    pub fn half_width(&self) -> f64 {
        0.5 * self.extent()
    }

    /// Grid of the same kind holding only samples `start..start + n`.
    pub fn subgrid(&self, start: usize, n: usize) -> Result<Self> {
        if start + n > self.n {
            return Err(Error::OutOfRange(format!(
                "subgrid {start}..{} exceeds {} samples",
                start + n,
                self.n
            )));
        }
        let first = self.sample(start);
        Self::new(n, first + (n / 2) as f64 * self.spacing, self.spacing, self.kind)
    }

    /// Reciprocal grid with spacing `2*pi / (n * dx)`, centred on zero.
    pub fn conjugate(&self) -> Self {
        let kind = match self.kind {
            GridKind::Position => GridKind::Frequency,
            GridKind::Frequency => GridKind::Position,
        };
        Self {
            n: self.n,
            center: 0.0,
            spacing: 2.0 * PI / (self.n as f64 * self.spacing),
            kind,
        }
    }

    /// Fractional index of coordinate `x`.
    pub fn fractional_index(&self, x: f64) -> f64 {
        (x - self.center) / self.spacing + (self.n / 2) as f64
    }

    /// Index of the sample within `tol * spacing` of `x`, if any.
    pub fn index_of(&self, x: f64, tol: f64) -> Option<usize> {
        let f = self.fractional_index(x);
        let r = f.round();
        if (f - r).abs() <= tol && r >= 0.0 && r < self.n as f64 {
            Some(r as usize)
        } else {
            None
        }
    }

    /// Nearest sample index, or `None` when `x` lies outside the sampled span.
    pub fn nearest_index(&self, x: f64) -> Option<usize> {
        let r = self.fractional_index(x).round();
        if r >= 0.0 && r < self.n as f64 {
            Some(r as usize)
        } else {
            None
        }
    }

    /// Same point count, spacing, centre and kind, up to relative `tol`.
    pub fn matches(&self, other: &Self, tol: f64) -> bool {
        self.n == other.n
            && self.kind == other.kind
            && rel_close(self.spacing, other.spacing, tol)
            && (self.center - other.center).abs() <= tol * self.spacing
    }

    pub(crate) fn ensure_matches(&self, other: &Self, what: &str) -> Result<()> {
        if self.matches(other, 1e-9) {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!("{what}: {self:?} vs {other:?}")))
        }
    }
}

pub(crate) fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs())
}

/// Position grid of `n` points spanning `extent`, centred on `center`.
pub fn make_position_grid(n: usize, extent: f64, center: f64) -> Result<TransverseGrid> {
    TransverseGrid::position(n, extent, center)
}
