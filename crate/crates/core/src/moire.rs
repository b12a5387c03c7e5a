use crate::error::{invalid, Error, Result};
use crate::field::SampledField;
use crate::grid::GridKind;
use num_complex::Complex64;
use rustfft::FftPlanner;

/// Fewest samples accepted for spectral analysis.
pub const MIN_SAMPLES: usize = 16;

/// Peak-to-median ratio below which a band has no beat.
pub const NOISE_FLOOR_RATIO: f64 = 3.0;

/// Bins weaker than this fraction of the strongest bin are FFT roundoff.
pub const ROUNDOFF_FLOOR: f64 = 1e-9;

/// One-sided amplitude spectrum of a real profile.
#[derive(Debug, Clone, PartialEq)]
pub struct FringeSpectrum {
    /// Cycles per metre, `k / extent` for `k = 0..=n/2`.
    pub frequencies: Vec<f64>,
    /// Amplitude of each component; a cosine of amplitude `a` on an exact bin reads `a`. Bin 0 is zeroed.
    pub magnitudes: Vec<f64>,
    /// Bin width `1 / extent`.
    pub resolution: f64,
}

/// Spectrum of the mean-subtracted real part of `profile`.
pub fn fringe_spectrum(profile: &SampledField) -> Result<FringeSpectrum> {
    let n = profile.len();
    if n < MIN_SAMPLES {
        return Err(Error::TooFewSamples { needed: MIN_SAMPLES, got: n });
    }
    if profile.grid().kind() != GridKind::Position {
        return Err(invalid("fringe spectrum needs a position profile"));
    }
    let re = profile.real_parts();
    let mean = re.iter().sum::<f64>() / n as f64;
    let mut buf: Vec<Complex64> = re.iter().map(|&v| Complex64::new(v - mean, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let resolution = 1.0 / profile.grid().extent();
    let half = n / 2;
    let frequencies = (0..=half).map(|k| k as f64 * resolution).collect();
    let magnitudes = (0..=half)
        .map(|k| {
            if k == 0 {
                0.0
            } else if 2 * k == n {
                buf[k].norm() / n as f64
            } else {
                2.0 * buf[k].norm() / n as f64
            }
        })
        .collect();
    Ok(FringeSpectrum { frequencies, magnitudes, resolution })
}

fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Strongest bin with `lo <= f < hi`, or `None` when it does not clear the
/// noise floor: 3x the median magnitude (DC excluded), and never less than
/// the roundoff level of the strongest bin.
pub fn beat_frequency(spectrum: &FringeSpectrum, band: (f64, f64)) -> Result<Option<f64>> {
    let (lo, hi) = band;
    let top = *spectrum.frequencies.last().unwrap_or(&0.0);
    if !(lo.is_finite() && hi.is_finite()) || lo < 0.0 || lo >= hi || lo > top {
        return Err(Error::InvalidBand(format!("({lo}, {hi}) is not inside [0, {top}] per metre")));
    }
    let eps = 1e-9 * spectrum.resolution;
    let peak = spectrum
        .frequencies
        .iter()
        .zip(&spectrum.magnitudes)
        .filter(|(&f, _)| f >= lo - eps && f < hi - eps)
        .max_by(|a, b| a.1.total_cmp(b.1));
    let strongest = spectrum.magnitudes.iter().copied().fold(0.0, f64::max);
    let floor = (NOISE_FLOOR_RATIO * median(&spectrum.magnitudes[1..])).max(ROUNDOFF_FLOOR * strongest);
    Ok(match peak {
        Some((&f, &m)) if m > 0.0 && m >= floor => Some(f),
        _ => None,
    })
}

/// Contrast `(max - min)/(max + min)` of the moving average of `profile` over
/// `window` metres, taken where the whole window fits inside the profile.
pub fn visibility(profile: &SampledField, window: f64) -> Result<f64> {
    let grid = profile.grid();
    if !(window.is_finite() && window > 0.0) {
        return Err(invalid(format!("visibility window must be positive, got {window}")));
    }
    if window > grid.extent() {
        return Err(Error::OutOfRange(format!(
            "visibility window {window:e} m exceeds the profile extent {:e} m",
            grid.extent()
        )));
    }
    let re = profile.real_parts();
    let w = ((window / grid.spacing()).round() as usize).clamp(1, re.len());
    let mut sum: f64 = re[..w].iter().sum();
    let mut lo = sum;
    let mut hi = sum;
    for i in w..re.len() {
        sum += re[i] - re[i - w];
        lo = lo.min(sum);
        hi = hi.max(sum);
    }
    if hi + lo <= 0.0 {
        return Ok(0.0);
    }
    Ok(((hi - lo) / (hi + lo)).clamp(0.0, 1.0))
}
