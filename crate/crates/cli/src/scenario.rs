//! Scenario configuration, execution and reporting.

use crate::config::Config;
use crate::csvio::{self, Profile, PROFILE_HEADER, SPECTRUM_HEADER};
use crate::error::{invalid, CliError, Result};
use qmoire::setup::{
    profile_agreement, Experiment, Grating, IdlerSignalSetup, NumericGrids, PumpBeam, PumpIdlerSetup,
};
use qmoire::{
    beat_frequency, fringe_spectrum, visibility, Contraction, EngineOptions, Execution, GridKind, IdlerSignalGeometry,
    PropagationMethod, PumpIdlerGeometry, SampledField, SpectralWindow, TransferRoute, TransverseGrid, Wavenumber,
};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Detector {
    Signal,
    Idler,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanSpec {
    /// Detector that moves.
    pub axis: Detector,
    /// Position of the other detector.
    pub fixed: f64,
    pub points: usize,
    pub pitch: f64,
    pub center: f64,
}

impl ScanSpec {
    pub fn positions(&self) -> Vec<f64> {
        qmoire::setup::detector_positions(self.points, self.pitch, self.center)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Layout {
    PumpIdler(PumpIdlerSetup),
    IdlerSignal(IdlerSignalSetup),
}

impl Layout {
    pub fn name(&self) -> &'static str {
        match self {
            Layout::PumpIdler(_) => "pump-idler",
            Layout::IdlerSignal(_) => "idler-signal",
        }
    }

    fn experiment(&self) -> &dyn Experiment {
        match self {
            Layout::PumpIdler(s) => s,
            Layout::IdlerSignal(s) => s,
        }
    }

    /// Fringe frequencies each grating imprints on a scan along `axis`, in cycles per metre.
    fn carriers(&self, axis: Detector) -> Vec<f64> {
        let freq = |g: &Grating| g.period().map(|p| 1.0 / p);
        match (self, axis) {
            (Layout::PumpIdler(s), Detector::Idler) => {
                let m = s.geometry.magnification();
                [freq(&s.a1).map(|f| f / (2.0 * m)), freq(&s.a2)].into_iter().flatten().collect()
            }
            (Layout::PumpIdler(s), Detector::Signal) => {
                freq(&s.a1).map(|f| f / (2.0 * s.geometry.magnification())).into_iter().collect()
            }
            (Layout::IdlerSignal(s), Detector::Signal) => [freq(&s.a1), freq(&s.a2)].into_iter().flatten().collect(),
            (Layout::IdlerSignal(_), Detector::Idler) => Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub layout: Layout,
    pub scan: ScanSpec,
    pub peak_normalize: bool,
    /// Beat search band in cycles per metre.
    pub band: Option<(f64, f64)>,
    pub visibility_window: Option<f64>,
    pub tolerance: f64,
    pub min_correlation: f64,
    pub output_dir: PathBuf,
}

fn grating(cfg: &Config, prefix: &str) -> Result<Grating> {
    let kind = cfg.text(prefix).unwrap_or_else(|| "open".into());
    let mut g = match kind.as_str() {
        "open" => Grating::open(),
        "sinusoidal" => {
            let nu = cfg
                .frequency(&format!("{prefix}_frequency"))?
                .or(cfg.length(&format!("{prefix}_period"))?.map(|p| 1.0 / p))
                .ok_or_else(|| invalid(format!("missing required key `{prefix}_frequency_per_mm` (or `{prefix}_period_um`)")))?;
            Grating::sinusoidal(nu, cfg.number(&format!("{prefix}_contrast"))?.unwrap_or(1.0))
        }
        "ronchi" => Grating::ronchi(
            cfg.require_length(&format!("{prefix}_period"))?,
            cfg.number(&format!("{prefix}_duty"))?.unwrap_or(0.5),
            cfg.length(&format!("{prefix}_offset"))?.unwrap_or(0.0),
        ),
        other => return Err(invalid(format!("`{prefix}` must be open, sinusoidal or ronchi, got `{other}`"))),
    };
    if let Some(w) = cfg.length(&format!("{prefix}_aperture"))? {
        if w <= 0.0 {
            return Err(invalid(format!("`{prefix}_aperture` must be positive")));
        }
        g = g.with_aperture(0.5 * w);
    }
    Ok(g)
}

fn positive(v: f64, key: &str) -> Result<f64> {
    if v > 0.0 {
        Ok(v)
    } else {
        Err(invalid(format!("`{key}` must be positive, got {v}")))
    }
}

impl Scenario {
    /// Parses and validates a configuration; relative output paths resolve against `base_dir`.
    pub fn from_config(text: &str, base_dir: &Path) -> Result<Self> {
        let cfg = Config::parse(text)?;
        let setup = cfg.require_text("setup")?;
        let k_pump = Wavenumber::from_wavelength(cfg.length("pump_wavelength")?.unwrap_or(351e-9))?;
        let pump = match cfg.text("pump").as_deref().unwrap_or("plane-wave") {
            "plane-wave" => PumpBeam::PlaneWave,
            "gaussian" => PumpBeam::Gaussian { waist: positive(cfg.require_length("pump_waist")?, "pump_waist")? },
            other => return Err(invalid(format!("`pump` must be plane-wave or gaussian, got `{other}`"))),
        };
        let window = match cfg.text("q_window").as_deref().unwrap_or("tapered") {
            "tapered" => SpectralWindow::Tapered { flat_fraction: cfg.number("q_flat_fraction")?.unwrap_or(0.5) },
            "hard" => SpectralWindow::Hard,
            other => return Err(invalid(format!("`q_window` must be tapered or hard, got `{other}`"))),
        };
        let grids = NumericGrids {
            q_points: cfg.count("q_points")?.unwrap_or(256),
            q_period: positive(cfg.length("q_period")?.unwrap_or(16e-3), "q_period")?,
            window,
            work_points: cfg.count("work_points")?.unwrap_or(2048),
            work_spacing: positive(cfg.length("work_spacing")?.unwrap_or(7.8125e-6), "work_spacing")?,
        };
        let f = positive(cfg.require_length("focal_length")?, "focal_length")?;
        let a1 = grating(&cfg, "grating1")?;
        let a2 = grating(&cfg, "grating2")?;
        let (layout, default_axis) = match setup.as_str() {
            "pump-idler" => {
                let geometry = PumpIdlerGeometry::new(cfg.require_length("z0")?, cfg.require_length("z1")?, f)?;
                if let Some(z2) = cfg.length("z2")? {
                    if (1.0 / f - 1.0 / geometry.object_distance() - 1.0 / z2).abs() > 1e-9 / f {
                        return Err(invalid(format!(
                            "`z2` = {z2} m violates the thin-lens law; expected {} m",
                            geometry.z2()
                        )));
                    }
                }
                (Layout::PumpIdler(PumpIdlerSetup { k_pump, pump, geometry, a1, a2, grids }), Detector::Idler)
            }
            "idler-signal" => {
                let geometry = IdlerSignalGeometry::new(f)?;
                (Layout::IdlerSignal(IdlerSignalSetup { k_pump, pump, geometry, a1, a2, grids }), Detector::Signal)
            }
            other => return Err(invalid(format!("`setup` must be pump-idler or idler-signal, got `{other}`"))),
        };
        let axis = match cfg.text("scan_axis").as_deref() {
            None => default_axis,
            Some("signal") => Detector::Signal,
            Some("idler") => Detector::Idler,
            Some(other) => return Err(invalid(format!("`scan_axis` must be signal or idler, got `{other}`"))),
        };
        let points = cfg.count("scan_points")?.unwrap_or(128);
        if points < 16 {
            return Err(invalid("`scan_points` must be at least 16"));
        }
        let scan = ScanSpec {
            axis,
            fixed: cfg.length("scan_fixed")?.unwrap_or(0.0),
            points,
            pitch: positive(cfg.length("scan_pitch")?.unwrap_or(31.25e-6), "scan_pitch")?,
            center: cfg.length("scan_center")?.unwrap_or(0.0),
        };
        let peak_normalize = match cfg.text("normalization").as_deref().unwrap_or("peak") {
            "peak" => true,
            "raw" => false,
            other => return Err(invalid(format!("`normalization` must be peak or raw, got `{other}`"))),
        };
        let band = cfg.frequency_pair("beat_band")?;
        let visibility_window = cfg.length("visibility_window")?;
        let tolerance = cfg.number("tolerance")?.unwrap_or(0.05);
        let min_correlation = cfg.number("min_correlation")?.unwrap_or(0.99);
        let output_dir = base_dir.join(cfg.text("output_dir").unwrap_or_else(|| "out".into()));
        cfg.reject_unused()?;
        Ok(Self { layout, scan, peak_normalize, band, visibility_window, tolerance, min_correlation, output_dir })
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))?;
        Self::from_config(&text, path.parent().unwrap_or(Path::new(".")))
    }
}

/// Engine settings chosen on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RunOptions {
    /// Direct quadrature, per-column transfer matrices and the literal double sum.
    pub oracle: bool,
    pub execution: Execution,
}

impl RunOptions {
    pub fn engine(&self) -> EngineOptions {
        let mut opts = EngineOptions::default().with_execution(self.execution);
        if self.oracle {
            opts.transfer.propagation = PropagationMethod::Quadrature;
            opts.transfer.route = TransferRoute::Forward;
            opts.contraction = Contraction::Direct;
        }
        opts
    }
}

/// Outcome of a beat and visibility analysis.
#[derive(Debug, Clone, PartialEq)]
pub struct Analysis {
    pub resolution: f64,
    pub band: (f64, f64),
    pub beat: Option<f64>,
    pub dominant: Option<f64>,
    pub window: f64,
    pub visibility: f64,
    pub spectrum: qmoire::FringeSpectrum,
}

fn uniform_grid(xs: &[f64]) -> Result<TransverseGrid> {
    let n = xs.len();
    let dx = (xs[n - 1] - xs[0]) / (n - 1) as f64;
    if dx.is_nan() || dx <= 0.0 {
        return Err(invalid("profile x values must increase"));
    }
    for (i, x) in xs.iter().enumerate() {
        if (x - (xs[0] + i as f64 * dx)).abs() > 1e-6 * dx {
            return Err(invalid(format!("profile is not uniformly sampled near x = {x:e} m")));
        }
    }
    Ok(TransverseGrid::new(n, xs[0] + (n / 2) as f64 * dx, dx, GridKind::Position)?)
}

/// Beat frequency inside `band` and visibility over `window` (default: one period at the band's upper edge).
pub fn analyze(profile: &Profile, band: Option<(f64, f64)>, window: Option<f64>) -> Result<Analysis> {
    let grid = uniform_grid(&profile.xs)?;
    let field = SampledField::from_real(grid, &profile.values)?;
    let spectrum = fringe_spectrum(&field)?;
    let nyquist = *spectrum.frequencies.last().unwrap();
    let band = band.unwrap_or((0.0, nyquist + spectrum.resolution));
    let beat = beat_frequency(&spectrum, band)?;
    let dominant = beat_frequency(&spectrum, (0.0, nyquist + spectrum.resolution))?;
    let window = window.unwrap_or_else(|| (1.0 / band.1).min(grid.extent()));
    let visibility = visibility(&field, window)?;
    Ok(Analysis { resolution: spectrum.resolution, band, beat, dominant, window, visibility, spectrum })
}

fn opt_per_mm(v: Option<f64>) -> String {
    v.map_or("none".into(), |f| format!("{:.6}", f * 1e-3))
}

pub fn analysis_lines(a: &Analysis) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "BAND_PER_MM: {:.6},{:.6}", a.band.0 * 1e-3, a.band.1 * 1e-3);
    let _ = writeln!(s, "RESOLUTION_PER_MM: {:.6}", a.resolution * 1e-3);
    let _ = writeln!(s, "BEAT_PER_MM: {}", opt_per_mm(a.beat));
    let _ = writeln!(s, "DOMINANT_PER_MM: {}", opt_per_mm(a.dominant));
    let _ = writeln!(s, "VISIBILITY_WINDOW_M: {}", csvio::format_value(a.window));
    let _ = writeln!(s, "VISIBILITY: {:.6}", a.visibility);
    s
}

/// Everything `simulate` produces.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub text: String,
    pub pass: bool,
    pub numeric_csv: String,
    pub closed_form_csv: String,
    pub spectrum_csv: String,
}

fn normalise(values: &[f64], peak: bool) -> Vec<f64> {
    let max = values.iter().copied().fold(0.0, f64::max);
    if peak && max > 0.0 {
        values.iter().map(|v| v / max).collect()
    } else {
        values.to_vec()
    }
}

/// Runs the numeric engine and the closed form along the scan and analyses the result.
pub fn evaluate(scenario: &Scenario, opts: RunOptions) -> Result<Report> {
    let exp = scenario.layout.experiment();
    let scan = scenario.scan.positions();
    let fixed = [scenario.scan.fixed];
    let (xs, xi): (&[f64], &[f64]) = match scenario.scan.axis {
        Detector::Idler => (&fixed, &scan),
        Detector::Signal => (&scan, &fixed),
    };
    let numeric = exp.numeric_coincidences(xs, xi, opts.engine())?;
    let closed = exp.closed_form(xs, xi)?;
    let numeric: Vec<f64> = numeric.iter().copied().collect();
    let closed: Vec<f64> = closed.iter().copied().collect();
    if numeric.iter().all(|&v| v == 0.0) {
        return Err(qmoire::Error::Degenerate("numeric coincidence profile is identically zero".into()).into());
    }

    let axis = match scenario.scan.axis {
        Detector::Signal => "signal",
        Detector::Idler => "idler",
    };
    let meta = |kind: &str| {
        vec![
            ("generator", format!("qmoire {}", env!("CARGO_PKG_VERSION"))),
            ("setup", scenario.layout.name().to_string()),
            ("profile", kind.to_string()),
            ("scan_axis", axis.to_string()),
            ("fixed_m", csvio::format_value(scenario.scan.fixed)),
            ("normalization", if scenario.peak_normalize { "peak" } else { "raw" }.to_string()),
        ]
    };
    let numeric_csv = csvio::render(PROFILE_HEADER, &meta("numeric"), &scan, &normalise(&numeric, scenario.peak_normalize));
    let closed_form_csv =
        csvio::render(PROFILE_HEADER, &meta("closed-form"), &scan, &normalise(&closed, scenario.peak_normalize));

    // analyse exactly what was written so re-analysis of the file reproduces it
    let written = csvio::parse(&numeric_csv, "numeric profile")?;
    let carriers = scenario.layout.carriers(scenario.scan.axis);
    let band = scenario.band.or_else(|| carriers.iter().copied().reduce(f64::min).map(|lo| (0.0, lo)));
    let analysis = analyze(&written, band, scenario.visibility_window)?;
    let spectrum_csv = csvio::render(
        SPECTRUM_HEADER,
        &meta("numeric spectrum"),
        &analysis.spectrum.frequencies,
        &analysis.spectrum.magnitudes,
    );

    let (deviation, correlation) = profile_agreement(&numeric, &closed);
    // a flat reference has no shape to correlate with; the deviation alone decides then
    let pass = deviation <= scenario.tolerance && correlation.map_or(true, |c| c >= scenario.min_correlation);
    let expected_beat = (carriers.len() == 2).then(|| (carriers[0] - carriers[1]).abs());

    let mut text = String::new();
    let _ = writeln!(text, "SETUP: {}", scenario.layout.name());
    let _ = writeln!(text, "SCAN_AXIS: {axis}");
    let _ = writeln!(text, "FIXED_M: {}", csvio::format_value(scenario.scan.fixed));
    let _ = writeln!(text, "POINTS: {}", scan.len());
    let _ = writeln!(text, "ENGINE: {}", if opts.oracle { "oracle" } else { "fast" });
    let _ = writeln!(text, "MAX_DEVIATION: {deviation:.6}");
    let _ = writeln!(text, "CORRELATION: {}", correlation.map_or("n/a".into(), |c| format!("{c:.6}")));
    text.push_str(&analysis_lines(&analysis));
    let _ = writeln!(text, "EXPECTED_BEAT_PER_MM: {}", opt_per_mm(expected_beat));
    let _ = writeln!(text, "TOLERANCE: {}", scenario.tolerance);
    let _ = writeln!(text, "MIN_CORRELATION: {}", scenario.min_correlation);
    let _ = writeln!(text, "STATUS: {}", if pass { "PASS" } else { "FAIL" });
    Ok(Report { text, pass, numeric_csv, closed_form_csv, spectrum_csv })
}

/// Evaluates a scenario and writes its profiles, spectrum and report into the output directory.
pub fn run_scenario(scenario: &Scenario, opts: RunOptions) -> Result<Report> {
    let report = evaluate(scenario, opts)?;
    let dir = &scenario.output_dir;
    std::fs::create_dir_all(dir).map_err(|e| CliError::Internal(format!("cannot create {}: {e}", dir.display())))?;
    csvio::write(&dir.join("numeric.csv"), &report.numeric_csv)?;
    csvio::write(&dir.join("closed_form.csv"), &report.closed_form_csv)?;
    csvio::write(&dir.join("spectrum.csv"), &report.spectrum_csv)?;
    csvio::write(&dir.join("report.txt"), &report.text)?;
    Ok(report)
}

/// Peak-normalised comparison of two profiles on the same grid.
pub fn compare_profiles(a: &Profile, b: &Profile, tolerance: f64) -> Result<(String, bool)> {
    if a.xs.len() != b.xs.len() {
        return Err(invalid(format!("profiles have {} and {} samples", a.xs.len(), b.xs.len())));
    }
    let span = a.xs.iter().map(|x| x.abs()).fold(0.0, f64::max).max(1e-300);
    if a.xs.iter().zip(&b.xs).any(|(x, y)| (x - y).abs() > 1e-8 * span) {
        return Err(invalid("profiles are sampled on different grids"));
    }
    let (deviation, correlation) = profile_agreement(&a.values, &b.values);
    let pass = deviation <= tolerance;
    let mut text = String::new();
    let _ = writeln!(text, "POINTS: {}", a.xs.len());
    let _ = writeln!(text, "MAX_DEVIATION: {deviation:.6}");
    let _ = writeln!(text, "CORRELATION: {}", correlation.map_or("n/a".into(), |c| format!("{c:.6}")));
    let _ = writeln!(text, "TOLERANCE: {tolerance}");
    let _ = writeln!(text, "STATUS: {}", if pass { "PASS" } else { "FAIL" });
    Ok((text, pass))
}
