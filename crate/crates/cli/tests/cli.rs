use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn qmoire(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qmoire")).args(args).output().expect("binary runs")
}

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name)
}

/// Copies a shipped scenario into `dir` with `output_dir = out` and the given keys overridden.
fn staged(dir: &Path, name: &str, out: &str, overrides: &[(&str, &str)]) -> PathBuf {
    let mut keys: Vec<(&str, String)> = overrides.iter().map(|(k, v)| (*k, v.to_string())).collect();
    keys.push(("output_dir", out.to_string()));
    let mut text: String = std::fs::read_to_string(scenario(name))
        .unwrap()
        .lines()
        .filter(|l| !keys.iter().any(|(k, _)| l.split('=').next().map(str::trim) == Some(*k)))
        .map(|l| format!("{l}\n"))
        .collect();
    for (k, v) in &keys {
        text.push_str(&format!("{k} = {v}\n"));
    }
    let path = dir.join(format!("{out}.cfg"));
    std::fs::write(&path, text).unwrap();
    path
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn field<'a>(report: &'a str, key: &str) -> &'a str {
    report
        .lines()
        .find_map(|l| l.strip_prefix(&format!("{key}: ")))
        .unwrap_or_else(|| panic!("no {key} in\n{report}"))
}

#[test]
fn missing_setup_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "focal_length_mm = 550\n").unwrap();
    let out = qmoire(&["simulate", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("setup"));
}

#[test]
fn unknown_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = staged(dir.path(), "s1_pump_idler.cfg", "typo", &[("grating1_contrst", "1")]);
    let out = qmoire(&["simulate", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("grating1_contrst"));
}

#[test]
fn undersampled_grid_exits_with_sampling_code() {
    let dir = tempfile::tempdir().unwrap();
    let text = "setup = idler-signal\nfocal_length_mm = 20\nwork_points = 4096\nwork_spacing_um = 5\nscan_points = 32\nscan_pitch_um = 20\noutput_dir = out\n";
    let cfg = dir.path().join("coarse.cfg");
    std::fs::write(&cfg, text).unwrap();
    let out = qmoire(&["simulate", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(!dir.path().join("out/report.txt").exists());
}

#[test]
fn pump_idler_scenario_reports_unit_beat() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = staged(dir.path(), "s1_pump_idler.cfg", "s1", &[]);
    let out = qmoire(&["simulate", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let report = stdout(&out);
    assert_eq!(field(&report, "STATUS"), "PASS");
    let beat: f64 = field(&report, "BEAT_PER_MM").parse().unwrap();
    assert!((beat - 1.0).abs() <= 0.25, "{beat}");
    for f in ["numeric.csv", "closed_form.csv", "spectrum.csv", "report.txt"] {
        assert!(dir.path().join("s1").join(f).is_file(), "{f}");
    }
    assert_eq!(std::fs::read_to_string(dir.path().join("s1/report.txt")).unwrap(), report);
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let a = staged(dir.path(), "s1_pump_idler.cfg", "a", &[]);
    let b = staged(dir.path(), "s1_pump_idler.cfg", "b", &[]);
    assert!(qmoire(&["simulate", a.to_str().unwrap()]).status.success());
    assert!(qmoire(&["--threads", "1", "simulate", b.to_str().unwrap()]).status.success());
    for f in ["numeric.csv", "closed_form.csv", "spectrum.csv", "report.txt"] {
        let x = std::fs::read(dir.path().join("a").join(f)).unwrap();
        let y = std::fs::read(dir.path().join("b").join(f)).unwrap();
        assert_eq!(x, y, "{f} differs");
    }
}

#[test]
fn analyze_reproduces_simulate() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = staged(dir.path(), "s1_pump_idler.cfg", "s1", &[("visibility_window_um", "400")]);
    let sim = stdout(&qmoire(&["simulate", cfg.to_str().unwrap()]));
    let csv = dir.path().join("s1/numeric.csv");
    let out = qmoire(&["analyze", csv.to_str().unwrap(), "--band", "0,2.5", "--window-um", "400"]);
    assert!(out.status.success());
    let ana = stdout(&out);
    for key in ["BAND_PER_MM", "BEAT_PER_MM", "DOMINANT_PER_MM", "VISIBILITY", "VISIBILITY_WINDOW_M"] {
        assert_eq!(field(&ana, key), field(&sim, key), "{key}");
    }
}

#[test]
fn compare_accepts_identity_and_rejects_distortion() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = staged(dir.path(), "s1_pump_idler.cfg", "s1", &[("normalization", "raw")]);
    assert!(qmoire(&["simulate", cfg.to_str().unwrap()]).status.success());
    let num = dir.path().join("s1/numeric.csv");
    let closed = dir.path().join("s1/closed_form.csv");

    let same = qmoire(&["compare", num.to_str().unwrap(), num.to_str().unwrap()]);
    assert_eq!(same.status.code(), Some(0));
    assert_eq!(field(&stdout(&same), "MAX_DEVIATION"), "0.000000");

    // peak normalisation removes an overall scale
    let text = std::fs::read_to_string(&num).unwrap();
    let doubled: String = text
        .lines()
        .map(|l| match l.split_once(',') {
            Some((x, v)) if !l.starts_with('#') && !l.starts_with('x') => {
                format!("{x},{:.8e}\n", 2.0 * v.parse::<f64>().unwrap())
            }
            _ => format!("{l}\n"),
        })
        .collect();
    let scaled = dir.path().join("scaled.csv");
    std::fs::write(&scaled, doubled).unwrap();
    let out = qmoire(&["compare", num.to_str().unwrap(), scaled.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));

    assert_eq!(qmoire(&["compare", num.to_str().unwrap(), closed.to_str().unwrap()]).status.code(), Some(0));
    let strict = qmoire(&["compare", num.to_str().unwrap(), closed.to_str().unwrap(), "--tol", "1e-6"]);
    assert_eq!(strict.status.code(), Some(4));
    assert_eq!(field(&stdout(&strict), "STATUS"), "FAIL");
}

#[test]
fn compare_rejects_mismatched_grids() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    std::fs::write(&a, "x_m,value\n0,1\n1e-5,1\n").unwrap();
    std::fs::write(&b, "x_m,value\n0,1\n2e-5,1\n").unwrap();
    assert_eq!(qmoire(&["compare", a.to_str().unwrap(), b.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn open_aperture_passes_without_correlation() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = staged(dir.path(), "open_aperture.cfg", "open", &[]);
    let out = qmoire(&["simulate", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let report = stdout(&out);
    assert_eq!(field(&report, "CORRELATION"), "n/a");
    assert_eq!(field(&report, "STATUS"), "PASS");
}

#[test]
fn oracle_engine_agrees_with_fast_engine() {
    let dir = tempfile::tempdir().unwrap();
    let scan = [("scan_points", "32"), ("scan_pitch_um", "62.5")];
    let fast = staged(dir.path(), "s1_pump_idler.cfg", "fast", &scan);
    let slow = staged(dir.path(), "s1_pump_idler.cfg", "slow", &scan);
    assert!(qmoire(&["simulate", fast.to_str().unwrap()]).status.success());
    let out = qmoire(&["--oracle", "simulate", slow.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let a = dir.path().join("fast/numeric.csv");
    let b = dir.path().join("slow/numeric.csv");
    let cmp = qmoire(&["compare", a.to_str().unwrap(), b.to_str().unwrap(), "--tol", "1e-6"]);
    assert_eq!(cmp.status.code(), Some(0), "{}", stdout(&cmp));
}
