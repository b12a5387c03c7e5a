//! Two-column profile CSV files with `#` metadata comments.

use crate::error::{invalid, CliError, Result};
use std::fmt::Write as _;
use std::path::Path;

pub const PROFILE_HEADER: &str = "x_m,value";
pub const SPECTRUM_HEADER: &str = "freq_per_m,magnitude";

/// Nine significant digits, fixed exponent form.
pub fn format_value(v: f64) -> String {
    format!("{v:.8e}")
}

pub fn render(header: &str, metadata: &[(&str, String)], xs: &[f64], values: &[f64]) -> String {
    let mut out = String::new();
    for (k, v) in metadata {
        let _ = writeln!(out, "# {k}: {v}");
    }
    let _ = writeln!(out, "{header}");
    for (x, v) in xs.iter().zip(values) {
        let _ = writeln!(out, "{},{}", format_value(*x), format_value(*v));
    }
    out
}

pub fn write(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| CliError::Internal(format!("cannot write {}: {e}", path.display())))
}

/// A profile read back from disk.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    pub xs: Vec<f64>,
    pub values: Vec<f64>,
}

pub fn parse(text: &str, origin: &str) -> Result<Profile> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
    match lines.next() {
        Some(h) if h == PROFILE_HEADER => {}
        other => {
            return Err(invalid(format!(
                "{origin}: expected header `{PROFILE_HEADER}`, found `{}`",
                other.unwrap_or("")
            )))
        }
    }
    let (mut xs, mut values) = (Vec::new(), Vec::new());
    for (i, line) in lines.enumerate() {
        let (a, b) = line.split_once(',').ok_or_else(|| invalid(format!("{origin}: row {} is not `x,value`", i + 1)))?;
        let x: f64 = a.trim().parse().map_err(|_| invalid(format!("{origin}: row {}: bad x `{a}`", i + 1)))?;
        let v: f64 = b.trim().parse().map_err(|_| invalid(format!("{origin}: row {}: bad value `{b}`", i + 1)))?;
        xs.push(x);
        values.push(v);
    }
    if xs.len() < 2 {
        return Err(invalid(format!("{origin}: need at least 2 rows")));
    }
    Ok(Profile { xs, values })
}

pub fn read(path: &Path) -> Result<Profile> {
    let text = std::fs::read_to_string(path).map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))?;
    parse(&text, &path.display().to_string())
}
