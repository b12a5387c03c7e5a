//! Flat `key = value` configuration with unit-suffixed keys.

use crate::error::{invalid, Result};
use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};

const LENGTH_UNITS: [(&str, f64); 4] = [("_m", 1.0), ("_mm", 1e-3), ("_um", 1e-6), ("_nm", 1e-9)];
const FREQUENCY_UNITS: [(&str, f64); 3] = [("_per_m", 1.0), ("_per_mm", 1e3), ("_per_um", 1e6)];

#[derive(Debug)]
pub struct Config {
    entries: BTreeMap<String, (String, usize)>,
    used: RefCell<BTreeSet<String>>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| invalid(format!("line {}: expected `key = value`, got `{line}`", i + 1)))?;
            let key = key.trim().to_string();
            if key.is_empty() {
                return Err(invalid(format!("line {}: empty key", i + 1)));
            }
            if entries.insert(key.clone(), (value.trim().to_string(), i + 1)).is_some() {
                return Err(invalid(format!("line {}: duplicate key `{key}`", i + 1)));
            }
        }
        Ok(Self { entries, used: RefCell::new(BTreeSet::new()) })
    }

    fn raw(&self, key: &str) -> Option<&(String, usize)> {
        let e = self.entries.get(key);
        if e.is_some() {
            self.used.borrow_mut().insert(key.to_string());
        }
        e
    }

    pub fn text(&self, key: &str) -> Option<String> {
        self.raw(key).map(|(v, _)| v.clone())
    }

    pub fn require_text(&self, key: &str) -> Result<String> {
        self.text(key).ok_or_else(|| invalid(format!("missing required key `{key}`")))
    }

    pub fn number(&self, key: &str) -> Result<Option<f64>> {
        match self.raw(key) {
            None => Ok(None),
            Some((v, line)) => v
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .map(Some)
                .ok_or_else(|| invalid(format!("line {line}: `{key}` must be a number, got `{v}`"))),
        }
    }

    pub fn count(&self, key: &str) -> Result<Option<usize>> {
        match self.raw(key) {
            None => Ok(None),
            Some((v, line)) => v
                .parse::<usize>()
                .map(Some)
                .map_err(|_| invalid(format!("line {line}: `{key}` must be a non-negative integer, got `{v}`"))),
        }
    }

    fn with_units(&self, base: &str, units: &[(&str, f64)]) -> Result<Option<f64>> {
        let mut found = None;
        for (suffix, scale) in units {
            let key = format!("{base}{suffix}");
            if let Some(v) = self.number(&key)? {
                if found.is_some() {
                    return Err(invalid(format!("`{base}` is given in more than one unit")));
                }
                found = Some(v * scale);
            }
        }
        Ok(found)
    }

    /// Length in metres from `base_m`, `base_mm`, `base_um` or `base_nm`.
    pub fn length(&self, base: &str) -> Result<Option<f64>> {
        self.with_units(base, &LENGTH_UNITS)
    }

    pub fn require_length(&self, base: &str) -> Result<f64> {
        self.length(base)?.ok_or_else(|| invalid(format!("missing required key `{base}_mm` (or _m, _um, _nm)")))
    }

    /// Spatial frequency in cycles per metre from `base_per_m`, `base_per_mm` or `base_per_um`.
    pub fn frequency(&self, base: &str) -> Result<Option<f64>> {
        self.with_units(base, &FREQUENCY_UNITS)
    }

    /// Comma-separated pair of frequencies.
    pub fn frequency_pair(&self, base: &str) -> Result<Option<(f64, f64)>> {
        for (suffix, scale) in FREQUENCY_UNITS {
            let key = format!("{base}{suffix}");
            if let Some((v, line)) = self.raw(&key) {
                return parse_pair(v)
                    .map(|(a, b)| Some((a * scale, b * scale)))
                    .ok_or_else(|| invalid(format!("line {line}: `{key}` must be `lo, hi`, got `{v}`")));
            }
        }
        Ok(None)
    }

    /// Errors on keys that were never read, which are almost always typos.
    pub fn reject_unused(&self) -> Result<()> {
        let used = self.used.borrow();
        let unknown: Vec<String> = self
            .entries
            .iter()
            .filter(|(k, _)| !used.contains(*k))
            .map(|(k, (_, line))| format!("`{k}` (line {line})"))
            .collect();
        if unknown.is_empty() {
            Ok(())
        } else {
            Err(invalid(format!("unknown keys: {}", unknown.join(", "))))
        }
    }
}

pub fn parse_pair(v: &str) -> Option<(f64, f64)> {
    let (a, b) = v.split_once(',')?;
    Some((a.trim().parse().ok()?, b.trim().parse().ok()?))
}
