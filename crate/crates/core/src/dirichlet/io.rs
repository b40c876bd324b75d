//! CSV exchange for samples and parameter vectors.
//!
//! Floats are written in shortest round-trip form, so write → read is
//! bit-exact. Sample files carry an optional header line starting with `#`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::types::{DirichletParams, SampleSet};
use crate::error::{Error, Result};

/// Shortest decimal that parses back to the same f64.
pub fn fmt_float(v: f64) -> String {
    format!("{v:?}")
}

fn parse_float(field: &str, location: impl FnOnce() -> String) -> Result<f64> {
    field.trim().parse::<f64>().map_err(|e| Error::Parse {
        location: location(),
        message: format!("'{}' is not a number ({e})", field.trim()),
    })
}

pub fn samples_to_csv(data: &SampleSet) -> String {
    let mut out = String::new();
    let header: Vec<String> = (1..=data.dim()).map(|i| format!("z{i}")).collect();
    let _ = writeln!(out, "# {}", header.join(","));
    for row in data.rows() {
        let fields: Vec<String> = row.iter().map(|&v| fmt_float(v)).collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

pub fn samples_from_csv(text: &str, origin: &str) -> Result<SampleSet> {
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row = line
            .split(',')
            .enumerate()
            .map(|(col, f)| parse_float(f, || format!("{origin}:{}:{}", lineno + 1, col + 1)))
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    SampleSet::from_rows(rows)
}

pub fn write_samples_csv(path: &Path, data: &SampleSet) -> Result<()> {
    fs::write(path, samples_to_csv(data)).map_err(|e| Error::io(path, e))
}

pub fn read_samples_csv(path: &Path) -> Result<SampleSet> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    samples_from_csv(&text, &path.display().to_string())
}

pub fn write_params_csv(path: &Path, params: &DirichletParams) -> Result<()> {
    let mut out = String::from("index,alpha\n");
    for (i, &a) in params.as_slice().iter().enumerate() {
        let _ = writeln!(out, "{},{}", i + 1, fmt_float(a));
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

pub fn read_params_csv(path: &Path) -> Result<DirichletParams> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let origin = path.display().to_string();
    let mut alpha = Vec::new();
    for (lineno, line) in text.lines().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let value = line.split(',').nth(1).ok_or_else(|| Error::Parse {
            location: format!("{origin}:{}", lineno + 1),
            message: "expected 'index,alpha'".into(),
        })?;
        alpha.push(parse_float(value, || format!("{origin}:{}", lineno + 1))?);
    }
    DirichletParams::new(alpha)
}
