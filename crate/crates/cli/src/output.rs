//! CSV series, JSON reports and the run manifest.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Real(f64),
    Int(i64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

/// A table with named, optionally dimensioned columns.
#[derive(Debug, Clone, Default)]
pub struct Series {
    columns: Vec<(String, Option<String>)>,
    rows: Vec<Vec<Cell>>,
}

impl Series {
    /// Columns given as `(name, unit)`; a `None` unit is for labels and counts.
    pub fn new(columns: &[(&str, Option<&str>)]) -> Self {
        Series {
            columns: columns.iter().map(|(n, u)| (n.to_string(), u.map(str::to_string))).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match the header");
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn header(&self) -> String {
        self.columns
            .iter()
            .map(|(n, u)| match u {
                Some(u) => format!("{n} [{u}]"),
                None => n.clone(),
            })
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header();
        out.push('\n');
        for row in &self.rows {
            for (i, cell) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                match cell {
                    Cell::Real(v) => write!(out, "{}", format_real(*v)).expect("string write"),
                    Cell::Int(v) => write!(out, "{v}").expect("string write"),
                    Cell::Text(s) if s.contains([',', '"', '\n']) => {
                        write!(out, "\"{}\"", s.replace('"', "\"\"")).expect("string write")
                    }
                    Cell::Text(s) => out.push_str(s),
                }
            }
            out.push('\n');
        }
        out
    }
}

/// Seventeen significant digits, enough to round-trip any f64.
pub fn format_real(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

/// Write `series` as CSV. An empty series is an error and leaves no file.
pub fn emit_series(series: &Series, path: &Path) -> Result<(), CliError> {
    if series.is_empty() {
        return Err(CliError::Usage(format!("refusing to write empty series to {}", path.display())));
    }
    fs::write(path, series.to_csv()).map_err(|e| CliError::io(format!("writing {}", path.display()), e))
}

pub fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).map_err(|e| CliError::io(format!("writing {}", path.display()), e))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "lowercase")]
pub enum Tolerance {
    /// |estimate/target − 1| ≤ value.
    Relative(f64),
    /// |estimate − target| ≤ value · stderr.
    Sigma(f64),
    /// |estimate − target| ≤ value.
    Absolute(f64),
    /// Relative bound, widened to 3 stderr when the sampling error is larger.
    RelativeOrSigma(f64),
}

impl Tolerance {
    pub fn accepts(self, estimate: f64, stderr: Option<f64>, target: f64) -> bool {
        let diff = (estimate - target).abs();
        let se = stderr.unwrap_or(0.0);
        let ok = match self {
            Tolerance::Relative(r) => diff <= r * target.abs(),
            Tolerance::Sigma(s) => diff <= s * se,
            Tolerance::Absolute(a) => diff <= a,
            Tolerance::RelativeOrSigma(r) => diff <= (r * target.abs()).max(3.0 * se),
        };
        ok && estimate.is_finite()
    }
}

/// One checked number in a manifest.
#[derive(Debug, Clone, Serialize)]
pub struct ResultRow {
    pub name: String,
    pub estimate: f64,
    pub stderr: Option<f64>,
    pub target: f64,
    /// The relation the target comes from.
    pub target_formula: String,
    pub tolerance: Tolerance,
    pub pass: bool,
}

impl ResultRow {
    pub fn new(
        name: &str,
        estimate: f64,
        stderr: Option<f64>,
        target: f64,
        target_formula: &str,
        tolerance: Tolerance,
    ) -> Self {
        ResultRow {
            name: name.into(),
            estimate,
            stderr,
            target,
            target_formula: target_formula.into(),
            pass: tolerance.accepts(estimate, stderr, target),
            tolerance,
        }
    }

    pub fn summary(&self) -> String {
        let se = self.stderr.map(|s| format!(" +- {s:.4e}")).unwrap_or_default();
        format!(
            "{} {}: {:.6e}{se} vs {:.6e} ({})",
            if self.pass { "PASS" } else { "FAIL" },
            self.name,
            self.estimate,
            self.target,
            self.target_formula
        )
    }
}

/// Resolved inputs. Feeding this back through `--config` repeats the run.
#[derive(Debug, Clone, Serialize)]
pub struct ConfigEcho {
    pub command: String,
    pub seed: u64,
    pub params: serde_json::Value,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub timestamp: String,
    pub config: ConfigEcho,
    /// Worker count used; outputs do not depend on it.
    pub workers: Option<usize>,
    pub results: Vec<ResultRow>,
    pub files: Vec<PathBuf>,
}

impl Manifest {
    pub fn new(config: ConfigEcho, workers: Option<usize>) -> Self {
        Manifest {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            config,
            workers,
            results: Vec::new(),
            files: Vec::new(),
        }
    }

    pub fn all_pass(&self) -> bool {
        self.results.iter().all(|r| r.pass)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_carries_units() {
        let s = Series::new(&[("t", Some("s")), ("E_mean", Some("erg")), ("E_stderr", Some("erg"))]);
        assert_eq!(s.header(), "t [s],E_mean [erg],E_stderr [erg]");
    }

    #[test]
    fn reals_round_trip_with_17_digits() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0] {
            let text = format_real(v);
            assert_eq!(text.parse::<f64>().unwrap(), v);
            let mantissa = text.split('e').next().unwrap().trim_start_matches('-');
            assert_eq!(mantissa.chars().filter(|c| c.is_ascii_digit()).count(), 17, "{text}");
        }
    }

    #[test]
    fn empty_series_writes_nothing() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("e.csv");
        let s = Series::new(&[("t", Some("s"))]);
        assert!(emit_series(&s, &path).is_err());
        assert!(!path.exists());
    }

    #[test]
    fn csv_uses_lf_and_quotes_text() {
        let mut s = Series::new(&[("label", None), ("x", Some("cm"))]);
        s.push(vec!["a,b".into(), 1.5.into()]);
        assert_eq!(s.to_csv(), "label,x [cm]\n\"a,b\",1.5000000000000000e0\n");
    }

    #[test]
    fn tolerances() {
        assert!(Tolerance::Relative(0.03).accepts(1.02, None, 1.0));
        assert!(!Tolerance::Relative(0.03).accepts(1.04, None, 1.0));
        assert!(Tolerance::Sigma(3.0).accepts(1.2, Some(0.1), 1.0));
        assert!(!Tolerance::Sigma(3.0).accepts(1.2, None, 1.0));
        assert!(Tolerance::RelativeOrSigma(0.1).accepts(1.25, Some(0.1), 1.0));
        assert!(!Tolerance::Absolute(0.5).accepts(f64::NAN, None, 0.0));
    }
}
