//! CSV tables with a provenance header, per-command JSON summaries, and the
//! aggregated report.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{EpError, Result};
use crate::verify::{ScanReport, Threshold};

pub fn config_hash(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// `(subcommand, config hash, seed)` stamped on every output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub subcommand: String,
    pub config_hash: String,
    pub seed: u64,
}

impl Provenance {
    pub fn header(&self) -> String {
        format!("# subcommand={} config_hash={} seed={}\n", self.subcommand, self.config_hash, self.seed)
    }
}

/// A header row followed by records.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self, prov: &Provenance) -> String {
        let mut out = prov.header();
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.join(","));
            out.push('\n');
        }
        out
    }
}

pub fn num(v: f64) -> String {
    format!("{v}")
}

fn coords(c: &Option<crate::verify::ScanPoint>) -> String {
    match c {
        Some(p) => p.coords.iter().map(|v| num(*v)).collect::<Vec<_>>().join(";"),
        None => String::new(),
    }
}

pub fn threshold_label(t: &Threshold) -> String {
    match t {
        Threshold::AtLeast(v) => format!(">= {v}"),
        Threshold::AtMost(v) => format!("<= {v}"),
        Threshold::Finite => "finite".into(),
    }
}

pub const SCAN_COLUMNS: [&str; 9] =
    ["quantity", "samples", "non_finite", "min", "max", "threshold", "pass", "argmin", "argmax"];

pub fn scan_row(r: &ScanReport) -> Vec<String> {
    vec![
        r.quantity.clone(),
        r.samples.to_string(),
        r.non_finite.to_string(),
        num(r.min),
        num(r.max),
        threshold_label(&r.threshold),
        r.pass.to_string(),
        coords(&r.argmin),
        coords(&r.argmax),
    ]
}

/// One pass/fail line of a summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: Option<f64>,
    pub requirement: String,
    pub pass: bool,
}

impl Check {
    pub fn at_most(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Check { name: name.into(), value: Some(value), requirement: format!("<= {limit}"), pass: value <= limit }
    }

    pub fn at_least(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Check { name: name.into(), value: Some(value), requirement: format!(">= {limit}"), pass: value >= limit }
    }

    pub fn within(name: impl Into<String>, value: f64, lo: f64, hi: f64) -> Self {
        Check {
            name: name.into(),
            value: Some(value),
            requirement: format!("in [{lo}, {hi}]"),
            pass: (lo..=hi).contains(&value),
        }
    }

    pub fn scan(r: &ScanReport) -> Self {
        let value = match r.threshold {
            Threshold::AtLeast(_) => r.min,
            _ => r.max,
        };
        Check {
            name: r.quantity.clone(),
            value: Some(value),
            requirement: threshold_label(&r.threshold),
            pass: r.pass,
        }
    }

    pub fn line(&self) -> String {
        let v = self.value.map(|v| format!("{v:.6e}")).unwrap_or_else(|| "-".into());
        let verdict = if self.pass { "PASS" } else { "FAIL" };
        format!("{verdict} {} = {v} ({})", self.name, self.requirement)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    #[serde(flatten)]
    pub provenance: Provenance,
    pub pass: bool,
    pub checks: Vec<Check>,
}

impl Summary {
    pub fn new(provenance: Provenance, checks: Vec<Check>) -> Self {
        let pass = checks.iter().all(|c| c.pass);
        Summary { provenance, pass, checks }
    }
}

pub fn csv_path(dir: &Path, subcommand: &str) -> PathBuf {
    dir.join(format!("{subcommand}.csv"))
}

pub fn summary_path(dir: &Path, subcommand: &str) -> PathBuf {
    dir.join(format!("{subcommand}.summary.json"))
}

pub fn write_outputs(dir: &Path, table: &Table, summary: &Summary) -> Result<()> {
    fs::create_dir_all(dir)?;
    let name = &summary.provenance.subcommand;
    fs::write(csv_path(dir, name), table.to_csv(&summary.provenance))?;
    let json = serde_json::to_string_pretty(summary).map_err(|e| EpError::Config(e.to_string()))?;
    fs::write(summary_path(dir, name), json + "\n")?;
    Ok(())
}

/// Every `*.summary.json` in `dir`, sorted by file name.
pub fn read_summaries(dir: &Path) -> Result<Vec<Summary>> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.to_string_lossy().ends_with(".summary.json"))
        .collect();
    paths.sort();
    paths
        .iter()
        .map(|p| {
            let text = fs::read_to_string(p)?;
            serde_json::from_str(&text).map_err(|e| EpError::Config(format!("{}: {e}", p.display())))
        })
        .collect()
}

/// One table of all pass/fail lines.
pub fn render_report(summaries: &[Summary]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:<12} {:<6} {:<40} {:>14}  requirement", "subcommand", "result", "check", "value");
    for s in summaries {
        for c in &s.checks {
            let v = c.value.map(|v| format!("{v:.6e}")).unwrap_or_else(|| "-".into());
            let verdict = if c.pass { "PASS" } else { "FAIL" };
            let _ = writeln!(
                out,
                "{:<12} {:<6} {:<40} {:>14}  {}",
                s.provenance.subcommand, verdict, c.name, v, c.requirement
            );
        }
    }
    let all = summaries.iter().all(|s| s.pass);
    let _ = writeln!(out, "overall: {}", if all { "PASS" } else { "FAIL" });
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prov() -> Provenance {
        Provenance { subcommand: "x".into(), config_hash: config_hash(b"a = 1\n"), seed: 3 }
    }

    #[test]
    fn hash_is_sha256_hex() {
        assert_eq!(config_hash(b"").len(), 64);
        assert!(config_hash(b"").starts_with("e3b0c442"));
    }

    #[test]
    fn csv_starts_with_provenance() {
        let mut t = Table::new(&["a", "b"]);
        t.push(vec![num(1.5), num(-0.0)]);
        let csv = t.to_csv(&prov());
        let mut lines = csv.lines();
        assert!(lines.next().unwrap().starts_with("# subcommand=x config_hash="));
        assert_eq!(lines.next(), Some("a,b"));
        assert_eq!(lines.next(), Some("1.5,-0"));
    }

    #[test]
    fn summaries_round_trip_and_aggregate() {
        let dir = tempfile::tempdir().unwrap();
        let ok = Summary::new(prov(), vec![Check::at_most("r", 1.0, 2.0)]);
        let mut p2 = prov();
        p2.subcommand = "y".into();
        let bad = Summary::new(p2, vec![Check::at_least("m", 0.01, 0.05)]);
        write_outputs(dir.path(), &Table::new(&["a"]), &ok).unwrap();
        write_outputs(dir.path(), &Table::new(&["a"]), &bad).unwrap();
        let back = read_summaries(dir.path()).unwrap();
        assert_eq!(back, vec![ok, bad]);
        let text = render_report(&back);
        assert!(text.contains("PASS") && text.contains("FAIL"));
        assert!(text.trim_end().ends_with("overall: FAIL"));
    }
}
