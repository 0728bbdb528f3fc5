//! Scenario reports: tables, verdicts and the files written for them.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// A numeric table written as CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self { name: name.to_string(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.columns.join(",");
        s.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format_number(*v)).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }
}

/// Shortest round-trip representation; non-finite values become `nan`, `inf`, `-inf`.
pub fn format_number(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:?}")
    }
}

/// A pass/fail decision on one measured quantity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub probe: String,
    pub check: String,
    pub threshold: String,
    /// `None` when the probe failed before producing the value.
    pub value: Option<f64>,
    pub passed: bool,
}

impl Verdict {
    pub fn line(&self) -> String {
        let value = self.value.map(format_number).unwrap_or_else(|| "n/a".into());
        format!("[{}] {}/{}: value {} (threshold {})", if self.passed { "PASS" } else { "FAIL" }, self.probe, self.check, value, self.threshold)
    }
}

/// SVG plot attached to a probe.
#[derive(Debug, Clone, PartialEq)]
pub struct Plot {
    pub name: String,
    pub svg: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub index: usize,
    pub probe: String,
    pub tables: Vec<Table>,
    pub verdicts: Vec<Verdict>,
    /// Structured records specific to the probe (for example fitted singular points).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub records: Vec<serde_json::Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    /// Plots are written next to the report, not embedded in it.
    #[serde(skip)]
    pub plots: Vec<Plot>,
}

impl ProbeReport {
    pub fn new(index: usize, probe: &str) -> Self {
        Self { index, probe: probe.to_string(), tables: Vec::new(), verdicts: Vec::new(), records: Vec::new(), error: None, plots: Vec::new() }
    }

    /// Records `value` against a closed threshold.
    pub fn check(&mut self, check: &str, threshold: impl Into<String>, value: f64, passed: bool) {
        self.verdicts.push(Verdict { probe: self.probe.clone(), check: check.to_string(), threshold: threshold.into(), value: Some(value), passed });
    }

    pub fn check_at_most(&mut self, check: &str, value: f64, bound: f64) {
        self.check(check, format!("<= {}", format_number(bound)), value, value <= bound);
    }

    pub fn check_at_least(&mut self, check: &str, value: f64, bound: f64) {
        self.check(check, format!(">= {}", format_number(bound)), value, value >= bound);
    }

    pub fn check_within(&mut self, check: &str, value: f64, lo: f64, hi: f64) {
        self.check(check, format!("in [{}, {}]", format_number(lo), format_number(hi)), value, (lo..=hi).contains(&value));
    }

    pub fn fail(&mut self, message: String) {
        self.verdicts.push(Verdict { probe: self.probe.clone(), check: "completed".into(), threshold: "no error".into(), value: None, passed: false });
        self.error = Some(message);
    }

    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub lab_version: String,
    pub seed: u64,
    pub generator: Option<String>,
    pub probe_count: usize,
    pub verdict_count: usize,
    pub failed_verdicts: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioReport {
    pub scenario: String,
    pub description: String,
    pub metadata: Metadata,
    pub probes: Vec<ProbeReport>,
}

impl ScenarioReport {
    pub fn verdicts(&self) -> impl Iterator<Item = &Verdict> {
        self.probes.iter().flat_map(|p| p.verdicts.iter())
    }

    pub fn passed(&self) -> bool {
        self.probes.iter().all(ProbeReport::passed)
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "scenario {}: {} probes, {} verdicts, {} failed", self.scenario, self.metadata.probe_count, self.metadata.verdict_count, self.metadata.failed_verdicts);
        for p in &self.probes {
            if let Some(e) = &p.error {
                let _ = writeln!(s, "  probe {} ({}) error: {e}", p.index, p.probe);
            }
            for v in &p.verdicts {
                let _ = writeln!(s, "  {}", v.line());
            }
        }
        s
    }

    /// Writes `report.json`, one CSV per table, one SVG per plot and a
    /// `manifest.json` with the SHA-256 of every file. Output is a pure
    /// function of the report.
    pub fn write(&self, dir: &Path) -> anyhow::Result<Vec<PathBuf>> {
        fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
        let mut files: Vec<(String, Vec<u8>)> = Vec::new();
        let mut json = serde_json::to_string_pretty(self)?;
        json.push('\n');
        files.push(("report.json".into(), json.into_bytes()));
        for p in &self.probes {
            for t in &p.tables {
                files.push((format!("tables/{:02}_{}_{}.csv", p.index, p.probe, t.name), t.to_csv().into_bytes()));
            }
            for plot in &p.plots {
                files.push((format!("plots/{:02}_{}_{}.svg", p.index, p.probe, plot.name), plot.svg.clone().into_bytes()));
            }
        }
        let mut manifest = Manifest { scenario: self.scenario.clone(), files: Vec::new() };
        let mut written = Vec::new();
        for (name, bytes) in &files {
            let path = dir.join(name);
            if let Some(parent) = path.parent() {
                fs::create_dir_all(parent).with_context(|| format!("cannot create {}", parent.display()))?;
            }
            fs::write(&path, bytes).with_context(|| format!("cannot write {}", path.display()))?;
            manifest.files.push(ManifestEntry { path: name.clone(), bytes: bytes.len() as u64, sha256: hex(&Sha256::digest(bytes)) });
            written.push(path);
        }
        let path = dir.join("manifest.json");
        let mut text = serde_json::to_string_pretty(&manifest)?;
        text.push('\n');
        fs::write(&path, text).with_context(|| format!("cannot write {}", path.display()))?;
        written.push(path);
        Ok(written)
    }

    pub fn read(dir: &Path) -> anyhow::Result<Self> {
        let path = dir.join("report.json");
        let text = fs::read_to_string(&path).with_context(|| format!("cannot read {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("{} is not a scenario report", path.display()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub scenario: String,
    pub files: Vec<ManifestEntry>,
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Recomputes the SHA-256 of every file listed in `dir/manifest.json` and
/// returns the paths whose contents no longer match.
pub fn verify_manifest(dir: &Path) -> anyhow::Result<Vec<String>> {
    let path = dir.join("manifest.json");
    let text = fs::read_to_string(&path).with_context(|| format!("cannot read {}", path.display()))?;
    let manifest: Manifest = serde_json::from_str(&text).with_context(|| format!("{} is not a manifest", path.display()))?;
    let mut bad = Vec::new();
    for e in &manifest.files {
        match fs::read(dir.join(&e.path)) {
            Ok(bytes) if hex(&Sha256::digest(&bytes)) == e.sha256 => {}
            _ => bad.push(e.path.clone()),
        }
    }
    Ok(bad)
}
