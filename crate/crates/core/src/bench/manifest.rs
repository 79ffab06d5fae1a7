//! Run manifests, file digests and plot-data emission.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{CheckRecord, ExperimentConfig, ExperimentId, Params, ScanSpec};
use crate::error::{Error, Result};
use crate::table::fmt_num;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileEntry {
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub experiment: ExperimentId,
    pub version: String,
    pub timestamp: String,
    pub strict: bool,
    pub runtime_seconds: f64,
    /// The configuration as given.
    pub config: serde_json::Value,
    /// Parameters actually used, defaults filled in.
    pub params: serde_json::Value,
    pub records: Vec<CheckRecord>,
    pub measurements: BTreeMap<String, serde_json::Value>,
    pub scans: Vec<ScanSpec>,
    pub files: Vec<FileEntry>,
    pub diagnostics: Vec<String>,
    pub exit_code: u8,
}

fn to_json(v: impl Serialize) -> serde_json::Value {
    serde_json::to_value(v).unwrap_or(serde_json::Value::Null)
}

impl RunManifest {
    pub fn new(experiment: ExperimentId, config: &ExperimentConfig, params: &Params, strict: bool, runtime_seconds: f64) -> Self {
        Self {
            experiment,
            version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: chrono::Utc::now().to_rfc3339(),
            strict,
            runtime_seconds,
            config: to_json(config),
            params: to_json(params),
            records: Vec::new(),
            measurements: BTreeMap::new(),
            scans: Vec::new(),
            files: Vec::new(),
            diagnostics: Vec::new(),
            exit_code: 0,
        }
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).map_err(|e| Error::Numeric(format!("manifest serialization: {e}")))?;
        std::fs::write(path, text + "\n")?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::Numeric(format!("unreadable manifest {}: {e}", path.display())))
    }
}

/// Size and SHA-256 of each file, relative to `dir`.
pub fn inventory(dir: &Path, files: &[String]) -> Result<Vec<FileEntry>> {
    files
        .iter()
        .map(|f| {
            let bytes = std::fs::read(dir.join(f))?;
            Ok(FileEntry {
                path: f.clone(),
                bytes: bytes.len() as u64,
                sha256: hex::encode(Sha256::digest(&bytes)),
            })
        })
        .collect()
}

fn read_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Numeric(format!("missing scan data {}: {e}", path.display())))?;
    let mut lines = text.lines();
    let header: Vec<String> = lines
        .next()
        .ok_or_else(|| Error::Numeric(format!("empty scan file {}", path.display())))?
        .split(',')
        .map(str::to_string)
        .collect();
    let rows = lines
        .map(|l| {
            l.split(',')
                .map(|v| v.parse::<f64>().map_err(|e| Error::Numeric(format!("{}: bad number `{v}`: {e}", path.display()))))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((header, rows))
}

fn column(header: &[String], name: &str, path: &Path) -> Result<usize> {
    header
        .iter()
        .position(|h| h == name)
        .ok_or_else(|| Error::Numeric(format!("scan column `{name}` missing from {}", path.display())))
}

/// Write `<experiment>_<scan>.dat` for each scan; returns the file names.
pub fn write_plot_files(dir: &Path, id: ExperimentId, scans: &[ScanSpec]) -> Result<Vec<String>> {
    let mut written = Vec::new();
    for scan in scans {
        let csv = dir.join(&scan.csv);
        let (header, rows) = read_csv(&csv)?;
        let x = column(&header, &scan.x, &csv)?;
        let y = column(&header, &scan.y, &csv)?;
        let e = scan.y_err.as_deref().map(|c| column(&header, c, &csv)).transpose()?;
        let g = scan.group.as_deref().map(|c| column(&header, c, &csv)).transpose()?;
        let mut out = String::new();
        let (xl, yl) = if scan.loglog {
            (format!("ln({})", scan.x), format!("ln({})", scan.y))
        } else {
            (scan.x.clone(), scan.y.clone())
        };
        let _ = write!(out, "# {xl} {yl}");
        if let Some(c) = &scan.y_err {
            let _ = write!(out, " {c}");
        }
        out.push('\n');
        let mut last_group = None;
        for row in &rows {
            if let Some(g) = g {
                if last_group.is_some_and(|v: f64| v != row[g]) {
                    out.push('\n');
                }
                last_group = Some(row[g]);
            }
            let (mut xv, mut yv) = (row[x], row[y]);
            if scan.loglog {
                if !(xv > 0.0 && yv > 0.0) {
                    continue;
                }
                xv = xv.ln();
                yv = yv.ln();
            }
            let _ = write!(out, "{} {}", fmt_num(xv), fmt_num(yv));
            if let Some(e) = e {
                let _ = write!(out, " {}", fmt_num(row[e]));
            }
            out.push('\n');
        }
        let name = format!("{id}_{}.dat", scan.name);
        std::fs::write(dir.join(&name), out)?;
        written.push(name);
    }
    Ok(written)
}

/// Regenerate plot files of a finished run from its manifest and CSV data.
pub fn emit_plots(run_dir: &Path) -> Result<Vec<String>> {
    let path = run_dir.join("manifest.json");
    if !path.exists() {
        return Err(Error::Numeric(format!("no manifest.json in {}", run_dir.display())));
    }
    let m = RunManifest::read(&path)?;
    if m.scans.is_empty() {
        return Err(Error::Numeric(format!("run in {} recorded no scan data", run_dir.display())));
    }
    write_plot_files(run_dir, m.experiment, &m.scans)
}
