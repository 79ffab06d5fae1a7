//! Experiment runner: one suite per verification experiment, TOML or JSON
//! configuration, CSV data, plot files and a JSON manifest per run.

pub mod config;
pub mod manifest;
pub mod suites;

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::table::Table;

pub use config::{ExperimentConfig, Params, Tolerances};
pub use manifest::{emit_plots, FileEntry, RunManifest};

/// Output directory used when neither `--out`, `MODLOC_OUT` nor the config names one.
pub const DEFAULT_OUT_DIR: &str = "modloc-out";

/// Environment variable overriding the configured output directory.
pub const OUT_ENV: &str = "MODLOC_OUT";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentId {
    EjFluct,
    ThermalMap,
    EntropyScan,
    ChargeScaling,
    Unruh,
    Crossing,
    ZfAlgebra,
}

impl ExperimentId {
    pub const ALL: [ExperimentId; 7] = [
        Self::ThermalMap,
        Self::EjFluct,
        Self::EntropyScan,
        Self::ChargeScaling,
        Self::Unruh,
        Self::Crossing,
        Self::ZfAlgebra,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::EjFluct => "ej-fluct",
            Self::ThermalMap => "thermal-map",
            Self::EntropyScan => "entropy-scan",
            Self::ChargeScaling => "charge-scaling",
            Self::Unruh => "unruh",
            Self::Crossing => "crossing",
            Self::ZfAlgebra => "zf-algebra",
        }
    }
}

impl fmt::Display for ExperimentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|id| id.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = Self::ALL.iter().map(|id| id.name()).collect();
                Error::Config(format!("unknown experiment `{s}`, expected one of {}", names.join(", ")))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    UnverifiedByDesign,
}

/// How a measured value is compared with its tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Bound {
    /// Pass iff `measured < tolerance`.
    Upper,
    /// Pass iff `measured > tolerance`.
    Lower,
    /// Boolean outcome, stored as 1 (held) or 0.
    Flag,
    /// Not asserted.
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub measured: Option<f64>,
    pub tolerance: Option<f64>,
    pub bound: Bound,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub note: String,
}

/// Plot-ready view of one CSV table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanSpec {
    pub name: String,
    pub csv: String,
    pub x: String,
    pub y: String,
    #[serde(default)]
    pub y_err: Option<String>,
    /// Column whose changes start a new data block.
    #[serde(default)]
    pub group: Option<String>,
    /// Write `ln x`, `ln y` instead of `x`, `y`.
    #[serde(default)]
    pub loglog: bool,
}

/// Collects records, tables and measurements while a suite runs.
#[derive(Debug)]
pub struct Recorder<'a> {
    tolerances: &'a Tolerances,
    strict: bool,
    pub records: Vec<CheckRecord>,
    pub tables: Vec<(String, Table)>,
    pub scans: Vec<ScanSpec>,
    pub measurements: BTreeMap<String, serde_json::Value>,
}

impl<'a> Recorder<'a> {
    pub fn new(tolerances: &'a Tolerances, strict: bool) -> Self {
        Self {
            tolerances,
            strict,
            records: Vec::new(),
            tables: Vec::new(),
            scans: Vec::new(),
            measurements: BTreeMap::new(),
        }
    }

    fn push(&mut self, record: CheckRecord) {
        assert!(
            self.records.iter().all(|r| r.name != record.name),
            "duplicate manifest record `{}`",
            record.name
        );
        self.records.push(record);
    }

    /// Record `measured` against the tolerance stored under `key`.
    pub fn check(&mut self, name: impl Into<String>, key: &str, measured: f64) {
        let (tolerance, bound) = self.tolerances.resolve(key, self.strict);
        let held = match bound {
            Bound::Upper => measured < tolerance,
            Bound::Lower => measured > tolerance,
            Bound::Flag | Bound::None => unreachable!("tolerance keys are upper or lower bounds"),
        };
        self.push(CheckRecord {
            name: name.into(),
            measured: Some(measured),
            tolerance: Some(tolerance),
            bound,
            verdict: if held { Verdict::Pass } else { Verdict::Fail },
            note: String::new(),
        });
    }

    pub fn flag(&mut self, name: impl Into<String>, held: bool, note: impl Into<String>) {
        self.push(CheckRecord {
            name: name.into(),
            measured: Some(if held { 1.0 } else { 0.0 }),
            tolerance: None,
            bound: Bound::Flag,
            verdict: if held { Verdict::Pass } else { Verdict::Fail },
            note: note.into(),
        });
    }

    pub fn unverified(&mut self, name: impl Into<String>, note: impl Into<String>) {
        self.push(CheckRecord {
            name: name.into(),
            measured: None,
            tolerance: None,
            bound: Bound::None,
            verdict: Verdict::UnverifiedByDesign,
            note: note.into(),
        });
    }

    pub fn measure(&mut self, name: impl Into<String>, value: impl Serialize) {
        let v = serde_json::to_value(value).unwrap_or(serde_json::Value::Null);
        self.measurements.insert(name.into(), v);
    }

    pub fn table(&mut self, name: &str, table: Table) {
        self.tables.push((name.to_string(), table));
    }

    pub fn scan(&mut self, spec: ScanSpec) {
        self.scans.push(spec);
    }
}

/// Aggregate exit status: 0 pass, 1 any failed check.
pub fn verdict_exit_code(records: &[CheckRecord]) -> u8 {
    if records.iter().any(|r| r.verdict == Verdict::Fail) {
        1
    } else {
        0
    }
}

/// Output directory by precedence: `--out`, `MODLOC_OUT`, config, default.
pub fn resolve_out_dir(cli: Option<&Path>, config: Option<&Path>) -> PathBuf {
    if let Some(p) = cli {
        return p.to_path_buf();
    }
    if let Some(p) = std::env::var_os(OUT_ENV).filter(|v| !v.is_empty()) {
        return PathBuf::from(p);
    }
    config.map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR))
}

/// Result of one experiment run that reached the manifest stage.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub manifest: RunManifest,
    pub dir: PathBuf,
    pub exit_code: u8,
}

/// Run one experiment from a single-experiment config into `dir`.
pub fn run(config: &ExperimentConfig, id: ExperimentId, dir: &Path, strict: bool) -> Result<RunOutcome> {
    let params = config.single_params(id)?;
    let tolerances = config.tolerances_for(id, true)?;
    run_with(config, &params, &tolerances, dir, strict)
}

/// Run a suite with resolved parameters and write its data and manifest.
///
/// Configuration and domain problems are returned as errors before any
/// file is written. A numeric failure inside the suite still produces a
/// manifest, with the diagnostic attached and exit code 3.
pub fn run_with(config: &ExperimentConfig, params: &Params, tolerances: &Tolerances, dir: &Path, strict: bool) -> Result<RunOutcome> {
    let id = params.id();
    let start = Instant::now();
    let mut rec = Recorder::new(tolerances, strict);
    let result = suites::run_suite(params, &mut rec);
    let elapsed = start.elapsed().as_secs_f64();
    let mut diagnostics = Vec::new();
    let mut exit_code = verdict_exit_code(&rec.records);
    if let Err(e) = result {
        if e.exit_code() == 2 {
            return Err(e);
        }
        diagnostics.push(e.to_string());
        exit_code = 3;
    }
    std::fs::create_dir_all(dir)?;
    let mut files = Vec::new();
    for (name, table) in &rec.tables {
        let file = format!("{id}_{name}.csv");
        table.write_csv(&dir.join(&file))?;
        files.push(file);
    }
    let mut manifest = RunManifest::new(id, config, params, strict, elapsed);
    manifest.records = rec.records;
    manifest.measurements = rec.measurements;
    manifest.scans = rec.scans;
    manifest.diagnostics = diagnostics;
    if exit_code != 3 {
        files.extend(manifest::write_plot_files(dir, id, &manifest.scans)?);
    }
    manifest.files = manifest::inventory(dir, &files)?;
    manifest.exit_code = exit_code;
    manifest.write(&dir.join("manifest.json"))?;
    Ok(RunOutcome {
        manifest,
        dir: dir.to_path_buf(),
        exit_code,
    })
}

/// Outcome of [`verify_all`].
#[derive(Debug, Clone, Serialize)]
pub struct AggregateManifest {
    pub version: String,
    pub timestamp: String,
    pub strict: bool,
    pub experiments: Vec<AggregateEntry>,
    pub exit_code: u8,
}

#[derive(Debug, Clone, Serialize)]
pub struct AggregateEntry {
    pub experiment: ExperimentId,
    pub exit_code: u8,
    pub passed: usize,
    pub failed: usize,
    pub unverified_by_design: usize,
    pub runtime_seconds: f64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub diagnostics: Vec<String>,
}

/// Run every selected suite at default parameters (or those of `config`),
/// each into `out/<experiment>`, and write `out/manifest.json`.
///
/// With `parallel > 1` independent suites run concurrently.
pub fn verify_all(config: &ExperimentConfig, only: &[ExperimentId], out: &Path, strict: bool, parallel: usize) -> Result<AggregateManifest> {
    let selected: Vec<ExperimentId> = if only.is_empty() {
        ExperimentId::ALL.to_vec()
    } else {
        ExperimentId::ALL.into_iter().filter(|id| only.contains(id)).collect()
    };
    if let Some(id) = config.experiment {
        return Err(Error::Config(format!("verify-all runs every suite; remove `experiment = \"{id}\"` from the config")));
    }
    let resolved = selected
        .iter()
        .map(|&id| Ok((config.suite_params(id)?, config.tolerances_for(id, false)?)))
        .collect::<Result<Vec<_>>>()?;
    let one = |(params, tolerances): &(Params, Tolerances)| -> Result<AggregateEntry> {
        let id = params.id();
        let outcome = run_with(config, params, tolerances, &out.join(id.name()), strict)?;
        let m = &outcome.manifest;
        let count = |v: Verdict| m.records.iter().filter(|r| r.verdict == v).count();
        Ok(AggregateEntry {
            experiment: id,
            exit_code: outcome.exit_code,
            passed: count(Verdict::Pass),
            failed: count(Verdict::Fail),
            unverified_by_design: count(Verdict::UnverifiedByDesign),
            runtime_seconds: m.runtime_seconds,
            diagnostics: m.diagnostics.clone(),
        })
    };
    let entries: Vec<AggregateEntry> = if parallel > 1 {
        resolved.par_iter().map(one).collect::<Result<_>>()?
    } else {
        resolved.iter().map(one).collect::<Result<_>>()?
    };
    let exit_code = entries.iter().map(|e| e.exit_code).max().unwrap_or(0);
    let agg = AggregateManifest {
        version: env!("CARGO_PKG_VERSION").to_string(),
        timestamp: chrono::Utc::now().to_rfc3339(),
        strict,
        experiments: entries,
        exit_code,
    };
    std::fs::create_dir_all(out)?;
    std::fs::write(out.join("manifest.json"), serde_json::to_string_pretty(&agg).map_err(|e| Error::Numeric(e.to_string()))?)?;
    Ok(agg)
}
