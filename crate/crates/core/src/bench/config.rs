//! Experiment configuration: TOML (or JSON) with a `[params]` block of
//! experiment-specific fields and optional `[tolerances]` overrides.
//!
//! ```toml
//! experiment = "unruh"
//! output_dir = "runs/unruh"
//!
//! [params]
//! accelerations = [0.5, 1.0, 2.0]
//! omega_points = 11
//! control_beta_factor = 0.5
//! spacetime_dim = 4
//!
//! [tolerances]
//! balance = 5e-4
//! ```
//!
//! For `verify-all` the blocks are keyed by experiment instead,
//! `[params.unruh]` and `[tolerances.unruh]`, and omitted suites run at
//! their defaults.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::{Bound, ExperimentId};
use crate::error::{Error, Result};
use crate::smearing::Profile;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub experiment: Option<ExperimentId>,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    /// Reserved for randomized grid jitter; no suite uses randomness.
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub params: Option<serde_json::Value>,
    #[serde(default)]
    pub tolerances: BTreeMap<String, ToleranceEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ToleranceEntry {
    Value(f64),
    Table(BTreeMap<String, f64>),
}

fn config_err(e: impl std::fmt::Display) -> Error {
    Error::Config(e.to_string())
}

impl ExperimentConfig {
    /// Parse TOML, or JSON when the text starts with `{`.
    pub fn parse(text: &str) -> Result<Self> {
        let value: serde_json::Value = if text.trim_start().starts_with('{') {
            serde_json::from_str(text).map_err(config_err)?
        } else {
            let v: toml::Value = toml::from_str(text).map_err(config_err)?;
            serde_json::to_value(v).map_err(config_err)?
        };
        serde_json::from_value(value).map_err(config_err)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    /// Parameters of a single-experiment run; the `[params]` block is required.
    pub fn single_params(&self, id: ExperimentId) -> Result<Params> {
        if let Some(declared) = self.experiment {
            if declared != id {
                return Err(Error::Config(format!("config declares experiment `{declared}` but `{id}` was requested")));
            }
        }
        let value = self
            .params
            .as_ref()
            .ok_or_else(|| Error::Config(format!("missing [params] block for `{id}`")))?;
        Params::parse(id, value)
    }

    /// Parameters of one suite inside `verify-all`: `[params.<experiment>]`
    /// when present, defaults otherwise.
    pub fn suite_params(&self, id: ExperimentId) -> Result<Params> {
        let Some(value) = &self.params else {
            return Ok(Params::default_for(id));
        };
        let table = value
            .as_object()
            .ok_or_else(|| Error::Config("[params] must be a table keyed by experiment for verify-all".into()))?;
        for key in table.keys() {
            key.parse::<ExperimentId>()
                .map_err(|_| Error::Config(format!("[params.{key}]: unknown experiment")))?;
        }
        match table.get(id.name()) {
            Some(v) => Params::parse(id, v),
            None => Ok(Params::default_for(id)),
        }
    }

    /// Tolerance overrides for `id`. Flat keys are accepted for single runs,
    /// `[tolerances.<experiment>]` tables in both modes.
    pub fn tolerances_for(&self, id: ExperimentId, single: bool) -> Result<Tolerances> {
        let mut overrides = BTreeMap::new();
        for (key, entry) in &self.tolerances {
            match entry {
                ToleranceEntry::Value(v) if single => {
                    overrides.insert(key.clone(), *v);
                }
                ToleranceEntry::Value(_) => {
                    return Err(Error::Config(format!(
                        "tolerance `{key}` must sit in a [tolerances.<experiment>] table for verify-all"
                    )));
                }
                ToleranceEntry::Table(t) => {
                    let exp: ExperimentId = key
                        .parse()
                        .map_err(|_| Error::Config(format!("[tolerances.{key}]: unknown experiment")))?;
                    Tolerances::new(exp, t.clone())?;
                    if exp == id {
                        overrides.extend(t.iter().map(|(k, v)| (k.clone(), *v)));
                    } else if single {
                        return Err(Error::Config(format!("[tolerances.{key}] does not apply to `{id}`")));
                    }
                }
            }
        }
        Tolerances::new(id, overrides)
    }
}

/// How a tolerance tightens under `--strict`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strictness {
    /// Divide by 10.
    Divide,
    /// Shrink the gap to 1 by 10 (goodness-of-fit thresholds).
    Gap,
    /// Unchanged (negative controls and ratios).
    Fixed,
}

type ToleranceDefault = (&'static str, f64, Bound, Strictness);

/// Default tolerances of every check key, per experiment.
pub fn tolerance_defaults(id: ExperimentId) -> &'static [ToleranceDefault] {
    use Bound::{Lower, Upper};
    use Strictness::{Divide, Fixed, Gap};
    match id {
        ExperimentId::ThermalMap => &[
            ("isomorphism", 1e-10, Upper, Divide),
            ("kms", 1e-10, Upper, Divide),
            ("image_sum", 1e-8, Upper, Divide),
        ],
        ExperimentId::EjFluct => &[("ej", 1e-6, Upper, Divide), ("current_transport", 1e-8, Upper, Divide)],
        ExperimentId::EntropyScan => &[
            ("vacuum_log_r2", 0.995, Lower, Gap),
            ("thermal_linear_r2", 0.99, Lower, Gap),
            ("purity", 1e-8, Upper, Divide),
        ],
        ExperimentId::ChargeScaling => &[
            ("log_r2", 0.999, Lower, Gap),
            ("log_exponent", 0.1, Upper, Divide),
            ("exponent", 0.1, Upper, Divide),
            ("lattice", 0.03, Upper, Divide),
            ("global_limit", 1e-6, Upper, Divide),
            ("total_charge", 1e-7, Upper, Divide),
        ],
        ExperimentId::Unruh => &[
            ("balance", 1e-3, Upper, Divide),
            ("control", 0.5, Lower, Fixed),
            ("kms", 1e-10, Upper, Divide),
            ("boost", 1e-10, Upper, Divide),
        ],
        ExperimentId::Crossing => &[
            ("cauchy_riemann", 1e-8, Upper, Divide),
            ("involution", 1e-8, Upper, Divide),
            ("crossing", 1e-6, Upper, Divide),
            ("hermiticity", 1e-12, Upper, Divide),
            ("kms", 1e-6, Upper, Divide),
            ("kms_swap", 1e-10, Upper, Divide),
            ("crossing_kms_ratio", 10.0, Upper, Fixed),
        ],
        ExperimentId::ZfAlgebra => &[
            ("smatrix", 1e-12, Upper, Divide),
            ("exchange", 1e-10, Upper, Divide),
            ("associativity", 1e-10, Upper, Divide),
            ("double_exchange", 1e-12, Upper, Divide),
            ("truncation", 1e-8, Upper, Divide),
            ("ccr", 1e-12, Upper, Divide),
        ],
    }
}

/// Resolved tolerance set of one experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct Tolerances {
    pub experiment: ExperimentId,
    pub overrides: BTreeMap<String, f64>,
}

impl Tolerances {
    pub fn new(experiment: ExperimentId, overrides: BTreeMap<String, f64>) -> Result<Self> {
        let known = tolerance_defaults(experiment);
        for (k, v) in &overrides {
            if !known.iter().any(|d| d.0 == k) {
                let names: Vec<&str> = known.iter().map(|d| d.0).collect();
                return Err(Error::Config(format!(
                    "tolerances.{k}: unknown check for `{experiment}` (known: {})",
                    names.join(", ")
                )));
            }
            if !(v.is_finite() && *v > 0.0) {
                return Err(Error::Config(format!("tolerances.{k}: must be finite and positive, got {v}")));
            }
        }
        Ok(Self { experiment, overrides })
    }

    pub fn defaults(experiment: ExperimentId) -> Self {
        Self {
            experiment,
            overrides: BTreeMap::new(),
        }
    }

    /// Effective tolerance and comparison for `key`.
    pub fn resolve(&self, key: &str, strict: bool) -> (f64, Bound) {
        let &(_, default, bound, strictness) = tolerance_defaults(self.experiment)
            .iter()
            .find(|d| d.0 == key)
            .unwrap_or_else(|| panic!("no tolerance key `{key}` for `{}`", self.experiment));
        let t = self.overrides.get(key).copied().unwrap_or(default);
        let t = match (strict, strictness) {
            (false, _) | (true, Strictness::Fixed) => t,
            (true, Strictness::Divide) => t / 10.0,
            (true, Strictness::Gap) => 1.0 - (1.0 - t) / 10.0,
        };
        (t, bound)
    }
}

/// Parameters of one experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Params {
    ThermalMap(ThermalMapParams),
    EjFluct(EjParams),
    EntropyScan(EntropyParams),
    ChargeScaling(ChargeParams),
    Unruh(UnruhParams),
    Crossing(CrossingParams),
    ZfAlgebra(ZfParams),
}

fn parse_block<T: DeserializeOwned>(id: ExperimentId, value: &serde_json::Value) -> Result<T> {
    serde_json::from_value(value.clone()).map_err(|e| Error::Config(format!("[params] for `{id}`: {e}")))
}

impl Params {
    pub fn parse(id: ExperimentId, value: &serde_json::Value) -> Result<Self> {
        let p = match id {
            ExperimentId::ThermalMap => Self::ThermalMap(parse_block(id, value)?),
            ExperimentId::EjFluct => Self::EjFluct(parse_block(id, value)?),
            ExperimentId::EntropyScan => Self::EntropyScan(parse_block(id, value)?),
            ExperimentId::ChargeScaling => Self::ChargeScaling(parse_block(id, value)?),
            ExperimentId::Unruh => Self::Unruh(parse_block(id, value)?),
            ExperimentId::Crossing => Self::Crossing(parse_block(id, value)?),
            ExperimentId::ZfAlgebra => Self::ZfAlgebra(parse_block(id, value)?),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn default_for(id: ExperimentId) -> Self {
        match id {
            ExperimentId::ThermalMap => Self::ThermalMap(ThermalMapParams::default()),
            ExperimentId::EjFluct => Self::EjFluct(EjParams::default()),
            ExperimentId::EntropyScan => Self::EntropyScan(EntropyParams::default()),
            ExperimentId::ChargeScaling => Self::ChargeScaling(ChargeParams::default()),
            ExperimentId::Unruh => Self::Unruh(UnruhParams::default()),
            ExperimentId::Crossing => Self::Crossing(CrossingParams::default()),
            ExperimentId::ZfAlgebra => Self::ZfAlgebra(ZfParams::default()),
        }
    }

    pub fn id(&self) -> ExperimentId {
        match self {
            Self::ThermalMap(_) => ExperimentId::ThermalMap,
            Self::EjFluct(_) => ExperimentId::EjFluct,
            Self::EntropyScan(_) => ExperimentId::EntropyScan,
            Self::ChargeScaling(_) => ExperimentId::ChargeScaling,
            Self::Unruh(_) => ExperimentId::Unruh,
            Self::Crossing(_) => ExperimentId::Crossing,
            Self::ZfAlgebra(_) => ExperimentId::ZfAlgebra,
        }
    }

    /// Range checks beyond what the types enforce.
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::ThermalMap(p) => {
                positive_all("betas", &p.betas)?;
                interval("interval", p.interval)?;
                at_least("grid_points", p.grid_points, 2)
            }
            Self::EjFluct(p) => {
                positive("beta", p.beta)?;
                interval("interval", p.interval)?;
                if p.geometries.is_empty() {
                    return Err(Error::Config("geometries: at least one smearing geometry is required".into()));
                }
                for (i, g) in p.geometries.iter().enumerate() {
                    positive(&format!("geometries[{i}].plateau_halfwidth"), g.plateau_halfwidth)?;
                    positive(&format!("geometries[{i}].ramp_width"), g.ramp_width)?;
                    let reach = g.plateau_halfwidth + g.ramp_width;
                    if !(g.center - reach > p.interval[0] && g.center + reach < p.interval[1]) {
                        return Err(Error::Config(format!("geometries[{i}]: support leaves the interval {:?}", p.interval)));
                    }
                }
                Ok(())
            }
            Self::EntropyScan(p) => {
                at_least("n_sites", p.n_sites, 16)?;
                positive("ir_product", p.ir_product)?;
                positive("thermal_beta", p.thermal_beta)?;
                positive("purity_mass", p.purity_mass)?;
                at_least("vacuum_lengths (count)", p.vacuum_lengths.len(), 4)?;
                at_least("thermal_lengths (count)", p.thermal_lengths.len(), 4)?;
                for (name, v) in [("vacuum_lengths", &p.vacuum_lengths), ("thermal_lengths", &p.thermal_lengths)] {
                    if v.iter().any(|&l| l == 0 || l >= p.n_sites) {
                        return Err(Error::Config(format!("{name}: lengths must lie in 1..n_sites")));
                    }
                }
                if p.purity_sites.iter().any(|&n| n < 2) {
                    return Err(Error::Config("purity_sites: chains need at least 2 sites".into()));
                }
                Ok(())
            }
            Self::ChargeScaling(p) => {
                positive("mass", p.mass)?;
                positive("radius", p.radius)?;
                positive("tau", p.tau)?;
                if !(p.ratio_min > 1.0 && p.ratio_max > p.ratio_min) {
                    return Err(Error::Config("ratio_min, ratio_max: need 1 < ratio_min < ratio_max".into()));
                }
                at_least("ratio_points", p.ratio_points, 6)?;
                for &n in p.dims.iter().chain(&p.global.dims) {
                    if !(2..=4).contains(&n) {
                        return Err(Error::Config(format!("dims: spacetime dimension must be 2, 3 or 4, got {n}")));
                    }
                }
                at_least("lattice.sites", p.lattice.sites, 16)?;
                positive("lattice.spacing", p.lattice.spacing)?;
                positive("lattice.mass", p.lattice.mass)?;
                for (i, g) in p.lattice.geometries.iter().enumerate() {
                    positive_all(&format!("lattice.geometries[{i}]"), g)?;
                    if g[0] + g[1] >= 0.5 * p.lattice.sites as f64 * p.lattice.spacing {
                        return Err(Error::Config(format!("lattice.geometries[{i}]: support does not fit the chain")));
                    }
                }
                positive("global.mass", p.global.mass)?;
                positive("global.p_max", p.global.p_max)?;
                positive("global.t_width", p.global.t_width)?;
                positive("global.dr", p.global.dr)?;
                positive_all("global.radii", &p.global.radii)
            }
            Self::Unruh(p) => {
                positive_all("accelerations", &p.accelerations)?;
                at_least("omega_points", p.omega_points, 2)?;
                positive("control_beta_factor", p.control_beta_factor)?;
                if p.control_beta_factor == 1.0 {
                    return Err(Error::Config("control_beta_factor: 1 is the Unruh temperature itself, not a control".into()));
                }
                if p.spacetime_dim != 2 && p.spacetime_dim != 4 {
                    return Err(Error::Config(format!("spacetime_dim: 2 or 4, got {}", p.spacetime_dim)));
                }
                Ok(())
            }
            Self::Crossing(p) => {
                positive("mass", p.mass)?;
                positive("theta_max", p.theta_max)?;
                at_least("grid_points", p.grid_points, 2)?;
                if p.test_functions.is_empty() {
                    return Err(Error::Config("test_functions: at least one is required".into()));
                }
                for (i, f) in p.test_functions.iter().enumerate() {
                    let w = f.build()?;
                    if !w.in_right_wedge() {
                        return Err(Error::Config(format!("test_functions[{i}]: support is not inside the right wedge")));
                    }
                }
                if !p.left_control.build()?.in_left_wedge() {
                    return Err(Error::Config("left_control: support must lie in the left wedge".into()));
                }
                for (name, f) in [("kms.f1", &p.kms.f1), ("kms.f2", &p.kms.f2)] {
                    if !f.build()?.in_right_wedge() {
                        return Err(Error::Config(format!("{name}: support is not inside the right wedge")));
                    }
                }
                positive("kms.theta_max", p.kms.theta_max)?;
                at_least("kms.points", p.kms.points, 3)?;
                at_least("strip.n_theta", p.strip.n_theta, 3)?;
                at_least("strip.n_lambda", p.strip.n_lambda, 3)
            }
            Self::ZfAlgebra(p) => {
                if p.couplings.is_empty() || p.couplings.iter().any(|b| !(*b > 0.0 && *b < PI)) {
                    return Err(Error::Config("couplings: each b must lie in (0, pi)".into()));
                }
                positive("theta_max", p.theta_max)?;
                at_least("grid_points", p.grid_points, 4)?;
                if p.grid_points > 64 {
                    return Err(Error::Config("grid_points: at most 64 (sector tables grow as M^(k_max+1))".into()));
                }
                if !(3..=5).contains(&p.k_max) {
                    return Err(Error::Config(format!("k_max: 3..=5, got {}", p.k_max)));
                }
                if p.packets.len() != 3 {
                    return Err(Error::Config(format!("packets: exactly 3 packets, got {}", p.packets.len())));
                }
                for (i, q) in p.packets.iter().enumerate() {
                    positive(&format!("packets[{i}].width"), q.width)?;
                }
                Ok(())
            }
        }
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::Config(format!("{name}: must be finite and positive, got {v}")))
    }
}

fn positive_all(name: &str, v: &[f64]) -> Result<()> {
    if v.is_empty() {
        return Err(Error::Config(format!("{name}: must not be empty")));
    }
    v.iter().try_for_each(|x| positive(name, *x))
}

fn interval(name: &str, v: [f64; 2]) -> Result<()> {
    if v[0].is_finite() && v[1].is_finite() && v[0] < v[1] {
        Ok(())
    } else {
        Err(Error::Config(format!("{name}: need a < b, got {v:?}")))
    }
}

fn at_least(name: &str, v: usize, min: usize) -> Result<()> {
    if v >= min {
        Ok(())
    } else {
        Err(Error::Config(format!("{name}: at least {min}, got {v}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThermalMapParams {
    pub betas: Vec<f64>,
    pub interval: [f64; 2],
    pub grid_points: usize,
}

impl Default for ThermalMapParams {
    fn default() -> Self {
        Self {
            betas: vec![1.0, 2.0 * PI],
            interval: [-1.0, 2.0],
            grid_points: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Geometry {
    pub center: f64,
    pub plateau_halfwidth: f64,
    pub ramp_width: f64,
    #[serde(default = "smooth_bump")]
    pub profile: Profile,
}

fn smooth_bump() -> Profile {
    Profile::SmoothBump
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EjParams {
    pub beta: f64,
    pub interval: [f64; 2],
    pub geometries: Vec<Geometry>,
}

impl Default for EjParams {
    fn default() -> Self {
        let g = |center, plateau_halfwidth, ramp_width| Geometry {
            center,
            plateau_halfwidth,
            ramp_width,
            profile: Profile::SmoothBump,
        };
        Self {
            beta: 2.0 * PI,
            interval: [-1.0, 2.0],
            geometries: vec![g(0.5, 0.5, 0.3), g(0.5, 0.25, 0.15), g(0.0, 0.3, 0.2)],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntropyParams {
    pub n_sites: usize,
    /// `m_IR · L` of the regulated massless chain.
    pub ir_product: f64,
    pub vacuum_lengths: Vec<usize>,
    pub thermal_beta: f64,
    pub thermal_lengths: Vec<usize>,
    /// Chain sizes on which vacuum purity is checked.
    pub purity_sites: Vec<usize>,
    pub purity_mass: f64,
}

impl Default for EntropyParams {
    fn default() -> Self {
        Self {
            n_sites: 1000,
            ir_product: 1e-3,
            vacuum_lengths: vec![8, 16, 32, 64, 128, 256],
            thermal_beta: 5.0,
            thermal_lengths: vec![40, 80, 120, 160, 200, 240, 280],
            purity_sites: vec![256, 1024, 2048],
            purity_mass: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeParams {
    pub sites: usize,
    pub spacing: f64,
    pub mass: f64,
    /// `[R, ΔR, T]` per geometry.
    pub geometries: Vec<[f64; 3]>,
    #[serde(default = "raised_cosine")]
    pub profile: Profile,
}

fn raised_cosine() -> Profile {
    Profile::RaisedCosine
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GlobalParams {
    /// Spacetime dimensions to run; empty skips the global-limit check.
    pub dims: Vec<u32>,
    pub mass: f64,
    pub p_max: f64,
    pub t_width: f64,
    pub dr: f64,
    pub time_shift: f64,
    pub radii: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChargeParams {
    pub mass: f64,
    pub radius: f64,
    /// Time width in units of `ΔR`.
    pub tau: f64,
    pub ratio_min: f64,
    pub ratio_max: f64,
    pub ratio_points: usize,
    pub dims: Vec<u32>,
    #[serde(default = "smooth_bump")]
    pub profile: Profile,
    pub lattice: LatticeParams,
    pub global: GlobalParams,
}

impl Default for ChargeParams {
    fn default() -> Self {
        Self {
            mass: 1e-6,
            radius: 4.0,
            tau: 0.5,
            ratio_min: 10.0,
            ratio_max: 100.0,
            ratio_points: 8,
            dims: vec![2, 3, 4],
            profile: Profile::SmoothBump,
            lattice: LatticeParams {
                sites: 512,
                spacing: 0.05,
                mass: 1.0,
                geometries: vec![
                    [4.0, 0.4, 0.2],
                    [4.0, 0.8, 0.4],
                    [3.0, 0.5, 0.25],
                    [2.0, 1.0, 0.3],
                    [4.0, 0.4, 0.1],
                ],
                profile: Profile::RaisedCosine,
            },
            global: GlobalParams {
                dims: vec![2],
                mass: 1.0,
                p_max: 2.0,
                t_width: 0.1,
                dr: 0.5,
                time_shift: 0.5,
                radii: vec![2.0, 4.0, 8.0, 16.0, 32.0],
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnruhParams {
    pub accelerations: Vec<f64>,
    /// Frequencies per acceleration, spread over `[0.5, 3]·a`.
    pub omega_points: usize,
    /// Negative control at `β = factor · 2π/a`.
    pub control_beta_factor: f64,
    pub spacetime_dim: u32,
}

impl Default for UnruhParams {
    fn default() -> Self {
        Self {
            accelerations: vec![0.5, 1.0, 2.0],
            omega_points: 11,
            control_beta_factor: 0.5,
            spacetime_dim: 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TestFnParams {
    /// `[x⁰, x¹]`.
    pub center: [f64; 2],
    pub radius: f64,
    #[serde(default)]
    pub modulation: f64,
}

impl TestFnParams {
    pub fn build(&self) -> Result<crate::crossing::WedgeTestFn> {
        Ok(crate::crossing::WedgeTestFn::new((self.center[0], self.center[1]), self.radius)?.modulated(self.modulation))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KmsParams {
    pub f1: TestFnParams,
    pub f2: TestFnParams,
    pub theta_max: f64,
    pub points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StripParams {
    pub theta_max: f64,
    pub n_theta: usize,
    pub n_lambda: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrossingParams {
    pub mass: f64,
    pub theta_max: f64,
    pub grid_points: usize,
    pub test_functions: Vec<TestFnParams>,
    pub left_control: TestFnParams,
    pub kms: KmsParams,
    pub strip: StripParams,
}

impl Default for CrossingParams {
    fn default() -> Self {
        let f = |c0, c1, radius| TestFnParams {
            center: [c0, c1],
            radius,
            modulation: 0.0,
        };
        Self {
            mass: 1.0,
            theta_max: 2.0,
            grid_points: 20,
            test_functions: vec![f(0.2, 2.0, 0.8), f(-0.5, 3.0, 1.0), f(0.0, 1.5, 0.4)],
            left_control: f(0.2, -2.0, 0.8),
            kms: KmsParams {
                f1: f(0.0, 2.5, 0.6),
                f2: f(0.3, 3.0, 0.6),
                theta_max: 3.0,
                points: 31,
            },
            strip: StripParams {
                theta_max: 2.0,
                n_theta: 21,
                n_lambda: 9,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PacketParams {
    pub center: f64,
    pub width: f64,
    #[serde(default)]
    pub momentum: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZfParams {
    pub couplings: Vec<f64>,
    pub theta_max: f64,
    pub grid_points: usize,
    pub k_max: usize,
    pub packets: Vec<PacketParams>,
}

impl Default for ZfParams {
    fn default() -> Self {
        let p = |center, width, momentum| PacketParams { center, width, momentum };
        Self {
            couplings: vec![0.3, 1.0, 2.5],
            theta_max: 4.0,
            grid_points: 24,
            k_max: 4,
            packets: vec![p(0.2, 0.8, 0.0), p(-0.3, 0.6, 1.5), p(0.5, 0.6, -0.4)],
        }
    }
}
