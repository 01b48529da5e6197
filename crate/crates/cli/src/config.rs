//! Run configuration: one TOML file per run, every parameter defaulted to
//! the reference sweep.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config: {0}")]
    Io(#[from] std::io::Error),
    #[error("config does not parse: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("schema error in `{field}`: {reason}")]
    Schema { field: String, reason: String },
    #[error("resource budget: {0}")]
    Budget(String),
}

fn schema(field: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Schema { field: field.into(), reason: reason.into() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    BesselCheck,
    MultiplierResidual,
    OracleCrosscheck,
    PacketSweep,
    RadialBlowup,
    TailDecay,
    FioSlope,
    Regions,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::BesselCheck => "bessel-check",
            Experiment::MultiplierResidual => "multiplier-residual",
            Experiment::OracleCrosscheck => "oracle-crosscheck",
            Experiment::PacketSweep => "packet-sweep",
            Experiment::RadialBlowup => "radial-blowup",
            Experiment::TailDecay => "tail-decay",
            Experiment::FioSlope => "fio-slope",
            Experiment::Regions => "regions",
        }
    }

    /// Criteria an experiment can judge.
    pub fn criteria(self) -> &'static [&'static str] {
        match self {
            Experiment::BesselCheck => &["bessel-order"],
            Experiment::MultiplierResidual => &["residual-decay"],
            Experiment::OracleCrosscheck => &["oracle-l2"],
            Experiment::PacketSweep => &["packet-onslab-slope", "packet-lhs-slope", "packet-sobolev-slope", "packet-gap"],
            Experiment::RadialBlowup => &["blowup-slope", "blowup-doubling", "blowup-aperture"],
            Experiment::TailDecay => &["tail-slope"],
            Experiment::FioSlope => &["fio-slope"],
            Experiment::Regions => &["regions-worked-points", "regions-sharp-n2", "regions-inclusion"],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub experiment: Experiment,
    #[serde(default)]
    pub seed: u64,
    /// Worker threads; 0 lets the pool decide.
    #[serde(default)]
    pub threads: usize,
    /// Largest grid, in points, any step may allocate.
    #[serde(default = "default_max_points")]
    pub max_points: u64,
    /// Criteria to judge; empty means all of the experiment's.
    #[serde(default)]
    pub criteria: Vec<String>,
    #[serde(default)]
    pub bessel: BesselParams,
    #[serde(default)]
    pub multiplier: MultiplierParams,
    #[serde(default)]
    pub oracle: OracleParams,
    #[serde(default)]
    pub packet: PacketParams,
    #[serde(default)]
    pub blowup: BlowupParams,
    #[serde(default)]
    pub tail: TailParams,
    #[serde(default)]
    pub fio: FioParams,
    #[serde(default)]
    pub regions: RegionsParams,
}

fn default_max_points() -> u64 {
    1 << 25
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BesselParams {
    /// Orders as `[re, im]`.
    pub orders: Vec<[f64; 2]>,
    pub terms: Vec<usize>,
    pub r_min: f64,
    pub r_max: f64,
    pub points: usize,
    pub slack: f64,
}

impl Default for BesselParams {
    fn default() -> Self {
        BesselParams {
            orders: vec![[0.0, 0.0], [0.5, 0.0], [1.0, 0.0], [1.5, 0.0], [0.5, 0.5]],
            terms: (1..=6).collect(),
            r_min: 8.0,
            r_max: 256.0,
            points: 16,
            slack: 0.15,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MultiplierCase {
    pub n: usize,
    pub alpha: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MultiplierParams {
    pub cases: Vec<MultiplierCase>,
    pub terms: Vec<usize>,
    pub rho_max: f64,
    pub points: usize,
    pub slack: f64,
}

impl Default for MultiplierParams {
    fn default() -> Self {
        MultiplierParams {
            cases: vec![
                MultiplierCase { n: 2, alpha: 0.0 },
                MultiplierCase { n: 2, alpha: 0.3 },
                MultiplierCase { n: 3, alpha: 0.0 },
            ],
            terms: vec![1, 3],
            rho_max: 4096.0,
            points: 20,
            slack: 0.15,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OracleParams {
    pub alphas: Vec<f64>,
    pub times: Vec<f64>,
    pub fields: Vec<String>,
    pub length: f64,
    pub m: usize,
    pub tolerance: f64,
}

pub const ORACLE_FIELDS: [&str; 3] = ["gaussian", "two-bumps", "modulated"];

impl Default for OracleParams {
    fn default() -> Self {
        OracleParams {
            alphas: vec![1.0, 2.0],
            times: vec![0.5, 1.25],
            fields: ORACLE_FIELDS.iter().map(|s| s.to_string()).collect(),
            length: 8.0,
            m: 1024,
            tolerance: 1e-3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PacketParams {
    pub n: usize,
    pub p: f64,
    pub s: f64,
    pub delta: f64,
    pub j_min: u32,
    pub j_max: u32,
    pub length: f64,
    /// Order and term count of the symbols `a_1, a_2`.
    pub alpha: f64,
    pub terms: usize,
    pub slope_tolerance: f64,
    pub gap_tolerance: f64,
}

impl Default for PacketParams {
    fn default() -> Self {
        PacketParams {
            n: 2,
            p: 4.0,
            s: 0.0,
            delta: 0.1,
            j_min: 5,
            j_max: 10,
            length: 8.0,
            alpha: 0.0,
            terms: 2,
            slope_tolerance: 0.1,
            gap_tolerance: 0.15,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BlowupParams {
    pub n: usize,
    pub betas: Vec<f64>,
    pub length: f64,
    /// Base lattice size; the doubling check also runs `2m`.
    pub m: usize,
    pub aperture: f64,
    /// Aperture compared against `aperture` for the invariance check.
    pub aperture_halved: f64,
    pub samples: usize,
    pub eps_max: f64,
    pub slope_tolerance: f64,
    pub doubling_tolerance: f64,
    pub aperture_tolerance: f64,
}

impl Default for BlowupParams {
    fn default() -> Self {
        BlowupParams {
            n: 2,
            betas: vec![1.1, 1.2],
            length: 2.5,
            m: 32768,
            aperture: 0.25,
            aperture_halved: 0.125,
            samples: 25,
            eps_max: 0.2,
            slope_tolerance: 0.1,
            doubling_tolerance: 0.05,
            aperture_tolerance: 0.02,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TailParams {
    pub exponents: Vec<f64>,
    pub tau_min: f64,
    pub tau_max: f64,
    pub points: usize,
    pub cutoff_m: f64,
    pub tolerance: f64,
}

impl Default for TailParams {
    fn default() -> Self {
        let (lo, hi) = sphermax::analysis::TAIL_TAU_RANGE;
        TailParams {
            exponents: vec![-0.3, -0.5, -0.7, -1.2],
            tau_min: lo,
            tau_max: hi,
            points: 11,
            cutoff_m: 1.0,
            tolerance: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FioParams {
    pub n: usize,
    pub p: f64,
    pub length: f64,
    pub m: usize,
    pub j_min: i32,
    pub j_max: i32,
    pub draws: usize,
    pub cutoff_m: f64,
    pub slack: f64,
}

impl Default for FioParams {
    fn default() -> Self {
        FioParams {
            n: 2,
            p: 6.0,
            length: 1.0,
            m: 2048,
            j_min: 4,
            j_max: 9,
            draws: 20,
            cutoff_m: 1.0,
            slack: 0.15,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RegionsParams {
    pub dims: Vec<usize>,
    pub p_points: usize,
    pub p_max: f64,
}

impl Default for RegionsParams {
    fn default() -> Self {
        RegionsParams { dims: vec![2, 3, 4], p_points: 100, p_max: 12.0 }
    }
}

fn power_of_two(field: &str, m: usize) -> Result<(), ConfigError> {
    if m < 2 || !m.is_power_of_two() {
        return Err(schema(field, format!("must be a power of two, got {m}")));
    }
    Ok(())
}

fn positive(field: &str, v: f64) -> Result<(), ConfigError> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(schema(field, format!("must be positive and finite, got {v}")));
    }
    Ok(())
}

fn nonempty<T>(field: &str, v: &[T]) -> Result<(), ConfigError> {
    if v.is_empty() {
        return Err(schema(field, "must not be empty"));
    }
    Ok(())
}

fn dimension(field: &str, n: usize) -> Result<(), ConfigError> {
    if !(2..=4).contains(&n) {
        return Err(schema(field, format!("dimension must be 2, 3 or 4, got {n}")));
    }
    Ok(())
}

fn budget(points: u64, max: u64, what: &str) -> Result<(), ConfigError> {
    if points > max {
        return Err(ConfigError::Budget(format!("{what} needs {points} points, max_points is {max}")));
    }
    Ok(())
}

impl Config {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: Config = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self, ConfigError> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn new(experiment: Experiment) -> Self {
        Config {
            experiment,
            seed: 0,
            threads: 0,
            max_points: default_max_points(),
            criteria: Vec::new(),
            bessel: Default::default(),
            multiplier: Default::default(),
            oracle: Default::default(),
            packet: Default::default(),
            blowup: Default::default(),
            tail: Default::default(),
            fio: Default::default(),
            regions: Default::default(),
        }
    }

    /// Criteria to judge, in the experiment's declared order.
    pub fn active_criteria(&self) -> Vec<&'static str> {
        let all = self.experiment.criteria();
        if self.criteria.is_empty() {
            return all.to_vec();
        }
        all.iter().copied().filter(|c| self.criteria.iter().any(|s| s == c)).collect()
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let known = self.experiment.criteria();
        for c in &self.criteria {
            if !known.contains(&c.as_str()) {
                return Err(schema("criteria", format!("`{c}` is not a criterion of {}", self.experiment.name())));
            }
        }
        match self.experiment {
            Experiment::BesselCheck => {
                let b = &self.bessel;
                nonempty("bessel.orders", &b.orders)?;
                nonempty("bessel.terms", &b.terms)?;
                if b.terms.iter().any(|&t| t == 0 || t > 12) {
                    return Err(schema("bessel.terms", "term counts must lie in 1..=12"));
                }
                positive("bessel.r_min", b.r_min)?;
                if !(b.r_max > b.r_min) {
                    return Err(schema("bessel.r_max", "must exceed r_min"));
                }
                if b.points < 3 {
                    return Err(schema("bessel.points", "need at least 3"));
                }
            }
            Experiment::MultiplierResidual => {
                let m = &self.multiplier;
                nonempty("multiplier.cases", &m.cases)?;
                nonempty("multiplier.terms", &m.terms)?;
                for c in &m.cases {
                    dimension("multiplier.cases.n", c.n)?;
                }
                positive("multiplier.rho_max", m.rho_max)?;
                if m.points < 3 {
                    return Err(schema("multiplier.points", "need at least 3"));
                }
            }
            Experiment::OracleCrosscheck => {
                let o = &self.oracle;
                power_of_two("oracle.m", o.m)?;
                positive("oracle.length", o.length)?;
                nonempty("oracle.alphas", &o.alphas)?;
                nonempty("oracle.times", &o.times)?;
                for f in &o.fields {
                    if !ORACLE_FIELDS.contains(&f.as_str()) {
                        return Err(schema("oracle.fields", format!("unknown field `{f}`")));
                    }
                }
                budget((o.m as u64).pow(2), self.max_points, "oracle grid")?;
            }
            Experiment::PacketSweep => {
                let p = &self.packet;
                dimension("packet.n", p.n)?;
                if !(p.p >= 1.0) {
                    return Err(schema("packet.p", "must be at least 1"));
                }
                if !(p.delta > 0.0 && p.delta <= 1.0) {
                    return Err(schema("packet.delta", "must lie in (0, 1]"));
                }
                if p.j_min < 1 || p.j_max < p.j_min + 2 {
                    return Err(schema("packet.j_max", "need j_min >= 1 and at least three scales"));
                }
                positive("packet.length", p.length)?;
            }
            Experiment::RadialBlowup => {
                let b = &self.blowup;
                dimension("blowup.n", b.n)?;
                power_of_two("blowup.m", b.m)?;
                nonempty("blowup.betas", &b.betas)?;
                positive("blowup.length", b.length)?;
                for (f, a) in [("blowup.aperture", b.aperture), ("blowup.aperture_halved", b.aperture_halved)] {
                    if !(a > 0.0 && a <= 0.25) {
                        return Err(schema(f, "must lie in (0, 1/4]"));
                    }
                }
            }
            Experiment::TailDecay => {
                let t = &self.tail;
                nonempty("tail.exponents", &t.exponents)?;
                positive("tail.tau_min", t.tau_min)?;
                if !(t.tau_max > t.tau_min) {
                    return Err(schema("tail.tau_max", "must exceed tau_min"));
                }
                positive("tail.cutoff_m", t.cutoff_m)?;
            }
            Experiment::FioSlope => {
                let f = &self.fio;
                dimension("fio.n", f.n)?;
                power_of_two("fio.m", f.m)?;
                positive("fio.length", f.length)?;
                if f.draws == 0 {
                    return Err(schema("fio.draws", "need at least one draw"));
                }
                if f.j_max < f.j_min + 2 {
                    return Err(schema("fio.j_max", "need at least three scales"));
                }
                budget((f.m as u64).pow(f.n as u32), self.max_points, "fio grid")?;
            }
            Experiment::Regions => {
                nonempty("regions.dims", &self.regions.dims)?;
                if self.regions.dims.iter().any(|&n| n < 2) {
                    return Err(schema("regions.dims", "dimensions must be at least 2"));
                }
                if self.regions.p_points < 2 {
                    return Err(schema("regions.p_points", "need at least 2"));
                }
                if !(self.regions.p_max > 2.0) {
                    return Err(schema("regions.p_max", "must exceed 2"));
                }
            }
        }
        Ok(())
    }
}
