//! Run configuration: a flat TOML or JSON document, optionally layered with
//! command-line overrides.

use serde::de::{self, MapAccess, Visitor};
use serde::{Deserialize, Deserializer, Serialize};
use serde_json::{Map, Value};
use std::fmt;
use std::path::PathBuf;

use sbp_core::functional::Params;
use sbp_core::solver::{GridSpec, Method, SeedProfile, SolverConfig};
use sbp_core::verify::SuiteConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Solve,
    SweepA,
    Verify,
    Probe,
    GridStudy,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Solve => "solve",
            Command::SweepA => "sweep-a",
            Command::Verify => "verify",
            Command::Probe => "probe",
            Command::GridStudy => "grid-study",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepMode {
    /// Full solutions at every `a`, against the Schrödinger–Poisson solution.
    Solution,
    /// Potentials of the fixed source `e^{−r²}`.
    FixedSource,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeKind {
    FourierIdentity,
    PohozaevForms,
    NonexistenceHighP,
    NonexistenceLowP,
    KernelBracket,
    MpGeometry,
    Truncation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    #[serde(default = "one")]
    pub a: f64,
    #[serde(default = "one")]
    pub omega: f64,
    #[serde(default = "one")]
    pub q: f64,
    #[serde(default = "default_p")]
    pub p: f64,
    #[serde(default = "default_method")]
    pub method: Method,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default = "default_grad_tol")]
    pub grad_tol: f64,
    #[serde(default = "default_step")]
    pub step: f64,
    #[serde(default = "one")]
    pub damping: f64,
    /// Width of the Gaussian seed profile.
    #[serde(default = "one")]
    pub seed_width: f64,
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default = "default_r_max")]
    pub r_max: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default = "default_a_values")]
    pub a_values: Vec<f64>,
    #[serde(default = "default_sweep_mode")]
    pub sweep_mode: SweepMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probe: Option<ProbeKind>,
    /// Seeded random profiles probed in addition to `e^{−r²/2}`.
    #[serde(default)]
    pub random_profiles: usize,
    #[serde(default = "one")]
    pub t_bound: f64,
    #[serde(default = "default_identity_profiles")]
    pub identity_profiles: usize,
    #[serde(default = "default_sign_profiles")]
    pub sign_profiles: usize,
    #[serde(default = "default_bracket_samples")]
    pub bracket_samples: usize,
    /// The command a grid study repeats at `N` and `2N`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub study: Option<Command>,
    #[serde(default = "default_order")]
    pub richardson_order: f64,
}

fn one() -> f64 {
    1.0
}
fn default_p() -> f64 {
    5.0
}
fn default_method() -> Method {
    Method::NehariDescent
}
fn default_max_iter() -> usize {
    SolverConfig::default().max_iter
}
fn default_grad_tol() -> f64 {
    SolverConfig::default().grad_tol
}
fn default_step() -> f64 {
    SolverConfig::default().step
}
fn default_n() -> usize {
    GridSpec::default().n
}
fn default_r_max() -> f64 {
    GridSpec::default().r_max
}
fn default_a_values() -> Vec<f64> {
    vec![0.5, 0.2, 0.1, 0.05]
}
fn default_sweep_mode() -> SweepMode {
    SweepMode::Solution
}
fn default_identity_profiles() -> usize {
    SuiteConfig::default().identity_profiles
}
fn default_sign_profiles() -> usize {
    SuiteConfig::default().sign_profiles
}
fn default_bracket_samples() -> usize {
    SuiteConfig::default().bracket_samples
}
fn default_order() -> f64 {
    2.0
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot parse configuration: {0}")]
    Syntax(String),
    #[error("duplicate key `{0}`")]
    Duplicate(String),
    #[error("key `{key}`: {reason}")]
    Key { key: String, reason: String },
    #[error("{0}")]
    Other(String),
}

fn invalid(key: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Key { key: key.to_string(), reason: reason.into() }
}

/// A JSON object that refuses repeated keys.
struct UniqueMap(Map<String, Value>);

impl<'de> Deserialize<'de> for UniqueMap {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = UniqueMap;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a flat object of configuration keys")
            }
            fn visit_map<A: MapAccess<'de>>(self, mut access: A) -> Result<UniqueMap, A::Error> {
                let mut map = Map::new();
                while let Some((k, v)) = access.next_entry::<String, Value>()? {
                    if map.contains_key(&k) {
                        return Err(de::Error::custom(format!("duplicate key `{k}`")));
                    }
                    map.insert(k, v);
                }
                Ok(UniqueMap(map))
            }
        }
        d.deserialize_map(V)
    }
}

fn duplicate_from(msg: &str) -> Option<String> {
    let start = msg.find("duplicate key `")? + "duplicate key `".len();
    let len = msg[start..].find('`')?;
    Some(msg[start..start + len].to_string())
}

/// Parse a configuration document into its raw key/value table. JSON is
/// recognised by a leading `{`; anything else is read as TOML.
pub fn parse_table(text: &str) -> Result<Map<String, Value>, ConfigError> {
    let syntax = |msg: String| match duplicate_from(&msg) {
        Some(key) => ConfigError::Duplicate(key),
        None => ConfigError::Syntax(msg),
    };
    if text.trim_start().starts_with('{') {
        serde_json::from_str::<UniqueMap>(text).map(|m| m.0).map_err(|e| syntax(e.to_string()))
    } else {
        let table: toml::Table = toml::from_str(text).map_err(|e| {
            let key = e.span().filter(|_| e.message().starts_with("duplicate key")).map(|s| text[s].trim());
            match key {
                Some(k) if !k.is_empty() => ConfigError::Duplicate(k.trim_matches('"').to_string()),
                _ => syntax(e.to_string()),
            }
        })?;
        match serde_json::to_value(table).map_err(|e| ConfigError::Syntax(e.to_string()))? {
            Value::Object(map) => Ok(map),
            _ => Err(ConfigError::Syntax("expected a table".into())),
        }
    }
}

/// Build and validate a configuration from a raw table.
pub fn from_table(table: Map<String, Value>) -> Result<RunConfig, ConfigError> {
    let cfg: RunConfig = serde_path_to_error::deserialize(Value::Object(table)).map_err(|e| {
        let key = e.path().to_string();
        let reason = e.into_inner().to_string();
        if key == "." {
            ConfigError::Other(reason)
        } else {
            invalid(&key, reason)
        }
    })?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    from_table(parse_table(text)?)
}

impl RunConfig {
    pub fn params(&self) -> Params {
        Params { a: self.a, omega: self.omega, q: self.q, p: self.p }
    }

    pub fn solver(&self) -> SolverConfig {
        SolverConfig {
            method: self.method,
            max_iter: self.max_iter,
            grad_tol: self.grad_tol,
            step: self.step,
            damping: self.damping,
            seed_profile: SeedProfile::Gaussian { width: self.seed_width },
            grid: GridSpec { n: self.n, r_max: self.r_max },
            ..SolverConfig::default()
        }
    }

    pub fn suite(&self) -> SuiteConfig {
        SuiteConfig {
            seed: self.seed,
            identity_profiles: self.identity_profiles,
            sign_profiles: self.sign_profiles,
            bracket_samples: self.bracket_samples,
        }
    }

    /// The command whose numerics this run exercises (the studied one for a grid study).
    pub fn effective_command(&self) -> Command {
        match self.command {
            Command::GridStudy => self.study.unwrap_or(Command::Solve),
            c => c,
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes to TOML")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        for (key, v) in [("a", self.a), ("omega", self.omega), ("r_max", self.r_max), ("seed_width", self.seed_width)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(invalid(key, format!("must be > 0, got {v}")));
            }
        }
        if !(self.q.is_finite() && self.q >= 0.0) {
            return Err(invalid("q", format!("must be >= 0, got {}", self.q)));
        }
        if !(self.t_bound.is_finite() && self.t_bound > 0.0) {
            return Err(invalid("t_bound", format!("must be > 0, got {}", self.t_bound)));
        }
        if !(self.richardson_order.is_finite() && self.richardson_order > 0.0) {
            return Err(invalid("richardson_order", format!("must be > 0, got {}", self.richardson_order)));
        }
        if self.n < sbp_core::radial::MIN_NODES {
            return Err(invalid("n", format!("need at least {} nodes, got {}", sbp_core::radial::MIN_NODES, self.n)));
        }
        self.solver().validate().map_err(|e| invalid("solver", e.to_string()))?;
        if self.study == Some(Command::GridStudy) {
            return Err(invalid("study", "a grid study cannot study itself"));
        }
        if self.command != Command::GridStudy && self.study.is_some() {
            return Err(invalid("study", "only meaningful for grid-study"));
        }
        match self.effective_command() {
            Command::Solve | Command::SweepA => {
                if !(self.p > 2.0 && self.p < 6.0) {
                    return Err(invalid("p", format!("p out of (2,6): {}", self.p)));
                }
            }
            Command::Probe => {
                if !(self.p.is_finite() && self.p > 1.0) {
                    return Err(invalid("p", format!("p must be > 1, got {}", self.p)));
                }
                if self.probe.is_none() {
                    return Err(invalid("probe", "the probe command needs a probe name"));
                }
            }
            Command::Verify | Command::GridStudy => {}
        }
        if self.effective_command() == Command::SweepA {
            if self.a_values.is_empty() {
                return Err(invalid("a_values", "needs at least one value"));
            }
            if self.a_values.iter().any(|a| !(a.is_finite() && *a > 0.0)) {
                return Err(invalid("a_values", "values must be positive"));
            }
            if !self.a_values.windows(2).all(|w| w[1] < w[0]) {
                return Err(invalid("a_values", "values must be strictly decreasing"));
            }
        }
        Ok(())
    }
}
