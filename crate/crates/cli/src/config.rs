//! Flat `key = value` configuration with line-addressable errors.
//!
//! Every parameter is scalar or a comma-separated list; `#` starts a
//! comment; unknown keys are rejected. Absent keys take the documented
//! defaults (512-cell grid, cutoff 1e−9, phase cutoff 1e−3, relaxation
//! 0.7, error target 1e−4, controller safety 0.9).

use skm_core::experiments::SweepAxis;
use skm_core::integrator::StepperParams;
use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

#[derive(Debug, Clone, PartialEq)]
pub enum ConfigError {
    Syntax {
        line: usize,
        msg: String,
    },
    UnknownKey {
        line: usize,
        key: String,
    },
    DuplicateKey {
        line: usize,
        key: String,
    },
    Type {
        line: usize,
        key: String,
        expected: &'static str,
        got: String,
    },
    Range {
        line: usize,
        key: String,
        msg: String,
    },
    /// Cross-key validation failure (no single line to point at).
    Semantic(String),
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Syntax { line, msg } => write!(f, "line {line}: {msg}"),
            ConfigError::UnknownKey { line, key } => write!(f, "line {line}: unknown key `{key}`"),
            ConfigError::DuplicateKey { line, key } => {
                write!(f, "line {line}: duplicate key `{key}`")
            }
            ConfigError::Type {
                line,
                key,
                expected,
                got,
            } => {
                write!(
                    f,
                    "line {line}: key `{key}` expects {expected}, got `{got}`"
                )
            }
            ConfigError::Range { line, key, msg } => {
                write!(f, "line {line}: key `{key}`: {msg}")
            }
            ConfigError::Semantic(msg) => write!(f, "{msg}"),
        }
    }
}

impl std::error::Error for ConfigError {}

/// Which bound family the run is judged against (and the default ν).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioName {
    Homogeneous,
    Heterogeneous,
}

/// An initial-data / frequency profile, possibly a table file to load.
#[derive(Debug, Clone, PartialEq)]
pub enum ProfileSpec {
    Sin,
    Cos,
    Zero,
    Constant(f64),
    TableFile(PathBuf),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelModeName {
    PointwiseCutoff,
    CellAverage,
    Mollifier,
}

/// Fully validated configuration with defaults applied.
#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub scenario: ScenarioName,
    pub n: usize,
    pub alpha: f64,
    pub beta: f64,
    pub kappa: f64,
    pub t_end: f64,
    pub theta_init: ProfileSpec,
    pub nu: ProfileSpec,
    pub kernel_mode: KernelModeName,
    pub cutoff_eps: f64,
    pub phase_delta: f64,
    pub picard_omega: f64,
    pub picard_tol: f64,
    pub picard_max_iter: usize,
    pub err_target: f64,
    pub safety: f64,
    pub dt_init: f64,
    pub dt_min: f64,
    pub dt_max: f64,
    pub growth_cap: f64,
    /// Shared output/sample times; empty means the per-command default.
    pub output_times: Vec<f64>,
    /// 0 disables state snapshots.
    pub snapshot_every: usize,
    /// All runs are deterministic; only `true` is accepted.
    pub seedless: bool,
    /// Practical-synchronization level ε for κ*/t*.
    pub practical_eps: f64,
    pub sweep_axis: SweepAxis,
    pub sweep_values: Vec<f64>,
    pub n_list: Vec<usize>,
    pub n_ref: usize,
    pub mollify_eps: Vec<f64>,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            scenario: ScenarioName::Homogeneous,
            n: 512,
            alpha: 0.2,
            beta: 0.2,
            kappa: 1.0,
            t_end: 8.0,
            theta_init: ProfileSpec::Sin,
            nu: ProfileSpec::Zero,
            kernel_mode: KernelModeName::PointwiseCutoff,
            cutoff_eps: 1e-9,
            phase_delta: 1e-3,
            picard_omega: 0.7,
            picard_tol: 1e-10,
            picard_max_iter: 200,
            err_target: 1e-4,
            safety: 0.9,
            dt_init: 1e-3,
            dt_min: 1e-10,
            dt_max: 0.1,
            growth_cap: 5.0,
            output_times: Vec::new(),
            snapshot_every: 0,
            seedless: true,
            practical_eps: 0.5,
            sweep_axis: SweepAxis::Kappa,
            sweep_values: vec![0.5, 1.0, 1.5, 2.0],
            n_list: vec![16, 32, 64, 128, 256],
            n_ref: 1024,
            mollify_eps: vec![0.2, 0.1, 0.05],
        }
    }
}

const KEYS: &[&str] = &[
    "scenario",
    "n",
    "alpha",
    "beta",
    "kappa",
    "t_end",
    "theta_init",
    "nu",
    "kernel_mode",
    "cutoff_eps",
    "phase_delta",
    "picard_omega",
    "picard_tol",
    "picard_max_iter",
    "err_target",
    "safety",
    "dt_init",
    "dt_min",
    "dt_max",
    "growth_cap",
    "output_times",
    "snapshot_every",
    "seedless",
    "practical_eps",
    "sweep_axis",
    "sweep_values",
    "n_list",
    "n_ref",
    "mollify_eps",
];

struct Raw {
    line: usize,
    value: String,
}

fn parse_f64(key: &str, raw: &Raw) -> Result<f64, ConfigError> {
    raw.value.parse::<f64>().map_err(|_| ConfigError::Type {
        line: raw.line,
        key: key.to_string(),
        expected: "a real number",
        got: raw.value.clone(),
    })
}

fn parse_usize(key: &str, raw: &Raw) -> Result<usize, ConfigError> {
    raw.value.parse::<usize>().map_err(|_| ConfigError::Type {
        line: raw.line,
        key: key.to_string(),
        expected: "a nonnegative integer",
        got: raw.value.clone(),
    })
}

fn parse_bool(key: &str, raw: &Raw) -> Result<bool, ConfigError> {
    match raw.value.as_str() {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(ConfigError::Type {
            line: raw.line,
            key: key.to_string(),
            expected: "true or false",
            got: raw.value.clone(),
        }),
    }
}

fn parse_f64_list(key: &str, raw: &Raw) -> Result<Vec<f64>, ConfigError> {
    raw.value
        .split(',')
        .map(|s| s.trim())
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>().map_err(|_| ConfigError::Type {
                line: raw.line,
                key: key.to_string(),
                expected: "a comma-separated list of reals",
                got: raw.value.clone(),
            })
        })
        .collect()
}

fn parse_usize_list(key: &str, raw: &Raw) -> Result<Vec<usize>, ConfigError> {
    raw.value
        .split(',')
        .map(|s| s.trim())
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<usize>().map_err(|_| ConfigError::Type {
                line: raw.line,
                key: key.to_string(),
                expected: "a comma-separated list of integers",
                got: raw.value.clone(),
            })
        })
        .collect()
}

fn parse_profile(key: &str, raw: &Raw) -> Result<ProfileSpec, ConfigError> {
    let v = raw.value.as_str();
    if let Some(rest) = v.strip_prefix("constant:") {
        let c = rest.trim().parse::<f64>().map_err(|_| ConfigError::Type {
            line: raw.line,
            key: key.to_string(),
            expected: "constant:<real>",
            got: raw.value.clone(),
        })?;
        return Ok(ProfileSpec::Constant(c));
    }
    if let Some(rest) = v.strip_prefix("table:") {
        return Ok(ProfileSpec::TableFile(PathBuf::from(rest.trim())));
    }
    match v {
        "sin" => Ok(ProfileSpec::Sin),
        "cos" => Ok(ProfileSpec::Cos),
        "zero" => Ok(ProfileSpec::Zero),
        _ => Err(ConfigError::Type {
            line: raw.line,
            key: key.to_string(),
            expected: "sin | cos | zero | constant:<c> | table:<path>",
            got: raw.value.clone(),
        }),
    }
}

fn range_err(key: &str, raw: &Raw, msg: &str) -> ConfigError {
    ConfigError::Range {
        line: raw.line,
        key: key.to_string(),
        msg: msg.to_string(),
    }
}

/// Parses a config document, applying defaults for absent keys.
pub fn parse_config(text: &str) -> Result<Config, ConfigError> {
    let mut entries: BTreeMap<String, Raw> = BTreeMap::new();
    for (idx, line_raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match line_raw.find('#') {
            Some(p) => &line_raw[..p],
            None => line_raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let Some(eq) = line.find('=') else {
            return Err(ConfigError::Syntax {
                line: line_no,
                msg: format!("expected `key = value`, got `{line}`"),
            });
        };
        let key = line[..eq].trim().to_string();
        let value = line[eq + 1..].trim().to_string();
        if key.is_empty() || value.is_empty() {
            return Err(ConfigError::Syntax {
                line: line_no,
                msg: "empty key or value".to_string(),
            });
        }
        if !KEYS.contains(&key.as_str()) {
            return Err(ConfigError::UnknownKey { line: line_no, key });
        }
        if entries.contains_key(&key) {
            return Err(ConfigError::DuplicateKey { line: line_no, key });
        }
        entries.insert(
            key,
            Raw {
                line: line_no,
                value,
            },
        );
    }

    let mut cfg = Config::default();
    let mut nu_explicit = false;

    for (key, raw) in &entries {
        match key.as_str() {
            "scenario" => {
                cfg.scenario = match raw.value.as_str() {
                    "homogeneous" => ScenarioName::Homogeneous,
                    "heterogeneous" => ScenarioName::Heterogeneous,
                    _ => {
                        return Err(ConfigError::Type {
                            line: raw.line,
                            key: key.clone(),
                            expected: "homogeneous | heterogeneous",
                            got: raw.value.clone(),
                        })
                    }
                }
            }
            "n" => {
                cfg.n = parse_usize(key, raw)?;
                if cfg.n < 2 {
                    return Err(range_err(key, raw, "need at least 2 cells"));
                }
            }
            "alpha" => {
                cfg.alpha = parse_f64(key, raw)?;
                if !(0.0..1.0).contains(&cfg.alpha) {
                    return Err(range_err(key, raw, "alpha must lie in [0, 1)"));
                }
            }
            "beta" => {
                cfg.beta = parse_f64(key, raw)?;
                if !(0.0..1.0).contains(&cfg.beta) {
                    return Err(range_err(key, raw, "beta must lie in [0, 1)"));
                }
            }
            "kappa" => {
                cfg.kappa = parse_f64(key, raw)?;
                if !(cfg.kappa >= 0.0) {
                    return Err(range_err(key, raw, "kappa must be nonnegative"));
                }
            }
            "t_end" => {
                cfg.t_end = parse_f64(key, raw)?;
                if !(cfg.t_end > 0.0) {
                    return Err(range_err(key, raw, "t_end must be positive"));
                }
            }
            "theta_init" => cfg.theta_init = parse_profile(key, raw)?,
            "nu" => {
                cfg.nu = parse_profile(key, raw)?;
                nu_explicit = true;
            }
            "kernel_mode" => {
                cfg.kernel_mode = match raw.value.as_str() {
                    "pointwise-cutoff" => KernelModeName::PointwiseCutoff,
                    "cell-average" => KernelModeName::CellAverage,
                    "mollifier" => KernelModeName::Mollifier,
                    _ => {
                        return Err(ConfigError::Type {
                            line: raw.line,
                            key: key.clone(),
                            expected: "pointwise-cutoff | cell-average | mollifier",
                            got: raw.value.clone(),
                        })
                    }
                }
            }
            "cutoff_eps" => {
                cfg.cutoff_eps = parse_f64(key, raw)?;
                if !(cfg.cutoff_eps > 0.0) {
                    return Err(range_err(key, raw, "cutoff_eps must be positive"));
                }
            }
            "phase_delta" => {
                cfg.phase_delta = parse_f64(key, raw)?;
                if !(cfg.phase_delta > 0.0) {
                    return Err(range_err(key, raw, "phase_delta must be positive"));
                }
            }
            "picard_omega" => {
                cfg.picard_omega = parse_f64(key, raw)?;
                if !(cfg.picard_omega > 0.0 && cfg.picard_omega <= 1.0) {
                    return Err(range_err(key, raw, "picard_omega must lie in (0, 1]"));
                }
            }
            "picard_tol" => {
                cfg.picard_tol = parse_f64(key, raw)?;
                if !(cfg.picard_tol > 0.0) {
                    return Err(range_err(key, raw, "picard_tol must be positive"));
                }
            }
            "picard_max_iter" => {
                cfg.picard_max_iter = parse_usize(key, raw)?;
                if cfg.picard_max_iter == 0 {
                    return Err(range_err(key, raw, "picard_max_iter must be at least 1"));
                }
            }
            "err_target" => {
                cfg.err_target = parse_f64(key, raw)?;
                if !(cfg.err_target > 0.0) {
                    return Err(range_err(key, raw, "err_target must be positive"));
                }
            }
            "safety" => {
                cfg.safety = parse_f64(key, raw)?;
                if !(cfg.safety > 0.0) {
                    return Err(range_err(key, raw, "safety must be positive"));
                }
            }
            "dt_init" => cfg.dt_init = parse_f64(key, raw)?,
            "dt_min" => cfg.dt_min = parse_f64(key, raw)?,
            "dt_max" => cfg.dt_max = parse_f64(key, raw)?,
            "growth_cap" => {
                cfg.growth_cap = parse_f64(key, raw)?;
                if !(cfg.growth_cap > 1.0) {
                    return Err(range_err(key, raw, "growth_cap must exceed 1"));
                }
            }
            "output_times" => {
                cfg.output_times = parse_f64_list(key, raw)?;
                if !cfg.output_times.windows(2).all(|w| w[1] > w[0]) {
                    return Err(range_err(
                        key,
                        raw,
                        "output times must be strictly increasing",
                    ));
                }
                if cfg.output_times.iter().any(|&t| t < 0.0) {
                    return Err(range_err(key, raw, "output times must be nonnegative"));
                }
            }
            "snapshot_every" => cfg.snapshot_every = parse_usize(key, raw)?,
            "seedless" => {
                cfg.seedless = parse_bool(key, raw)?;
                if !cfg.seedless {
                    return Err(range_err(
                        key,
                        raw,
                        "all runs are deterministic; seedless = false is not available",
                    ));
                }
            }
            "practical_eps" => {
                cfg.practical_eps = parse_f64(key, raw)?;
                if !(cfg.practical_eps > 0.0 && cfg.practical_eps < 1.0) {
                    return Err(range_err(key, raw, "practical_eps must lie in (0, 1)"));
                }
            }
            "sweep_axis" => {
                cfg.sweep_axis = match raw.value.as_str() {
                    "alpha" => SweepAxis::Alpha,
                    "beta" => SweepAxis::Beta,
                    "kappa" => SweepAxis::Kappa,
                    _ => {
                        return Err(ConfigError::Type {
                            line: raw.line,
                            key: key.clone(),
                            expected: "alpha | beta | kappa",
                            got: raw.value.clone(),
                        })
                    }
                }
            }
            "sweep_values" => {
                cfg.sweep_values = parse_f64_list(key, raw)?;
                if cfg.sweep_values.is_empty() || !cfg.sweep_values.windows(2).all(|w| w[1] > w[0])
                {
                    return Err(range_err(
                        key,
                        raw,
                        "sweep values must be a nonempty strictly increasing list",
                    ));
                }
            }
            "n_list" => {
                cfg.n_list = parse_usize_list(key, raw)?;
                if cfg.n_list.is_empty() || cfg.n_list.iter().any(|&n| n < 2) {
                    return Err(range_err(key, raw, "n_list entries must all be >= 2"));
                }
            }
            "n_ref" => {
                cfg.n_ref = parse_usize(key, raw)?;
                if cfg.n_ref < 2 {
                    return Err(range_err(key, raw, "n_ref must be >= 2"));
                }
            }
            "mollify_eps" => {
                cfg.mollify_eps = parse_f64_list(key, raw)?;
                if cfg.mollify_eps.is_empty()
                    || cfg.mollify_eps.iter().any(|&e| !(e > 0.0 && e <= 0.25))
                    || !cfg.mollify_eps.windows(2).all(|w| w[1] < w[0])
                {
                    return Err(range_err(
                        key,
                        raw,
                        "mollify_eps must be a strictly decreasing list in (0, 0.25]",
                    ));
                }
            }
            _ => unreachable!("key list is closed"),
        }
    }

    // the frequency default follows the scenario family
    if !nu_explicit && cfg.scenario == ScenarioName::Heterogeneous {
        cfg.nu = ProfileSpec::Cos;
    }

    // dt chain is cross-key
    if !(cfg.dt_min > 0.0 && cfg.dt_min <= cfg.dt_init && cfg.dt_init <= cfg.dt_max) {
        return Err(ConfigError::Semantic(
            "need 0 < dt_min <= dt_init <= dt_max".to_string(),
        ));
    }
    for &n in &cfg.n_list {
        if cfg.n_ref % n != 0 {
            return Err(ConfigError::Semantic(format!(
                "every n_list entry must divide n_ref (got {n} vs {})",
                cfg.n_ref
            )));
        }
    }
    Ok(cfg)
}

impl Config {
    pub fn stepper(&self) -> StepperParams {
        StepperParams {
            omega: self.picard_omega,
            picard_tol: self.picard_tol,
            picard_max_iter: self.picard_max_iter,
            err_target: self.err_target,
            safety: self.safety,
            dt_init: self.dt_init,
            dt_min: self.dt_min,
            dt_max: self.dt_max,
            growth_cap: self.growth_cap,
        }
    }
}
