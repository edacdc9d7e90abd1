use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::{DEFAULT_N_MAX, DEFAULT_PRECISION_BITS};

/// The seven experiments, named as on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    ConvergeMoments,
    ConvergeDist,
    Fdd,
    CkCheck,
    SemigroupCompare,
    SubordinatorCheck,
    GeneratorCheck,
}

impl Experiment {
    pub const ALL: [Experiment; 7] = [
        Experiment::ConvergeMoments,
        Experiment::ConvergeDist,
        Experiment::Fdd,
        Experiment::CkCheck,
        Experiment::SemigroupCompare,
        Experiment::SubordinatorCheck,
        Experiment::GeneratorCheck,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Experiment::ConvergeMoments => "converge-moments",
            Experiment::ConvergeDist => "converge-dist",
            Experiment::Fdd => "fdd",
            Experiment::CkCheck => "ck-check",
            Experiment::SemigroupCompare => "semigroup-compare",
            Experiment::SubordinatorCheck => "subordinator-check",
            Experiment::GeneratorCheck => "generator-check",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown experiment `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::Config(format!("unknown format `{other}`"))),
        }
    }
}

/// Experiment configuration, stored as a flat TOML file.
///
/// `experiment`, `seed` and `replicates` are always required. The lists an
/// experiment reads are required for that experiment only; see
/// [`ExperimentConfig::validate`]. `tolerance` falls back to the experiment's
/// default threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub seed: u64,
    pub replicates: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub n_list: Vec<u64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub t_list: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub s_list: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub m_list: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub x_list: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub alpha_list: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub fdd_times: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub fdd_exponents: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(default = "default_precision_bits")]
    pub precision_bits: u32,
    /// Right end `L` of the compact window `[0, L]`.
    #[serde(default = "default_window")]
    pub window: f64,
    /// Significance level of the KS tests.
    #[serde(default = "default_ks_level")]
    pub ks_level: f64,
    /// Sample size per side of the KS test in `subordinator-check`.
    #[serde(default = "default_ks_replicates")]
    pub ks_replicates: usize,
    /// Fill the `seconds` column. Timings differ between runs, so this
    /// breaks byte-identical output.
    #[serde(default)]
    pub timing: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_path: Option<String>,
    #[serde(default)]
    pub format: Format,
}

fn default_precision_bits() -> u32 {
    DEFAULT_PRECISION_BITS
}

fn default_window() -> f64 {
    3.0
}

fn default_ks_level() -> f64 {
    0.01
}

fn default_ks_replicates() -> usize {
    10_000
}

fn missing(key: &str, exp: Experiment) -> Error {
    Error::Config(format!("missing required key `{key}` for experiment {exp}"))
}

fn invalid(key: &str, why: &str) -> Error {
    Error::Config(format!("invalid `{key}`: {why}"))
}

fn require<T>(list: &[T], key: &str, exp: Experiment) -> Result<()> {
    if list.is_empty() {
        Err(missing(key, exp))
    } else {
        Ok(())
    }
}

fn check_times(list: &[f64], key: &str) -> Result<()> {
    if list.iter().any(|t| !(*t >= 0.0) || !t.is_finite()) {
        return Err(invalid(key, "times must be finite and nonnegative"));
    }
    Ok(())
}

fn check_integers(list: &[f64], key: &str, max: f64) -> Result<()> {
    if list.iter().any(|m| !(*m >= 0.0) || m.fract() != 0.0 || *m > max) {
        return Err(invalid(key, &format!("entries must be integers in [0, {max}]")));
    }
    Ok(())
}

fn sorted_unique_f64(list: &mut Vec<f64>) {
    list.sort_by(f64::total_cmp);
    list.dedup();
}

impl ExperimentConfig {
    /// The configuration each subcommand runs when no file is given.
    pub fn default_for(experiment: Experiment) -> Self {
        let mut cfg = ExperimentConfig {
            experiment,
            seed: 42,
            replicates: 10_000,
            n_list: Vec::new(),
            t_list: Vec::new(),
            s_list: Vec::new(),
            m_list: Vec::new(),
            x_list: Vec::new(),
            alpha_list: Vec::new(),
            fdd_times: Vec::new(),
            fdd_exponents: Vec::new(),
            tolerance: None,
            precision_bits: DEFAULT_PRECISION_BITS,
            window: default_window(),
            ks_level: default_ks_level(),
            ks_replicates: default_ks_replicates(),
            timing: false,
            output_path: None,
            format: Format::Csv,
        };
        match experiment {
            Experiment::ConvergeMoments => {
                cfg.n_list = vec![100, 1_000, 10_000, 100_000];
                cfg.t_list = vec![0.5, 1.0];
                cfg.m_list = vec![1.0, 2.0, 3.0];
            }
            Experiment::ConvergeDist => {
                cfg.n_list = vec![10, 10_000];
                cfg.t_list = vec![1.0];
            }
            Experiment::Fdd => {
                cfg.n_list = vec![100, 1_000, 10_000];
                cfg.fdd_times = vec![vec![0.5, 1.5]];
                cfg.fdd_exponents = vec![vec![1.0, 1.0]];
            }
            Experiment::CkCheck => {
                cfg.n_list = vec![10, 30];
                cfg.s_list = vec![0.3, 1.0];
                cfg.t_list = vec![0.5, 2.0];
                cfg.x_list = vec![0.5, 1.0, 4.0];
                cfg.m_list = vec![10.0];
            }
            Experiment::SemigroupCompare => {
                cfg.n_list = vec![100, 1_000, 10_000];
                cfg.s_list = vec![0.5];
                cfg.t_list = vec![0.5];
                cfg.m_list = vec![2.0];
            }
            Experiment::SubordinatorCheck => {
                cfg.replicates = 100_000;
                cfg.alpha_list = vec![0.2, 0.5, 0.9];
                cfg.x_list = vec![0.5, 1.0, 3.0];
            }
            Experiment::GeneratorCheck => {
                cfg.x_list = vec![0.5, 1.0, 2.0];
                cfg.m_list = vec![1.0, 2.0, 3.0, 4.0, 5.0];
            }
        }
        cfg
    }

    /// Threshold applied to the final row of each sequence (or to every row,
    /// for experiments without sequences).
    pub fn effective_tolerance(&self) -> f64 {
        self.tolerance.unwrap_or(match self.experiment {
            Experiment::ConvergeMoments => 0.02,
            Experiment::ConvergeDist => f64::INFINITY,
            Experiment::Fdd => 0.03,
            Experiment::CkCheck => 1e-8,
            Experiment::SemigroupCompare => 0.05,
            Experiment::SubordinatorCheck => 1e-6,
            Experiment::GeneratorCheck => 1e-3,
        })
    }

    /// Check the keys the experiment reads and normalize list order.
    pub fn validate(&mut self) -> Result<()> {
        let exp = self.experiment;
        if self.replicates == 0 {
            return Err(invalid("replicates", "must be at least 1"));
        }
        if let Some(tol) = self.tolerance {
            if !(tol > 0.0) {
                return Err(invalid("tolerance", "must be positive"));
            }
        }
        if self.precision_bits < 64 {
            return Err(invalid("precision_bits", "must be at least 64"));
        }
        if !(self.window > 0.0) || !self.window.is_finite() {
            return Err(invalid("window", "must be positive"));
        }
        if !(self.ks_level > 0.0 && self.ks_level < 1.0) {
            return Err(invalid("ks_level", "must lie in (0, 1)"));
        }
        if self.ks_replicates == 0 {
            return Err(invalid("ks_replicates", "must be at least 1"));
        }
        if self.n_list.contains(&0) {
            return Err(invalid("n_list", "sample sizes must be at least 1"));
        }
        check_times(&self.t_list, "t_list")?;
        check_times(&self.s_list, "s_list")?;
        self.n_list.sort_unstable();
        self.n_list.dedup();
        for list in [
            &mut self.t_list,
            &mut self.s_list,
            &mut self.m_list,
            &mut self.x_list,
            &mut self.alpha_list,
        ] {
            sorted_unique_f64(list);
        }

        match exp {
            Experiment::ConvergeMoments => {
                require(&self.n_list, "n_list", exp)?;
                require(&self.t_list, "t_list", exp)?;
                require(&self.m_list, "m_list", exp)?;
                check_integers(&self.m_list, "m_list", 25.0)?;
            }
            Experiment::ConvergeDist => {
                require(&self.n_list, "n_list", exp)?;
                require(&self.t_list, "t_list", exp)?;
                if self.replicates < 10_000 {
                    return Err(invalid("replicates", "converge-dist needs at least 10000"));
                }
            }
            Experiment::Fdd => {
                require(&self.n_list, "n_list", exp)?;
                require(&self.fdd_times, "fdd_times", exp)?;
                require(&self.fdd_exponents, "fdd_exponents", exp)?;
                if self.fdd_times.len() != self.fdd_exponents.len() {
                    return Err(invalid("fdd_exponents", "need one exponent list per time list"));
                }
                for (times, ms) in self.fdd_times.iter().zip(&self.fdd_exponents) {
                    if times.is_empty() || times.len() > 4 || times.len() != ms.len() {
                        return Err(invalid(
                            "fdd_times",
                            "each grid needs 1 to 4 times and as many exponents",
                        ));
                    }
                    check_times(times, "fdd_times")?;
                    if times.windows(2).any(|w| !(w[1] > w[0])) {
                        return Err(invalid("fdd_times", "times must be strictly increasing"));
                    }
                    check_integers(ms, "fdd_exponents", 6.0)?;
                    if ms.iter().sum::<f64>() > 6.0 {
                        return Err(invalid("fdd_exponents", "exponents may sum to at most 6"));
                    }
                }
            }
            Experiment::CkCheck => {
                require(&self.s_list, "s_list", exp)?;
                require(&self.t_list, "t_list", exp)?;
                require(&self.x_list, "x_list", exp)?;
                require(&self.m_list, "m_list", exp)?;
                check_integers(&self.m_list, "m_list", 50.0)?;
                if self.x_list.iter().any(|x| !(*x > 0.0) || !x.is_finite()) {
                    return Err(invalid("x_list", "start points must be positive"));
                }
                if self.n_list.iter().any(|&n| n as usize > DEFAULT_N_MAX) {
                    return Err(invalid(
                        "n_list",
                        &format!("exact transition laws need n <= {DEFAULT_N_MAX}"),
                    ));
                }
            }
            Experiment::SemigroupCompare => {
                require(&self.n_list, "n_list", exp)?;
                require(&self.s_list, "s_list", exp)?;
                require(&self.t_list, "t_list", exp)?;
                require(&self.m_list, "m_list", exp)?;
                check_integers(&self.m_list, "m_list", 5.0)?;
            }
            Experiment::SubordinatorCheck => {
                require(&self.alpha_list, "alpha_list", exp)?;
                require(&self.x_list, "x_list", exp)?;
                if self.alpha_list.iter().any(|a| !(*a > 0.0 && *a < 1.0)) {
                    return Err(invalid("alpha_list", "entries must lie in (0, 1)"));
                }
                if self.x_list.iter().any(|x| !(*x >= 0.0) || !x.is_finite()) {
                    return Err(invalid("x_list", "entries must be nonnegative"));
                }
            }
            Experiment::GeneratorCheck => {
                require(&self.x_list, "x_list", exp)?;
                require(&self.m_list, "m_list", exp)?;
                if self.m_list.iter().any(|k| !(*k >= 1.0) || k.fract() != 0.0 || *k > 8.0) {
                    return Err(invalid("m_list", "orders k must be integers in [1, 8]"));
                }
                if self.x_list.iter().any(|x| !(*x > 0.0) || !x.is_finite()) {
                    return Err(invalid("x_list", "entries must be positive"));
                }
            }
        }
        Ok(())
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let mut cfg: ExperimentConfig =
            toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Read and validate a configuration file.
pub fn load_config(path: impl AsRef<Path>) -> Result<ExperimentConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    ExperimentConfig::from_toml(&text)
}
