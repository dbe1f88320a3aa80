//! Experiment configuration and its key-value text format.
//!
//! Config files are plain `key = value` lines with `#` comments. Example:
//!
//! ```text
//! n_grid = 100, 200, 400
//! growth_exponent = 0.75
//! replicates = 20
//! settings = phi:10, phi:100, phi:1000
//! case = case_ii
//! sweeps = 2000
//! burnin = 1000
//! chains = 5
//! thin = 1
//! engine = enumerate_if_possible
//! seed = 42
//! ```

use crate::error::{Error, Result};
use crate::gprior::GPriorDensity;
use crate::model::ModelPrior;
use crate::sampler::GibbsConfig;

/// One slab-scale setting of an experiment: a fixed shared scale φ or a
/// uniform prior over the scale (enumeration engine only).
#[derive(Debug, Clone)]
pub enum SlabSetting {
    Fixed(f64),
    GPriorUniform { lo: f64, hi: f64, nodes: usize },
}

impl SlabSetting {
    pub fn label(&self) -> String {
        match self {
            SlabSetting::Fixed(phi) => format!("phi={phi}"),
            SlabSetting::GPriorUniform { lo, hi, .. } => format!("g=uniform[{lo},{hi}]"),
        }
    }

    pub fn density(&self) -> Result<GPriorDensity> {
        match *self {
            SlabSetting::Fixed(phi) => GPriorDensity::point_mass(phi),
            SlabSetting::GPriorUniform { lo, hi, .. } => GPriorDensity::uniform(lo, hi),
        }
    }
}

/// Inclusion-weight regime: equal weights, weights favoring the incorrect
/// models (0.3 on the true coordinates, 0.7 elsewhere), or explicit weights.
#[derive(Debug, Clone)]
pub enum PriorCase {
    CaseI,
    CaseII,
    Custom(Vec<f64>),
}

impl PriorCase {
    pub fn label(&self) -> &'static str {
        match self {
            PriorCase::CaseI => "case_i",
            PriorCase::CaseII => "case_ii",
            PriorCase::Custom(_) => "custom",
        }
    }

    /// Build the model prior for dimension p with the first `s_n`
    /// coordinates true.
    pub fn build(&self, p: usize, s_n: usize) -> Result<ModelPrior> {
        match self {
            // w_j = 1/2 everywhere is the indifference prior.
            PriorCase::CaseI => Ok(ModelPrior::Flat),
            PriorCase::CaseII => {
                let weights = (0..p).map(|j| if j < s_n { 0.3 } else { 0.7 }).collect();
                ModelPrior::bernoulli(weights)
            }
            PriorCase::Custom(weights) => {
                if weights.len() != p {
                    return Err(Error::Config(format!(
                        "custom prior has {} weights but p = {p}",
                        weights.len()
                    )));
                }
                ModelPrior::bernoulli(weights.clone())
            }
        }
    }
}

/// Which evaluation engine a cell may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Engine {
    /// Exact enumeration when p fits under the limit, Gibbs otherwise.
    EnumerateIfPossible,
    /// Always sample.
    GibbsAlways,
}

/// Full description of a simulation experiment.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub n_grid: Vec<usize>,
    /// p = round(n^r), clamped to at least s_n + 1 so γ⁰ stays representable.
    pub growth_exponent: f64,
    pub replicates: usize,
    pub settings: Vec<SlabSetting>,
    pub prior_case: PriorCase,
    pub gibbs: GibbsConfig,
    pub engine: Engine,
    pub seed: u64,
    /// Reuse one design across replicates instead of regenerating.
    pub fixed_design: bool,
    pub p_limit: usize,
    /// Nonzero true coefficients, placed on the leading coordinates.
    pub beta_nonzero: Vec<f64>,
    pub sigma0: f64,
    pub nu: u32,
    /// Records with PSRF at or above this are excluded from summaries.
    pub psrf_gate: f64,
    /// Sweep in null-truth mode: β⁰ = 0 and the target model is ∅.
    pub null_truth: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            n_grid: vec![100, 200, 400],
            growth_exponent: 0.25,
            replicates: 20,
            settings: vec![
                SlabSetting::Fixed(10.0),
                SlabSetting::Fixed(100.0),
                SlabSetting::Fixed(1000.0),
            ],
            prior_case: PriorCase::CaseI,
            gibbs: GibbsConfig {
                sweeps: 2000,
                burnin: 1000,
                chains: 5,
                seed: 0,
                thin: 1,
            },
            engine: Engine::EnumerateIfPossible,
            seed: 0,
            fixed_design: false,
            p_limit: crate::enumerate::DEFAULT_P_LIMIT,
            beta_nonzero: vec![2.0, 2.0],
            sigma0: 1.0,
            nu: 4,
            psrf_gate: 1.1,
            null_truth: false,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_grid.is_empty() {
            return Err(Error::Config("n_grid must be nonempty".into()));
        }
        if self.n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("n_grid must be strictly increasing".into()));
        }
        if self.replicates == 0 {
            return Err(Error::Config("replicates must be at least 1".into()));
        }
        if self.settings.is_empty() {
            return Err(Error::Config("need at least one setting".into()));
        }
        if !(self.growth_exponent > 0.0 && self.growth_exponent <= 1.0) {
            return Err(Error::Config(
                "growth_exponent must lie in (0, 1]".into(),
            ));
        }
        if !self.null_truth && self.beta_nonzero.contains(&0.0) {
            return Err(Error::Config(
                "beta_nonzero entries must be nonzero".into(),
            ));
        }
        self.gibbs.validate()
    }

    /// s_n for this configuration.
    pub fn true_size(&self) -> usize {
        if self.null_truth {
            0
        } else {
            self.beta_nonzero.len()
        }
    }

    /// Model dimension at sample size n.
    pub fn dimension_at(&self, n: usize) -> usize {
        let p = (n as f64).powf(self.growth_exponent).round() as usize;
        p.max(self.true_size() + 1)
    }

    /// Parse the `key = value` text format; unknown keys are errors.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected key = value", lineno + 1))
            })?;
            let key = key.trim();
            let value = value.trim();
            let bad = |what: &str| {
                Error::Config(format!("line {}: bad {what}: {value}", lineno + 1))
            };
            match key {
                "n_grid" => {
                    cfg.n_grid = split_list(value)
                        .map(|v| v.parse::<usize>().map_err(|_| bad("n_grid entry")))
                        .collect::<Result<_>>()?;
                }
                "growth_exponent" => {
                    cfg.growth_exponent = value.parse().map_err(|_| bad("growth_exponent"))?;
                }
                "replicates" => {
                    cfg.replicates = value.parse().map_err(|_| bad("replicates"))?;
                }
                "settings" => {
                    cfg.settings = split_list(value)
                        .map(parse_setting)
                        .collect::<Result<_>>()?;
                }
                "case" => {
                    cfg.prior_case = parse_case(value)?;
                }
                "sweeps" => cfg.gibbs.sweeps = value.parse().map_err(|_| bad("sweeps"))?,
                "burnin" => cfg.gibbs.burnin = value.parse().map_err(|_| bad("burnin"))?,
                "chains" => cfg.gibbs.chains = value.parse().map_err(|_| bad("chains"))?,
                "thin" => cfg.gibbs.thin = value.parse().map_err(|_| bad("thin"))?,
                "engine" => {
                    cfg.engine = match value {
                        "enumerate_if_possible" => Engine::EnumerateIfPossible,
                        "gibbs_always" => Engine::GibbsAlways,
                        _ => return Err(bad("engine")),
                    };
                }
                "seed" => cfg.seed = value.parse().map_err(|_| bad("seed"))?,
                "fixed_design" => {
                    cfg.fixed_design = value.parse().map_err(|_| bad("fixed_design"))?;
                }
                "p_limit" => cfg.p_limit = value.parse().map_err(|_| bad("p_limit"))?,
                "beta_nonzero" => {
                    cfg.beta_nonzero = split_list(value)
                        .map(|v| v.parse::<f64>().map_err(|_| bad("beta_nonzero entry")))
                        .collect::<Result<_>>()?;
                }
                "sigma0" => cfg.sigma0 = value.parse().map_err(|_| bad("sigma0"))?,
                "nu" => cfg.nu = value.parse().map_err(|_| bad("nu"))?,
                "psrf_gate" => cfg.psrf_gate = value.parse().map_err(|_| bad("psrf_gate"))?,
                "null_truth" => {
                    cfg.null_truth = value.parse().map_err(|_| bad("null_truth"))?;
                }
                _ => {
                    return Err(Error::Config(format!(
                        "line {}: unknown key '{key}'",
                        lineno + 1
                    )));
                }
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn split_list(value: &str) -> impl Iterator<Item = &str> {
    value.split(',').map(str::trim).filter(|v| !v.is_empty())
}

/// `phi:<scale>` or `g:uniform:<lo>:<hi>[:<nodes>]`.
fn parse_setting(token: &str) -> Result<SlabSetting> {
    let parts: Vec<&str> = token.split(':').collect();
    let bad = || Error::Config(format!("bad setting '{token}'"));
    match parts.as_slice() {
        ["phi", v] => Ok(SlabSetting::Fixed(v.parse().map_err(|_| bad())?)),
        ["g", "uniform", lo, hi] => Ok(SlabSetting::GPriorUniform {
            lo: lo.parse().map_err(|_| bad())?,
            hi: hi.parse().map_err(|_| bad())?,
            nodes: crate::gprior::DEFAULT_NODES,
        }),
        ["g", "uniform", lo, hi, nodes] => Ok(SlabSetting::GPriorUniform {
            lo: lo.parse().map_err(|_| bad())?,
            hi: hi.parse().map_err(|_| bad())?,
            nodes: nodes.parse().map_err(|_| bad())?,
        }),
        _ => Err(bad()),
    }
}

/// `case_i`, `case_ii`, or `weights:<w1>,...<wp>` (semicolon-free form uses
/// `weights:w1;w2;...` to avoid the list separator).
fn parse_case(value: &str) -> Result<PriorCase> {
    match value {
        "case_i" => Ok(PriorCase::CaseI),
        "case_ii" => Ok(PriorCase::CaseII),
        other => {
            if let Some(body) = other.strip_prefix("weights:") {
                let weights = body
                    .split(';')
                    .map(str::trim)
                    .filter(|v| !v.is_empty())
                    .map(|v| {
                        v.parse::<f64>()
                            .map_err(|_| Error::Config(format!("bad weight '{v}'")))
                    })
                    .collect::<Result<Vec<f64>>>()?;
                Ok(PriorCase::Custom(weights))
            } else {
                Err(Error::Config(format!("unknown case '{other}'")))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_a_full_config() {
        let text = "\
# Table-style experiment
n_grid = 100, 200
growth_exponent = 0.75
replicates = 5
settings = phi:10, phi:1000, g:uniform:10:1000
case = case_ii
sweeps = 500
burnin = 250
chains = 3
seed = 7
engine = gibbs_always
fixed_design = true
";
        let cfg = ExperimentConfig::from_text(text).unwrap();
        assert_eq!(cfg.n_grid, vec![100, 200]);
        assert_eq!(cfg.replicates, 5);
        assert_eq!(cfg.settings.len(), 3);
        assert!(matches!(cfg.settings[2], SlabSetting::GPriorUniform { .. }));
        assert!(matches!(cfg.prior_case, PriorCase::CaseII));
        assert_eq!(cfg.gibbs.sweeps, 500);
        assert_eq!(cfg.engine, Engine::GibbsAlways);
        assert!(cfg.fixed_design);
        assert_eq!(cfg.seed, 7);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        assert!(ExperimentConfig::from_text("bogus = 1").is_err());
        assert!(ExperimentConfig::from_text("replicates = zero").is_err());
        assert!(ExperimentConfig::from_text("replicates = 0").is_err());
        assert!(ExperimentConfig::from_text("n_grid = 200, 100").is_err());
        assert!(ExperimentConfig::from_text("settings = phi").is_err());
    }

    #[test]
    fn custom_weights_case() {
        let cfg = ExperimentConfig::from_text("case = weights:0.2;0.2;0.8").unwrap();
        match &cfg.prior_case {
            PriorCase::Custom(w) => assert_eq!(w, &vec![0.2, 0.2, 0.8]),
            other => panic!("unexpected case {other:?}"),
        }
        let prior = cfg.prior_case.build(3, 2).unwrap();
        assert!(matches!(prior, ModelPrior::Bernoulli { .. }));
        assert!(cfg.prior_case.build(4, 2).is_err());
    }

    #[test]
    fn dimension_growth_rounds_and_clamps() {
        let mut cfg = ExperimentConfig {
            growth_exponent: 0.75,
            ..ExperimentConfig::default()
        };
        assert_eq!(cfg.dimension_at(100), 32);
        assert_eq!(cfg.dimension_at(200), 53);
        assert_eq!(cfg.dimension_at(400), 89);
        cfg.growth_exponent = 0.25;
        assert_eq!(cfg.dimension_at(100), 3);
        // Clamped so the true model plus one competitor fit.
        assert_eq!(cfg.dimension_at(2), 3);
    }

    #[test]
    fn case_ii_weights_favor_incorrect_models() {
        let prior = PriorCase::CaseII.build(5, 2).unwrap();
        match prior {
            ModelPrior::Bernoulli { weights } => {
                assert_eq!(weights, vec![0.3, 0.3, 0.7, 0.7, 0.7]);
            }
            other => panic!("unexpected prior {other:?}"),
        }
    }
}
