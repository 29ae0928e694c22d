//! TOML run configuration, command-line overrides and their resolution
//! into a scenario and Monte Carlo plan.

use std::path::{Path, PathBuf};

use conclab_core::functional::HardyConfig;
use conclab_core::{AnalyticDistribution, BoundId, BoundParams, MeasureModel, MonteCarloPlan, Scenario, ScenarioModel};
use serde::Deserialize;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("invalid config {path}: {source}")]
    Parse { path: PathBuf, source: Box<toml::de::Error> },
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Core(#[from] conclab_core::Error),
}

fn invalid(msg: impl Into<String>) -> ConfigError {
    ConfigError::Invalid(msg.into())
}

/// A law id with its parameters; unset parameters take the standard values.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LawConfig {
    pub id: String,
    pub mean: Option<f64>,
    pub sd: Option<f64>,
    pub var: Option<f64>,
    pub lo: Option<f64>,
    pub hi: Option<f64>,
    pub loc: Option<f64>,
    pub scale: Option<f64>,
    pub center: Option<f64>,
    pub radius: Option<f64>,
    pub gap_lo: Option<f64>,
    pub gap_hi: Option<f64>,
    /// Overrides of the closed-form functional-inequality constants.
    pub pi_constant: Option<f64>,
    pub lsi_constant: Option<f64>,
}

impl LawConfig {
    pub fn named(id: &str) -> Self {
        Self { id: id.to_string(), ..Self::default() }
    }

    pub fn law(&self) -> Result<AnalyticDistribution, ConfigError> {
        fn given(name: &'static str, v: Option<f64>) -> Option<&'static str> {
            v.map(|_| name)
        }
        let fields = [
            given("mean", self.mean),
            given("sd", self.sd),
            given("var", self.var),
            given("lo", self.lo),
            given("hi", self.hi),
            given("loc", self.loc),
            given("scale", self.scale),
            given("center", self.center),
            given("radius", self.radius),
            given("gap_lo", self.gap_lo),
            given("gap_hi", self.gap_hi),
        ];
        let allowed: &[&str] = match self.id.as_str() {
            "gaussian" => &["mean", "sd", "var"],
            "uniform" => &["lo", "hi"],
            "two_sided_exponential" => &["loc", "scale"],
            "semicircle" => &["center", "radius"],
            "gapped_uniform" => &["lo", "gap_lo", "gap_hi", "hi"],
            other => return Err(invalid(format!("unknown law id '{other}'"))),
        };
        if let Some(f) = fields.iter().flatten().find(|f| !allowed.contains(f)) {
            return Err(invalid(format!("law '{}' has no parameter '{f}'", self.id)));
        }
        let law = match self.id.as_str() {
            "gaussian" => {
                let sd = match (self.sd, self.var) {
                    (Some(_), Some(_)) => return Err(invalid("give either sd or var, not both")),
                    (Some(sd), None) => sd,
                    (None, Some(v)) if v > 0.0 => v.sqrt(),
                    (None, Some(v)) => return Err(invalid(format!("variance must be positive, got {v}"))),
                    (None, None) => 1.0,
                };
                AnalyticDistribution::Gaussian { mean: self.mean.unwrap_or(0.0), sd }
            }
            "uniform" => AnalyticDistribution::Uniform { lo: self.lo.unwrap_or(0.0), hi: self.hi.unwrap_or(1.0) },
            "two_sided_exponential" => {
                AnalyticDistribution::TwoSidedExponential { loc: self.loc.unwrap_or(0.0), scale: self.scale.unwrap_or(1.0) }
            }
            "semicircle" => {
                AnalyticDistribution::Semicircle { center: self.center.unwrap_or(0.0), radius: self.radius.unwrap_or(2.0) }
            }
            _ => AnalyticDistribution::GappedUniform {
                lo: self.lo.unwrap_or(-2.0),
                gap_lo: self.gap_lo.unwrap_or(-1.0),
                gap_hi: self.gap_hi.unwrap_or(1.0),
                hi: self.hi.unwrap_or(2.0),
            },
        };
        law.validate()?;
        Ok(law)
    }

    pub fn model(&self) -> Result<MeasureModel, ConfigError> {
        let law = self.law()?;
        let pi = self.pi_constant.or(law.pi_constant());
        let lsi = self.lsi_constant.or(law.lsi_constant());
        Ok(MeasureModel::new(law, pi, lsi)?)
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum NSpec {
    One(usize),
    Many(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum BoundsSpec {
    /// "all" or a comma-separated list
    Text(String),
    List(Vec<String>),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HardyOverrides {
    pub c0: Option<f64>,
    pub c1: Option<f64>,
}

/// Contents of a config file. Every field may also come from a flag.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub scenario: Option<String>,
    pub law: Option<LawConfig>,
    /// G for the entries comparing F_n with a fixed law.
    pub comparison: Option<LawConfig>,
    pub shift_step: Option<f64>,
    pub seed: Option<u64>,
    pub reps: Option<usize>,
    pub n: Option<NSpec>,
    pub bounds: Option<BoundsSpec>,
    pub out: Option<PathBuf>,
    pub slack: Option<f64>,
    pub hardy: Option<HardyOverrides>,
    pub params: Option<BoundParams>,
}

/// Values given on the command line; they replace the file's.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub bounds: Option<String>,
    pub n: Option<Vec<usize>>,
    pub reps: Option<usize>,
    pub slack: Option<f64>,
    pub c0: Option<f64>,
    pub c1: Option<f64>,
}

pub const DEFAULT_REPS: usize = 1000;
pub const DEFAULT_N: usize = 100;
pub const DEFAULT_OUT: &str = "out";

impl RunConfig {
    pub fn from_toml(text: &str, path: &Path) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Parse { path: path.to_path_buf(), source: Box::new(e) })
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Read { path: path.to_path_buf(), source: e })?;
        Self::from_toml(&text, path)
    }

    pub fn apply(mut self, o: &Overrides) -> Self {
        if o.seed.is_some() {
            self.seed = o.seed;
        }
        if o.out.is_some() {
            self.out.clone_from(&o.out);
        }
        if let Some(b) = &o.bounds {
            self.bounds = Some(BoundsSpec::Text(b.clone()));
        }
        if let Some(n) = &o.n {
            self.n = Some(NSpec::Many(n.clone()));
        }
        if o.reps.is_some() {
            self.reps = o.reps;
        }
        if o.slack.is_some() {
            self.slack = o.slack;
        }
        if o.c0.is_some() || o.c1.is_some() {
            let h = self.hardy.get_or_insert_with(HardyOverrides::default);
            h.c0 = o.c0.or(h.c0);
            h.c1 = o.c1.or(h.c1);
        }
        self
    }

    pub fn ns(&self) -> Result<Vec<usize>, ConfigError> {
        let ns = match &self.n {
            None => vec![DEFAULT_N],
            Some(NSpec::One(n)) => vec![*n],
            Some(NSpec::Many(v)) => v.clone(),
        };
        if ns.is_empty() {
            return Err(invalid("the n list is empty"));
        }
        if ns.contains(&0) {
            return Err(invalid("n must be positive"));
        }
        Ok(ns)
    }

    /// Requested entries; `None` means every entry the scenario supports.
    pub fn bounds(&self) -> Result<Option<Vec<BoundId>>, ConfigError> {
        let names: Vec<String> = match &self.bounds {
            None => return Ok(None),
            Some(BoundsSpec::Text(t)) if t.trim().eq_ignore_ascii_case("all") => return Ok(None),
            Some(BoundsSpec::Text(t)) => t.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect(),
            Some(BoundsSpec::List(v)) => v.clone(),
        };
        if names.is_empty() {
            return Err(invalid("the bound list is empty"));
        }
        let mut ids = Vec::new();
        for name in names {
            let id: BoundId = name.parse()?;
            if !ids.contains(&id) {
                ids.push(id);
            }
        }
        Ok(Some(ids))
    }

    pub fn seed(&self) -> Result<u64, ConfigError> {
        self.seed.ok_or_else(|| invalid("a master seed is required (--seed or `seed` in the config)"))
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
    }

    pub fn hardy(&self) -> Result<HardyConfig, ConfigError> {
        let mut cfg = HardyConfig::default();
        if let Some(h) = self.hardy {
            cfg.c0 = h.c0.unwrap_or(cfg.c0);
            cfg.c1 = h.c1.unwrap_or(cfg.c1);
        }
        if !(cfg.c0 > 0.0 && cfg.c0.is_finite() && cfg.c1.is_finite() && cfg.c1 >= cfg.c0) {
            return Err(invalid(format!("Hardy constants need 0 < c0 <= c1, got c0 = {}, c1 = {}", cfg.c0, cfg.c1)));
        }
        Ok(cfg)
    }

    /// Scenario with `ns` as its sweep when it has at least 3 distinct values.
    pub fn scenario(&self, ns: &[usize]) -> Result<Scenario, ConfigError> {
        let name = self.scenario.as_deref().unwrap_or("gaussian_product");
        let entry = |default: &str| -> Result<MeasureModel, ConfigError> {
            self.law.clone().unwrap_or_else(|| LawConfig::named(default)).model()
        };
        let no_law = |what: &str| -> Result<(), ConfigError> {
            if self.law.is_some() {
                return Err(invalid(format!("scenario '{what}' takes no [law]")));
            }
            Ok(())
        };
        let model = match name {
            "gaussian_product" => {
                no_law(name)?;
                ScenarioModel::Product { coordinate: entry("gaussian")?, shift_step: self.shift_step.unwrap_or(0.0) }
            }
            "product" => ScenarioModel::Product { coordinate: entry("gaussian")?, shift_step: self.shift_step.unwrap_or(0.0) },
            "example1" => {
                no_law(name)?;
                ScenarioModel::Example1
            }
            "example2" => {
                no_law(name)?;
                ScenarioModel::Example2
            }
            "wigner" => ScenarioModel::Wigner { entry: entry("gaussian")? },
            "gaussian_wigner" => {
                no_law(name)?;
                ScenarioModel::Wigner { entry: entry("gaussian")? }
            }
            other => return Err(invalid(format!("unknown scenario '{other}'"))),
        };
        if self.shift_step.is_some() && !matches!(model, ScenarioModel::Product { .. }) {
            return Err(invalid("shift_step applies to product scenarios only"));
        }
        let mut s = Scenario::new(model);
        let mut distinct = ns.to_vec();
        distinct.sort_unstable();
        distinct.dedup();
        if distinct.len() >= 3 {
            s = s.with_sweep(ns.to_vec());
        }
        if let Some(p) = &self.params {
            s = s.with_params(p.clone());
        }
        if let Some(g) = &self.comparison {
            if g.pi_constant.is_some() || g.lsi_constant.is_some() {
                return Err(invalid("the comparison law takes no functional-inequality constants"));
            }
            s = s.with_comparison(g.law()?);
        }
        s.validate()?;
        Ok(s)
    }

    pub fn plan(&self, n: usize) -> Result<MonteCarloPlan, ConfigError> {
        let plan = MonteCarloPlan::new(self.reps.unwrap_or(DEFAULT_REPS), self.seed()?, n)?;
        Ok(plan.with_slack(self.slack.unwrap_or(3.0))?)
    }
}

/// Parses "32,64,128".
pub fn parse_n_list(s: &str) -> Result<Vec<usize>, String> {
    s.split(',').map(|t| t.trim().parse::<usize>().map_err(|e| format!("bad n '{t}': {e}"))).collect()
}
