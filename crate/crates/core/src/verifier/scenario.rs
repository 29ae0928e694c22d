//! Measure and matrix configurations the catalog entries are run on.

use std::collections::BTreeMap;

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cdf::CdfLike;
use crate::distributions::{AnalyticDistribution, MarginalMixture};
use crate::empirical::{kolmogorov_distance, EmpiricalCdf};
use crate::error::{invalid, Result};
use crate::functional::{expectation, MeasureModel, ProductMeasureSpec};
use crate::hopf_lax::{integrate_against, GridFunction};
use crate::random_matrix::{eigenvalues, pooled_spectral_cdf, semicircle_limit, WignerEnsembleConfig};

/// Random vector model behind F_n.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScenarioModel {
    /// Independent X_i = i * shift_step + Y_i with Y_i drawn from the coordinate model.
    Product {
        coordinate: MeasureModel,
        #[serde(default)]
        shift_step: f64,
    },
    /// Independent X_i uniform on (i-1, i).
    Example1,
    /// X_1 = ... = X_n = xi with xi uniform on [-1, 1].
    Example2,
    /// Eigenvalues of a Wigner matrix with the given (raw) entry law.
    Wigner { entry: MeasureModel },
}

/// Per-entry parameters with the defaults used by the catalog.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BoundParams {
    /// Deviation level of the linear-statistic tail entries.
    pub h: f64,
    /// Levels r for the uniform-distance tail.
    pub r_uniform: Vec<f64>,
    /// Levels r for the pointwise tails.
    pub r_pointwise: Vec<f64>,
    /// Evaluation point of the pointwise entries.
    pub x: f64,
    /// t values for the indicator log-MGF entry.
    pub t_values: Vec<f64>,
    /// t values for the smooth-function log-MGF entry.
    pub t_smooth: Vec<f64>,
    pub p_values: Vec<f64>,
    /// [a, b] for the interval entries.
    pub interval: (f64, f64),
    /// [a, b) for the eigenvalue count.
    pub count_interval: (f64, f64),
    pub delta: f64,
    /// Smooth test function by name.
    pub smooth_fn: String,
    /// 1-Lipschitz test function by name.
    pub lipschitz_fn: String,
    pub x_bulk: f64,
    pub x_edge: f64,
    /// Initial number of matrices in a pooled reference.
    pub pool_replications: usize,
    pub pool_doublings: usize,
    /// Deviations h = k sigma / sqrt(n) for the calibrated W1 tail.
    pub deviation_multipliers: Vec<f64>,
}

impl Default for BoundParams {
    fn default() -> Self {
        Self {
            h: 0.2,
            r_uniform: vec![0.1, 0.2],
            r_pointwise: vec![1.0, 2.0, 3.0],
            x: 0.0,
            t_values: vec![1.0, 10.0, 100.0],
            t_smooth: vec![1.0, 5.0, 20.0],
            p_values: vec![2.0, 4.0],
            interval: (-1.0, 1.0),
            count_interval: (-1.0, 1.0),
            delta: 0.1,
            smooth_fn: "sin".to_string(),
            lipschitz_fn: "identity".to_string(),
            x_bulk: 0.0,
            x_edge: 2.0,
            pool_replications: 200,
            pool_doublings: 3,
            deviation_multipliers: vec![1.0, 2.0, 3.0, 4.0],
        }
    }
}

/// A model, the n sweep used by rate entries, an optional comparison law G
/// and entry parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub model: ScenarioModel,
    #[serde(default)]
    pub n_sweep: Vec<usize>,
    /// G for the entries comparing F_n with a fixed law; defaults to F when
    /// F is analytic and to the semicircle law for Wigner matrices.
    #[serde(default)]
    pub comparison: Option<AnalyticDistribution>,
    #[serde(default)]
    pub params: BoundParams,
}

impl Scenario {
    pub fn new(model: ScenarioModel) -> Self {
        Self { model, n_sweep: Vec::new(), comparison: None, params: BoundParams::default() }
    }

    /// i.i.d. coordinates from `law` with its closed-form constants.
    pub fn iid(law: AnalyticDistribution) -> Result<Self> {
        Ok(Self::new(ScenarioModel::Product { coordinate: MeasureModel::from_law(law)?, shift_step: 0.0 }))
    }

    /// i.i.d. standard Gaussian coordinates (sigma^2 = 1, M = 1/sqrt(2 pi)).
    pub fn gaussian_product() -> Self {
        Self::iid(AnalyticDistribution::standard_gaussian()).expect("standard Gaussian is valid")
    }

    pub fn example1() -> Self {
        Self::new(ScenarioModel::Example1)
    }

    pub fn example2() -> Self {
        Self::new(ScenarioModel::Example2)
    }

    /// Wigner matrices with standard Gaussian entries.
    pub fn gaussian_wigner() -> Self {
        let entry = MeasureModel::from_law(AnalyticDistribution::standard_gaussian()).expect("standard Gaussian is valid");
        Self::new(ScenarioModel::Wigner { entry })
    }

    pub fn with_sweep(mut self, ns: Vec<usize>) -> Self {
        self.n_sweep = ns;
        self
    }

    pub fn with_params(mut self, params: BoundParams) -> Self {
        self.params = params;
        self
    }

    pub fn with_comparison(mut self, g: AnalyticDistribution) -> Self {
        self.comparison = Some(g);
        self
    }

    pub fn is_matrix(&self) -> bool {
        matches!(self.model, ScenarioModel::Wigner { .. })
    }

    /// Multiplies every coordinate by `lambda` > 0; constants scale by lambda^2.
    pub fn scaled(&self, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(invalid("scale factor must be positive"));
        }
        let model = match &self.model {
            ScenarioModel::Product { coordinate, shift_step } => {
                ScenarioModel::Product { coordinate: coordinate.affine(0.0, lambda)?, shift_step: shift_step * lambda }
            }
            ScenarioModel::Example1 => ScenarioModel::Product {
                coordinate: MeasureModel::from_law(AnalyticDistribution::uniform(0.0, lambda)?)?,
                shift_step: lambda,
            },
            ScenarioModel::Example2 | ScenarioModel::Wigner { .. } => {
                return Err(invalid("only product scenarios can be rescaled"));
            }
        };
        let mut params = self.params.clone();
        params.interval = (params.interval.0 * lambda, params.interval.1 * lambda);
        params.count_interval = (params.count_interval.0 * lambda, params.count_interval.1 * lambda);
        params.x *= lambda;
        params.h *= lambda;
        let comparison = self.comparison.map(|g| g.affine(0.0, lambda)).transpose()?;
        Ok(Self { model, n_sweep: self.n_sweep.clone(), comparison, params })
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_sweep.iter().any(|&n| n == 0) {
            return Err(invalid("n sweep entries must be positive"));
        }
        let p = &self.params;
        let finite = [p.h, p.x, p.delta, p.interval.0, p.interval.1, p.count_interval.0, p.count_interval.1, p.x_bulk, p.x_edge];
        if finite.iter().any(|v| !v.is_finite()) {
            return Err(invalid("bound parameters must be finite"));
        }
        if !(p.h > 0.0) || !(p.delta > 0.0) {
            return Err(invalid("h and delta must be positive"));
        }
        let positive = p.r_uniform.iter().chain(&p.r_pointwise).chain(&p.t_values).chain(&p.t_smooth).chain(&p.deviation_multipliers);
        if positive.clone().any(|v| !(*v > 0.0 && v.is_finite())) {
            return Err(invalid("r, t and deviation multipliers must be positive"));
        }
        if p.p_values.iter().any(|v| !(*v >= 2.0 && v.is_finite())) {
            return Err(invalid("moment orders p must be at least 2"));
        }
        if p.interval.0 > p.interval.1 || p.count_interval.0 >= p.count_interval.1 {
            return Err(invalid("intervals need a <= b (a < b for the count interval)"));
        }
        if p.pool_replications < 1 {
            return Err(invalid("pool needs at least one replication"));
        }
        if let Some(g) = &self.comparison {
            g.validate()?;
        }
        if let ScenarioModel::Product { shift_step, .. } = &self.model {
            if !shift_step.is_finite() {
                return Err(invalid("shift step must be finite"));
            }
        }
        Ok(())
    }

    /// Resolves the model at dimension n. Wigner scenarios build the pooled
    /// reference here, from `seed`.
    pub fn instantiate(&self, n: usize, seed: u64) -> Result<Instance> {
        self.validate()?;
        if n == 0 {
            return Err(invalid("n must be positive"));
        }
        let model = match &self.model {
            ScenarioModel::Example1 => ScenarioModel::Product {
                coordinate: MeasureModel::from_law(AnalyticDistribution::uniform(0.0, 1.0)?)?,
                shift_step: 1.0,
            },
            other => other.clone(),
        };
        match model {
            ScenarioModel::Product { coordinate, shift_step } => {
                let shifts: Vec<f64> = (0..n).map(|i| i as f64 * shift_step).collect();
                let spec = ProductMeasureSpec::new(coordinate, shifts)?;
                let reference = product_reference(&spec)?;
                let law_means: Vec<f64> = spec.shifts.iter().map(|s| s + coordinate.base.mean()).collect();
                let comparison = self.comparison.or(match &reference {
                    Reference::Law(l) => Some(*l),
                    _ => None,
                });
                let lipschitz_f = Some(match &reference {
                    Reference::Law(l) => l.lipschitz_m(),
                    Reference::Mixture(m) => m.lipschitz_m(),
                    Reference::Pooled(_) => unreachable!(),
                });
                Ok(Instance {
                    n,
                    sigma2_pi: coordinate.pi_constant,
                    sigma2_lsi: coordinate.lsi_constant,
                    shape_sigma: coordinate.sigma_pi(),
                    a_parameter: spec.a_parameter(),
                    lipschitz_f,
                    centered: law_means.iter().all(|m| m.abs() <= 1e-12),
                    sampler: Sampler::Product(spec),
                    reference,
                    comparison,
                    pool: None,
                })
            }
            ScenarioModel::Example2 => {
                let law = AnalyticDistribution::uniform(-1.0, 1.0)?;
                let nf = n as f64;
                Ok(Instance {
                    n,
                    sigma2_pi: law.pi_constant().map(|c| c * nf),
                    sigma2_lsi: law.lsi_constant().map(|c| c * nf),
                    shape_sigma: law.pi_constant().map(|c| (c * nf).sqrt()),
                    a_parameter: Some(0.0),
                    lipschitz_f: Some(law.lipschitz_m()),
                    centered: true,
                    sampler: Sampler::Diagonal(law),
                    reference: Reference::Law(law),
                    comparison: Some(self.comparison.unwrap_or(law)),
                    pool: None,
                })
            }
            ScenarioModel::Wigner { entry } => {
                let cfg = WignerEnsembleConfig::new(n, entry, seed)?;
                let pooled = pooled_spectral_cdf(&cfg, self.params.pool_replications, self.params.pool_doublings)?;
                let pool = PoolInfo {
                    replications: pooled.replications,
                    converged: pooled.converged,
                    last_change: pooled.last_change,
                    dkw_width: 1.0 / ((n * pooled.replications) as f64).sqrt(),
                };
                Ok(Instance {
                    n,
                    sigma2_pi: cfg.spectral_pi_constant(),
                    sigma2_lsi: cfg.spectral_lsi_constant(),
                    shape_sigma: cfg.entry_law.sigma_pi(),
                    a_parameter: None,
                    lipschitz_f: None,
                    centered: false,
                    sampler: Sampler::Wigner(cfg),
                    reference: Reference::Pooled(pooled.cdf),
                    comparison: Some(self.comparison.unwrap_or_else(semicircle_limit)),
                    pool: Some(pool),
                })
            }
            ScenarioModel::Example1 => unreachable!(),
        }
    }
}

fn product_reference(spec: &ProductMeasureSpec) -> Result<Reference> {
    let base = spec.coordinate_model.base;
    let step = if spec.n > 1 { spec.shifts[1] - spec.shifts[0] } else { 0.0 };
    if spec.shifts.iter().all(|s| *s == spec.shifts[0]) {
        return Ok(Reference::Law(base.affine(spec.shifts[0], 1.0)?));
    }
    if let AnalyticDistribution::Uniform { lo, hi } = base {
        // abutting shifted uniforms merge into one uniform law
        if step == hi - lo {
            let start = lo + spec.shifts[0];
            return Ok(Reference::Law(AnalyticDistribution::uniform(start, start + spec.n as f64 * step)?));
        }
    }
    Ok(Reference::Mixture(spec.marginal()?))
}

/// How one replication is drawn.
#[derive(Debug, Clone, PartialEq)]
pub enum Sampler {
    Product(ProductMeasureSpec),
    /// All n coordinates equal to one draw.
    Diagonal(AnalyticDistribution),
    Wigner(WignerEnsembleConfig),
}

/// F = E F_n, exact or pooled.
#[derive(Debug, Clone, PartialEq)]
pub enum Reference {
    Law(AnalyticDistribution),
    Mixture(MarginalMixture),
    Pooled(EmpiricalCdf),
}

impl Reference {
    pub fn as_cdf(&self) -> &dyn CdfLike {
        match self {
            Reference::Law(l) => l,
            Reference::Mixture(m) => m,
            Reference::Pooled(p) => p,
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        self.as_cdf().cdf(x)
    }

    /// Integral of h against F.
    pub fn expect(&self, h: &(dyn Fn(f64) -> f64 + Sync)) -> f64 {
        match self {
            Reference::Law(l) => expectation(l, h).value,
            Reference::Mixture(m) => {
                let k = m.components().len() as f64;
                grouped(m.components()).iter().map(|(c, w)| *w as f64 * expectation(c, h).value).sum::<f64>() / k
            }
            Reference::Pooled(p) => p.atoms().iter().map(|&x| h(x)).sum::<f64>() / p.len() as f64,
        }
    }

    /// Range holding all but 1e-9 of the mass on each side.
    pub fn core_range(&self) -> (f64, f64) {
        match self {
            Reference::Pooled(p) => (p.atoms()[0], p.atoms()[p.len() - 1]),
            other => {
                let c = other.as_cdf();
                (c.quantile(1e-9), c.quantile(1.0 - 1e-9))
            }
        }
    }

    /// Integral of a grid function against F; the grid must cover the core range.
    pub fn integrate_grid(&self, g: &GridFunction) -> f64 {
        match self {
            Reference::Law(l) => integrate_against(g.values(), g.x0(), g.dx(), |x| l.pdf(x)),
            Reference::Mixture(m) => integrate_against(g.values(), g.x0(), g.dx(), |x| m.pdf(x)),
            Reference::Pooled(p) => {
                p.atoms().iter().map(|&x| g.eval(x).unwrap_or(f64::NAN)).sum::<f64>() / p.len() as f64
            }
        }
    }

    /// sup |F - G|; exact against a pooled reference, a fine scan otherwise.
    pub fn kolmogorov_to(&self, g: &AnalyticDistribution) -> f64 {
        match self {
            Reference::Law(l) if l == g => 0.0,
            Reference::Pooled(p) => kolmogorov_distance(p, g),
            other => {
                let f = other.as_cdf();
                let lo = f.quantile(1e-12).min(g.quantile(1e-12));
                let hi = f.quantile(1.0 - 1e-12).max(g.quantile(1.0 - 1e-12));
                let steps = 200_000;
                let mut best = 0.0_f64;
                for k in 0..=steps {
                    let x = lo + (hi - lo) * k as f64 / steps as f64;
                    best = best.max((f.cdf(x) - g.cdf(x)).abs());
                }
                best
            }
        }
    }
}

/// Distinct components with their multiplicities.
fn grouped(components: &[AnalyticDistribution]) -> Vec<(AnalyticDistribution, usize)> {
    let mut out: Vec<(AnalyticDistribution, usize)> = Vec::new();
    let mut index: BTreeMap<String, usize> = BTreeMap::new();
    for c in components {
        let key = format!("{c:?}");
        match index.get(&key) {
            Some(&i) => out[i].1 += 1,
            None => {
                index.insert(key, out.len());
                out.push((*c, 1));
            }
        }
    }
    out
}

/// Size and accuracy of a pooled reference.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoolInfo {
    pub replications: usize,
    pub converged: bool,
    pub last_change: f64,
    /// 1/sqrt(n R_pool), added to the error of entries that read F pointwise.
    pub dkw_width: f64,
}

/// A scenario resolved at one n, with every derived constant.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub n: usize,
    pub sampler: Sampler,
    pub reference: Reference,
    pub comparison: Option<AnalyticDistribution>,
    /// Poincare constant of the joint law of (X_1, ..., X_n).
    pub sigma2_pi: Option<f64>,
    /// Log-Sobolev constant of the joint law.
    pub sigma2_lsi: Option<f64>,
    /// sigma entering constant-free rate shapes (entry sigma for matrices).
    pub shape_sigma: Option<f64>,
    pub a_parameter: Option<f64>,
    /// Lipschitz seminorm M of F, when known.
    pub lipschitz_f: Option<f64>,
    /// All E X_i = 0.
    pub centered: bool,
    pub pool: Option<PoolInfo>,
}

impl Instance {
    /// One replication: the sorted sample or spectrum.
    pub fn draw(&self, rng: &mut ChaCha8Rng) -> Result<EmpiricalCdf> {
        match &self.sampler {
            Sampler::Product(spec) => EmpiricalCdf::new(spec.sample(rng)),
            Sampler::Diagonal(law) => EmpiricalCdf::new(vec![law.sample(rng); self.n]),
            Sampler::Wigner(cfg) => eigenvalues(&cfg.assemble(&cfg.sample_entries(rng))?)?.to_empirical(),
        }
    }

    pub fn dkw_width(&self) -> f64 {
        self.pool.map_or(0.0, |p| p.dkw_width)
    }

    /// Success probabilities P{X_i in [a, b)} when the coordinates are independent.
    pub fn coordinate_probabilities(&self, a: f64, b: f64) -> Option<Vec<f64>> {
        match &self.sampler {
            Sampler::Product(spec) => {
                let base = spec.coordinate_model.base;
                Some(spec.shifts.iter().map(|s| (base.cdf(b - s) - base.cdf(a - s)).max(0.0)).collect())
            }
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example1_reference_is_uniform_on_zero_n() {
        let inst = Scenario::example1().instantiate(8, 1).unwrap();
        assert_eq!(inst.reference, Reference::Law(AnalyticDistribution::Uniform { lo: 0.0, hi: 8.0 }));
        assert!((inst.lipschitz_f.unwrap() - 0.125).abs() < 1e-15);
        assert_eq!(inst.a_parameter, Some(7.0 * std::f64::consts::PI));
        assert!(!inst.centered);
    }

    #[test]
    fn example2_constants_grow_with_n() {
        let inst = Scenario::example2().instantiate(10, 1).unwrap();
        let four_over_pi2 = 4.0 / (std::f64::consts::PI * std::f64::consts::PI);
        assert!((inst.sigma2_pi.unwrap() - 10.0 * four_over_pi2).abs() < 1e-12);
        assert!(inst.centered);
    }

    #[test]
    fn shifted_gaussians_use_a_mixture() {
        let mut s = Scenario::gaussian_product();
        if let ScenarioModel::Product { shift_step, .. } = &mut s.model {
            *shift_step = 0.5;
        }
        let inst = s.instantiate(4, 0).unwrap();
        let Reference::Mixture(m) = &inst.reference else { panic!("expected a mixture") };
        assert!((m.cdf(0.75) - 0.5).abs() < 1e-12);
        // E X under F is the average shift
        assert!((inst.reference.expect(&|x| x) - 0.75).abs() < 1e-10);
        assert!((inst.a_parameter.unwrap() - 1.5).abs() < 1e-15);
        assert!(inst.comparison.is_none());
    }

    #[test]
    fn wigner_reference_is_pooled() {
        let mut s = Scenario::gaussian_wigner();
        s.params.pool_replications = 4;
        s.params.pool_doublings = 1;
        let inst = s.instantiate(8, 3).unwrap();
        let pool = inst.pool.unwrap();
        assert!(pool.replications == 4 || pool.replications == 8);
        let Reference::Pooled(p) = &inst.reference else { panic!("expected a pool") };
        assert_eq!(p.len(), 8 * pool.replications);
        assert!((inst.sigma2_lsi.unwrap() - 0.25).abs() < 1e-12);
        assert_eq!(inst.comparison, Some(AnalyticDistribution::semicircle()));
        assert!(inst.lipschitz_f.is_none());
    }

    #[test]
    fn kolmogorov_between_laws() {
        let r = Reference::Law(AnalyticDistribution::uniform(-1.0, 1.0).unwrap());
        let g = AnalyticDistribution::uniform(-1.0, 3.0).unwrap();
        // F - G is largest at x = 1: 1 - 1/2
        assert!((r.kolmogorov_to(&g) - 0.5).abs() < 1e-4);
    }

    #[test]
    fn rescaling_multiplies_constants() {
        let s = Scenario::gaussian_product().scaled(2.0).unwrap();
        let inst = s.instantiate(5, 0).unwrap();
        assert!((inst.sigma2_pi.unwrap() - 4.0).abs() < 1e-12);
        assert!((s.params.h - 0.4).abs() < 1e-15);
    }
}
