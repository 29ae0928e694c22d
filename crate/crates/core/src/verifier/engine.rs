//! Runs catalog entries: estimates left sides by Monte Carlo or exact
//! oracles, evaluates right sides with their explicit constants, and fits
//! decay rates for entries with unspecified constants.

use std::collections::BTreeMap;
use std::sync::{Arc, Mutex};

use rayon::prelude::*;
use serde_json::{json, Value};

use super::catalog::{BoundId, Requirement};
use super::oracles::{count_log_mgf, count_pmf, gaussian_mean_two_sided_tail, DiscreteLaw};
use super::regression::{rate_regression, CurvePoint, RateFit};
use super::scenario::{BoundParams, Instance, Sampler, Scenario};
use crate::cdf::CdfLike;
use crate::distributions::AnalyticDistribution;
use crate::empirical::{kolmogorov_distance, l1_between, ordered_stat_fluctuation, signed_integral, w1_general, EmpiricalCdf};
use crate::error::{invalid, Error, Result};
use crate::functional::{expectation, TestFunction};
use crate::hopf_lax::{sup_convolution, GridFunction};
use crate::mc::{batch_means, mean_estimate, replicate, wilson_frequency, Estimate, MonteCarloPlan};
use crate::report::{BoundReport, ReportKind};

/// Number of batches behind the error of nonlinear functionals (log-MGF, entropy).
pub const FUNCTIONAL_BATCHES: usize = 20;
/// Absolute constant of the eigenvalue-count tail.
pub const COUNT_TAIL_C: f64 = 1.0 / 112.0;
/// Default sweeps of the two example fixtures.
pub const EXAMPLE1_SWEEP: [usize; 4] = [64, 128, 256, 512];
pub const EXAMPLE2_SWEEP: [usize; 3] = [16, 64, 256];

struct Prepared {
    inst: Instance,
    reps: Vec<EmpiricalCdf>,
}

/// Runs catalog entries on one scenario and plan, sharing the replications
/// (and pooled references) between entries at the same n.
pub struct Verifier {
    scenario: Scenario,
    plan: MonteCarloPlan,
    cache: Mutex<BTreeMap<usize, Arc<Prepared>>>,
}

/// Runs one catalog entry. Inequality entries report at `plan.n`; rate
/// entries regress over the scenario's n sweep.
pub fn run_bound_check(bound: BoundId, plan: &MonteCarloPlan, scenario: &Scenario) -> Result<Vec<BoundReport>> {
    Verifier::new(scenario.clone(), *plan)?.run(bound)
}

/// Decay curves and fits of a rate entry, one per variant.
pub fn rate_curves(bound: BoundId, plan: &MonteCarloPlan, scenario: &Scenario) -> Result<Vec<(String, RateFit)>> {
    Verifier::new(scenario.clone(), *plan)?.rate_curves(bound)
}

impl Verifier {
    pub fn new(scenario: Scenario, plan: MonteCarloPlan) -> Result<Self> {
        scenario.validate()?;
        plan.validate()?;
        Ok(Self { scenario, plan, cache: Mutex::new(BTreeMap::new()) })
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn plan(&self) -> &MonteCarloPlan {
        &self.plan
    }

    /// Scenario at dimension n (cached with its replications).
    pub fn instance(&self, n: usize) -> Result<Instance> {
        Ok(self.prepared(n)?.inst.clone())
    }

    fn prepared(&self, n: usize) -> Result<Arc<Prepared>> {
        let mut cache = self.cache.lock().expect("verifier cache poisoned");
        if let Some(p) = cache.get(&n) {
            return Ok(Arc::clone(p));
        }
        let inst = self.scenario.instantiate(n, self.plan.master_seed)?;
        let reps = replicate(self.plan.master_seed, 0, self.plan.replications, |rng, _| inst.draw(rng))
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
        let p = Arc::new(Prepared { inst, reps });
        cache.insert(n, Arc::clone(&p));
        Ok(p)
    }

    fn ctx<'a>(&'a self, id: BoundId, prep: &'a Prepared) -> Ctx<'a> {
        Ctx { id, inst: &prep.inst, reps: &prep.reps, plan: &self.plan, params: &self.scenario.params }
    }

    /// Reports of one entry.
    pub fn run(&self, bound: BoundId) -> Result<Vec<BoundReport>> {
        if bound.uses_sweep() {
            let fits = self.rate_curves(bound)?;
            let asserted = bound.kind() == ReportKind::Rate;
            return Ok(fits.iter().map(|(variant, fit)| rate_report(bound, variant, fit, &self.plan, asserted)).collect());
        }
        self.run_at(bound, self.plan.n)
    }

    /// Reports of one entry with inequality entries evaluated at `n`.
    pub fn run_at(&self, bound: BoundId, n: usize) -> Result<Vec<BoundReport>> {
        if n == 0 {
            return Err(invalid("n must be positive"));
        }
        if bound.uses_sweep() {
            return self.run(bound);
        }
        let prep = self.prepared(n)?;
        self.ctx(bound, &prep).inequality()
    }

    /// Decay curves and fits of a rate entry, one per variant.
    pub fn rate_curves(&self, bound: BoundId) -> Result<Vec<(String, RateFit)>> {
        if !bound.uses_sweep() {
            return Err(invalid(format!("{bound} is not a rate entry")));
        }
        if matches!(bound, BoundId::Ex1 | BoundId::Ex2) {
            return self.example_curves(bound);
        }
        let sweep = self.sweep()?;
        let mut curves: Vec<(String, Vec<CurvePoint>, Option<f64>, bool)> = Vec::new();
        for &n in &sweep {
            let prep = self.prepared(n)?;
            let points = self.ctx(bound, &prep).rate_points()?;
            if curves.is_empty() {
                curves = points.iter().map(|(v, _, t, two)| (v.clone(), Vec::new(), *t, *two)).collect();
            }
            for (slot, (_, p, _, _)) in curves.iter_mut().zip(points) {
                slot.1.push(p);
            }
        }
        curves
            .into_iter()
            .map(|(variant, pts, target, two_sided)| Ok((variant, rate_regression(&pts, target, two_sided)?)))
            .collect()
    }

    fn sweep(&self) -> Result<Vec<usize>> {
        if self.scenario.n_sweep.is_empty() {
            return Err(invalid("rate entries need a non-empty n sweep"));
        }
        Ok(self.scenario.n_sweep.clone())
    }

    /// The example entries always run on their own model.
    fn example_curves(&self, bound: BoundId) -> Result<Vec<(String, RateFit)>> {
        let (base, default_sweep): (Scenario, &[usize]) = match bound {
            BoundId::Ex1 => (Scenario::example1(), &EXAMPLE1_SWEEP),
            _ => (Scenario::example2(), &EXAMPLE2_SWEEP),
        };
        let sweep = if self.scenario.n_sweep.is_empty() { default_sweep.to_vec() } else { self.scenario.n_sweep.clone() };
        let own = if std::mem::discriminant(&self.scenario.model) == std::mem::discriminant(&base.model) {
            None
        } else {
            Some(Verifier::new(base.with_sweep(sweep.clone()), self.plan)?)
        };
        let v = own.as_ref().unwrap_or(self);
        let mut kolm = Vec::new();
        let mut w1 = Vec::new();
        for &n in &sweep {
            let prep = v.prepared(n)?;
            let ctx = v.ctx(bound, &prep);
            let k = mean_estimate(&ctx.kolmogorov_to_f()?);
            kolm.push(CurvePoint { n, lhs: k.value, stderr: k.stderr, shape: if bound == BoundId::Ex1 { 1.0 / n as f64 } else { 1.0 } });
            if bound == BoundId::Ex1 {
                let w = mean_estimate(&ctx.w1_to_f()?);
                w1.push(CurvePoint { n, lhs: w.value, stderr: w.stderr, shape: 1.0 });
            }
        }
        let mut out = vec![("kolmogorov".to_string(), rate_regression(&kolm, None, true)?)];
        if bound == BoundId::Ex1 {
            out.push(("w1".to_string(), rate_regression(&w1, None, true)?));
        }
        Ok(out)
    }
}

fn rate_report(bound: BoundId, variant: &str, fit: &RateFit, plan: &MonteCarloPlan, asserted: bool) -> BoundReport {
    let n = fit.points.iter().map(|p| p.n).max().unwrap_or(0);
    let points: Vec<Value> = fit
        .points
        .iter()
        .map(|p| json!({"n": p.n, "lhs": p.lhs, "stderr": p.stderr, "shape": p.shape, "ratio": p.ratio()}))
        .collect();
    let mut r = BoundReport {
        bound_id: bound.as_str().to_string(),
        variant: variant.to_string(),
        kind: if asserted { ReportKind::Rate } else { ReportKind::Exploratory },
        asserted,
        n,
        lhs_estimate: fit.fit.slope,
        lhs_stderr: fit.fit.slope_stderr,
        rhs_value: None,
        slack_sigmas: plan.slack_sigmas,
        pass: fit.pass,
        metadata: BTreeMap::new(),
    };
    r.insert_meta("target_slope", fit.rule.target_slope);
    r.insert_meta("tolerance", fit.rule.tolerance);
    r.insert_meta("two_sided", fit.rule.two_sided);
    r.insert_meta("intercept", fit.fit.intercept);
    r.insert_meta("replications", plan.replications);
    r.insert_meta("points", Value::Array(points));
    r
}

struct Ctx<'a> {
    id: BoundId,
    inst: &'a Instance,
    reps: &'a [EmpiricalCdf],
    plan: &'a MonteCarloPlan,
    params: &'a BoundParams,
}

fn plus(e: Estimate, extra: f64) -> Estimate {
    Estimate { value: e.value, stderr: e.stderr + extra }
}

fn frequency(values: &[f64], threshold: f64) -> Estimate {
    wilson_frequency(values.iter().filter(|v| **v >= threshold).count(), values.len())
}

/// log of the sample mean of exp(t v), stable for large t.
fn log_mean_exp(vs: &[f64], t: f64) -> f64 {
    let top = vs.iter().map(|v| t * v).fold(f64::NEG_INFINITY, f64::max);
    top + (vs.iter().map(|v| (t * v - top).exp()).sum::<f64>() / vs.len() as f64).ln()
}

/// Plug-in Ent(Y) = E Y log Y - E Y log E Y for Y >= 0.
fn entropy(ys: &[f64]) -> f64 {
    let m = ys.iter().sum::<f64>() / ys.len() as f64;
    let ylogy = ys.iter().map(|&y| if y > 0.0 { y * y.ln() } else { 0.0 }).sum::<f64>() / ys.len() as f64;
    ylogy - if m > 0.0 { m * m.ln() } else { 0.0 }
}

fn beta(m: f64, sigma: f64, n: usize) -> f64 {
    (m * sigma).powf(2.0 / 3.0) / (n as f64).cbrt()
}

fn mean_bound(beta: f64) -> f64 {
    5.0 * beta * (1.0 + 1.0 / beta).ln().cbrt()
}

impl Ctx<'_> {
    fn n(&self) -> f64 {
        self.inst.n as f64
    }

    fn name(&self) -> &'static str {
        self.id.as_str()
    }

    fn missing(&self, symbol: &str) -> Error {
        Error::MissingConstant { bound: self.name().to_string(), symbol: symbol.to_string() }
    }

    fn not_applicable(&self, reason: &str) -> Error {
        Error::NotApplicable { bound: self.name().to_string(), reason: reason.to_string() }
    }

    fn sigma_pi(&self) -> Result<f64> {
        self.inst.sigma2_pi.map(f64::sqrt).ok_or_else(|| self.missing("sigma^2 (Poincare constant)"))
    }

    fn sigma_lsi(&self) -> Result<f64> {
        match (self.inst.sigma2_lsi, self.inst.sigma2_pi) {
            (Some(s), _) => Ok(s.sqrt()),
            (None, Some(_)) => Err(Error::RequiresLsi(self.name().to_string())),
            (None, None) => Err(self.missing("sigma^2 (log-Sobolev constant)")),
        }
    }

    fn sigma(&self) -> Result<f64> {
        match self.id.requirement() {
            Requirement::LogSobolev => self.sigma_lsi(),
            _ => self.sigma_pi(),
        }
    }

    /// M = ||F||_Lip; F must not have atoms.
    fn m_f(&self) -> Result<f64> {
        let m = self.inst.lipschitz_f.ok_or_else(|| self.missing("M (Lipschitz seminorm of F)"))?;
        if self.inst.reference.as_cdf().atoms().is_some() || !m.is_finite() {
            return Err(self.not_applicable("F has atoms"));
        }
        Ok(m)
    }

    fn g(&self) -> Result<AnalyticDistribution> {
        self.inst.comparison.ok_or_else(|| self.missing("G (comparison law)"))
    }

    fn f_cdf(&self) -> &dyn CdfLike {
        self.inst.reference.as_cdf()
    }

    fn dkw(&self) -> f64 {
        self.inst.dkw_width()
    }

    fn per_rep(&self, f: impl Fn(&EmpiricalCdf) -> Result<f64> + Sync + Send) -> Result<Vec<f64>> {
        self.reps.par_iter().map(f).collect()
    }

    fn kolmogorov_to_f(&self) -> Result<Vec<f64>> {
        let f = self.f_cdf();
        self.per_rep(|e| Ok(kolmogorov_distance(e, f)))
    }

    fn w1_to_f(&self) -> Result<Vec<f64>> {
        let f = self.f_cdf();
        self.per_rep(|e| w1_general(e, f))
    }

    fn report(&self, variant: impl Into<String>, est: Estimate, rhs: f64, exact: bool) -> BoundReport {
        let slack = if exact { 0.0 } else { self.plan.slack_sigmas };
        let mut r = BoundReport::inequality(self.name(), variant, self.inst.n, est.value, est.stderr, rhs, slack);
        r.insert_meta("replications", if exact { 0 } else { self.reps.len() });
        r.insert_meta("exact", exact);
        if let Some(p) = self.inst.pool {
            r.insert_meta("pool_replications", p.replications);
            r.insert_meta("pool_converged", p.converged);
            r.insert_meta("pool_dkw_width", p.dkw_width);
        }
        r
    }

    fn test_fn(&self, name: &str) -> Result<TestFunction> {
        TestFunction::by_name(name).ok_or_else(|| invalid(format!("unknown test function `{name}`")))
    }

    /// Per-replication L = int f dF_n - int f dF.
    fn linear_stats(&self, f: &TestFunction) -> Result<Vec<f64>> {
        let mean_f = self.inst.reference.expect(&|x| f.value(x));
        if !mean_f.is_finite() {
            return Err(Error::NonFiniteMoment(format!("integral of {} against F", f.name())));
        }
        self.per_rep(|e| Ok(e.atoms().iter().map(|&x| f.value(x)).sum::<f64>() / e.len() as f64 - mean_f))
    }

    fn check_one_lipschitz(&self, f: &TestFunction) -> Result<()> {
        let (lo, hi) = self.inst.reference.core_range();
        let worst = (0..=4000).map(|k| f.derivative(lo + (hi - lo) * k as f64 / 4000.0).abs()).fold(0.0, f64::max);
        if worst > 1.0 + 1e-9 {
            return Err(invalid(format!("{} needs a 1-Lipschitz function; |{}'| reaches {worst}", self.name(), f.name())));
        }
        Ok(())
    }

    /// Exact law of (number of X_i in [a, b)) / n - center, when known.
    fn count_law(&self, a: f64, b: f64, center: f64) -> Option<DiscreteLaw> {
        if let Some(probs) = self.inst.coordinate_probabilities(a, b) {
            return Some(DiscreteLaw::scaled_count(&count_pmf(&probs), self.inst.n, center));
        }
        match &self.inst.sampler {
            Sampler::Diagonal(law) => {
                let p = (law.cdf(b) - law.cdf(a)).max(0.0);
                Some(DiscreteLaw { values: vec![-center, 1.0 - center], probs: vec![1.0 - p, p] })
            }
            _ => None,
        }
    }

    /// Exact law of F_n(x) - center, when known.
    fn point_law(&self, x: f64, center: f64) -> Option<DiscreteLaw> {
        self.count_law(f64::NEG_INFINITY, next_up(x), center)
    }

    fn point_values(&self, x: f64, center: f64) -> Result<Vec<f64>> {
        self.per_rep(|e| Ok(e.cdf_eval(x) - center))
    }

    fn interval(&self) -> (f64, f64) {
        self.params.interval
    }

    fn inequality(&self) -> Result<Vec<BoundReport>> {
        match self.id {
            BoundId::Thm12Tail | BoundId::Thm12Mean => self.thm_1_2(),
            BoundId::Eq14Sandwich => self.sandwich(),
            BoundId::Prop21 => self.prop_2_1(),
            BoundId::Prop23Moment | BoundId::Prop52Moment => self.moments(),
            BoundId::Prop23Tail | BoundId::Prop52Tail => self.linear_tail(),
            BoundId::Cor24 => self.cor_2_4(),
            BoundId::Cor32 | BoundId::Cor62 => self.interval_l1(),
            BoundId::Prop42 => self.prop_4_2(),
            BoundId::Prop54Mgf => self.prop_5_4(),
            BoundId::Prop51Ent => self.prop_5_1(),
            BoundId::Prop61Mgf => self.prop_6_1(),
            BoundId::Prop63Tail => self.prop_6_3(),
            BoundId::Prop64 => self.prop_6_4(),
            BoundId::Cor65Count => self.cor_6_5(),
            BoundId::Thm71 => self.thm_7_1(),
            BoundId::Hensley => self.hensley(),
            other => Err(invalid(format!("{other} is a rate entry"))),
        }
    }

    fn thm_1_2(&self) -> Result<Vec<BoundReport>> {
        let sigma = self.sigma_lsi()?;
        let m = self.m_f()?;
        let b = beta(m, sigma, self.inst.n);
        let ks = self.kolmogorov_to_f()?;
        let tag = |r: BoundReport| r.with_meta("sigma", sigma).with_meta("M", m).with_meta("beta", b);
        if self.id == BoundId::Thm12Mean {
            let est = plus(mean_estimate(&ks), self.dkw());
            return Ok(vec![tag(self.report("", est, mean_bound(b), false))]);
        }
        Ok(self
            .params
            .r_uniform
            .iter()
            .map(|&r| {
                let est = plus(frequency(&ks, r), self.dkw());
                let rhs = 4.0 / r * (-(2.0 / 27.0) * (r / b).powi(3)).exp();
                tag(self.report(format!("r={r}"), est, rhs, false)).with_meta("r", r)
            })
            .collect())
    }

    fn sandwich(&self) -> Result<Vec<BoundReport>> {
        let w = self.w1_to_f()?;
        let fl = ordered_stat_fluctuation(self.reps)?;
        let mean_w = mean_estimate(&w).value;
        let s = fl.normalized_sum;
        let lower: Vec<f64> = fl.per_replicate.iter().zip(&w).map(|(d, w)| d / 2.0 - w).collect();
        let upper: Vec<f64> = fl.per_replicate.iter().zip(&w).map(|(d, w)| w - 2.0 * d).collect();
        let lo = Estimate { value: s / 2.0, stderr: mean_estimate(&lower).stderr };
        let up = Estimate { value: mean_w, stderr: mean_estimate(&upper).stderr };
        Ok(vec![
            self.report("side=lower", lo, mean_w, false).with_meta("mean_w1", mean_w).with_meta("order_stat_sum", s),
            self.report("side=upper", up, 2.0 * s, false).with_meta("mean_w1", mean_w).with_meta("order_stat_sum", s),
        ])
    }

    fn prop_2_1(&self) -> Result<Vec<BoundReport>> {
        let sigma = self.sigma_pi()?;
        let f = self.test_fn(&self.params.smooth_fn)?;
        let l = self.linear_stats(&f)?;
        let sq: Vec<f64> = l.iter().map(|v| v * v).collect();
        let grad = self.inst.reference.expect(&|x| f.derivative(x).powi(2));
        let rhs = sigma * sigma / self.n() * grad;
        Ok(vec![self.report(format!("f={}", f.name()), mean_estimate(&sq), rhs, false).with_meta("sigma", sigma)])
    }

    fn moments(&self) -> Result<Vec<BoundReport>> {
        let sigma = self.sigma()?;
        let f = self.test_fn(&self.params.smooth_fn)?;
        let l = self.linear_stats(&f)?;
        self.params
            .p_values
            .iter()
            .map(|&p| {
                let pw: Vec<f64> = l.iter().map(|v| v.abs().powf(p)).collect();
                let grad = self.inst.reference.expect(&|x| f.derivative(x).abs().powf(p));
                let factor = if self.id == BoundId::Prop23Moment { sigma * p } else { sigma * p.sqrt() };
                let rhs = factor.powf(p) / self.n().powf(p / 2.0) * grad;
                Ok(self.report(format!("f={},p={p}", f.name()), mean_estimate(&pw), rhs, false).with_meta("sigma", sigma).with_meta("p", p))
            })
            .collect()
    }

    fn linear_tail(&self) -> Result<Vec<BoundReport>> {
        let sigma = self.sigma()?;
        let f = self.test_fn(&self.params.lipschitz_fn)?;
        self.check_one_lipschitz(&f)?;
        let h = self.params.h;
        let n = self.n();
        let gaussian_sd = match &self.inst.sampler {
            Sampler::Product(spec) if f.name() == "identity" => match spec.coordinate_model.base {
                AnalyticDistribution::Gaussian { sd, .. } => Some(sd),
                _ => None,
            },
            _ => None,
        };
        let (est, exact) = match gaussian_sd {
            Some(sd) => (Estimate::exact(gaussian_mean_two_sided_tail(h, self.inst.n, sd)), true),
            None => (frequency(&self.linear_stats(&f)?.iter().map(|v| v.abs()).collect::<Vec<_>>(), h), false),
        };
        let variant = format!("f={},h={h}", f.name());
        let r = if self.id == BoundId::Prop23Tail {
            let rhs = 6.0 * (-n * h / sigma).exp();
            self.report(variant, est, rhs, exact).with_meta("rhs_sqrt_n_scaling", 6.0 * (-n.sqrt() * h / sigma).exp())
        } else {
            self.report(variant, est, 2.0 * (-n * h * h / (2.0 * sigma * sigma)).exp(), exact)
        };
        Ok(vec![r.with_meta("sigma", sigma).with_meta("h", h)])
    }

    fn cor_2_4(&self) -> Result<Vec<BoundReport>> {
        let sigma = self.sigma_pi()?;
        let (a, b) = self.interval();
        let variant = format!("a={a},b={b}");
        if a == b {
            return Ok(vec![self.report(variant, Estimate::exact(0.0), 0.0, true).with_meta("sigma", sigma)]);
        }
        let f = self.f_cdf();
        let vals = self.per_rep(|e| Ok(signed_integral(e, f, a, b).abs()))?;
        let est = plus(mean_estimate(&vals), self.dkw() * (b - a));
        let rhs = sigma / self.n().sqrt() * (f.cdf(b) - f.cdf(a)).max(0.0).sqrt();
        Ok(vec![self.report(variant, est, rhs, false).with_meta("sigma", sigma).with_meta("a", a).with_meta("b", b)])
    }

    fn interval_l1(&self) -> Result<Vec<BoundReport>> {
        let sigma = self.sigma()?;
        let (a, b) = self.interval();
        let variant = format!("a={a},b={b}");
        let s = sigma / self.n().sqrt();
        let rhs = if self.id == BoundId::Cor32 {
            s * (1.0 + 3.0 * ((b - a) / s).cbrt())
        } else {
            4.0 * (sigma * sigma * (b - a) / self.n()).cbrt()
        };
        if a == b {
            return Ok(vec![self.report(variant, Estimate::exact(0.0), rhs, true).with_meta("sigma", sigma)]);
        }
        let f = self.f_cdf();
        let vals = self.per_rep(|e| l1_between(e, f, a, b))?;
        let est = plus(mean_estimate(&vals), self.dkw() * (b - a));
        Ok(vec![self.report(variant, est, rhs, false).with_meta("sigma", sigma).with_meta("a", a).with_meta("b", b)])
    }

    fn prop_4_2(&self) -> Result<Vec<BoundReport>> {
        let sigma = self.sigma_pi()?;
        let a = self.inst.a_parameter.ok_or_else(|| self.missing("A"))?;
        let n = self.n();
        let shape = sigma * ((a + n.ln()) / n).cbrt();
        let w = self.w1_to_f()?;
        let c = mean_estimate(&w).value / shape;
        let mut out = Vec::new();
        let mut last = f64::INFINITY;
        let mut monotone = true;
        for &k in &self.params.deviation_multipliers {
            let h = k * sigma / n.sqrt();
            let est = frequency(&w, c * shape + h);
            monotone &= est.value <= last;
            last = est.value;
            let r = self.report(format!("k={k}"), est, c * (-k).exp(), false)
                .with_meta("C", c)
                .with_meta("h", h)
                .with_meta("A", a)
                .with_meta("sigma", sigma)
                .not_asserted();
            out.push(r);
        }
        for r in &mut out {
            r.insert_meta("monotone", monotone);
        }
        Ok(out)
    }

    /// Grid of f covering the core of F, padded so that the supremum
    /// convolution at time s is exact on the core.
    fn padded_grid(&self, f: &TestFunction, s: f64) -> Result<GridFunction> {
        let (lo, hi) = self.inst.reference.core_range();
        let probe: Vec<f64> = (0..=4000).map(|k| f.value(lo + (hi - lo) * k as f64 / 4000.0)).collect();
        let osc = probe.iter().copied().fold(f64::NEG_INFINITY, f64::max) - probe.iter().copied().fold(f64::INFINITY, f64::min);
        let pad = (2.0 * s * osc.max(1e-12)).sqrt() + s;
        let width = hi - lo + 2.0 * pad;
        // the optimal displacement is about s |f'|, so the step must resolve s
        let dx = (width / 20_000.0).min(s / 10.0).max(width / 2_000_000.0);
        GridFunction::on_interval(lo - pad - 2.0 * dx, hi + pad + 2.0 * dx, dx, |x| f.value(x))
    }

    fn prop_5_4(&self) -> Result<Vec<BoundReport>> {
        let sigma = self.sigma_lsi()?;
        let f = self.test_fn(&self.params.smooth_fn)?;
        let n = self.n();
        let mean_f = self.inst.reference.expect(&|x| f.value(x));
        let stats = match &self.inst.sampler {
            Sampler::Product(_) => None,
            _ => Some(self.linear_stats(&f)?),
        };
        self.params
            .t_smooth
            .iter()
            .map(|&t| {
                let s = t * sigma * sigma / n;
                let grid = self.padded_grid(&f, s)?;
                let p = sup_convolution(&grid, s)?;
                let diff = GridFunction::new(grid.x0(), grid.dx(), p.values().iter().zip(grid.values()).map(|(a, b)| a - b).collect())?;
                let rhs = t * self.inst.reference.integrate_grid(&diff);
                let (est, exact) = match (&self.inst.sampler, &stats) {
                    (Sampler::Product(spec), _) => {
                        let base = spec.coordinate_model.base;
                        let mut total = 0.0;
                        for &shift in &spec.shifts {
                            let law = base.affine(shift, 1.0)?;
                            total += expectation(&law, |y| (t / n * f.value(y)).exp()).value.ln();
                        }
                        (Estimate::exact(total - t * mean_f), true)
                    }
                    (_, Some(l)) => (batch_means(l, FUNCTIONAL_BATCHES, |xs| log_mean_exp(xs, t)), false),
                    _ => unreachable!(),
                };
                Ok(self.report(format!("f={},t={t}", f.name()), est, rhs, exact).with_meta("sigma", sigma).with_meta("t", t).with_meta("s", s))
            })
            .collect()
    }

    fn prop_5_1(&self) -> Result<Vec<BoundReport>> {
        let sigma = self.sigma_lsi()?;
        let f = self.test_fn(&self.params.smooth_fn)?;
        let ys = self.per_rep(|e| Ok((e.atoms().iter().map(|&x| f.value(x)).sum::<f64>() / e.len() as f64).powi(2)))?;
        let est = batch_means(&ys, FUNCTIONAL_BATCHES, entropy);
        let grad = self.inst.reference.expect(&|x| f.derivative(x).powi(2));
        let rhs = 2.0 * sigma * sigma / self.n() * grad;
        Ok(vec![self.report(format!("f={}", f.name()), est, rhs, false).with_meta("sigma", sigma)])
    }

    fn prop_6_1(&self) -> Result<Vec<BoundReport>> {
        let sigma = self.sigma_lsi()?;
        let x = self.params.x;
        let fx = self.inst.reference.cdf(x);
        let law = self.point_law(x, fx);
        let probs = self.inst.coordinate_probabilities(f64::NEG_INFINITY, next_up(x));
        let values = if law.is_none() { Some(self.point_values(x, fx)?) } else { None };
        Ok(self
            .params
            .t_values
            .iter()
            .map(|&t| {
                let h = (2.0 * sigma * sigma * t / self.n()).sqrt();
                let rhs = t * (self.inst.reference.cdf(x + h) - fx);
                let (est, exact) = match (&probs, &law, &values) {
                    (Some(p), _, _) => (Estimate::exact(count_log_mgf(p, t)), true),
                    (None, Some(l), _) => (Estimate::exact(l.log_mgf(t)), true),
                    (_, _, Some(v)) => (plus(batch_means(v, FUNCTIONAL_BATCHES, |xs| log_mean_exp(xs, t)), 2.0 * t * self.dkw()), false),
                    _ => unreachable!(),
                };
                self.report(format!("x={x},t={t}"), est, rhs, exact).with_meta("sigma", sigma).with_meta("t", t).with_meta("h", h)
            })
            .collect())
    }

    /// Tail probabilities P{|F_n(x) - center| >= c} for each threshold.
    fn point_tails(&self, x: f64, center: f64, thresholds: &[f64]) -> Result<(Vec<Estimate>, bool)> {
        if let Some(law) = self.point_law(x, center) {
            return Ok((thresholds.iter().map(|&c| Estimate::exact(law.two_sided_tail(c))).collect(), true));
        }
        let v: Vec<f64> = self.point_values(x, center)?.iter().map(|d| d.abs()).collect();
        Ok((thresholds.iter().map(|&c| plus(frequency(&v, c), self.dkw())).collect(), false))
    }

    fn prop_6_3(&self) -> Result<Vec<BoundReport>> {
        let sigma = self.sigma_lsi()?;
        let m = self.m_f()?;
        let b = beta(m, sigma, self.inst.n);
        let x = self.params.x;
        let rs = &self.params.r_pointwise;
        let thresholds: Vec<f64> = rs.iter().map(|r| b * r).collect();
        let (ests, exact) = self.point_tails(x, self.inst.reference.cdf(x), &thresholds)?;
        Ok(rs
            .iter()
            .zip(ests)
            .map(|(&r, est)| {
                let rhs = 2.0 * (-2.0 * r.powi(3) / 27.0).exp();
                self.report(format!("x={x},r={r}"), est, rhs, exact).with_meta("sigma", sigma).with_meta("M", m).with_meta("beta", b).with_meta("r", r)
            })
            .collect())
    }

    fn prop_6_4(&self) -> Result<Vec<BoundReport>> {
        let sigma = self.sigma_lsi()?;
        let g = self.g()?;
        let m = g.lipschitz_m();
        let b = beta(m, sigma, self.inst.n);
        let d = self.inst.reference.kolmogorov_to(&g);
        let x = self.params.x;
        let rs = &self.params.r_pointwise;
        let thresholds: Vec<f64> = rs.iter().map(|r| b * r + d).collect();
        let (ests, exact) = self.point_tails(x, g.cdf(x), &thresholds)?;
        let exact = exact && self.inst.pool.is_none();
        Ok(rs
            .iter()
            .zip(ests)
            .map(|(&r, est)| {
                let rhs = 2.0 * (-2.0 * r.powi(3) / 27.0).exp();
                self.report(format!("x={x},r={r}"), est, rhs, exact)
                    .with_meta("sigma", sigma)
                    .with_meta("M", m)
                    .with_meta("beta", b)
                    .with_meta("r", r)
                    .with_meta("F_G_distance", d)
            })
            .collect())
    }

    fn cor_6_5(&self) -> Result<Vec<BoundReport>> {
        let sigma = self.sigma_lsi()?;
        let g = self.g()?;
        let m = g.lipschitz_m();
        let b = beta(m, sigma, self.inst.n);
        let (lo, hi) = self.params.count_interval;
        let delta = self.params.delta;
        let len = hi - lo;
        let d = self.inst.reference.kolmogorov_to(&g);
        if len < 4.0 * d / delta {
            return Err(self.not_applicable(&format!("interval length {len} is below 4 ||F-G|| / delta = {}", 4.0 * d / delta)));
        }
        let n = self.n();
        let mass = g.cdf(hi) - g.cdf(lo);
        let threshold = delta * len;
        let (est, exact) = match self.count_law(lo, hi, mass) {
            Some(law) => (Estimate::exact(law.two_sided_tail(threshold)), true),
            None => {
                let v = self.per_rep(|e| Ok((e.count_in(lo, hi) as f64 / n - mass).abs()))?;
                (plus(frequency(&v, threshold), self.dkw()), false)
            }
        };
        let rhs = 4.0 * (-COUNT_TAIL_C * (delta * len / b).powi(3)).exp();
        Ok(vec![self
            .report(format!("a={lo},b={hi},delta={delta}"), est, rhs, exact)
            .with_meta("sigma", sigma)
            .with_meta("M", m)
            .with_meta("beta", b)
            .with_meta("c", COUNT_TAIL_C)
            .with_meta("F_G_distance", d)])
    }

    fn thm_7_1(&self) -> Result<Vec<BoundReport>> {
        let sigma = self.sigma_lsi()?;
        let g = self.g()?;
        let m = g.lipschitz_m();
        let b = beta(m, sigma, self.inst.n);
        let d = self.inst.reference.kolmogorov_to(&g);
        let ks = self.per_rep(|e| Ok(kolmogorov_distance(e, &g)))?;
        let est = plus(mean_estimate(&ks), self.dkw());
        Ok(vec![self
            .report("", est, mean_bound(b) + d, false)
            .with_meta("sigma", sigma)
            .with_meta("M", m)
            .with_meta("beta", b)
            .with_meta("F_G_distance", d)])
    }

    fn hensley(&self) -> Result<Vec<BoundReport>> {
        let sigma = self.sigma_pi()?;
        let m = self.m_f()?;
        if !self.inst.centered {
            return Err(self.not_applicable("coordinates are not centered"));
        }
        let second = self.inst.reference.expect(&|x| x * x);
        let lhs = 1.0 / 12f64.sqrt();
        Ok(vec![self
            .report("", Estimate::exact(lhs), m * sigma, true)
            .with_meta("sigma", sigma)
            .with_meta("M", m)
            .with_meta("M_times_rms", m * second.sqrt())])
    }

    /// (variant, point, fixed target slope, two-sided) at this n.
    fn rate_points(&self) -> Result<Vec<(String, CurvePoint, Option<f64>, bool)>> {
        let n = self.inst.n;
        let nf = self.n();
        let point = |est: Estimate, shape: f64| CurvePoint { n, lhs: est.value, stderr: est.stderr, shape };
        match self.id {
            BoundId::Thm11Rate => {
                let sigma = self.sigma_pi()?;
                let a = self.inst.a_parameter.ok_or_else(|| self.missing("A"))?;
                let est = mean_estimate(&self.w1_to_f()?);
                Ok(vec![("w1".into(), point(est, sigma * ((a + nf.ln()) / nf).cbrt()), None, false)])
            }
            BoundId::Prop63Mean => {
                let sigma = self.sigma_lsi()?;
                let m = self.m_f()?;
                let x = self.params.x;
                let fx = self.inst.reference.cdf(x);
                let est = match self.point_law(x, fx) {
                    Some(law) => Estimate::exact(law.mean_abs()),
                    None => mean_estimate(&self.point_values(x, fx)?.iter().map(|v| v.abs()).collect::<Vec<_>>()),
                };
                Ok(vec![(format!("x={x}"), point(est, beta(m, sigma, n)), None, false)])
            }
            BoundId::Thm13W1 | BoundId::Thm13Kolm | BoundId::Thm82Point => {
                if !matches!(self.inst.sampler, Sampler::Wigner(_)) {
                    return Err(self.not_applicable("needs a Wigner matrix scenario"));
                }
                let sigma = self.inst.shape_sigma.ok_or_else(|| self.missing("sigma (entry constant)"))?;
                let s = sigma / nf;
                match self.id {
                    BoundId::Thm13W1 => {
                        let est = mean_estimate(&self.w1_to_f()?);
                        Ok(vec![("w1".into(), point(est, sigma / nf.powf(2.0 / 3.0)), None, false)])
                    }
                    BoundId::Thm13Kolm => {
                        let g = self.g()?;
                        let d = self.inst.reference.kolmogorov_to(&g);
                        let est = mean_estimate(&self.per_rep(|e| Ok(kolmogorov_distance(e, &g)))?);
                        Ok(vec![("kolmogorov".into(), point(est, s.powf(2.0 / 3.0) * nf.ln().cbrt() + d), None, false)])
                    }
                    _ => {
                        let g = self.g()?;
                        let d = self.inst.reference.kolmogorov_to(&g);
                        [("bulk", self.params.x_bulk), ("edge", self.params.x_edge)]
                            .iter()
                            .map(|&(label, x)| {
                                let gx = g.cdf(x);
                                let est = mean_estimate(&self.per_rep(|e| Ok((e.cdf_eval(x) - gx).abs()))?);
                                let shape = d + s.powf(6.0 / 7.0) + g.pdf(x).powf(2.0 / 3.0) * s.powf(2.0 / 3.0);
                                Ok((format!("{label},x={x}"), point(est, shape), None, false))
                            })
                            .collect()
                    }
                }
            }
            BoundId::OpenSqrtN => {
                let est = mean_estimate(&self.kolmogorov_to_f()?);
                Ok(vec![("kolmogorov".into(), point(est, 1.0 / nf.sqrt()), Some(-0.5), false)])
            }
            other => Err(invalid(format!("{other} has no decay curve"))),
        }
    }
}

/// Smallest float above x, so that [-inf, next_up(x)) = (-inf, x].
fn next_up(x: f64) -> f64 {
    if x.is_nan() || x == f64::INFINITY {
        return x;
    }
    if x == 0.0 {
        return f64::from_bits(1);
    }
    let bits = x.to_bits();
    f64::from_bits(if x > 0.0 { bits + 1 } else { bits - 1 })
}
