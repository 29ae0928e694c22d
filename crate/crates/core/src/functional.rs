//! Poincare and log-Sobolev constants of measures on the line, and direct
//! checks of the functional inequalities on test functions.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::distributions::{AnalyticDistribution, MarginalMixture};
use crate::error::{invalid, Error, Result};
use crate::hopf_lax::{inf_convolution, integrate_against, sup_convolution, GridFunction};
use crate::mc::{batch_means, mean_estimate, replicate, MonteCarloPlan};
use crate::quad::{integrate, integrate_line, Integral, QuadConfig};
use crate::report::BoundReport;

/// A law on the line together with its Poincare / log-Sobolev constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasureModel {
    pub base: AnalyticDistribution,
    pub median: f64,
    pub pi_constant: Option<f64>,
    pub lsi_constant: Option<f64>,
}

impl MeasureModel {
    pub fn new(base: AnalyticDistribution, pi_constant: Option<f64>, lsi_constant: Option<f64>) -> Result<Self> {
        base.validate()?;
        for c in [pi_constant, lsi_constant].into_iter().flatten() {
            if !(c >= 0.0 && c.is_finite()) {
                return Err(invalid(format!("functional-inequality constant must be finite and nonnegative, got {c}")));
            }
        }
        if let (Some(p), Some(l)) = (pi_constant, lsi_constant) {
            if p > l * (1.0 + 1e-12) {
                return Err(invalid(format!("Poincare constant {p} exceeds log-Sobolev constant {l}")));
            }
        }
        let median = base.median();
        if (base.cdf(median) - 0.5).abs() > 1e-9 {
            return Err(invalid("median does not split the mass in half"));
        }
        Ok(Self { base, median, pi_constant, lsi_constant })
    }

    /// Uses the closed-form constants known for the law, if any.
    pub fn from_law(base: AnalyticDistribution) -> Result<Self> {
        Self::new(base, base.pi_constant(), base.lsi_constant())
    }

    pub fn sigma_pi(&self) -> Option<f64> {
        self.pi_constant.map(f64::sqrt)
    }

    pub fn sigma_lsi(&self) -> Option<f64> {
        self.lsi_constant.map(f64::sqrt)
    }

    /// Model of a + b X; constants scale by b^2.
    pub fn affine(&self, a: f64, b: f64) -> Result<Self> {
        let base = self.base.affine(a, b)?;
        Self::new(base, self.pi_constant.map(|c| c * b * b), self.lsi_constant.map(|c| c * b * b))
    }
}

/// n-fold product of shifted copies of one coordinate model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductMeasureSpec {
    pub coordinate_model: MeasureModel,
    pub n: usize,
    pub shifts: Vec<f64>,
}

impl ProductMeasureSpec {
    pub fn new(coordinate_model: MeasureModel, shifts: Vec<f64>) -> Result<Self> {
        if shifts.is_empty() || shifts.iter().any(|s| !s.is_finite()) {
            return Err(invalid("product measure needs n >= 1 finite shifts"));
        }
        Ok(Self { coordinate_model, n: shifts.len(), shifts })
    }

    pub fn iid(coordinate_model: MeasureModel, n: usize) -> Result<Self> {
        Self::new(coordinate_model, vec![0.0; n])
    }

    /// A = (1/sigma) max_{i,j} |E X_i - E X_j| with sigma^2 the Poincare constant.
    pub fn a_parameter(&self) -> Option<f64> {
        let sigma = self.coordinate_model.sigma_pi()?;
        let lo = self.shifts.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = self.shifts.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Some((hi - lo) / sigma)
    }

    /// F = (1/n) sum F_i.
    pub fn marginal(&self) -> Result<MarginalMixture> {
        MarginalMixture::shifted(self.coordinate_model.base, &self.shifts)
    }

    pub fn sample<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        self.shifts.iter().map(|s| s + self.coordinate_model.base.sample(rng)).collect()
    }
}

// ---------------------------------------------------------------------------
// Hardy-type constants

/// Settings for the Hardy constant search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HardyConfig {
    pub c0: f64,
    pub c1: f64,
    pub grid_points: usize,
    pub tail_mass: f64,
    pub refine_rounds: usize,
}

impl Default for HardyConfig {
    fn default() -> Self {
        Self { c0: 0.25, c1: 4.0, grid_points: 2048, tail_mass: 1e-12, refine_rounds: 3 }
    }
}

/// Hardy quantities on both sides of the median with the implied bracket.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HardyBracket {
    /// A0 (or B0): supremum over x below the median.
    pub left: f64,
    /// A1 (or B1): supremum over x above the median.
    pub right: f64,
    pub lower: f64,
    pub upper: f64,
    pub left_argmax: f64,
    pub right_argmax: f64,
    /// Set when the logarithmic supremum diverges along a tail.
    pub tails_not_subgaussian: bool,
}

impl HardyBracket {
    pub fn sum(&self) -> f64 {
        self.left + self.right
    }

    pub fn contains(&self, value: f64) -> bool {
        self.lower <= value && value <= self.upper
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Weight {
    Poincare,
    LogSobolev,
}

impl Weight {
    fn apply(self, mass: f64) -> f64 {
        match self {
            Weight::Poincare => mass,
            Weight::LogSobolev => {
                if mass <= 0.0 { 0.0 } else { mass * (1.0 / mass).ln() }
            }
        }
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Side {
    Left,
    Right,
}

enum SideResult {
    Finite { sup: f64, argmax: f64 },
    Divergent,
}

fn reciprocal_density_integral(law: &AnalyticDistribution, a: f64, b: f64) -> Integral {
    let cfg = QuadConfig { abs_tol: 0.0, rel_tol: 1e-10, max_intervals: 200 };
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    integrate(|t| 1.0 / law.pdf(t), lo, hi, cfg)
}

fn side_supremum(m: &MeasureModel, side: Side, weight: Weight, cfg: &HardyConfig) -> Result<SideResult> {
    let law = &m.base;
    let median = m.median;
    let n = cfg.grid_points.max(16);
    let q_top = 0.5;
    let ratio = (cfg.tail_mass / q_top).ln();
    let level = |k: usize| q_top * (ratio * k as f64 / (n - 1) as f64).exp();
    let point = |q: f64| match side {
        Side::Left => law.quantile(q),
        Side::Right => law.isf(q),
    };
    let mass = |x: f64| match side {
        Side::Left => law.cdf(x),
        Side::Right => law.sf(x),
    };

    // Cumulative integral of 1/p from the median outwards.
    let mut xs = Vec::with_capacity(n);
    let mut inner = Vec::with_capacity(n);
    let mut values = Vec::with_capacity(n);
    let mut prev_x = median;
    let mut acc = 0.0;
    for k in 0..n {
        let q = level(k);
        let x = point(q);
        if !x.is_finite() {
            break;
        }
        let seg = reciprocal_density_integral(law, prev_x, x);
        if !seg.value.is_finite() {
            if k == 0 || law.pdf(0.5 * (prev_x + x)) == 0.0 {
                return Err(Error::InfiniteHardyConstant);
            }
            return Ok(SideResult::Divergent);
        }
        acc += seg.value;
        prev_x = x;
        xs.push(x);
        inner.push(acc);
        values.push(weight.apply(q) * acc);
    }
    if values.is_empty() {
        return Ok(SideResult::Finite { sup: 0.0, argmax: median });
    }

    // Divergence: strictly increasing over the last quarter, without slowing down.
    let len = values.len();
    let quarter = len / 4;
    if quarter >= 2 {
        let last = &values[len - quarter..];
        let increasing = last.windows(2).all(|w| w[1] > w[0]);
        let d_last = values[len - 1] - values[len - quarter];
        let d_prev = values[len - quarter] - values[len - 2 * quarter];
        if increasing && d_last > 0.0 && d_last >= 0.8 * d_prev {
            return Ok(SideResult::Divergent);
        }
    }

    let (kmax, &vmax) = values.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap();
    let mut best = (vmax, xs[kmax]);

    // Golden-section refinement between the neighbours of the grid argmax.
    let objective = |x: f64| -> f64 {
        let k = xs.iter().position(|&g| match side {
            Side::Left => g <= x,
            Side::Right => g >= x,
        });
        let (anchor_x, anchor_inner) = match k {
            Some(0) | None => (median, 0.0),
            Some(k) => (xs[k - 1], inner[k - 1]),
        };
        let j = anchor_inner + reciprocal_density_integral(law, anchor_x, x).value;
        weight.apply(mass(x)) * j
    };
    let a_idx = kmax.saturating_sub(1);
    let b_idx = (kmax + 1).min(len - 1);
    let (mut a, mut b) = if kmax == 0 { (median, xs[b_idx]) } else { (xs[a_idx], xs[b_idx]) };
    if a > b {
        std::mem::swap(&mut a, &mut b);
    }
    let phi = 0.5 * (5.0_f64.sqrt() - 1.0);
    for _ in 0..cfg.refine_rounds {
        let (mut lo, mut hi) = (a, b);
        let mut c = hi - phi * (hi - lo);
        let mut d = lo + phi * (hi - lo);
        let (mut fc, mut fd) = (objective(c), objective(d));
        for _ in 0..20 {
            if fc > fd {
                hi = d;
                d = c;
                fd = fc;
                c = hi - phi * (hi - lo);
                fc = objective(c);
            } else {
                lo = c;
                c = d;
                fc = fd;
                d = lo + phi * (hi - lo);
                fd = objective(d);
            }
        }
        for (x, v) in [(c, fc), (d, fd)] {
            if v.is_finite() && v > best.0 {
                best = (v, x);
            }
        }
        // Next round: a tighter bracket around the current best.
        let w = 0.25 * (b - a);
        a = (best.1 - w).max(a);
        b = (best.1 + w).min(b);
    }
    Ok(SideResult::Finite { sup: best.0, argmax: best.1 })
}

/// A0, A1 with inner integral of 1/p between x and the median, and the
/// bracket c0 (A0 + A1) <= sigma^2 <= c1 (A0 + A1).
pub fn hardy_pi_bracket(m: &MeasureModel, cfg: &HardyConfig) -> Result<HardyBracket> {
    let left = side_supremum(m, Side::Left, Weight::Poincare, cfg)?;
    let right = side_supremum(m, Side::Right, Weight::Poincare, cfg)?;
    match (left, right) {
        (SideResult::Finite { sup: a0, argmax: x0 }, SideResult::Finite { sup: a1, argmax: x1 }) => Ok(HardyBracket {
            left: a0,
            right: a1,
            lower: cfg.c0 * (a0 + a1),
            upper: cfg.c1 * (a0 + a1),
            left_argmax: x0,
            right_argmax: x1,
            tails_not_subgaussian: false,
        }),
        _ => Err(Error::InfiniteHardyConstant),
    }
}

/// B0, B1 (logarithmic weight). A divergent supremum is reported through
/// `tails_not_subgaussian` with infinite values rather than as an error.
pub fn hardy_lsi_bracket(m: &MeasureModel, cfg: &HardyConfig) -> Result<HardyBracket> {
    let left = side_supremum(m, Side::Left, Weight::LogSobolev, cfg)?;
    let right = side_supremum(m, Side::Right, Weight::LogSobolev, cfg)?;
    let unpack = |r: SideResult| match r {
        SideResult::Finite { sup, argmax } => (sup, argmax, false),
        SideResult::Divergent => (f64::INFINITY, f64::NAN, true),
    };
    let (b0, x0, d0) = unpack(left);
    let (b1, x1, d1) = unpack(right);
    Ok(HardyBracket {
        left: b0,
        right: b1,
        lower: cfg.c0 * (b0 + b1),
        upper: cfg.c1 * (b0 + b1),
        left_argmax: x0,
        right_argmax: x1,
        tails_not_subgaussian: d0 || d1,
    })
}

/// Isoperimetric constant H = inf p / min(F, 1 - F) on a quantile grid.
pub fn isoperimetric_constant(m: &MeasureModel) -> Result<f64> {
    let law = &m.base;
    let levels = 1024;
    let lo_q: f64 = 1e-9;
    let mut xs = vec![m.median];
    for k in 0..levels {
        let q = 0.5 * ((lo_q / 0.5).ln() * k as f64 / (levels - 1) as f64).exp();
        xs.push(law.quantile(q));
        xs.push(law.isf(q));
    }
    xs.retain(|x| x.is_finite());
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let mids: Vec<f64> = xs.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    let mut h = f64::INFINITY;
    for &x in xs.iter().chain(&mids) {
        let tail = law.cdf(x).min(law.sf(x));
        if tail <= 0.0 {
            continue;
        }
        h = h.min(law.pdf(x) / tail);
    }
    if !(h > 1e-12) {
        return Err(Error::ZeroIsoperimetricConstant);
    }
    Ok(h)
}

/// Poincare constant 4 / H^2 from the isoperimetric constant.
pub fn cheeger_pi_constant(m: &MeasureModel) -> Result<f64> {
    let h = isoperimetric_constant(m)?;
    Ok(4.0 / (h * h))
}

/// sigma^2 ||T||_Lip^2, the constant transported by a Lipschitz map.
pub fn lipschitz_image_constant(sigma2: f64, lip: f64) -> Result<f64> {
    if !(sigma2 >= 0.0 && lip >= 0.0) {
        return Err(invalid("constants must be nonnegative"));
    }
    Ok(sigma2 * lip * lip)
}

// ---------------------------------------------------------------------------
// Test functions and direct checks

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A real function of one variable with an optional exact derivative.
#[derive(Clone)]
pub struct TestFunction {
    name: String,
    f: RealFn,
    df: Option<RealFn>,
}

impl fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TestFunction").field("name", &self.name).field("exact_derivative", &self.df.is_some()).finish()
    }
}

impl TestFunction {
    pub fn new(name: &str, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self { name: name.to_string(), f: Arc::new(f), df: None }
    }

    pub fn with_derivative(
        name: &str,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        df: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self { name: name.to_string(), f: Arc::new(f), df: Some(Arc::new(df)) }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn value(&self, x: f64) -> f64 {
        (self.f)(x)
    }

    /// Exact derivative when supplied, else a central difference.
    pub fn derivative(&self, x: f64) -> f64 {
        match &self.df {
            Some(df) => df(x),
            None => {
                let h = 1e-6 * x.abs().max(1.0);
                ((self.f)(x + h) - (self.f)(x - h)) / (2.0 * h)
            }
        }
    }

    pub fn constant(c: f64) -> Self {
        Self::with_derivative("constant", move |_| c, |_| 0.0)
    }

    pub fn identity() -> Self {
        Self::with_derivative("identity", |x| x, |_| 1.0)
    }

    pub fn sine() -> Self {
        Self::with_derivative("sin", f64::sin, f64::cos)
    }

    pub fn exp_scaled(a: f64) -> Self {
        Self::with_derivative("exp", move |x| (a * x).exp(), move |x| a * (a * x).exp())
    }

    pub fn one_plus_square() -> Self {
        Self::with_derivative("one_plus_square", |x| 1.0 + x * x, |x| 2.0 * x)
    }

    pub fn abs_shifted(a: f64) -> Self {
        Self::with_derivative("abs", move |x| (x - a).abs(), move |x| if x >= a { 1.0 } else { -1.0 })
    }

    /// Looks up a named smooth fixture: identity, sin, cos, tanh, atan.
    pub fn by_name(name: &str) -> Option<Self> {
        Some(match name {
            "identity" => Self::identity(),
            "sin" => Self::sine(),
            "cos" => Self::with_derivative("cos", f64::cos, |x| -x.sin()),
            "tanh" => Self::with_derivative("tanh", f64::tanh, |x| 1.0 - x.tanh().powi(2)),
            "atan" => Self::with_derivative("atan", f64::atan, |x| 1.0 / (1.0 + x * x)),
            _ => return None,
        })
    }
}

/// The measure a functional inequality is checked against.
#[derive(Debug, Clone, Copy)]
pub enum MeasureTarget<'a> {
    /// One-dimensional law, integrated by quadrature.
    Line(&'a MeasureModel),
    /// Product measure with additively separable test functions
    /// g(x) = sum_i h(x_i), estimated by Monte Carlo.
    Product(&'a ProductMeasureSpec, &'a MonteCarloPlan),
}

/// Expectation of `h` under `law` by adaptive quadrature split at the law's breakpoints.
pub fn expectation(law: &AnalyticDistribution, h: impl Fn(f64) -> f64) -> Integral {
    let (lo, hi) = law.support();
    let mut cuts = vec![lo];
    cuts.extend(crate::cdf::CdfLike::breakpoints(law).into_iter().filter(|x| *x > lo && *x < hi));
    cuts.push(hi);
    let cfg = QuadConfig { abs_tol: 1e-14, rel_tol: 1e-12, max_intervals: 4000 };
    let mut total = Integral { value: 0.0, abs_error: 0.0 };
    for w in cuts.windows(2) {
        let r = integrate_line(
            |x| {
                let p = law.pdf(x);
                if p == 0.0 { 0.0 } else { h(x) * p }
            },
            w[0],
            w[1],
            cfg,
        );
        total.value += r.value;
        total.abs_error += r.abs_error;
    }
    total
}

/// Quadrature error floor used as the standard error of deterministic sides.
fn quad_floor(parts: &[f64], reported: f64) -> f64 {
    let scale: f64 = parts.iter().map(|v| v.abs()).sum::<f64>() + 1.0;
    reported.max(1e-12 * scale)
}

fn finite(v: f64, what: &str) -> Result<f64> {
    if v.is_finite() { Ok(v) } else { Err(Error::NonFiniteMoment(what.to_string())) }
}

/// Var(g) <= sigma^2 E|g'|^2.
pub fn check_pi_on_function(target: MeasureTarget<'_>, g: &TestFunction) -> Result<BoundReport> {
    const ID: &str = "PI_FUNCTION";
    match target {
        MeasureTarget::Line(m) => {
            let sigma2 = m.pi_constant.ok_or_else(|| missing(ID, "sigma^2 (Poincare)"))?;
            let mean = expectation(&m.base, |x| g.value(x));
            let mu = finite(mean.value, "E g")?;
            let var = expectation(&m.base, |x| (g.value(x) - mu).powi(2));
            let grad = expectation(&m.base, |x| g.derivative(x).powi(2));
            let lhs = finite(var.value, "Var g")?;
            let rhs = sigma2 * finite(grad.value, "E g'^2")?;
            let err = quad_floor(&[lhs, rhs], var.abs_error + sigma2 * grad.abs_error);
            Ok(BoundReport::inequality(ID, g.name(), 1, lhs, err, rhs, 3.0)
                .with_meta("law", m.base.id())
                .with_meta("sigma2", sigma2))
        }
        MeasureTarget::Product(spec, plan) => {
            let sigma2 = spec.coordinate_model.pi_constant.ok_or_else(|| missing(ID, "sigma^2 (Poincare)"))?;
            let draws = replicate(plan.master_seed, 0, plan.replications, |rng, _| {
                let x = spec.sample(rng);
                let val: f64 = x.iter().map(|&xi| g.value(xi)).sum();
                let grad: f64 = x.iter().map(|&xi| g.derivative(xi).powi(2)).sum();
                (val, grad)
            });
            let vals: Vec<f64> = draws.iter().map(|d| d.0).collect();
            let grads: Vec<f64> = draws.iter().map(|d| d.1).collect();
            let m = mean_estimate(&vals);
            let centered: Vec<f64> = vals.iter().map(|v| (v - m.value).powi(2)).collect();
            let var = mean_estimate(&centered);
            let r = vals.len() as f64;
            let lhs = finite(var.value * r / (r - 1.0), "Var g")?;
            let grad = mean_estimate(&grads);
            let rhs = sigma2 * finite(grad.value, "E|grad g|^2")?;
            let err = (var.stderr.powi(2) + (sigma2 * grad.stderr).powi(2)).sqrt();
            Ok(BoundReport::inequality(ID, g.name(), spec.n, lhs, err, rhs, plan.slack_sigmas)
                .with_meta("law", spec.coordinate_model.base.id())
                .with_meta("sigma2", sigma2)
                .with_meta("replications", plan.replications))
        }
    }
}

fn entropy_of_square(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let sq: Vec<f64> = values.iter().map(|v| v * v).collect();
    let m = sq.iter().sum::<f64>() / n;
    let a = sq.iter().map(|&s| s * s.max(1e-300).ln()).sum::<f64>() / n;
    if m <= 0.0 { 0.0 } else { a - m * m.ln() }
}

/// Ent(g^2) <= 2 sigma^2 E|g'|^2.
pub fn check_lsi_on_function(target: MeasureTarget<'_>, g: &TestFunction) -> Result<BoundReport> {
    const ID: &str = "LSI_FUNCTION";
    match target {
        MeasureTarget::Line(m) => {
            let sigma2 = m.lsi_constant.ok_or_else(|| missing(ID, "sigma^2 (log-Sobolev)"))?;
            let sq = expectation(&m.base, |x| g.value(x).powi(2));
            let xlogx = expectation(&m.base, |x| {
                let s = g.value(x).powi(2);
                s * s.max(1e-300).ln()
            });
            let grad = expectation(&m.base, |x| g.derivative(x).powi(2));
            let msq = finite(sq.value, "E g^2")?;
            let ent = finite(xlogx.value, "E g^2 log g^2")? - if msq > 0.0 { msq * msq.ln() } else { 0.0 };
            let rhs = 2.0 * sigma2 * finite(grad.value, "E g'^2")?;
            let err_rep = xlogx.abs_error + sq.abs_error * (1.0 + msq.max(1e-300).ln().abs()) + 2.0 * sigma2 * grad.abs_error;
            let err = quad_floor(&[xlogx.value, msq * msq.max(1e-300).ln(), rhs], err_rep);
            Ok(BoundReport::inequality(ID, g.name(), 1, ent, err, rhs, 3.0)
                .with_meta("law", m.base.id())
                .with_meta("sigma2", sigma2))
        }
        MeasureTarget::Product(spec, plan) => {
            let sigma2 = spec.coordinate_model.lsi_constant.ok_or_else(|| missing(ID, "sigma^2 (log-Sobolev)"))?;
            let draws = replicate(plan.master_seed, 0, plan.replications, |rng, _| {
                let x = spec.sample(rng);
                let val: f64 = x.iter().map(|&xi| g.value(xi)).sum();
                let grad: f64 = x.iter().map(|&xi| g.derivative(xi).powi(2)).sum();
                (val, grad)
            });
            let vals: Vec<f64> = draws.iter().map(|d| d.0).collect();
            let grads: Vec<f64> = draws.iter().map(|d| d.1).collect();
            let ent = batch_means(&vals, 20, entropy_of_square);
            let grad = mean_estimate(&grads);
            let rhs = 2.0 * sigma2 * finite(grad.value, "E|grad g|^2")?;
            let err = (ent.stderr.powi(2) + (2.0 * sigma2 * grad.stderr).powi(2)).sqrt();
            Ok(BoundReport::inequality(ID, g.name(), spec.n, finite(ent.value, "Ent g^2")?, err, rhs, plan.slack_sigmas)
                .with_meta("law", spec.coordinate_model.base.id())
                .with_meta("sigma2", sigma2)
                .with_meta("replications", plan.replications))
        }
    }
}

fn missing(bound: &str, symbol: &str) -> Error {
    Error::MissingConstant { bound: bound.to_string(), symbol: symbol.to_string() }
}

/// Exponential and L^p moments of mean-zero 1-Lipschitz functions:
/// E exp(t g / sigma) <= (2 + t)/(2 - t) for 0 < t < 2 and
/// ||g||_p <= sigma p. The report carries the worst lhs/rhs ratio over
/// g(x) = x - E x and g(x) = |x - a| - E|x - a| with a in {median, median + sigma},
/// t in {0.5, 1, 1.5} and p in {2, 3, 4}; it passes when the ratio is at most 1.
pub fn check_exp_moment(m: &MeasureModel) -> Result<BoundReport> {
    const ID: &str = "EXP_MOMENT";
    let sigma2 = m.pi_constant.ok_or_else(|| missing(ID, "sigma^2 (Poincare)"))?;
    let sigma = sigma2.sqrt();
    let law = &m.base;
    let mut family: Vec<(String, Arc<dyn Fn(f64) -> f64 + Send + Sync>)> = Vec::new();
    let mean = law.mean();
    family.push(("x-Ex".to_string(), Arc::new(move |x: f64| x - mean)));
    for a in [m.median, m.median + sigma] {
        let ea = expectation(law, |x| (x - a).abs()).value;
        family.push((format!("|x-{a}|-E"), Arc::new(move |x: f64| (x - a).abs() - ea)));
    }
    let mut worst = 0.0_f64;
    let mut worst_label = String::new();
    let mut err_total = 0.0;
    for (label, g) in &family {
        for t in [0.5, 1.0, 1.5] {
            let e = expectation(law, |x| (t * g(x) / sigma).exp());
            let lhs = finite(e.value, "exponential moment")?;
            let rhs = (2.0 + t) / (2.0 - t);
            err_total += e.abs_error / rhs;
            if lhs / rhs > worst {
                worst = lhs / rhs;
                worst_label = format!("{label}, t={t}");
            }
        }
        for p in [2.0_f64, 3.0, 4.0] {
            let e = expectation(law, |x| g(x).abs().powf(p));
            let norm = finite(e.value, "L^p moment")?.powf(1.0 / p);
            let rhs = sigma * p;
            if norm / rhs > worst {
                worst = norm / rhs;
                worst_label = format!("{label}, p={p}");
            }
        }
    }
    let err = quad_floor(&[worst], err_total);
    Ok(BoundReport::inequality(ID, "worst_ratio", 1, worst, err, 1.0, 3.0)
        .with_meta("law", law.id())
        .with_meta("sigma2", sigma2)
        .with_meta("worst_case", worst_label))
}

/// The two infimum-convolution forms of the log-Sobolev inequality on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct InfConvLsiReport {
    /// log E e^g <= E P_{sigma^2} g
    pub sup_form: BoundReport,
    /// log E e^{Q_{sigma^2} g} <= E g
    pub inf_form: BoundReport,
}

impl InfConvLsiReport {
    pub fn pass(&self) -> bool {
        self.sup_form.pass && self.inf_form.pass
    }
}

/// Evaluates both sides with Simpson's rule against the density on the grid
/// span, normalized by the captured mass; each passes with 1e-6 slack.
pub fn infconv_lsi_check(m: &MeasureModel, g: &GridFunction) -> Result<InfConvLsiReport> {
    const ID: &str = "INFCONV_LSI";
    let sigma2 = m.lsi_constant.ok_or_else(|| missing(ID, "sigma^2 (log-Sobolev)"))?;
    if g.values().iter().any(|v| !v.is_finite()) {
        return Err(invalid("test function must be finite on the grid"));
    }
    let law = m.base;
    let (x0, dx) = (g.x0(), g.dx());
    let density = |x: f64| law.pdf(x);
    let ones = vec![1.0; g.len()];
    let mass = integrate_against(&ones, x0, dx, density);
    if !(mass > 0.0) {
        return Err(invalid("grid carries no mass"));
    }
    let avg = |vals: &[f64]| integrate_against(vals, x0, dx, density) / mass;
    let gmax = g.values().iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let log_mean_exp = |vals: &[f64]| {
        let shift = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max).max(gmax);
        let e: Vec<f64> = vals.iter().map(|v| (v - shift).exp()).collect();
        avg(&e).ln() + shift
    };
    let p = sup_convolution(g, sigma2)?;
    let q = inf_convolution(g, sigma2)?;
    let lhs_p = log_mean_exp(g.values());
    let rhs_p = avg(p.values());
    let lhs_q = log_mean_exp(q.values());
    let rhs_q = avg(g.values());
    let tol = 1e-6 / 3.0;
    let base = |variant: &str, lhs: f64, rhs: f64| {
        BoundReport::inequality(ID, variant, 1, lhs, tol, rhs, 3.0)
            .with_meta("law", law.id())
            .with_meta("sigma2", sigma2)
            .with_meta("captured_mass", mass)
    };
    Ok(InfConvLsiReport { sup_form: base("sup_form", lhs_p, rhs_p), inf_form: base("inf_form", lhs_q, rhs_q) })
}
