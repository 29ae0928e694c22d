//! Analytic reference laws on the real line.

use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

use rand::Rng;
use rand_distr::{Distribution, Open01, StandardNormal};
use serde::{Deserialize, Serialize};
use libm::erfc;
use statrs::function::erf::erfc_inv;

use crate::cdf::CdfLike;
use crate::error::{invalid, Result};

/// A law with closed-form density, CDF and quantile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum AnalyticDistribution {
    Gaussian { mean: f64, sd: f64 },
    Uniform { lo: f64, hi: f64 },
    /// Density e^{-|x-loc|/scale} / (2 scale).
    TwoSidedExponential { loc: f64, scale: f64 },
    /// Semicircle on [center - radius, center + radius].
    Semicircle { center: f64, radius: f64 },
    /// Equal mixture of uniform laws on [lo, gap_lo] and [gap_hi, hi]; the
    /// density vanishes on the gap.
    GappedUniform { lo: f64, gap_lo: f64, gap_hi: f64, hi: f64 },
}

pub use AnalyticDistribution as Law;

fn std_normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z * FRAC_1_SQRT_2)
}

fn std_normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * PI).sqrt()
}

/// Inverse of the upper tail of the standard normal, polished by one Newton step.
fn std_normal_isf(q: f64) -> f64 {
    if q <= 0.0 {
        return f64::INFINITY;
    }
    if q >= 1.0 {
        return f64::NEG_INFINITY;
    }
    let z = SQRT_2 * erfc_inv(2.0 * q);
    let d = std_normal_pdf(z);
    if d > 0.0 {
        z + (0.5 * erfc(z * FRAC_1_SQRT_2) - q) / d
    } else {
        z
    }
}

fn semicircle_std_pdf(u: f64) -> f64 {
    if u.abs() >= 2.0 {
        0.0
    } else {
        (4.0 - u * u).sqrt() / (2.0 * PI)
    }
}

fn semicircle_std_cdf(u: f64) -> f64 {
    if u <= -2.0 {
        0.0
    } else if u >= 2.0 {
        1.0
    } else {
        (0.5 + u * (4.0 - u * u).sqrt() / (4.0 * PI) + (0.5 * u).asin() / PI).clamp(0.0, 1.0)
    }
}

fn semicircle_std_integrated(u: f64) -> f64 {
    if u <= -2.0 {
        0.0
    } else if u >= 2.0 {
        u
    } else {
        let w = (4.0 - u * u).sqrt();
        0.5 * u - w * w * w / (12.0 * PI) + (u * (0.5 * u).asin() + w) / PI
    }
}

fn semicircle_std_quantile(p: f64) -> f64 {
    if p <= 0.0 {
        return -2.0;
    }
    if p >= 1.0 {
        return 2.0;
    }
    let (mut lo, mut hi) = (-2.0_f64, 2.0_f64);
    for _ in 0..200 {
        if hi - lo <= 1e-13 {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if semicircle_std_cdf(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn uniform_integrated(lo: f64, hi: f64, x: f64) -> f64 {
    if x <= lo {
        0.0
    } else if x >= hi {
        x - 0.5 * (lo + hi)
    } else {
        (x - lo) * (x - lo) / (2.0 * (hi - lo))
    }
}

impl AnalyticDistribution {
    pub fn gaussian(mean: f64, var: f64) -> Result<Self> {
        if !(var > 0.0 && var.is_finite() && mean.is_finite()) {
            return Err(invalid(format!("gaussian needs finite mean and positive variance, got ({mean}, {var})")));
        }
        Ok(Self::Gaussian { mean, sd: var.sqrt() })
    }

    pub fn standard_gaussian() -> Self {
        Self::Gaussian { mean: 0.0, sd: 1.0 }
    }

    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi && lo.is_finite() && hi.is_finite()) {
            return Err(invalid(format!("uniform needs lo < hi, got ({lo}, {hi})")));
        }
        Ok(Self::Uniform { lo, hi })
    }

    pub fn two_sided_exponential() -> Self {
        Self::TwoSidedExponential { loc: 0.0, scale: 1.0 }
    }

    pub fn semicircle() -> Self {
        Self::Semicircle { center: 0.0, radius: 2.0 }
    }

    pub fn gapped_uniform(lo: f64, gap_lo: f64, gap_hi: f64, hi: f64) -> Result<Self> {
        if !(lo < gap_lo && gap_lo < gap_hi && gap_hi < hi) || !(lo.is_finite() && hi.is_finite()) {
            return Err(invalid("gapped uniform needs lo < gap_lo < gap_hi < hi"));
        }
        Ok(Self::GappedUniform { lo, gap_lo, gap_hi, hi })
    }

    /// Checks the parameters of a value built directly (e.g. deserialized).
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Self::Gaussian { mean, sd } => mean.is_finite() && sd > 0.0 && sd.is_finite(),
            Self::Uniform { lo, hi } => lo.is_finite() && hi.is_finite() && lo < hi,
            Self::TwoSidedExponential { loc, scale } => loc.is_finite() && scale > 0.0 && scale.is_finite(),
            Self::Semicircle { center, radius } => center.is_finite() && radius > 0.0 && radius.is_finite(),
            Self::GappedUniform { lo, gap_lo, gap_hi, hi } => {
                lo.is_finite() && hi.is_finite() && lo < gap_lo && gap_lo < gap_hi && gap_hi < hi
            }
        };
        if ok { Ok(()) } else { Err(invalid(format!("invalid law parameters: {self:?}"))) }
    }

    pub fn id(&self) -> &'static str {
        match self {
            Self::Gaussian { .. } => "gaussian",
            Self::Uniform { .. } => "uniform",
            Self::TwoSidedExponential { .. } => "two_sided_exponential",
            Self::Semicircle { .. } => "semicircle",
            Self::GappedUniform { .. } => "gapped_uniform",
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        match *self {
            Self::Gaussian { mean, sd } => std_normal_pdf((x - mean) / sd) / sd,
            Self::Uniform { lo, hi } => {
                if x >= lo && x < hi { 1.0 / (hi - lo) } else { 0.0 }
            }
            Self::TwoSidedExponential { loc, scale } => (-(x - loc).abs() / scale).exp() / (2.0 * scale),
            Self::Semicircle { center, radius } => {
                let k = 2.0 / radius;
                k * semicircle_std_pdf((x - center) * k)
            }
            Self::GappedUniform { lo, gap_lo, gap_hi, hi } => {
                if x >= lo && x < gap_lo {
                    0.5 / (gap_lo - lo)
                } else if x >= gap_hi && x < hi {
                    0.5 / (hi - gap_hi)
                } else {
                    0.0
                }
            }
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match *self {
            Self::Gaussian { mean, sd } => std_normal_cdf((x - mean) / sd),
            Self::Uniform { lo, hi } => ((x - lo) / (hi - lo)).clamp(0.0, 1.0),
            Self::TwoSidedExponential { loc, scale } => {
                let z = (x - loc) / scale;
                if z <= 0.0 { 0.5 * z.exp() } else { 1.0 - 0.5 * (-z).exp() }
            }
            Self::Semicircle { center, radius } => semicircle_std_cdf((x - center) * 2.0 / radius),
            Self::GappedUniform { lo, gap_lo, gap_hi, hi } => {
                if x <= gap_lo {
                    0.5 * ((x - lo) / (gap_lo - lo)).clamp(0.0, 1.0)
                } else if x <= gap_hi {
                    0.5
                } else {
                    0.5 + 0.5 * ((x - gap_hi) / (hi - gap_hi)).clamp(0.0, 1.0)
                }
            }
        }
    }

    /// Survival function 1 - F(x), computed without cancellation where possible.
    pub fn sf(&self, x: f64) -> f64 {
        match *self {
            Self::Gaussian { mean, sd } => 0.5 * erfc((x - mean) / sd * FRAC_1_SQRT_2),
            Self::TwoSidedExponential { loc, scale } => {
                let z = (x - loc) / scale;
                if z >= 0.0 { 0.5 * (-z).exp() } else { 1.0 - 0.5 * z.exp() }
            }
            Self::Semicircle { center, radius } => semicircle_std_cdf(-(x - center) * 2.0 / radius),
            _ => 1.0 - self.cdf(x),
        }
    }

    pub fn quantile(&self, p: f64) -> f64 {
        match *self {
            Self::Gaussian { mean, sd } => mean - sd * std_normal_isf(p),
            Self::Uniform { lo, hi } => lo + p.clamp(0.0, 1.0) * (hi - lo),
            Self::TwoSidedExponential { loc, scale } => {
                if p <= 0.0 {
                    f64::NEG_INFINITY
                } else if p >= 1.0 {
                    f64::INFINITY
                } else if p < 0.5 {
                    loc + scale * (2.0 * p).ln()
                } else {
                    loc - scale * (2.0 * (1.0 - p)).ln()
                }
            }
            Self::Semicircle { center, radius } => center + 0.5 * radius * semicircle_std_quantile(p),
            Self::GappedUniform { lo, gap_lo, gap_hi, hi } => {
                let p = p.clamp(0.0, 1.0);
                if p <= 0.5 {
                    lo + 2.0 * p * (gap_lo - lo)
                } else {
                    gap_hi + (2.0 * p - 1.0) * (hi - gap_hi)
                }
            }
        }
    }

    /// Inverse survival function: the x with 1 - F(x) = q.
    pub fn isf(&self, q: f64) -> f64 {
        match *self {
            Self::Gaussian { mean, sd } => mean + sd * std_normal_isf(q),
            Self::Uniform { lo, hi } => hi - q.clamp(0.0, 1.0) * (hi - lo),
            Self::TwoSidedExponential { loc, scale } => {
                if q <= 0.0 {
                    f64::INFINITY
                } else if q >= 1.0 {
                    f64::NEG_INFINITY
                } else if q <= 0.5 {
                    loc - scale * (2.0 * q).ln()
                } else {
                    loc + scale * (2.0 * (1.0 - q)).ln()
                }
            }
            Self::Semicircle { center, radius } => center - 0.5 * radius * semicircle_std_quantile(q),
            Self::GappedUniform { lo, gap_lo, gap_hi, hi } => {
                let q = q.clamp(0.0, 1.0);
                if q <= 0.5 {
                    hi - 2.0 * q * (hi - gap_hi)
                } else {
                    gap_lo - (2.0 * q - 1.0) * (gap_lo - lo)
                }
            }
        }
    }

    pub fn support(&self) -> (f64, f64) {
        match *self {
            Self::Gaussian { .. } | Self::TwoSidedExponential { .. } => (f64::NEG_INFINITY, f64::INFINITY),
            Self::Uniform { lo, hi } | Self::GappedUniform { lo, hi, .. } => (lo, hi),
            Self::Semicircle { center, radius } => (center - radius, center + radius),
        }
    }

    /// Supremum of the density, i.e. the Lipschitz seminorm of the CDF.
    pub fn lipschitz_m(&self) -> f64 {
        match *self {
            Self::Gaussian { sd, .. } => 1.0 / (sd * (2.0 * PI).sqrt()),
            Self::Uniform { lo, hi } => 1.0 / (hi - lo),
            Self::TwoSidedExponential { scale, .. } => 0.5 / scale,
            Self::Semicircle { radius, .. } => 2.0 / (PI * radius),
            Self::GappedUniform { lo, gap_lo, gap_hi, hi } => (0.5 / (gap_lo - lo)).max(0.5 / (hi - gap_hi)),
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            Self::Gaussian { mean, .. } => mean,
            Self::Uniform { lo, hi } => 0.5 * (lo + hi),
            Self::TwoSidedExponential { loc, .. } => loc,
            Self::Semicircle { center, .. } => center,
            Self::GappedUniform { lo, gap_lo, gap_hi, hi } => 0.25 * (lo + gap_lo + gap_hi + hi),
        }
    }

    pub fn variance(&self) -> f64 {
        match *self {
            Self::Gaussian { sd, .. } => sd * sd,
            Self::Uniform { lo, hi } => (hi - lo).powi(2) / 12.0,
            Self::TwoSidedExponential { scale, .. } => 2.0 * scale * scale,
            Self::Semicircle { radius, .. } => radius * radius / 4.0,
            Self::GappedUniform { lo, gap_lo, gap_hi, hi } => {
                let m2 = |a: f64, b: f64| (a * a + a * b + b * b) / 3.0;
                let mean = self.mean();
                0.5 * (m2(lo, gap_lo) + m2(gap_hi, hi)) - mean * mean
            }
        }
    }

    /// A point with F = 1/2 (the middle of the gap for gapped laws).
    pub fn median(&self) -> f64 {
        match *self {
            Self::GappedUniform { gap_lo, gap_hi, .. } => 0.5 * (gap_lo + gap_hi),
            _ => self.mean(),
        }
    }

    /// E(x - X)^+ = integral of F over (-inf, x].
    pub fn integrated_cdf(&self, x: f64) -> f64 {
        match *self {
            Self::Gaussian { mean, sd } => {
                let z = (x - mean) / sd;
                sd * (z * std_normal_cdf(z) + std_normal_pdf(z))
            }
            Self::Uniform { lo, hi } => uniform_integrated(lo, hi, x),
            Self::TwoSidedExponential { loc, scale } => {
                let z = (x - loc) / scale;
                if z <= 0.0 { 0.5 * scale * z.exp() } else { (x - loc) + 0.5 * scale * (-z).exp() }
            }
            Self::Semicircle { center, radius } => {
                let u = (x - center) * 2.0 / radius;
                if u >= 2.0 { x - center } else { 0.5 * radius * semicircle_std_integrated(u) }
            }
            Self::GappedUniform { lo, gap_lo, gap_hi, hi } => {
                0.5 * (uniform_integrated(lo, gap_lo, x) + uniform_integrated(gap_hi, hi, x))
            }
        }
    }

    /// Draws one variate as location + scale * (standard variate), so that
    /// rescaling the law rescales the draws exactly.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Self::Gaussian { mean, sd } => {
                let z: f64 = StandardNormal.sample(rng);
                mean + sd * z
            }
            Self::Uniform { lo, hi } => {
                let u: f64 = rng.random();
                lo + (hi - lo) * u
            }
            Self::TwoSidedExponential { loc, scale } => {
                let u: f64 = Open01.sample(rng);
                let e = -u.ln();
                let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
                loc + scale * sign * e
            }
            Self::Semicircle { center, radius } => {
                // First coordinate of a uniform point in the unit disk.
                let r = rng.random::<f64>().sqrt();
                let theta = 2.0 * PI * rng.random::<f64>();
                center + radius * r * theta.cos()
            }
            Self::GappedUniform { lo, gap_lo, gap_hi, hi } => {
                let u: f64 = rng.random();
                if rng.random::<bool>() { lo + (gap_lo - lo) * u } else { gap_hi + (hi - gap_hi) * u }
            }
        }
    }

    /// Law of a + b X for b > 0.
    pub fn affine(&self, a: f64, b: f64) -> Result<Self> {
        if !(b > 0.0 && b.is_finite() && a.is_finite()) {
            return Err(invalid(format!("affine map needs b > 0, got b = {b}")));
        }
        let t = |x: f64| a + b * x;
        Ok(match *self {
            Self::Gaussian { mean, sd } => Self::Gaussian { mean: t(mean), sd: b * sd },
            Self::Uniform { lo, hi } => Self::Uniform { lo: t(lo), hi: t(hi) },
            Self::TwoSidedExponential { loc, scale } => Self::TwoSidedExponential { loc: t(loc), scale: b * scale },
            Self::Semicircle { center, radius } => Self::Semicircle { center: t(center), radius: b * radius },
            Self::GappedUniform { lo, gap_lo, gap_hi, hi } => {
                Self::GappedUniform { lo: t(lo), gap_lo: t(gap_lo), gap_hi: t(gap_hi), hi: t(hi) }
            }
        })
    }

    /// The affine image with mean 0 and variance 1.
    pub fn standardized(&self) -> Result<Self> {
        let var = self.variance();
        if !(var > 0.0 && var.is_finite()) {
            return Err(invalid("law has no finite positive variance"));
        }
        let s = var.sqrt();
        self.affine(-self.mean() / s, 1.0 / s)
    }

    /// Known Poincare constant, where one is available in closed form.
    pub fn pi_constant(&self) -> Option<f64> {
        match *self {
            Self::Gaussian { sd, .. } => Some(sd * sd),
            Self::Uniform { lo, hi } => Some(((hi - lo) / PI).powi(2)),
            Self::TwoSidedExponential { scale, .. } => Some(4.0 * scale * scale),
            Self::Semicircle { .. } | Self::GappedUniform { .. } => None,
        }
    }

    /// Known log-Sobolev constant, where one is available in closed form.
    pub fn lsi_constant(&self) -> Option<f64> {
        match *self {
            Self::Gaussian { sd, .. } => Some(sd * sd),
            Self::Uniform { lo, hi } => Some(((hi - lo) / PI).powi(2)),
            _ => None,
        }
    }
}

impl CdfLike for AnalyticDistribution {
    fn cdf(&self, x: f64) -> f64 {
        AnalyticDistribution::cdf(self, x)
    }
    fn quantile(&self, p: f64) -> f64 {
        AnalyticDistribution::quantile(self, p)
    }
    fn mean(&self) -> f64 {
        AnalyticDistribution::mean(self)
    }
    fn integrated_cdf(&self, x: f64) -> Option<f64> {
        Some(AnalyticDistribution::integrated_cdf(self, x))
    }
    fn breakpoints(&self) -> Vec<f64> {
        match *self {
            Self::Gaussian { mean, .. } => vec![mean],
            Self::TwoSidedExponential { loc, .. } => vec![loc],
            Self::Uniform { lo, hi } => vec![lo, hi],
            Self::Semicircle { center, radius } => vec![center - radius, center + radius],
            Self::GappedUniform { lo, gap_lo, gap_hi, hi } => vec![lo, gap_lo, gap_hi, hi],
        }
    }
}

/// Named fixture laws.
pub fn standard_library() -> Vec<AnalyticDistribution> {
    vec![
        AnalyticDistribution::standard_gaussian(),
        AnalyticDistribution::Uniform { lo: 0.0, hi: 1.0 },
        AnalyticDistribution::two_sided_exponential(),
        AnalyticDistribution::semicircle(),
    ]
}

/// Both sides of the semicircle increment estimate
/// G(x+h) - G(x-h) <= 2 g(x) h + (4 / 3pi) h^{3/2}.
pub fn semicircle_increment_bound(x: f64, h: f64) -> Result<(f64, f64)> {
    if !(h > 0.0) {
        return Err(invalid("increment width must be positive"));
    }
    let increment = semicircle_std_cdf(x + h) - semicircle_std_cdf(x - h);
    let bound = 2.0 * semicircle_std_pdf(x) * h + 4.0 / (3.0 * PI) * h.powf(1.5);
    Ok((increment, bound))
}

/// Equal-weight mixture of laws: the marginal F = (1/n) sum F_i of a
/// product measure with non-identical coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct MarginalMixture {
    components: Vec<AnalyticDistribution>,
}

impl MarginalMixture {
    pub fn new(components: Vec<AnalyticDistribution>) -> Result<Self> {
        if components.is_empty() {
            return Err(invalid("mixture needs at least one component"));
        }
        Ok(Self { components })
    }

    /// Mixture of `law` shifted by each entry of `shifts`.
    pub fn shifted(law: AnalyticDistribution, shifts: &[f64]) -> Result<Self> {
        let comps = shifts.iter().map(|&s| law.affine(s, 1.0)).collect::<Result<Vec<_>>>()?;
        Self::new(comps)
    }

    pub fn components(&self) -> &[AnalyticDistribution] {
        &self.components
    }

    fn avg(&self, f: impl Fn(&AnalyticDistribution) -> f64) -> f64 {
        self.components.iter().map(f).sum::<f64>() / self.components.len() as f64
    }

    pub fn pdf(&self, x: f64) -> f64 {
        self.avg(|c| c.pdf(x))
    }

    pub fn cdf(&self, x: f64) -> f64 {
        self.avg(|c| c.cdf(x))
    }

    pub fn support(&self) -> (f64, f64) {
        self.components.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), c| {
            let (lo, hi) = c.support();
            (a.min(lo), b.max(hi))
        })
    }

    pub fn quantile(&self, p: f64) -> f64 {
        let p = p.clamp(0.0, 1.0);
        let mut lo = self.components.iter().map(|c| c.quantile(p)).fold(f64::INFINITY, f64::min);
        let mut hi = self.components.iter().map(|c| c.quantile(p)).fold(f64::NEG_INFINITY, f64::max);
        if !lo.is_finite() || !hi.is_finite() || lo == hi {
            return lo;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.cdf(mid) < p {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi
    }

    /// Supremum of the mixture density, located by a scan plus the
    /// component modes and support ends.
    pub fn lipschitz_m(&self) -> f64 {
        let (lo, hi) = self.support();
        let lo = if lo.is_finite() { lo } else { self.quantile(1e-9) };
        let hi = if hi.is_finite() { hi } else { self.quantile(1.0 - 1e-9) };
        let mut best = 0.0_f64;
        let steps = 20_000;
        for k in 0..=steps {
            let x = lo + (hi - lo) * k as f64 / steps as f64;
            best = best.max(self.pdf(x));
        }
        for c in &self.components {
            for x in c.breakpoints() {
                best = best.max(self.pdf(x));
            }
            best = best.max(self.pdf(c.median()));
        }
        best
    }
}

impl CdfLike for MarginalMixture {
    fn cdf(&self, x: f64) -> f64 {
        MarginalMixture::cdf(self, x)
    }
    fn quantile(&self, p: f64) -> f64 {
        MarginalMixture::quantile(self, p)
    }
    fn mean(&self) -> f64 {
        self.avg(|c| c.mean())
    }
    fn integrated_cdf(&self, x: f64) -> Option<f64> {
        Some(self.avg(|c| c.integrated_cdf(x)))
    }
    fn breakpoints(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.components.iter().flat_map(|c| c.breakpoints()).collect();
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    }
}
