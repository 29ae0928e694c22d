//! Empirical distribution functions, the Kolmogorov and Kantorovich-Rubinstein
//! distances, and the partition estimate for L1 distances on an interval.

use serde::{Deserialize, Serialize};

use crate::cdf::CdfLike;
use crate::error::{invalid, Error, Result};
use crate::quad::{integrate, QuadConfig};

/// Tail level used to truncate unbounded supports in quadrature paths.
pub const TAIL_LEVEL: f64 = 1e-9;

/// Step CDF with mass 1/n at each (sorted) atom. Duplicates are kept.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalCdf {
    atoms: Vec<f64>,
}

/// Sorts the sample into an [`EmpiricalCdf`].
pub fn build_empirical(samples: &[f64]) -> Result<EmpiricalCdf> {
    EmpiricalCdf::new(samples.to_vec())
}

impl EmpiricalCdf {
    pub fn new(mut samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptySample);
        }
        if samples.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFiniteSample);
        }
        samples.sort_by(f64::total_cmp);
        Ok(Self { atoms: samples })
    }

    /// Pools several samples into one empirical law.
    pub fn pooled(parts: &[EmpiricalCdf]) -> Result<Self> {
        let all: Vec<f64> = parts.iter().flat_map(|p| p.atoms.iter().copied()).collect();
        Self::new(all)
    }

    pub fn atoms(&self) -> &[f64] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Number of atoms <= x.
    pub fn count_le(&self, x: f64) -> usize {
        self.atoms.partition_point(|a| *a <= x)
    }

    /// Number of atoms < x.
    pub fn count_lt(&self, x: f64) -> usize {
        self.atoms.partition_point(|a| *a < x)
    }

    /// Number of atoms in the closed-open interval [a, b).
    pub fn count_in(&self, a: f64, b: f64) -> usize {
        self.count_lt(b).saturating_sub(self.count_lt(a))
    }

    pub fn cdf_eval(&self, x: f64) -> f64 {
        self.count_le(x) as f64 / self.len() as f64
    }

    pub fn mean(&self) -> f64 {
        self.atoms.iter().sum::<f64>() / self.len() as f64
    }

    /// Integral of F_n over (-inf, x] = (1/n) sum (x - x_i)^+.
    pub fn integrated_cdf(&self, x: f64) -> f64 {
        let k = self.count_le(x);
        self.atoms[..k].iter().map(|a| x - a).sum::<f64>() / self.len() as f64
    }

    pub fn quantile(&self, p: f64) -> f64 {
        let n = self.len();
        let k = (p * n as f64).ceil() as usize;
        self.atoms[k.clamp(1, n) - 1]
    }

    /// Applies a strictly increasing map to every atom.
    pub fn map_increasing(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(self.atoms.iter().map(|&a| f(a)).collect())
    }
}

impl CdfLike for EmpiricalCdf {
    fn cdf(&self, x: f64) -> f64 {
        self.cdf_eval(x)
    }
    fn cdf_left(&self, x: f64) -> f64 {
        self.count_lt(x) as f64 / self.len() as f64
    }
    fn quantile(&self, p: f64) -> f64 {
        EmpiricalCdf::quantile(self, p)
    }
    fn mean(&self) -> f64 {
        EmpiricalCdf::mean(self)
    }
    fn atoms(&self) -> Option<&[f64]> {
        Some(&self.atoms)
    }
    fn integrated_cdf(&self, x: f64) -> Option<f64> {
        Some(EmpiricalCdf::integrated_cdf(self, x))
    }
    fn breakpoints(&self) -> Vec<f64> {
        let mut v = self.atoms.clone();
        v.dedup();
        v
    }
}

/// sup_x |F_n(x) - G(x)|, evaluated at the jump points of both arguments
/// using right values and left limits.
pub fn kolmogorov_distance(f_n: &EmpiricalCdf, g: &dyn CdfLike) -> f64 {
    if let Some(other) = g.atoms() {
        return kolmogorov_discrete(f_n.atoms(), other);
    }
    let n = f_n.len() as f64;
    let atoms = f_n.atoms();
    let mut best = 0.0_f64;
    let mut i = 0;
    while i < atoms.len() {
        let z = atoms[i];
        let mut j = i;
        while j < atoms.len() && atoms[j] == z {
            j += 1;
        }
        let right = (frac(j, n) - g.cdf(z)).abs();
        let left = (frac(i, n) - g.cdf_left(z)).abs();
        best = best.max(right).max(left);
        i = j;
    }
    best
}

/// sup |F - G| for two step functions, by a merge over the sorted atoms.
fn kolmogorov_discrete(a: &[f64], b: &[f64]) -> f64 {
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut best = 0.0_f64;
    while i < a.len() || j < b.len() {
        let z = match (a.get(i), b.get(j)) {
            (Some(&x), Some(&y)) => x.min(y),
            (Some(&x), None) => x,
            (None, Some(&y)) => y,
            (None, None) => unreachable!(),
        };
        while i < a.len() && a[i] == z {
            i += 1;
        }
        while j < b.len() && b[j] == z {
            j += 1;
        }
        best = best.max((i as f64 / na - j as f64 / nb).abs());
    }
    best
}

fn frac(count: usize, n: f64) -> f64 {
    count as f64 / n
}

/// (1/n) sum |x_i - x'_i| over sorted atoms of two samples of equal size.
pub fn w1_empirical(a: &EmpiricalCdf, b: &EmpiricalCdf) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::AtomCountMismatch(a.len(), b.len()));
    }
    let s: f64 = a.atoms.iter().zip(&b.atoms).map(|(x, y)| (x - y).abs()).sum();
    Ok(s / a.len() as f64)
}

/// Kantorovich-Rubinstein distance, the integral of |F - G| over the line.
pub fn w1_general(f: &dyn CdfLike, g: &dyn CdfLike) -> Result<f64> {
    l1_between(f, g, f64::NEG_INFINITY, f64::INFINITY)
}

/// Integral of |F - G| over [lo, hi]; either end may be infinite.
///
/// Exact when both laws are discrete, or when one is discrete and the other
/// has a closed-form integrated CDF. Otherwise adaptive quadrature is used on
/// the range cut at the 1e-9 quantile tails.
pub fn l1_between(f: &dyn CdfLike, g: &dyn CdfLike, lo: f64, hi: f64) -> Result<f64> {
    if !(lo <= hi) {
        return Err(invalid(format!("empty integration range [{lo}, {hi}]")));
    }
    if lo == hi {
        return Ok(0.0);
    }
    let unbounded = !lo.is_finite() || !hi.is_finite();
    if unbounded && !(f.mean().is_finite() && g.mean().is_finite()) {
        return Err(Error::W1NotFinite);
    }
    match (f.atoms(), g.atoms()) {
        (Some(a), Some(b)) => Ok(l1_discrete(a, b, lo, hi)),
        (Some(a), None) if g.integrated_cdf(0.0).is_some() => Ok(l1_step_vs_smooth(a, g, lo, hi)),
        (None, Some(b)) if f.integrated_cdf(0.0).is_some() => Ok(l1_step_vs_smooth(b, f, lo, hi)),
        _ => l1_quadrature(f, g, lo, hi),
    }
}

fn l1_discrete(a: &[f64], b: &[f64], lo: f64, hi: f64) -> f64 {
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut total = 0.0;
    let mut prev: Option<f64> = None;
    while i < a.len() || j < b.len() {
        let z = match (a.get(i), b.get(j)) {
            (Some(&x), Some(&y)) => x.min(y),
            (Some(&x), None) => x,
            (None, Some(&y)) => y,
            (None, None) => unreachable!(),
        };
        if let Some(p) = prev {
            let s = p.max(lo);
            let e = z.min(hi);
            if e > s {
                total += (i as f64 / na - j as f64 / nb).abs() * (e - s);
            }
        }
        while i < a.len() && a[i] == z {
            i += 1;
        }
        while j < b.len() && b[j] == z {
            j += 1;
        }
        prev = Some(z);
    }
    total
}

/// Exact integral of |D - C| on [lo, hi] where D is a step function with the
/// given sorted atoms and C has a closed-form integrated CDF.
fn l1_step_vs_smooth(atoms: &[f64], c: &dyn CdfLike, lo: f64, hi: f64) -> f64 {
    let n = atoms.len() as f64;
    let psi = |x: f64| -> f64 {
        if x == f64::NEG_INFINITY { 0.0 } else { c.integrated_cdf(x).unwrap_or(f64::NAN) }
    };
    let mean = c.mean();
    let mut total = 0.0;
    let mut segment = |s: f64, e: f64, level: f64| {
        let s = s.max(lo);
        let e = e.min(hi);
        if !(e > s) {
            return;
        }
        let piece = if level == 0.0 {
            psi(e) - psi(s)
        } else if level == 1.0 {
            if e == f64::INFINITY { psi(s) - s + mean } else { (e - s) - (psi(e) - psi(s)) }
        } else if c.cdf(s) >= level {
            psi(e) - psi(s) - level * (e - s)
        } else if c.cdf(e) <= level {
            level * (e - s) - (psi(e) - psi(s))
        } else {
            let q = c.quantile(level).clamp(s, e);
            let below = level * (q - s) - (psi(q) - psi(s));
            let above = (psi(e) - psi(q)) - level * (e - q);
            below.max(0.0) + above.max(0.0)
        };
        total += piece.max(0.0);
    };
    segment(f64::NEG_INFINITY, atoms[0], 0.0);
    let mut i = 0;
    while i < atoms.len() {
        let z = atoms[i];
        let mut j = i;
        while j < atoms.len() && atoms[j] == z {
            j += 1;
        }
        let next = atoms.get(j).copied().unwrap_or(f64::INFINITY);
        let level = if j == atoms.len() { 1.0 } else { j as f64 / n };
        segment(z, next, level);
        i = j;
    }
    total
}

fn truncated_range(f: &dyn CdfLike, g: &dyn CdfLike, lo: f64, hi: f64) -> (f64, f64) {
    let a = f.quantile(TAIL_LEVEL).min(g.quantile(TAIL_LEVEL));
    let b = f.quantile(1.0 - TAIL_LEVEL).max(g.quantile(1.0 - TAIL_LEVEL));
    (lo.max(a), hi.min(b))
}

fn split_points(f: &dyn CdfLike, g: &dyn CdfLike, lo: f64, hi: f64) -> Vec<f64> {
    let mut cuts = vec![lo, hi];
    cuts.extend(f.breakpoints().into_iter().chain(g.breakpoints()).filter(|x| *x > lo && *x < hi));
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    cuts
}

fn l1_quadrature(f: &dyn CdfLike, g: &dyn CdfLike, lo: f64, hi: f64) -> Result<f64> {
    let (a, b) = truncated_range(f, g, lo, hi);
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::W1NotFinite);
    }
    if a >= b {
        return Ok(0.0);
    }
    let cfg = QuadConfig { abs_tol: 1e-13, rel_tol: 1e-11, max_intervals: 4000 };
    let cuts = split_points(f, g, a, b);
    Ok(cuts.windows(2).map(|w| integrate(|x| (f.cdf(x) - g.cdf(x)).abs(), w[0], w[1], cfg).value).sum())
}

/// Integral of F over [a, b] (finite endpoints).
pub fn integral_of_cdf(f: &dyn CdfLike, a: f64, b: f64) -> f64 {
    match (f.integrated_cdf(a), f.integrated_cdf(b)) {
        (Some(pa), Some(pb)) => pb - pa,
        _ => {
            let cfg = QuadConfig { abs_tol: 1e-14, rel_tol: 1e-12, max_intervals: 4000 };
            let cuts: Vec<f64> = {
                let mut c = vec![a, b];
                c.extend(f.breakpoints().into_iter().filter(|x| *x > a && *x < b));
                c.sort_by(f64::total_cmp);
                c
            };
            cuts.windows(2).map(|w| integrate(|x| f.cdf(x), w[0], w[1], cfg).value).sum()
        }
    }
}

/// Signed integral of F - G over [a, b].
pub fn signed_integral(f: &dyn CdfLike, g: &dyn CdfLike, a: f64, b: f64) -> f64 {
    integral_of_cdf(f, a, b) - integral_of_cdf(g, a, b)
}

/// Cut points a = a_0 < a_1 < ... < a_N = b.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalPartition {
    cuts: Vec<f64>,
}

impl IntervalPartition {
    /// Equal cells a_k = a + (b - a) k / N.
    pub fn uniform(a: f64, b: f64, cells: usize) -> Result<Self> {
        if !(a < b) || !a.is_finite() || !b.is_finite() {
            return Err(invalid(format!("partition needs finite a < b, got [{a}, {b}]")));
        }
        if cells == 0 {
            return Err(invalid("partition needs at least one cell"));
        }
        let cuts = (0..=cells).map(|k| a + (b - a) * k as f64 / cells as f64).collect();
        Ok(Self { cuts })
    }

    pub fn from_cuts(cuts: Vec<f64>) -> Result<Self> {
        if cuts.len() < 2 || cuts.windows(2).any(|w| !(w[0] < w[1])) || cuts.iter().any(|x| !x.is_finite()) {
            return Err(invalid("cut points must be finite and strictly increasing"));
        }
        Ok(Self { cuts })
    }

    pub fn cuts(&self) -> &[f64] {
        &self.cuts
    }

    pub fn cells(&self) -> usize {
        self.cuts.len() - 1
    }

    pub fn max_width(&self) -> f64 {
        self.cuts.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
    }
}

/// Both sides of
/// integral_a^b |F - G| <= sum_k |integral over cell k of (F - G)| + 2 max_k |cell k|,
/// which for equal cells is the slack 2(b - a)/N.
pub fn partition_l1_bound(f: &dyn CdfLike, g: &dyn CdfLike, part: &IntervalPartition) -> Result<(f64, f64)> {
    let cuts = part.cuts();
    let lhs = l1_between(f, g, cuts[0], cuts[cuts.len() - 1])?;
    let sum: f64 = cuts.windows(2).map(|w| signed_integral(f, g, w[0], w[1]).abs()).sum();
    Ok((lhs, sum + 2.0 * part.max_width()))
}

/// Per-rank mean absolute deviations of order statistics across replicates.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderStatFluctuation {
    /// Estimated E|X_i* - E X_i*| for each rank i.
    pub per_rank: Vec<f64>,
    /// (1/n) sum over ranks of `per_rank`.
    pub normalized_sum: f64,
    /// Per replicate r: (1/n) sum_i |x_ri - mean_i|; its average is `normalized_sum`.
    pub per_replicate: Vec<f64>,
}

/// Estimates E|X_i* - E X_i*| from replicated samples (each already sorted).
pub fn ordered_stat_fluctuation(replicates: &[EmpiricalCdf]) -> Result<OrderStatFluctuation> {
    if replicates.len() < 2 {
        return Err(invalid("ordered statistics need at least 2 replicates"));
    }
    let n = replicates[0].len();
    if let Some(bad) = replicates.iter().find(|r| r.len() != n) {
        return Err(Error::AtomCountMismatch(n, bad.len()));
    }
    let r = replicates.len() as f64;
    let mut means = vec![0.0; n];
    for rep in replicates {
        for (m, x) in means.iter_mut().zip(rep.atoms()) {
            *m += x;
        }
    }
    means.iter_mut().for_each(|m| *m /= r);
    let mut per_rank = vec![0.0; n];
    let mut per_replicate = Vec::with_capacity(replicates.len());
    for rep in replicates {
        let mut s = 0.0;
        for ((acc, x), m) in per_rank.iter_mut().zip(rep.atoms()).zip(&means) {
            let d = (x - m).abs();
            *acc += d;
            s += d;
        }
        per_replicate.push(s / n as f64);
    }
    per_rank.iter_mut().for_each(|v| *v /= r);
    let normalized_sum = per_rank.iter().sum::<f64>() / n as f64;
    Ok(OrderStatFluctuation { per_rank, normalized_sum, per_replicate })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::AnalyticDistribution as Law;
    use proptest::prelude::*;

    fn emp(v: &[f64]) -> EmpiricalCdf {
        build_empirical(v).unwrap()
    }

    #[test]
    fn construction_examples() {
        let f = emp(&[0.0]);
        assert_eq!(f.cdf_eval(0.0), 1.0);
        assert_eq!(f.cdf_eval(-1e-300), 0.0);
        assert_eq!(emp(&[3.0, 1.0, 2.0]).atoms(), &[1.0, 2.0, 3.0]);
        let d = emp(&[1.0, 1.0]);
        assert_eq!(d.atoms(), &[1.0, 1.0]);
        assert_eq!(d.cdf_eval(0.999), 0.0);
        assert_eq!(d.cdf_eval(1.0), 1.0);
        assert_eq!(build_empirical(&[]), Err(Error::EmptySample));
        assert_eq!(build_empirical(&[1.0, f64::NAN]), Err(Error::NonFiniteSample));
        assert_eq!(build_empirical(&[f64::INFINITY]), Err(Error::NonFiniteSample));
    }

    #[test]
    fn kolmogorov_examples() {
        let g = Law::standard_gaussian();
        assert!((kolmogorov_distance(&emp(&[0.0]), &g) - 0.5).abs() < 1e-15);
        let n = 4;
        let atoms: Vec<f64> = (1..=n).map(|i| g.quantile((2 * i - 1) as f64 / (2 * n) as f64)).collect();
        assert!((kolmogorov_distance(&emp(&atoms), &g) - 0.125).abs() < 1e-12);
        let f = emp(&[0.3, -1.0, 2.0, 2.0]);
        assert_eq!(kolmogorov_distance(&f, &f), 0.0);
    }

    #[test]
    fn kolmogorov_between_two_steps() {
        let f = emp(&[0.0, 1.0]);
        let g = emp(&[0.5, 1.0]);
        // On [0, 0.5) the gap is 1/2.
        assert!((kolmogorov_distance(&f, &g) - 0.5).abs() < 1e-15);
        assert!((kolmogorov_distance(&g, &f) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn w1_examples() {
        assert_eq!(w1_empirical(&emp(&[0.0, 1.0]), &emp(&[0.0, 3.0])).unwrap(), 1.0);
        assert_eq!(w1_empirical(&emp(&[0.0, 1.0]), &emp(&[0.0])), Err(Error::AtomCountMismatch(2, 1)));
        let u = Law::Uniform { lo: 0.0, hi: 1.0 };
        let v = Law::Uniform { lo: 0.3, hi: 1.3 };
        assert!((w1_general(&u, &v).unwrap() - 0.3).abs() < 1e-8);
        let w = Law::Uniform { lo: -1.0, hi: 1.0 };
        assert!((w1_general(&emp(&[0.0]), &w).unwrap() - 0.5).abs() < 1e-12);
        let a = emp(&[0.1, 0.5, 2.0]);
        let b = emp(&[-1.0, 0.7, 0.7]);
        assert!((w1_general(&a, &b).unwrap() - w1_empirical(&a, &b).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn w1_step_vs_gaussian_matches_quadrature() {
        let g = Law::gaussian(0.3, 2.0).unwrap();
        let f = emp(&[-1.2, 0.0, 0.0, 0.4, 2.5]);
        let exact = w1_general(&f, &g).unwrap();
        let quad = l1_quadrature(&f, &g, f64::NEG_INFINITY, f64::INFINITY).unwrap();
        assert!((exact - quad).abs() < 1e-8, "{exact} vs {quad}");
    }

    #[test]
    fn heavy_tails_are_rejected() {
        struct Cauchy;
        impl CdfLike for Cauchy {
            fn cdf(&self, x: f64) -> f64 {
                0.5 + x.atan() / std::f64::consts::PI
            }
            fn quantile(&self, p: f64) -> f64 {
                (std::f64::consts::PI * (p - 0.5)).tan()
            }
            fn mean(&self) -> f64 {
                f64::NAN
            }
        }
        assert_eq!(w1_general(&Cauchy, &Cauchy), Err(Error::W1NotFinite));
        assert!(l1_between(&Cauchy, &Law::standard_gaussian(), -1.0, 1.0).is_ok());
    }

    #[test]
    fn partition_examples() {
        let u = Law::Uniform { lo: 0.0, hi: 1.0 };
        let part = IntervalPartition::uniform(0.0, 1.0, 4).unwrap();
        let (lhs, rhs) = partition_l1_bound(&u, &u, &part).unwrap();
        assert_eq!(lhs, 0.0);
        assert!((rhs - 0.5).abs() < 1e-15);
        let v = Law::Uniform { lo: 0.2, hi: 1.2 };
        let (lhs, rhs) = partition_l1_bound(&u, &v, &part).unwrap();
        assert!((rhs - 0.5 - lhs).abs() < 1e-12);
        assert!(IntervalPartition::uniform(1.0, 1.0, 3).is_err());
        assert!(IntervalPartition::from_cuts(vec![0.0, 0.5, 0.5]).is_err());
    }

    #[test]
    fn order_statistic_examples() {
        let same = vec![emp(&[1.0, 2.0]), emp(&[1.0, 2.0])];
        assert_eq!(ordered_stat_fluctuation(&same).unwrap().per_rank, vec![0.0, 0.0]);
        let two = vec![emp(&[0.0, 0.0, 0.0]), emp(&[1.0, 1.0, 1.0])];
        let r = ordered_stat_fluctuation(&two).unwrap();
        assert_eq!(r.per_rank, vec![0.5; 3]);
        assert_eq!(r.normalized_sum, 0.5);
        assert!(ordered_stat_fluctuation(&same[..1]).is_err());
    }

    fn sample_vec(len: usize) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-5.0f64..5.0, len)
    }

    proptest! {
        #[test]
        fn cdf_is_monotone_right_continuous(v in prop::collection::vec(-3.0f64..3.0, 1..20), xs in prop::collection::vec(-4.0f64..4.0, 2..10)) {
            let f = emp(&v);
            let mut xs = xs;
            xs.sort_by(f64::total_cmp);
            for w in xs.windows(2) {
                prop_assert!(f.cdf_eval(w[0]) <= f.cdf_eval(w[1]));
            }
            for &a in f.atoms() {
                prop_assert_eq!(f.cdf_eval(a), f.cdf_eval(a + 0.0));
                prop_assert!(CdfLike::cdf_left(&f, a) < f.cdf_eval(a));
            }
            prop_assert_eq!(f.cdf_eval(-1e300), 0.0);
            prop_assert_eq!(f.cdf_eval(1e300), 1.0);
        }

        #[test]
        fn w1_is_a_metric((a, b, c) in (1usize..12).prop_flat_map(|n| (sample_vec(n), sample_vec(n), sample_vec(n)))) {
            let (fa, fb, fc) = (emp(&a), emp(&b), emp(&c));
            let ab = w1_empirical(&fa, &fb).unwrap();
            let ba = w1_empirical(&fb, &fa).unwrap();
            prop_assert_eq!(ab, ba);
            prop_assert_eq!(w1_empirical(&fa, &fa).unwrap(), 0.0);
            let ac = w1_empirical(&fa, &fc).unwrap();
            let bc = w1_empirical(&fb, &fc).unwrap();
            prop_assert!(ac <= ab + bc + 1e-12);
            if ab == 0.0 {
                prop_assert_eq!(fa.atoms(), fb.atoms());
            }
        }

        #[test]
        fn w1_bounded_by_scaled_euclidean((a, b) in (1usize..30).prop_flat_map(|n| (sample_vec(n), sample_vec(n)))) {
            let (fa, fb) = (emp(&a), emp(&b));
            let n = a.len() as f64;
            let eucl: f64 = fa.atoms().iter().zip(fb.atoms()).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
            prop_assert!(w1_empirical(&fa, &fb).unwrap() <= eucl / n.sqrt() + 1e-12);
        }

        #[test]
        fn general_matches_sorted_formula((a, b) in (1usize..15).prop_flat_map(|n| (sample_vec(n), sample_vec(n)))) {
            let (fa, fb) = (emp(&a), emp(&b));
            let g = w1_general(&fa, &fb).unwrap();
            prop_assert!((g - w1_empirical(&fa, &fb).unwrap()).abs() < 1e-12);
        }

        #[test]
        fn kolmogorov_invariant_under_increasing_maps(v in prop::collection::vec(-2.0f64..2.0, 1..25)) {
            let f = emp(&v);
            let g = Law::standard_gaussian();
            let d0 = kolmogorov_distance(&f, &g);
            // x -> x^3 + x is strictly increasing; push G forward by the same map.
            struct Pushed(Law);
            impl CdfLike for Pushed {
                fn cdf(&self, y: f64) -> f64 {
                    // invert y = x^3 + x by bisection
                    let (mut lo, mut hi) = (-50.0f64, 50.0f64);
                    for _ in 0..200 {
                        let m = 0.5 * (lo + hi);
                        if m * m * m + m < y { lo = m } else { hi = m }
                    }
                    self.0.cdf(0.5 * (lo + hi))
                }
                fn quantile(&self, p: f64) -> f64 {
                    let x = self.0.quantile(p);
                    x * x * x + x
                }
                fn mean(&self) -> f64 { 0.0 }
            }
            let fm = f.map_increasing(|x| x * x * x + x).unwrap();
            let d1 = kolmogorov_distance(&fm, &Pushed(g));
            prop_assert!((d0 - d1).abs() < 1e-9);
        }

        #[test]
        fn partition_bound_holds(a in sample_vec(7), b in sample_vec(5), cells in 1usize..12, cut_seed in prop::collection::vec(0.01f64..1.0, 1..8)) {
            let (fa, fb) = (emp(&a), emp(&b));
            let part = IntervalPartition::uniform(-4.0, 4.0, cells).unwrap();
            let (lhs, rhs) = partition_l1_bound(&fa, &fb, &part).unwrap();
            prop_assert!(lhs <= rhs + 1e-12);
            // Non-uniform cells from cumulative random widths.
            let total: f64 = cut_seed.iter().sum();
            let mut cuts = vec![-4.0];
            let mut acc = 0.0;
            for w in &cut_seed {
                acc += w;
                cuts.push(-4.0 + 8.0 * acc / total);
            }
            *cuts.last_mut().unwrap() = 4.0;
            if let Ok(part) = IntervalPartition::from_cuts(cuts) {
                let (lhs, rhs) = partition_l1_bound(&fa, &Law::standard_gaussian(), &part).unwrap();
                prop_assert!(lhs <= rhs + 1e-10);
            }
        }
    }
}
