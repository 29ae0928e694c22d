//! Adaptive Gauss-Kronrod quadrature (7-point Gauss, 15-point Kronrod).
//!
//! Intervals are bisected globally, always splitting the piece with the
//! largest error estimate. Infinite endpoints are mapped to a finite
//! interval by a rational change of variables.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5, 7).
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Result of a quadrature call.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub abs_error: f64,
}

/// Tolerances and subdivision limit.
#[derive(Debug, Clone, Copy)]
pub struct QuadConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self { abs_tol: 1e-12, rel_tol: 1e-12, max_intervals: 4000 }
    }
}

struct Piece {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    let value = kron * h;
    let err = ((kron - gauss) * h).abs();
    (value, err)
}

/// Integrates `f` over a finite interval `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, cfg: QuadConfig) -> Integral {
    if a == b {
        return Integral { value: 0.0, abs_error: 0.0 };
    }
    if a > b {
        let r = integrate(f, b, a, cfg);
        return Integral { value: -r.value, abs_error: r.abs_error };
    }
    let (v, e) = gk15(&f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Piece { a, b, value: v, err: e });
    let mut total = v;
    let mut total_err = e;
    let mut count = 1;
    while count < cfg.max_intervals {
        let tol = cfg.abs_tol.max(cfg.rel_tol * total.abs());
        if total_err <= tol || !total_err.is_finite() {
            break;
        }
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            heap.push(worst);
            break;
        }
        let (v1, e1) = gk15(&f, worst.a, mid);
        let (v2, e2) = gk15(&f, mid, worst.b);
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.err;
        heap.push(Piece { a: worst.a, b: mid, value: v1, err: e1 });
        heap.push(Piece { a: mid, b: worst.b, value: v2, err: e2 });
        count += 1;
    }
    // Re-sum to avoid drift from the incremental updates.
    let value: f64 = heap.iter().map(|p| p.value).sum();
    let abs_error: f64 = heap.iter().map(|p| p.err).sum();
    Integral { value, abs_error }
}

/// Integrates `f` over `[a, b]` where either endpoint may be infinite.
pub fn integrate_line<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, cfg: QuadConfig) -> Integral {
    match (a.is_finite(), b.is_finite()) {
        (true, true) => integrate(f, a, b, cfg),
        (true, false) => {
            // x = a + u/(1-u), u in [0, 1)
            let g = |u: f64| {
                let w = 1.0 - u;
                let v = f(a + u / w) / (w * w);
                if v.is_finite() { v } else { 0.0 }
            };
            integrate(g, 0.0, 1.0, cfg)
        }
        (false, true) => {
            let g = |u: f64| {
                let w = 1.0 - u;
                let v = f(b - u / w) / (w * w);
                if v.is_finite() { v } else { 0.0 }
            };
            integrate(g, 0.0, 1.0, cfg)
        }
        (false, false) => {
            // x = u/(1-u^2), u in (-1, 1)
            let g = |u: f64| {
                let w = 1.0 - u * u;
                let v = f(u / w) * (1.0 + u * u) / (w * w);
                if v.is_finite() { v } else { 0.0 }
            };
            integrate(g, -1.0, 1.0, cfg)
        }
    }
}

/// Composite Simpson rule on equally spaced samples; falls back to the
/// trapezoid rule on the last panel when the count of intervals is odd.
pub fn simpson_uniform(values: &[f64], dx: f64) -> f64 {
    let m = values.len();
    if m < 2 {
        return 0.0;
    }
    let intervals = m - 1;
    let even = intervals - intervals % 2;
    let mut s = 0.0;
    let mut k = 0;
    while k < even {
        s += values[k] + 4.0 * values[k + 1] + values[k + 2];
        k += 2;
    }
    let mut total = s * dx / 3.0;
    if even < intervals {
        total += 0.5 * dx * (values[m - 2] + values[m - 1]);
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let r = integrate(|x| x.powi(5) - 3.0 * x * x + 1.0, -1.0, 2.0, QuadConfig::default());
        let exact = (64.0 - 1.0) / 6.0 - (8.0 + 1.0) + 3.0;
        assert!((r.value - exact).abs() < 1e-13);
    }

    #[test]
    fn sqrt_endpoint_singularity() {
        let r = integrate(|x: f64| x.sqrt(), 0.0, 1.0, QuadConfig::default());
        assert!((r.value - 2.0 / 3.0).abs() < 1e-11);
    }

    #[test]
    fn gaussian_over_the_line() {
        let r = integrate_line(|x: f64| (-0.5 * x * x).exp(), f64::NEG_INFINITY, f64::INFINITY, QuadConfig::default());
        assert!((r.value - (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-10);
        let half = integrate_line(|x: f64| (-x).exp(), 0.0, f64::INFINITY, QuadConfig::default());
        assert!((half.value - 1.0).abs() < 1e-11);
        let left = integrate_line(|x: f64| x.exp(), f64::NEG_INFINITY, 0.0, QuadConfig::default());
        assert!((left.value - 1.0).abs() < 1e-11);
    }

    #[test]
    fn reversed_limits_flip_sign() {
        let r = integrate(|x| x, 1.0, 0.0, QuadConfig::default());
        assert!((r.value + 0.5).abs() < 1e-15);
    }

    #[test]
    fn simpson_on_cubic() {
        let dx = 0.01;
        let v: Vec<f64> = (0..=100).map(|k| (k as f64 * dx).powi(3)).collect();
        assert!((simpson_uniform(&v, dx) - 0.25).abs() < 1e-12);
    }
}
