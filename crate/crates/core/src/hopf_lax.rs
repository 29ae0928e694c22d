//! Infimum and supremum convolutions with quadratic cost on a uniform grid.
//!
//! Q_t g(x) = min_y [g(y) + (x - y)^2 / (2t)] and P_t g = -Q_t(-g), with the
//! minimization restricted to grid nodes. Q_t uses the lower envelope of
//! parabolas, as in the Felzenszwalb-Huttenlocher distance transform.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::quad::simpson_uniform;

/// Values of a function on the nodes x0 + k dx. Between nodes the function
/// is read by linear interpolation. `+inf` is allowed as a sentinel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    x0: f64,
    dx: f64,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(x0: f64, dx: f64, values: Vec<f64>) -> Result<Self> {
        if !(dx > 0.0 && dx.is_finite() && x0.is_finite()) {
            return Err(invalid(format!("grid needs finite x0 and dx > 0, got x0 = {x0}, dx = {dx}")));
        }
        if values.len() < 2 {
            return Err(invalid("grid needs at least two nodes"));
        }
        if values.iter().any(|v| v.is_nan()) {
            return Err(invalid("grid values must not be NaN"));
        }
        Ok(Self { x0, dx, values })
    }

    /// Samples `f` at `len` nodes starting at `x0`.
    pub fn from_fn(x0: f64, dx: f64, len: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = (0..len).map(|k| f(x0 + k as f64 * dx)).collect();
        Self::new(x0, dx, values)
    }

    /// Grid covering [a, b] with nodes spaced by (about) `dx`; the spacing is
    /// adjusted so that both ends are nodes.
    pub fn on_interval(a: f64, b: f64, dx: f64, f: impl Fn(f64) -> f64) -> Result<Self> {
        if !(a < b) {
            return Err(invalid("grid interval needs a < b"));
        }
        let cells = ((b - a) / dx).ceil().max(1.0) as usize;
        let h = (b - a) / cells as f64;
        Self::from_fn(a, h, cells + 1, f)
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn node(&self, k: usize) -> f64 {
        self.x0 + k as f64 * self.dx
    }

    pub fn x_max(&self) -> f64 {
        self.node(self.len() - 1)
    }

    /// Linear interpolation; `None` outside the grid.
    pub fn eval(&self, x: f64) -> Option<f64> {
        let u = (x - self.x0) / self.dx;
        let last = (self.len() - 1) as f64;
        if !(u >= -1e-9 && u <= last + 1e-9) {
            return None;
        }
        let u = u.clamp(0.0, last);
        let k = (u.floor() as usize).min(self.len() - 2);
        let w = u - k as f64;
        let (a, b) = (self.values[k], self.values[k + 1]);
        if w == 0.0 {
            Some(a)
        } else if w == 1.0 {
            Some(b)
        } else {
            Some(a + w * (b - a))
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self { x0: self.x0, dx: self.dx, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn negated(&self) -> Self {
        self.map(|v| -v)
    }

    /// Largest |g(x_{k+1}) - g(x_k)| / dx over finite neighbours.
    pub fn max_slope(&self) -> f64 {
        self.values
            .windows(2)
            .filter(|w| w[0].is_finite() && w[1].is_finite())
            .map(|w| (w[1] - w[0]).abs() / self.dx)
            .fold(0.0, f64::max)
    }
}

/// Discrete Hopf-Lax infimum convolution Q_t g.
pub fn inf_convolution(g: &GridFunction, t: f64) -> Result<GridFunction> {
    if t < 0.0 || t.is_nan() {
        return Err(invalid(format!("Hopf-Lax time must be nonnegative, got {t}")));
    }
    if t == 0.0 {
        return Ok(g.clone());
    }
    let v = &g.values;
    let m = v.len();
    // Work in index units: minimize v_j + c (k - j)^2 with c = dx^2 / (2t),
    // i.e. c * [(k - j)^2 + v_j / c].
    let c = g.dx * g.dx / (2.0 * t);
    let f: Vec<f64> = v.iter().map(|&x| x / c).collect();
    let mut hull: Vec<usize> = Vec::with_capacity(m);
    let mut bounds: Vec<f64> = Vec::with_capacity(m + 1);
    for q in 0..m {
        if !f[q].is_finite() {
            continue;
        }
        let fq = f[q] + (q * q) as f64;
        loop {
            let Some(&p) = hull.last() else {
                hull.push(q);
                bounds.clear();
                bounds.push(f64::NEG_INFINITY);
                break;
            };
            let fp = f[p] + (p * p) as f64;
            let s = (fq - fp) / (2.0 * (q as f64 - p as f64));
            if s <= *bounds.last().unwrap() {
                hull.pop();
                bounds.pop();
                continue;
            }
            hull.push(q);
            bounds.push(s);
            break;
        }
    }
    let mut out = vec![f64::INFINITY; m];
    if hull.is_empty() {
        return GridFunction::new(g.x0, g.dx, out);
    }
    bounds.push(f64::INFINITY);
    let mut h = 0;
    for (k, slot) in out.iter_mut().enumerate() {
        while bounds[h + 1] < k as f64 {
            h += 1;
        }
        let j = hull[h];
        let d = k as f64 - j as f64;
        // Evaluate the winning candidate directly in the original units.
        let cand = v[j] + c * d * d;
        *slot = cand.min(v[k]);
    }
    GridFunction::new(g.x0, g.dx, out)
}

/// Supremum convolution P_t g = -Q_t(-g).
pub fn sup_convolution(g: &GridFunction, t: f64) -> Result<GridFunction> {
    Ok(inf_convolution(&g.negated(), t)?.negated())
}

/// Largest semigroup defects over the central half of the grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SemigroupDefect {
    /// max |Q_{t+s} g - Q_t Q_s g|
    pub inf: f64,
    /// max |P_{t+s} g - P_t P_s g|
    pub sup: f64,
    /// Tolerance 4 (1 + max slope of g) dx.
    pub tolerance: f64,
}

impl SemigroupDefect {
    pub fn max(&self) -> f64 {
        self.inf.max(self.sup)
    }

    pub fn within_tolerance(&self) -> bool {
        self.max() <= self.tolerance
    }
}

/// Compares Q_{t+s} with Q_t Q_s (and likewise for P) on the central 50% of nodes.
pub fn semigroup_check(g: &GridFunction, t: f64, s: f64) -> Result<SemigroupDefect> {
    if !(t > 0.0 && s > 0.0) {
        return Err(invalid("semigroup check needs t > 0 and s > 0"));
    }
    let window = g.len() / 4..g.len() - g.len() / 4;
    let defect = |a: &GridFunction, b: &GridFunction| {
        window.clone().map(|k| (a.values[k] - b.values[k]).abs()).filter(|d| !d.is_nan()).fold(0.0, f64::max)
    };
    let q_direct = inf_convolution(g, t + s)?;
    let q_chain = inf_convolution(&inf_convolution(g, s)?, t)?;
    let p_direct = sup_convolution(g, t + s)?;
    let p_chain = sup_convolution(&sup_convolution(g, s)?, t)?;
    Ok(SemigroupDefect {
        inf: defect(&q_direct, &q_chain),
        sup: defect(&p_direct, &p_chain),
        tolerance: 4.0 * (1.0 + g.max_slope()) * g.dx,
    })
}

/// Both sides of the lifting identity
/// Q_t [x -> (1/n) sum f(x_i)] (atoms) = (1/n) sum Q_{t/n} f(atom_i).
///
/// The left side is a brute-force minimum over the n-fold tensor grid of
/// the nodes of `f`; the right side interpolates Q_{t/n} f at the atoms.
pub fn empirical_lift_check(f: &GridFunction, t: f64, atoms: &[f64]) -> Result<(f64, f64)> {
    let n = atoms.len();
    if n == 0 {
        return Err(Error::EmptySample);
    }
    if n > 4 {
        return Err(Error::OracleSizeExceeded(n));
    }
    if !(t > 0.0) {
        return Err(invalid("lift check needs t > 0"));
    }
    if atoms.iter().any(|&a| a < f.x0 || a > f.x_max()) {
        return Err(invalid("atoms must lie inside the grid"));
    }
    let m = f.len();
    let nodes: Vec<f64> = (0..m).map(|k| f.node(k)).collect();
    let inv_n = 1.0 / n as f64;
    // Per coordinate cost table: f(y)/n + (x_i - y)^2 / (2t).
    let tables: Vec<Vec<f64>> = atoms
        .iter()
        .map(|&x| nodes.iter().zip(&f.values).map(|(&y, &fy)| fy * inv_n + (x - y) * (x - y) / (2.0 * t)).collect())
        .collect();
    let mut best = f64::INFINITY;
    let mut idx = vec![0usize; n];
    loop {
        let total: f64 = idx.iter().zip(&tables).map(|(&j, tab)| tab[j]).sum();
        if total < best {
            best = total;
        }
        // Odometer increment.
        let mut d = 0;
        loop {
            idx[d] += 1;
            if idx[d] < m {
                break;
            }
            idx[d] = 0;
            d += 1;
            if d == n {
                break;
            }
        }
        if d == n {
            break;
        }
    }
    let q = inf_convolution(f, t / n as f64)?;
    let rhs = atoms.iter().map(|&a| q.eval(a).unwrap_or(f64::INFINITY)).sum::<f64>() * inv_n;
    Ok((best, rhs))
}

/// Integrates grid values against a density over the grid span (Simpson).
pub fn integrate_against(values: &[f64], x0: f64, dx: f64, density: impl Fn(f64) -> f64) -> f64 {
    let prod: Vec<f64> = values.iter().enumerate().map(|(k, &v)| {
        let p = density(x0 + k as f64 * dx);
        if p == 0.0 { 0.0 } else { v * p }
    }).collect();
    simpson_uniform(&prod, dx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute_q(g: &GridFunction, t: f64) -> Vec<f64> {
        (0..g.len())
            .map(|k| {
                let x = g.node(k);
                (0..g.len()).map(|j| g.values[j] + (x - g.node(j)).powi(2) / (2.0 * t)).fold(f64::INFINITY, f64::min)
            })
            .collect()
    }

    #[test]
    fn constant_is_fixed() {
        let g = GridFunction::from_fn(-1.0, 0.01, 201, |_| 2.5).unwrap();
        for t in [0.01, 1.0, 100.0] {
            assert!(inf_convolution(&g, t).unwrap().values().iter().all(|&v| v == 2.5));
            assert!(sup_convolution(&g, t).unwrap().values().iter().all(|&v| v == 2.5));
        }
    }

    #[test]
    fn zero_time_and_negative_time() {
        let g = GridFunction::from_fn(0.0, 0.1, 11, |x| x.sin()).unwrap();
        assert_eq!(inf_convolution(&g, 0.0).unwrap(), g);
        assert!(inf_convolution(&g, -1.0).is_err());
    }

    #[test]
    fn quadratic_closed_form() {
        let dx = 1e-3;
        let g = GridFunction::on_interval(-5.0, 5.0, dx, |y| 0.5 * y * y).unwrap();
        let q = inf_convolution(&g, 1.0).unwrap();
        for k in (0..q.len()).step_by(97) {
            let x = q.node(k);
            if x.abs() <= 2.5 {
                assert!((q.values()[k] - x * x / 4.0).abs() <= 2.0 * dx);
            }
        }
    }

    #[test]
    fn step_function() {
        let g = GridFunction::on_interval(-3.0, 3.0, 1e-3, |y| if y > 0.0 { 1.0 } else { 0.0 }).unwrap();
        let t = 0.2;
        let q = inf_convolution(&g, t).unwrap();
        for k in 0..q.len() {
            let u = q.node(k);
            let expect = if u <= 0.0 { 0.0 } else { (u * u / (2.0 * t)).min(1.0) };
            assert!((q.values()[k] - expect).abs() <= 2.0 * 1e-3, "u = {u}");
        }
    }

    #[test]
    fn sentinels_are_skipped() {
        let g = GridFunction::new(0.0, 1.0, vec![f64::INFINITY, 0.0, f64::INFINITY]).unwrap();
        let q = inf_convolution(&g, 0.5).unwrap();
        assert_eq!(q.values(), &[1.0, 0.0, 1.0]);
        let all = GridFunction::new(0.0, 1.0, vec![f64::INFINITY; 3]).unwrap();
        assert!(inf_convolution(&all, 1.0).unwrap().values().iter().all(|v| *v == f64::INFINITY));
    }

    #[test]
    fn duality_is_exact() {
        let g = GridFunction::from_fn(-2.0, 0.01, 401, |x| (3.0 * x).sin() + x.abs()).unwrap();
        let p = sup_convolution(&g.negated(), 0.3).unwrap();
        let q = inf_convolution(&g, 0.3).unwrap();
        assert_eq!(p, q.negated());
    }

    #[test]
    fn semigroup_examples() {
        let dx = 1e-3;
        let abs = GridFunction::on_interval(-4.0, 4.0, dx, f64::abs).unwrap();
        let d = semigroup_check(&abs, 0.5, 0.5).unwrap();
        assert!(d.max() <= 2.0 * dx, "{d:?}");
        let quad = GridFunction::on_interval(-4.0, 4.0, dx, |x| 0.5 * x * x).unwrap();
        assert!(semigroup_check(&quad, 0.3, 0.7).unwrap().max() <= 2.0 * dx);
        let c = GridFunction::on_interval(-1.0, 1.0, dx, |_| 1.0).unwrap();
        assert_eq!(semigroup_check(&c, 1.0, 1.0).unwrap().max(), 0.0);
    }

    #[test]
    fn lift_examples() {
        let f = GridFunction::on_interval(-2.0, 3.0, 0.02, |y| 0.5 * y * y).unwrap();
        let (lhs, rhs) = empirical_lift_check(&f, 1.0, &[0.0, 1.0]).unwrap();
        assert!((lhs - rhs).abs() <= 2.0 * 0.02);
        let (lhs, rhs) = empirical_lift_check(&f, 0.7, &[0.46]).unwrap();
        let q = inf_convolution(&f, 0.7).unwrap();
        assert!((lhs - rhs).abs() <= 2.0 * 0.02);
        assert!((rhs - q.eval(0.46).unwrap()).abs() < 1e-15);
        let c = GridFunction::on_interval(-1.0, 1.0, 0.1, |_| 3.0).unwrap();
        let (lhs, rhs) = empirical_lift_check(&c, 0.5, &[0.0, 0.5, -0.5]).unwrap();
        assert!((lhs - 3.0).abs() < 1e-12 && (rhs - 3.0).abs() < 1e-12);
        assert_eq!(empirical_lift_check(&c, 0.5, &[0.0; 5]), Err(Error::OracleSizeExceeded(5)));
    }

    fn grid_values() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-3.0f64..3.0, 2..60)
    }

    proptest! {
        #[test]
        fn envelope_matches_brute_force(v in grid_values(), t in 0.001f64..50.0, dx in 0.01f64..1.0) {
            let g = GridFunction::new(-1.0, dx, v).unwrap();
            let q = inf_convolution(&g, t).unwrap();
            for (a, b) in q.values().iter().zip(brute_q(&g, t)) {
                prop_assert!((a - b).abs() <= 1e-12 * (1.0 + b.abs()));
            }
        }

        #[test]
        fn monotone_and_order_preserving(v in grid_values(), bump in prop::collection::vec(0.0f64..2.0, 60), t in 0.01f64..5.0) {
            let g = GridFunction::new(0.0, 0.1, v.clone()).unwrap();
            let h = GridFunction::new(0.0, 0.1, v.iter().zip(&bump).map(|(a, b)| a + b).collect()).unwrap();
            let (qg, pg, qh) = (inf_convolution(&g, t).unwrap(), sup_convolution(&g, t).unwrap(), inf_convolution(&h, t).unwrap());
            for k in 0..g.len() {
                prop_assert!(qg.values()[k] <= g.values()[k]);
                prop_assert!(g.values()[k] <= pg.values()[k]);
                prop_assert!(qg.values()[k] <= qh.values()[k]);
            }
        }

        #[test]
        fn duality_of_orderings(f in grid_values(), shift in -1.0f64..1.0, t in 0.05f64..2.0) {
            // g := P_t f + shift; then g >= P_t f iff shift >= 0, and f <= Q_t g must agree.
            let fg = GridFunction::new(0.0, 0.1, f).unwrap();
            let p = sup_convolution(&fg, t).unwrap();
            let g = p.map(|v| v + shift);
            let q = inf_convolution(&g, t).unwrap();
            let left = g.values().iter().zip(p.values()).all(|(a, b)| *a >= *b);
            let right = fg.values().iter().zip(q.values()).all(|(a, b)| *a <= *b + 1e-12);
            prop_assert_eq!(left, right);
        }

        #[test]
        fn output_is_lipschitz_for_steps(cut in 10usize..90, t in 0.01f64..1.0) {
            let g = GridFunction::new(0.0, 0.01, (0..100).map(|k| if k < cut { 0.0 } else { 1.0 }).collect()).unwrap();
            let q = inf_convolution(&g, t).unwrap();
            // Q_t of a function with oscillation 1 is Lipschitz with constant sqrt(2/t) up to one cell.
            prop_assert!(q.max_slope() <= (2.0 / t).sqrt() + 0.01 / t + 1e-9);
        }
    }

    #[test]
    fn hamilton_jacobi_residual() {
        let dx = 1e-3;
        let g = GridFunction::on_interval(-3.0, 3.0, dx, |x| x.cos()).unwrap();
        let (t, dt) = (0.3, 1e-3);
        let (a, b, c) = (
            inf_convolution(&g, t - dt).unwrap(),
            inf_convolution(&g, t).unwrap(),
            inf_convolution(&g, t + dt).unwrap(),
        );
        for k in (1000..5000).step_by(37) {
            let dq_dt = (c.values()[k] - a.values()[k]) / (2.0 * dt);
            let dq_dx = (b.values()[k + 1] - b.values()[k - 1]) / (2.0 * dx);
            assert!((dq_dt + 0.5 * dq_dx * dq_dx).abs() < 20.0 * (dx + dt), "k = {k}");
        }
    }
}
