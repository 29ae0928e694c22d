//! Acceptance criteria 1-10 at their stated sizes, tolerances and time
//! limits. Prints one line per criterion and exits nonzero on any
//! unexpected outcome.

use std::path::Path;
use std::time::{Duration, Instant};

use conclab_cli::commands;
use conclab_cli::RunConfig;
use conclab_core::distributions::{semicircle_increment_bound, standard_library, AnalyticDistribution};
use conclab_core::empirical::IntervalPartition;
use conclab_core::functional::{cheeger_pi_constant, hardy_lsi_bracket, hardy_pi_bracket, isoperimetric_constant, HardyConfig};
use conclab_core::hopf_lax::{empirical_lift_check, inf_convolution, semigroup_check, sup_convolution, GridFunction};
use conclab_core::random_matrix::{hoffman_wielandt_check, sample_matrix_stream, spectral_map_lipschitz_check, WignerEnsembleConfig};
use conclab_core::{
    build_empirical, partition_l1_bound, w1_empirical, w1_general, BoundId, BoundReport, CdfLike, Error, MeasureModel,
    MonteCarloPlan, Scenario, Verifier,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Outcome of one criterion: failures found, with a one-line summary.
struct Outcome {
    failures: Vec<String>,
    summary: String,
}

impl Outcome {
    fn new() -> Self {
        Self { failures: Vec::new(), summary: String::new() }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(what());
        }
    }
}

// ---------------------------------------------------------------------------
// 1. transport oracle

/// Minimum-cost perfect assignment (Hungarian method with potentials).
fn assignment_cost(cost: &[Vec<f64>]) -> f64 {
    let n = cost.len();
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    (1..=n).map(|j| cost[p[j] - 1][j - 1]).sum()
}

/// Exhaustive minimum over all permutations.
fn permutation_cost(a: &[f64], b: &[f64]) -> f64 {
    fn go(a: &[f64], b: &[f64], used: &mut Vec<bool>, k: usize, acc: f64, best: &mut f64) {
        if k == a.len() {
            *best = best.min(acc);
            return;
        }
        for j in 0..b.len() {
            if !used[j] {
                used[j] = true;
                go(a, b, used, k + 1, acc + (a[k] - b[j]).abs(), best);
                used[j] = false;
            }
        }
    }
    let mut best = f64::INFINITY;
    go(a, b, &mut vec![false; b.len()], 0, 0.0, &mut best);
    best
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 { a } else { gcd(b, a % b) }
}

/// Optimal transport between uniform measures on `a` and `b`: split every
/// atom into equal units of mass 1/lcm and solve the assignment problem.
fn lp_transport(a: &[f64], b: &[f64]) -> f64 {
    let l = a.len() / gcd(a.len(), b.len()) * b.len();
    let ua: Vec<f64> = a.iter().flat_map(|&x| std::iter::repeat_n(x, l / a.len())).collect();
    let ub: Vec<f64> = b.iter().flat_map(|&x| std::iter::repeat_n(x, l / b.len())).collect();
    let cost: Vec<Vec<f64>> = ua.iter().map(|x| ub.iter().map(|y| (x - y).abs()).collect()).collect();
    assignment_cost(&cost) / l as f64
}

fn criterion_1() -> Outcome {
    let mut o = Outcome::new();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for inst in 0..200 {
        let na = rng.random_range(1..=6);
        let nb = if inst % 2 == 0 { na } else { rng.random_range(1..=6) };
        // every fourth instance draws from a coarse lattice to force ties
        let draw = |rng: &mut ChaCha8Rng| {
            if inst % 4 == 1 { rng.random_range(-3i32..=3) as f64 * 0.5 } else { rng.random_range(-4.0..4.0) }
        };
        let a: Vec<f64> = (0..na).map(|_| draw(&mut rng)).collect();
        let b: Vec<f64> = (0..nb).map(|_| draw(&mut rng)).collect();
        let fa = build_empirical(&a).unwrap();
        let fb = build_empirical(&b).unwrap();
        let lp = lp_transport(&a, &b);
        let general = w1_general(&fa, &fb).unwrap();
        worst = worst.max((general - lp).abs());
        o.check((general - lp).abs() <= 1e-12, || format!("instance {inst}: w1_general {general} vs LP {lp}"));
        if na == nb {
            let exhaustive = permutation_cost(&a, &b) / na as f64;
            let emp = w1_empirical(&fa, &fb).unwrap();
            worst = worst.max((emp - exhaustive).abs()).max((lp - exhaustive).abs());
            o.check((emp - exhaustive).abs() <= 1e-12, || format!("instance {inst}: w1_empirical {emp} vs {exhaustive}"));
            o.check((lp - exhaustive).abs() <= 1e-12, || format!("instance {inst}: oracles disagree"));
        }
    }
    o.summary = format!("200 instances, max |W1 - oracle| = {worst:.2e}");
    o
}

// ---------------------------------------------------------------------------
// 2. semicircle

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration.
fn gauss_legendre(m: usize) -> Vec<(f64, f64)> {
    (1..=m)
        .map(|i| {
            let mut x = (std::f64::consts::PI * (i as f64 - 0.25) / (m as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=m {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = m as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

/// Composite Gauss-Legendre on [a, b].
fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize, rule: &[(f64, f64)]) -> f64 {
    let w = (b - a) / panels as f64;
    (0..panels)
        .map(|k| {
            let (lo, hi) = (a + k as f64 * w, a + (k + 1) as f64 * w);
            rule.iter().map(|(x, wt)| wt * f(0.5 * (lo + hi) + 0.5 * (hi - lo) * x)).sum::<f64>() * 0.5 * (hi - lo)
        })
        .sum()
}

fn criterion_2() -> Outcome {
    let mut o = Outcome::new();
    let law = AnalyticDistribution::semicircle();
    let g = |x: f64| (4.0 - x * x).max(0.0).sqrt() / (2.0 * std::f64::consts::PI);
    let rule = gauss_legendre(20);
    // x = 2 sin(theta) removes the square-root endpoints
    let density_theta = |th: f64| g(2.0 * th.sin()) * 2.0 * th.cos();
    let half_pi = std::f64::consts::FRAC_PI_2;
    let mut worst: f64 = 0.0;
    for k in 0..=400 {
        let x = -2.5 + 5.0 * k as f64 / 400.0;
        let oracle = if x <= -2.0 {
            0.0
        } else if x >= 2.0 {
            1.0
        } else {
            integrate(density_theta, -half_pi, (x / 2.0).asin(), 8, &rule)
        };
        worst = worst.max((law.cdf(x) - oracle).abs());
    }
    o.check(worst <= 1e-10, || format!("max CDF error {worst:e}"));
    let pdf_theta = |h: &dyn Fn(f64) -> f64| {
        integrate(|th: f64| h(2.0 * th.sin()) * law.pdf(2.0 * th.sin()) * 2.0 * th.cos(), -half_pi, half_pi, 16, &rule)
    };
    let mean = pdf_theta(&|x| x);
    let var = pdf_theta(&|x| x * x) - mean * mean;
    o.check(mean.abs() <= 1e-9, || format!("mean {mean:e}"));
    o.check((var - 1.0).abs() <= 1e-9, || format!("variance {var}"));
    o.check(law.mean().abs() <= 1e-9 && (law.variance() - 1.0).abs() <= 1e-9, || "closed-form moments".into());
    o.summary = format!("max CDF error {worst:.2e}, mean {mean:.1e}, variance - 1 = {:.1e}", var - 1.0);
    o
}

// ---------------------------------------------------------------------------
// 3. Hopf-Lax

fn random_piecewise_linear(rng: &mut ChaCha8Rng, a: f64, b: f64, dx: f64) -> GridFunction {
    let knots: Vec<(f64, f64)> = (0..=8).map(|k| (a + (b - a) * k as f64 / 8.0, rng.random_range(-2.0..2.0))).collect();
    GridFunction::on_interval(a, b, dx, |x| {
        let k = (((x - a) / (b - a) * 8.0).floor() as usize).min(7);
        let (x0, y0) = knots[k];
        let (x1, y1) = knots[k + 1];
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    })
    .unwrap()
}

fn criterion_3() -> Outcome {
    let mut o = Outcome::new();
    let dx = 1e-3;
    let g = GridFunction::on_interval(-5.0, 5.0, dx, |y| y * y / 2.0).unwrap();
    let mut worst_quad: f64 = 0.0;
    for t in [0.5, 1.0, 2.0] {
        let q = inf_convolution(&g, t).unwrap();
        for k in 0..q.len() {
            let x = q.node(k);
            if x.abs() <= 4.0 {
                worst_quad = worst_quad.max((q.values()[k] - x * x / (2.0 * (1.0 + t))).abs());
            }
        }
    }
    o.check(worst_quad <= 2.0 * dx, || format!("quadratic error {worst_quad:e}"));

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst_ratio: f64 = 0.0;
    for i in 0..20 {
        let f = random_piecewise_linear(&mut rng, -4.0, 4.0, dx);
        let (t, s) = (rng.random_range(0.05..0.5), rng.random_range(0.05..0.5));
        let d = semigroup_check(&f, t, s).unwrap();
        worst_ratio = worst_ratio.max(d.max() / d.tolerance);
        o.check(d.within_tolerance(), || format!("input {i}: defect {} > {}", d.max(), d.tolerance));
    }

    let x0 = 0.3;
    let ind = GridFunction::on_interval(-5.0, 5.0, dx, |x| if x <= x0 { 1.0 } else { 0.0 }).unwrap();
    for t in [0.01, 0.1, 1.0] {
        let q = inf_convolution(&ind, t).unwrap();
        let p = sup_convolution(&ind, t).unwrap();
        let r = (2.0 * t).sqrt();
        for k in 0..ind.len() {
            let x = ind.node(k);
            let lower = if x <= x0 - r { 1.0 } else { 0.0 };
            let upper = if x <= x0 + r { 1.0 } else { 0.0 };
            let (qk, pk) = (q.values()[k], p.values()[k]);
            o.check(lower <= qk + 1e-12 && qk <= pk + 1e-12 && pk <= upper + 1e-12, || {
                format!("sandwich fails at t={t}, x={x}: {lower} {qk} {pk} {upper}")
            });
        }
    }
    o.summary = format!("quadratic error {worst_quad:.2e} (<= {:.0e}), worst defect/tolerance {worst_ratio:.2}", 2.0 * dx);
    o
}

// ---------------------------------------------------------------------------
// 4. empirical lifting

fn criterion_4() -> Outcome {
    let mut o = Outcome::new();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst: f64 = 0.0;
    for i in 0..10 {
        let n = 1 + i % 3;
        let dx = if n == 3 { 0.02 } else { 0.005 };
        let f = random_piecewise_linear(&mut rng, -2.0, 2.0, dx);
        let t = rng.random_range(0.1..1.0);
        let atoms: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let (lhs, rhs) = empirical_lift_check(&f, t, &atoms).unwrap();
        // direct average of Q_{t/n} f at the atoms
        let q = inf_convolution(&f, t / n as f64).unwrap();
        let direct = atoms.iter().map(|&a| q.eval(a).unwrap()).sum::<f64>() / n as f64;
        worst = worst.max((lhs - rhs).abs());
        o.check((lhs - rhs).abs() <= 2.0 * dx, || format!("triple {i} (n={n}): brute force {lhs} vs lifted {rhs}"));
        o.check((rhs - direct).abs() <= 1e-12, || format!("triple {i}: lifted side {rhs} vs {direct}"));
    }
    o.summary = format!("10 triples, n in {{1,2,3}}, max |brute force - lifted| = {worst:.2e}");
    o
}

// ---------------------------------------------------------------------------
// 5. constants

fn criterion_5() -> Outcome {
    let mut o = Outcome::new();
    let cfg = HardyConfig::default();
    let lap = MeasureModel::from_law(AnalyticDistribution::two_sided_exponential()).unwrap();
    let cheeger = cheeger_pi_constant(&lap).unwrap();
    o.check((cheeger - 4.0).abs() <= 1e-6, || format!("Cheeger constant {cheeger}"));
    let mut contained = 0;
    for law in standard_library() {
        let m = MeasureModel::from_law(law).unwrap();
        if let Some(pi) = law.pi_constant() {
            let b = hardy_pi_bracket(&m, &cfg).unwrap();
            o.check(b.contains(pi), || format!("{}: PI constant {pi} outside [{}, {}]", law.id(), b.lower, b.upper));
            contained += 1;
        }
        if let Some(lsi) = law.lsi_constant() {
            let b = hardy_lsi_bracket(&m, &cfg).unwrap();
            o.check(b.contains(lsi), || format!("{}: LSI constant {lsi} outside [{}, {}]", law.id(), b.lower, b.upper));
            contained += 1;
        }
    }
    let gap = MeasureModel::from_law(AnalyticDistribution::gapped_uniform(-2.0, -1.0, 1.0, 2.0).unwrap()).unwrap();
    o.check(hardy_pi_bracket(&gap, &cfg) == Err(Error::InfiniteHardyConstant), || "gap: finite Hardy constant".into());
    o.check(isoperimetric_constant(&gap) == Err(Error::ZeroIsoperimetricConstant), || "gap: positive H".into());
    o.summary = format!("Cheeger sigma^2 = {cheeger:.9}, {contained} known constants bracketed, gap detected");
    o
}

// ---------------------------------------------------------------------------
// 6. explicit-constant suite

const EXPLICIT_SUITE: [BoundId; 11] = [
    BoundId::Prop23Tail,
    BoundId::Prop52Tail,
    BoundId::Prop61Mgf,
    BoundId::Prop63Tail,
    BoundId::Cor24,
    BoundId::Cor32,
    BoundId::Cor62,
    BoundId::Thm12Tail,
    BoundId::Thm12Mean,
    BoundId::Eq14Sandwich,
    BoundId::Hensley,
];

fn describe(r: &BoundReport) -> String {
    format!(
        "{} [{}] lhs {:.4e} (se {:.1e}) vs rhs {:.4e}",
        r.bound_id,
        r.variant,
        r.lhs_estimate,
        r.lhs_stderr,
        r.rhs_value.unwrap_or(f64::NAN)
    )
}

fn criterion_6() -> Outcome {
    let mut o = Outcome::new();
    let plan = MonteCarloPlan::new(10_000, 6, 200).unwrap().with_slack(3.0).unwrap();
    let v = Verifier::new(Scenario::gaussian_product(), plan).unwrap();
    let mut rows = 0;
    for b in EXPLICIT_SUITE {
        for r in v.run(b).unwrap() {
            rows += 1;
            o.check(r.pass, || describe(&r));
        }
    }
    o.summary = format!("{} of {rows} rows pass at n = 200, R = 10^4", rows - o.failures.len());
    o
}

// ---------------------------------------------------------------------------
// 7. examples

fn criterion_7() -> Outcome {
    let mut o = Outcome::new();
    let plan = MonteCarloPlan::new(1000, 7, 64).unwrap();
    let ex1 = Verifier::new(Scenario::example1(), plan).unwrap();
    let fits = ex1.rate_curves(BoundId::Ex1).unwrap();
    let (_, kolm) = fits.iter().find(|(v, _)| v == "kolmogorov").unwrap();
    let ns: Vec<usize> = kolm.points.iter().map(|p| p.n).collect();
    o.check(ns == [64, 128, 256, 512], || format!("sweep {ns:?}"));
    o.check(kolm.fit.slope <= -0.9, || format!("Example 1 slope {}", kolm.fit.slope));
    let ex2 = Verifier::new(Scenario::example2().with_sweep(vec![16, 64, 256]), plan).unwrap();
    let fits = ex2.rate_curves(BoundId::Ex2).unwrap();
    let mut levels = Vec::new();
    for p in &fits[0].1.points {
        if p.n == 16 || p.n == 256 {
            levels.push(p.lhs);
            o.check((0.2..=0.8).contains(&p.lhs), || format!("Example 2 at n={}: {}", p.n, p.lhs));
        }
    }
    o.check(levels.len() == 2, || "Example 2 sweep misses 16 or 256".into());
    o.summary = format!("Example 1 slope {:.3}, Example 2 levels {levels:.3?}", kolm.fit.slope);
    o
}

// ---------------------------------------------------------------------------
// 8. matrices

fn criterion_8() -> Outcome {
    let mut o = Outcome::new();
    let gauss = MeasureModel::from_law(AnalyticDistribution::standard_gaussian()).unwrap();
    let mut worst_hw: f64 = 0.0;
    let mut worst_lip: f64 = 0.0;
    for n in [4, 16, 64] {
        let cfg = WignerEnsembleConfig::new(n, gauss, 8).unwrap();
        for pair in 0..100u64 {
            let a = sample_matrix_stream(&cfg, 2 * pair).unwrap();
            let b = sample_matrix_stream(&cfg, 2 * pair + 1).unwrap();
            let (lhs, rhs) = hoffman_wielandt_check(&a, &b).unwrap();
            worst_hw = worst_hw.max(lhs / rhs);
            o.check(lhs <= rhs * (1.0 + 1e-10), || format!("Hoffman-Wielandt n={n}, pair {pair}: {lhs} > {rhs}"));
        }
        let lip = spectral_map_lipschitz_check(&cfg, 100).unwrap();
        worst_lip = worst_lip.max(lip.max_ratio / lip.bound);
        o.check(lip.holds(), || format!("Lipschitz ratio n={n}: {} > {}", lip.max_ratio, lip.bound));
    }
    let plan = MonteCarloPlan::new(200, 8, 256).unwrap();
    let v = Verifier::new(Scenario::gaussian_wigner().with_sweep(vec![32, 64, 128, 256]), plan).unwrap();
    let w1 = v.run(BoundId::Thm13W1).unwrap();
    let slope = w1[0].lhs_estimate;
    o.check(slope <= -0.6, || format!("W1 slope {slope}"));
    let pooled = v.instance(256).unwrap().pool.map(|p| p.replications).unwrap_or(0);
    o.check(pooled > 0, || "reference is not pooled".into());
    let count = v.run_at(BoundId::Cor65Count, 256).unwrap();
    for r in &count {
        o.check(r.pass, || describe(r));
    }
    o.summary = format!(
        "HW max ratio {worst_hw:.3}, Lipschitz max ratio/bound {worst_lip:.3}, W1 slope {slope:.3} (pool {pooled}), {}",
        describe(&count[0])
    );
    o
}

// ---------------------------------------------------------------------------
// 9. increment and partition grids

/// Exact integral of |F - G| over [a, b] for two step CDFs.
fn step_l1(fa: &dyn CdfLike, fb: &dyn CdfLike, atoms: &[f64], a: f64, b: f64) -> f64 {
    let mut cuts: Vec<f64> = atoms.iter().copied().filter(|x| *x > a && *x < b).collect();
    cuts.push(a);
    cuts.push(b);
    cuts.sort_by(f64::total_cmp);
    cuts.windows(2).map(|w| (fa.cdf(0.5 * (w[0] + w[1])) - fb.cdf(0.5 * (w[0] + w[1]))).abs() * (w[1] - w[0])).sum()
}

fn criterion_9() -> Outcome {
    let mut o = Outcome::new();
    let mut points = 0;
    for i in 0..=600 {
        let x = -3.0 + 0.01 * i as f64;
        for h in [0.001, 0.01, 0.1, 0.5, 1.0] {
            let (inc, bound) = semicircle_increment_bound(x, h).unwrap();
            points += 1;
            o.check(inc <= bound + 1e-15, || format!("increment bound at x={x}, h={h}: {inc} > {bound}"));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut cases = 0;
    for _ in 0..100 {
        let a: Vec<f64> = (0..rng.random_range(1..20)).map(|_| rng.random_range(0.0..1.0)).collect();
        let b: Vec<f64> = (0..rng.random_range(1..20)).map(|_| rng.random_range(0.0..1.0)).collect();
        let fa = build_empirical(&a).unwrap();
        let fb = build_empirical(&b).unwrap();
        let all: Vec<f64> = a.iter().chain(&b).copied().collect();
        let exact = step_l1(&fa, &fb, &all, 0.0, 1.0);
        for cells in [1, 2, 3, 5, 10, 50] {
            let part = IntervalPartition::uniform(0.0, 1.0, cells).unwrap();
            let (lhs, rhs) = partition_l1_bound(&fa, &fb, &part).unwrap();
            cases += 1;
            o.check((lhs - exact).abs() <= 1e-12, || format!("L1 {lhs} vs exact {exact}"));
            o.check(lhs <= rhs + 1e-12, || format!("partition bound N={cells}: {lhs} > {rhs}"));
        }
        let mut cuts: Vec<f64> = (0..6).map(|_| rng.random_range(0.0..1.0)).collect();
        cuts.extend([0.0, 1.0]);
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let part = IntervalPartition::from_cuts(cuts).unwrap();
        let (lhs, rhs) = partition_l1_bound(&fa, &fb, &part).unwrap();
        cases += 1;
        o.check(lhs <= rhs + 1e-12, || format!("non-uniform partition: {lhs} > {rhs}"));
        let g = AnalyticDistribution::uniform(0.0, 1.0).unwrap();
        let part = IntervalPartition::uniform(0.0, 1.0, 7).unwrap();
        let (lhs, rhs) = partition_l1_bound(&fa, &g, &part).unwrap();
        cases += 1;
        o.check(lhs <= rhs + 1e-12, || format!("empirical vs uniform: {lhs} > {rhs}"));
    }
    o.summary = format!("{points} increment points, {cases} partition cases");
    o
}

// ---------------------------------------------------------------------------
// 10. reproducibility

fn criterion_10() -> Outcome {
    let mut o = Outcome::new();
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    let cfg = RunConfig::load(&golden.join("run.toml")).unwrap();
    let first = commands::verify(&cfg).unwrap();
    let second = commands::verify(&cfg).unwrap();
    let file = |out: &commands::Outcome, name: &str| out.files.iter().find(|(n, _)| n == name).unwrap().1.clone();
    o.check(file(&first, "reports.json") == file(&second, "reports.json"), || "reports.json differs between runs".into());
    let expect_json = std::fs::read_to_string(golden.join("reports.json")).unwrap();
    o.check(file(&first, "reports.json") == expect_json, || "reports.json differs from the golden file".into());
    let masked: String = file(&first, "reports.csv")
        .lines()
        .enumerate()
        .map(|(i, l)| {
            let mut parts: Vec<&str> = l.splitn(9, ',').collect();
            if i > 0 {
                parts[7] = "0";
            }
            parts.join(",") + "\n"
        })
        .collect();
    let expect_csv = std::fs::read_to_string(golden.join("reports.csv")).unwrap();
    o.check(masked == expect_csv, || "reports.csv differs from the golden file".into());
    o.summary = "reports.json byte-identical across runs, golden files match".into();
    o
}

// ---------------------------------------------------------------------------

/// Failures that are expected because the checked bound is itself violated.
/// The printed linear-statistic tail 6 e^{-n h / sigma} is below the exact
/// Gaussian probability at n = 200, h = 0.2.
fn known_red(criterion: usize, failure: &str) -> bool {
    criterion == 6 && failure.starts_with("PROP_2_3_TAIL ")
}

fn main() {
    let criteria: [(usize, &str, u64, fn() -> Outcome); 10] = [
        (1, "transport oracle equivalence", 5, criterion_1),
        (2, "semicircle closed form", 1, criterion_2),
        (3, "Hopf-Lax operators", 30, criterion_3),
        (4, "empirical lifting", 60, criterion_4),
        (5, "functional-inequality constants", 10, criterion_5),
        (6, "explicit-constant inequality suite", 300, criterion_6),
        (7, "example fixtures", 120, criterion_7),
        (8, "matrix suite", 1200, criterion_8),
        (9, "increment and partition grids", 30, criterion_9),
        (10, "reproducibility", 60, criterion_10),
    ];
    let mut unexpected = Vec::new();
    for (id, name, limit, run) in criteria {
        let start = Instant::now();
        let mut outcome = run();
        let elapsed = start.elapsed();
        if elapsed > Duration::from_secs(limit) {
            outcome.failures.push(format!("runtime {:.1} s exceeds {limit} s", elapsed.as_secs_f64()));
        }
        let status = if outcome.failures.is_empty() { "PASS" } else { "FAIL" };
        println!("[{status}] criterion {id:>2} {name}: {} ({:.2} s)", outcome.summary, elapsed.as_secs_f64());
        for f in &outcome.failures {
            let tag = if known_red(id, f) { "known" } else { "unexpected" };
            println!("         {tag}: {f}");
            if !known_red(id, f) {
                unexpected.push(format!("criterion {id}: {f}"));
            }
        }
    }
    if !unexpected.is_empty() {
        eprintln!("{} unexpected failure(s)", unexpected.len());
        std::process::exit(1);
    }
}
