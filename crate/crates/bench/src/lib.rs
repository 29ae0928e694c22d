//! Shared fixtures for the kernel benchmarks.

use conclab_core::distributions::AnalyticDistribution;
use conclab_core::hopf_lax::GridFunction;
use conclab_core::mc::stream_rng;
use conclab_core::random_matrix::WignerEnsembleConfig;
use conclab_core::{EmpiricalCdf, MeasureModel};

/// Empirical CDF of n standard Gaussian draws from one seed stream.
pub fn gaussian_empirical(n: usize, seed: u64, stream: u64) -> EmpiricalCdf {
    let law = AnalyticDistribution::standard_gaussian();
    let mut rng = stream_rng(seed, stream);
    EmpiricalCdf::new((0..n).map(|_| law.sample(&mut rng)).collect()).expect("finite sample")
}

/// Indicator of (-inf, 0] on a grid of `len` nodes over [-5, 5].
pub fn step_grid(len: usize) -> GridFunction {
    let dx = 10.0 / (len - 1) as f64;
    GridFunction::from_fn(-5.0, dx, len, |x| if x <= 0.0 { 1.0 } else { 0.0 }).expect("valid grid")
}

pub fn gaussian_wigner(n: usize) -> WignerEnsembleConfig {
    let entry = MeasureModel::from_law(AnalyticDistribution::standard_gaussian()).expect("standard Gaussian");
    WignerEnsembleConfig::new(n, entry, 1).expect("n >= 2")
}
