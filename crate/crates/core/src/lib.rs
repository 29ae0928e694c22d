//! Numerical kernels for concentration of empirical distribution functions:
//! empirical CDF metrics, analytic reference laws, Poincare and log-Sobolev
//! constants on the line, Hopf-Lax operators, Wigner spectra, and a seeded
//! Monte Carlo verifier for the resulting inequalities.

pub mod cdf;
pub mod distributions;
pub mod eigen;
pub mod functional;
pub mod empirical;
pub mod error;
pub mod hopf_lax;
pub mod mc;
pub mod quad;
pub mod random_matrix;
pub mod report;
pub mod verifier;

pub use cdf::CdfLike;
pub use distributions::{semicircle_increment_bound, standard_library, AnalyticDistribution, MarginalMixture};
pub use empirical::{
    build_empirical, kolmogorov_distance, l1_between, ordered_stat_fluctuation, partition_l1_bound, w1_empirical,
    w1_general, EmpiricalCdf, IntervalPartition, OrderStatFluctuation,
};
pub use error::{Error, Result};
pub use functional::{MeasureModel, ProductMeasureSpec, TestFunction};
pub use mc::{Estimate, MonteCarloPlan};
pub use report::{BoundReport, ReportKind};
pub use verifier::{run_bound_check, BoundId, BoundParams, Scenario, ScenarioModel, Verifier};
