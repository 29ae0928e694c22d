//! Seeded Monte Carlo checks of the concentration inequalities, with exact
//! oracles where the law of the statistic is known and log-log rate fits
//! where the constants are unspecified.

pub mod catalog;
pub mod engine;
pub mod oracles;
pub mod regression;
pub mod scenario;

pub use catalog::{BoundId, Requirement};
pub use engine::{rate_curves, run_bound_check, Verifier};
pub use regression::{fit_log_log, rate_regression, CurvePoint, LogLogFit, RateFit, RateRule};
pub use scenario::{BoundParams, Instance, PoolInfo, Reference, Sampler, Scenario, ScenarioModel};
