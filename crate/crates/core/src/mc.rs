//! Seeded, order-independent Monte Carlo replication.
//!
//! Replication i draws from ChaCha8 seeded with the master seed and set to
//! stream `first_stream + i`, so results do not depend on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Replication count, seed, dimension and pass slack for one run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloPlan {
    pub replications: usize,
    pub master_seed: u64,
    pub n: usize,
    pub slack_sigmas: f64,
}

impl MonteCarloPlan {
    pub fn new(replications: usize, master_seed: u64, n: usize) -> Result<Self> {
        let plan = Self { replications, master_seed, n, slack_sigmas: 3.0 };
        plan.validate()?;
        Ok(plan)
    }

    pub fn with_slack(mut self, slack_sigmas: f64) -> Result<Self> {
        self.slack_sigmas = slack_sigmas;
        self.validate()?;
        Ok(self)
    }

    pub fn with_n(mut self, n: usize) -> Result<Self> {
        self.n = n;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.replications < 2 {
            return Err(invalid("a Monte Carlo plan needs at least 2 replications"));
        }
        if self.n == 0 {
            return Err(invalid("a Monte Carlo plan needs n >= 1"));
        }
        if !(self.slack_sigmas >= 0.0 && self.slack_sigmas.is_finite()) {
            return Err(invalid("slack_sigmas must be finite and nonnegative"));
        }
        Ok(())
    }
}

/// Generator for one stream of the master seed.
pub fn stream_rng(master_seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(stream);
    rng
}

/// Runs `f` for replications `0..count` in parallel; output is in index order.
pub fn replicate<T, F>(master_seed: u64, first_stream: u64, count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng, usize) -> T + Sync + Send,
{
    (0..count)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(master_seed, first_stream + i as u64);
            f(&mut rng, i)
        })
        .collect()
}

/// Point estimate with a one-sigma standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Self { value, stderr: 0.0 }
    }
}

/// Sample mean and its standard error.
pub fn mean_estimate(xs: &[f64]) -> Estimate {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return Estimate { value: mean, stderr: f64::INFINITY };
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    Estimate { value: mean, stderr: (var / n).sqrt() }
}

/// Plug-in estimate of a nonlinear functional with a batch-means error:
/// the value uses all samples, the error is the spread of the functional
/// over `batches` contiguous blocks divided by sqrt(batches).
pub fn batch_means(xs: &[f64], batches: usize, functional: impl Fn(&[f64]) -> f64) -> Estimate {
    let value = functional(xs);
    let b = batches.clamp(2, xs.len().max(2));
    let size = xs.len() / b;
    if size == 0 {
        return Estimate { value, stderr: f64::INFINITY };
    }
    let vals: Vec<f64> = (0..b).map(|k| functional(&xs[k * size..(k + 1) * size])).collect();
    let spread = mean_estimate(&vals);
    Estimate { value, stderr: spread.stderr * (size as f64 * b as f64 / xs.len() as f64).sqrt() }
}

/// Frequency hits/total with the one-sigma Wilson half-width as error.
pub fn wilson_frequency(hits: usize, total: usize) -> Estimate {
    let n = total as f64;
    let p = hits as f64 / n;
    let z2 = 1.0;
    let half = (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / (1.0 + z2 / n);
    Estimate { value: p, stderr: half }
}
