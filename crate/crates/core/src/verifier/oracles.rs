//! Closed-form laws of statistics used in place of Monte Carlo where known.

use libm::erfc;

/// P{|Z| >= h sqrt(n)/s} for the centered mean of n Gaussian coordinates
/// with standard deviation s, i.e. the law N(0, s^2/n).
pub fn gaussian_mean_two_sided_tail(h: f64, n: usize, s: f64) -> f64 {
    erfc(h * (n as f64).sqrt() / (s * std::f64::consts::SQRT_2))
}

/// Distribution of the number of successes among independent trials with
/// success probabilities `probs` (Poisson-binomial), by dynamic programming.
pub fn count_pmf(probs: &[f64]) -> Vec<f64> {
    let mut pmf = vec![0.0; probs.len() + 1];
    pmf[0] = 1.0;
    for (k, &p) in probs.iter().enumerate() {
        let p = p.clamp(0.0, 1.0);
        for j in (1..=k + 1).rev() {
            pmf[j] = pmf[j] * (1.0 - p) + pmf[j - 1] * p;
        }
        pmf[0] *= 1.0 - p;
    }
    pmf
}

/// Law of a statistic taking finitely many values.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteLaw {
    pub values: Vec<f64>,
    pub probs: Vec<f64>,
}

impl DiscreteLaw {
    /// K/n - center with K ~ `pmf` on {0, ..., n}.
    pub fn scaled_count(pmf: &[f64], n: usize, center: f64) -> Self {
        let values = (0..pmf.len()).map(|k| k as f64 / n as f64 - center).collect();
        Self { values, probs: pmf.to_vec() }
    }

    /// P{|V| >= c}.
    pub fn two_sided_tail(&self, c: f64) -> f64 {
        self.values.iter().zip(&self.probs).filter(|(v, _)| v.abs() >= c).map(|(_, p)| p).sum::<f64>().min(1.0)
    }

    pub fn mean_abs(&self) -> f64 {
        self.values.iter().zip(&self.probs).map(|(v, p)| v.abs() * p).sum()
    }

    /// log E exp(t V), computed stably around the largest exponent.
    pub fn log_mgf(&self, t: f64) -> f64 {
        let top = self
            .values
            .iter()
            .zip(&self.probs)
            .filter(|(_, p)| **p > 0.0)
            .map(|(v, _)| t * v)
            .fold(f64::NEG_INFINITY, f64::max);
        let s: f64 = self.values.iter().zip(&self.probs).map(|(v, p)| p * (t * v - top).exp()).sum();
        top + s.ln()
    }
}

/// Exact log E exp(t (K/n - q)) for K a sum of independent Bernoulli(p_i)
/// and q the mean of the p_i.
pub fn count_log_mgf(probs: &[f64], t: f64) -> f64 {
    let n = probs.len() as f64;
    let em = (t / n).exp_m1();
    let q = probs.iter().sum::<f64>() / n;
    probs.iter().map(|p| (p * em).ln_1p()).sum::<f64>() - t * q
}
