//! Wigner matrices (1/sqrt n)(xi_jk) with symmetric i.i.d. entries and
//! their spectral empirical distributions.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::distributions::AnalyticDistribution;
use crate::eigen::{symmetric_eigenvalues, SymmetricMatrix};
use crate::empirical::{kolmogorov_distance, EmpiricalCdf};
use crate::error::{invalid, Error, Result};
use crate::functional::{expectation, lipschitz_image_constant, MeasureModel};
use crate::mc::{replicate, stream_rng};

/// Stream offset for the matrices of a pooled reference.
pub const POOL_STREAM_BASE: u64 = 1 << 40;
/// Stream offset for Lipschitz-ratio trials.
pub const LIPSCHITZ_STREAM_BASE: u64 = 1 << 41;

/// Dimension, standardized entry law and seed of a Wigner ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WignerEnsembleConfig {
    pub n: usize,
    pub entry_law: MeasureModel,
    pub seed: u64,
}

impl WignerEnsembleConfig {
    /// Standardizes `raw` to mean 0 and variance 1 (rescaling its
    /// constants accordingly) and checks the result by quadrature.
    pub fn new(n: usize, raw: MeasureModel, seed: u64) -> Result<Self> {
        if n < 2 {
            return Err(invalid("Wigner matrices need n >= 2"));
        }
        let var = raw.base.variance();
        if !(var > 0.0 && var.is_finite()) {
            return Err(Error::NotNormalizable(format!("variance {var}")));
        }
        let s = var.sqrt();
        let entry_law = raw.affine(-raw.base.mean() / s, 1.0 / s)?;
        let mean = expectation(&entry_law.base, |x| x).value;
        let second = expectation(&entry_law.base, |x| x * x).value;
        if mean.abs() > 1e-9 || (second - 1.0).abs() > 1e-6 {
            return Err(Error::NotNormalizable(format!("standardized mean {mean}, variance {second}")));
        }
        Ok(Self { n, entry_law, seed })
    }

    pub fn with_n(&self, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(invalid("Wigner matrices need n >= 2"));
        }
        Ok(Self { n, ..*self })
    }

    /// Number of free entries, n(n+1)/2.
    pub fn entry_count(&self) -> usize {
        self.n * (self.n + 1) / 2
    }

    /// Poincare constant of the sorted spectrum as a function of the entries: 2 sigma^2 / n.
    pub fn spectral_pi_constant(&self) -> Option<f64> {
        let lip = (2.0 / self.n as f64).sqrt();
        self.entry_law.pi_constant.and_then(|c| lipschitz_image_constant(c, lip).ok())
    }

    /// Log-Sobolev constant of the sorted spectrum: 2 sigma^2 / n.
    pub fn spectral_lsi_constant(&self) -> Option<f64> {
        let lip = (2.0 / self.n as f64).sqrt();
        self.entry_law.lsi_constant.and_then(|c| lipschitz_image_constant(c, lip).ok())
    }

    /// Raw entries xi_jk, j <= k, row by row.
    pub fn sample_entries<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        (0..self.entry_count()).map(|_| self.entry_law.base.sample(rng)).collect()
    }

    /// The matrix (1/sqrt n) xi built from raw upper-triangle entries.
    pub fn assemble(&self, entries: &[f64]) -> Result<SymmetricMatrix> {
        let scale = 1.0 / (self.n as f64).sqrt();
        let scaled: Vec<f64> = entries.iter().map(|x| x * scale).collect();
        SymmetricMatrix::from_upper_triangle(self.n, &scaled)
    }
}

/// Sorted eigenvalues of one matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
}

impl Spectrum {
    pub fn to_empirical(&self) -> Result<EmpiricalCdf> {
        EmpiricalCdf::new(self.eigenvalues.clone())
    }
}

/// The matrix for stream 0 of the configured seed.
pub fn sample_matrix(cfg: &WignerEnsembleConfig) -> Result<SymmetricMatrix> {
    sample_matrix_stream(cfg, 0)
}

/// The matrix for one stream of the configured seed.
pub fn sample_matrix_stream(cfg: &WignerEnsembleConfig, stream: u64) -> Result<SymmetricMatrix> {
    let mut rng = stream_rng(cfg.seed, stream);
    cfg.assemble(&cfg.sample_entries(&mut rng))
}

pub fn eigenvalues(m: &SymmetricMatrix) -> Result<Spectrum> {
    Ok(Spectrum { eigenvalues: symmetric_eigenvalues(m)? })
}

pub fn spectrum_stream(cfg: &WignerEnsembleConfig, stream: u64) -> Result<Spectrum> {
    eigenvalues(&sample_matrix_stream(cfg, stream)?)
}

/// F_n of the stream-0 matrix.
pub fn spectral_empirical(cfg: &WignerEnsembleConfig) -> Result<EmpiricalCdf> {
    spectrum_stream(cfg, 0)?.to_empirical()
}

/// (sum (lambda_i - lambda'_i)^2, ||A - B||_HS^2).
pub fn hoffman_wielandt_check(a: &SymmetricMatrix, b: &SymmetricMatrix) -> Result<(f64, f64)> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(a.dim(), b.dim()));
    }
    let ea = symmetric_eigenvalues(a)?;
    let eb = symmetric_eigenvalues(b)?;
    let lhs = ea.iter().zip(&eb).map(|(x, y)| (x - y) * (x - y)).sum();
    Ok((lhs, a.hs_distance_sq(b)?))
}

/// Outcome of the spectral-map Lipschitz trials.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LipschitzCheck {
    pub max_ratio: f64,
    /// sqrt(2/n)
    pub bound: f64,
    pub trials: usize,
    /// Trials skipped because both entry vectors coincided.
    pub skipped: usize,
}

impl LipschitzCheck {
    pub fn holds(&self) -> bool {
        self.max_ratio <= self.bound + 1e-8
    }
}

/// Ratio of sorted-spectrum distance to entry-vector distance over random
/// pairs. Even trials use independent pairs, odd trials perturb a few entries.
pub fn spectral_map_lipschitz_check(cfg: &WignerEnsembleConfig, trials: usize) -> Result<LipschitzCheck> {
    if trials == 0 {
        return Err(invalid("at least one trial is required"));
    }
    let ratios = replicate(cfg.seed, LIPSCHITZ_STREAM_BASE, trials, |rng, t| -> Result<Option<f64>> {
        let xi = cfg.sample_entries(rng);
        let xi2 = if t % 2 == 0 {
            cfg.sample_entries(rng)
        } else {
            let mut v = xi.clone();
            let k = rng.random_range(1..=3.min(v.len()));
            for _ in 0..k {
                let j = rng.random_range(0..v.len());
                v[j] += rng.random_range(-1.0..1.0);
            }
            v
        };
        let dist: f64 = xi.iter().zip(&xi2).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        if dist == 0.0 {
            return Ok(None);
        }
        let s1 = symmetric_eigenvalues(&cfg.assemble(&xi)?)?;
        let s2 = symmetric_eigenvalues(&cfg.assemble(&xi2)?)?;
        let sd: f64 = s1.iter().zip(&s2).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        Ok(Some(sd / dist))
    });
    let mut max_ratio = 0.0_f64;
    let mut skipped = 0;
    for r in ratios {
        match r? {
            Some(v) => max_ratio = max_ratio.max(v),
            None => skipped += 1,
        }
    }
    Ok(LipschitzCheck { max_ratio, bound: (2.0 / cfg.n as f64).sqrt(), trials, skipped })
}

/// N_I = #{i : lambda_i in [a, b)}.
pub fn interval_count(spec: &Spectrum, a: f64, b: f64) -> Result<usize> {
    if !(a < b) {
        return Err(invalid(format!("interval needs a < b, got [{a}, {b})")));
    }
    let ev = &spec.eigenvalues;
    Ok(ev.partition_point(|x| *x < b) - ev.partition_point(|x| *x < a))
}

/// Pooled spectral CDF standing in for F = E F_n.
#[derive(Debug, Clone, PartialEq)]
pub struct PooledSpectrum {
    pub cdf: EmpiricalCdf,
    pub replications: usize,
    pub converged: bool,
    /// Kolmogorov distance between the last two pooled estimates.
    pub last_change: f64,
}

/// Pools spectra of `initial` matrices (streams from [`POOL_STREAM_BASE`]),
/// doubling the count until successive pools differ by less than
/// 1/(2 sqrt(n R)) in Kolmogorov distance or `max_doublings` is reached.
pub fn pooled_spectral_cdf(cfg: &WignerEnsembleConfig, initial: usize, max_doublings: usize) -> Result<PooledSpectrum> {
    if initial < 1 {
        return Err(invalid("pool needs at least one replication"));
    }
    let draw = |from: usize, count: usize| -> Result<Vec<f64>> {
        let spectra = replicate(cfg.seed, POOL_STREAM_BASE + from as u64, count, |rng, _| -> Result<Vec<f64>> {
            symmetric_eigenvalues(&cfg.assemble(&cfg.sample_entries(rng))?)
        });
        let mut all = Vec::with_capacity(count * cfg.n);
        for s in spectra {
            all.extend(s?);
        }
        Ok(all)
    };
    let mut atoms = draw(0, initial)?;
    let mut reps = initial;
    let mut pool = EmpiricalCdf::new(atoms.clone())?;
    let mut last_change = f64::INFINITY;
    let mut converged = false;
    for _ in 0..max_doublings {
        atoms.extend(draw(reps, reps)?);
        reps *= 2;
        let next = EmpiricalCdf::new(atoms.clone())?;
        last_change = kolmogorov_distance(&pool, &next);
        pool = next;
        if last_change < 0.5 / ((cfg.n * reps) as f64).sqrt() {
            converged = true;
            break;
        }
    }
    Ok(PooledSpectrum { cdf: pool, replications: reps, converged, last_change })
}

/// Semicircle law, the limit of the spectral distributions.
pub fn semicircle_limit() -> AnalyticDistribution {
    AnalyticDistribution::semicircle()
}
