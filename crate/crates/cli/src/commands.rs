//! The four subcommands. Each returns the files to write and whether every
//! asserted check passed; nothing touches the disk before a run completes.

use std::time::Instant;

use conclab_core::distributions::standard_library;
use conclab_core::functional::{cheeger_pi_constant, hardy_lsi_bracket, hardy_pi_bracket, isoperimetric_constant, HardyBracket};
use conclab_core::random_matrix::{spectrum_stream, WignerEnsembleConfig};
use conclab_core::verifier::RateFit;
use conclab_core::{AnalyticDistribution, BoundId, BoundReport, Error, MeasureModel, ReportKind, ScenarioModel, Verifier};
use rayon::prelude::*;

use crate::config::{ConfigError, RunConfig};
use crate::output::{constants_csv, curves_csv, reports_csv, reports_json, spectra_csv, ConstantsRow};

#[derive(Debug, Default)]
pub struct Outcome {
    pub files: Vec<(String, String)>,
    pub all_pass: bool,
    /// Entries left out of an "all" run, with the reason.
    pub skipped: Vec<String>,
}

fn invalid(msg: impl Into<String>) -> ConfigError {
    ConfigError::Invalid(msg.into())
}

fn skippable(e: &Error) -> bool {
    matches!(e, Error::NotApplicable { .. } | Error::RequiresLsi(_) | Error::MissingConstant { .. })
}

pub fn verify(cfg: &RunConfig) -> Result<Outcome, ConfigError> {
    let ns = cfg.ns()?;
    let seed = cfg.seed()?;
    let explicit = cfg.bounds()?;
    cfg.hardy()?;
    let scenario = cfg.scenario(&ns)?;
    let has_sweep = !scenario.n_sweep.is_empty();
    let v = Verifier::new(scenario, cfg.plan(ns[0])?)?;
    let mut rows: Vec<(BoundReport, u128)> = Vec::new();
    let mut skipped = Vec::new();
    for b in explicit.clone().unwrap_or_else(|| BoundId::ALL.to_vec()) {
        let own_sweep = matches!(b, BoundId::Ex1 | BoundId::Ex2);
        if explicit.is_none() && b.uses_sweep() && !own_sweep && !has_sweep {
            skipped.push(format!("{b}: needs at least 3 distinct n"));
            continue;
        }
        let start = Instant::now();
        let res = if b.uses_sweep() {
            v.run(b)
        } else {
            ns.iter().map(|&n| v.run_at(b, n)).collect::<Result<Vec<_>, _>>().map(|r| r.concat())
        };
        let ms = start.elapsed().as_millis();
        match res {
            Ok(reports) => rows.extend(reports.into_iter().map(|r| (r, ms))),
            Err(e) if explicit.is_none() && skippable(&e) => skipped.push(format!("{b}: {e}")),
            Err(e) => return Err(e.into()),
        }
    }
    let reports: Vec<BoundReport> = rows.iter().map(|(r, _)| r.clone()).collect();
    Ok(Outcome {
        all_pass: reports.iter().all(BoundReport::acceptable),
        files: vec![("reports.json".into(), reports_json(&reports)), ("reports.csv".into(), reports_csv(&rows, seed))],
        skipped,
    })
}

pub fn curve(cfg: &RunConfig) -> Result<Outcome, ConfigError> {
    let ns = cfg.ns()?;
    cfg.seed()?;
    let explicit = cfg.bounds()?;
    let scenario = cfg.scenario(&ns)?;
    if scenario.n_sweep.is_empty() {
        return Err(invalid("curve needs an n sweep with at least 3 distinct values"));
    }
    if let Some(b) = explicit.iter().flatten().find(|b| !b.uses_sweep()) {
        return Err(invalid(format!("{b} is not a rate entry")));
    }
    let v = Verifier::new(scenario, cfg.plan(ns[0])?)?;
    let mut curves: Vec<(String, String, RateFit)> = Vec::new();
    let mut all_pass = true;
    let mut skipped = Vec::new();
    let list = explicit.clone().unwrap_or_else(|| BoundId::ALL.into_iter().filter(|b| b.uses_sweep()).collect());
    for b in list {
        match v.rate_curves(b) {
            Ok(fits) => {
                for (variant, fit) in fits {
                    all_pass &= fit.pass || b.kind() != ReportKind::Rate;
                    curves.push((b.as_str().to_string(), variant, fit));
                }
            }
            Err(e) if explicit.is_none() && skippable(&e) => skipped.push(format!("{b}: {e}")),
            Err(e) => return Err(e.into()),
        }
    }
    Ok(Outcome { files: vec![("curves.csv".into(), curves_csv(&curves))], all_pass, skipped })
}

pub fn simulate(cfg: &RunConfig) -> Result<Outcome, ConfigError> {
    let ns = cfg.ns()?;
    let seed = cfg.seed()?;
    let [n] = ns[..] else {
        return Err(invalid("simulate takes a single n"));
    };
    let scenario = cfg.scenario(&ns)?;
    let ScenarioModel::Wigner { entry } = scenario.model else {
        return Err(invalid("simulate needs a wigner scenario"));
    };
    let reps = cfg.plan(n)?.replications;
    let ens = WignerEnsembleConfig::new(n, entry, seed)?;
    let spectra = (0..reps)
        .into_par_iter()
        .map(|r| spectrum_stream(&ens, r as u64).map(|s| s.eigenvalues))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Outcome { files: vec![("spectra.csv".into(), spectra_csv(&spectra))], all_pass: true, skipped: Vec::new() })
}

/// The configured law, or the fixture laws plus a law with a density gap.
fn constants_laws(cfg: &RunConfig) -> Result<Vec<(String, MeasureModel)>, ConfigError> {
    if let Some(l) = &cfg.law {
        return Ok(vec![(l.id.clone(), l.model()?)]);
    }
    let mut laws = standard_library();
    laws.push(AnalyticDistribution::gapped_uniform(-2.0, -1.0, 1.0, 2.0)?);
    laws.into_iter().map(|law| Ok((law.id().to_string(), MeasureModel::from_law(law)?))).collect()
}

fn bracket_values(b: Result<HardyBracket, Error>) -> Result<[f64; 4], Error> {
    match b {
        Ok(b) => Ok([b.left, b.right, b.lower, b.upper]),
        Err(Error::InfiniteHardyConstant) => Ok([f64::INFINITY; 4]),
        Err(e) => Err(e),
    }
}

pub fn constants(cfg: &RunConfig) -> Result<Outcome, ConfigError> {
    let hardy = cfg.hardy()?;
    let mut rows = Vec::new();
    for (name, m) in constants_laws(cfg)? {
        let a = bracket_values(hardy_pi_bracket(&m, &hardy))?;
        let b = bracket_values(hardy_lsi_bracket(&m, &hardy))?;
        let (h, cheeger) = match (isoperimetric_constant(&m), cheeger_pi_constant(&m)) {
            (Ok(h), Ok(c)) => (h, c),
            (Err(Error::ZeroIsoperimetricConstant), _) => (0.0, f64::INFINITY),
            (Err(e), _) | (_, Err(e)) => return Err(e.into()),
        };
        let mut values = [None; 12];
        for (slot, v) in values.iter_mut().zip(a.into_iter().chain(b).chain([h, cheeger])) {
            *slot = Some(v);
        }
        values[10] = m.pi_constant;
        values[11] = m.lsi_constant;
        rows.push(ConstantsRow { law: name, values });
    }
    Ok(Outcome { files: vec![("constants.csv".into(), constants_csv(&rows))], all_pass: true, skipped: Vec::new() })
}
