use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use conclab_cli::config::parse_n_list;
use conclab_cli::{commands, write_outputs, Outcome, Overrides, RunConfig};

#[derive(Parser)]
#[command(name = "conclab", version, about = "Seeded checks of concentration bounds for empirical distribution functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run catalog entries and write reports.json and reports.csv
    Verify(Common),
    /// Hardy and Cheeger constants of the configured or fixture laws (constants.csv)
    Constants(Common),
    /// Decay curves of the rate entries over the n sweep (curves.csv)
    Curve(Common),
    /// Dump sorted Wigner spectra (spectra.csv)
    Simulate(Common),
}

#[derive(Args)]
struct Common {
    /// TOML run configuration
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated bound ids, or "all"
    #[arg(long)]
    bounds: Option<String>,
    /// Comma-separated n values
    #[arg(long)]
    n: Option<String>,
    /// Monte Carlo replications
    #[arg(long)]
    reps: Option<usize>,
    /// Allowed standard errors above the bound
    #[arg(long)]
    slack: Option<f64>,
    /// Lower Hardy bracket constant
    #[arg(long)]
    c0: Option<f64>,
    /// Upper Hardy bracket constant
    #[arg(long)]
    c1: Option<f64>,
}

impl Common {
    fn resolve(&self) -> anyhow::Result<RunConfig> {
        let base = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        Ok(base.apply(&Overrides {
            seed: self.seed,
            out: self.out.clone(),
            bounds: self.bounds.clone(),
            n: self.n.as_deref().map(parse_n_list).transpose().map_err(anyhow::Error::msg)?,
            reps: self.reps,
            slack: self.slack,
            c0: self.c0,
            c1: self.c1,
        }))
    }
}

fn init_threads() -> anyhow::Result<()> {
    let Ok(v) = std::env::var("CONCLAB_THREADS") else {
        return Ok(());
    };
    let k: usize = v.trim().parse().ok().filter(|k| *k > 0).with_context(|| format!("CONCLAB_THREADS must be a positive integer, got '{v}'"))?;
    rayon::ThreadPoolBuilder::new().num_threads(k).build_global()?;
    Ok(())
}

fn run(cli: &Cli) -> anyhow::Result<(Outcome, PathBuf)> {
    init_threads()?;
    let (common, f): (&Common, fn(&RunConfig) -> Result<Outcome, conclab_cli::ConfigError>) = match &cli.command {
        Command::Verify(c) => (c, commands::verify),
        Command::Constants(c) => (c, commands::constants),
        Command::Curve(c) => (c, commands::curve),
        Command::Simulate(c) => (c, commands::simulate),
    };
    let cfg = common.resolve()?;
    let outcome = f(&cfg)?;
    Ok((outcome, cfg.out_dir()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (outcome, dir) = match run(&cli) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    for s in &outcome.skipped {
        eprintln!("skipped {s}");
    }
    if let Err(e) = write_outputs(&dir, &outcome.files) {
        eprintln!("error: writing {}: {e}", dir.display());
        return ExitCode::from(2);
    }
    for (name, _) in &outcome.files {
        println!("{}", dir.join(name).display());
    }
    if outcome.all_pass {
        ExitCode::SUCCESS
    } else {
        eprintln!("at least one asserted check failed");
        ExitCode::from(1)
    }
}
