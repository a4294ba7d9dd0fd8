//! Command-line parsing and dispatch.

use std::ffi::OsString;
use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

use crate::{cmd_experiment, cmd_search, cmd_systematic, LoadedConfig, Options};

/// Photodetector design optimization over commercial component grids.
#[derive(Parser)]
#[command(name = "tiaopt", version)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Evaluate every design point and report the optimum.
    Systematic {
        #[command(flatten)]
        common: Common,
        /// Also write every grid point to grid.csv.
        #[arg(long)]
        grid: bool,
    },
    /// One Monte Carlo or genetic search run.
    Search {
        #[command(flatten)]
        common: Common,
    },
    /// Repeated runs with error statistics against the exhaustive optimum.
    Experiment {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
pub struct Common {
    /// Run config (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; must be absent or empty unless --force is given.
    #[arg(long)]
    out: PathBuf,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Seed override (search seed, or experiment base seed).
    #[arg(long)]
    seed: Option<u64>,
    /// Neither read nor write the merit table cache.
    #[arg(long)]
    no_cache: bool,
    /// Replace the output directory if it is not empty.
    #[arg(long)]
    force: bool,
}

impl Common {
    fn options(&self, export_grid: bool) -> Options {
        Options {
            out: self.out.clone(),
            seed: self.seed,
            use_cache: !self.no_cache,
            export_grid,
            force: self.force,
        }
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run_args<I, T>(args: I) -> Result<()>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run(Cli::try_parse_from(args)?)
}

pub fn run(cli: Cli) -> Result<()> {
    let (common, grid) = match &cli.command {
        Command::Systematic { common, grid } => (common, *grid),
        Command::Search { common } | Command::Experiment { common } => (common, false),
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = common.threads {
        pool = pool.num_threads(n);
    }
    pool.build()?.install(|| dispatch(&cli.command, common, grid))
}

fn dispatch(command: &Command, common: &Common, grid: bool) -> Result<()> {
    let cfg = LoadedConfig::load(&common.config)?;
    let opts = common.options(grid);
    match command {
        Command::Systematic { .. } => {
            let r = cmd_systematic(&cfg, &opts)?;
            let p = r.best_point(&cfg.space);
            eprintln!(
                "best Rf = {} ohm, Cf = {} F, VD = {} V, merit {:.4} ({} evaluations)",
                p.rf, p.cf, p.vd, r.best_merit.global, r.evaluations
            );
        }
        Command::Search { .. } => {
            let r = cmd_search(&cfg, &opts)?;
            let p = r.best_point(&cfg.space);
            eprintln!(
                "best Rf = {} ohm, Cf = {} F, VD = {} V, merit {:.4} ({} evaluations)",
                p.rf, p.cf, p.vd, r.best_merit.global, r.evaluations
            );
        }
        Command::Experiment { .. } => {
            for (i, s) in cmd_experiment(&cfg, &opts)?.iter().enumerate() {
                let mark = if s.censored { " (censored)" } else { "" };
                eprintln!("sweep {i}: eps95 = {:.3}%{mark}", s.eps95);
            }
        }
    }
    eprintln!("results in {}", opts.out.display());
    Ok(())
}
