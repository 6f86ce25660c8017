use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use qramnet::experiments::{self, SweepOptions, DEFAULT_MAX_GRID_POINTS};
use qramnet::sim::TdSchedule;
use qramnet::validation;
use qramnet::SweepConfig;

#[derive(Parser)]
#[command(name = "qramnet", version, about = "Noisy GHZ distribution sweeps for network QRAM")]
struct Cli {
    /// Worker threads (default: one per core).
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a config with exactly one grid point and print its summary as JSON.
    Run {
        config: PathBuf,
        #[command(flatten)]
        opts: SweepArgs,
    },
    /// Evaluate every grid point of a config and write CSV.
    Sweep {
        config: PathBuf,
        #[command(flatten)]
        opts: SweepArgs,
    },
    /// Compare the closed forms against the density-matrix oracle.
    OracleValidate {
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print a shipped config, or run it with --run.
    Preset {
        /// Preset name; omit with --list.
        name: Option<String>,
        #[arg(long)]
        list: bool,
        /// Run the preset as a sweep instead of printing it.
        #[arg(long)]
        run: bool,
        #[command(flatten)]
        opts: SweepArgs,
    },
}

#[derive(Args, Clone)]
struct SweepArgs {
    /// First seed; runs use seed..seed+n_sims.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    n_sims: Option<usize>,
    /// Output CSV path (overrides output_path in the config).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write a JSON mirror next to the CSV.
    #[arg(long)]
    json: bool,
    /// Let TD step-2 pair generation start at t = 0.
    #[arg(long)]
    overlap_steps: bool,
    #[arg(long, default_value_t = DEFAULT_MAX_GRID_POINTS)]
    max_grid: usize,
}

impl SweepArgs {
    fn apply(&self, cfg: &mut SweepConfig) -> Result<()> {
        if let Some(seed) = self.seed {
            cfg.base_seed = seed;
        }
        if let Some(n) = self.n_sims {
            cfg.n_sims = n;
        }
        if let Some(out) = &self.out {
            cfg.output_path = Some(out.clone());
        }
        cfg.validate()?;
        Ok(())
    }

    fn options(&self) -> SweepOptions {
        SweepOptions {
            max_grid_points: self.max_grid,
            td_schedule: if self.overlap_steps {
                TdSchedule::Overlapped
            } else {
                TdSchedule::Sequential
            },
            ..SweepOptions::default()
        }
    }
}

fn sweep(mut cfg: SweepConfig, args: &SweepArgs) -> Result<()> {
    args.apply(&mut cfg)?;
    let rows = experiments::run_sweep(&cfg, &args.options())?;
    match &cfg.output_path {
        Some(path) => {
            for p in experiments::write_outputs(&rows, path, args.json)? {
                log::info!("wrote {}", p.display());
            }
        }
        None => {
            if args.json {
                bail!("--json needs an output path");
            }
            print!("{}", experiments::csv_string(&rows)?);
        }
    }
    Ok(())
}

fn run_single(mut cfg: SweepConfig, args: &SweepArgs) -> Result<()> {
    args.apply(&mut cfg)?;
    let size = cfg.grid_size();
    if size != 1 {
        bail!("`run` takes a config with one grid point, this one has {size}; use `sweep`");
    }
    let rows = experiments::run_sweep(&cfg, &args.options())?;
    if let Some(path) = &cfg.output_path {
        experiments::write_outputs(&rows, path, args.json)?;
    }
    println!("{}", serde_json::to_string_pretty(&rows[0])?);
    Ok(())
}

fn write_or_print(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn execute(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Run { config, opts } => run_single(SweepConfig::from_path(&config)?, &opts)?,
        Command::Sweep { config, opts } => sweep(SweepConfig::from_path(&config)?, &opts)?,
        Command::OracleValidate { out } => {
            let report = validation::oracle_validate()?;
            let mut text = serde_json::to_string_pretty(&report)?;
            text.push('\n');
            write_or_print(&text, out.as_deref())?;
            if !report.passed() {
                eprintln!("oracle validation failed");
                return Ok(false);
            }
        }
        Command::Preset { name, list, run, opts } => {
            if list {
                for n in experiments::preset_names() {
                    println!("{n}");
                }
                return Ok(true);
            }
            let Some(name) = name else {
                bail!("give a preset name or --list");
            };
            if run {
                sweep(experiments::preset(&name)?, &opts)?;
            } else {
                write_or_print(experiments::preset_source(&name)?, opts.out.as_deref())?;
            }
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Some(n) = cli.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match execute(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
