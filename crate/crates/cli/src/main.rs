use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qpc_core::harness::{
    emit_outputs, pareto_sweep, reference_run, run_simulation_with, scaling_experiment, ExperimentConfig,
};
use qpc_core::pcore::PcMode;
use qpc_core::Error;

/// Predictor-corrector experiments: single runs, sample scaling and
/// parameter sweeps.
#[derive(Debug, Parser)]
#[command(name = "qpc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the configured case and write ledger, series, snapshots and summaries.
    Run(Common),
    /// Required samples per method over the TGV resolutions.
    Scaling(Common),
    /// H-PC sweep over sample sizes and p-value thresholds.
    Pareto(Common),
    /// Check a config file without running anything.
    Validate(Common),
}

#[derive(Debug, Args)]
struct Common {
    /// Experiment file (TOML).
    #[arg(long, short)]
    config: PathBuf,
    /// Override the master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the policy: fcs, hpc, qpc, random_skip or periodic_skip.
    #[arg(long)]
    policy: Option<String>,
    #[arg(long, short)]
    quiet: bool,
}

const EXIT_CONFIG: u8 = 2;
const EXIT_DIVERGED: u8 = 3;

fn load(common: &Common) -> Result<ExperimentConfig, Error> {
    let mut cfg = ExperimentConfig::load(&common.config)?;
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &common.out {
        cfg.output_dir = out.clone();
    }
    if let Some(p) = &common.policy {
        cfg.pc.mode = p.parse::<PcMode>()?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, Error> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    Ok(path)
}

fn run(cfg: &ExperimentConfig, quiet: bool) -> Result<bool, Error> {
    let reference = if cfg.reference && cfg.pc.mode != PcMode::Fcs { Some(reference_run(cfg)?) } else { None };
    let mut diverged = false;
    for rep in 0..cfg.repetitions {
        let out = run_simulation_with(cfg, rep, reference.as_ref())?;
        emit_outputs(&out, &cfg.output_dir)?;
        let s = &out.summary;
        diverged |= s.failed();
        if !quiet {
            let errors: Vec<String> = s.errors.iter().map(|(k, v)| format!("{k}={v:.4}")).collect();
            println!(
                "{} {} seed {}: {} steps, skip fraction {:.3}, {} samples, {:.2}s {}",
                s.case,
                s.mode,
                s.seed,
                s.total_steps,
                s.skip_fraction,
                s.samples_spent,
                s.wall_time_s,
                errors.join(" ")
            );
            if let (Some(step), Some(reason)) = (s.failure_step, &s.failure_reason) {
                println!("  diverged at step {step}: {reason}");
            }
        }
    }
    Ok(diverged)
}

fn scaling(cfg: &ExperimentConfig, quiet: bool) -> Result<(), Error> {
    let table = scaling_experiment(cfg)?;
    write_file(&cfg.output_dir, "scaling.csv", &table.to_csv())?;
    let json = serde_json::to_string_pretty(&table).map_err(|e| Error::Io(e.to_string()))?;
    write_file(&cfg.output_dir, "scaling.json", &json)?;
    if !quiet {
        print!("{}", table.to_csv());
        let f = |s: Option<f64>| s.map(|v| format!("{v:.3}")).unwrap_or_else(|| "n/a".into());
        println!("slopes: dfs {} hpc {} qpc {}", f(table.slope_dfs), f(table.slope_hpc), f(table.slope_qpc));
        for msg in &table.failures {
            println!("failed: {msg}");
        }
    }
    Ok(())
}

fn pareto(cfg: &ExperimentConfig, quiet: bool) -> Result<(), Error> {
    let result = pareto_sweep(cfg)?;
    let csv = result.to_csv();
    write_file(&cfg.output_dir, "pareto.csv", &csv)?;
    if !quiet {
        print!("{csv}");
        println!("{} of {} runs failed", result.total_failures(), result.total_runs());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (Command::Run(common) | Command::Scaling(common) | Command::Pareto(common) | Command::Validate(common)) =
        &cli.command;
    let cfg = match load(common) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("qpc: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let quiet = common.quiet;
    let outcome = match &cli.command {
        Command::Validate(_) => {
            if !quiet {
                println!("{}: ok ({} with {})", common.config.display(), cfg.case, cfg.pc.mode);
            }
            Ok(false)
        }
        Command::Run(_) => run(&cfg, quiet),
        Command::Scaling(_) => scaling(&cfg, quiet).map(|_| false),
        Command::Pareto(_) => pareto(&cfg, quiet).map(|_| false),
    };
    match outcome {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => ExitCode::from(EXIT_DIVERGED),
        Err(e @ Error::Config(_)) => {
            eprintln!("qpc: {e}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(e @ Error::Diverged { .. }) => {
            eprintln!("qpc: {e}");
            ExitCode::from(EXIT_DIVERGED)
        }
        Err(e) => {
            eprintln!("qpc: {e}");
            ExitCode::FAILURE
        }
    }
}
