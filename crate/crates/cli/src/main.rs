use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use tanknav_core::harness::{
    export_trajectories, run_evaluation, run_training, ExportFormat, RunConfig,
};
use tanknav_core::{Checkpoint, Result};

#[derive(Parser)]
#[command(
    name = "tanknav",
    version,
    about = "Train, evaluate and export hybrid air/water navigation agents"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train a learning agent; writes train.csv and checkpoint.bin into --out.
    Train(Common),
    /// Evaluate a checkpoint (or the bba baseline); writes eval_summary.csv and eval_trials.csv.
    Eval(EvalArgs),
    /// Evaluate, then write one trajectory file per trial plus summary.csv.
    Export(ExportArgs),
    /// Print the resolved configuration in canonical form.
    InspectConfig(Common),
}

/// Flags shared by every subcommand. Each one overrides the config file.
#[derive(Args)]
struct Common {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// docrl-d, docrl-s or bba
    #[arg(long)]
    agent: Option<String>,
    /// train-random, fixed-aw, fixed-wa or fixed-aw2
    #[arg(long)]
    scenario: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Number of training episodes.
    #[arg(long)]
    episodes: Option<u64>,
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    #[arg(long, default_value_t = 100)]
    trials: u64,
}

#[derive(Args)]
struct ExportArgs {
    #[command(flatten)]
    eval: EvalArgs,
    /// csv or json
    #[arg(long, default_value = "csv")]
    format: String,
}

impl Common {
    fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(agent) = &self.agent {
            cfg.set("agent", agent)?;
        }
        if let Some(scenario) = &self.scenario {
            cfg.set("scenario", scenario)?;
        }
        if let Some(out) = &self.out {
            cfg.out_dir = out.clone();
        }
        if let Some(n) = self.episodes {
            cfg.max_eps = n;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

impl EvalArgs {
    fn resolve(&self) -> Result<(RunConfig, Option<Checkpoint>)> {
        let mut cfg = self.common.resolve()?;
        cfg.eval_trials = self.trials;
        cfg.validate()?;
        let ck = self
            .checkpoint
            .as_deref()
            .map(Checkpoint::load)
            .transpose()?;
        Ok((cfg, ck))
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Train(common) => {
            let cfg = common.resolve()?;
            let every = (cfg.max_eps / 20).max(1);
            let out = run_training(&cfg, &mut |row| {
                if row.episode % every == 0 || row.episode == cfg.max_eps {
                    eprintln!(
                        "episode {:>5}  steps {:>4}  reward {:>7.1}  arrivals {}  {}",
                        row.episode, row.steps, row.reward, row.arrivals, row.event
                    );
                }
            })?;
            println!("training log: {}", out.log_path.display());
            println!("checkpoint:   {}", out.checkpoint_path.display());
        }
        Command::Eval(args) => {
            let (cfg, ck) = args.resolve()?;
            let s = run_evaluation(&cfg, ck.as_ref())?.summary;
            println!(
                "{} {}: {}/{} successful, t_air {:.2}±{:.2} s, t_water {:.2}±{:.2} s",
                s.agent,
                s.scenario,
                s.success_count,
                s.trials,
                s.t_air_mean,
                s.t_air_std,
                s.t_water_mean,
                s.t_water_std
            );
        }
        Command::Export(args) => {
            let format: ExportFormat = args.format.parse()?;
            let (cfg, ck) = args.eval.resolve()?;
            let outcome = run_evaluation(&cfg, ck.as_ref())?;
            let paths = export_trajectories(&outcome.logs, &cfg.out_dir, format)?;
            println!(
                "wrote {} trajectories to {}",
                paths.len(),
                cfg.out_dir.display()
            );
        }
        Command::InspectConfig(common) => print!("{}", common.resolve()?.dump()),
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
