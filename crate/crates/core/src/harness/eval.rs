use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::agents::{Checkpoint, DocrlAgent};
use crate::bba::{bba_step, BbaConfig};
use crate::error::{Error, Result};
use crate::harness::config::{AgentChoice, RunConfig};
use crate::harness::train::{prepare_out_dir, write_rows};
use crate::sim::{Medium, Scenario, StepEvent, TankEnv, VehicleState};
use crate::types::{Action, Observation};

/// What drives the vehicle during evaluation.
#[derive(Debug, Clone)]
pub enum Controller {
    Learned(Box<DocrlAgent>),
    Bba(BbaConfig),
}

impl Controller {
    /// Builds the controller for `cfg.agent`, loading weights for learners.
    pub fn for_config(cfg: &RunConfig, checkpoint: Option<&Checkpoint>) -> Result<Self> {
        match (cfg.agent.learner(), checkpoint) {
            (None, _) => Ok(Controller::Bba(cfg.bba.clone())),
            (Some(kind), Some(ck)) => {
                if ck.kind() != kind {
                    return Err(Error::Checkpoint(format!(
                        "checkpoint holds a {} agent but {} was requested",
                        ck.kind(),
                        kind
                    )));
                }
                Ok(Controller::Learned(Box::new(ck.restore()?)))
            }
            (Some(kind), None) => Err(Error::Config(format!(
                "evaluating {kind} needs a checkpoint"
            ))),
        }
    }

    fn begin_episode(&mut self) {
        if let Controller::Learned(agent) = self {
            agent.begin_episode();
        }
    }

    fn act(&mut self, obs: &Observation, medium: Medium) -> Result<Action> {
        match self {
            Controller::Learned(agent) => agent.act_greedy(obs),
            Controller::Bba(cfg) => Ok(bba_step(obs, medium, cfg)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub t: u64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub yaw: f64,
    pub medium: Medium,
    pub action: Action,
    pub reward: f64,
    pub min_range: f64,
    pub dist: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeLog {
    pub trial: u64,
    pub start: VehicleState,
    pub records: Vec<StepRecord>,
    pub event: StepEvent,
    pub cumulative_reward: f64,
    pub t_air: f64,
    pub t_water: f64,
}

impl EpisodeLog {
    pub fn success(&self) -> bool {
        self.event == StepEvent::Arrive
    }

    pub fn steps(&self) -> u64 {
        self.records.len() as u64
    }
}

/// Success count and navigation-time statistics. Means and (population)
/// standard deviations are taken over successful trials only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalSummary {
    pub agent: String,
    pub scenario: String,
    pub trials: u64,
    pub success_count: u64,
    pub t_air_mean: f64,
    pub t_air_std: f64,
    pub t_water_mean: f64,
    pub t_water_std: f64,
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (0.0, 0.0);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

impl EvalSummary {
    pub fn from_logs(agent: &str, scenario: Scenario, logs: &[EpisodeLog]) -> Self {
        let ok: Vec<&EpisodeLog> = logs.iter().filter(|l| l.success()).collect();
        let (t_air_mean, t_air_std) = mean_std(&ok.iter().map(|l| l.t_air).collect::<Vec<_>>());
        let (t_water_mean, t_water_std) =
            mean_std(&ok.iter().map(|l| l.t_water).collect::<Vec<_>>());
        Self {
            agent: agent.to_string(),
            scenario: scenario.to_string(),
            trials: logs.len() as u64,
            success_count: ok.len() as u64,
            t_air_mean,
            t_air_std,
            t_water_mean,
            t_water_std,
        }
    }
}

/// Generator of one evaluation trial, independent of every other trial.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial + 1);
    rng
}

/// Plays a single noise-free episode without goal respawn.
pub fn run_trial(cfg: &RunConfig, controller: &mut Controller, trial: u64) -> Result<EpisodeLog> {
    let mut rng = trial_rng(cfg.seed, trial);
    let mut env = TankEnv::new(cfg.world.clone(), cfg.scenario, false)?;
    let mut obs = env.reset(&mut rng)?;
    controller.begin_episode();
    let start = env.state().clone();
    let mut records = Vec::new();
    let mut total = 0.0;
    let event = loop {
        let action = controller.act(&obs, env.state().medium)?;
        let out = env.step(&action, &mut rng)?;
        let s = env.state();
        records.push(StepRecord {
            t: s.steps_elapsed,
            x: s.x,
            y: s.y,
            z: s.z,
            yaw: s.yaw,
            medium: s.medium,
            action,
            reward: out.reward,
            min_range: out.min_range,
            dist: out.dist,
        });
        total += out.reward;
        obs = out.obs;
        if out.done {
            break out.event;
        }
    };
    let s = env.state();
    Ok(EpisodeLog {
        trial,
        start,
        records,
        event,
        cumulative_reward: total,
        t_air: s.time_in_air(&env.world),
        t_water: s.time_in_water(&env.world),
    })
}

#[derive(Debug, Clone)]
pub struct EvalOutcome {
    pub summary: EvalSummary,
    pub logs: Vec<EpisodeLog>,
}

/// Runs `cfg.eval_trials` trials on `cfg.scenario`.
pub fn evaluate(cfg: &RunConfig, checkpoint: Option<&Checkpoint>) -> Result<EvalOutcome> {
    cfg.validate()?;
    let mut controller = Controller::for_config(cfg, checkpoint)?;
    let logs = (0..cfg.eval_trials)
        .map(|trial| run_trial(cfg, &mut controller, trial))
        .collect::<Result<Vec<_>>>()?;
    let summary = EvalSummary::from_logs(cfg.agent.name(), cfg.scenario, &logs);
    Ok(EvalOutcome { summary, logs })
}

/// Per-trial outcome row of `eval_trials.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRow {
    pub trial: u64,
    pub success: bool,
    pub event: String,
    pub steps: u64,
    pub reward: f64,
    pub t_air: f64,
    pub t_water: f64,
}

impl From<&EpisodeLog> for TrialRow {
    fn from(l: &EpisodeLog) -> Self {
        Self {
            trial: l.trial,
            success: l.success(),
            event: l.event.name().to_string(),
            steps: l.steps(),
            reward: l.cumulative_reward,
            t_air: l.t_air,
            t_water: l.t_water,
        }
    }
}

pub const EVAL_SUMMARY: &str = "eval_summary.csv";
pub const EVAL_TRIALS: &str = "eval_trials.csv";

/// Evaluates and writes the summary and per-trial CSVs into `cfg.out_dir`.
pub fn run_evaluation(cfg: &RunConfig, checkpoint: Option<&Checkpoint>) -> Result<EvalOutcome> {
    if cfg.agent == AgentChoice::Bba && checkpoint.is_some() {
        return Err(Error::Config("the bba baseline takes no checkpoint".into()));
    }
    prepare_out_dir(&cfg.out_dir)?;
    let outcome = evaluate(cfg, checkpoint)?;
    write_rows(
        &cfg.out_dir.join(EVAL_SUMMARY),
        std::slice::from_ref(&outcome.summary),
    )?;
    let rows: Vec<TrialRow> = outcome.logs.iter().map(TrialRow::from).collect();
    write_rows(&cfg.out_dir.join(EVAL_TRIALS), &rows)?;
    Ok(outcome)
}
