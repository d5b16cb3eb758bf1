use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::agents::{Checkpoint, DocrlAgent, Transition};
use crate::error::{Error, Result};
use crate::harness::config::RunConfig;
use crate::sim::{Scenario, StepEvent, TankEnv};

/// One row of the training log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeRow {
    pub episode: u64,
    pub steps: u64,
    pub total_steps: u64,
    pub reward: f64,
    pub arrivals: u64,
    pub event: String,
    /// Mean critic loss over this episode's updates (empty before learning starts).
    pub critic_loss: Option<f64>,
    pub actor_loss: Option<f64>,
    pub t_air: f64,
    pub t_water: f64,
}

#[derive(Debug, Clone)]
pub struct TrainingOutcome {
    pub rows: Vec<EpisodeRow>,
    pub checkpoint: Checkpoint,
    pub log_path: PathBuf,
    pub checkpoint_path: PathBuf,
}

pub const TRAIN_LOG: &str = "train.csv";
pub const CHECKPOINT: &str = "checkpoint.bin";

/// Creates the output directory and checks it is writable.
pub fn prepare_out_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let probe = dir.join(".write-test");
    std::fs::write(&probe, b"").map_err(|e| Error::io(&probe, e))?;
    std::fs::remove_file(&probe).map_err(|e| Error::io(&probe, e))
}

/// Builds the agent, environment and generator a training run starts from.
pub fn training_setup(cfg: &RunConfig) -> Result<(DocrlAgent, TankEnv, ChaCha8Rng)> {
    cfg.validate()?;
    if cfg.agent.learner().is_none() {
        return Err(Error::Config(format!(
            "agent '{}' does not train",
            cfg.agent
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let agent = DocrlAgent::new(cfg.hyper()?, cfg.sizes, cfg.act_context, &mut rng)?;
    let respawn = cfg.scenario == Scenario::TrainRandom;
    let env = TankEnv::new(cfg.world.clone(), cfg.scenario, respawn)?;
    Ok((agent, env, rng))
}

/// Plays one training episode: act, store, learn after every step.
pub fn train_episode(
    agent: &mut DocrlAgent,
    env: &mut TankEnv,
    rng: &mut ChaCha8Rng,
    episode: u64,
) -> Result<EpisodeRow> {
    let mut obs = env.reset(rng)?;
    agent.begin_episode();
    let (mut reward, mut arrivals) = (0.0, 0);
    let (mut closs, mut ncl, mut aloss, mut nal) = (0.0, 0u64, 0.0, 0u64);
    let last_event = loop {
        let action = agent.act(&obs, rng)?;
        let out = env.step(&action, rng)?;
        agent.observe(Transition {
            s: obs,
            a: action,
            r: out.reward,
            s_next: out.obs,
            term: out.term,
        });
        if let Some(stats) = agent.learn(rng)? {
            closs += stats.critic_loss;
            ncl += 1;
            if let Some(a) = stats.actor_loss {
                aloss += a;
                nal += 1;
            }
        }
        reward += out.reward;
        if out.event == StepEvent::Arrive {
            arrivals += 1;
        }
        obs = out.obs;
        if out.done {
            break out.event;
        }
    };
    let s = env.state();
    Ok(EpisodeRow {
        episode,
        steps: s.steps_elapsed,
        total_steps: agent.total_steps,
        reward,
        arrivals,
        event: last_event.name().to_string(),
        critic_loss: (ncl > 0).then(|| closs / ncl as f64),
        actor_loss: (nal > 0).then(|| aloss / nal as f64),
        t_air: s.time_in_air(&env.world),
        t_water: s.time_in_water(&env.world),
    })
}

/// Runs `max_eps` episodes, then writes the training CSV and a checkpoint
/// into the output directory. `progress` sees every finished episode.
pub fn run_training(
    cfg: &RunConfig,
    progress: &mut dyn FnMut(&EpisodeRow),
) -> Result<TrainingOutcome> {
    let (mut agent, mut env, mut rng) = training_setup(cfg)?;
    prepare_out_dir(&cfg.out_dir)?;
    let mut rows = Vec::with_capacity(cfg.max_eps as usize);
    for ep in 1..=cfg.max_eps {
        let row = train_episode(&mut agent, &mut env, &mut rng, ep)?;
        progress(&row);
        rows.push(row);
    }
    let log_path = cfg.out_dir.join(TRAIN_LOG);
    write_rows(&log_path, &rows)?;
    let checkpoint = Checkpoint::capture(&agent, cfg.max_eps, &rng);
    let checkpoint_path = cfg.out_dir.join(CHECKPOINT);
    checkpoint.save(&checkpoint_path)?;
    Ok(TrainingOutcome {
        rows,
        checkpoint,
        log_path,
        checkpoint_path,
    })
}

pub fn write_rows<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_rows<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_path(path)?;
    r.deserialize()
        .map(|row| row.map_err(Error::from))
        .collect()
}
