//! Targets and one-step updates shared by both double-critic agents.

use rand::Rng;

use crate::agents::buffer::SequenceBatch;
use crate::agents::hyper::{HyperparamsD, HyperparamsS};
use crate::agents::networks::{Actor, ActorHead, ActorOutput, Critic, NetworkSizes};
use crate::error::{Error, Result};
use crate::nn::{squashed_sample_on_tape, AdamState, Bound, NetworkParams, Tape, Var};
use crate::types::{ACTION_DIM, OBS_DIM};

/// Online networks and their slowly tracking copies.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentNetworks {
    pub actor: Actor,
    /// Only the deterministic agent keeps an actor target.
    pub actor_target: Option<Actor>,
    pub critic1: Critic,
    pub critic2: Critic,
    pub critic1_target: Critic,
    pub critic2_target: Critic,
}

impl AgentNetworks {
    /// Fresh networks with every target an exact copy of its source.
    pub fn new<R: Rng + ?Sized>(sizes: NetworkSizes, head: ActorHead, rng: &mut R) -> Self {
        let actor = Actor::new(sizes, head, rng);
        let critic1 = Critic::new(sizes, rng);
        let critic2 = Critic::new(sizes, rng);
        let actor_target = match head {
            ActorHead::Deterministic => Some(actor.clone()),
            ActorHead::Gaussian => None,
        };
        Self {
            actor_target,
            critic1_target: critic1.clone(),
            critic2_target: critic2.clone(),
            actor,
            critic1,
            critic2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Optimizers {
    pub actor: AdamState,
    pub critic1: AdamState,
    pub critic2: AdamState,
}

impl Optimizers {
    pub fn new(nets: &AgentNetworks, lr: f64) -> Self {
        Self {
            actor: AdamState::new(&nets.actor.params, lr),
            critic1: AdamState::new(&nets.critic1.params, lr),
            critic2: AdamState::new(&nets.critic2.params, lr),
        }
    }
}

/// Bellman targets together with the pieces they were built from.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetDetail {
    pub targets: Vec<f64>,
    pub q1: Vec<f64>,
    pub q2: Vec<f64>,
    pub next_actions: Vec<f64>,
    /// Log-densities of the next actions (stochastic agent only).
    pub log_probs: Option<Vec<f64>>,
}

fn check_draws(batch: &SequenceBatch, draws: &[f64], what: &'static str) -> Result<()> {
    if draws.len() != batch.batch * ACTION_DIM {
        return Err(Error::shape(
            what,
            format!("{} draws for a batch of {}", draws.len(), batch.batch),
        ));
    }
    Ok(())
}

fn window_var(tape: &mut Tape, batch: &SequenceBatch, next: bool) -> Result<Var> {
    let src = if next { &batch.next_obs } else { &batch.obs };
    tape.constant(batch.seq_len * batch.batch, OBS_DIM, src.clone())
}

fn target_q(
    nets: &AgentNetworks,
    batch: &SequenceBatch,
    next_actions: &[f64],
) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = batch.batch;
    let q1 = nets
        .critic1_target
        .q_values(batch.last_next_obs(), next_actions, n)?;
    let q2 = nets
        .critic2_target
        .q_values(batch.last_next_obs(), next_actions, n)?;
    Ok((q1, q2))
}

fn bellman(batch: &SequenceBatch, gamma: f64, boot: impl Fn(usize) -> f64) -> Vec<f64> {
    (0..batch.batch)
        .map(|b| batch.rewards[b] + gamma * (1.0 - batch.terms[b]) * boot(b))
        .collect()
}

/// Smoothed target action: `clamp(π'(s') + clip(σ̃·draw, −c, c), −1, 1)`.
pub fn smoothed_target_action(raw: f64, draw: f64, std: f64, clip: f64) -> f64 {
    (raw + (draw * std).clamp(-clip, clip)).clamp(-1.0, 1.0)
}

pub fn td_target_d_detail(
    batch: &SequenceBatch,
    nets: &AgentNetworks,
    hp: &HyperparamsD,
    gaussian_draws: &[f64],
) -> Result<TargetDetail> {
    check_draws(batch, gaussian_draws, "td_target_d")?;
    let actor_target = nets
        .actor_target
        .as_ref()
        .ok_or_else(|| Error::Graph("deterministic targets need an actor target".into()))?;
    let mut tape = Tape::new();
    let bound = actor_target.params.bind_frozen(&mut tape)?;
    let xs = window_var(&mut tape, batch, true)?;
    let ActorOutput::Action(a) =
        actor_target.forward_window(&mut tape, &bound, xs, batch.seq_len, batch.batch)?
    else {
        return Err(Error::Graph(
            "actor target must have a deterministic head".into(),
        ));
    };
    let next_actions: Vec<f64> = tape
        .value(a)
        .iter()
        .zip(gaussian_draws)
        .map(|(&raw, &d)| smoothed_target_action(raw, d, hp.target_noise_std, hp.noise_clip))
        .collect();
    let (q1, q2) = target_q(nets, batch, &next_actions)?;
    let targets = bellman(batch, hp.gamma, |b| q1[b].min(q2[b]));
    Ok(TargetDetail {
        targets,
        q1,
        q2,
        next_actions,
        log_probs: None,
    })
}

/// `r + γ(1 − d)·min_i Q'_i(s', a')` with a smoothed target-policy action.
pub fn td_target_d(
    batch: &SequenceBatch,
    nets: &AgentNetworks,
    hp: &HyperparamsD,
    gaussian_draws: &[f64],
) -> Result<Vec<f64>> {
    Ok(td_target_d_detail(batch, nets, hp, gaussian_draws)?.targets)
}

fn sample_policy(
    tape: &mut Tape,
    actor: &Actor,
    bound: &Bound,
    xs: Var,
    batch: &SequenceBatch,
    noise: &[f64],
) -> Result<(Var, Var)> {
    let ActorOutput::Gaussian { mean, log_std } =
        actor.forward_window(tape, bound, xs, batch.seq_len, batch.batch)?
    else {
        return Err(Error::Graph(
            "stochastic agent needs a Gaussian head".into(),
        ));
    };
    let eps = tape.constant(batch.batch, ACTION_DIM, noise.to_vec())?;
    squashed_sample_on_tape(tape, mean, log_std, eps)
}

pub fn td_target_s_detail(
    batch: &SequenceBatch,
    nets: &AgentNetworks,
    hp: &HyperparamsS,
    noise: &[f64],
) -> Result<TargetDetail> {
    check_draws(batch, noise, "td_target_s")?;
    let mut tape = Tape::new();
    let bound = nets.actor.params.bind_frozen(&mut tape)?;
    let xs = window_var(&mut tape, batch, true)?;
    let (a, lp) = sample_policy(&mut tape, &nets.actor, &bound, xs, batch, noise)?;
    let next_actions = tape.value(a).to_vec();
    let log_probs = tape.value(lp).to_vec();
    let (q1, q2) = target_q(nets, batch, &next_actions)?;
    let targets = bellman(batch, hp.gamma, |b| {
        q1[b].min(q2[b]) - hp.alpha * log_probs[b]
    });
    Ok(TargetDetail {
        targets,
        q1,
        q2,
        next_actions,
        log_probs: Some(log_probs),
    })
}

/// `r + γ(1 − d)·(min_i Q'_i(s', a') − α log π(a'|s'))` with `a' ~ π(·|s')`.
pub fn td_target_s(
    batch: &SequenceBatch,
    nets: &AgentNetworks,
    hp: &HyperparamsS,
    noise: &[f64],
) -> Result<Vec<f64>> {
    Ok(td_target_s_detail(batch, nets, hp, noise)?.targets)
}

fn collect_grads(params: &NetworkParams, tape: &Tape, bound: &Bound) -> Vec<Vec<f64>> {
    let mut scratch = params.clone();
    scratch.zero_grad();
    scratch.accumulate_grads(tape, bound);
    scratch
        .tensors()
        .iter()
        .map(|t| t.grad().to_vec())
        .collect()
}

fn apply_grads(params: &mut NetworkParams, grads: &[Vec<f64>], opt: &mut AdamState) -> Result<()> {
    for (t, g) in params.tensors_mut().iter_mut().zip(grads) {
        t.grad_mut().iter_mut().zip(g).for_each(|(a, b)| *a += b);
    }
    opt.update(params)
}

/// Mean squared error of one critic against fixed targets, and its gradient.
pub fn critic_loss(
    critic: &Critic,
    batch: &SequenceBatch,
    targets: &[f64],
) -> Result<(f64, Vec<Vec<f64>>)> {
    if targets.len() != batch.batch {
        return Err(Error::shape(
            "critic_update",
            format!("{} targets for a batch of {}", targets.len(), batch.batch),
        ));
    }
    let n = batch.batch;
    let mut tape = Tape::new();
    let bound = critic.params.bind(&mut tape)?;
    let obs = tape.constant(n, OBS_DIM, batch.last_obs().to_vec())?;
    let act = tape.constant(n, ACTION_DIM, batch.actions.clone())?;
    let q = critic.forward(&mut tape, &bound, obs, act)?;
    let y = tape.constant(n, 1, targets.to_vec())?;
    let diff = tape.sub(q, y)?;
    let sq = tape.square(diff)?;
    let loss = tape.mean(sq)?;
    tape.backward(loss)?;
    Ok((
        tape.value(loss)[0],
        collect_grads(&critic.params, &tape, &bound),
    ))
}

/// One Adam step on each critic; returns the sum of both pre-step losses.
pub fn critic_update(
    batch: &SequenceBatch,
    targets: &[f64],
    nets: &mut AgentNetworks,
    opts: &mut Optimizers,
) -> Result<f64> {
    let (l1, g1) = critic_loss(&nets.critic1, batch, targets)?;
    let (l2, g2) = critic_loss(&nets.critic2, batch, targets)?;
    apply_grads(&mut nets.critic1.params, &g1, &mut opts.critic1)?;
    apply_grads(&mut nets.critic2.params, &g2, &mut opts.critic2)?;
    Ok(l1 + l2)
}

/// `−mean Q₁(s, π(s))` and its gradient with respect to the actor.
pub fn actor_objective_d(
    actor: &Actor,
    critic1: &Critic,
    batch: &SequenceBatch,
) -> Result<(f64, Vec<Vec<f64>>)> {
    let n = batch.batch;
    let mut tape = Tape::new();
    let bound = actor.params.bind(&mut tape)?;
    let cb = critic1.params.bind_frozen(&mut tape)?;
    let xs = window_var(&mut tape, batch, false)?;
    let ActorOutput::Action(a) = actor.forward_window(&mut tape, &bound, xs, batch.seq_len, n)?
    else {
        return Err(Error::Graph(
            "deterministic update needs a deterministic head".into(),
        ));
    };
    let obs = tape.constant(n, OBS_DIM, batch.last_obs().to_vec())?;
    let q = critic1.forward(&mut tape, &cb, obs, a)?;
    let mean_q = tape.mean(q)?;
    let loss = tape.scale(mean_q, -1.0)?;
    tape.backward(loss)?;
    Ok((
        tape.value(loss)[0],
        collect_grads(&actor.params, &tape, &bound),
    ))
}

/// Deterministic policy-gradient step through the first critic.
pub fn actor_update_d(
    batch: &SequenceBatch,
    nets: &mut AgentNetworks,
    opt: &mut AdamState,
) -> Result<f64> {
    let (loss, grads) = actor_objective_d(&nets.actor, &nets.critic1, batch)?;
    apply_grads(&mut nets.actor.params, &grads, opt)?;
    Ok(loss)
}

/// `mean(α·log π(a_φ|s) − min_i Q_i(s, a_φ))` with reparameterised actions.
pub fn actor_objective_s(
    actor: &Actor,
    critic1: &Critic,
    critic2: &Critic,
    batch: &SequenceBatch,
    alpha: f64,
    noise: &[f64],
) -> Result<(f64, Vec<Vec<f64>>)> {
    check_draws(batch, noise, "actor_update_s")?;
    let n = batch.batch;
    let mut tape = Tape::new();
    let bound = actor.params.bind(&mut tape)?;
    let b1 = critic1.params.bind_frozen(&mut tape)?;
    let b2 = critic2.params.bind_frozen(&mut tape)?;
    let xs = window_var(&mut tape, batch, false)?;
    let (a, lp) = sample_policy(&mut tape, actor, &bound, xs, batch, noise)?;
    let obs = tape.constant(n, OBS_DIM, batch.last_obs().to_vec())?;
    let q1 = critic1.forward(&mut tape, &b1, obs, a)?;
    let q2 = critic2.forward(&mut tape, &b2, obs, a)?;
    let q = tape.min(q1, q2)?;
    let ent = tape.scale(lp, alpha)?;
    let per = tape.sub(ent, q)?;
    let loss = tape.mean(per)?;
    tape.backward(loss)?;
    Ok((
        tape.value(loss)[0],
        collect_grads(&actor.params, &tape, &bound),
    ))
}

pub fn actor_update_s(
    batch: &SequenceBatch,
    nets: &mut AgentNetworks,
    hp: &HyperparamsS,
    opt: &mut AdamState,
    noise: &[f64],
) -> Result<f64> {
    let (loss, grads) = actor_objective_s(
        &nets.actor,
        &nets.critic1,
        &nets.critic2,
        batch,
        hp.alpha,
        noise,
    )?;
    apply_grads(&mut nets.actor.params, &grads, opt)?;
    Ok(loss)
}

/// `target ← τ·source + (1 − τ)·target` over every tensor.
pub fn soft_update(source: &NetworkParams, target: &mut NetworkParams, tau: f64) -> Result<()> {
    target.soft_update_from(source, tau)
}
