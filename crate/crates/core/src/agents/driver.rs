//! Per-step acting and learning for both double-critic agents.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::agents::buffer::{ReplayBuffer, Transition};
use crate::agents::hyper::{HyperparamsD, HyperparamsS};
use crate::agents::networks::{Actor, ActorHead, NetworkSizes};
use crate::agents::noise::OuProcess;
use crate::agents::schedule::is_policy_step;
use crate::agents::update::{
    actor_update_d, actor_update_s, critic_update, soft_update, td_target_d, td_target_s,
    AgentNetworks, Optimizers,
};
use crate::error::{Error, Result};
use crate::nn::LstmState;
use crate::types::{Action, Observation, ACTION_DIM};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AgentKind {
    /// Deterministic actor, smoothed targets, OU exploration.
    DocrlD,
    /// Squashed-Gaussian actor with a fixed entropy bonus.
    DocrlS,
}

impl AgentKind {
    pub fn name(self) -> &'static str {
        match self {
            AgentKind::DocrlD => "docrl-d",
            AgentKind::DocrlS => "docrl-s",
        }
    }

    pub fn head(self) -> ActorHead {
        match self {
            AgentKind::DocrlD => ActorHead::Deterministic,
            AgentKind::DocrlS => ActorHead::Gaussian,
        }
    }
}

impl fmt::Display for AgentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AgentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "docrl-d" => Ok(AgentKind::DocrlD),
            "docrl-s" => Ok(AgentKind::DocrlS),
            other => Err(Error::Config(format!("unknown learning agent '{other}'"))),
        }
    }
}

/// How the actor's recurrent input is assembled while acting.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContextMode {
    /// Replay the most recent `seq_len` observations of the current segment
    /// from a zero state, the same view the learner trains on.
    Window,
    /// Carry the hidden state across the whole segment.
    Stream,
}

impl FromStr for ContextMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "window" => Ok(ContextMode::Window),
            "stream" => Ok(ContextMode::Stream),
            other => Err(Error::Config(format!("unknown act_context '{other}'"))),
        }
    }
}

impl fmt::Display for ContextMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ContextMode::Window => "window",
            ContextMode::Stream => "stream",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UpdateStats {
    pub critic_loss: f64,
    /// Present on delayed-update steps.
    pub actor_loss: Option<f64>,
}

fn clamp_action(raw: &[f64]) -> Action {
    let mut a = [0.0; ACTION_DIM];
    for (dst, &v) in a.iter_mut().zip(raw) {
        *dst = v.clamp(-1.0, 1.0);
    }
    a
}

/// Deterministic action from a carried recurrent state, with optional OU
/// exploration added before clamping to `[-1, 1]`.
pub fn select_action_d<R: Rng + ?Sized>(
    actor: &Actor,
    state: &LstmState,
    obs: &[f64],
    ou: &mut OuProcess,
    exploring: bool,
    rng: &mut R,
) -> Result<(Action, LstmState)> {
    let (raw, next) = actor.step(obs, state)?;
    Ok((exploration_d(&raw, ou, exploring, rng), next))
}

fn exploration_d<R: Rng + ?Sized>(
    raw: &[f64],
    ou: &mut OuProcess,
    exploring: bool,
    rng: &mut R,
) -> Action {
    if !exploring {
        return clamp_action(raw);
    }
    let noise = ou.sample(rng);
    let noisy: Vec<f64> = raw.iter().zip(noise).map(|(a, n)| a + n).collect();
    clamp_action(&noisy)
}

/// Squashed-Gaussian action. With `noise` the reparameterised sample
/// `tanh(μ + σ·ξ)` is returned, otherwise `tanh(μ)`.
pub fn select_action_s(
    actor: &Actor,
    state: &LstmState,
    obs: &[f64],
    noise: Option<&[f64]>,
) -> Result<(Action, LstmState)> {
    let (raw, next) = actor.step(obs, state)?;
    Ok((squash_head(&raw, noise), next))
}

fn squash_head(raw: &[f64], noise: Option<&[f64]>) -> Action {
    let mut a = [0.0; ACTION_DIM];
    for (k, dst) in a.iter_mut().enumerate() {
        let mean = raw[k];
        let u = match noise {
            Some(xi) => {
                let log_std = raw[ACTION_DIM + k].clamp(
                    crate::nn::policy::LOG_STD_MIN,
                    crate::nn::policy::LOG_STD_MAX,
                );
                mean + log_std.exp() * xi[k]
            }
            None => mean,
        };
        *dst = u.tanh();
    }
    a
}

/// Hyperparameters of whichever agent is running.
#[derive(Debug, Clone, PartialEq)]
pub enum Hyper {
    D(HyperparamsD),
    S(HyperparamsS),
}

impl Hyper {
    pub fn kind(&self) -> AgentKind {
        match self {
            Hyper::D(_) => AgentKind::DocrlD,
            Hyper::S(_) => AgentKind::DocrlS,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Hyper::D(h) => h.validate(),
            Hyper::S(h) => h.validate(),
        }
    }

    pub fn start_steps(&self) -> u64 {
        match self {
            Hyper::D(h) => h.start_steps,
            Hyper::S(h) => h.start_steps,
        }
    }

    pub fn batch_size(&self) -> usize {
        match self {
            Hyper::D(h) => h.batch_size,
            Hyper::S(h) => h.batch_size,
        }
    }

    pub fn seq_len(&self) -> usize {
        match self {
            Hyper::D(h) => h.seq_len,
            Hyper::S(h) => h.seq_len,
        }
    }

    pub fn max_steps(&self) -> u64 {
        match self {
            Hyper::D(h) => h.max_steps,
            Hyper::S(h) => h.max_steps,
        }
    }

    pub fn tau(&self) -> f64 {
        match self {
            Hyper::D(h) => h.tau,
            Hyper::S(h) => h.tau,
        }
    }

    pub fn lr(&self) -> f64 {
        match self {
            Hyper::D(h) => h.lr,
            Hyper::S(h) => h.lr,
        }
    }

    pub fn buffer_capacity(&self) -> usize {
        match self {
            Hyper::D(h) => h.buffer_capacity,
            Hyper::S(h) => h.buffer_capacity,
        }
    }
}

/// Recent observations of the current segment and the streamed state.
#[derive(Debug, Clone, PartialEq)]
struct ActingContext {
    recent: VecDeque<Vec<f64>>,
    state: LstmState,
}

/// A learning agent together with its replay memory and counters.
#[derive(Debug, Clone)]
pub struct DocrlAgent {
    pub hyper: Hyper,
    pub sizes: NetworkSizes,
    pub context_mode: ContextMode,
    pub nets: AgentNetworks,
    pub opts: Optimizers,
    pub buffer: ReplayBuffer,
    pub ou: OuProcess,
    context: ActingContext,
    /// Environment steps taken since construction.
    pub total_steps: u64,
    /// Step index inside the current episode, 1-based after `observe`.
    pub episode_step: u64,
    pub critic_updates: u64,
    pub actor_updates: u64,
}

impl DocrlAgent {
    pub fn new<R: Rng + ?Sized>(
        hyper: Hyper,
        sizes: NetworkSizes,
        context_mode: ContextMode,
        rng: &mut R,
    ) -> Result<Self> {
        hyper.validate()?;
        let nets = AgentNetworks::new(sizes, hyper.kind().head(), rng);
        let opts = Optimizers::new(&nets, hyper.lr());
        let buffer = ReplayBuffer::new(hyper.buffer_capacity());
        Ok(Self {
            context: ActingContext {
                recent: VecDeque::new(),
                state: LstmState::zeros(sizes.lstm_hidden),
            },
            hyper,
            sizes,
            context_mode,
            nets,
            opts,
            buffer,
            ou: OuProcess::exploration(),
            total_steps: 0,
            episode_step: 0,
            critic_updates: 0,
            actor_updates: 0,
        })
    }

    pub fn kind(&self) -> AgentKind {
        self.hyper.kind()
    }

    pub fn begin_episode(&mut self) {
        self.ou.reset();
        self.reset_context();
        self.buffer.start_episode();
        self.episode_step = 0;
    }

    /// Forgets the recurrent context, e.g. after a goal respawn.
    pub fn reset_context(&mut self) {
        self.context.recent.clear();
        self.context.state = LstmState::zeros(self.sizes.lstm_hidden);
    }

    pub fn in_warmup(&self) -> bool {
        self.total_steps < self.hyper.start_steps()
    }

    /// Raw actor head values for `obs` given the acting context, which is
    /// advanced by this observation.
    fn head_output(&mut self, obs: &Observation) -> Result<Vec<f64>> {
        match self.context_mode {
            ContextMode::Window => {
                let ctx = &mut self.context.recent;
                ctx.push_back(obs.to_vec());
                while ctx.len() > self.hyper.seq_len() {
                    ctx.pop_front();
                }
                let window: Vec<Vec<f64>> = ctx.iter().cloned().collect();
                self.nets.actor.replay(&window)
            }
            ContextMode::Stream => {
                let (raw, next) = self.nets.actor.step(obs, &self.context.state)?;
                self.context.state = next;
                Ok(raw)
            }
        }
    }

    /// Training-time action: uniform during warmup, otherwise the exploring policy.
    pub fn act<R: Rng + ?Sized>(&mut self, obs: &Observation, rng: &mut R) -> Result<Action> {
        if self.in_warmup() {
            // Keep the context in step so the first policy action sees real history.
            if self.context_mode == ContextMode::Stream {
                self.head_output(obs)?;
            } else {
                self.context.recent.push_back(obs.to_vec());
                while self.context.recent.len() > self.hyper.seq_len() {
                    self.context.recent.pop_front();
                }
            }
            let mut a = [0.0; ACTION_DIM];
            a.iter_mut().for_each(|v| *v = rng.random_range(-1.0..=1.0));
            return Ok(a);
        }
        let raw = self.head_output(obs)?;
        Ok(match self.kind() {
            AgentKind::DocrlD => exploration_d(&raw, &mut self.ou, true, rng),
            AgentKind::DocrlS => {
                let xi: Vec<f64> = (0..ACTION_DIM)
                    .map(|_| rng.sample(StandardNormal))
                    .collect();
                squash_head(&raw, Some(&xi))
            }
        })
    }

    /// Evaluation action: no exploration noise, Gaussian policies act on their mean.
    pub fn act_greedy(&mut self, obs: &Observation) -> Result<Action> {
        let raw = self.head_output(obs)?;
        Ok(match self.kind() {
            AgentKind::DocrlD => clamp_action(&raw),
            AgentKind::DocrlS => squash_head(&raw, None),
        })
    }

    /// Stores a transition. A terminal transition ends the acting segment.
    pub fn observe(&mut self, transition: Transition) {
        let term = transition.term;
        self.buffer.push(transition);
        self.total_steps += 1;
        self.episode_step += 1;
        if term {
            self.reset_context();
        }
    }

    /// One learning step after the latest `observe`; `None` during warmup or
    /// while the buffer holds less than one batch.
    pub fn learn<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<Option<UpdateStats>> {
        // Learning starts with the first transition collected by the policy.
        if self.total_steps <= self.hyper.start_steps()
            || self.buffer.len() < self.hyper.batch_size()
        {
            return Ok(None);
        }
        let n = self.hyper.batch_size();
        let batch = self.buffer.sample(n, self.hyper.seq_len(), rng)?;
        let draws: Vec<f64> = (0..n * ACTION_DIM)
            .map(|_| rng.sample(StandardNormal))
            .collect();
        let targets = match &self.hyper {
            Hyper::D(h) => td_target_d(&batch, &self.nets, h, &draws)?,
            Hyper::S(h) => td_target_s(&batch, &self.nets, h, &draws)?,
        };
        let critic_loss = critic_update(&batch, &targets, &mut self.nets, &mut self.opts)?;
        self.critic_updates += 1;
        if !critic_loss.is_finite() {
            return Err(Error::NonFinite("critic loss"));
        }

        let mut actor_loss = None;
        if is_policy_step(self.episode_step, self.hyper.max_steps()) {
            let loss = match &self.hyper {
                Hyper::D(_) => actor_update_d(&batch, &mut self.nets, &mut self.opts.actor)?,
                Hyper::S(h) => {
                    let xi: Vec<f64> = (0..n * ACTION_DIM)
                        .map(|_| rng.sample(StandardNormal))
                        .collect();
                    actor_update_s(&batch, &mut self.nets, h, &mut self.opts.actor, &xi)?
                }
            };
            self.actor_updates += 1;
            self.soft_update_targets()?;
            actor_loss = Some(loss);
        }
        Ok(Some(UpdateStats {
            critic_loss,
            actor_loss,
        }))
    }

    fn soft_update_targets(&mut self) -> Result<()> {
        let tau = self.hyper.tau();
        let nets = &mut self.nets;
        if let Some(target) = nets.actor_target.as_mut() {
            soft_update(&nets.actor.params, &mut target.params, tau)?;
        }
        soft_update(&nets.critic1.params, &mut nets.critic1_target.params, tau)?;
        soft_update(&nets.critic2.params, &mut nets.critic2_target.params, tau)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::OBS_DIM;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn small() -> NetworkSizes {
        NetworkSizes {
            lstm_hidden: 6,
            actor_fc: 5,
            critic_fc1: 7,
            critic_fc2: 4,
        }
    }

    fn tiny_d() -> Hyper {
        Hyper::D(HyperparamsD {
            start_steps: 5,
            batch_size: 4,
            seq_len: 3,
            max_steps: 10,
            buffer_capacity: 100,
            ..Default::default()
        })
    }

    #[test]
    fn greedy_matches_select_action_without_noise() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut agent = DocrlAgent::new(tiny_d(), small(), ContextMode::Stream, &mut rng).unwrap();
        let obs = [0.3; OBS_DIM];
        let (expected, _) = select_action_d(
            &agent.nets.actor,
            &LstmState::zeros(6),
            &obs,
            &mut OuProcess::exploration(),
            false,
            &mut rng,
        )
        .unwrap();
        assert_eq!(agent.act_greedy(&obs).unwrap(), expected);
    }

    #[test]
    fn degenerate_noise_changes_nothing() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let actor = Actor::new(small(), ActorHead::Deterministic, &mut rng);
        let mut ou = OuProcess::new(3, 0.15, 0.0, 0.0, 1.0);
        let obs = [0.1; OBS_DIM];
        let s = LstmState::zeros(6);
        let (a, _) = select_action_d(&actor, &s, &obs, &mut ou, true, &mut rng).unwrap();
        let (b, _) = select_action_d(&actor, &s, &obs, &mut ou, false, &mut rng).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn noisy_action_is_clamped() {
        let mut ou = OuProcess::new(3, 1.0, 0.0, 0.3, 1.0);
        ou.x = vec![0.3; 3];
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let a = exploration_d(&[0.9, 0.0, -0.9], &mut ou, true, &mut rng);
        assert_eq!(a[0], 1.0);
        assert!((a[1] - 0.3).abs() < 1e-12);
    }

    #[test]
    fn warmup_then_learning() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut agent = DocrlAgent::new(tiny_d(), small(), ContextMode::Window, &mut rng).unwrap();
        agent.begin_episode();
        let mut learned = 0;
        for k in 0..10 {
            assert_eq!(agent.in_warmup(), k < 5);
            let obs = [k as f64 / 10.0; OBS_DIM];
            let a = agent.act(&obs, &mut rng).unwrap();
            agent.observe(Transition {
                s: obs,
                a,
                r: 0.0,
                s_next: obs,
                term: false,
            });
            if agent.learn(&mut rng).unwrap().is_some() {
                learned += 1;
            }
        }
        assert_eq!(learned, 5);
        assert_eq!(agent.critic_updates, 5);
        let expected = (6..=10u64).filter(|&t| is_policy_step(t, 10)).count() as u64;
        assert_eq!(agent.actor_updates, expected);
    }

    #[test]
    fn stochastic_agent_learns_without_actor_target() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let hyper = Hyper::S(HyperparamsS {
            start_steps: 2,
            batch_size: 2,
            seq_len: 2,
            max_steps: 10,
            buffer_capacity: 10,
            ..Default::default()
        });
        let mut agent = DocrlAgent::new(hyper, small(), ContextMode::Window, &mut rng).unwrap();
        assert!(agent.nets.actor_target.is_none());
        agent.begin_episode();
        for _ in 0..6 {
            let obs = [0.2; OBS_DIM];
            let a = agent.act(&obs, &mut rng).unwrap();
            assert!(a.iter().all(|v| v.abs() <= 1.0));
            agent.observe(Transition {
                s: obs,
                a,
                r: 1.0,
                s_next: obs,
                term: false,
            });
            agent.learn(&mut rng).unwrap();
        }
        assert!(agent.actor_updates > 0);
    }
}
