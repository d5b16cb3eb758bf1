use rand::Rng;

use crate::error::{Error, Result};
use crate::nn::{
    Activation, Bound, DenseLayer, LstmCell, LstmState, NetworkParams, Tape, Tensor, Var,
};

pub use crate::types::{ACTION_DIM, OBS_DIM};

/// Layer widths shared by actor and critics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NetworkSizes {
    pub lstm_hidden: usize,
    pub actor_fc: usize,
    pub critic_fc1: usize,
    pub critic_fc2: usize,
}

impl Default for NetworkSizes {
    fn default() -> Self {
        Self {
            lstm_hidden: 32,
            actor_fc: 64,
            critic_fc1: 128,
            critic_fc2: 64,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ActorHead {
    /// `tanh` actions in `[-1, 1]`.
    Deterministic,
    /// Mean and log-std of a squashed Gaussian.
    Gaussian,
}

/// LSTM → dense(relu) → head.
#[derive(Debug, Clone, PartialEq)]
pub struct Actor {
    pub params: NetworkParams,
    pub lstm: LstmCell,
    pub fc: DenseLayer,
    pub head: DenseLayer,
    pub kind: ActorHead,
}

/// Output of an actor forward pass on a tape.
#[derive(Debug, Clone, Copy)]
pub enum ActorOutput {
    Action(Var),
    Gaussian { mean: Var, log_std: Var },
}

impl Actor {
    pub fn new<R: Rng + ?Sized>(sizes: NetworkSizes, kind: ActorHead, rng: &mut R) -> Self {
        let mut params = NetworkParams::new();
        let lstm = LstmCell::new(&mut params, "lstm", OBS_DIM, sizes.lstm_hidden, rng);
        let fc = DenseLayer::new(
            &mut params,
            "fc",
            sizes.lstm_hidden,
            sizes.actor_fc,
            Activation::Relu,
            rng,
        );
        let (outputs, act) = match kind {
            ActorHead::Deterministic => (ACTION_DIM, Activation::Tanh),
            ActorHead::Gaussian => (2 * ACTION_DIM, Activation::Identity),
        };
        let head = DenseLayer::new(&mut params, "head", sizes.actor_fc, outputs, act, rng);
        head.rescale(&mut params, 1e-2);
        Self {
            params,
            lstm,
            fc,
            head,
            kind,
        }
    }

    pub fn hidden_size(&self) -> usize {
        self.lstm.hidden_size
    }

    fn head_from_hidden(&self, tape: &mut Tape, bound: &Bound, h: Var) -> Result<ActorOutput> {
        let z = self.fc.forward(tape, bound, h)?;
        let out = self.head.forward(tape, bound, z)?;
        Ok(match self.kind {
            ActorHead::Deterministic => ActorOutput::Action(out),
            ActorHead::Gaussian => ActorOutput::Gaussian {
                mean: tape.slice_cols(out, 0, ACTION_DIM)?,
                log_std: tape.slice_cols(out, ACTION_DIM, ACTION_DIM)?,
            },
        })
    }

    /// Runs `steps` time-major blocks of `batch` observations from a zero
    /// state and applies the head to the final hidden state.
    pub fn forward_window(
        &self,
        tape: &mut Tape,
        bound: &Bound,
        xs: Var,
        steps: usize,
        batch: usize,
    ) -> Result<ActorOutput> {
        let state = self.lstm.run_sequence(tape, bound, xs, steps, batch)?;
        self.head_from_hidden(tape, bound, state.h)
    }

    /// One observation from a carried recurrent state. Returns the raw head
    /// values (actions or mean ++ log_std) and the new state.
    pub fn step(&self, obs: &[f64], state: &LstmState) -> Result<(Vec<f64>, LstmState)> {
        if obs.len() != OBS_DIM {
            return Err(Error::shape(
                "actor_step",
                format!("observation has {} values, expected {OBS_DIM}", obs.len()),
            ));
        }
        let hs = self.lstm.hidden_size;
        if state.hidden_size() != hs {
            return Err(Error::shape(
                "actor_step",
                format!("state hidden size {} vs {hs}", state.hidden_size()),
            ));
        }
        let mut tape = Tape::new();
        let bound = self.params.bind_frozen(&mut tape)?;
        let x = tape.constant(1, OBS_DIM, obs.to_vec())?;
        let vars = crate::nn::LstmVars {
            h: tape.constant(1, hs, state.h.values().to_vec())?,
            c: tape.constant(1, hs, state.c.values().to_vec())?,
        };
        let next = self.lstm.step(&mut tape, &bound, x, vars)?;
        let out = self.head_from_hidden(&mut tape, &bound, next.h)?;
        let raw = match out {
            ActorOutput::Action(a) => tape.value(a).to_vec(),
            ActorOutput::Gaussian { mean, log_std } => {
                let mut v = tape.value(mean).to_vec();
                v.extend_from_slice(tape.value(log_std));
                v
            }
        };
        let new_state = LstmState {
            h: Tensor::new(&[hs], tape.value(next.h).to_vec())?,
            c: Tensor::new(&[hs], tape.value(next.c).to_vec())?,
        };
        Ok((raw, new_state))
    }

    /// Head values after replaying a window of observations from a zero state.
    pub fn replay(&self, window: &[Vec<f64>]) -> Result<Vec<f64>> {
        if window.is_empty() {
            return Err(Error::shape("actor_replay", "empty window".to_string()));
        }
        let mut flat = Vec::with_capacity(window.len() * OBS_DIM);
        for obs in window {
            if obs.len() != OBS_DIM {
                return Err(Error::shape(
                    "actor_replay",
                    format!("observation has {} values, expected {OBS_DIM}", obs.len()),
                ));
            }
            flat.extend_from_slice(obs);
        }
        let mut tape = Tape::new();
        let bound = self.params.bind_frozen(&mut tape)?;
        let xs = tape.constant(window.len(), OBS_DIM, flat)?;
        Ok(
            match self.forward_window(&mut tape, &bound, xs, window.len(), 1)? {
                ActorOutput::Action(a) => tape.value(a).to_vec(),
                ActorOutput::Gaussian { mean, log_std } => {
                    let mut v = tape.value(mean).to_vec();
                    v.extend_from_slice(tape.value(log_std));
                    v
                }
            },
        )
    }
}

/// Feed-forward Q(s, a) on the concatenated observation and action.
#[derive(Debug, Clone, PartialEq)]
pub struct Critic {
    pub params: NetworkParams,
    pub fc1: DenseLayer,
    pub fc2: DenseLayer,
    pub out: DenseLayer,
}

impl Critic {
    pub fn new<R: Rng + ?Sized>(sizes: NetworkSizes, rng: &mut R) -> Self {
        let mut params = NetworkParams::new();
        let fc1 = DenseLayer::new(
            &mut params,
            "fc1",
            OBS_DIM + ACTION_DIM,
            sizes.critic_fc1,
            Activation::Relu,
            rng,
        );
        let fc2 = DenseLayer::new(
            &mut params,
            "fc2",
            sizes.critic_fc1,
            sizes.critic_fc2,
            Activation::Relu,
            rng,
        );
        let out = DenseLayer::new(
            &mut params,
            "out",
            sizes.critic_fc2,
            1,
            Activation::Identity,
            rng,
        );
        Self {
            params,
            fc1,
            fc2,
            out,
        }
    }

    /// `obs: B × 26`, `action: B × 3` → `B × 1`.
    pub fn forward(&self, tape: &mut Tape, bound: &Bound, obs: Var, action: Var) -> Result<Var> {
        let x = tape.concat_cols(obs, action)?;
        let z = self.fc1.forward(tape, bound, x)?;
        let z = self.fc2.forward(tape, bound, z)?;
        self.out.forward(tape, bound, z)
    }

    /// Convenience evaluation on plain rows.
    pub fn q_values(&self, obs: &[f64], actions: &[f64], batch: usize) -> Result<Vec<f64>> {
        let mut tape = Tape::new();
        let bound = self.params.bind_frozen(&mut tape)?;
        let o = tape.constant(batch, OBS_DIM, obs.to_vec())?;
        let a = tape.constant(batch, ACTION_DIM, actions.to_vec())?;
        let q = self.forward(&mut tape, &bound, o, a)?;
        Ok(tape.value(q).to_vec())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn small() -> NetworkSizes {
        NetworkSizes {
            lstm_hidden: 8,
            actor_fc: 6,
            critic_fc1: 7,
            critic_fc2: 5,
        }
    }

    #[test]
    fn replay_matches_stepwise_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let actor = Actor::new(small(), ActorHead::Deterministic, &mut rng);
        let window: Vec<Vec<f64>> = (0..4)
            .map(|_| (0..OBS_DIM).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect();
        let replayed = actor.replay(&window).unwrap();

        let mut state = LstmState::zeros(8);
        let mut raw = Vec::new();
        for obs in &window {
            let (r, s) = actor.step(obs, &state).unwrap();
            raw = r;
            state = s;
        }
        for (x, y) in replayed.iter().zip(&raw) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn fresh_actor_outputs_are_small() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let actor = Actor::new(NetworkSizes::default(), ActorHead::Deterministic, &mut rng);
        let (raw, _) = actor.step(&[0.5; OBS_DIM], &LstmState::zeros(32)).unwrap();
        assert!(raw.iter().all(|a| a.abs() < 0.1));
    }

    #[test]
    fn gaussian_head_has_six_outputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let actor = Actor::new(small(), ActorHead::Gaussian, &mut rng);
        let (raw, _) = actor.step(&[0.1; OBS_DIM], &LstmState::zeros(8)).unwrap();
        assert_eq!(raw.len(), 6);
        assert!(actor.step(&[0.1; 5], &LstmState::zeros(8)).is_err());
    }
}
