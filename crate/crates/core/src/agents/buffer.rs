//! Ring replay buffer that hands out fixed-length in-segment windows.
//!
//! A segment is a run of consecutive transitions inside one episode that
//! does not cross a terminal transition. Windows ending at a sampled
//! transition reach back at most `seq_len − 1` steps inside its segment and
//! are front-padded with zero observations.

use rand::Rng;

use crate::error::{Error, Result};
use crate::types::{Action, Observation, ACTION_DIM, OBS_DIM};

#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub s: Observation,
    pub a: Action,
    pub r: f64,
    pub s_next: Observation,
    pub term: bool,
}

#[derive(Debug, Clone)]
struct Slot {
    transition: Transition,
    /// Steps since the start of this transition's segment.
    pos_in_segment: usize,
}

#[derive(Debug, Clone)]
pub struct ReplayBuffer {
    capacity: usize,
    slots: Vec<Slot>,
    /// Index of the oldest slot once the ring is full.
    head: usize,
    next_pos: usize,
}

/// A minibatch of windows, time-major: row `t·batch + b` is step `t` of sample `b`.
#[derive(Debug, Clone, PartialEq)]
pub struct SequenceBatch {
    pub batch: usize,
    pub seq_len: usize,
    pub obs: Vec<f64>,
    /// The observation window shifted by one, ending at `s_next`.
    pub next_obs: Vec<f64>,
    pub actions: Vec<f64>,
    pub rewards: Vec<f64>,
    pub terms: Vec<f64>,
    /// Buffer indices (oldest = 0) of the sampled transitions.
    pub indices: Vec<usize>,
}

impl SequenceBatch {
    /// `B × 26` observations at the final step of each window.
    pub fn last_obs(&self) -> &[f64] {
        let start = (self.seq_len - 1) * self.batch * OBS_DIM;
        &self.obs[start..]
    }

    pub fn last_next_obs(&self) -> &[f64] {
        let start = (self.seq_len - 1) * self.batch * OBS_DIM;
        &self.next_obs[start..]
    }

    /// Window of sample `b` as individual observations.
    pub fn window(&self, b: usize, next: bool) -> Vec<Vec<f64>> {
        let src = if next { &self.next_obs } else { &self.obs };
        (0..self.seq_len)
            .map(|t| {
                let row = t * self.batch + b;
                src[row * OBS_DIM..(row + 1) * OBS_DIM].to_vec()
            })
            .collect()
    }
}

impl ReplayBuffer {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0, "replay capacity must be positive");
        Self {
            capacity,
            slots: Vec::with_capacity(capacity.min(1 << 16)),
            head: 0,
            next_pos: 0,
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    /// The next pushed transition opens a new segment.
    pub fn start_episode(&mut self) {
        self.next_pos = 0;
    }

    pub fn push(&mut self, transition: Transition) {
        let term = transition.term;
        let slot = Slot {
            transition,
            pos_in_segment: self.next_pos,
        };
        if self.slots.len() < self.capacity {
            self.slots.push(slot);
        } else {
            self.slots[self.head] = slot;
            self.head = (self.head + 1) % self.capacity;
        }
        self.next_pos = if term { 0 } else { self.next_pos + 1 };
    }

    /// Transition by age rank, 0 being the oldest still stored.
    pub fn get(&self, rank: usize) -> Option<&Transition> {
        if rank >= self.slots.len() {
            return None;
        }
        Some(&self.slots[(self.head + rank) % self.slots.len()].transition)
    }

    fn slot(&self, rank: usize) -> &Slot {
        &self.slots[(self.head + rank) % self.slots.len()]
    }

    /// Draws `n` windows with end points uniform over the stored transitions.
    pub fn sample<R: Rng + ?Sized>(
        &self,
        n: usize,
        seq_len: usize,
        rng: &mut R,
    ) -> Result<SequenceBatch> {
        if self.slots.len() < n || n == 0 {
            return Err(Error::Underfilled {
                have: self.slots.len(),
                need: n.max(1),
            });
        }
        let indices: Vec<usize> = (0..n)
            .map(|_| rng.random_range(0..self.slots.len()))
            .collect();
        Ok(self.gather(&indices, seq_len))
    }

    /// Builds windows ending at the given age ranks.
    pub fn gather(&self, indices: &[usize], seq_len: usize) -> SequenceBatch {
        assert!(seq_len > 0);
        let n = indices.len();
        let mut obs = vec![0.0; seq_len * n * OBS_DIM];
        let mut next_obs = vec![0.0; seq_len * n * OBS_DIM];
        let mut actions = Vec::with_capacity(n * ACTION_DIM);
        let mut rewards = Vec::with_capacity(n);
        let mut terms = Vec::with_capacity(n);
        for (b, &end) in indices.iter().enumerate() {
            let last = self.slot(end);
            // Older entries of the segment may already be evicted.
            let reach = last.pos_in_segment.min(end).min(seq_len - 1);
            for back in 0..=reach {
                let t = seq_len - 1 - back;
                let tr = &self.slot(end - back).transition;
                let row = t * n + b;
                obs[row * OBS_DIM..(row + 1) * OBS_DIM].copy_from_slice(&tr.s);
                if t > 0 {
                    let prev = (t - 1) * n + b;
                    next_obs[prev * OBS_DIM..(prev + 1) * OBS_DIM].copy_from_slice(&tr.s);
                }
            }
            let row = (seq_len - 1) * n + b;
            next_obs[row * OBS_DIM..(row + 1) * OBS_DIM].copy_from_slice(&last.transition.s_next);
            actions.extend_from_slice(&last.transition.a);
            rewards.push(last.transition.r);
            terms.push(if last.transition.term { 1.0 } else { 0.0 });
        }
        SequenceBatch {
            batch: n,
            seq_len,
            obs,
            next_obs,
            actions,
            rewards,
            terms,
            indices: indices.to_vec(),
        }
    }
}
