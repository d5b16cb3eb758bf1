//! Versioned little-endian binary snapshot of a learning agent.
//!
//! Layout: the 8-byte magic `TNAVCKPT`, a `u32` format version, then the
//! agent kind, layer sizes, hyperparameters, counters, every network (actor,
//! optional actor target, two critics, two critic targets), the three Adam
//! states, the exploration-noise value and the training RNG state. Each
//! network is a tensor count followed by `(name, shape, values)` records;
//! floats are stored as raw IEEE-754 bits so a round trip is exact.

use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::agents::driver::{AgentKind, ContextMode, DocrlAgent, Hyper};
use crate::agents::hyper::{HyperparamsD, HyperparamsS};
use crate::agents::networks::NetworkSizes;
use crate::agents::update::{AgentNetworks, Optimizers};
use crate::error::{Error, Result};
use crate::nn::{AdamState, NetworkParams};

pub const MAGIC: &[u8; 8] = b"TNAVCKPT";
pub const VERSION: u32 = 1;

/// Everything needed to resume or evaluate a learning agent.
#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub hyper: Hyper,
    pub sizes: NetworkSizes,
    pub context_mode: ContextMode,
    pub total_steps: u64,
    pub episodes: u64,
    pub nets: AgentNetworks,
    pub opts: Optimizers,
    pub ou_state: Vec<f64>,
    pub rng: ChaCha8Rng,
}

impl Checkpoint {
    pub fn capture(agent: &DocrlAgent, episodes: u64, rng: &ChaCha8Rng) -> Self {
        Self {
            hyper: agent.hyper.clone(),
            sizes: agent.sizes,
            context_mode: agent.context_mode,
            total_steps: agent.total_steps,
            episodes,
            nets: agent.nets.clone(),
            opts: agent.opts.clone(),
            ou_state: agent.ou.x.clone(),
            rng: rng.clone(),
        }
    }

    pub fn kind(&self) -> AgentKind {
        self.hyper.kind()
    }

    /// Rebuilds an agent with an empty replay buffer.
    pub fn restore(&self) -> Result<DocrlAgent> {
        let mut scratch = ChaCha8Rng::seed_from_u64(0);
        let mut agent = DocrlAgent::new(
            self.hyper.clone(),
            self.sizes,
            self.context_mode,
            &mut scratch,
        )?;
        agent.nets = self.nets.clone();
        agent.opts = self.opts.clone();
        agent.ou.x = self.ou_state.clone();
        agent.total_steps = self.total_steps;
        Ok(agent)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer(Vec::new());
        w.0.extend_from_slice(MAGIC);
        w.u32(VERSION);
        w.u8(match self.kind() {
            AgentKind::DocrlD => 0,
            AgentKind::DocrlS => 1,
        });
        let s = self.sizes;
        for v in [s.lstm_hidden, s.actor_fc, s.critic_fc1, s.critic_fc2] {
            w.u64(v as u64);
        }
        w.u8(match self.context_mode {
            ContextMode::Window => 0,
            ContextMode::Stream => 1,
        });
        write_hyper(&mut w, &self.hyper);
        w.u64(self.total_steps);
        w.u64(self.episodes);

        let n = &self.nets;
        write_params(&mut w, &n.actor.params);
        match &n.actor_target {
            Some(t) => {
                w.u8(1);
                write_params(&mut w, &t.params);
            }
            None => w.u8(0),
        }
        for c in [&n.critic1, &n.critic2, &n.critic1_target, &n.critic2_target] {
            write_params(&mut w, &c.params);
        }
        for a in [&self.opts.actor, &self.opts.critic1, &self.opts.critic2] {
            write_adam(&mut w, a);
        }
        w.f64s(&self.ou_state);
        w.0.extend_from_slice(&self.rng.get_seed());
        w.u64(self.rng.get_stream());
        w.0.extend_from_slice(&self.rng.get_word_pos().to_le_bytes());
        w.0
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader { buf: bytes, pos: 0 };
        if r.take(8)? != MAGIC {
            return Err(Error::Checkpoint(
                "not a checkpoint file (bad magic)".into(),
            ));
        }
        let version = r.u32()?;
        if version != VERSION {
            return Err(Error::Checkpoint(format!(
                "unsupported checkpoint version {version}"
            )));
        }
        let kind = match r.u8()? {
            0 => AgentKind::DocrlD,
            1 => AgentKind::DocrlS,
            k => return Err(Error::Checkpoint(format!("unknown agent tag {k}"))),
        };
        let sizes = NetworkSizes {
            lstm_hidden: r.u64()? as usize,
            actor_fc: r.u64()? as usize,
            critic_fc1: r.u64()? as usize,
            critic_fc2: r.u64()? as usize,
        };
        let context_mode = match r.u8()? {
            0 => ContextMode::Window,
            1 => ContextMode::Stream,
            k => return Err(Error::Checkpoint(format!("unknown context tag {k}"))),
        };
        let hyper = read_hyper(&mut r, kind)?;
        let total_steps = r.u64()?;
        let episodes = r.u64()?;

        // Fresh networks supply the layer wiring; stored tensors overwrite values.
        let mut scratch = ChaCha8Rng::seed_from_u64(0);
        let mut nets = AgentNetworks::new(sizes, kind.head(), &mut scratch);
        read_params_into(&mut r, &mut nets.actor.params)?;
        let has_target = r.u8()? == 1;
        match (&mut nets.actor_target, has_target) {
            (Some(t), true) => read_params_into(&mut r, &mut t.params)?,
            (None, false) => {}
            _ => {
                return Err(Error::Checkpoint(
                    "actor target presence does not match agent kind".into(),
                ))
            }
        }
        read_params_into(&mut r, &mut nets.critic1.params)?;
        read_params_into(&mut r, &mut nets.critic2.params)?;
        read_params_into(&mut r, &mut nets.critic1_target.params)?;
        read_params_into(&mut r, &mut nets.critic2_target.params)?;
        let opts = Optimizers {
            actor: read_adam(&mut r, &nets.actor.params)?,
            critic1: read_adam(&mut r, &nets.critic1.params)?,
            critic2: read_adam(&mut r, &nets.critic2.params)?,
        };
        let ou_state = r.f64s()?;
        let mut seed = [0u8; 32];
        seed.copy_from_slice(r.take(32)?);
        let stream = r.u64()?;
        let word_pos = u128::from_le_bytes(r.take(16)?.try_into().expect("16 bytes"));
        let mut rng = ChaCha8Rng::from_seed(seed);
        rng.set_stream(stream);
        rng.set_word_pos(word_pos);
        if r.pos != bytes.len() {
            return Err(Error::Checkpoint(format!(
                "{} trailing bytes",
                bytes.len() - r.pos
            )));
        }
        Ok(Self {
            hyper,
            sizes,
            context_mode,
            total_steps,
            episodes,
            nets,
            opts,
            ou_state,
            rng,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_bytes()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::from_bytes(&bytes)
    }
}

struct Writer(Vec<u8>);

impl Writer {
    fn u8(&mut self, v: u8) {
        self.0.push(v);
    }
    fn u32(&mut self, v: u32) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn u64(&mut self, v: u64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn f64(&mut self, v: f64) {
        self.u64(v.to_bits());
    }
    fn f64s(&mut self, vs: &[f64]) {
        self.u64(vs.len() as u64);
        vs.iter().for_each(|&v| self.f64(v));
    }
    fn str(&mut self, s: &str) {
        self.u64(s.len() as u64);
        self.0.extend_from_slice(s.as_bytes());
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.buf.len() - self.pos < n {
            return Err(Error::Checkpoint("truncated checkpoint".into()));
        }
        let out = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }
    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }
    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(
            self.take(4)?.try_into().expect("4 bytes"),
        ))
    }
    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(
            self.take(8)?.try_into().expect("8 bytes"),
        ))
    }
    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_bits(self.u64()?))
    }
    fn len(&mut self) -> Result<usize> {
        let n = self.u64()? as usize;
        // Every stored element takes at least one byte.
        if n > self.buf.len() - self.pos {
            return Err(Error::Checkpoint("length field exceeds file size".into()));
        }
        Ok(n)
    }
    fn f64s(&mut self) -> Result<Vec<f64>> {
        let n = self.len()?;
        (0..n).map(|_| self.f64()).collect()
    }
    fn str(&mut self) -> Result<String> {
        let n = self.len()?;
        String::from_utf8(self.take(n)?.to_vec())
            .map_err(|_| Error::Checkpoint("tensor name is not UTF-8".into()))
    }
}

fn write_hyper(w: &mut Writer, hyper: &Hyper) {
    match hyper {
        Hyper::D(h) => {
            for v in [h.gamma, h.tau, h.target_noise_std, h.noise_clip, h.lr] {
                w.f64(v);
            }
            for v in [
                h.start_steps,
                h.batch_size as u64,
                h.max_steps,
                h.max_eps,
                h.seq_len as u64,
                h.buffer_capacity as u64,
            ] {
                w.u64(v);
            }
        }
        Hyper::S(h) => {
            for v in [h.gamma, h.tau, h.alpha, h.lr] {
                w.f64(v);
            }
            for v in [
                h.start_steps,
                h.batch_size as u64,
                h.max_steps,
                h.max_eps,
                h.seq_len as u64,
                h.buffer_capacity as u64,
            ] {
                w.u64(v);
            }
        }
    }
}

fn read_hyper(r: &mut Reader<'_>, kind: AgentKind) -> Result<Hyper> {
    Ok(match kind {
        AgentKind::DocrlD => {
            let (gamma, tau, target_noise_std, noise_clip, lr) =
                (r.f64()?, r.f64()?, r.f64()?, r.f64()?, r.f64()?);
            Hyper::D(HyperparamsD {
                gamma,
                tau,
                target_noise_std,
                noise_clip,
                lr,
                start_steps: r.u64()?,
                batch_size: r.u64()? as usize,
                max_steps: r.u64()?,
                max_eps: r.u64()?,
                seq_len: r.u64()? as usize,
                buffer_capacity: r.u64()? as usize,
            })
        }
        AgentKind::DocrlS => {
            let (gamma, tau, alpha, lr) = (r.f64()?, r.f64()?, r.f64()?, r.f64()?);
            Hyper::S(HyperparamsS {
                gamma,
                tau,
                alpha,
                lr,
                start_steps: r.u64()?,
                batch_size: r.u64()? as usize,
                max_steps: r.u64()?,
                max_eps: r.u64()?,
                seq_len: r.u64()? as usize,
                buffer_capacity: r.u64()? as usize,
            })
        }
    })
}

fn write_params(w: &mut Writer, params: &NetworkParams) {
    w.u64(params.len() as u64);
    for (name, t) in params.iter() {
        w.str(name);
        w.u64(t.shape().len() as u64);
        t.shape().iter().for_each(|&d| w.u64(d as u64));
        w.f64s(t.values());
    }
}

fn read_params_into(r: &mut Reader<'_>, params: &mut NetworkParams) -> Result<()> {
    let n = r.u64()? as usize;
    if n != params.len() {
        return Err(Error::Checkpoint(format!(
            "{n} tensors stored, network has {}",
            params.len()
        )));
    }
    let names: Vec<String> = params.iter().map(|(name, _)| name.to_string()).collect();
    for (k, expected) in names.iter().enumerate() {
        let name = r.str()?;
        if &name != expected {
            return Err(Error::Checkpoint(format!(
                "tensor '{name}' where '{expected}' was expected"
            )));
        }
        let ndim = r.len()?;
        let shape: Vec<usize> = (0..ndim)
            .map(|_| r.u64().map(|d| d as usize))
            .collect::<Result<_>>()?;
        let values = r.f64s()?;
        let t = &mut params.tensors_mut()[k];
        if shape != t.shape() || values.len() != t.len() {
            return Err(Error::Checkpoint(format!(
                "tensor '{name}' has shape {shape:?}, expected {:?}",
                t.shape()
            )));
        }
        t.values_mut().copy_from_slice(&values);
    }
    Ok(())
}

fn write_adam(w: &mut Writer, a: &AdamState) {
    for v in [a.lr, a.beta1, a.beta2, a.eps_stab] {
        w.f64(v);
    }
    w.u64(a.step_count);
    w.u64(a.m.len() as u64);
    for (m, v) in a.m.iter().zip(&a.v) {
        w.f64s(m);
        w.f64s(v);
    }
}

fn read_adam(r: &mut Reader<'_>, params: &NetworkParams) -> Result<AdamState> {
    let (lr, beta1, beta2, eps_stab) = (r.f64()?, r.f64()?, r.f64()?, r.f64()?);
    let step_count = r.u64()?;
    let n = r.u64()? as usize;
    if n != params.len() {
        return Err(Error::Checkpoint(
            "optimiser state does not match network".into(),
        ));
    }
    let mut m = Vec::with_capacity(n);
    let mut v = Vec::with_capacity(n);
    for t in params.tensors() {
        let mi = r.f64s()?;
        let vi = r.f64s()?;
        if mi.len() != t.len() || vi.len() != t.len() {
            return Err(Error::Checkpoint(
                "optimiser moment has the wrong length".into(),
            ));
        }
        m.push(mi);
        v.push(vi);
    }
    Ok(AdamState {
        m,
        v,
        step_count,
        lr,
        beta1,
        beta2,
        eps_stab,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agents::buffer::Transition;
    use crate::types::OBS_DIM;
    use rand::Rng;

    fn trained_agent(hyper: Hyper, rng: &mut ChaCha8Rng) -> DocrlAgent {
        let sizes = NetworkSizes {
            lstm_hidden: 5,
            actor_fc: 4,
            critic_fc1: 6,
            critic_fc2: 3,
        };
        let mut agent = DocrlAgent::new(hyper, sizes, ContextMode::Window, rng).unwrap();
        agent.begin_episode();
        for k in 0..12 {
            let obs = [k as f64 * 0.05; OBS_DIM];
            let a = agent.act(&obs, rng).unwrap();
            agent.observe(Transition {
                s: obs,
                a,
                r: rng.random_range(-1.0..1.0),
                s_next: obs,
                term: k % 5 == 4,
            });
            agent.learn(rng).unwrap();
        }
        agent
    }

    fn small_d() -> Hyper {
        Hyper::D(HyperparamsD {
            start_steps: 3,
            batch_size: 3,
            seq_len: 2,
            max_steps: 20,
            buffer_capacity: 50,
            ..Default::default()
        })
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let agent = trained_agent(small_d(), &mut rng);
        let _: f64 = rng.random();
        let ck = Checkpoint::capture(&agent, 3, &rng);
        let back = Checkpoint::from_bytes(&ck.to_bytes()).unwrap();
        assert_eq!(back, ck);
        assert_eq!(back.to_bytes(), ck.to_bytes());
        let mut a = back.rng.clone();
        let mut b = rng.clone();
        assert_eq!(a.random::<u64>(), b.random::<u64>());
    }

    #[test]
    fn stochastic_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let hyper = Hyper::S(HyperparamsS {
            start_steps: 3,
            batch_size: 3,
            seq_len: 2,
            max_steps: 20,
            buffer_capacity: 50,
            ..Default::default()
        });
        let agent = trained_agent(hyper, &mut rng);
        let ck = Checkpoint::capture(&agent, 1, &rng);
        assert_eq!(Checkpoint::from_bytes(&ck.to_bytes()).unwrap(), ck);
    }

    #[test]
    fn corrupt_input_is_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let agent = trained_agent(small_d(), &mut rng);
        let bytes = Checkpoint::capture(&agent, 0, &rng).to_bytes();
        assert!(Checkpoint::from_bytes(&bytes[..bytes.len() - 1]).is_err());
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(Checkpoint::from_bytes(&bad).is_err());
        let mut extra = bytes;
        extra.push(0);
        assert!(Checkpoint::from_bytes(&extra).is_err());
    }
}
