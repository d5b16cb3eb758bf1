//! Run configuration as flat `key = value` text.
//!
//! Blank lines and anything after `#` are ignored. Every key is optional and
//! falls back to its default; unknown or repeated keys are errors.

use std::fmt;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::agents::{AgentKind, ContextMode, Hyper, HyperparamsD, HyperparamsS, NetworkSizes};
use crate::bba::BbaConfig;
use crate::error::{Error, Result};
use crate::sim::{Riser, Scenario, WorldConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AgentChoice {
    DocrlD,
    DocrlS,
    Bba,
}

impl AgentChoice {
    pub fn name(self) -> &'static str {
        match self {
            AgentChoice::DocrlD => "docrl-d",
            AgentChoice::DocrlS => "docrl-s",
            AgentChoice::Bba => "bba",
        }
    }

    /// The learning agent behind this choice, if any.
    pub fn learner(self) -> Option<AgentKind> {
        match self {
            AgentChoice::DocrlD => Some(AgentKind::DocrlD),
            AgentChoice::DocrlS => Some(AgentKind::DocrlS),
            AgentChoice::Bba => None,
        }
    }
}

impl fmt::Display for AgentChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AgentChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "docrl-d" => Ok(AgentChoice::DocrlD),
            "docrl-s" => Ok(AgentChoice::DocrlS),
            "bba" => Ok(AgentChoice::Bba),
            _ => Err(Error::Config(format!(
                "unknown agent '{s}' (expected docrl-d, docrl-s or bba)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub agent: AgentChoice,
    pub scenario: Scenario,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub max_eps: u64,
    pub max_steps: u64,
    pub eval_trials: u64,

    pub gamma: f64,
    pub tau: f64,
    pub target_noise_std: f64,
    pub noise_clip: f64,
    pub alpha: f64,
    pub start_steps: u64,
    pub batch_size: usize,
    pub seq_len: usize,
    pub lr: f64,
    pub buffer_capacity: usize,
    pub sizes: NetworkSizes,
    pub act_context: ContextMode,

    /// World parameters; its `max_steps` mirrors the field above.
    pub world: WorldConfig,
    pub bba: BbaConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        let d = HyperparamsD::default();
        let s = HyperparamsS::default();
        Self {
            agent: AgentChoice::DocrlD,
            scenario: Scenario::TrainRandom,
            seed: 0,
            out_dir: PathBuf::from("runs/default"),
            max_eps: d.max_eps,
            max_steps: d.max_steps,
            eval_trials: 100,
            gamma: d.gamma,
            tau: d.tau,
            target_noise_std: d.target_noise_std,
            noise_clip: d.noise_clip,
            alpha: s.alpha,
            start_steps: d.start_steps,
            batch_size: d.batch_size,
            seq_len: d.seq_len,
            lr: d.lr,
            buffer_capacity: d.buffer_capacity,
            sizes: NetworkSizes::default(),
            act_context: ContextMode::Window,
            world: WorldConfig::default(),
            bba: BbaConfig::default(),
        }
    }
}

fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("'{key}': cannot parse '{value}'")))
}

fn parse_risers(value: &str) -> Result<Vec<Riser>> {
    if value.trim() == "none" {
        return Ok(Vec::new());
    }
    value
        .split(';')
        .map(|item| {
            let parts: Vec<&str> = item.split(',').map(str::trim).collect();
            if parts.len() != 3 {
                return Err(Error::Config(format!(
                    "riser '{item}' must be 'x, y, radius'"
                )));
            }
            Ok(Riser {
                x: parse_num("risers", parts[0])?,
                y: parse_num("risers", parts[1])?,
                radius: parse_num("risers", parts[2])?,
            })
        })
        .collect()
}

fn format_risers(risers: &[Riser]) -> String {
    if risers.is_empty() {
        return "none".into();
    }
    risers
        .iter()
        .map(|r| format!("{}, {}, {}", r.x, r.y, r.radius))
        .collect::<Vec<_>>()
        .join("; ")
}

impl RunConfig {
    /// Parses config text on top of the defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        let mut seen = std::collections::HashSet::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected 'key = value'", lineno + 1))
            })?;
            let (key, value) = (key.trim(), value.trim());
            if !seen.insert(key.to_string()) {
                return Err(Error::Config(format!(
                    "line {}: '{key}' given twice",
                    lineno + 1
                )));
            }
            cfg.set(key, value)
                .map_err(|e| Error::Config(format!("line {}: {}", lineno + 1, strip_prefix(e))))?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    /// Sets one key from its text value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let w = &mut self.world;
        let b = &mut self.bba;
        match key {
            "agent" => self.agent = value.parse()?,
            "scenario" => self.scenario = value.parse()?,
            "seed" => self.seed = parse_num(key, value)?,
            "out_dir" => self.out_dir = PathBuf::from(value),
            "max_eps" => self.max_eps = parse_num(key, value)?,
            "max_steps" => {
                self.max_steps = parse_num(key, value)?;
                w.max_steps = self.max_steps;
            }
            "eval_trials" => self.eval_trials = parse_num(key, value)?,
            "gamma" => self.gamma = parse_num(key, value)?,
            "tau" => self.tau = parse_num(key, value)?,
            "target_noise_std" => self.target_noise_std = parse_num(key, value)?,
            "noise_clip" => self.noise_clip = parse_num(key, value)?,
            "alpha" => self.alpha = parse_num(key, value)?,
            "start_steps" => self.start_steps = parse_num(key, value)?,
            "batch_size" => self.batch_size = parse_num(key, value)?,
            "seq_len" => self.seq_len = parse_num(key, value)?,
            "lr" => self.lr = parse_num(key, value)?,
            "buffer_capacity" => self.buffer_capacity = parse_num(key, value)?,
            "lstm_hidden" => self.sizes.lstm_hidden = parse_num(key, value)?,
            "actor_fc" => self.sizes.actor_fc = parse_num(key, value)?,
            "critic_fc1" => self.sizes.critic_fc1 = parse_num(key, value)?,
            "critic_fc2" => self.sizes.critic_fc2 = parse_num(key, value)?,
            "act_context" => self.act_context = value.parse()?,
            "tank_x" => w.tank_x = parse_num(key, value)?,
            "tank_y" => w.tank_y = parse_num(key, value)?,
            "z_floor" => w.z_floor = parse_num(key, value)?,
            "z_ceiling" => w.z_ceiling = parse_num(key, value)?,
            "water_surface_z" => w.water_surface_z = parse_num(key, value)?,
            "risers" => w.risers = parse_risers(value)?,
            "dt" => w.dt = parse_num(key, value)?,
            "air_range_max" => w.air_range_max = parse_num(key, value)?,
            "water_range_max" => w.water_range_max = parse_num(key, value)?,
            "sonar_bins" => w.sonar_bins = parse_num(key, value)?,
            "lag_air" => w.lag_air = parse_num(key, value)?,
            "lag_water" => w.lag_water = parse_num(key, value)?,
            "wind_theta" => w.wind_theta = parse_num(key, value)?,
            "wind_sigma" => w.wind_sigma = parse_num(key, value)?,
            "arrive_radius" => w.arrive_radius = parse_num(key, value)?,
            "collide_distance" => w.collide_distance = parse_num(key, value)?,
            "vertical_margin" => w.vertical_margin = parse_num(key, value)?,
            "r_arrive" => w.r_arrive = parse_num(key, value)?,
            "r_collide" => w.r_collide = parse_num(key, value)?,
            "spawn_clearance" => w.spawn_clearance = parse_num(key, value)?,
            "bba_avoid_threshold" => b.avoid_threshold = parse_num(key, value)?,
            "bba_frontal_half_angle" => b.frontal_half_angle = parse_num(key, value)?,
            "bba_cruise_speed" => b.cruise_speed = parse_num(key, value)?,
            "bba_yaw_gain" => b.yaw_gain = parse_num(key, value)?,
            "bba_vz_gain" => b.vz_gain = parse_num(key, value)?,
            "bba_slow_radius" => b.slow_radius = parse_num(key, value)?,
            _ => return Err(Error::Config(format!("unknown key '{key}'"))),
        }
        Ok(())
    }

    /// Canonical text form listing every key; `parse(dump())` reproduces the config.
    pub fn dump(&self) -> String {
        let w = &self.world;
        let b = &self.bba;
        let mut out = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        kv("agent", self.agent.to_string());
        kv("scenario", self.scenario.to_string());
        kv("seed", self.seed.to_string());
        kv("out_dir", self.out_dir.display().to_string());
        kv("max_eps", self.max_eps.to_string());
        kv("max_steps", self.max_steps.to_string());
        kv("eval_trials", self.eval_trials.to_string());
        kv("gamma", self.gamma.to_string());
        kv("tau", self.tau.to_string());
        kv("target_noise_std", self.target_noise_std.to_string());
        kv("noise_clip", self.noise_clip.to_string());
        kv("alpha", self.alpha.to_string());
        kv("start_steps", self.start_steps.to_string());
        kv("batch_size", self.batch_size.to_string());
        kv("seq_len", self.seq_len.to_string());
        kv("lr", self.lr.to_string());
        kv("buffer_capacity", self.buffer_capacity.to_string());
        kv("lstm_hidden", self.sizes.lstm_hidden.to_string());
        kv("actor_fc", self.sizes.actor_fc.to_string());
        kv("critic_fc1", self.sizes.critic_fc1.to_string());
        kv("critic_fc2", self.sizes.critic_fc2.to_string());
        kv("act_context", self.act_context.to_string());
        kv("tank_x", w.tank_x.to_string());
        kv("tank_y", w.tank_y.to_string());
        kv("z_floor", w.z_floor.to_string());
        kv("z_ceiling", w.z_ceiling.to_string());
        kv("water_surface_z", w.water_surface_z.to_string());
        kv("risers", format_risers(&w.risers));
        kv("dt", w.dt.to_string());
        kv("air_range_max", w.air_range_max.to_string());
        kv("water_range_max", w.water_range_max.to_string());
        kv("sonar_bins", w.sonar_bins.to_string());
        kv("lag_air", w.lag_air.to_string());
        kv("lag_water", w.lag_water.to_string());
        kv("wind_theta", w.wind_theta.to_string());
        kv("wind_sigma", w.wind_sigma.to_string());
        kv("arrive_radius", w.arrive_radius.to_string());
        kv("collide_distance", w.collide_distance.to_string());
        kv("vertical_margin", w.vertical_margin.to_string());
        kv("r_arrive", w.r_arrive.to_string());
        kv("r_collide", w.r_collide.to_string());
        kv("spawn_clearance", w.spawn_clearance.to_string());
        kv("bba_avoid_threshold", b.avoid_threshold.to_string());
        kv("bba_frontal_half_angle", b.frontal_half_angle.to_string());
        kv("bba_cruise_speed", b.cruise_speed.to_string());
        kv("bba_yaw_gain", b.yaw_gain.to_string());
        kv("bba_vz_gain", b.vz_gain.to_string());
        kv("bba_slow_radius", b.slow_radius.to_string());
        out
    }

    pub fn hyper(&self) -> Result<Hyper> {
        let hyper = match self.agent {
            AgentChoice::DocrlS => Hyper::S(HyperparamsS {
                gamma: self.gamma,
                tau: self.tau,
                alpha: self.alpha,
                start_steps: self.start_steps,
                batch_size: self.batch_size,
                max_steps: self.max_steps,
                max_eps: self.max_eps,
                seq_len: self.seq_len,
                lr: self.lr,
                buffer_capacity: self.buffer_capacity,
            }),
            _ => Hyper::D(HyperparamsD {
                gamma: self.gamma,
                tau: self.tau,
                target_noise_std: self.target_noise_std,
                noise_clip: self.noise_clip,
                start_steps: self.start_steps,
                batch_size: self.batch_size,
                max_steps: self.max_steps,
                max_eps: self.max_eps,
                seq_len: self.seq_len,
                lr: self.lr,
                buffer_capacity: self.buffer_capacity,
            }),
        };
        hyper.validate()?;
        Ok(hyper)
    }

    pub fn validate(&self) -> Result<()> {
        self.world.validate()?;
        self.bba.validate(self.world.collide_distance)?;
        if self.world.max_steps != self.max_steps {
            return Err(Error::Config("world and episode max_steps disagree".into()));
        }
        if self.eval_trials == 0 {
            return Err(Error::Config("eval_trials must be positive".into()));
        }
        let s = self.sizes;
        if [s.lstm_hidden, s.actor_fc, s.critic_fc1, s.critic_fc2].contains(&0) {
            return Err(Error::Config("layer sizes must be positive".into()));
        }
        // Both agents' settings must hold, whichever is selected.
        let mut probe = self.clone();
        probe.agent = AgentChoice::DocrlD;
        probe.hyper()?;
        probe.agent = AgentChoice::DocrlS;
        probe.hyper()?;
        Ok(())
    }
}

fn strip_prefix(e: Error) -> String {
    match e {
        Error::Config(m) => m,
        other => other.to_string(),
    }
}
