use rand::Rng;

use crate::agents::noise::OuProcess;
use crate::error::{Error, Result};
use crate::sim::observe::{
    assemble_observation, compute_reward, effective_min_range, relative_goal_features, GoalSpec,
    StepEvent,
};
use crate::sim::scenario::{random_goal, reset_episode, Scenario};
use crate::sim::sensing::{cast_range_scan, RangeScan};
use crate::sim::vehicle::{scale_action, step_vehicle, VehicleState};
use crate::sim::world::WorldConfig;
use crate::types::{Action, Observation, ACTION_DIM};

#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub obs: Observation,
    pub reward: f64,
    /// Terminal for bootstrapping purposes.
    pub term: bool,
    pub event: StepEvent,
    /// The episode is over (a respawned goal keeps it running).
    pub done: bool,
    pub min_range: f64,
    /// Distance to the goal that was active during this step.
    pub dist: f64,
}

/// One tank, one vehicle and one goal.
#[derive(Debug, Clone)]
pub struct TankEnv {
    pub world: WorldConfig,
    pub scenario: Scenario,
    /// Whether arrival spawns a new goal instead of ending the episode.
    pub respawn_on_arrival: bool,
    state: VehicleState,
    goal: GoalSpec,
    prev_action: Action,
    wind: OuProcess,
}

impl TankEnv {
    pub fn new(world: WorldConfig, scenario: Scenario, respawn_on_arrival: bool) -> Result<Self> {
        world.validate()?;
        let wind = OuProcess::new(2, world.wind_theta, world.wind_sigma, 0.0, world.dt);
        let state = VehicleState::at_rest(0.0, 0.0, 0.0, 0.0, &world);
        Ok(Self {
            goal: GoalSpec {
                gx: 0.0,
                gy: 0.0,
                gz: 0.0,
                arrive_radius: world.arrive_radius,
            },
            world,
            scenario,
            respawn_on_arrival,
            state,
            prev_action: [0.0; ACTION_DIM],
            wind,
        })
    }

    pub fn reset<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<Observation> {
        let (state, goal) = reset_episode(self.scenario, &self.world, rng)?;
        self.state = state;
        self.goal = goal;
        self.prev_action = [0.0; ACTION_DIM];
        self.wind.reset();
        Ok(self.observation())
    }

    pub fn state(&self) -> &VehicleState {
        &self.state
    }

    pub fn goal(&self) -> &GoalSpec {
        &self.goal
    }

    pub fn scan(&self) -> RangeScan {
        cast_range_scan(&self.state, &self.world)
    }

    pub fn observation(&self) -> Observation {
        let feats = relative_goal_features(&self.state, &self.goal);
        assemble_observation(&self.scan(), &self.prev_action, &feats, &self.world)
    }

    /// Applies a network-scale action for one control period.
    pub fn step<R: Rng + ?Sized>(&mut self, action: &Action, rng: &mut R) -> Result<StepOutcome> {
        if action.iter().any(|a| !a.is_finite()) {
            return Err(Error::NonFinite("action"));
        }
        let clamped = action.map(|a| a.clamp(-1.0, 1.0));
        let wind = self.wind.sample(rng);
        let wind = [wind[0], wind[1]];
        self.state = step_vehicle(&self.state, scale_action(&clamped), wind, &self.world);
        self.prev_action = clamped;

        let scan = self.scan();
        let min_range = effective_min_range(&scan, &self.state, &self.world);
        let dist = relative_goal_features(&self.state, &self.goal).dist;
        let (reward, term, event) =
            compute_reward(dist, min_range, self.state.steps_elapsed, &self.world);
        let timed_out = self.state.steps_elapsed >= self.world.max_steps;
        let done = match event {
            StepEvent::Arrive if self.respawn_on_arrival => {
                let s = &self.state;
                self.goal = random_goal(&self.world, (s.x, s.y, s.z), rng)?;
                timed_out
            }
            StepEvent::None => timed_out,
            _ => true,
        };
        Ok(StepOutcome {
            obs: self.observation(),
            reward,
            term,
            event,
            done,
            min_range,
            dist,
        })
    }
}
