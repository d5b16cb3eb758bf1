use std::f64::consts::{FRAC_PI_2, PI};

use crate::sim::sensing::RangeScan;
use crate::sim::vehicle::{wrap_angle, VehicleState};
use crate::sim::world::WorldConfig;
use crate::types::{Action, Observation, ACTION_DIM, OBS_DIM, RANGE_BEAMS};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GoalSpec {
    pub gx: f64,
    pub gy: f64,
    pub gz: f64,
    pub arrive_radius: f64,
}

/// Distance and bearings from the vehicle to the goal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GoalFeatures {
    pub dist: f64,
    /// Horizontal bearing relative to the heading, in `(−π, π]`.
    pub angle_xy: f64,
    /// Elevation angle, in `[−π/2, π/2]`.
    pub angle_z: f64,
}

pub fn relative_goal_features(state: &VehicleState, goal: &GoalSpec) -> GoalFeatures {
    let (dx, dy, dz) = (goal.gx - state.x, goal.gy - state.y, goal.gz - state.z);
    let horizontal = dx.hypot(dy);
    let dist = (dx * dx + dy * dy + dz * dz).sqrt();
    let angle_xy = if horizontal == 0.0 {
        wrap_angle(-state.yaw)
    } else {
        wrap_angle(dy.atan2(dx) - state.yaw)
    };
    let angle_z = if horizontal == 0.0 {
        if dz >= 0.0 {
            FRAC_PI_2
        } else {
            -FRAC_PI_2
        }
    } else {
        dz.atan2(horizontal)
    };
    GoalFeatures {
        dist,
        angle_xy,
        angle_z,
    }
}

/// Slot offsets inside an observation.
pub const PREV_ACTION_SLOT: usize = RANGE_BEAMS;
pub const GOAL_SLOT: usize = RANGE_BEAMS + ACTION_DIM;

/// `[ranges / max_range] ++ previous action ++ [dist / diagonal, angle_xy / π, angle_z / (π/2)]`.
pub fn assemble_observation(
    scan: &RangeScan,
    prev_action: &Action,
    goal: &GoalFeatures,
    world: &WorldConfig,
) -> Observation {
    let mut obs = [0.0; OBS_DIM];
    for (o, r) in obs.iter_mut().zip(&scan.ranges) {
        *o = (r / scan.max_range).clamp(0.0, 1.0);
    }
    obs[PREV_ACTION_SLOT..GOAL_SLOT].copy_from_slice(prev_action);
    obs[GOAL_SLOT] = goal.dist / world.diagonal();
    obs[GOAL_SLOT + 1] = goal.angle_xy / PI;
    obs[GOAL_SLOT + 2] = goal.angle_z / FRAC_PI_2;
    obs
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StepEvent {
    None,
    Arrive,
    Collide,
    Timeout,
}

impl StepEvent {
    pub fn name(self) -> &'static str {
        match self {
            StepEvent::None => "none",
            StepEvent::Arrive => "arrive",
            StepEvent::Collide => "collide",
            StepEvent::Timeout => "timeout",
        }
    }
}

/// Binary reward with precedence arrive > collide > timeout.
pub fn compute_reward(
    dist: f64,
    min_range: f64,
    steps_elapsed: u64,
    world: &WorldConfig,
) -> (f64, bool, StepEvent) {
    if dist < world.arrive_radius {
        (world.r_arrive, true, StepEvent::Arrive)
    } else if min_range < world.collide_distance {
        (world.r_collide, true, StepEvent::Collide)
    } else if steps_elapsed == world.max_steps {
        (world.r_collide, true, StepEvent::Timeout)
    } else {
        (0.0, false, StepEvent::None)
    }
}

/// Nearest obstacle distance used by the collision rule: the scan minimum,
/// or zero when the vehicle is inside the vertical margin of the floor or
/// ceiling and still moving towards it.
pub fn effective_min_range(scan: &RangeScan, state: &VehicleState, world: &WorldConfig) -> f64 {
    let into_floor = state.z - world.z_floor < world.vertical_margin && state.v_z < 0.0;
    let into_ceiling = world.z_ceiling - state.z < world.vertical_margin && state.v_z > 0.0;
    if into_floor || into_ceiling {
        0.0
    } else {
        scan.min_range()
    }
}
