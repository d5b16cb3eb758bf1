//! Walled tank with an air-water interface, riser obstacles and range sensing.

pub mod env;
pub mod observe;
pub mod scenario;
pub mod sensing;
pub mod vehicle;
pub mod world;

pub use env::{StepOutcome, TankEnv};
pub use observe::{
    assemble_observation, compute_reward, effective_min_range, relative_goal_features,
    GoalFeatures, GoalSpec, StepEvent,
};
pub use scenario::{reset_episode, Scenario};
pub use sensing::{
    beam_offsets, cast_range_scan, cast_range_scan_exact, cast_ray, quantize_sonar, RangeScan,
};
pub use vehicle::{scale_action, step_vehicle, wrap_angle, Command, Medium, VehicleState};
pub use world::{Riser, WorldConfig};
