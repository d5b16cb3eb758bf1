//! Vector layouts shared by the simulator and the agents.

/// 20 ranges, the previous action and 3 goal features.
pub const OBS_DIM: usize = 26;
pub const ACTION_DIM: usize = 3;
pub const RANGE_BEAMS: usize = 20;

pub type Observation = [f64; OBS_DIM];

/// Forward speed, vertical speed and yaw increment in network scale `[-1, 1]`.
pub type Action = [f64; ACTION_DIM];
