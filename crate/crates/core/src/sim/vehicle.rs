use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::world::WorldConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Medium {
    Air,
    Water,
}

impl Medium {
    pub fn at(z: f64, world: &WorldConfig) -> Self {
        if z < world.water_surface_z {
            Medium::Water
        } else {
            Medium::Air
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Medium::Air => "air",
            Medium::Water => "water",
        }
    }
}

impl fmt::Display for Medium {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Medium {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "air" => Ok(Medium::Air),
            "water" => Ok(Medium::Water),
            other => Err(Error::Config(format!("unknown medium '{other}'"))),
        }
    }
}

/// Wraps an angle into `(−π, π]`.
pub fn wrap_angle(a: f64) -> f64 {
    let mut w = a % (2.0 * PI);
    if w <= -PI {
        w += 2.0 * PI;
    } else if w > PI {
        w -= 2.0 * PI;
    }
    w
}

#[derive(Debug, Clone, PartialEq)]
pub struct VehicleState {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub yaw: f64,
    pub v_forward: f64,
    pub v_z: f64,
    pub medium: Medium,
    pub steps_elapsed: u64,
    /// Steps that began in each medium; times are these counts times `dt`.
    pub steps_in_air: u64,
    pub steps_in_water: u64,
}

impl VehicleState {
    /// At rest at the given pose.
    pub fn at_rest(x: f64, y: f64, z: f64, yaw: f64, world: &WorldConfig) -> Self {
        Self {
            x,
            y,
            z,
            yaw: wrap_angle(yaw),
            v_forward: 0.0,
            v_z: 0.0,
            medium: Medium::at(z, world),
            steps_elapsed: 0,
            steps_in_air: 0,
            steps_in_water: 0,
        }
    }

    pub fn time_in_air(&self, world: &WorldConfig) -> f64 {
        self.steps_in_air as f64 * world.dt
    }

    pub fn time_in_water(&self, world: &WorldConfig) -> f64 {
        self.steps_in_water as f64 * world.dt
    }
}

/// Physical command: forward speed, vertical speed (m/s) and yaw increment (rad).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Command {
    pub v: f64,
    pub vz: f64,
    pub dyaw: f64,
}

/// Maps a network-scale action in `[−1, 1]³` to a physical command.
pub fn scale_action(action: &[f64; 3]) -> Command {
    let n: Vec<f64> = action.iter().map(|a| a.clamp(-1.0, 1.0)).collect();
    Command {
        v: 0.125 * (n[0] + 1.0),
        vz: 0.25 * n[1],
        dyaw: 0.25 * n[2],
    }
}

fn relax(current: f64, target: f64, dt: f64, lag: f64) -> f64 {
    if lag <= 0.0 {
        return target;
    }
    current + (target - current) * (1.0 - (-dt / lag).exp())
}

/// Advances one control period. `wind` is the horizontal wind velocity,
/// applied only while the step starts in air.
pub fn step_vehicle(
    state: &VehicleState,
    cmd: Command,
    wind: [f64; 2],
    world: &WorldConfig,
) -> VehicleState {
    let dt = world.dt;
    let start_medium = state.medium;
    let lag = match start_medium {
        Medium::Air => world.lag_air,
        Medium::Water => world.lag_water,
    };
    let yaw = wrap_angle(state.yaw + cmd.dyaw);
    let v_forward = relax(state.v_forward, cmd.v, dt, lag);
    let v_z = relax(state.v_z, cmd.vz, dt, lag);
    let (wx, wy) = match start_medium {
        Medium::Air => (wind[0], wind[1]),
        Medium::Water => (0.0, 0.0),
    };
    let x = (state.x + (v_forward * yaw.cos() + wx) * dt).clamp(-world.half_x(), world.half_x());
    let y = (state.y + (v_forward * yaw.sin() + wy) * dt).clamp(-world.half_y(), world.half_y());
    let z = (state.z + v_z * dt).clamp(world.z_floor, world.z_ceiling);
    let (air, water) = match start_medium {
        Medium::Air => (state.steps_in_air + 1, state.steps_in_water),
        Medium::Water => (state.steps_in_air, state.steps_in_water + 1),
    };
    VehicleState {
        x,
        y,
        z,
        yaw,
        v_forward,
        v_z,
        medium: Medium::at(z, world),
        steps_elapsed: state.steps_elapsed + 1,
        steps_in_air: air,
        steps_in_water: water,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn action_scaling_endpoints() {
        assert_eq!(
            scale_action(&[1.0, 0.0, -1.0]),
            Command {
                v: 0.25,
                vz: 0.0,
                dyaw: -0.25
            }
        );
        assert_eq!(
            scale_action(&[-1.0, -1.0, 1.0]),
            Command {
                v: 0.0,
                vz: -0.25,
                dyaw: 0.25
            }
        );
        assert_eq!(
            scale_action(&[0.0, 0.0, 0.0]),
            Command {
                v: 0.125,
                vz: 0.0,
                dyaw: 0.0
            }
        );
        assert_eq!(scale_action(&[1.2, 0.0, 0.0]).v, 0.25);
    }

    #[test]
    fn rest_is_a_fixed_point() {
        let w = WorldConfig::default();
        let s = VehicleState::at_rest(1.0, -2.0, 2.0, 0.3, &w);
        let cmd = Command {
            v: 0.0,
            vz: 0.0,
            dyaw: 0.0,
        };
        let n = step_vehicle(&s, cmd, [0.0, 0.0], &w);
        assert_eq!((n.x, n.y, n.z, n.yaw), (s.x, s.y, s.z, s.yaw));
    }

    #[test]
    fn pure_integration_without_lag() {
        let w = WorldConfig {
            lag_air: 0.0,
            ..WorldConfig::default()
        };
        let s = VehicleState::at_rest(0.0, 0.0, 2.0, 0.0, &w);
        let n = step_vehicle(
            &s,
            Command {
                v: 0.25,
                vz: 0.0,
                dyaw: 0.0,
            },
            [0.0, 0.0],
            &w,
        );
        assert!((n.x - 0.05).abs() < 1e-15);
    }

    #[test]
    fn medium_flips_on_crossing() {
        let w = WorldConfig {
            lag_air: 0.0,
            ..WorldConfig::default()
        };
        let s = VehicleState::at_rest(0.0, 0.0, 0.03, 0.0, &w);
        let down = Command {
            v: 0.0,
            vz: -0.25,
            dyaw: 0.0,
        };
        let n = step_vehicle(&s, down, [0.0, 0.0], &w);
        assert!(n.z < 0.0);
        assert_eq!(n.medium, Medium::Water);
        // The step started in air and is booked there.
        assert_eq!((n.steps_in_air, n.steps_in_water), (1, 0));
    }

    #[test]
    fn wrap_range() {
        assert_eq!(wrap_angle(PI), PI);
        assert!((wrap_angle(-PI) - PI).abs() < 1e-15);
        assert!((wrap_angle(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-12);
    }
}
