//! Reactive go-to-goal / avoid controller used as the non-learning baseline.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::sim::observe::GOAL_SLOT;
use crate::sim::sensing::beam_offsets;
use crate::sim::vehicle::Medium;
use crate::types::{Action, Observation, RANGE_BEAMS};

/// Physical limits of the action scaling.
const V_MAX: f64 = 0.25;
const VZ_MAX: f64 = 0.25;
const DYAW_MAX: f64 = 0.25;

#[derive(Debug, Clone, PartialEq)]
pub struct BbaConfig {
    /// Frontal clearance below which the avoid behaviour takes over (m).
    pub avoid_threshold: f64,
    /// Half-width of the frontal sector (rad).
    pub frontal_half_angle: f64,
    pub cruise_speed: f64,
    /// Yaw increment per radian of heading error.
    pub yaw_gain: f64,
    /// Vertical speed per radian of goal elevation (m/s).
    pub vz_gain: f64,
    /// Goal distance inside which forward speed ramps down (m).
    pub slow_radius: f64,
    pub air_range_max: f64,
    pub water_range_max: f64,
    /// Normaliser of the distance slot.
    pub tank_diagonal: f64,
}

impl Default for BbaConfig {
    fn default() -> Self {
        Self {
            avoid_threshold: 1.0,
            frontal_half_angle: 30f64.to_radians(),
            cruise_speed: 0.25,
            yaw_gain: 1.0,
            vz_gain: 0.25,
            slow_radius: 1.0,
            air_range_max: 10.0,
            water_range_max: 20.0,
            tank_diagonal: 236f64.sqrt(),
        }
    }
}

impl BbaConfig {
    pub fn validate(&self, collide_distance: f64) -> Result<()> {
        if !(self.avoid_threshold > collide_distance) {
            return Err(Error::Config(
                "bba avoid_threshold must exceed the collision distance".into(),
            ));
        }
        let positive = [
            self.frontal_half_angle,
            self.yaw_gain,
            self.vz_gain,
            self.slow_radius,
            self.air_range_max,
            self.water_range_max,
            self.tank_diagonal,
        ];
        if positive.iter().any(|v| !(*v > 0.0)) || !(0.0..=V_MAX).contains(&self.cruise_speed) {
            return Err(Error::Config(
                "bba gains, ranges and speeds must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// One control decision from an observation and the medium whose sensor
/// produced its range slots.
pub fn bba_step(obs: &Observation, medium: Medium, cfg: &BbaConfig) -> Action {
    let max_range = match medium {
        Medium::Air => cfg.air_range_max,
        Medium::Water => cfg.water_range_max,
    };
    let offsets = beam_offsets(medium);
    let ranges: Vec<f64> = obs[..RANGE_BEAMS].iter().map(|r| r * max_range).collect();

    let dist = obs[GOAL_SLOT] * cfg.tank_diagonal;
    let angle_xy = obs[GOAL_SLOT + 1] * PI;
    let angle_z = obs[GOAL_SLOT + 2] * FRAC_PI_2;
    let vz = (cfg.vz_gain * angle_z).clamp(-VZ_MAX, VZ_MAX);

    let frontal_min = ranges
        .iter()
        .zip(&offsets)
        .filter(|(_, o)| o.abs() <= cfg.frontal_half_angle)
        .map(|(r, _)| *r)
        .fold(f64::INFINITY, f64::min);

    let (v, dyaw) = if frontal_min < cfg.avoid_threshold {
        // Turn in place away from the side holding the nearest return.
        let side_min = |left: bool| -> f64 {
            ranges
                .iter()
                .zip(&offsets)
                .filter(|(_, o)| if left { **o > 0.0 } else { **o < 0.0 })
                .map(|(r, _)| *r)
                .fold(f64::INFINITY, f64::min)
        };
        let dyaw = if side_min(true) >= side_min(false) {
            DYAW_MAX
        } else {
            -DYAW_MAX
        };
        (0.0, dyaw)
    } else {
        let dyaw = (cfg.yaw_gain * angle_xy).clamp(-DYAW_MAX, DYAW_MAX);
        let ramp = (dist / cfg.slow_radius).min(1.0);
        (cfg.cruise_speed * ramp, dyaw)
    };
    [
        (v / 0.125 - 1.0).clamp(-1.0, 1.0),
        (vz / VZ_MAX).clamp(-1.0, 1.0),
        (dyaw / DYAW_MAX).clamp(-1.0, 1.0),
    ]
}
