use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};
use crate::sim::observe::GoalSpec;
use crate::sim::vehicle::VehicleState;
use crate::sim::world::WorldConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scenario {
    /// Random start and goal; arrival spawns a fresh goal while training.
    TrainRandom,
    /// Air start at (0, 0, 2.5), water goal at (2, 3, −1).
    FixedAW,
    /// The same two points with start and goal swapped.
    FixedWA,
    /// Air start at (0, 0, 2.5), water goal at (3.6, −2.4, −1).
    FixedAW2,
}

impl Scenario {
    pub const ALL: [Scenario; 4] = [
        Scenario::TrainRandom,
        Scenario::FixedAW,
        Scenario::FixedWA,
        Scenario::FixedAW2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::TrainRandom => "train-random",
            Scenario::FixedAW => "fixed-aw",
            Scenario::FixedWA => "fixed-wa",
            Scenario::FixedAW2 => "fixed-aw2",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_lowercase();
        match key.as_str() {
            "trainrandom" => Ok(Scenario::TrainRandom),
            "fixedaw" => Ok(Scenario::FixedAW),
            "fixedwa" => Ok(Scenario::FixedWA),
            "fixedaw2" => Ok(Scenario::FixedAW2),
            _ => Err(Error::Config(format!("unknown scenario '{s}'"))),
        }
    }
}

const AIR_POINT: (f64, f64, f64) = (0.0, 0.0, 2.5);
const WATER_GOAL: (f64, f64, f64) = (2.0, 3.0, -1.0);
const WATER_GOAL_2: (f64, f64, f64) = (3.6, -2.4, -1.0);

/// Vertical bands for random spawns, chosen clear of the floor/ceiling margin.
pub const AIR_Z_BAND: (f64, f64) = (0.5, 4.5);
pub const WATER_START_Z_BAND: (f64, f64) = (-0.7, -0.3);
pub const WATER_GOAL_Z_BAND: (f64, f64) = (-0.8, -0.2);

const MAX_DRAWS: usize = 1000;

/// Random horizontal point with the world's spawn clearance.
fn clear_point<R: Rng + ?Sized>(world: &WorldConfig, rng: &mut R) -> Result<(f64, f64)> {
    let c = world.spawn_clearance;
    let (hx, hy) = (world.half_x() - c, world.half_y() - c);
    if hx <= 0.0 || hy <= 0.0 {
        return Err(Error::Scenario(
            "tank too small for the spawn clearance".into(),
        ));
    }
    for _ in 0..MAX_DRAWS {
        let x = rng.random_range(-hx..=hx);
        let y = rng.random_range(-hy..=hy);
        if world.horizontal_clearance(x, y) >= c {
            return Ok((x, y));
        }
    }
    Err(Error::Scenario(format!(
        "no clear spawn point after {MAX_DRAWS} draws"
    )))
}

fn band_z<R: Rng + ?Sized>(band: (f64, f64), rng: &mut R) -> f64 {
    rng.random_range(band.0..=band.1)
}

/// Goal drawn with clearance, in a random medium, at least two arrival radii
/// from `(x, y, z)` so it is never reached on the spot.
pub fn random_goal<R: Rng + ?Sized>(
    world: &WorldConfig,
    from: (f64, f64, f64),
    rng: &mut R,
) -> Result<GoalSpec> {
    for _ in 0..MAX_DRAWS {
        let (gx, gy) = clear_point(world, rng)?;
        let gz = if rng.random_bool(0.5) {
            band_z(AIR_Z_BAND, rng)
        } else {
            band_z(WATER_GOAL_Z_BAND, rng)
        };
        let d = ((gx - from.0).powi(2) + (gy - from.1).powi(2) + (gz - from.2).powi(2)).sqrt();
        if d >= 2.0 * world.arrive_radius {
            return Ok(GoalSpec {
                gx,
                gy,
                gz,
                arrive_radius: world.arrive_radius,
            });
        }
    }
    Err(Error::Scenario(format!(
        "no goal far enough from the vehicle after {MAX_DRAWS} draws"
    )))
}

fn goal_at(p: (f64, f64, f64), world: &WorldConfig) -> GoalSpec {
    GoalSpec {
        gx: p.0,
        gy: p.1,
        gz: p.2,
        arrive_radius: world.arrive_radius,
    }
}

/// Initial vehicle state and goal. Fixed scenarios start at rest facing +x.
pub fn reset_episode<R: Rng + ?Sized>(
    scenario: Scenario,
    world: &WorldConfig,
    rng: &mut R,
) -> Result<(VehicleState, GoalSpec)> {
    let fixed = |start: (f64, f64, f64), goal: (f64, f64, f64)| {
        (
            VehicleState::at_rest(start.0, start.1, start.2, 0.0, world),
            goal_at(goal, world),
        )
    };
    Ok(match scenario {
        Scenario::FixedAW => fixed(AIR_POINT, WATER_GOAL),
        Scenario::FixedWA => fixed(WATER_GOAL, AIR_POINT),
        Scenario::FixedAW2 => fixed(AIR_POINT, WATER_GOAL_2),
        Scenario::TrainRandom => {
            let (x, y) = clear_point(world, rng)?;
            let z = if rng.random_bool(0.5) {
                band_z(AIR_Z_BAND, rng)
            } else {
                band_z(WATER_START_Z_BAND, rng)
            };
            // (−π, π]: negate a draw from [−π, π).
            let yaw = -rng.random_range(-PI..PI);
            let goal = random_goal(world, (x, y, z), rng)?;
            (VehicleState::at_rest(x, y, z, yaw, world), goal)
        }
    })
}
