use crate::error::{Error, Result};

/// Vertical cylinder spanning the full tank height.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Riser {
    pub x: f64,
    pub y: f64,
    pub radius: f64,
}

/// Static tank geometry, sensing limits and episode constants.
///
/// The footprint is centred on the origin: `x ∈ [−tank_x/2, tank_x/2]`,
/// likewise for `y`.
#[derive(Debug, Clone, PartialEq)]
pub struct WorldConfig {
    pub tank_x: f64,
    pub tank_y: f64,
    pub z_floor: f64,
    pub z_ceiling: f64,
    pub water_surface_z: f64,
    pub risers: Vec<Riser>,
    /// Control period in seconds.
    pub dt: f64,
    pub air_range_max: f64,
    pub water_range_max: f64,
    pub sonar_bins: u32,
    /// Velocity-lag time constants; zero means commands act instantly.
    pub lag_air: f64,
    pub lag_water: f64,
    pub wind_theta: f64,
    pub wind_sigma: f64,
    pub arrive_radius: f64,
    pub collide_distance: f64,
    /// Floor/ceiling proximity that counts as a collision.
    pub vertical_margin: f64,
    pub max_steps: u64,
    pub r_arrive: f64,
    pub r_collide: f64,
    /// Horizontal clearance from walls and risers for random spawns.
    pub spawn_clearance: f64,
}

impl Default for WorldConfig {
    fn default() -> Self {
        Self {
            tank_x: 10.0,
            tank_y: 10.0,
            z_floor: -1.0,
            z_ceiling: 5.0,
            water_surface_z: 0.0,
            risers: default_risers(),
            dt: 0.2,
            air_range_max: 10.0,
            water_range_max: 20.0,
            sonar_bins: 1000,
            lag_air: 0.3,
            lag_water: 0.8,
            wind_theta: 0.5,
            wind_sigma: 0.05,
            arrive_radius: 0.5,
            collide_distance: 0.5,
            vertical_margin: 0.25,
            max_steps: 500,
            r_arrive: 100.0,
            r_collide: -10.0,
            spawn_clearance: 0.75,
        }
    }
}

pub fn default_risers() -> Vec<Riser> {
    [(2.5, 2.5), (-2.5, 2.5), (-2.5, -2.5), (2.5, -2.5)]
        .iter()
        .map(|&(x, y)| Riser { x, y, radius: 0.2 })
        .collect()
}

impl WorldConfig {
    pub fn without_risers() -> Self {
        Self {
            risers: Vec::new(),
            ..Self::default()
        }
    }

    pub fn half_x(&self) -> f64 {
        self.tank_x / 2.0
    }

    pub fn half_y(&self) -> f64 {
        self.tank_y / 2.0
    }

    /// Length of the tank's space diagonal, used to normalise distances.
    pub fn diagonal(&self) -> f64 {
        let h = self.z_ceiling - self.z_floor;
        (self.tank_x * self.tank_x + self.tank_y * self.tank_y + h * h).sqrt()
    }

    pub fn sonar_bin_width(&self) -> f64 {
        self.water_range_max / self.sonar_bins as f64
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Config(m));
        if !(self.tank_x > 0.0 && self.tank_y > 0.0) {
            return fail("tank footprint must be positive".into());
        }
        if !(self.z_floor < self.water_surface_z && self.water_surface_z < self.z_ceiling) {
            return fail("need z_floor < water_surface_z < z_ceiling".into());
        }
        if !(self.dt > 0.0) || self.lag_air < 0.0 || self.lag_water < 0.0 {
            return fail("dt must be positive and lag constants non-negative".into());
        }
        if !(self.air_range_max > 0.0 && self.water_range_max > 0.0) || self.sonar_bins == 0 {
            return fail("sensor ranges and sonar_bins must be positive".into());
        }
        if !(self.wind_theta > 0.0) || self.wind_sigma < 0.0 {
            return fail("wind_theta must be positive and wind_sigma non-negative".into());
        }
        if !(self.arrive_radius > 0.0
            && self.collide_distance >= 0.0
            && self.vertical_margin >= 0.0)
        {
            return fail("arrival and collision distances must be positive".into());
        }
        if self.max_steps == 0 {
            return fail("max_steps must be positive".into());
        }
        for (k, r) in self.risers.iter().enumerate() {
            if !(r.radius > 0.0) {
                return fail(format!("riser {k} needs a positive radius"));
            }
            if r.x.abs() + r.radius > self.half_x() || r.y.abs() + r.radius > self.half_y() {
                return fail(format!("riser {k} lies outside the tank"));
            }
        }
        Ok(())
    }

    /// Smallest horizontal distance from `(x, y)` to a wall or riser surface
    /// (negative inside a riser).
    pub fn horizontal_clearance(&self, x: f64, y: f64) -> f64 {
        let walls = (self.half_x() - x.abs()).min(self.half_y() - y.abs());
        self.risers
            .iter()
            .map(|r| (x - r.x).hypot(y - r.y) - r.radius)
            .fold(walls, f64::min)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_world_is_valid() {
        let w = WorldConfig::default();
        w.validate().unwrap();
        assert_eq!(w.z_ceiling - w.z_floor, 6.0);
        assert!((w.diagonal() - 236f64.sqrt()).abs() < 1e-12);
        assert!((w.sonar_bin_width() - 0.02).abs() < 1e-15);
    }

    #[test]
    fn rejects_riser_outside() {
        let mut w = WorldConfig::default();
        w.risers.push(Riser {
            x: 4.9,
            y: 0.0,
            radius: 0.2,
        });
        assert!(w.validate().is_err());
    }

    #[test]
    fn clearance_accounts_for_risers() {
        let w = WorldConfig::default();
        assert!((w.horizontal_clearance(0.0, 0.0) - (2.5f64.hypot(2.5) - 0.2)).abs() < 1e-12);
        assert!((w.horizontal_clearance(2.5, 3.0) - 0.3).abs() < 1e-12);
    }
}
