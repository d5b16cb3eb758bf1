//! Horizontal range sensing: a 270° lidar in air, a 90° sonar fan in water.

use crate::sim::vehicle::{Medium, VehicleState};
use crate::sim::world::WorldConfig;
use crate::types::RANGE_BEAMS;

const AIR_FOV_DEG: f64 = 270.0;
const WATER_FOV_DEG: f64 = 90.0;

#[derive(Debug, Clone, PartialEq)]
pub struct RangeScan {
    pub ranges: [f64; RANGE_BEAMS],
    pub medium: Medium,
    pub max_range: f64,
}

impl RangeScan {
    pub fn min_range(&self) -> f64 {
        self.ranges.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Beam offsets from the heading in radians, beam 0 on the right-hand edge.
/// Beams sit at the centres of equal sectors spanning the field of view.
pub fn beam_offsets(medium: Medium) -> [f64; RANGE_BEAMS] {
    let fov = match medium {
        Medium::Air => AIR_FOV_DEG,
        Medium::Water => WATER_FOV_DEG,
    };
    let sector = fov / RANGE_BEAMS as f64;
    let mut out = [0.0; RANGE_BEAMS];
    for (k, o) in out.iter_mut().enumerate() {
        *o = (-fov / 2.0 + sector / 2.0 + sector * k as f64).to_radians();
    }
    out
}

/// Distance along a horizontal ray to the nearest wall or riser surface,
/// capped at `max_range`. Origins on or beyond a surface read zero.
pub fn cast_ray(world: &WorldConfig, x: f64, y: f64, bearing: f64, max_range: f64) -> f64 {
    let (dx, dy) = (bearing.cos(), bearing.sin());
    let (hx, hy) = (world.half_x(), world.half_y());
    if x.abs() >= hx || y.abs() >= hy {
        // Touching a wall: the wall is at zero range for rays heading into it.
        let into_x = (x >= hx && dx > 0.0) || (x <= -hx && dx < 0.0);
        let into_y = (y >= hy && dy > 0.0) || (y <= -hy && dy < 0.0);
        if into_x || into_y {
            return 0.0;
        }
    }
    let mut best = max_range;
    // The footprint is convex, so the exit distance is the smallest positive
    // crossing of the four wall lines.
    if dx > 0.0 {
        best = best.min(((hx - x) / dx).max(0.0));
    } else if dx < 0.0 {
        best = best.min(((-hx - x) / dx).max(0.0));
    }
    if dy > 0.0 {
        best = best.min(((hy - y) / dy).max(0.0));
    } else if dy < 0.0 {
        best = best.min(((-hy - y) / dy).max(0.0));
    }
    for r in &world.risers {
        let (ox, oy) = (x - r.x, y - r.y);
        let c = ox * ox + oy * oy - r.radius * r.radius;
        if c <= 0.0 {
            return 0.0;
        }
        let b = ox * dx + oy * dy;
        if b >= 0.0 {
            continue; // pointing away from the circle
        }
        let disc = b * b - c;
        if disc < 0.0 {
            continue;
        }
        let t = -b - disc.sqrt();
        if t < best {
            best = t.max(0.0);
        }
    }
    best
}

/// Unquantised scan for the vehicle's current medium.
pub fn cast_range_scan_exact(state: &VehicleState, world: &WorldConfig) -> RangeScan {
    let max_range = match state.medium {
        Medium::Air => world.air_range_max,
        Medium::Water => world.water_range_max,
    };
    let mut ranges = [0.0; RANGE_BEAMS];
    for (r, off) in ranges.iter_mut().zip(beam_offsets(state.medium)) {
        *r = cast_ray(world, state.x, state.y, state.yaw + off, max_range);
    }
    RangeScan {
        ranges,
        medium: state.medium,
        max_range,
    }
}

/// Rounds a sonar distance to the nearest multiple of the bin width.
pub fn quantize_sonar(d: f64, world: &WorldConfig) -> f64 {
    let bin = world.sonar_bin_width();
    ((d / bin).round() * bin).min(world.water_range_max)
}

/// The scan as sensed: sonar readings are quantised to the bin width.
pub fn cast_range_scan(state: &VehicleState, world: &WorldConfig) -> RangeScan {
    let mut scan = cast_range_scan_exact(state, world);
    if scan.medium == Medium::Water {
        scan.ranges
            .iter_mut()
            .for_each(|r| *r = quantize_sonar(*r, world));
    }
    scan
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::world::Riser;

    #[test]
    fn centre_to_wall_is_five() {
        let w = WorldConfig::without_risers();
        assert!((cast_ray(&w, 0.0, 0.0, 0.0, 10.0) - 5.0).abs() < 1e-12);
    }

    #[test]
    fn riser_chord_along_centre_line() {
        let mut w = WorldConfig::without_risers();
        w.risers.push(Riser {
            x: 3.0,
            y: 0.0,
            radius: 0.2,
        });
        assert!((cast_ray(&w, 0.0, 0.0, 0.0, 10.0) - 2.8).abs() < 1e-12);
    }

    #[test]
    fn air_beams_are_sector_centres() {
        let o = beam_offsets(Medium::Air);
        assert!((o[0].to_degrees() + 128.25).abs() < 1e-9);
        assert!((o[19].to_degrees() - 128.25).abs() < 1e-9);
        let w = beam_offsets(Medium::Water);
        assert!((w[0].to_degrees() + 42.75).abs() < 1e-9);
        assert!(((w[1] - w[0]).to_degrees() - 4.5).abs() < 1e-9);
    }

    #[test]
    fn long_rays_cap_at_max_range() {
        let w = WorldConfig::without_risers();
        let d = cast_ray(&w, -4.9, -4.9, std::f64::consts::FRAC_PI_4, 10.0);
        assert_eq!(d, 10.0);
    }

    #[test]
    fn clamped_at_wall_reads_zero_into_it() {
        let w = WorldConfig::without_risers();
        assert_eq!(cast_ray(&w, 5.0, 0.0, 0.0, 10.0), 0.0);
        assert!((cast_ray(&w, 5.0, 0.0, std::f64::consts::PI, 10.0) - 10.0).abs() < 1e-12);
    }

    #[test]
    fn sonar_quantisation_bound() {
        let w = WorldConfig::default();
        for k in 0..1000 {
            let d = k as f64 * 0.01937;
            assert!((quantize_sonar(d, &w) - d).abs() <= 0.01 + 1e-12);
        }
    }
}
