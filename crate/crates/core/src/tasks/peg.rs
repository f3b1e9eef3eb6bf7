//! Peg insertion with an Archimedes spiral search.
//!
//! The spiral sweeps rings spaced by the pitch `d` out to `r_max`; the hole
//! is found when one ring passes within the clearance of the hole offset.
//! Parameters: pitch `d`, maximal radius `r_max`, path velocity `v_p` and
//! downward force `F`.

use alloc::collections::BTreeMap;
use alloc::string::ToString;
use core::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::EpisodeOutcome;
use crate::pareto::ObjectiveVector;

/// Radial clearance between peg and hole.
pub const CLEARANCE: f64 = 0.0015;
/// Standard deviation of each horizontal hole-offset component.
pub const HOLE_OFFSET_SIGMA: f64 = 0.007;
/// Episode timeout.
pub const TIMEOUT: f64 = 15.0;
/// Smallest force that keeps the peg in contact while searching.
pub const MIN_CONTACT_FORCE: f64 = 2.0;
/// Distance offsets of the five robot start positions.
pub const START_OFFSETS: [f64; 5] = [0.00, 0.01, 0.02, 0.03, 0.04];
const APPROACH_SPEED: f64 = 0.05;
const PENALTY_RANGE: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpiralParams {
    pub pitch: f64,
    pub r_max: f64,
    pub velocity: f64,
    pub force: f64,
}

impl SpiralParams {
    pub fn from_slice(v: &[f64]) -> Self {
        Self { pitch: v[0], r_max: v[1], velocity: v[2], force: v[3] }
    }
}

/// Randomized episode conditions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PegNoise {
    pub start_offset: f64,
    pub hole_offset: (f64, f64),
}

impl PegNoise {
    pub fn draw<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let start_offset = START_OFFSETS[rng.random_range(0..START_OFFSETS.len())];
        let normal = Normal::new(0.0, HOLE_OFFSET_SIGMA).expect("positive sigma");
        let hole_offset = (normal.sample(rng), normal.sample(rng));
        Self { start_offset, hole_offset }
    }
}

/// Whether some reachable ring passes within the clearance of radius `rho`.
pub fn spiral_detects(pitch: f64, r_max: f64, rho: f64) -> bool {
    let last_ring = libm::floor(r_max / pitch + 1e-9);
    let k = libm::round(rho / pitch).min(last_ring).max(0.0);
    (k * pitch - rho).abs() <= CLEARANCE + 1e-12
}

/// Arc length of the spiral out to `rho`, divided by the path velocity.
pub fn search_time(p: &SpiralParams, rho: f64) -> f64 {
    PI * rho * rho / p.pitch / p.velocity
}

pub fn episode(p: &SpiralParams, noise: &PegNoise) -> EpisodeOutcome {
    let approach = 1.0 + noise.start_offset / APPROACH_SPEED;
    let rho = libm::hypot(noise.hole_offset.0, noise.hole_offset.1);
    let t_search = search_time(p, rho);
    let detected = spiral_detects(p.pitch, p.r_max, rho) && p.force >= MIN_CONTACT_FORCE;
    let success = detected && approach + t_search <= TIMEOUT;
    let performance = if success {
        1.0 + (TIMEOUT - approach - t_search) / TIMEOUT
    } else {
        -rho.min(PENALTY_RANGE) / PENALTY_RANGE
    };
    let searched = t_search.min(TIMEOUT - approach);
    let impact = -p.force * searched;
    let mut diagnostics = BTreeMap::new();
    diagnostics.insert("search_time".to_string(), searched);
    diagnostics.insert("hole_distance".to_string(), rho);
    diagnostics.insert("force_integral".to_string(), p.force * searched);
    EpisodeOutcome {
        objectives: ObjectiveVector::new(alloc::vec![performance, impact]),
        success,
        diagnostics,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(pitch: f64, r_max: f64, velocity: f64, force: f64) -> SpiralParams {
        SpiralParams { pitch, r_max, velocity, force }
    }

    #[test]
    fn centered_hole_is_found_immediately() {
        let noise = PegNoise { start_offset: 0.02, hole_offset: (0.0, 0.0) };
        let out = episode(&params(0.004, 0.02, 0.05, 5.0), &noise);
        let approach = 1.0 + 0.02 / 0.05;
        assert!(out.success);
        assert!((out.objectives.values[0] - (1.0 + (TIMEOUT - approach) / TIMEOUT)).abs() < 1e-12);
        assert_eq!(out.objectives.values[1], 0.0);
    }

    #[test]
    fn fifth_ring_hits_at_ten_millimetres() {
        assert!(spiral_detects(0.002, 0.02, 0.010));
        let t = search_time(&params(0.002, 0.02, 0.05, 5.0), 0.010);
        assert!((t - core::f64::consts::PI).abs() < 1e-9);
    }

    #[test]
    fn out_of_reach_hole_fails_with_distance_penalty() {
        let noise = PegNoise { start_offset: 0.0, hole_offset: (0.03, 0.0) };
        let out = episode(&params(0.002, 0.02, 0.05, 5.0), &noise);
        assert!(!out.success);
        assert!((out.objectives.values[0] + 0.03 / 0.05).abs() < 1e-12);
        let far = PegNoise { start_offset: 0.0, hole_offset: (0.06, 0.02) };
        assert_eq!(episode(&params(0.002, 0.02, 0.05, 5.0), &far).objectives.values[0], -1.0);
    }

    #[test]
    fn weak_force_loses_contact() {
        let noise = PegNoise { start_offset: 0.0, hole_offset: (0.001, 0.0) };
        assert!(!episode(&params(0.002, 0.02, 0.05, 1.5), &noise).success);
        assert!(episode(&params(0.002, 0.02, 0.05, 2.0), &noise).success);
    }

    #[test]
    fn coarse_pitch_misses_between_rings() {
        // Rings at 0, 8, 16 mm; 4 mm is 4 mm from the nearest ring.
        assert!(!spiral_detects(0.008, 0.04, 0.004));
        assert!(spiral_detects(0.008, 0.04, 0.0165));
        // Beyond the last ring plus clearance.
        assert!(!spiral_detects(0.005, 0.01, 0.012));
    }

    #[test]
    fn faster_and_lighter_is_monotone() {
        let noise = PegNoise { start_offset: 0.0, hole_offset: (0.004, 0.003) };
        let slow = episode(&params(0.002, 0.03, 0.02, 5.0), &noise);
        let fast = episode(&params(0.002, 0.03, 0.08, 5.0), &noise);
        assert!(fast.diagnostics["search_time"] < slow.diagnostics["search_time"]);
        let heavy = episode(&params(0.002, 0.03, 0.08, 9.0), &noise);
        assert!(heavy.objectives.values[1] < fast.objectives.values[1]);
    }
}
