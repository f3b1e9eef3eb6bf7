//! Pushing an object with an off-center mass toward a target pose.
//!
//! Parameters are lateral/longitudinal offsets of the push start `(s_x, s_y)`
//! and of the push goal `(g_x, g_y)`. Pushing off the center of mass rotates
//! the object and makes it drift sideways; both show up as pose error, and
//! the lever arm raises controller effort.

use alloc::collections::BTreeMap;
use alloc::string::ToString;

use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::EpisodeOutcome;
use crate::pareto::ObjectiveVector;

pub const PUSH_DISTANCE: f64 = 0.20;
/// Half the width of the square pushing peg.
pub const CONTACT_HALF_WIDTH: f64 = 0.035;
/// Center of mass relative to the object's geometric center.
pub const CENTER_OF_MASS: (f64, f64) = (0.02, 0.01);
/// Standard deviation of the object and target pose perturbations.
pub const POSE_SIGMA: f64 = 0.005;
/// Lateral offsets of the four robot start positions relative to the object.
pub const START_OFFSETS: [f64; 4] = [-0.0045, -0.0015, 0.0015, 0.0045];
const ROTATION_GAIN: f64 = 40.0;
const DRIFT_GAIN: f64 = 0.05;
const RESIDUAL_GAIN: f64 = 0.5;
const POSITION_SCALE: f64 = 0.05;
const ORIENTATION_SCALE: f64 = 0.5;
const EFFORT_GAIN: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PushParams {
    pub start: (f64, f64),
    pub goal: (f64, f64),
}

impl PushParams {
    pub fn from_slice(v: &[f64]) -> Self {
        Self { start: (v[0], v[1]), goal: (v[2], v[3]) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PushNoise {
    pub start_offset: f64,
    pub object: (f64, f64),
    pub target: (f64, f64),
}

impl PushNoise {
    pub fn draw<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let start_offset = START_OFFSETS[rng.random_range(0..START_OFFSETS.len())];
        let n = Normal::new(0.0, POSE_SIGMA).expect("positive sigma");
        Self {
            start_offset,
            object: (n.sample(rng), n.sample(rng)),
            target: (n.sample(rng), n.sample(rng)),
        }
    }
}

pub fn episode(p: &PushParams, noise: &PushNoise) -> EpisodeOutcome {
    let mut diagnostics = BTreeMap::new();
    let lateral = noise.start_offset + noise.object.1;
    if (p.start.1 + lateral).abs() > CONTACT_HALF_WIDTH {
        diagnostics.insert("lever_arm".to_string(), 0.0);
        return EpisodeOutcome {
            objectives: ObjectiveVector::new(alloc::vec![-1.0, -0.5]),
            success: false,
            diagnostics,
        };
    }
    // The lateral perturbation shifts contact line and center of mass alike.
    let lever = ((CENTER_OF_MASS.1 + lateral) - (p.start.1 + lateral)).abs();
    let rotation = ROTATION_GAIN * lever * PUSH_DISTANCE;
    let side = if lever > 0.0 { libm::copysign(1.0, CENTER_OF_MASS.1 - p.start.1) } else { 0.0 };
    let drift = DRIFT_GAIN * rotation;
    let residual = RESIDUAL_GAIN
        * libm::hypot(noise.object.0 - noise.target.0, noise.object.1 - noise.target.1);
    let position_error = libm::hypot(p.goal.0, p.goal.1 - drift * side) + residual;
    let orientation_error = rotation.abs();
    let mut performance = 1.0 - position_error / POSITION_SCALE - orientation_error / ORIENTATION_SCALE;
    let success = position_error <= 0.01 && orientation_error <= 0.1;
    if success {
        performance += 1.0;
    }
    let performance = performance.max(-1.0);
    let impact = -(EFFORT_GAIN * (1.0 + 2.0 * lever / POSITION_SCALE) * PUSH_DISTANCE);
    diagnostics.insert("lever_arm".to_string(), lever);
    diagnostics.insert("position_error".to_string(), position_error);
    diagnostics.insert("orientation_error".to_string(), orientation_error);
    EpisodeOutcome {
        objectives: ObjectiveVector::new(alloc::vec![performance, impact]),
        success,
        diagnostics,
    }
}
