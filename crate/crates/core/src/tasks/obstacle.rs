//! Passing over a box-shaped obstacle with a three-segment motion in the
//! (y, z) plane.
//!
//! The end effector heads for `g1` until it rises above `p1`, then heads for
//! `g2` until it passes `p2` in y, then goes straight to the final goal. A
//! segment whose target is reached before its threshold triggers simply ends
//! at the target.

use alloc::collections::BTreeMap;
use alloc::string::ToString;
use alloc::vec::Vec;

use super::EpisodeOutcome;
use crate::pareto::ObjectiveVector;

pub type Point = (f64, f64);

pub const START: Point = (0.0, 0.1);
pub const GOAL: Point = (0.6, 0.1);
/// Obstacle extent: y range then z range.
pub const OBSTACLE: ((f64, f64), (f64, f64)) = ((0.2, 0.4), (0.0, 0.25));
pub const INFLATION: f64 = 0.02;
pub const SAFETY_CAP: f64 = 0.15;
pub const TABLE_Z: f64 = 0.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MotionParams {
    pub g1: Point,
    pub g2: Point,
    pub p1: f64,
    pub p2: f64,
}

impl MotionParams {
    /// Order: y₁, z₁, y₂, z₂, p₁, p₂.
    pub fn from_slice(v: &[f64]) -> Self {
        Self { g1: (v[0], v[1]), g2: (v[2], v[3]), p1: v[4], p2: v[5] }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Aabb {
    lo: Point,
    hi: Point,
}

impl Aabb {
    fn obstacle(inflate: f64) -> Self {
        let ((y0, y1), (z0, z1)) = OBSTACLE;
        Self { lo: (y0 - inflate, z0 - inflate), hi: (y1 + inflate, z1 + inflate) }
    }

    fn distance_to_point(&self, p: Point) -> f64 {
        let dy = (self.lo.0 - p.0).max(0.0).max(p.0 - self.hi.0);
        let dz = (self.lo.1 - p.1).max(0.0).max(p.1 - self.hi.1);
        libm::hypot(dy, dz)
    }

    /// First parameter `t ∈ [0, 1]` at which the segment touches the box.
    fn segment_entry(&self, a: Point, b: Point) -> Option<f64> {
        let mut t0: f64 = 0.0;
        let mut t1: f64 = 1.0;
        for (start, delta, lo, hi) in [(a.0, b.0 - a.0, self.lo.0, self.hi.0), (a.1, b.1 - a.1, self.lo.1, self.hi.1)] {
            if delta == 0.0 {
                if start < lo || start > hi {
                    return None;
                }
                continue;
            }
            let (mut ta, mut tb) = ((lo - start) / delta, (hi - start) / delta);
            if ta > tb {
                core::mem::swap(&mut ta, &mut tb);
            }
            t0 = t0.max(ta);
            t1 = t1.min(tb);
            if t0 > t1 {
                return None;
            }
        }
        Some(t0)
    }
}

fn lerp(a: Point, b: Point, t: f64) -> Point {
    (a.0 + t * (b.0 - a.0), a.1 + t * (b.1 - a.1))
}

fn dist(a: Point, b: Point) -> f64 {
    libm::hypot(b.0 - a.0, b.1 - a.1)
}

/// Distance from a segment to the box (zero when they intersect).
fn segment_box_distance(a: Point, b: Point, bx: &Aabb) -> f64 {
    if bx.segment_entry(a, b).is_some() {
        return 0.0;
    }
    let mut best = bx.distance_to_point(a).min(bx.distance_to_point(b));
    let (dy, dz) = (b.0 - a.0, b.1 - a.1);
    let len2 = dy * dy + dz * dz;
    if len2 > 0.0 {
        for corner in [bx.lo, bx.hi, (bx.lo.0, bx.hi.1), (bx.hi.0, bx.lo.1)] {
            let t = (((corner.0 - a.0) * dy + (corner.1 - a.1) * dz) / len2).clamp(0.0, 1.0);
            best = best.min(dist(lerp(a, b, t), corner));
        }
    }
    best
}

/// Lowest height above the table of the part of a segment passing the obstacle.
fn table_clearance_over_obstacle(a: Point, b: Point) -> Option<f64> {
    let ((y0, y1), _) = OBSTACLE;
    let (lo, hi) = if a.0 <= b.0 { (a, b) } else { (b, a) };
    if hi.0 < y0 || lo.0 > y1 {
        return None;
    }
    let z_at = |y: f64| {
        if hi.0 == lo.0 {
            lo.1.min(hi.1)
        } else {
            lo.1 + (y.clamp(lo.0, hi.0) - lo.0) / (hi.0 - lo.0) * (hi.1 - lo.1)
        }
    };
    let ya = lo.0.max(y0);
    let yb = hi.0.min(y1);
    Some(z_at(ya).min(z_at(yb)) - TABLE_Z)
}

/// Moves from `from` toward `target` until `reached(point)` holds, where
/// `axis_value` is linear along the segment. Ends at `target` if the
/// threshold is never crossed.
fn advance(from: Point, target: Point, axis: usize, threshold: f64) -> Point {
    let component = |p: Point| if axis == 0 { p.0 } else { p.1 };
    let start = component(from);
    if start >= threshold || dist(from, target) == 0.0 {
        return from;
    }
    let end = component(target);
    if end > start {
        let t = (threshold - start) / (end - start);
        if t <= 1.0 {
            return lerp(from, target, t);
        }
    }
    target
}

/// Waypoints of the executed motion: start, two switch points, goal.
pub fn waypoints(p: &MotionParams) -> [Point; 4] {
    let a = advance(START, p.g1, 1, p.p1);
    let b = advance(a, p.g2, 0, p.p2);
    [START, a, b, GOAL]
}

pub fn path_length(points: &[Point]) -> f64 {
    points.windows(2).map(|w| dist(w[0], w[1])).sum()
}

pub fn episode(p: &MotionParams) -> EpisodeOutcome {
    let pts = waypoints(p);
    let inflated = Aabb::obstacle(INFLATION);
    let solid = Aabb::obstacle(0.0);
    let length = path_length(&pts);

    let mut collision: Option<Point> = None;
    for w in pts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let below = if a.1 < TABLE_Z {
            Some(0.0)
        } else if b.1 < TABLE_Z {
            Some((a.1 - TABLE_Z) / (a.1 - b.1))
        } else {
            None
        };
        let hit = match (inflated.segment_entry(a, b), below) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (x, y) => x.or(y),
        };
        if let Some(t) = hit {
            collision = Some(lerp(a, b, t));
            break;
        }
    }

    let mut diagnostics = BTreeMap::new();
    diagnostics.insert("path_length".to_string(), length);
    let straight = dist(START, GOAL);
    let (performance, safety, success) = match collision {
        Some(at) => {
            let remaining = dist(at, GOAL);
            diagnostics.insert("clearance".to_string(), 0.0);
            ((-1.0 + (1.0 - remaining / straight)).max(-1.0), 0.0, false)
        }
        None => {
            let clearances: Vec<f64> = pts
                .windows(2)
                .flat_map(|w| {
                    let to_box = segment_box_distance(w[0], w[1], &solid);
                    let to_table = table_clearance_over_obstacle(w[0], w[1]).unwrap_or(f64::INFINITY);
                    [to_box, to_table]
                })
                .collect();
            let clearance = clearances.iter().copied().fold(f64::INFINITY, f64::min);
            diagnostics.insert("clearance".to_string(), clearance);
            (((2.0 - length) + 1.0).min(2.0), clearance.min(SAFETY_CAP), true)
        }
    };
    EpisodeOutcome {
        objectives: ObjectiveVector::new(alloc::vec![performance, safety]),
        success,
        diagnostics,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_first_segment_is_skipped() {
        let p = MotionParams { g1: START, g2: (0.6, 0.45), p1: 0.3, p2: 0.3 };
        let pts = waypoints(&p);
        assert_eq!(pts[1], START);
        // Second segment heads for g2 until y ≥ 0.3.
        assert!((pts[2].0 - 0.3).abs() < 1e-12);
    }

    #[test]
    fn high_arc_is_capped_at_full_safety() {
        let p = MotionParams { g1: (0.0, 0.45), g2: (0.6, 0.45), p1: 0.45, p2: 0.6 };
        let out = episode(&p);
        assert!(out.success);
        assert!((out.diagnostics["clearance"] - 0.2).abs() < 1e-12);
        assert_eq!(out.objectives.values[1], SAFETY_CAP);
        assert!((out.diagnostics["path_length"] - 1.3).abs() < 1e-12);
        assert!((out.objectives.values[0] - 1.7).abs() < 1e-12);
    }

    #[test]
    fn straight_through_the_box_collides() {
        let p = MotionParams { g1: (0.0, 0.1), g2: (0.6, 0.1), p1: 0.1, p2: 0.6 };
        let out = episode(&p);
        assert!(!out.success);
        assert_eq!(out.objectives.values[1], 0.0);
        // First contact at the inflated face y = 0.18.
        let expected = -1.0 + (1.0 - (0.6 - 0.18) / 0.6);
        assert!((out.objectives.values[0] - expected).abs() < 1e-12);
    }

    #[test]
    fn tight_pass_has_low_clearance() {
        // Cross 5 cm above the top face.
        let p = MotionParams { g1: (0.15, 0.3), g2: (0.45, 0.3), p1: 0.3, p2: 0.45 };
        let out = episode(&p);
        assert!(out.success);
        assert!(out.objectives.values[1] < 0.06);
        assert!(out.objectives.values[0] > 1.9);
    }

    #[test]
    fn segment_entry_handles_axis_parallel_segments() {
        let b = Aabb::obstacle(0.0);
        assert_eq!(b.segment_entry((0.3, 0.5), (0.3, 0.1)), Some((0.5 - 0.25) / 0.4));
        assert_eq!(b.segment_entry((0.1, 0.5), (0.1, 0.0)), None);
    }
}
