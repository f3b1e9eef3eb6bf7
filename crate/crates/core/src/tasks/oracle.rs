use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::Objective;
use crate::error::{validation, Result};
use crate::param_space::Configuration;
use crate::pareto::{pareto_front, ObjectiveVector, ParetoFront};
use crate::rng::derive_seed;

pub const ORACLE_MAX_EVALUATIONS: u64 = 10_000_000;

/// Evaluates `objective` on a full grid and returns the Pareto front of the
/// grid averages.
///
/// Each grid point is averaged over `noise_reps` evaluations whose seeds
/// derive from the point's unit-cube coordinates, so a point shared by a
/// coarse and a refined grid gets identical values.
pub fn oracle_front<O: Objective + ?Sized>(
    objective: &O,
    grid_points_per_dim: usize,
    noise_reps: usize,
    master_seed: u64,
    reference_point: &[f64],
) -> Result<ParetoFront> {
    if grid_points_per_dim < 2 {
        return Err(validation("grid needs at least 2 points per dimension"));
    }
    if noise_reps == 0 {
        return Err(validation("need at least one noise repetition"));
    }
    let space = objective.space();
    let d = space.dim();
    let total = (grid_points_per_dim as u64)
        .checked_pow(d as u32)
        .and_then(|n| n.checked_mul(noise_reps as u64))
        .filter(|&n| n <= ORACLE_MAX_EVALUATIONS)
        .ok_or_else(|| {
            validation(format!(
                "grid of {grid_points_per_dim}^{d} points x {noise_reps} reps exceeds {ORACLE_MAX_EVALUATIONS} evaluations"
            ))
        })?;
    let points = total / noise_reps as u64;

    let step = 1.0 / (grid_points_per_dim - 1) as f64;
    let mut index = vec![0usize; d];
    let mut observations: Vec<(Configuration, ObjectiveVector)> = Vec::with_capacity(points as usize);
    let mut unit = vec![0.0; d];
    for _ in 0..points {
        for (u, &i) in unit.iter_mut().zip(&index) {
            *u = i as f64 * step;
        }
        let c = space.from_unit(&unit)?;
        let mut seed_parts: Vec<u64> = Vec::with_capacity(d + 2);
        seed_parts.push(master_seed);
        seed_parts.extend(unit.iter().map(|u| u.to_bits()));
        seed_parts.push(0);
        let mut sum = vec![0.0; objective.num_objectives()];
        for rep in 0..noise_reps {
            *seed_parts.last_mut().expect("non-empty") = rep as u64;
            let y = objective.evaluate(&c, derive_seed(&seed_parts))?;
            for (s, v) in sum.iter_mut().zip(&y.values) {
                *s += v;
            }
        }
        let mean = sum.into_iter().map(|s| s / noise_reps as f64).collect();
        observations.push((c, ObjectiveVector::new(mean)));
        for i in index.iter_mut() {
            *i += 1;
            if *i < grid_points_per_dim {
                break;
            }
            *i = 0;
        }
    }
    Ok(pareto_front(&observations, reference_point))
}

/// Componentwise minimum over the front minus 10% of the front's range.
/// A degenerate range falls back to 10% of the magnitude (or 0.1).
pub fn suggest_reference_point(front: &ParetoFront) -> Result<Vec<f64>> {
    let first = front.entries.first().ok_or_else(|| validation("empty front"))?;
    let k = first.objectives.len();
    let mut lo = vec![f64::INFINITY; k];
    let mut hi = vec![f64::NEG_INFINITY; k];
    for y in front.objectives() {
        for j in 0..k {
            lo[j] = lo[j].min(y[j]);
            hi[j] = hi[j].max(y[j]);
        }
    }
    Ok(lo
        .iter()
        .zip(&hi)
        .map(|(&l, &h)| {
            let range = h - l;
            let margin = if range > 0.0 { 0.1 * range } else if l != 0.0 { 0.1 * l.abs() } else { 0.1 };
            l - margin
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pareto::{dominates, hypervolume_2d};
    use crate::tasks::TaskKind;

    #[test]
    fn oracle_front_is_mutually_non_dominated() {
        let t = TaskKind::PegInsertion.definition();
        let f = oracle_front(&t, 3, 1, 5, &t.default_reference_point()).unwrap();
        for a in &f.entries {
            for b in &f.entries {
                assert!(!dominates(&a.objectives, &b.objectives).unwrap());
            }
        }
    }

    #[test]
    fn refined_grid_never_loses_hypervolume() {
        for k in TaskKind::ALL {
            let t = k.definition();
            let r = t.default_reference_point();
            let coarse = hypervolume_2d(&oracle_front(&t, 3, 1, 9, &r).unwrap()).unwrap();
            let fine = hypervolume_2d(&oracle_front(&t, 5, 1, 9, &r).unwrap()).unwrap();
            assert!(fine >= coarse, "{k}: {fine} < {coarse}");
        }
    }

    #[test]
    fn overflow_guard() {
        let t = TaskKind::ObstacleAvoidance.definition();
        assert!(oracle_front(&t, 15, 1, 0, &[0.0, 0.0]).is_err());
        assert!(oracle_front(&t, 1, 1, 0, &[0.0, 0.0]).is_err());
        assert!(oracle_front(&t, usize::MAX, 1, 0, &[0.0, 0.0]).is_err());
    }

    #[test]
    fn reference_point_suggestion() {
        let f = ParetoFront {
            entries: vec![
                crate::pareto::ParetoEntry {
                    configuration: Configuration::new(vec![0.0]),
                    objectives: ObjectiveVector::new(vec![1.0, 0.0]),
                },
                crate::pareto::ParetoEntry {
                    configuration: Configuration::new(vec![1.0]),
                    objectives: ObjectiveVector::new(vec![0.0, 2.0]),
                },
            ],
            reference_point: vec![0.0, 0.0],
        };
        let r = suggest_reference_point(&f).unwrap();
        assert!((r[0] + 0.1).abs() < 1e-12 && (r[1] + 0.2).abs() < 1e-12);
    }
}
