//! Domination, Pareto-front extraction and the hypervolume indicator.
//!
//! All objectives are maximized. Domination is strict: `a` dominates `b`
//! when it is at least as good everywhere and better somewhere, so equal
//! vectors never dominate each other.

use alloc::format;
use alloc::vec::Vec;
use core::cmp::Ordering;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{validation, Result};
use crate::param_space::Configuration;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ObjectiveVector {
    pub values: Vec<f64>,
}

impl ObjectiveVector {
    pub fn new(values: Vec<f64>) -> Self {
        Self { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}

impl From<Vec<f64>> for ObjectiveVector {
    fn from(values: Vec<f64>) -> Self {
        Self { values }
    }
}

pub fn dominates(a: &ObjectiveVector, b: &ObjectiveVector) -> Result<bool> {
    if a.len() != b.len() {
        return Err(validation(format!("cannot compare {}- and {}-objective vectors", a.len(), b.len())));
    }
    Ok(dominates_unchecked(&a.values, &b.values))
}

fn dominates_unchecked(a: &[f64], b: &[f64]) -> bool {
    let mut strictly = false;
    for (x, y) in a.iter().zip(b) {
        if x < y {
            return false;
        }
        if x > y {
            strictly = true;
        }
    }
    strictly
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParetoEntry {
    pub configuration: Configuration,
    pub objectives: ObjectiveVector,
}

/// Mutually non-dominated entries in canonical order (objectives
/// lexicographically descending) plus the hypervolume reference point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParetoFront {
    pub entries: Vec<ParetoEntry>,
    pub reference_point: Vec<f64>,
}

fn lexicographic_desc(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match y.partial_cmp(x).unwrap_or(Ordering::Equal) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    Ordering::Equal
}

/// Keeps the non-dominated observations. Of several observations with equal
/// objective vectors only the first is kept.
pub fn pareto_front(observations: &[(Configuration, ObjectiveVector)], reference_point: &[f64]) -> ParetoFront {
    let mut entries: Vec<ParetoEntry> = Vec::new();
    for (i, (c, y)) in observations.iter().enumerate() {
        let dominated = observations
            .iter()
            .any(|(_, other)| other.len() == y.len() && dominates_unchecked(&other.values, &y.values));
        let duplicate = observations[..i].iter().any(|(_, other)| other.values == y.values);
        if !dominated && !duplicate {
            entries.push(ParetoEntry { configuration: c.clone(), objectives: y.clone() });
        }
    }
    // Stable sort keeps first-seen order among exact ties (none remain after dedup).
    entries.sort_by(|a, b| lexicographic_desc(&a.objectives.values, &b.objectives.values));
    ParetoFront { entries, reference_point: reference_point.to_vec() }
}

impl ParetoFront {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn objectives(&self) -> impl Iterator<Item = &[f64]> {
        self.entries.iter().map(|e| e.objectives.values.as_slice())
    }

    fn check_dims(&self) -> Result<usize> {
        let k = self.reference_point.len();
        if self.entries.iter().any(|e| e.objectives.len() != k) {
            return Err(validation("front entries and reference point differ in dimension"));
        }
        Ok(k)
    }
}

/// Exact hypervolume for two objectives by a sweep over objective 1.
pub fn hypervolume_2d(front: &ParetoFront) -> Result<f64> {
    let k = front.check_dims()?;
    if k != 2 {
        return Err(validation(format!("hypervolume_2d needs K = 2, got {k}")));
    }
    let r = &front.reference_point;
    let mut pts: Vec<[f64; 2]> = front
        .objectives()
        .filter(|y| y[0] > r[0] && y[1] > r[1])
        .map(|y| [y[0], y[1]])
        .collect();
    pts.sort_by(|a, b| b[0].partial_cmp(&a[0]).unwrap_or(Ordering::Equal));
    let mut area = 0.0;
    let mut ceiling = r[1];
    for [y0, y1] in pts {
        if y1 > ceiling {
            area += (y0 - r[0]) * (y1 - ceiling);
            ceiling = y1;
        }
    }
    Ok(area)
}

/// Monte Carlo hypervolume estimate and its standard error, for any K.
pub fn hypervolume_mc_with_error<R: Rng + ?Sized>(
    front: &ParetoFront,
    samples: usize,
    rng: &mut R,
) -> Result<(f64, f64)> {
    let k = front.check_dims()?;
    if samples == 0 {
        return Err(validation("need at least one Monte Carlo sample"));
    }
    let r = &front.reference_point;
    let mut upper = r.clone();
    for y in front.objectives() {
        for (u, v) in upper.iter_mut().zip(y) {
            *u = u.max(*v);
        }
    }
    let volume: f64 = upper.iter().zip(r).map(|(u, l)| u - l).product();
    if !(volume > 0.0) {
        return Ok((0.0, 0.0));
    }
    let mut point = alloc::vec![0.0; k];
    let mut hits = 0usize;
    for _ in 0..samples {
        for ((p, lo), hi) in point.iter_mut().zip(r).zip(&upper) {
            *p = lo + (hi - lo) * rng.random::<f64>();
        }
        if front.objectives().any(|y| y.iter().zip(&point).all(|(a, b)| a >= b)) {
            hits += 1;
        }
    }
    let p = hits as f64 / samples as f64;
    let se = volume * libm::sqrt(p * (1.0 - p) / samples as f64);
    Ok((volume * p, se))
}

pub fn hypervolume_mc<R: Rng + ?Sized>(front: &ParetoFront, samples: usize, rng: &mut R) -> Result<f64> {
    hypervolume_mc_with_error(front, samples, rng).map(|(v, _)| v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use alloc::vec::Vec;

    fn obs(points: &[&[f64]]) -> Vec<(Configuration, ObjectiveVector)> {
        points
            .iter()
            .enumerate()
            .map(|(i, p)| (Configuration::new(vec![i as f64]), ObjectiveVector::new(p.to_vec())))
            .collect()
    }

    fn ov(v: &[f64]) -> ObjectiveVector {
        ObjectiveVector::new(v.to_vec())
    }

    #[test]
    fn domination_examples() {
        assert!(dominates(&ov(&[2.0, 2.0]), &ov(&[1.0, 1.0])).unwrap());
        assert!(!dominates(&ov(&[2.0, 1.0]), &ov(&[1.0, 2.0])).unwrap());
        assert!(!dominates(&ov(&[1.0, 2.0]), &ov(&[2.0, 1.0])).unwrap());
        assert!(!dominates(&ov(&[1.0, 1.0]), &ov(&[1.0, 1.0])).unwrap());
        assert!(dominates(&ov(&[1.0]), &ov(&[1.0, 1.0])).is_err());
    }

    #[test]
    fn front_examples() {
        assert_eq!(pareto_front(&obs(&[&[0.3, 0.4]]), &[0.0, 0.0]).len(), 1);
        let f = pareto_front(&obs(&[&[1.0, 0.0], &[0.0, 1.0], &[0.5, 0.5]]), &[0.0, 0.0]);
        assert_eq!(f.len(), 3);
        assert_eq!(f.entries[0].objectives.values, vec![1.0, 0.0]);
        assert_eq!(f.entries[2].objectives.values, vec![0.0, 1.0]);
        let f = pareto_front(&obs(&[&[1.0, 1.0], &[0.5, 0.5]]), &[0.0, 0.0]);
        assert_eq!(f.len(), 1);
        assert_eq!(f.entries[0].objectives.values, vec![1.0, 1.0]);
    }

    #[test]
    fn duplicates_keep_first_configuration() {
        let f = pareto_front(&obs(&[&[0.2, 0.9], &[0.5, 0.5], &[0.5, 0.5]]), &[0.0, 0.0]);
        assert_eq!(f.len(), 2);
        let dup = f.entries.iter().find(|e| e.objectives.values == vec![0.5, 0.5]).unwrap();
        assert_eq!(dup.configuration.values, vec![1.0]);
    }

    #[test]
    fn hypervolume_2d_examples() {
        let f = pareto_front(&obs(&[&[1.0, 1.0]]), &[0.0, 0.0]);
        assert_eq!(hypervolume_2d(&f).unwrap(), 1.0);
        let f = pareto_front(&obs(&[&[1.0, 0.5], &[0.5, 1.0]]), &[0.0, 0.0]);
        assert!((hypervolume_2d(&f).unwrap() - 0.75).abs() < 1e-15);
        let f = pareto_front(&obs(&[&[-1.0, 2.0]]), &[0.0, 0.0]);
        assert_eq!(hypervolume_2d(&f).unwrap(), 0.0);
        let f = pareto_front(&obs(&[&[1.0, 1.0, 1.0]]), &[0.0, 0.0, 0.0]);
        assert!(hypervolume_2d(&f).is_err());
    }

    #[test]
    fn monte_carlo_examples() {
        let mut rng = crate::rng::stream(1);
        let f = pareto_front(&obs(&[&[-1.0, -2.0]]), &[0.0, 0.0]);
        assert_eq!(hypervolume_mc(&f, 1000, &mut rng).unwrap(), 0.0);
        let f = pareto_front(&obs(&[&[1.0, 1.0, 1.0]]), &[0.0, 0.0, 0.0]);
        let (v, se) = hypervolume_mc_with_error(&f, 1000, &mut rng).unwrap();
        assert_eq!(v, 1.0);
        assert_eq!(se, 0.0);
    }
}
