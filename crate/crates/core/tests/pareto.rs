use priorbo_core::param_space::Configuration;
use priorbo_core::pareto::*;
use priorbo_core::rng::stream;
use proptest::prelude::*;

/// Inclusion–exclusion over all non-empty subsets: the boxes `[r, y_p]`
/// intersect in `[r, min_p y_p]`.
fn inclusion_exclusion(points: &[Vec<f64>], r: &[f64]) -> f64 {
    let m = points.len();
    let mut total = 0.0;
    for mask in 1u32..(1 << m) {
        let mut corner: Vec<f64> = vec![f64::INFINITY; r.len()];
        for (p, point) in points.iter().enumerate() {
            if mask & (1 << p) != 0 {
                for (c, v) in corner.iter_mut().zip(point) {
                    *c = c.min(*v);
                }
            }
        }
        let volume: f64 = corner.iter().zip(r).map(|(c, l)| (c - l).max(0.0)).product();
        let sign = if mask.count_ones() % 2 == 1 { 1.0 } else { -1.0 };
        total += sign * volume;
    }
    total
}

fn observations(points: &[Vec<f64>]) -> Vec<(Configuration, ObjectiveVector)> {
    points
        .iter()
        .enumerate()
        .map(|(i, p)| (Configuration::new(vec![i as f64]), ObjectiveVector::new(p.clone())))
        .collect()
}

fn points(k: usize, max: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(-1.0f64..3.0, k), 1..=max)
}

proptest! {
    #[test]
    fn sweep_matches_inclusion_exclusion(pts in points(2, 10)) {
        let r = [0.0, 0.0];
        let front = pareto_front(&observations(&pts), &r);
        let exact = inclusion_exclusion(&pts, &r);
        prop_assert!((hypervolume_2d(&front).unwrap() - exact).abs() <= 1e-9);
    }

    #[test]
    fn front_is_mutually_non_dominated_and_covers_the_rest(pts in points(3, 12)) {
        let front = pareto_front(&observations(&pts), &[0.0; 3]);
        for a in &front.entries {
            for b in &front.entries {
                prop_assert!(!dominates(&a.objectives, &b.objectives).unwrap());
            }
        }
        for p in &pts {
            let v = ObjectiveVector::new(p.clone());
            let covered = front
                .entries
                .iter()
                .any(|e| e.objectives == v || dominates(&e.objectives, &v).unwrap());
            prop_assert!(covered);
        }
    }

    #[test]
    fn adding_a_point_never_lowers_hypervolume(pts in points(2, 9), extra in prop::collection::vec(-1.0f64..3.0, 2)) {
        let r = [0.0, 0.0];
        let before = hypervolume_2d(&pareto_front(&observations(&pts), &r)).unwrap();
        let mut more = pts.clone();
        more.push(extra);
        let after = hypervolume_2d(&pareto_front(&observations(&more), &r)).unwrap();
        prop_assert!(after >= before - 1e-12);
    }

    #[test]
    fn dominated_points_do_not_change_hypervolume(pts in points(2, 8), shrink in 0.0f64..1.0) {
        let r = [0.0, 0.0];
        let before = hypervolume_2d(&pareto_front(&observations(&pts), &r)).unwrap();
        let mut more = pts.clone();
        more.push(pts[0].iter().map(|v| v - shrink - 1e-3).collect());
        let after = hypervolume_2d(&pareto_front(&observations(&more), &r)).unwrap();
        prop_assert!((after - before).abs() <= 1e-12);
    }

    #[test]
    fn domination_is_irreflexive_and_antisymmetric(a in prop::collection::vec(-2.0f64..2.0, 3), b in prop::collection::vec(-2.0f64..2.0, 3)) {
        let (a, b) = (ObjectiveVector::new(a), ObjectiveVector::new(b));
        prop_assert!(!dominates(&a, &a).unwrap());
        prop_assert!(!(dominates(&a, &b).unwrap() && dominates(&b, &a).unwrap()));
    }
}

#[test]
fn monte_carlo_agrees_with_inclusion_exclusion_in_three_objectives() {
    let mut rng = stream(42);
    let pts = vec![vec![1.0, 0.2, 0.5], vec![0.3, 0.9, 0.4], vec![0.6, 0.6, 0.9], vec![0.1, 0.1, 1.0]];
    let r = [0.0; 3];
    let front = pareto_front(&observations(&pts), &r);
    let (estimate, se) = hypervolume_mc_with_error(&front, 100_000, &mut rng).unwrap();
    let exact = inclusion_exclusion(&pts, &r);
    assert!((estimate - exact).abs() <= 3.0 * se, "{estimate} vs {exact} (se {se})");
}

#[test]
fn fronts_serialize_round_trip() {
    let front = pareto_front(&observations(&[vec![1.0, 0.0], vec![0.0, 1.0]]), &[-1.0, -1.0]);
    let text = serde_json::to_string(&front).unwrap();
    assert_eq!(serde_json::from_str::<ParetoFront>(&text).unwrap(), front);
}
