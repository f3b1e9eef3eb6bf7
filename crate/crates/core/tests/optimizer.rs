use priorbo_core::acquisition::CandidateSettings;
use priorbo_core::optimizer::*;
use priorbo_core::priors::PriorDensity;
use priorbo_core::tasks::{Objective, TaskKind};
use proptest::prelude::{any, prop_assert, prop_assert_eq, proptest, ProptestConfig};

fn light(mut spec: ExperimentSpec) -> ExperimentSpec {
    spec.candidates = CandidateSettings { prior_samples: 32, uniform_samples: 32, local_samples: 8, local_sigma: 0.02 };
    spec.fit.restarts = 2;
    spec.fit.max_iterations = 15;
    spec.nei_samples = 4;
    spec
}

fn prior_for(strategy: Strategy, kind: TaskKind) -> Option<PriorDensity> {
    let t = kind.definition();
    match strategy {
        Strategy::BoMisleading => Some(t.misleading_prior().unwrap()),
        Strategy::BoKde => Some(
            priorbo_core::priors::build_kde_prior(&[t.operator_prior_means(), t.space().midpoint()], t.space())
                .unwrap(),
        ),
        _ => Some(t.operator_prior().unwrap()),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn every_strategy_stays_in_bounds_and_is_monotone(seed in any::<u64>(), s in 0usize..6, k in 0usize..3) {
        let strategy = Strategy::ALL[s];
        let kind = TaskKind::ALL[k];
        let mut spec = light(ExperimentSpec::new(kind.definition(), strategy).with_seed(seed).with_budget(3, 6));
        spec.prior = prior_for(strategy, kind);
        let r = run_experiment(&spec).unwrap();
        prop_assert_eq!(r.status, RunStatus::Completed);
        prop_assert_eq!(r.entries.len(), 6);
        for e in &r.entries {
            prop_assert!(spec.task.space().validate(&e.configuration).is_ok());
        }
        prop_assert!(r.curve().windows(2).all(|w| w[1] >= w[0]));
    }
}

#[test]
fn prior_sampling_with_a_uniform_prior_is_random_search() {
    for kind in TaskKind::ALL {
        let random = ExperimentSpec::new(kind.definition(), Strategy::RandomSearch).with_seed(4);
        let mut sampled = random.clone();
        sampled.strategy = Strategy::PriorSampling;
        sampled.prior = Some(PriorDensity::uniform(kind.definition().space().dim()).unwrap());
        assert_eq!(run_experiment(&random).unwrap().entries, run_experiment(&sampled).unwrap().entries);
    }
}

#[test]
fn records_serialize_and_repeat_exactly() {
    let spec = light(ExperimentSpec::new(TaskKind::PegInsertion.definition(), Strategy::BoPrior).with_budget(3, 5))
        .with_prior(TaskKind::PegInsertion.definition().operator_prior().unwrap());
    let a = serde_json::to_string(&run_experiment(&spec).unwrap()).unwrap();
    let b = serde_json::to_string(&run_experiment(&spec).unwrap()).unwrap();
    assert_eq!(a, b);
    let back: RunRecord = serde_json::from_str(&a).unwrap();
    assert_eq!(back.entries.len(), 5);
    assert_eq!(back.spec.task, spec.task.task_name());
}
