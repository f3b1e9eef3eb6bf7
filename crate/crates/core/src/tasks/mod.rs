//! Analytic benchmark tasks with two maximized objectives each.
//!
//! Every task maps a configuration in native units to the average of
//! `evals_per_config` randomized episodes. Episode `e` of an evaluation with
//! seed `s` draws its noise from `derived_stream(&[s, e])`, so evaluations are
//! pure functions of `(configuration, seed)`.

pub mod obstacle;
mod oracle;
pub mod peg;
pub mod push;

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{validation, Result};
use crate::param_space::{Configuration, Parameter, ParameterSpace};
use crate::pareto::ObjectiveVector;
use crate::priors::{build_operator_prior, PriorDensity};
use crate::rng::derived_stream;

pub use oracle::{oracle_front, suggest_reference_point, ORACLE_MAX_EVALUATIONS};

/// Default unit-cube standard deviation of operator priors.
pub const OPERATOR_STDDEV_FRACTION: f64 = 0.2;
/// Default unit-cube standard deviation of misleading priors.
pub const MISLEADING_STDDEV_FRACTION: f64 = 0.1;

#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeOutcome {
    pub objectives: ObjectiveVector,
    pub success: bool,
    pub diagnostics: BTreeMap<String, f64>,
}

/// A black-box multi-objective function over a parameter space.
pub trait Objective {
    fn task_name(&self) -> String;
    fn space(&self) -> &ParameterSpace;
    fn num_objectives(&self) -> usize;
    fn objective_names(&self) -> Vec<String>;
    /// Evaluates `c` (native units) with all randomness derived from `seed`.
    fn evaluate(&self, c: &Configuration, seed: u64) -> Result<ObjectiveVector>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TaskKind {
    PegInsertion,
    ObjectPush,
    ObstacleAvoidance,
}

impl TaskKind {
    pub const ALL: [TaskKind; 3] = [TaskKind::PegInsertion, TaskKind::ObjectPush, TaskKind::ObstacleAvoidance];

    pub fn name(self) -> &'static str {
        match self {
            TaskKind::PegInsertion => "peg-insertion",
            TaskKind::ObjectPush => "object-push",
            TaskKind::ObstacleAvoidance => "obstacle-avoidance",
        }
    }

    pub fn definition(self) -> TaskDefinition {
        TaskDefinition::new(self)
    }
}

impl fmt::Display for TaskKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TaskKind {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        TaskKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| validation(format!("unknown task {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TaskDefinition {
    kind: TaskKind,
    space: ParameterSpace,
    evals_per_config: usize,
}

fn native_space(kind: TaskKind) -> ParameterSpace {
    let params = match kind {
        TaskKind::PegInsertion => vec![
            Parameter::new("pitch", 0.001, 0.010, "m"),
            Parameter::new("r_max", 0.005, 0.040, "m"),
            Parameter::new("v_p", 0.01, 0.10, "m/s"),
            Parameter::new("force", 1.0, 20.0, "N"),
        ],
        TaskKind::ObjectPush => vec![
            Parameter::new("s_x", -0.05, 0.05, "m"),
            Parameter::new("s_y", -0.05, 0.05, "m"),
            Parameter::new("g_x", -0.05, 0.05, "m"),
            Parameter::new("g_y", -0.05, 0.05, "m"),
        ],
        TaskKind::ObstacleAvoidance => vec![
            Parameter::new("y1", 0.0, 0.6, "m"),
            Parameter::new("z1", 0.0, 0.5, "m"),
            Parameter::new("y2", 0.0, 0.6, "m"),
            Parameter::new("z2", 0.0, 0.5, "m"),
            Parameter::new("p1", 0.1, 0.5, "m"),
            Parameter::new("p2", 0.1, 0.6, "m"),
        ],
    };
    ParameterSpace::new(params).expect("built-in task spaces are valid")
}

impl TaskDefinition {
    pub fn new(kind: TaskKind) -> Self {
        let evals_per_config = match kind {
            TaskKind::ObstacleAvoidance => 1,
            _ => 7,
        };
        Self { kind, space: native_space(kind), evals_per_config }
    }

    /// Restricts the search to a subspace of the task's native box.
    pub fn with_space(mut self, space: ParameterSpace) -> Result<Self> {
        if !space.is_subspace_of(&native_space(self.kind)) {
            return Err(validation(format!("parameter space is not a subspace of the {} space", self.kind)));
        }
        self.space = space;
        Ok(self)
    }

    pub fn with_evals_per_config(mut self, evals: usize) -> Result<Self> {
        if evals == 0 {
            return Err(validation("evals_per_config must be at least 1"));
        }
        self.evals_per_config = evals;
        Ok(self)
    }

    pub fn kind(&self) -> TaskKind {
        self.kind
    }

    pub fn name(&self) -> &'static str {
        self.kind.name()
    }

    pub fn evals_per_config(&self) -> usize {
        self.evals_per_config
    }

    pub fn objective_name_pair(&self) -> [&'static str; 2] {
        match self.kind {
            TaskKind::PegInsertion | TaskKind::ObjectPush => ["performance", "impact"],
            TaskKind::ObstacleAvoidance => ["performance", "safety"],
        }
    }

    /// One randomized episode; `c` must already be validated.
    pub fn episode<R: Rng + ?Sized>(&self, c: &[f64], rng: &mut R) -> EpisodeOutcome {
        match self.kind {
            TaskKind::PegInsertion => peg::episode(&peg::SpiralParams::from_slice(c), &peg::PegNoise::draw(rng)),
            TaskKind::ObjectPush => push::episode(&push::PushParams::from_slice(c), &push::PushNoise::draw(rng)),
            TaskKind::ObstacleAvoidance => obstacle::episode(&obstacle::MotionParams::from_slice(c)),
        }
    }

    pub fn episodes(&self, c: &Configuration, seed: u64) -> Result<Vec<EpisodeOutcome>> {
        self.space.validate(c)?;
        Ok((0..self.evals_per_config)
            .map(|e| self.episode(&c.values, &mut derived_stream(&[seed, e as u64])))
            .collect())
    }

    /// Documented objective ranges, `(lower, upper)` per objective.
    pub fn objective_ranges(&self) -> [(f64, f64); 2] {
        match self.kind {
            TaskKind::PegInsertion => [(-1.0, 2.0), (-20.0 * peg::TIMEOUT, 0.0)],
            TaskKind::ObjectPush => [(-1.0, 2.0), (-5.0 * (1.0 + 2.0 * 0.06 / 0.05) * push::PUSH_DISTANCE, 0.0)],
            TaskKind::ObstacleAvoidance => [(-1.0, 2.0), (0.0, obstacle::SAFETY_CAP)],
        }
    }

    /// Hypervolume reference point, placed below the worst values seen on the
    /// grid-oracle front.
    pub fn default_reference_point(&self) -> Vec<f64> {
        match self.kind {
            TaskKind::PegInsertion => vec![-0.3, -10.0],
            TaskKind::ObjectPush => vec![-1.0, -1.5],
            TaskKind::ObstacleAvoidance => vec![1.5, 0.05],
        }
    }

    /// Where an operator would center a prior, in native units.
    pub fn operator_prior_means(&self) -> Configuration {
        let v = match self.kind {
            TaskKind::PegInsertion => vec![0.003, 0.03, 0.08, 3.0],
            TaskKind::ObjectPush => vec![0.0, 0.01, 0.0, 0.0],
            TaskKind::ObstacleAvoidance => vec![0.1, 0.4, 0.55, 0.4, 0.35, 0.45],
        };
        Configuration::new(v)
    }

    /// A deliberately poor prior center: the lower corner of the native box.
    pub fn misleading_prior_means(&self) -> Configuration {
        native_space(self.kind).lower_corner()
    }

    fn clamp_into_space(&self, c: &Configuration) -> Configuration {
        Configuration::new(
            c.values
                .iter()
                .zip(self.space.params())
                .map(|(v, p)| v.clamp(p.lower, p.upper))
                .collect(),
        )
    }

    pub fn operator_prior(&self) -> Result<PriorDensity> {
        build_operator_prior(&self.space, &self.clamp_into_space(&self.operator_prior_means()), OPERATOR_STDDEV_FRACTION)
    }

    pub fn misleading_prior(&self) -> Result<PriorDensity> {
        build_operator_prior(
            &self.space,
            &self.clamp_into_space(&self.misleading_prior_means()),
            MISLEADING_STDDEV_FRACTION,
        )
    }
}

fn average(outcomes: &[EpisodeOutcome]) -> ObjectiveVector {
    let k = outcomes[0].objectives.len();
    let n = outcomes.len() as f64;
    let mut sum = vec![0.0; k];
    for o in outcomes {
        for (s, v) in sum.iter_mut().zip(&o.objectives.values) {
            *s += v;
        }
    }
    ObjectiveVector::new(sum.into_iter().map(|s| s / n).collect())
}

impl Objective for TaskDefinition {
    fn task_name(&self) -> String {
        String::from(self.name())
    }

    fn space(&self) -> &ParameterSpace {
        &self.space
    }

    fn num_objectives(&self) -> usize {
        2
    }

    fn objective_names(&self) -> Vec<String> {
        self.objective_name_pair().iter().map(|s| String::from(*s)).collect()
    }

    fn evaluate(&self, c: &Configuration, seed: u64) -> Result<ObjectiveVector> {
        Ok(average(&self.episodes(c, seed)?))
    }
}

fn eval_with<R: Rng + ?Sized>(kind: TaskKind, c: &Configuration, rng: &mut R) -> Result<ObjectiveVector> {
    TaskDefinition::new(kind).evaluate(c, rng.next_u64())
}

pub fn eval_peg<R: Rng + ?Sized>(c: &Configuration, rng: &mut R) -> Result<ObjectiveVector> {
    eval_with(TaskKind::PegInsertion, c, rng)
}

pub fn eval_push<R: Rng + ?Sized>(c: &Configuration, rng: &mut R) -> Result<ObjectiveVector> {
    eval_with(TaskKind::ObjectPush, c, rng)
}

pub fn eval_obstacle<R: Rng + ?Sized>(c: &Configuration, rng: &mut R) -> Result<ObjectiveVector> {
    eval_with(TaskKind::ObstacleAvoidance, c, rng)
}
