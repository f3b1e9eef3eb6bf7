//! The experiment engine: design of experiments followed by prior-weighted,
//! randomly scalarized noisy-EI Bayesian optimization.
//!
//! A run is a pure function of its [`ExperimentSpec`]. Randomness comes from
//! streams derived from `spec.seed`:
//!
//! * `[seed, DOE]` for the initial design (and, for the sampling baselines,
//!   for every later point as well),
//! * `[seed, BO, n, attempt]` for the `n`-th BO step,
//! * `[seed, EVAL, index]` as the evaluation seed of the `index`-th query.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::acquisition::{maximize_acquisition, sample_scalarization, AcquisitionContext, CandidateSettings};
use crate::error::{validation, Error, Result};
use crate::param_space::{Configuration, ParameterSpace};
use crate::pareto::{hypervolume_2d, hypervolume_mc, pareto_front, ObjectiveVector, ParetoFront};
use crate::priors::PriorDensity;
use crate::rng::{derive_seed, derived_stream, Stream};
use crate::surrogate::{FitOptions, GpModel};
use crate::tasks::{Objective, TaskDefinition};

const STREAM_DOE: u64 = 0x646f65;
const STREAM_BO: u64 = 0x626f;
const STREAM_EVAL: u64 = 0x6576616c;
const STREAM_HV: u64 = 0x6876;
/// Monte Carlo samples for cumulative hypervolume when K ≠ 2.
pub const HV_MC_SAMPLES: usize = 20_000;
/// Lower noise bound used when a BO step is retried.
pub const RETRY_NOISE_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    RandomSearch,
    PriorSampling,
    Bo,
    BoPrior,
    BoMisleading,
    BoKde,
}

impl Strategy {
    pub const ALL: [Strategy; 6] = [
        Strategy::RandomSearch,
        Strategy::PriorSampling,
        Strategy::Bo,
        Strategy::BoPrior,
        Strategy::BoMisleading,
        Strategy::BoKde,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::RandomSearch => "random-search",
            Strategy::PriorSampling => "prior-sampling",
            Strategy::Bo => "bo",
            Strategy::BoPrior => "bo-prior",
            Strategy::BoMisleading => "bo-misleading",
            Strategy::BoKde => "bo-kde",
        }
    }

    pub fn needs_prior(self) -> bool {
        !matches!(self, Strategy::RandomSearch | Strategy::Bo)
    }

    pub fn uses_surrogate(self) -> bool {
        !matches!(self, Strategy::RandomSearch | Strategy::PriorSampling)
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Strategy::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| validation(format!("unknown strategy {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Doe,
    Bo,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub task: TaskDefinition,
    pub strategy: Strategy,
    /// Required by strategies that use a prior; ignored by the others.
    pub prior: Option<PriorDensity>,
    pub doe_size: usize,
    /// Total number of evaluations, DoE included.
    pub iterations: usize,
    pub beta: f64,
    pub nei_samples: usize,
    pub dirichlet_alpha: f64,
    pub reference_point: Vec<f64>,
    pub seed: u64,
    pub candidates: CandidateSettings,
    pub fit: FitOptions,
}

impl ExperimentSpec {
    pub const DEFAULT_DOE_SIZE: usize = 10;
    pub const DEFAULT_ITERATIONS: usize = 60;
    pub const DEFAULT_NEI_SAMPLES: usize = 16;

    /// Defaults: 10 DoE points, 60 evaluations, β = DoE size, S = 16, α = 1,
    /// the task's default reference point, no prior.
    pub fn new(task: TaskDefinition, strategy: Strategy) -> Self {
        let reference_point = task.default_reference_point();
        Self {
            task,
            strategy,
            prior: None,
            doe_size: Self::DEFAULT_DOE_SIZE,
            iterations: Self::DEFAULT_ITERATIONS,
            beta: Self::DEFAULT_DOE_SIZE as f64,
            nei_samples: Self::DEFAULT_NEI_SAMPLES,
            dirichlet_alpha: 1.0,
            reference_point,
            seed: 0,
            candidates: CandidateSettings::default(),
            fit: FitOptions::default(),
        }
    }

    pub fn with_prior(mut self, prior: PriorDensity) -> Self {
        self.prior = Some(prior);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_budget(mut self, doe_size: usize, iterations: usize) -> Self {
        self.doe_size = doe_size;
        self.iterations = iterations;
        self
    }

    pub fn validate_for<O: Objective + ?Sized>(&self, objective: &O) -> Result<()> {
        if self.doe_size < 2 {
            return Err(validation("doe_size must be at least 2"));
        }
        if self.iterations < self.doe_size {
            return Err(validation("iterations must be at least doe_size"));
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(validation("beta must be finite and > 0"));
        }
        if self.nei_samples == 0 {
            return Err(validation("nei_samples must be at least 1"));
        }
        if !(self.dirichlet_alpha > 0.0 && self.dirichlet_alpha.is_finite()) {
            return Err(validation("dirichlet_alpha must be finite and > 0"));
        }
        if self.reference_point.len() != objective.num_objectives() {
            return Err(validation(format!(
                "reference point has {} components, task has {} objectives",
                self.reference_point.len(),
                objective.num_objectives()
            )));
        }
        if self.candidates.total() == 0 {
            return Err(validation("candidate set is empty"));
        }
        match (&self.prior, self.strategy.needs_prior()) {
            (None, true) => Err(validation(format!("strategy {} needs a prior", self.strategy))),
            (Some(p), true) if p.dim() != objective.space().dim() => Err(validation(format!(
                "prior has dimension {}, parameter space has {}",
                p.dim(),
                objective.space().dim()
            ))),
            _ => Ok(()),
        }
    }

    /// The density used for sampling and weighting: the given prior for
    /// prior-based strategies, uniform otherwise.
    pub fn effective_prior(&self, dim: usize) -> Result<PriorDensity> {
        match (&self.prior, self.strategy.needs_prior()) {
            (Some(p), true) => Ok(p.clone()),
            (None, true) => Err(validation(format!("strategy {} needs a prior", self.strategy))),
            _ => PriorDensity::uniform(dim),
        }
    }
}

/// One evaluated query.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    pub unit: Vec<f64>,
    pub configuration: Configuration,
    pub objectives: ObjectiveVector,
}

/// Evaluation seed of the `index`-th query of a run.
pub fn evaluation_seed(run_seed: u64, index: usize) -> u64 {
    derive_seed(&[run_seed, STREAM_EVAL, index as u64])
}

fn evaluate_unit<O: Objective + ?Sized>(objective: &O, unit: Vec<f64>, seed: u64) -> Result<Observation> {
    let configuration = objective.space().from_unit(&unit)?;
    let objectives = objective.evaluate(&configuration, seed)?;
    if objectives.len() != objective.num_objectives() || !objectives.is_finite() {
        return Err(validation(format!("objective returned {:?}", objectives.values)));
    }
    Ok(Observation { unit, configuration, objectives })
}

/// The initial design: `doe_size` draws from the effective prior (uniform for
/// strategies without a prior), each evaluated.
pub fn run_doe<O: Objective + ?Sized, R: Rng + ?Sized>(
    objective: &O,
    spec: &ExperimentSpec,
    rng: &mut R,
) -> Result<Vec<Observation>> {
    spec.validate_for(objective)?;
    let prior = spec.effective_prior(objective.space().dim())?;
    (0..spec.doe_size)
        .map(|i| evaluate_unit(objective, prior.sample_one(rng)?, evaluation_seed(spec.seed, i)))
        .collect()
}

/// What a BO step proposed, besides the observation itself.
#[derive(Debug, Clone, PartialEq)]
pub struct Proposal {
    pub observation: Observation,
    pub acquisition_value: f64,
    pub weights: Vec<f64>,
}

/// One BO iteration on top of `observations`: fit one GP per objective,
/// draw scalarization weights, maximize the prior-weighted scalarized NEI
/// and evaluate the winner.
pub fn bo_step<O: Objective + ?Sized, R: Rng + ?Sized>(
    objective: &O,
    spec: &ExperimentSpec,
    prior: &PriorDensity,
    observations: &[Observation],
    fit: &FitOptions,
    rng: &mut R,
) -> Result<Proposal> {
    if observations.len() < spec.doe_size {
        return Err(validation("BO step needs the full initial design"));
    }
    let iteration = observations.len() - spec.doe_size + 1;
    let x: Vec<Vec<f64>> = observations.iter().map(|o| o.unit.clone()).collect();
    let k = objective.num_objectives();
    let models = (0..k)
        .map(|j| {
            let y: Vec<f64> = observations.iter().map(|o| o.objectives.values[j]).collect();
            GpModel::fit_with(&x, &y, fit, rng)
        })
        .collect::<Result<Vec<_>>>()?;
    let weights = sample_scalarization(rng, k, spec.dirichlet_alpha)?;
    let ctx = AcquisitionContext {
        prior,
        weights: &weights,
        iteration,
        beta: spec.beta,
        nei_samples: spec.nei_samples,
        candidates: &spec.candidates,
    };
    let choice = maximize_acquisition(&models, &ctx, rng)?;
    let observation = evaluate_unit(objective, choice.point, evaluation_seed(spec.seed, observations.len()))?;
    Ok(Proposal { observation, acquisition_value: choice.value, weights: weights.as_slice().to_vec() })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunEntry {
    pub index: usize,
    pub phase: Phase,
    pub configuration: Configuration,
    pub objectives: ObjectiveVector,
    pub hypervolume: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub acquisition_value: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RunStatus {
    Completed,
    Failed,
}

/// A recoverable or fatal problem met during a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunEvent {
    pub index: usize,
    pub attempt: usize,
    pub message: String,
}

/// Serializable echo of the settings that produced a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpecEcho {
    pub task: String,
    pub strategy: Strategy,
    pub parameters: ParameterSpace,
    pub objectives: Vec<String>,
    pub prior: Option<PriorDensity>,
    pub doe_size: usize,
    pub iterations: usize,
    pub beta: f64,
    pub nei_samples: usize,
    pub dirichlet_alpha: f64,
    pub reference_point: Vec<f64>,
    pub seed: u64,
    pub candidates: CandidateSettings,
}

impl SpecEcho {
    fn new<O: Objective + ?Sized>(objective: &O, spec: &ExperimentSpec) -> Self {
        Self {
            task: objective.task_name(),
            strategy: spec.strategy,
            parameters: objective.space().clone(),
            objectives: objective.objective_names(),
            prior: if spec.strategy.needs_prior() { spec.prior.clone() } else { None },
            doe_size: spec.doe_size,
            iterations: spec.iterations,
            beta: spec.beta,
            nei_samples: spec.nei_samples,
            dirichlet_alpha: spec.dirichlet_alpha,
            reference_point: spec.reference_point.clone(),
            seed: spec.seed,
            candidates: spec.candidates.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub spec: SpecEcho,
    pub entries: Vec<RunEntry>,
    pub front: ParetoFront,
    pub status: RunStatus,
    pub events: Vec<RunEvent>,
}

impl RunRecord {
    pub fn final_hypervolume(&self) -> f64 {
        self.entries.last().map_or(0.0, |e| e.hypervolume)
    }

    /// Cumulative hypervolume after each evaluation.
    pub fn curve(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.hypervolume).collect()
    }

    /// First 1-based evaluation count at which the curve reaches `threshold`.
    pub fn iterations_to_reach(&self, threshold: f64) -> Option<usize> {
        self.entries.iter().position(|e| e.hypervolume >= threshold).map(|i| i + 1)
    }
}

/// Hypervolume of the front of `observations`: exact for K = 2, a fixed-stream
/// Monte Carlo estimate otherwise.
pub fn front_hypervolume(front: &ParetoFront, run_seed: u64) -> Result<f64> {
    if front.reference_point.len() == 2 {
        hypervolume_2d(front)
    } else {
        hypervolume_mc(front, HV_MC_SAMPLES, &mut derived_stream(&[run_seed, STREAM_HV]))
    }
}

/// Incremental run driver; [`run_experiment`] simply steps it to the end.
pub struct Run<'o, O: Objective + ?Sized> {
    objective: &'o O,
    spec: ExperimentSpec,
    prior: PriorDensity,
    sampler: Stream,
    observations: Vec<Observation>,
    entries: Vec<RunEntry>,
    events: Vec<RunEvent>,
    failed: bool,
}

impl<'o, O: Objective + ?Sized> Run<'o, O> {
    pub fn new(objective: &'o O, spec: ExperimentSpec) -> Result<Self> {
        spec.validate_for(objective)?;
        let prior = spec.effective_prior(objective.space().dim())?;
        let sampler = derived_stream(&[spec.seed, STREAM_DOE]);
        Ok(Self {
            objective,
            spec,
            prior,
            sampler,
            observations: Vec::new(),
            entries: Vec::new(),
            events: Vec::new(),
            failed: false,
        })
    }

    pub fn spec(&self) -> &ExperimentSpec {
        &self.spec
    }

    pub fn observations(&self) -> &[Observation] {
        &self.observations
    }

    pub fn entries(&self) -> &[RunEntry] {
        &self.entries
    }

    pub fn is_finished(&self) -> bool {
        self.failed || self.entries.len() >= self.spec.iterations
    }

    fn front(&self) -> ParetoFront {
        let obs: Vec<(Configuration, ObjectiveVector)> =
            self.observations.iter().map(|o| (o.configuration.clone(), o.objectives.clone())).collect();
        pareto_front(&obs, &self.spec.reference_point)
    }

    fn record(&mut self, proposal: Proposal, phase: Phase, from_bo: bool) -> Result<&RunEntry> {
        self.observations.push(proposal.observation.clone());
        let hv = front_hypervolume(&self.front(), self.spec.seed)?;
        let hv = self.entries.last().map_or(hv, |e| e.hypervolume.max(hv));
        self.entries.push(RunEntry {
            index: self.entries.len(),
            phase,
            configuration: proposal.observation.configuration,
            objectives: proposal.observation.objectives,
            hypervolume: hv,
            acquisition_value: from_bo.then_some(proposal.acquisition_value),
            weights: from_bo.then_some(proposal.weights),
        });
        Ok(self.entries.last().expect("just pushed"))
    }

    fn sample_next(&mut self) -> Result<Proposal> {
        let unit = self.prior.sample_one(&mut self.sampler)?;
        let observation = evaluate_unit(self.objective, unit, evaluation_seed(self.spec.seed, self.observations.len()))?;
        Ok(Proposal { observation, acquisition_value: 0.0, weights: Vec::new() })
    }

    fn bo_next(&mut self) -> Result<Proposal> {
        let n = (self.observations.len() - self.spec.doe_size + 1) as u64;
        let mut last_error = None;
        for attempt in 0..2usize {
            let mut fit = self.spec.fit.clone();
            if attempt > 0 {
                fit.noise_variance_range.0 = fit.noise_variance_range.0.max(RETRY_NOISE_FLOOR);
            }
            let mut rng = derived_stream(&[self.spec.seed, STREAM_BO, n, attempt as u64]);
            match bo_step(self.objective, &self.spec, &self.prior, &self.observations, &fit, &mut rng) {
                Ok(p) => return Ok(p),
                Err(e) => {
                    self.events.push(RunEvent {
                        index: self.observations.len(),
                        attempt,
                        message: e.to_string(),
                    });
                    last_error = Some(e);
                }
            }
        }
        Err(last_error.expect("two attempts were made"))
    }

    /// Performs the next evaluation. Returns `Ok(None)` once the run is over;
    /// an error marks the run failed and is also kept in its events.
    pub fn step(&mut self) -> Result<Option<&RunEntry>> {
        if self.is_finished() {
            return Ok(None);
        }
        let index = self.observations.len();
        let in_doe = index < self.spec.doe_size;
        let phase = if in_doe { Phase::Doe } else { Phase::Bo };
        let proposal = if in_doe || !self.spec.strategy.uses_surrogate() {
            self.sample_next().inspect_err(|e| {
                self.events.push(RunEvent { index, attempt: 0, message: e.to_string() });
            })
        } else {
            self.bo_next()
        };
        match proposal {
            Ok(p) => self.record(p, phase, !in_doe && self.spec.strategy.uses_surrogate()).map(Some),
            Err(e) => {
                self.failed = true;
                Err(e)
            }
        }
    }

    pub fn finish(self) -> RunRecord {
        let front = self.front();
        RunRecord {
            spec: SpecEcho::new(self.objective, &self.spec),
            entries: self.entries,
            front,
            status: if self.failed { RunStatus::Failed } else { RunStatus::Completed },
            events: self.events,
        }
    }
}

/// Runs `spec` against its own task.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<RunRecord> {
    run_experiment_with(&spec.task.clone(), spec)
}

/// Runs `spec` against an arbitrary objective; `spec.task` is not consulted.
/// Invalid specs are errors; failures during the run yield a truncated
/// record with status `Failed`.
pub fn run_experiment_with<O: Objective + ?Sized>(objective: &O, spec: &ExperimentSpec) -> Result<RunRecord> {
    let mut run = Run::new(objective, spec.clone())?;
    while !run.is_finished() {
        if run.step().is_err() {
            break;
        }
    }
    Ok(run.finish())
}
