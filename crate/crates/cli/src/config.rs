//! Campaign configuration files.
//!
//! A campaign is a JSON object:
//!
//! ```json
//! {
//!   "master_seed": 0,
//!   "repetitions": 20,
//!   "output_dir": "out",
//!   "templates": [
//!     { "task": "object-push", "strategy": "bo" },
//!     { "task": "object-push", "strategy": "bo-prior", "prior": { "source": "task-operator" } }
//!   ]
//! }
//! ```
//!
//! Template fields other than `task` and `strategy` are optional and default
//! to the engine defaults; `beta` defaults to `doe_size`. Relative paths are
//! resolved against the directory holding the config file.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use priorbo_core::acquisition::CandidateSettings;
use priorbo_core::optimizer::{ExperimentSpec, Strategy};
use priorbo_core::param_space::{Configuration, ParameterSpace};
use priorbo_core::priors::{build_operator_prior, PriorDensity};
use priorbo_core::tasks::{Objective, TaskDefinition, TaskKind, OPERATOR_STDDEV_FRACTION};
use serde::Deserialize;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignConfig {
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default = "one")]
    pub repetitions: usize,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    pub templates: Vec<TemplateConfig>,
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TemplateConfig {
    pub task: TaskKind,
    pub strategy: Strategy,
    #[serde(default)]
    pub prior: Option<PriorSource>,
    /// Narrower bounds for the task's parameters.
    #[serde(default)]
    pub parameters: Option<ParameterSpace>,
    #[serde(default)]
    pub evals_per_config: Option<usize>,
    #[serde(default)]
    pub doe_size: Option<usize>,
    #[serde(default)]
    pub iterations: Option<usize>,
    #[serde(default)]
    pub beta: Option<f64>,
    #[serde(default)]
    pub nei_samples: Option<usize>,
    #[serde(default)]
    pub dirichlet_alpha: Option<f64>,
    #[serde(default)]
    pub reference_point: Option<Vec<f64>>,
    #[serde(default)]
    pub candidates: Option<CandidateSettings>,
}

fn operator_fraction() -> f64 {
    OPERATOR_STDDEV_FRACTION
}

/// Where a template's prior comes from.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "source", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PriorSource {
    /// The task's built-in operator prior.
    TaskOperator,
    /// The task's built-in misleading prior.
    TaskMisleading,
    /// Gaussian prior around `means` given in native units.
    Operator {
        means: Vec<f64>,
        #[serde(default = "operator_fraction")]
        stddev_fraction: f64,
    },
    /// A serialized prior, e.g. written by `transfer-prior`.
    File { path: PathBuf },
    Inline { density: PriorDensity },
}

/// A validated template: every run of it differs only in the seed.
#[derive(Debug, Clone)]
pub struct Template {
    pub name: String,
    pub spec: ExperimentSpec,
}

#[derive(Debug, Clone)]
pub struct Campaign {
    pub master_seed: u64,
    pub repetitions: usize,
    pub output_dir: Option<PathBuf>,
    pub templates: Vec<Template>,
}

impl Campaign {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        Self::parse(&text, base, &path.display().to_string())
    }

    /// Parses and validates config text; relative paths resolve against
    /// `base`. Errors start with `source`, plus `:line:column` for syntax
    /// errors.
    pub fn parse(text: &str, base: &Path, source: &str) -> CliResult<Self> {
        let config: CampaignConfig =
            serde_json::from_str(text).map_err(|e| CliError::usage(format!("{source}:{}", json_error(&e))))?;
        config.resolve(base).map_err(|msg| CliError::usage(format!("{source}: {msg}")))
    }
}

/// serde_json's message without its trailing position.
pub(crate) fn json_message(e: &serde_json::Error) -> String {
    let full = e.to_string();
    let suffix = format!(" at line {} column {}", e.line(), e.column());
    full.strip_suffix(&suffix).unwrap_or(&full).to_string()
}

/// `line:column: message`.
pub(crate) fn json_error(e: &serde_json::Error) -> String {
    format!("{}:{}: {}", e.line(), e.column(), json_message(e))
}

impl CampaignConfig {
    pub fn resolve(self, base: &Path) -> Result<Campaign, String> {
        if self.repetitions == 0 {
            return Err("repetitions must be at least 1".into());
        }
        if self.templates.is_empty() {
            return Err("no templates".into());
        }
        let mut names = BTreeSet::new();
        let mut templates = Vec::with_capacity(self.templates.len());
        for t in self.templates {
            let name = format!("{}-{}", t.task, t.strategy);
            if !names.insert(name.clone()) {
                return Err(format!("template {name}: duplicate task and strategy"));
            }
            let spec = t.into_spec(base).map_err(|e| format!("template {name}: {e}"))?;
            templates.push(Template { name, spec });
        }
        Ok(Campaign {
            master_seed: self.master_seed,
            repetitions: self.repetitions,
            output_dir: self.output_dir.map(|p| base.join(p)),
            templates,
        })
    }
}

impl TemplateConfig {
    fn into_spec(self, base: &Path) -> Result<ExperimentSpec, String> {
        let mut task = self.task.definition();
        if let Some(space) = self.parameters {
            task = task.with_space(space).map_err(|e| e.to_string())?;
        }
        if let Some(evals) = self.evals_per_config {
            task = task.with_evals_per_config(evals).map_err(|e| e.to_string())?;
        }
        let prior = match self.prior {
            None => None,
            Some(source) => {
                if !self.strategy.needs_prior() {
                    log::warn!("strategy {} ignores its prior", self.strategy);
                }
                Some(source.load(&task, base)?)
            }
        };
        let mut spec = ExperimentSpec::new(task, self.strategy);
        spec.prior = prior;
        if let Some(v) = self.doe_size {
            spec.doe_size = v;
            spec.beta = v as f64;
        }
        if let Some(v) = self.iterations {
            spec.iterations = v;
        }
        if let Some(v) = self.beta {
            spec.beta = v;
        }
        if let Some(v) = self.nei_samples {
            spec.nei_samples = v;
        }
        if let Some(v) = self.dirichlet_alpha {
            spec.dirichlet_alpha = v;
        }
        if let Some(v) = self.reference_point {
            spec.reference_point = v;
        }
        if let Some(v) = self.candidates {
            spec.candidates = v;
        }
        spec.validate_for(&spec.task).map_err(|e| e.to_string())?;
        Ok(spec)
    }
}

impl PriorSource {
    fn load(self, task: &TaskDefinition, base: &Path) -> Result<PriorDensity, String> {
        match self {
            Self::TaskOperator => task.operator_prior().map_err(|e| e.to_string()),
            Self::TaskMisleading => task.misleading_prior().map_err(|e| e.to_string()),
            Self::Operator { means, stddev_fraction } => {
                build_operator_prior(task.space(), &Configuration::new(means), stddev_fraction)
                    .map_err(|e| e.to_string())
            }
            Self::File { path } => {
                let path = base.join(path);
                read_prior(&path).map_err(|e| e.to_string())
            }
            Self::Inline { density } => Ok(density),
        }
    }
}

/// Reads a prior file as written by `transfer-prior`.
pub fn read_prior(path: &Path) -> CliResult<PriorDensity> {
    let text = fs::read_to_string(path).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::usage(format!("{}:{}", path.display(), json_error(&e))))
}
