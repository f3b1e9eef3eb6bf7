use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use priorbo_core::optimizer::{run_experiment, RunStatus, Strategy};
use priorbo_core::pareto::ParetoFront;
use priorbo_core::priors::{build_kde_prior, PriorDensity};
use priorbo_core::tasks::{oracle_front, suggest_reference_point, Objective, TaskKind};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::Campaign;
use crate::error::{CliError, CliResult};
use crate::records::{front_csv, write_atomic, LabeledRecord};
use crate::summary::{curve_csv, curves, group_by_task, summary_csv, summary_rows};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub config: PathBuf,
    /// Overrides the config's `output_dir`.
    pub out: Option<PathBuf>,
    pub jobs: usize,
    /// Overrides the config's `master_seed`.
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ManifestStatus {
    Completed,
    Failed,
    /// The run could not start; no record was written.
    Error,
}

#[derive(Debug, Clone, Serialize)]
pub struct ManifestRun {
    pub template: String,
    pub task: String,
    pub strategy: Strategy,
    pub repetition: usize,
    pub seed: u64,
    pub status: ManifestStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub record: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub front: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub final_hypervolume: Option<f64>,
    pub evaluations: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub wall_time_seconds: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub config: String,
    pub master_seed: u64,
    pub repetitions: usize,
    pub runs: Vec<ManifestRun>,
    pub wall_time_seconds: f64,
}

impl Manifest {
    pub fn all_completed(&self) -> bool {
        self.runs.iter().all(|r| r.status == ManifestStatus::Completed)
    }
}

pub fn record_file_name(template: &str, repetition: usize) -> String {
    format!("{template}-rep{repetition:02}.jsonl")
}

pub fn front_file_name(template: &str, repetition: usize) -> String {
    format!("{template}-rep{repetition:02}-front.csv")
}

/// Runs every template `repetitions` times with run seed
/// `master_seed + repetition`, writing records, fronts and a manifest.
/// Returns the manifest; a failed run turns into a runtime error after
/// everything else has been written.
pub fn cmd_run(opts: &RunOptions) -> CliResult<Manifest> {
    let campaign = Campaign::load(&opts.config)?;
    let out_dir = opts
        .out
        .clone()
        .or_else(|| campaign.output_dir.clone())
        .ok_or_else(|| CliError::usage("no output directory: pass --out or set output_dir"))?;
    let master_seed = opts.seed.unwrap_or(campaign.master_seed);
    std::fs::create_dir_all(&out_dir).map_err(|e| CliError::io(&out_dir, e))?;

    let jobs: Vec<(usize, usize)> = (0..campaign.repetitions)
        .flat_map(|rep| (0..campaign.templates.len()).map(move |t| (t, rep)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs.max(1))
        .build()
        .map_err(|e| CliError::runtime(format!("thread pool: {e}")))?;
    let start = Instant::now();
    let runs: Vec<ManifestRun> = pool.install(|| {
        jobs.par_iter()
            .map(|&(t, rep)| execute(&campaign, t, rep, master_seed, &out_dir))
            .collect::<CliResult<Vec<_>>>()
    })?;
    let manifest = Manifest {
        config: opts.config.display().to_string(),
        master_seed,
        repetitions: campaign.repetitions,
        runs,
        wall_time_seconds: start.elapsed().as_secs_f64(),
    };
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    write_atomic(&out_dir.join(MANIFEST_FILE), text.as_bytes())?;
    if !manifest.all_completed() {
        let failed = manifest.runs.iter().filter(|r| r.status != ManifestStatus::Completed).count();
        return Err(CliError::runtime(format!("{failed} of {} runs did not complete", manifest.runs.len())));
    }
    Ok(manifest)
}

fn execute(campaign: &Campaign, t: usize, rep: usize, master_seed: u64, out_dir: &Path) -> CliResult<ManifestRun> {
    let template = &campaign.templates[t];
    let seed = master_seed.wrapping_add(rep as u64);
    let spec = template.spec.clone().with_seed(seed);
    let start = Instant::now();
    let mut run = ManifestRun {
        template: template.name.clone(),
        task: spec.task.name().to_string(),
        strategy: spec.strategy,
        repetition: rep,
        seed,
        status: ManifestStatus::Error,
        record: None,
        front: None,
        final_hypervolume: None,
        evaluations: 0,
        error: None,
        wall_time_seconds: 0.0,
    };
    match run_experiment(&spec) {
        Ok(record) => {
            let labeled = LabeledRecord { template: template.name.clone(), repetition: rep, record };
            let record_name = record_file_name(&template.name, rep);
            let front_name = front_file_name(&template.name, rep);
            write_atomic(&out_dir.join(&record_name), labeled.to_jsonl().as_bytes())?;
            let r = &labeled.record;
            let csv = front_csv(&r.front, &spec.task.space().names().map(String::from).collect::<Vec<_>>(), &r.spec.objectives)?;
            write_atomic(&out_dir.join(&front_name), csv.as_bytes())?;
            run.status = match r.status {
                RunStatus::Completed => ManifestStatus::Completed,
                RunStatus::Failed => ManifestStatus::Failed,
            };
            run.error = r.events.last().filter(|_| r.status == RunStatus::Failed).map(|e| e.message.clone());
            run.record = Some(record_name);
            run.front = Some(front_name);
            run.final_hypervolume = Some(r.final_hypervolume());
            run.evaluations = r.entries.len();
        }
        Err(e) => run.error = Some(e.to_string()),
    }
    run.wall_time_seconds = start.elapsed().as_secs_f64();
    match run.status {
        ManifestStatus::Completed => log::info!(
            "{} rep {rep}: final hypervolume {:.6} in {:.1}s",
            run.template,
            run.final_hypervolume.unwrap_or(0.0),
            run.wall_time_seconds
        ),
        _ => log::error!("{} rep {rep}: {}", run.template, run.error.as_deref().unwrap_or("failed")),
    }
    Ok(run)
}

/// Expands glob patterns into a sorted, de-duplicated list of paths.
pub fn expand_globs(patterns: &[String]) -> CliResult<Vec<PathBuf>> {
    let mut paths = Vec::new();
    for p in patterns {
        let matches = glob::glob(p).map_err(|e| CliError::usage(format!("bad pattern {p}: {e}")))?;
        for m in matches {
            paths.push(m.map_err(|e| CliError::runtime(e.to_string()))?);
        }
    }
    paths.sort();
    paths.dedup();
    Ok(paths)
}

#[derive(Debug, Clone)]
pub struct SummarizeOptions {
    pub records: Vec<String>,
    pub out: PathBuf,
    pub threshold: Option<f64>,
    pub by_task: bool,
}

/// Writes `curve.csv` (or `curve-<task>.csv` per task with `by_task`) and
/// `summary.csv` into `opts.out`. Returns the written paths.
pub fn cmd_summarize(opts: &SummarizeOptions) -> CliResult<Vec<PathBuf>> {
    let paths = expand_globs(&opts.records)?;
    if paths.is_empty() {
        return Err(CliError::usage(format!("no record files match {}", opts.records.join(" "))));
    }
    let records = paths.iter().map(|p| LabeledRecord::read(p)).collect::<CliResult<Vec<_>>>()?;
    let groups = group_by_task(&records, opts.by_task)?;
    let mut written = Vec::new();
    for (task, group) in &groups {
        let name = if opts.by_task { format!("curve-{task}.csv") } else { "curve.csv".to_string() };
        let path = opts.out.join(name);
        write_atomic(&path, curve_csv(&curves(group))?.as_bytes())?;
        written.push(path);
    }
    let path = opts.out.join("summary.csv");
    write_atomic(&path, summary_csv(&summary_rows(&records, opts.threshold))?.as_bytes())?;
    written.push(path);
    Ok(written)
}

/// Builds a KDE prior from the final front of a record and writes it as JSON.
pub fn cmd_transfer_prior(record: &Path, out: &Path) -> CliResult<PriorDensity> {
    let labeled = LabeledRecord::read(record)?;
    let r = &labeled.record;
    if r.front.is_empty() {
        return Err(CliError::runtime(format!("{}: final front is empty", record.display())));
    }
    let configs: Vec<_> = r.front.entries.iter().map(|e| e.configuration.clone()).collect();
    let prior = build_kde_prior(&configs, &r.spec.parameters).map_err(|e| CliError::runtime(e.to_string()))?;
    let text = serde_json::to_string_pretty(&prior).expect("priors serialize");
    write_atomic(out, text.as_bytes())?;
    Ok(prior)
}

#[derive(Debug, Clone)]
pub struct OracleOptions {
    pub task: String,
    pub grid: usize,
    pub reps: usize,
    pub seed: u64,
    pub out: PathBuf,
}

/// Grid oracle front of a task, written as a front CSV. Returns the front and
/// the suggested reference point.
pub fn cmd_oracle(opts: &OracleOptions) -> CliResult<(ParetoFront, Vec<f64>)> {
    let kind = TaskKind::from_str(&opts.task).map_err(|e| CliError::usage(e.to_string()))?;
    let task = kind.definition();
    let front = oracle_front(&task, opts.grid, opts.reps, opts.seed, &task.default_reference_point())
        .map_err(|e| CliError::usage(e.to_string()))?;
    let reference = suggest_reference_point(&front).map_err(|e| CliError::runtime(e.to_string()))?;
    let names: Vec<String> = task.space().names().map(String::from).collect();
    write_atomic(&opts.out, front_csv(&front, &names, &task.objective_names())?.as_bytes())?;
    Ok((front, reference))
}
