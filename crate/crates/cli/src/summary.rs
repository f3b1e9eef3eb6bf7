//! Aggregation of run records into plot-ready tables.
//!
//! `curve.csv` has the fixed header `iteration,strategy,mean_hv,sem_hv`: per
//! strategy, the mean and standard error of the cumulative hypervolume after
//! each evaluation (1-based), over the records that reach that evaluation.
//!
//! `summary.csv` has the fixed header
//! `task,strategy,seed,final_hv,iters_to_threshold`: one row per record.
//! `iters_to_threshold` is the first evaluation whose cumulative
//! hypervolume reaches the threshold, empty if none does or no threshold was
//! given.

use std::collections::BTreeMap;

use priorbo_core::optimizer::Strategy;

use crate::error::{CliError, CliResult};
use crate::records::{csv_error, finish_csv, LabeledRecord};

#[derive(Debug, Clone, PartialEq)]
pub struct CurvePoint {
    pub iteration: usize,
    pub strategy: Strategy,
    pub mean_hv: f64,
    pub sem_hv: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub task: String,
    pub strategy: Strategy,
    pub seed: u64,
    pub final_hv: f64,
    pub iters_to_threshold: Option<usize>,
}

/// Mean and standard error of the mean; the error is zero for one sample.
pub fn mean_sem(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Curves of records from one task, strategy-major.
pub fn curves(records: &[&LabeledRecord]) -> Vec<CurvePoint> {
    let mut by_strategy: BTreeMap<Strategy, Vec<Vec<f64>>> = BTreeMap::new();
    for r in records {
        by_strategy.entry(r.record.spec.strategy).or_default().push(r.record.curve());
    }
    let mut out = Vec::new();
    for (strategy, runs) in by_strategy {
        let longest = runs.iter().map(Vec::len).max().unwrap_or(0);
        for i in 0..longest {
            let column: Vec<f64> = runs.iter().filter_map(|c| c.get(i).copied()).collect();
            let (mean_hv, sem_hv) = mean_sem(&column);
            out.push(CurvePoint { iteration: i + 1, strategy, mean_hv, sem_hv });
        }
    }
    out
}

pub fn summary_rows(records: &[LabeledRecord], threshold: Option<f64>) -> Vec<SummaryRow> {
    let mut rows: Vec<SummaryRow> = records
        .iter()
        .map(|r| SummaryRow {
            task: r.record.spec.task.clone(),
            strategy: r.record.spec.strategy,
            seed: r.record.spec.seed,
            final_hv: r.record.final_hypervolume(),
            iters_to_threshold: threshold.and_then(|t| r.record.iterations_to_reach(t)),
        })
        .collect();
    rows.sort_by(|a, b| (&a.task, a.strategy, a.seed).cmp(&(&b.task, b.strategy, b.seed)));
    rows
}

/// Splits records by task. More than one task is an error unless `by_task`.
pub fn group_by_task(records: &[LabeledRecord], by_task: bool) -> CliResult<BTreeMap<String, Vec<&LabeledRecord>>> {
    let mut groups: BTreeMap<String, Vec<&LabeledRecord>> = BTreeMap::new();
    for r in records {
        groups.entry(r.record.spec.task.clone()).or_default().push(r);
    }
    if groups.len() > 1 && !by_task {
        let names: Vec<&str> = groups.keys().map(String::as_str).collect();
        return Err(CliError::usage(format!(
            "records mix tasks ({}); pass --by-task to summarize each separately",
            names.join(", ")
        )));
    }
    Ok(groups)
}

pub fn curve_csv(points: &[CurvePoint]) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["iteration", "strategy", "mean_hv", "sem_hv"]).map_err(csv_error)?;
    for p in points {
        w.write_record([p.iteration.to_string(), p.strategy.to_string(), p.mean_hv.to_string(), p.sem_hv.to_string()])
            .map_err(csv_error)?;
    }
    finish_csv(w)
}

pub fn summary_csv(rows: &[SummaryRow]) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["task", "strategy", "seed", "final_hv", "iters_to_threshold"]).map_err(csv_error)?;
    for r in rows {
        w.write_record([
            r.task.clone(),
            r.strategy.to_string(),
            r.seed.to_string(),
            r.final_hv.to_string(),
            r.iters_to_threshold.map_or_else(String::new, |n| n.to_string()),
        ])
        .map_err(csv_error)?;
    }
    finish_csv(w)
}
