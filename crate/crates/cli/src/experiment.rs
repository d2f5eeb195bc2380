//! Seeded multi-trial runs and their aggregation.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use swarmclust::ingest::{load_csv, normalize_minmax};
use swarmclust::{
    evaluate, run_algorithm, Algorithm, ClusteringResult, Dataset, MetricReport, MissingPolicy, RngSeed, Termination,
};

use crate::config::ExperimentConfig;
use crate::error::{CliError, Result};

/// The metrics reported per trial, in table column order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Intercluster,
    Intracluster,
    QuantizationError,
    FMeasure,
    Accuracy,
}

impl Metric {
    pub const ALL: [Metric; 5] = [
        Metric::Intercluster,
        Metric::Intracluster,
        Metric::QuantizationError,
        Metric::FMeasure,
        Metric::Accuracy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Intercluster => "intercluster",
            Metric::Intracluster => "intracluster",
            Metric::QuantizationError => "quantization_error",
            Metric::FMeasure => "f_measure",
            Metric::Accuracy => "accuracy",
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            Metric::Intercluster => "Inter Cluster Distance",
            Metric::Intracluster => "Intra Cluster Distance",
            Metric::QuantizationError => "Quantization Error",
            Metric::FMeasure => "F Measure",
            Metric::Accuracy => "Accuracy",
        }
    }

    pub fn of(self, report: &MetricReport) -> Option<f64> {
        match self {
            Metric::Intercluster => Some(report.intercluster),
            Metric::Intracluster => Some(report.intracluster),
            Metric::QuantizationError => Some(report.quantization_error),
            Metric::FMeasure => report.f_measure,
            Metric::Accuracy => report.accuracy,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub trial: usize,
    pub seed: RngSeed,
    pub metrics: MetricReport,
    pub cost: f64,
    pub iterations: usize,
    pub converged: bool,
    pub terminated_by: Option<Termination>,
    pub wall_clock_secs: f64,
}

/// Mean and sample standard deviation (N − 1 denominator) of one metric.
/// With a single trial the std is 0 by convention and `single_trial` is set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Summary {
    pub mean: f64,
    pub std: f64,
    pub single_trial: bool,
}

impl Summary {
    pub fn of(values: &[f64]) -> Option<Summary> {
        if values.is_empty() {
            return None;
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let std = if values.len() == 1 {
            0.0
        } else {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        };
        Some(Summary {
            mean,
            std,
            single_trial: values.len() == 1,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetInfo {
    pub name: String,
    pub n_clusters: usize,
    pub n_dims: usize,
    pub raw_points: usize,
    pub effective_points: usize,
    pub rows_with_missing: usize,
    pub imputed_cells: usize,
    pub policy: MissingPolicy,
    pub normalized: bool,
}

/// All trials of one algorithm on one dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialReport {
    pub dataset: DatasetInfo,
    pub algorithm: Algorithm,
    pub trials: Vec<TrialRecord>,
    /// Clustering of every trial, in trial order.
    pub results: Vec<ClusteringResult>,
}

impl TrialReport {
    pub fn values(&self, metric: Metric) -> Vec<f64> {
        self.trials.iter().filter_map(|t| metric.of(&t.metrics)).collect()
    }

    /// `None` when the metric is undefined (no labels).
    pub fn summary(&self, metric: Metric) -> Option<Summary> {
        Summary::of(&self.values(metric))
    }

    pub fn cost_summary(&self) -> Summary {
        let costs: Vec<f64> = self.trials.iter().map(|t| t.cost).collect();
        Summary::of(&costs).expect("at least one trial")
    }
}

/// A dataset as the experiment sees it, after cleaning and scaling.
#[derive(Debug, Clone, PartialEq)]
pub struct PreparedDataset {
    pub info: DatasetInfo,
    pub data: Dataset,
}

pub fn prepare_dataset(
    config: &ExperimentConfig,
    registry: &swarmclust::Registry,
    name: &str,
) -> Result<PreparedDataset> {
    let spec = registry
        .get(name)
        .ok_or_else(|| CliError::Config(format!("unknown dataset `{name}`")))?;
    let loaded = load_csv(spec, &config.data_dir, config.missing_policy)?;
    let data = if config.normalize {
        normalize_minmax(&loaded.dataset)
    } else {
        loaded.dataset.clone()
    };
    Ok(PreparedDataset {
        info: DatasetInfo {
            name: spec.name.clone(),
            n_clusters: spec.expected_clusters,
            n_dims: data.n_dims(),
            raw_points: loaded.raw_points,
            effective_points: loaded.effective_points(),
            rows_with_missing: loaded.rows_with_missing,
            imputed_cells: loaded.imputed_cells,
            policy: loaded.policy,
            normalized: config.normalize,
        },
        data,
    })
}

/// Runs every trial of one algorithm. Trials execute in parallel; records
/// are collected in trial order.
pub fn run_trials(config: &ExperimentConfig, prepared: &PreparedDataset, algorithm: Algorithm) -> Result<TrialReport> {
    let params = config.clustering_params(prepared.info.n_clusters)?;
    let outcomes: Vec<Result<(TrialRecord, ClusteringResult)>> = (0..config.trials)
        .into_par_iter()
        .map(|trial| {
            let seed = RngSeed::new(config.seed, trial as u64);
            let start = Instant::now();
            let result = run_algorithm(algorithm, &prepared.data, &params, seed)?;
            let wall_clock_secs = start.elapsed().as_secs_f64();
            let metrics = evaluate(&prepared.data, &result)?;
            let record = TrialRecord {
                trial,
                seed,
                metrics,
                cost: result.cost,
                iterations: result.iterations,
                converged: result.converged,
                terminated_by: result.terminated_by,
                wall_clock_secs,
            };
            Ok((record, result))
        })
        .collect();
    let mut trials = Vec::with_capacity(config.trials);
    let mut results = Vec::with_capacity(config.trials);
    for outcome in outcomes {
        let (record, result) = outcome?;
        trials.push(record);
        results.push(result);
    }
    Ok(TrialReport {
        dataset: prepared.info.clone(),
        algorithm,
        trials,
        results,
    })
}

/// Reports grouped by dataset, in config order.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetReports {
    pub info: DatasetInfo,
    /// The data the algorithms ran on.
    pub data: Dataset,
    pub reports: Vec<TrialReport>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExperimentOutcome {
    pub datasets: Vec<DatasetReports>,
    /// Datasets skipped because their file was absent.
    pub skipped: Vec<String>,
}

/// Runs every (dataset, algorithm) pair of the config.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutcome> {
    let registry = config.load_registry()?;
    config.validate(&registry)?;
    let mut outcome = ExperimentOutcome::default();
    for name in &config.datasets {
        let prepared = match prepare_dataset(config, &registry, name) {
            Ok(p) => p,
            Err(CliError::MissingData(_)) if config.skip_missing => {
                outcome.skipped.push(name.clone());
                continue;
            }
            Err(e) => return Err(e),
        };
        let reports = config
            .algorithms
            .iter()
            .map(|&a| run_trials(config, &prepared, a))
            .collect::<Result<Vec<_>>>()?;
        outcome.datasets.push(DatasetReports {
            info: prepared.info,
            data: prepared.data,
            reports,
        });
    }
    Ok(outcome)
}
