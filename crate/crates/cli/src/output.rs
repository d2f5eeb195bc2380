//! Tables, per-trial CSVs and figure-data files.
//!
//! Everything written here is a pure function of the config, so reruns are
//! byte-identical. Wall-clock times are the exception and go to a separate
//! `timings.csv`.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde_json::json;
use swarmclust::{ClusteringResult, Dataset};

use crate::config::ExperimentConfig;
use crate::error::{CliError, Result};
use crate::experiment::{DatasetReports, ExperimentOutcome, Metric, Summary, TrialReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    Csv,
    Markdown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    AccuracyBars,
    ClusterScatter3d,
    Convergence,
}

impl PlotKind {
    pub fn name(self) -> &'static str {
        match self {
            PlotKind::AccuracyBars => "accuracy_bars",
            PlotKind::ClusterScatter3d => "cluster_scatter3d",
            PlotKind::Convergence => "convergence",
        }
    }
}

/// "mean±std" to four decimals, or "n/a" for an undefined metric.
pub fn format_cell(summary: Option<Summary>) -> String {
    match summary {
        Some(s) => format!("{:.4}±{:.4}", s.mean, s.std),
        None => "n/a".to_string(),
    }
}

/// One row per algorithm with the five metric columns.
pub fn emit_table(group: &DatasetReports, format: TableFormat) -> String {
    let rows: Vec<(String, Vec<String>)> = group
        .reports
        .iter()
        .map(|r| {
            let cells = Metric::ALL.iter().map(|&m| format_cell(r.summary(m))).collect();
            (r.algorithm.label().to_string(), cells)
        })
        .collect();
    let mut out = String::new();
    match format {
        TableFormat::Csv => {
            out.push_str("algorithm");
            for m in Metric::ALL {
                out.push(',');
                out.push_str(m.name());
            }
            out.push('\n');
            for (label, cells) in &rows {
                out.push_str(label);
                for c in cells {
                    out.push(',');
                    out.push_str(c);
                }
                out.push('\n');
            }
        }
        TableFormat::Markdown => {
            let info = &group.info;
            let _ = writeln!(out, "# {}\n", info.name);
            out.push_str("| Algorithm |");
            for m in Metric::ALL {
                let _ = write!(out, " {} |", m.title());
            }
            out.push_str("\n|---|");
            out.push_str(&"---|".repeat(Metric::ALL.len()));
            out.push('\n');
            for (label, cells) in &rows {
                let _ = writeln!(out, "| {label} | {} |", cells.join(" | "));
            }
            let trials = group.reports.first().map_or(0, |r| r.trials.len());
            let _ = writeln!(
                out,
                "\nPoints: {} of {} file rows ({} with missing values, policy `{}`, {} cells imputed). \
                 Features: {}{}. Clusters: {}. Trials: {}.",
                info.effective_points,
                info.raw_points,
                info.rows_with_missing,
                info.policy,
                info.imputed_cells,
                info.n_dims,
                if info.normalized { ", min-max scaled" } else { ", raw" },
                info.n_clusters,
                trials,
            );
            if trials == 1 {
                out.push_str("\nSingle trial: standard deviations are reported as 0.\n");
            }
        }
    }
    out
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Per-trial rows; every value is written at full precision.
pub fn emit_trials_csv(report: &TrialReport) -> String {
    let mut out = String::from(
        "trial,seed,stream,cost,iterations,converged,terminated_by,\
         intercluster,intracluster,quantization_error,f_measure,accuracy\n",
    );
    for t in &report.trials {
        let term = match t.terminated_by {
            Some(swarmclust::Termination::MaxIter) => "max_iter",
            Some(swarmclust::Termination::Stagnation) => "stagnation",
            None => "",
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            t.trial,
            t.seed.seed,
            t.seed.stream_id,
            t.cost,
            t.iterations,
            t.converged,
            term,
            t.metrics.intercluster,
            t.metrics.intracluster,
            t.metrics.quantization_error,
            opt(t.metrics.f_measure),
            opt(t.metrics.accuracy),
        );
    }
    out
}

fn lines(records: impl IntoIterator<Item = serde_json::Value>) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&r.to_string());
        out.push('\n');
    }
    out
}

/// Mean accuracy per algorithm; empty when the dataset has no labels.
pub fn accuracy_bars(group: &DatasetReports) -> String {
    lines(group.reports.iter().filter_map(|r| {
        r.summary(Metric::Accuracy).map(|s| {
            json!({
                "dataset": group.info.name,
                "algorithm": r.algorithm.name(),
                "label": r.algorithm.label(),
                "mean": s.mean,
                "std": s.std,
                "trials": r.trials.len(),
            })
        })
    }))
}

/// The first three attributes of every point with its cluster and class,
/// followed by the first three coordinates of every centre.
pub fn cluster_scatter3d(data: &Dataset, result: &ClusteringResult) -> Result<String> {
    if data.n_dims() < 3 {
        return Err(CliError::Runtime(format!(
            "cluster_scatter3d needs at least 3 attributes, `{}` has {}",
            data.name(),
            data.n_dims()
        )));
    }
    let clusters = result.assignment.as_slice();
    let labels = data.labels();
    let points = data.points().enumerate().map(|(j, p)| {
        json!({
            "kind": "point",
            "index": j,
            "x": p[0], "y": p[1], "z": p[2],
            "cluster": clusters[j],
            "class": labels.map(|l| l[j]),
        })
    });
    let centres = result.centroids.centres().enumerate().map(|(i, c)| {
        json!({
            "kind": "centre",
            "cluster": i,
            "x": c[0], "y": c[1], "z": c[2],
        })
    });
    let header = json!({
        "kind": "header",
        "dataset": data.name(),
        "algorithm": result.algorithm.name(),
        "seed": result.seed.seed,
        "stream": result.seed.stream_id,
        "attributes": [0, 1, 2],
    });
    Ok(lines(std::iter::once(header).chain(points).chain(centres)))
}

/// Cost trace of every trial of every algorithm.
pub fn convergence(group: &DatasetReports) -> String {
    lines(group.reports.iter().flat_map(|r| {
        r.results.iter().enumerate().map(move |(t, res)| {
            json!({
                "dataset": group.info.name,
                "algorithm": r.algorithm.name(),
                "trial": t,
                "cost_trace": res.cost_trace,
            })
        })
    }))
}

/// Figure data of one kind for one dataset, as `(file name, contents)`.
/// Scatter data is drawn from the first trial of each algorithm.
pub fn emit_plot_data(group: &DatasetReports, kind: PlotKind) -> Result<Vec<(String, String)>> {
    let name = &group.info.name;
    Ok(match kind {
        PlotKind::AccuracyBars => vec![(format!("{name}_accuracy_bars.jsonl"), accuracy_bars(group))],
        PlotKind::Convergence => vec![(format!("{name}_convergence.jsonl"), convergence(group))],
        PlotKind::ClusterScatter3d => group
            .reports
            .iter()
            .filter_map(|r| r.results.first().map(|res| (r, res)))
            .map(|(r, res)| {
                let body = cluster_scatter3d(&group.data, res)?;
                Ok((format!("{name}_{}_scatter3d.jsonl", r.algorithm.name()), body))
            })
            .collect::<Result<_>>()?,
    })
}

fn write(path: PathBuf, contents: &str, written: &mut Vec<PathBuf>) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(CliError::io(dir))?;
    }
    fs::write(&path, contents).map_err(CliError::io(&path))?;
    written.push(path);
    Ok(())
}

/// Writes every output file under `out_dir` and returns their paths.
pub fn write_outputs(config: &ExperimentConfig, outcome: &ExperimentOutcome, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    write(out_dir.join("config.toml"), &config.to_toml(), &mut written)?;
    let mut timings = String::from("dataset,algorithm,trial,wall_clock_secs\n");
    for group in &outcome.datasets {
        let name = &group.info.name;
        for r in &group.reports {
            let file = format!("{name}_{}_trials.csv", r.algorithm.name());
            write(out_dir.join(file), &emit_trials_csv(r), &mut written)?;
            for t in &r.trials {
                let _ = writeln!(
                    timings,
                    "{name},{},{},{}",
                    r.algorithm.name(),
                    t.trial,
                    t.wall_clock_secs
                );
            }
        }
        let tables = out_dir.join("tables");
        write(
            tables.join(format!("{name}.md")),
            &emit_table(group, TableFormat::Markdown),
            &mut written,
        )?;
        write(
            tables.join(format!("{name}.csv")),
            &emit_table(group, TableFormat::Csv),
            &mut written,
        )?;
        let mut kinds = vec![PlotKind::AccuracyBars, PlotKind::Convergence];
        if group.data.n_dims() >= 3 {
            kinds.push(PlotKind::ClusterScatter3d);
        }
        for kind in kinds {
            for (file, body) in emit_plot_data(group, kind)? {
                write(out_dir.join("figures").join(file), &body, &mut written)?;
            }
        }
    }
    write(out_dir.join("timings.csv"), &timings, &mut written)?;
    Ok(written)
}
