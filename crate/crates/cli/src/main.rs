use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};

use clap::{Args, Parser, Subcommand};
use swarmclust::Algorithm;
use swarmclust_cli::verify::verify_all;
use swarmclust_cli::{run_experiment, write_outputs, CliError, ExperimentConfig, Metric, Result};

#[derive(Parser)]
#[command(name = "bench", version, about = "Seeded clustering benchmark runner")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run an experiment and write tables, per-trial CSVs and figure data.
    Run(RunArgs),
    /// Manage the local dataset files.
    #[command(subcommand)]
    Datasets(DatasetsCmd),
}

#[derive(Args)]
struct RunArgs {
    /// Experiment config (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Restrict to these datasets (repeatable).
    #[arg(long = "dataset")]
    datasets: Vec<String>,
    /// Restrict to these algorithms (repeatable).
    #[arg(long = "algorithm")]
    algorithms: Vec<Algorithm>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    data_dir: Option<PathBuf>,
    /// Cluster on raw features.
    #[arg(long, conflicts_with = "normalize")]
    no_normalize: bool,
    /// Min-max scale features to [0, 1].
    #[arg(long)]
    normalize: bool,
    /// Skip datasets whose file is absent.
    #[arg(long)]
    skip_missing: bool,
}

#[derive(Subcommand)]
enum DatasetsCmd {
    /// Download the dataset files.
    Fetch {
        #[arg(long, default_value = "data")]
        data_dir: PathBuf,
    },
    /// Check checksums and shapes of the dataset files.
    Verify {
        #[arg(long, default_value = "data")]
        data_dir: PathBuf,
        /// Registry file; the built-in one by default.
        #[arg(long)]
        registry: Option<PathBuf>,
    },
}

fn run(args: RunArgs) -> Result<()> {
    let mut config = ExperimentConfig::from_file(&args.config)?;
    if !args.datasets.is_empty() {
        config.datasets = args.datasets;
    }
    if !args.algorithms.is_empty() {
        config.algorithms = args.algorithms;
    }
    if let Some(t) = args.trials {
        config.trials = t;
    }
    if let Some(s) = args.seed {
        config.seed = s;
    }
    if let Some(o) = args.out {
        config.out_dir = o;
    }
    if let Some(d) = args.data_dir {
        config.data_dir = d;
    }
    if args.no_normalize {
        config.normalize = false;
    }
    if args.normalize {
        config.normalize = true;
    }
    config.skip_missing |= args.skip_missing;

    let outcome = run_experiment(&config)?;
    for name in &outcome.skipped {
        eprintln!(
            "skipped `{name}`: data file missing; {}",
            swarmclust_cli::error::FETCH_HINT
        );
    }
    let written = write_outputs(&config, &outcome, &config.out_dir)?;
    for group in &outcome.datasets {
        println!(
            "{} (N={}, D={}, C={})",
            group.info.name, group.info.effective_points, group.info.n_dims, group.info.n_clusters
        );
        for r in &group.reports {
            let f = r
                .summary(Metric::FMeasure)
                .map_or("n/a".into(), |s| format!("{:.4}", s.mean));
            let a = r
                .summary(Metric::Accuracy)
                .map_or("n/a".into(), |s| format!("{:.4}", s.mean));
            let q = r
                .summary(Metric::QuantizationError)
                .map_or("n/a".into(), |s| format!("{:.4}", s.mean));
            println!("  {:<13} F {f}  accuracy {a}  QE {q}", r.algorithm.label());
        }
    }
    println!("wrote {} files to {}", written.len(), config.out_dir.display());
    Ok(())
}

fn fetch_script() -> PathBuf {
    let local = Path::new("scripts/fetch_datasets.py");
    if local.exists() {
        return local.to_path_buf();
    }
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scripts/fetch_datasets.py")
}

fn fetch(data_dir: &Path) -> Result<()> {
    let script = fetch_script();
    let status = Command::new("python3")
        .arg(&script)
        .arg("--data-dir")
        .arg(data_dir)
        .status()
        .map_err(|e| CliError::Runtime(format!("could not run {}: {e}", script.display())))?;
    match status.code() {
        Some(0) => Ok(()),
        Some(2) => Err(CliError::Runtime(format!(
            "{} could not obtain every dataset; files it did fetch are in {}",
            script.display(),
            data_dir.display()
        ))),
        _ => Err(CliError::Runtime(format!("{} failed ({status})", script.display()))),
    }
}

fn verify(data_dir: &Path, registry: Option<PathBuf>) -> Result<()> {
    let config = ExperimentConfig {
        registry,
        ..ExperimentConfig::default()
    };
    let results = verify_all(&config.load_registry()?, data_dir)?;
    for v in &results {
        println!("{v}");
    }
    if results.iter().any(|v| v.is_missing()) {
        let missing: Vec<&str> = results
            .iter()
            .filter(|v| v.is_missing())
            .map(|v| v.name.as_str())
            .collect();
        return Err(CliError::MissingData(format!(
            "{} not in {}",
            missing.join(", "),
            data_dir.display()
        )));
    }
    if results.iter().any(|v| !v.is_ok()) {
        return Err(CliError::Runtime("dataset verification failed".into()));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Cmd::Run(args) => run(args),
        Cmd::Datasets(DatasetsCmd::Fetch { data_dir }) => fetch(&data_dir),
        Cmd::Datasets(DatasetsCmd::Verify { data_dir, registry }) => verify(&data_dir, registry),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
