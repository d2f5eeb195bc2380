use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use swarmclust::Algorithm;
use swarmclust_cli::{run_experiment, ExperimentConfig, Metric};

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

fn bench(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bench")).args(args).output().unwrap()
}

fn write_config(dir: &Path, extra: &str) -> PathBuf {
    let f = fixtures();
    let text = format!(
        "datasets = [\"blobs3d\"]\n\
         trials = 3\n\
         data_dir = {:?}\n\
         registry = {:?}\n\
         {extra}\n\
         [swarm]\n\
         max_iter = 30\n",
        f.display().to_string(),
        f.join("registry.toml").display().to_string(),
    );
    let path = dir.join("experiment.toml");
    fs::write(&path, text).unwrap();
    path
}

fn str_arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn run_writes_every_output() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path(), "");
    let out = tmp.path().join("out");
    let o = bench(&["run", "--config", str_arg(&config), "--out", str_arg(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    for a in Algorithm::ALL {
        let trials = fs::read_to_string(out.join(format!("blobs3d_{}_trials.csv", a.name()))).unwrap();
        assert_eq!(trials.lines().count(), 1 + 3);
        assert!(out
            .join(format!("figures/blobs3d_{}_scatter3d.jsonl", a.name()))
            .exists());
    }
    let table = fs::read_to_string(out.join("tables/blobs3d.md")).unwrap();
    assert_eq!(table.lines().filter(|l| l.starts_with("| ")).count(), 1 + 5);
    assert!(table.contains("| QPSO FCM |"));
    assert!(table.contains("Points: 45 of 45 file rows (1 with missing values"));
    let csv = fs::read_to_string(out.join("tables/blobs3d.csv")).unwrap();
    assert!(csv.starts_with("algorithm,intercluster,intracluster,quantization_error,f_measure,accuracy\n"));
    let timings = fs::read_to_string(out.join("timings.csv")).unwrap();
    assert_eq!(timings.lines().count(), 1 + 5 * 3);

    let echoed = ExperimentConfig::from_file(&out.join("config.toml")).unwrap();
    assert_eq!(echoed.trials, 3);
    assert_eq!(echoed.swarm.max_iter, 30);
    assert_eq!(echoed.swarm.swarm_size, 30);

    let bars = fs::read_to_string(out.join("figures/blobs3d_accuracy_bars.jsonl")).unwrap();
    assert_eq!(bars.lines().count(), 5);
    let convergence = fs::read_to_string(out.join("figures/blobs3d_convergence.jsonl")).unwrap();
    assert_eq!(convergence.lines().count(), 5 * 3);
    for line in convergence.lines() {
        let rec: serde_json::Value = serde_json::from_str(line).unwrap();
        let trace: Vec<f64> = rec["cost_trace"]
            .as_array()
            .unwrap()
            .iter()
            .map(|v| v.as_f64().unwrap())
            .collect();
        assert!(trace.windows(2).all(|w| w[1] <= w[0] + 1e-10), "{}", rec["algorithm"]);
    }
}

#[test]
fn flags_override_the_config() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path(), "normalize = true");
    let out = tmp.path().join("out");
    let o = bench(&[
        "run",
        "--config",
        str_arg(&config),
        "--out",
        str_arg(&out),
        "--algorithm",
        "fcm_qpso",
        "--algorithm",
        "kmeans",
        "--trials",
        "1",
        "--seed",
        "5",
        "--no-normalize",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let echoed = ExperimentConfig::from_file(&out.join("config.toml")).unwrap();
    assert_eq!(echoed.algorithms, vec![Algorithm::FcmQpso, Algorithm::KMeans]);
    assert_eq!((echoed.trials, echoed.seed, echoed.normalize), (1, 5, false));
    assert!(!out.join("blobs3d_pso_kmeans_trials.csv").exists());
    let table = fs::read_to_string(out.join("tables/blobs3d.md")).unwrap();
    assert!(table.contains("Single trial"));
    assert!(table.contains(", raw."));
}

#[test]
fn reruns_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path(), "");
    let out = tmp.path().join("out");
    let read_all = |dir: &Path| {
        let mut files: Vec<(PathBuf, Vec<u8>)> = Vec::new();
        for sub in [dir.to_path_buf(), dir.join("tables"), dir.join("figures")] {
            for e in fs::read_dir(sub).unwrap() {
                let p = e.unwrap().path();
                if p.is_file() && p.file_name().unwrap() != "timings.csv" {
                    files.push((p.clone(), fs::read(&p).unwrap()));
                }
            }
        }
        files.sort();
        files
    };
    assert!(bench(&["run", "--config", str_arg(&config), "--out", str_arg(&out)])
        .status
        .success());
    let first = read_all(&out);
    fs::remove_dir_all(&out).unwrap();
    assert!(bench(&["run", "--config", str_arg(&config), "--out", str_arg(&out)])
        .status
        .success());
    assert_eq!(first, read_all(&out));
}

#[test]
fn aggregates_match_per_trial_rows() {
    let tmp = tempfile::tempdir().unwrap();
    let mut config = ExperimentConfig::from_file(&write_config(tmp.path(), "")).unwrap();
    config.trials = 5;
    let outcome = run_experiment(&config).unwrap();
    let report = &outcome.datasets[0].reports[0];
    let csv = swarmclust_cli::output::emit_trials_csv(report);
    let header: Vec<&str> = csv.lines().next().unwrap().split(',').collect();
    for metric in Metric::ALL {
        let col = header.iter().position(|h| *h == metric.name()).unwrap();
        let values: Vec<f64> = csv
            .lines()
            .skip(1)
            .map(|l| l.split(',').nth(col).unwrap().parse().unwrap())
            .collect();
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let std = (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
        let s = report.summary(metric).unwrap();
        assert!((s.mean - mean).abs() <= 1e-12, "{}", metric.name());
        assert!((s.std - std).abs() <= 1e-12, "{}", metric.name());
    }
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();

    let bad = tmp.path().join("bad.toml");
    fs::write(&bad, "trials = 0\n").unwrap();
    assert_eq!(bench(&["run", "--config", str_arg(&bad)]).status.code(), Some(1));
    fs::write(&bad, "datasets = [\"nope\"]\n").unwrap();
    assert_eq!(bench(&["run", "--config", str_arg(&bad)]).status.code(), Some(1));
    let nonexistent = tmp.path().join("missing.toml");
    assert_eq!(
        bench(&["run", "--config", str_arg(&nonexistent)]).status.code(),
        Some(1)
    );

    let absent = write_config(tmp.path(), "");
    let text = fs::read_to_string(&absent)
        .unwrap()
        .replace("[\"blobs3d\"]", "[\"blobs3d\", \"absent\"]");
    fs::write(&absent, text).unwrap();
    let out = tmp.path().join("out");
    let o = bench(&["run", "--config", str_arg(&absent), "--out", str_arg(&out)]);
    assert_eq!(o.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&o.stderr);
    assert!(
        stderr.contains("absent.csv") && stderr.contains("fetch_datasets.py"),
        "{stderr}"
    );
    let o = bench(&[
        "run",
        "--config",
        str_arg(&absent),
        "--out",
        str_arg(&out),
        "--skip-missing",
    ]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("skipped `absent`"));

    let blocked = tmp.path().join("blocked");
    fs::write(&blocked, "a file, not a directory").unwrap();
    let config = write_config(tmp.path(), "");
    let o = bench(&["run", "--config", str_arg(&config), "--out", str_arg(&blocked)]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn verify_reports_checksums_and_shapes() {
    let f = fixtures();
    let o = bench(&[
        "datasets",
        "verify",
        "--data-dir",
        str_arg(&f),
        "--registry",
        str_arg(&f.join("registry.toml")),
    ]);
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert_eq!(o.status.code(), Some(2), "{stdout}");
    assert!(
        stdout.contains("blobs3d") && stdout.contains("sha256 unpinned"),
        "{stdout}"
    );
    assert!(stdout.contains("1 rows with missing values"), "{stdout}");
    assert!(stdout.contains("absent") && stdout.contains("MISSING"), "{stdout}");
}
