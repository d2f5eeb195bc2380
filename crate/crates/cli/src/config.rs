//! Experiment configuration, read from TOML. Every field has a default, so a
//! config file only needs the keys it changes.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use swarmclust::{Algorithm, ClusteringParams, Fuzzifier, HardFitness, MissingPolicy, Registry, SwarmConfig};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub datasets: Vec<String>,
    pub algorithms: Vec<Algorithm>,
    pub trials: usize,
    /// Trial `t` runs on stream `t` of this seed.
    pub seed: u64,
    /// Min-max scale every feature to [0, 1] before clustering.
    pub normalize: bool,
    pub missing_policy: MissingPolicy,
    pub data_dir: PathBuf,
    pub out_dir: PathBuf,
    /// Dataset registry file; the built-in registry when absent.
    pub registry: Option<PathBuf>,
    /// Skip datasets whose file is absent instead of failing.
    pub skip_missing: bool,
    pub fuzzifier: f64,
    /// Objective of the PSO and QPSO K-Means hybrids.
    pub hard_fitness: HardFitness,
    pub fcm_tol: f64,
    pub fcm_max_iter: usize,
    pub kmeans_max_iter: usize,
    pub swarm: SwarmConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let params = ClusteringParams::new(2);
        Self {
            datasets: Registry::builtin().names().map(str::to_string).collect(),
            algorithms: Algorithm::ALL.to_vec(),
            trials: 10,
            seed: 2017,
            normalize: false,
            missing_policy: MissingPolicy::default(),
            data_dir: PathBuf::from("data"),
            out_dir: PathBuf::from("results"),
            registry: None,
            skip_missing: false,
            fuzzifier: params.fuzzifier.value(),
            hard_fitness: params.hard_fitness,
            fcm_tol: params.fcm_tol,
            fcm_max_iter: params.fcm_max_iter,
            kmeans_max_iter: params.kmeans_max_iter,
            swarm: params.swarm,
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// The fully resolved config, defaults included.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn load_registry(&self) -> Result<Registry> {
        match &self.registry {
            Some(path) => Registry::from_file(path).map_err(|e| match e {
                swarmclust::Error::MissingFile(p) => CliError::Config(format!("registry {} not found", p.display())),
                other => other.into(),
            }),
            None => Ok(Registry::builtin()),
        }
    }

    pub fn validate(&self, registry: &Registry) -> Result<()> {
        let fail = |msg: String| Err(CliError::Config(msg));
        if self.trials < 1 {
            return fail("trials must be >= 1".into());
        }
        if self.datasets.is_empty() {
            return fail("no datasets selected".into());
        }
        if self.algorithms.is_empty() {
            return fail("no algorithms selected".into());
        }
        for name in &self.datasets {
            if registry.get(name).is_none() {
                let known: Vec<&str> = registry.names().collect();
                return fail(format!("unknown dataset `{name}` (known: {})", known.join(", ")));
            }
        }
        Fuzzifier::new(self.fuzzifier)?;
        if !(self.fcm_tol.is_finite() && self.fcm_tol >= 0.0) {
            return fail(format!("fcm_tol must be finite and >= 0, got {}", self.fcm_tol));
        }
        self.swarm.validate()?;
        Ok(())
    }

    pub fn clustering_params(&self, n_clusters: usize) -> Result<ClusteringParams> {
        Ok(ClusteringParams {
            n_clusters,
            fuzzifier: Fuzzifier::new(self.fuzzifier)?,
            swarm: self.swarm.clone(),
            hard_fitness: self.hard_fitness,
            fcm_tol: self.fcm_tol,
            fcm_max_iter: self.fcm_max_iter,
            kmeans_max_iter: self.kmeans_max_iter,
        })
    }
}
