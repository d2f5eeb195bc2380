//! Swarm-based clustering.
//!
//! * [`fcm`]: Fuzzy C-Means primitives and the alternating-update solver.
//! * [`kmeans`]: Lloyd's K-Means and the hard quantization-error cost.
//! * [`swarm`]: PSO and QPSO minimizers over bounded boxes.
//! * [`hybrid`]: FCM QPSO, QPSO K-Means and PSO K-Means clusterers.
//! * [`metrics`]: inter/intra-cluster distance, quantization error,
//!   F-measure and matched accuracy.
//! * [`ingest`]: dataset loading, missing values and normalization.

pub mod data;
pub mod error;
pub mod fcm;
pub mod hybrid;
pub mod ingest;
pub mod kmeans;
pub mod metrics;
pub mod swarm;

pub use data::{
    data_bounds, euclidean_distance, Assignment, Bounds, CentroidMatrix, Dataset, MembershipMatrix, RngSeed,
};
pub use error::{Error, Result};
pub use fcm::{FcmParams, FcmResult, Fuzzifier};
pub use hybrid::{run_algorithm, Algorithm, ClusteringParams, ClusteringResult, HardFitness};
pub use ingest::{DatasetSpec, LoadedDataset, MissingPolicy, Registry};
pub use kmeans::{KMeansParams, KMeansResult};
pub use metrics::{evaluate, MetricReport};
pub use swarm::{OptResult, SwarmConfig, Termination, Variant};
