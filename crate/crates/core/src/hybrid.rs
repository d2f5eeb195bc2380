//! Swarm clusterers. A particle is a whole C×D centroid matrix flattened
//! row-major; the swarm searches the data bounding box repeated C times.
//!
//! * FCM QPSO: QPSO minimizing the fuzzy objective, with memberships
//!   recomputed from the candidate centres at every evaluation.
//! * PSO / QPSO K-Means: PSO or QPSO minimizing a hard nearest-centre
//!   objective chosen by [`HardFitness`].
//!
//! [`Algorithm`] also wraps the plain K-Means and FCM baselines so every
//! method yields a [`ClusteringResult`].

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::data::{check_cluster_count, Assignment, CentroidMatrix, Dataset, MembershipMatrix, RngSeed};
use crate::error::{Error, Result};
use crate::fcm::{compute_membership, fuzzy_objective, run_fcm, FcmParams, Fuzzifier};
use crate::kmeans::{
    assign_nearest, distance_sum_flat, hard_cost_flat, run_kmeans, sse_flat, within_cluster_sse, KMeansParams,
};
use crate::swarm::{optimize, SwarmConfig, Termination, Variant};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    #[serde(rename = "kmeans")]
    KMeans,
    Fcm,
    #[serde(rename = "pso_kmeans")]
    PsoKMeans,
    #[serde(rename = "qpso_kmeans")]
    QpsoKMeans,
    FcmQpso,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::FcmQpso,
        Algorithm::QpsoKMeans,
        Algorithm::PsoKMeans,
        Algorithm::Fcm,
        Algorithm::KMeans,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::KMeans => "kmeans",
            Algorithm::Fcm => "fcm",
            Algorithm::PsoKMeans => "pso_kmeans",
            Algorithm::QpsoKMeans => "qpso_kmeans",
            Algorithm::FcmQpso => "fcm_qpso",
        }
    }

    /// Human-readable label for tables.
    pub fn label(self) -> &'static str {
        match self {
            Algorithm::KMeans => "K-Means",
            Algorithm::Fcm => "FCM",
            Algorithm::PsoKMeans => "PSO K-Means",
            Algorithm::QpsoKMeans => "QPSO K-Means",
            Algorithm::FcmQpso => "QPSO FCM",
        }
    }

    pub fn is_fuzzy(self) -> bool {
        matches!(self, Algorithm::Fcm | Algorithm::FcmQpso)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown algorithm `{s}`")))
    }
}

/// Objective minimized by the swarm K-Means hybrids. Every choice assigns
/// points to their nearest centre.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HardFitness {
    /// Σ_j min_i ‖y_j − x_i‖², the K-Means objective.
    Sse,
    /// Σ_j min_i ‖y_j − x_i‖, the intracluster distance.
    #[default]
    DistanceSum,
    /// [`hard_cost`]. Empty clusters contribute 0, so a swarm can lower it
    /// by parking centres away from the data.
    QuantizationError,
}

impl HardFitness {
    pub fn name(self) -> &'static str {
        match self {
            HardFitness::Sse => "sse",
            HardFitness::DistanceSum => "distance_sum",
            HardFitness::QuantizationError => "quantization_error",
        }
    }

    /// Cost of a flat row-major centre buffer.
    pub fn cost(self, centres: &[f64], data: &Dataset) -> f64 {
        match self {
            HardFitness::Sse => sse_flat(centres, data),
            HardFitness::DistanceSum => distance_sum_flat(centres, data),
            HardFitness::QuantizationError => hard_cost_flat(centres, data),
        }
    }
}

impl fmt::Display for HardFitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for HardFitness {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            HardFitness::Sse,
            HardFitness::DistanceSum,
            HardFitness::QuantizationError,
        ]
        .into_iter()
        .find(|f| f.name() == s)
        .ok_or_else(|| Error::InvalidConfig(format!("unknown hard fitness `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusteringParams {
    pub n_clusters: usize,
    pub fuzzifier: Fuzzifier,
    pub swarm: SwarmConfig,
    pub hard_fitness: HardFitness,
    pub fcm_tol: f64,
    pub fcm_max_iter: usize,
    pub kmeans_max_iter: usize,
}

impl ClusteringParams {
    pub fn new(n_clusters: usize) -> Self {
        let fcm = FcmParams::new(n_clusters);
        Self {
            n_clusters,
            fuzzifier: Fuzzifier::default(),
            swarm: SwarmConfig::default(),
            hard_fitness: HardFitness::default(),
            fcm_tol: fcm.tol,
            fcm_max_iter: fcm.max_iter,
            kmeans_max_iter: KMeansParams::new(n_clusters).max_iter,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusteringResult {
    pub algorithm: Algorithm,
    pub centroids: CentroidMatrix,
    pub assignment: Assignment,
    /// Present for the fuzzy methods.
    pub membership: Option<MembershipMatrix>,
    /// The algorithm's own objective at `centroids`.
    pub cost: f64,
    /// Objective history: global best per iteration for the swarm methods,
    /// the alternating-update objective for FCM and Lloyd's SSE for K-Means.
    pub cost_trace: Vec<f64>,
    pub iterations: usize,
    /// Swarm termination cause; `None` for the baselines.
    pub terminated_by: Option<Termination>,
    /// Baselines report whether they converged; swarm methods report `true`
    /// when they stopped on stagnation.
    pub converged: bool,
    pub seed: RngSeed,
}

/// Row-major flattening of a centroid matrix.
pub fn encode(centroids: &CentroidMatrix) -> Vec<f64> {
    centroids.as_slice().to_vec()
}

pub fn decode(position: &[f64], n_clusters: usize, n_dims: usize) -> Result<CentroidMatrix> {
    if position.len() != n_clusters * n_dims || n_clusters == 0 {
        return Err(Error::DimensionMismatch {
            expected: n_clusters * n_dims,
            got: position.len(),
        });
    }
    CentroidMatrix::new(position.to_vec(), n_dims)
}

/// Fuzzy objective of an encoded particle.
pub fn fcm_qpso_cost(position: &[f64], data: &Dataset, n_clusters: usize, m: Fuzzifier) -> Result<f64> {
    decode(position, n_clusters, data.n_dims())?;
    Ok(fuzzy_objective(position, data, m))
}

fn swarm_cluster(
    algorithm: Algorithm,
    data: &Dataset,
    params: &ClusteringParams,
    seed: RngSeed,
) -> Result<ClusteringResult> {
    let c = params.n_clusters;
    check_cluster_count(c, data.n_points())?;
    let bounds = data.bounds().repeat(c);
    let m = params.fuzzifier;
    let fitness = params.hard_fitness;
    let result = match algorithm {
        Algorithm::FcmQpso => optimize(
            |x| fuzzy_objective(x, data, m),
            &params.swarm,
            &bounds,
            Variant::Qpso,
            seed,
        )?,
        Algorithm::QpsoKMeans => optimize(|x| fitness.cost(x, data), &params.swarm, &bounds, Variant::Qpso, seed)?,
        Algorithm::PsoKMeans => optimize(|x| fitness.cost(x, data), &params.swarm, &bounds, Variant::Pso, seed)?,
        Algorithm::KMeans | Algorithm::Fcm => unreachable!("baselines are not swarm methods"),
    };
    let centroids = decode(&result.gbest_position, c, data.n_dims())?;
    let (membership, assignment) = if algorithm == Algorithm::FcmQpso {
        let mu = compute_membership(&centroids, data, m);
        let a = mu.argmax();
        (Some(mu), a)
    } else {
        (None, assign_nearest(data, &centroids))
    };
    Ok(ClusteringResult {
        algorithm,
        centroids,
        assignment,
        membership,
        cost: result.gbest_cost,
        cost_trace: result.cost_trace,
        iterations: result.iterations_run,
        converged: result.terminated_by == Termination::Stagnation,
        terminated_by: Some(result.terminated_by),
        seed,
    })
}

/// QPSO over centroid matrices minimizing the fuzzy objective.
pub fn run_fcm_qpso(data: &Dataset, params: &ClusteringParams, seed: RngSeed) -> Result<ClusteringResult> {
    swarm_cluster(Algorithm::FcmQpso, data, params, seed)
}

/// PSO over centroid matrices minimizing `params.hard_fitness`.
pub fn run_pso_kmeans(data: &Dataset, params: &ClusteringParams, seed: RngSeed) -> Result<ClusteringResult> {
    swarm_cluster(Algorithm::PsoKMeans, data, params, seed)
}

/// QPSO over centroid matrices minimizing `params.hard_fitness`.
pub fn run_qpso_kmeans(data: &Dataset, params: &ClusteringParams, seed: RngSeed) -> Result<ClusteringResult> {
    swarm_cluster(Algorithm::QpsoKMeans, data, params, seed)
}

/// Runs any of the five methods.
pub fn run_algorithm(
    algorithm: Algorithm,
    data: &Dataset,
    params: &ClusteringParams,
    seed: RngSeed,
) -> Result<ClusteringResult> {
    match algorithm {
        Algorithm::KMeans => {
            let kp = KMeansParams {
                n_clusters: params.n_clusters,
                max_iter: params.kmeans_max_iter,
            };
            let r = run_kmeans(data, &kp, seed)?;
            Ok(ClusteringResult {
                algorithm,
                cost: within_cluster_sse(data, &r.assignment, &r.centroids),
                centroids: r.centroids,
                assignment: r.assignment,
                membership: None,
                cost_trace: r.sse_trace,
                iterations: r.iterations,
                terminated_by: None,
                converged: r.converged,
                seed,
            })
        }
        Algorithm::Fcm => {
            let fp = FcmParams {
                n_clusters: params.n_clusters,
                fuzzifier: params.fuzzifier,
                tol: params.fcm_tol,
                max_iter: params.fcm_max_iter,
            };
            let r = run_fcm(data, &fp, seed)?;
            Ok(ClusteringResult {
                algorithm,
                assignment: r.membership.argmax(),
                centroids: r.centroids,
                membership: Some(r.membership),
                cost: r.cost,
                cost_trace: r.cost_trace,
                iterations: r.iterations,
                terminated_by: None,
                converged: r.converged,
                seed,
            })
        }
        _ => swarm_cluster(algorithm, data, params, seed),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn blobs() -> Dataset {
        Dataset::from_rows(
            "blobs",
            &[
                vec![0.0, 0.0],
                vec![0.05, 0.1],
                vec![0.1, 0.0],
                vec![0.9, 1.0],
                vec![1.0, 0.95],
                vec![0.95, 0.9],
            ],
            Some(vec![0, 0, 0, 1, 1, 1]),
        )
        .unwrap()
    }

    fn quick(c: usize) -> ClusteringParams {
        let mut p = ClusteringParams::new(c);
        p.swarm.max_iter = 60;
        p
    }

    #[test]
    fn encode_decode_examples() {
        let m = CentroidMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let flat = encode(&m);
        assert_eq!(flat, vec![1.0, 2.0, 3.0, 4.0]);
        assert_eq!(decode(&flat, 2, 2).unwrap(), m);
        let single = CentroidMatrix::new(vec![0.5, 0.25, 0.125], 3).unwrap();
        assert_eq!(encode(&single), vec![0.5, 0.25, 0.125]);
        assert!(decode(&flat, 3, 2).is_err());
    }

    #[test]
    fn perfect_fit_costs_zero() {
        let data = Dataset::new("crisp", vec![0.0, 0.0, 1.0, 1.0], 1, None).unwrap();
        let cost = fcm_qpso_cost(&[0.0, 1.0], &data, 2, Fuzzifier::default()).unwrap();
        assert_eq!(cost, 0.0);
    }

    #[test]
    fn fcm_qpso_cost_matches_naive_oracle() {
        let data = Dataset::from_rows(
            "n5",
            &[
                vec![0.1, 0.2],
                vec![0.4, 0.4],
                vec![0.9, 0.1],
                vec![0.3, 0.8],
                vec![0.6, 0.6],
            ],
            None,
        )
        .unwrap();
        let x = [0.2, 0.3, 0.7, 0.5];
        let naive = {
            let centres = [&x[..2], &x[2..]];
            let mut total = 0.0;
            for p in data.points() {
                let d: Vec<f64> = centres.iter().map(|c| crate::data::distance(c, p)).collect();
                for i in 0..2 {
                    let s: f64 = (0..2).map(|r| (d[i] / d[r]).powi(2)).sum();
                    let u = 1.0 / s;
                    total += u * u * d[i] * d[i];
                }
            }
            total
        };
        let got = fcm_qpso_cost(&x, &data, 2, Fuzzifier::default()).unwrap();
        assert!((got - naive).abs() < 1e-12, "{got} vs {naive}");
    }

    #[test]
    fn fcm_qpso_separates_blobs_and_is_deterministic() {
        let data = blobs();
        let a = run_fcm_qpso(&data, &quick(2), RngSeed::new(1, 0)).unwrap();
        let b = run_fcm_qpso(&data, &quick(2), RngSeed::new(1, 0)).unwrap();
        assert_eq!(a, b);
        let labels = a.assignment.as_slice();
        assert_eq!(labels[0], labels[1]);
        assert_eq!(labels[0], labels[2]);
        assert_ne!(labels[0], labels[3]);
        let mu = a.membership.as_ref().unwrap();
        for j in 0..data.n_points() {
            assert!((mu.column(j).iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
        let recomputed = fuzzy_objective(a.centroids.as_slice(), &data, Fuzzifier::default());
        assert!((recomputed - a.cost).abs() < 1e-12);
        assert!(a.cost_trace.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn fcm_qpso_matches_local_descent_on_blobs() {
        let data = blobs();
        let mut swarm = 0.0;
        let mut local = 0.0;
        for t in 0..10 {
            swarm += run_fcm_qpso(&data, &quick(2), RngSeed::new(5, t)).unwrap().cost;
            local += run_algorithm(Algorithm::Fcm, &data, &quick(2), RngSeed::new(5, t))
                .unwrap()
                .cost;
        }
        assert!(swarm <= local * (1.0 + 1e-3), "{swarm} vs {local}");
    }

    #[test]
    fn kmeans_hybrids_on_tight_blob() {
        let data = Dataset::from_rows(
            "tight",
            &[
                vec![0.50, 0.50],
                vec![0.51, 0.50],
                vec![0.50, 0.51],
                vec![0.49, 0.50],
                vec![0.50, 0.49],
            ],
            None,
        )
        .unwrap();
        let radius = 0.01;
        for fitness in [
            HardFitness::Sse,
            HardFitness::DistanceSum,
            HardFitness::QuantizationError,
        ] {
            let mut params = quick(2);
            params.hard_fitness = fitness;
            for f in [run_pso_kmeans, run_qpso_kmeans] {
                let r = f(&data, &params, RngSeed::new(2, 0)).unwrap();
                let qe = crate::kmeans::hard_cost(&data, &r.centroids);
                assert!(qe < radius, "{fitness}: {qe}");
                assert!((fitness.cost(r.centroids.as_slice(), &data) - r.cost).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn hard_fitness_names_round_trip() {
        for f in [
            HardFitness::Sse,
            HardFitness::DistanceSum,
            HardFitness::QuantizationError,
        ] {
            assert_eq!(f.name().parse::<HardFitness>().unwrap(), f);
        }
        assert!("sum".parse::<HardFitness>().is_err());
    }

    #[test]
    fn identical_points_cost_zero() {
        let data = Dataset::new("same", vec![0.3; 8], 2, None).unwrap();
        for f in [run_pso_kmeans, run_qpso_kmeans] {
            assert_eq!(f(&data, &quick(2), RngSeed::new(0, 0)).unwrap().cost, 0.0);
        }
    }

    #[test]
    fn algorithm_names_round_trip() {
        for a in Algorithm::ALL {
            assert_eq!(a.name().parse::<Algorithm>().unwrap(), a);
        }
        assert!("pso_fcm".parse::<Algorithm>().is_err());
    }

    #[test]
    fn invalid_cluster_counts_are_rejected() {
        let data = blobs();
        for a in Algorithm::ALL {
            assert!(run_algorithm(a, &data, &quick(1), RngSeed::new(0, 0)).is_err());
            assert!(run_algorithm(a, &data, &quick(6), RngSeed::new(0, 0)).is_err());
        }
    }

    proptest! {
        #[test]
        fn encode_decode_round_trip(values in prop::collection::vec(-1e6f64..1e6, 12)) {
            let m = CentroidMatrix::new(values.clone(), 4).unwrap();
            let back = decode(&encode(&m), 3, 4).unwrap();
            prop_assert_eq!(back.as_slice(), values.as_slice());
        }

        #[test]
        fn row_permutation_leaves_costs_unchanged(
            pts in prop::collection::vec(0.0f64..1.0, 8..=24),
            x in prop::collection::vec(0.0f64..1.0, 6),
        ) {
            let n = pts.len() / 2 * 2;
            let data = Dataset::new("p", pts[..n].to_vec(), 2, None).unwrap();
            let swapped: Vec<f64> = [&x[4..6], &x[0..2], &x[2..4]].concat();
            let m = Fuzzifier::default();
            let a = fcm_qpso_cost(&x, &data, 3, m).unwrap();
            let b = fcm_qpso_cost(&swapped, &data, 3, m).unwrap();
            prop_assert!((a - b).abs() <= 1e-12 * a.max(1.0));
            let ha = hard_cost_flat(&x, &data);
            let hb = hard_cost_flat(&swapped, &data);
            prop_assert!((ha - hb).abs() <= 1e-12);
        }
    }
}
