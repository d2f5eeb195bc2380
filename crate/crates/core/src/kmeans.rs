//! Lloyd's K-Means and the hard-clustering cost used as the fitness of the
//! swarm K-Means hybrids.

use crate::data::{
    check_cluster_count, distance, squared_distance, uniform_centres, Assignment, CentroidMatrix, Dataset, RngSeed,
};
use crate::error::Result;

#[inline]
fn nearest(point: &[f64], centres: &[f64], n_dims: usize) -> (usize, f64) {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (i, c) in centres.chunks_exact(n_dims).enumerate() {
        let d = squared_distance(point, c);
        if d < best_d {
            best = i;
            best_d = d;
        }
    }
    (best, best_d)
}

/// Maps each point to its nearest centre; ties go to the lowest index.
pub fn assign_nearest(data: &Dataset, centroids: &CentroidMatrix) -> Assignment {
    let cluster_of = data
        .points()
        .map(|p| nearest(p, centroids.as_slice(), data.n_dims()).0)
        .collect();
    Assignment::new(cluster_of, centroids.n_clusters()).expect("indices come from the centroid matrix")
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeansUpdate {
    pub centroids: CentroidMatrix,
    /// Clusters that were empty and got reseeded.
    pub reseeded: Vec<usize>,
}

/// Arithmetic mean of each cluster's members.
///
/// An empty cluster is moved onto the point farthest from its nearest
/// occupied centre (lowest point index on ties). Several empty clusters are
/// reseeded in index order, each seeing the centres placed before it.
pub fn recompute_means(data: &Dataset, assignment: &Assignment, n_clusters: usize) -> MeansUpdate {
    let n_dims = data.n_dims();
    let mut sums = vec![0.0; n_clusters * n_dims];
    let mut counts = vec![0usize; n_clusters];
    for (p, &c) in data.points().zip(assignment.as_slice()) {
        counts[c] += 1;
        for (s, v) in sums[c * n_dims..(c + 1) * n_dims].iter_mut().zip(p) {
            *s += v;
        }
    }
    for (c, &count) in counts.iter().enumerate() {
        if count > 0 {
            for s in &mut sums[c * n_dims..(c + 1) * n_dims] {
                *s /= count as f64;
            }
        }
    }

    let mut reseeded = Vec::new();
    let mut placed: Vec<usize> = (0..n_clusters).filter(|&c| counts[c] > 0).collect();
    for c in 0..n_clusters {
        if counts[c] > 0 {
            continue;
        }
        let mut far = 0;
        let mut far_d = f64::NEG_INFINITY;
        for (j, p) in data.points().enumerate() {
            let d = placed
                .iter()
                .map(|&k| squared_distance(p, &sums[k * n_dims..(k + 1) * n_dims]))
                .fold(f64::INFINITY, f64::min);
            if d > far_d {
                far = j;
                far_d = d;
            }
        }
        sums[c * n_dims..(c + 1) * n_dims].copy_from_slice(data.point(far));
        placed.push(c);
        reseeded.push(c);
    }

    MeansUpdate {
        centroids: CentroidMatrix::new(sums, n_dims).expect("shape derived from data"),
        reseeded,
    }
}

/// Quantization error of the nearest-centre partition: per-cluster mean
/// point-to-centre distance, averaged over all C clusters. Empty clusters
/// contribute 0 but still count in the divisor.
pub fn hard_cost(data: &Dataset, centroids: &CentroidMatrix) -> f64 {
    hard_cost_flat(centroids.as_slice(), data)
}

/// [`hard_cost`] on a flat row-major centre buffer.
pub fn hard_cost_flat(centres: &[f64], data: &Dataset) -> f64 {
    let n_dims = data.n_dims();
    let n_clusters = centres.len() / n_dims;
    let mut sums = vec![0.0; n_clusters];
    let mut counts = vec![0usize; n_clusters];
    for p in data.points() {
        let (c, d2) = nearest(p, centres, n_dims);
        sums[c] += d2.sqrt();
        counts[c] += 1;
    }
    let total: f64 = sums
        .iter()
        .zip(&counts)
        .filter(|(_, &n)| n > 0)
        .map(|(s, &n)| s / n as f64)
        .sum();
    total / n_clusters as f64
}

/// Σ_j min_i ‖y_j − x_i‖² of a flat row-major centre buffer.
pub fn sse_flat(centres: &[f64], data: &Dataset) -> f64 {
    let n_dims = data.n_dims();
    data.points().map(|p| nearest(p, centres, n_dims).1).sum()
}

/// Σ_j min_i ‖y_j − x_i‖ of a flat row-major centre buffer.
pub fn distance_sum_flat(centres: &[f64], data: &Dataset) -> f64 {
    let n_dims = data.n_dims();
    data.points().map(|p| nearest(p, centres, n_dims).1.sqrt()).sum()
}

/// Lloyd's objective: Σ ‖y_j − x_{c(j)}‖².
pub fn within_cluster_sse(data: &Dataset, assignment: &Assignment, centroids: &CentroidMatrix) -> f64 {
    data.points()
        .zip(assignment.as_slice())
        .map(|(p, &c)| squared_distance(p, centroids.centre(c)))
        .sum()
}

/// Sum of point-to-assigned-centre distances (not squared).
pub(crate) fn assigned_distance_sum(data: &Dataset, assignment: &Assignment, centroids: &CentroidMatrix) -> f64 {
    data.points()
        .zip(assignment.as_slice())
        .map(|(p, &c)| distance(p, centroids.centre(c)))
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KMeansParams {
    pub n_clusters: usize,
    pub max_iter: usize,
}

impl KMeansParams {
    pub fn new(n_clusters: usize) -> Self {
        Self {
            n_clusters,
            max_iter: 300,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansResult {
    pub centroids: CentroidMatrix,
    pub assignment: Assignment,
    /// [`hard_cost`] at the final centroids.
    pub cost: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Lloyd objective after the initial assignment and after every iteration.
    pub sse_trace: Vec<f64>,
    pub reseeded: usize,
}

/// Lloyd iterations from centres drawn uniformly inside the data bounding
/// box, until the assignment stops changing or `max_iter` is reached.
pub fn run_kmeans(data: &Dataset, params: &KMeansParams, seed: RngSeed) -> Result<KMeansResult> {
    check_cluster_count(params.n_clusters, data.n_points())?;
    let mut rng = seed.rng();
    let mut centroids = uniform_centres(&data.bounds(), params.n_clusters, &mut rng);
    let mut assignment = assign_nearest(data, &centroids);
    let mut sse_trace = vec![within_cluster_sse(data, &assignment, &centroids)];
    let mut converged = false;
    let mut iterations = 0;
    let mut reseeded = 0;

    while iterations < params.max_iter {
        let update = recompute_means(data, &assignment, params.n_clusters);
        reseeded += update.reseeded.len();
        centroids = update.centroids;
        let next = assign_nearest(data, &centroids);
        iterations += 1;
        sse_trace.push(within_cluster_sse(data, &next, &centroids));
        let unchanged = next == assignment;
        assignment = next;
        if unchanged {
            converged = true;
            break;
        }
    }

    Ok(KMeansResult {
        cost: hard_cost(data, &centroids),
        centroids,
        assignment,
        iterations,
        converged,
        sse_trace,
        reseeded,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn line(points: &[f64]) -> Dataset {
        Dataset::new("line", points.to_vec(), 1, None).unwrap()
    }

    fn centres(values: &[f64]) -> CentroidMatrix {
        CentroidMatrix::new(values.to_vec(), 1).unwrap()
    }

    #[test]
    fn assignment_examples() {
        let c = centres(&[0.0, 1.0]);
        assert_eq!(assign_nearest(&line(&[0.4, 0.9]), &c).as_slice(), &[0, 1]);
        assert_eq!(assign_nearest(&line(&[0.5, 0.5]), &c).as_slice(), &[0, 0]);
    }

    #[test]
    fn assignment_matches_exhaustive_check() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let pts: Vec<f64> = (0..20).map(|_| rng.random::<f64>()).collect();
        let data = Dataset::new("r", pts, 2, None).unwrap();
        let c = CentroidMatrix::new((0..6).map(|_| rng.random::<f64>()).collect(), 2).unwrap();
        let a = assign_nearest(&data, &c);
        for (j, p) in data.points().enumerate() {
            let dists: Vec<f64> = c.centres().map(|x| crate::data::distance(p, x)).collect();
            let assigned = dists[a.as_slice()[j]];
            assert!(dists.iter().all(|&d| assigned <= d));
        }
    }

    #[test]
    fn means_examples() {
        let data = line(&[0.0, 2.0, 7.0]);
        let a = Assignment::new(vec![0, 0, 1], 2).unwrap();
        let up = recompute_means(&data, &a, 2);
        assert_eq!(up.centroids.as_slice(), &[1.0, 7.0]);
        assert!(up.reseeded.is_empty());
    }

    #[test]
    fn empty_cluster_goes_to_farthest_point() {
        let data = line(&[0.0, 0.2, 1.0, 5.0]);
        let a = Assignment::new(vec![0, 0, 1, 1], 3).unwrap();
        let up = recompute_means(&data, &a, 3);
        assert_eq!(up.reseeded, vec![2]);
        // Occupied means are 0.1 and 3.0; the point at 5 is 2 away from 3.0,
        // farther than any other point from its nearest mean.
        assert_eq!(up.centroids.as_slice(), &[0.1, 3.0, 5.0]);
        assert!(up.centroids.as_slice().iter().all(|v| v.is_finite()));
    }

    #[test]
    fn hard_cost_examples() {
        let data = line(&[0.0, 2.0, 5.0]);
        assert!((hard_cost(&data, &centres(&[1.0, 5.0])) - 0.5).abs() < 1e-15);
        assert_eq!(hard_cost(&data, &centres(&[0.0, 2.0, 5.0])), 0.0);
        let shifted = line(&[10.0, 12.0, 15.0]);
        assert!((hard_cost(&shifted, &centres(&[11.0, 15.0])) - 0.5).abs() < 1e-15);
        // An empty cluster still counts in the divisor.
        assert!((hard_cost(&data, &centres(&[1.0, 5.0, 100.0])) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn flat_costs_match_assignment_forms() {
        let data = line(&[0.0, 2.0, 5.0]);
        let c = centres(&[1.0, 5.0]);
        let a = assign_nearest(&data, &c);
        assert_eq!(sse_flat(c.as_slice(), &data), 2.0);
        assert_eq!(sse_flat(c.as_slice(), &data), within_cluster_sse(&data, &a, &c));
        assert_eq!(distance_sum_flat(c.as_slice(), &data), 2.0);
        assert_eq!(distance_sum_flat(&[1.0, 5.0, 100.0], &data), 2.0);
    }

    #[test]
    fn run_kmeans_two_blobs() {
        let data = line(&[0.0, 0.1, 0.9, 1.0]);
        let r = run_kmeans(&data, &KMeansParams::new(2), RngSeed::new(3, 0)).unwrap();
        assert!(r.converged);
        let mut c = r.centroids.as_slice().to_vec();
        c.sort_by(f64::total_cmp);
        assert!((c[0] - 0.05).abs() < 0.06 && (c[1] - 0.95).abs() < 0.06, "{c:?}");
        assert_eq!(recompute_means(&data, &r.assignment, 2).centroids, r.centroids);
    }

    #[test]
    fn run_kmeans_zero_iterations_returns_initial_centres() {
        let data = line(&[0.0, 0.1, 0.9, 1.0]);
        let params = KMeansParams {
            n_clusters: 2,
            max_iter: 0,
        };
        let r = run_kmeans(&data, &params, RngSeed::new(3, 0)).unwrap();
        assert!(!r.converged);
        assert_eq!(r.iterations, 0);
        let init = uniform_centres(&data.bounds(), 2, &mut RngSeed::new(3, 0).rng());
        assert_eq!(r.centroids, init);
    }

    #[test]
    fn run_kmeans_is_deterministic() {
        let data = line(&[0.0, 0.3, 0.5, 0.9, 1.4, 2.0]);
        let a = run_kmeans(&data, &KMeansParams::new(3), RngSeed::new(8, 4)).unwrap();
        let b = run_kmeans(&data, &KMeansParams::new(3), RngSeed::new(8, 4)).unwrap();
        assert_eq!(a, b);
    }

    /// Minimum SSE over all 2-partitions, each part at its mean.
    fn best_two_partition_sse(data: &Dataset) -> f64 {
        let n = data.n_points();
        let mut best = f64::INFINITY;
        for mask in 1..(1u32 << n) - 1 {
            let labels: Vec<usize> = (0..n).map(|j| ((mask >> j) & 1) as usize).collect();
            let a = Assignment::new(labels, 2).unwrap();
            let c = recompute_means(data, &a, 2).centroids;
            best = best.min(within_cluster_sse(data, &a, &c));
        }
        best
    }

    proptest! {
        #[test]
        fn lloyd_never_beats_exhaustive_optimum(
            pts in prop::collection::vec(0.0f64..1.0, 6..=16),
            seed in 0u64..1000,
        ) {
            let n = pts.len() / 2 * 2;
            let data = Dataset::new("p", pts[..n].to_vec(), 2, None).unwrap();
            let r = run_kmeans(&data, &KMeansParams::new(2), RngSeed::new(seed, 0)).unwrap();
            let final_sse = *r.sse_trace.last().unwrap();
            prop_assert!(final_sse >= best_two_partition_sse(&data) - 1e-12);
        }

        #[test]
        fn hard_cost_is_translation_invariant(
            pts in prop::collection::vec(-3.0f64..3.0, 4..=20),
            shift in -10.0f64..10.0,
        ) {
            let n = pts.len() / 2 * 2;
            let data = Dataset::new("p", pts[..n].to_vec(), 2, None).unwrap();
            let c = CentroidMatrix::new(vec![-1.0, 0.0, 1.0, 0.5], 2).unwrap();
            let moved = data.with_features(data.features().iter().map(|v| v + shift).collect()).unwrap();
            let mc = CentroidMatrix::new(c.as_slice().iter().map(|v| v + shift).collect(), 2).unwrap();
            prop_assert!((hard_cost(&data, &c) - hard_cost(&moved, &mc)).abs() < 1e-9);
        }
    }
}
