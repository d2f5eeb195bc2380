//! Clustering quality indices.
//!
//! Distance indices (inter-cluster, intra-cluster, quantization error) need
//! only the data and the partition. Accuracy and F-measure compare against
//! ground-truth classes; accuracy uses an optimal one-to-one matching of
//! clusters to classes.

use serde::{Deserialize, Serialize};

use crate::data::{distance, Assignment, CentroidMatrix, Dataset};
use crate::error::{Error, Result};
use crate::hybrid::ClusteringResult;
use crate::kmeans::assigned_distance_sum;

/// Sum of distances over all unordered pairs of centres.
pub fn intercluster_distance(centroids: &CentroidMatrix) -> Result<f64> {
    let c = centroids.n_clusters();
    if c < 2 {
        return Err(Error::InvalidClusterCount { clusters: c, points: 0 });
    }
    let mut total = 0.0;
    for i in 0..c {
        for r in i + 1..c {
            total += distance(centroids.centre(i), centroids.centre(r));
        }
    }
    Ok(total)
}

/// Sum over all points of the distance to their assigned centre.
pub fn intracluster_distance(data: &Dataset, assignment: &Assignment, centroids: &CentroidMatrix) -> f64 {
    assigned_distance_sum(data, assignment, centroids)
}

/// Mean over clusters of the mean point-to-centre distance inside each
/// cluster. Empty clusters contribute 0 but count in the divisor.
pub fn quantization_error(data: &Dataset, assignment: &Assignment, centroids: &CentroidMatrix) -> f64 {
    let c = centroids.n_clusters();
    let mut sums = vec![0.0; c];
    let mut counts = vec![0usize; c];
    for (p, &k) in data.points().zip(assignment.as_slice()) {
        sums[k] += distance(p, centroids.centre(k));
        counts[k] += 1;
    }
    let total: f64 = sums
        .iter()
        .zip(&counts)
        .filter(|(_, &n)| n > 0)
        .map(|(s, &n)| s / n as f64)
        .sum();
    total / c as f64
}

/// Counts of (cluster, class) pairs; rows are clusters.
pub fn confusion_matrix(pred: &Assignment, truth: &[usize]) -> Result<Vec<Vec<usize>>> {
    if pred.len() != truth.len() {
        return Err(Error::LengthMismatch {
            predicted: pred.len(),
            labels: truth.len(),
        });
    }
    let classes = truth.iter().copied().max().map_or(0, |m| m + 1);
    let mut counts = vec![vec![0usize; classes]; pred.n_clusters()];
    for (&k, &l) in pred.as_slice().iter().zip(truth) {
        counts[k][l] += 1;
    }
    Ok(counts)
}

/// Maximum-weight perfect matching on a square matrix (Hungarian method with
/// potentials). Returns the column assigned to each row.
fn hungarian_max(weights: &[Vec<i64>]) -> Vec<usize> {
    let n = weights.len();
    if n == 0 {
        return Vec::new();
    }
    let top = weights.iter().flatten().copied().max().unwrap_or(0);
    // 1-based arrays; row 0 / column 0 are sentinels.
    let cost = |i: usize, j: usize| top - weights[i - 1][j - 1];
    let mut u = vec![0i64; n + 1];
    let mut v = vec![0i64; n + 1];
    let mut row_of = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        row_of[0] = i;
        let mut j0 = 0;
        let mut minv = vec![i64::MAX; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = row_of[j0];
            let mut delta = i64::MAX;
            let mut j1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost(i0, j) - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[row_of[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if row_of[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            row_of[j0] = row_of[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut col_of = vec![0usize; n];
    for j in 1..=n {
        col_of[row_of[j] - 1] = j - 1;
    }
    col_of
}

fn matching_value(weights: &[Vec<i64>]) -> i64 {
    hungarian_max(weights)
        .iter()
        .enumerate()
        .map(|(i, &j)| weights[i][j])
        .sum()
}

/// Optimal cluster→class correspondence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterMatching {
    /// Class matched to each cluster; `None` for surplus clusters.
    pub mapping: Vec<Option<usize>>,
    /// Number of points whose cluster maps to their true class.
    pub agreement: usize,
}

/// One-to-one matching of clusters to classes maximizing agreement. Among
/// optimal matchings, the lexicographically smallest mapping is returned,
/// ordering real classes before "unmatched".
pub fn match_clusters_to_classes(pred: &Assignment, truth: &[usize]) -> Result<ClusterMatching> {
    let confusion = confusion_matrix(pred, truth)?;
    let clusters = confusion.len();
    let classes = confusion.first().map_or(0, Vec::len);
    let n = clusters.max(classes);
    let mut weights = vec![vec![0i64; n]; n];
    for (k, row) in confusion.iter().enumerate() {
        for (l, &count) in row.iter().enumerate() {
            weights[k][l] = count as i64;
        }
    }
    let optimum = matching_value(&weights);

    let mut free_rows: Vec<usize> = (0..n).collect();
    let mut free_cols: Vec<usize> = (0..n).collect();
    let mut chosen = vec![0usize; n];
    let mut fixed_value = 0i64;
    for row in 0..n {
        free_rows.retain(|&r| r != row);
        let mut picked = None;
        for (idx, &col) in free_cols.iter().enumerate() {
            let rest_cols: Vec<usize> = free_cols.iter().copied().filter(|&c| c != col).collect();
            let sub: Vec<Vec<i64>> = free_rows
                .iter()
                .map(|&r| rest_cols.iter().map(|&c| weights[r][c]).collect())
                .collect();
            if fixed_value + weights[row][col] + matching_value(&sub) == optimum {
                picked = Some(idx);
                break;
            }
        }
        let idx = picked.expect("an optimal completion always exists");
        let col = free_cols.remove(idx);
        chosen[row] = col;
        fixed_value += weights[row][col];
    }

    let mapping = chosen[..clusters].iter().map(|&c| (c < classes).then_some(c)).collect();
    Ok(ClusterMatching {
        mapping,
        agreement: optimum as usize,
    })
}

/// Fraction of points whose cluster maps to their true class under the
/// optimal matching.
pub fn accuracy(pred: &Assignment, truth: &[usize]) -> Result<f64> {
    let matching = match_clusters_to_classes(pred, truth)?;
    if truth.is_empty() {
        return Ok(0.0);
    }
    Ok(matching.agreement as f64 / truth.len() as f64)
}

/// Class-weighted F-measure: each class takes its best harmonic mean of
/// precision and recall over all clusters, weighted by class size.
pub fn f_measure(pred: &Assignment, truth: &[usize]) -> Result<f64> {
    let confusion = confusion_matrix(pred, truth)?;
    let n = truth.len();
    if n == 0 {
        return Ok(0.0);
    }
    let classes = confusion.first().map_or(0, Vec::len);
    let cluster_sizes: Vec<usize> = confusion.iter().map(|row| row.iter().sum()).collect();
    let mut total = 0.0;
    for l in 0..classes {
        let class_size: usize = confusion.iter().map(|row| row[l]).sum();
        if class_size == 0 {
            continue;
        }
        let best = confusion
            .iter()
            .zip(&cluster_sizes)
            .filter(|(row, _)| row[l] > 0)
            .map(|(row, &size)| {
                let precision = row[l] as f64 / size as f64;
                let recall = row[l] as f64 / class_size as f64;
                2.0 * precision * recall / (precision + recall)
            })
            .fold(0.0, f64::max);
        total += class_size as f64 / n as f64 * best;
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub intercluster: f64,
    pub intracluster: f64,
    pub quantization_error: f64,
    /// Requires ground-truth labels.
    pub f_measure: Option<f64>,
    pub accuracy: Option<f64>,
}

/// All indices for a partition given by `assignment` and `centroids`.
pub fn evaluate_partition(data: &Dataset, assignment: &Assignment, centroids: &CentroidMatrix) -> Result<MetricReport> {
    let (f, acc) = match data.labels() {
        Some(labels) => (
            Some(f_measure(assignment, labels)?),
            Some(accuracy(assignment, labels)?),
        ),
        None => (None, None),
    };
    Ok(MetricReport {
        intercluster: intercluster_distance(centroids)?,
        intracluster: intracluster_distance(data, assignment, centroids),
        quantization_error: quantization_error(data, assignment, centroids),
        f_measure: f,
        accuracy: acc,
    })
}

pub fn evaluate(data: &Dataset, result: &ClusteringResult) -> Result<MetricReport> {
    evaluate_partition(data, &result.assignment, &result.centroids)
}
