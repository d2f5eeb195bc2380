//! Shared domain types: datasets, centroid and membership matrices, hard
//! assignments, box bounds and the seeded random stream contract.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// An N×D feature matrix, stored row-major, with optional class labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    name: String,
    features: Vec<f64>,
    n_dims: usize,
    labels: Option<Vec<usize>>,
    n_classes: usize,
}

impl Dataset {
    /// Builds a dataset from a row-major feature buffer.
    ///
    /// Requires N ≥ 2, D ≥ 1 and finite features. Labels, when given, must
    /// have one entry per point; the class count is `max(label) + 1`.
    pub fn new(name: impl Into<String>, features: Vec<f64>, n_dims: usize, labels: Option<Vec<usize>>) -> Result<Self> {
        if n_dims == 0 {
            return Err(Error::InvalidDataset("dataset needs at least one dimension".into()));
        }
        if !features.len().is_multiple_of(n_dims) {
            return Err(Error::DimensionMismatch {
                expected: n_dims,
                got: features.len() % n_dims,
            });
        }
        let n_points = features.len() / n_dims;
        if n_points == 0 {
            return Err(Error::EmptyDataset);
        }
        if n_points < 2 {
            return Err(Error::InvalidDataset(format!(
                "dataset needs at least two points, got {n_points}"
            )));
        }
        if let Some(pos) = features.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidDataset(format!(
                "non-finite feature at point {}, dimension {}",
                pos / n_dims,
                pos % n_dims
            )));
        }
        let mut n_classes = 0;
        if let Some(labels) = &labels {
            if labels.len() != n_points {
                return Err(Error::LengthMismatch {
                    predicted: n_points,
                    labels: labels.len(),
                });
            }
            n_classes = labels.iter().copied().max().map_or(0, |m| m + 1);
        }
        Ok(Self {
            name: name.into(),
            features,
            n_dims,
            labels,
            n_classes,
        })
    }

    /// Builds a dataset from a slice of equally sized rows.
    pub fn from_rows(name: impl Into<String>, rows: &[Vec<f64>], labels: Option<Vec<usize>>) -> Result<Self> {
        let n_dims = rows.first().map_or(0, Vec::len);
        let mut features = Vec::with_capacity(rows.len() * n_dims);
        for row in rows {
            if row.len() != n_dims {
                return Err(Error::DimensionMismatch {
                    expected: n_dims,
                    got: row.len(),
                });
            }
            features.extend_from_slice(row);
        }
        if rows.is_empty() {
            return Err(Error::EmptyDataset);
        }
        Self::new(name, features, n_dims, labels)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n_points(&self) -> usize {
        self.features.len() / self.n_dims
    }

    pub fn n_dims(&self) -> usize {
        self.n_dims
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn features(&self) -> &[f64] {
        &self.features
    }

    pub fn labels(&self) -> Option<&[usize]> {
        self.labels.as_deref()
    }

    pub fn point(&self, index: usize) -> &[f64] {
        &self.features[index * self.n_dims..(index + 1) * self.n_dims]
    }

    pub fn points(&self) -> std::slice::ChunksExact<'_, f64> {
        self.features.chunks_exact(self.n_dims)
    }

    /// Per-dimension bounding box of the points.
    pub fn bounds(&self) -> Bounds {
        data_bounds(&self.features, self.n_dims).expect("dataset invariants guarantee N >= 1")
    }

    /// Returns a copy with the features replaced, keeping name and labels.
    pub fn with_features(&self, features: Vec<f64>) -> Result<Self> {
        Self::new(self.name.clone(), features, self.n_dims, self.labels.clone())
    }

    /// Returns a copy with a different name.
    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }
}

/// C cluster centres of dimension D, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CentroidMatrix {
    centres: Vec<f64>,
    n_dims: usize,
}

impl CentroidMatrix {
    pub fn new(centres: Vec<f64>, n_dims: usize) -> Result<Self> {
        if n_dims == 0 || centres.is_empty() || !centres.len().is_multiple_of(n_dims) {
            return Err(Error::DimensionMismatch {
                expected: n_dims,
                got: centres.len(),
            });
        }
        Ok(Self { centres, n_dims })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n_dims = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n_dims) {
            return Err(Error::DimensionMismatch {
                expected: n_dims,
                got: rows.iter().map(Vec::len).find(|&l| l != n_dims).unwrap_or(0),
            });
        }
        Self::new(rows.concat(), n_dims)
    }

    pub fn n_clusters(&self) -> usize {
        self.centres.len() / self.n_dims
    }

    pub fn n_dims(&self) -> usize {
        self.n_dims
    }

    pub fn centre(&self, index: usize) -> &[f64] {
        &self.centres[index * self.n_dims..(index + 1) * self.n_dims]
    }

    pub fn centres(&self) -> std::slice::ChunksExact<'_, f64> {
        self.centres.chunks_exact(self.n_dims)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.centres
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.centres
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.centres().map(<[f64]>::to_vec).collect()
    }
}

/// Fuzzy memberships, one row per cluster and one column per point.
#[derive(Debug, Clone, PartialEq)]
pub struct MembershipMatrix {
    mu: Vec<f64>,
    n_clusters: usize,
    n_points: usize,
}

impl MembershipMatrix {
    pub(crate) fn from_raw(mu: Vec<f64>, n_clusters: usize, n_points: usize) -> Self {
        debug_assert_eq!(mu.len(), n_clusters * n_points);
        Self {
            mu,
            n_clusters,
            n_points,
        }
    }

    /// Builds a membership matrix from per-cluster rows, checking that each
    /// entry lies in [0, 1] and each column sums to 1 within 1e-9.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n_clusters = rows.len();
        let n_points = rows.first().map_or(0, Vec::len);
        if n_clusters == 0 || n_points == 0 || rows.iter().any(|r| r.len() != n_points) {
            return Err(Error::InvalidDataset(
                "membership rows must be non-empty and equal length".into(),
            ));
        }
        let out = Self::from_raw(rows.concat(), n_clusters, n_points);
        for j in 0..n_points {
            let col: f64 = (0..n_clusters).map(|i| out.get(i, j)).sum();
            let in_range = (0..n_clusters).all(|i| (0.0..=1.0).contains(&out.get(i, j)));
            if !in_range || (col - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidDataset(format!(
                    "membership column {j} is not a probability vector"
                )));
            }
        }
        Ok(out)
    }

    pub fn n_clusters(&self) -> usize {
        self.n_clusters
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    #[inline]
    pub fn get(&self, cluster: usize, point: usize) -> f64 {
        self.mu[cluster * self.n_points + point]
    }

    pub fn row(&self, cluster: usize) -> &[f64] {
        &self.mu[cluster * self.n_points..(cluster + 1) * self.n_points]
    }

    pub fn column(&self, point: usize) -> Vec<f64> {
        (0..self.n_clusters).map(|i| self.get(i, point)).collect()
    }

    /// Hard assignment by per-column argmax; ties go to the lowest cluster.
    pub fn argmax(&self) -> Assignment {
        let cluster_of = (0..self.n_points)
            .map(|j| {
                let mut best = 0;
                for i in 1..self.n_clusters {
                    if self.get(i, j) > self.get(best, j) {
                        best = i;
                    }
                }
                best
            })
            .collect();
        Assignment {
            cluster_of,
            n_clusters: self.n_clusters,
        }
    }
}

/// Hard cluster label per point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    cluster_of: Vec<usize>,
    n_clusters: usize,
}

impl Assignment {
    pub fn new(cluster_of: Vec<usize>, n_clusters: usize) -> Result<Self> {
        if let Some(&bad) = cluster_of.iter().find(|&&c| c >= n_clusters) {
            return Err(Error::InvalidClusterCount {
                clusters: bad,
                points: cluster_of.len(),
            });
        }
        Ok(Self { cluster_of, n_clusters })
    }

    pub fn n_clusters(&self) -> usize {
        self.n_clusters
    }

    pub fn len(&self) -> usize {
        self.cluster_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cluster_of.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.cluster_of
    }

    /// Number of points in each cluster.
    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.n_clusters];
        for &c in &self.cluster_of {
            sizes[c] += 1;
        }
        sizes
    }
}

/// Axis-aligned box, one `[lower, upper]` interval per dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct Bounds {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Bounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::DimensionMismatch {
                expected: lower.len(),
                got: upper.len(),
            });
        }
        let ok = lower
            .iter()
            .zip(&upper)
            .all(|(lo, hi)| lo.is_finite() && hi.is_finite() && lo <= hi);
        if !ok {
            return Err(Error::InvalidConfig("bounds must be finite with min <= max".into()));
        }
        Ok(Self { lower, upper })
    }

    /// The same interval in every one of `dims` dimensions.
    pub fn uniform(dims: usize, lower: f64, upper: f64) -> Result<Self> {
        Self::new(vec![lower; dims], vec![upper; dims])
    }

    /// Concatenates `times` copies of this box, for encoding C centres of a
    /// D-dimensional box as one C·D vector.
    pub fn repeat(&self, times: usize) -> Self {
        Self {
            lower: self.lower.repeat(times),
            upper: self.upper.repeat(times),
        }
    }

    pub fn dims(&self) -> usize {
        self.lower.len()
    }

    pub fn clamp(&self, x: &mut [f64]) {
        for ((v, lo), hi) in x.iter_mut().zip(&self.lower).zip(&self.upper) {
            *v = v.clamp(*lo, *hi);
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dims()
            && x.iter()
                .zip(&self.lower)
                .zip(&self.upper)
                .all(|((v, lo), hi)| *lo <= *v && *v <= *hi)
    }
}

/// Seed plus stream index. Each trial of an experiment uses the same seed
/// with its own stream, so trials are independent and individually replayable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngSeed {
    pub seed: u64,
    pub stream_id: u64,
}

impl RngSeed {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        Self { seed, stream_id }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }
}

/// Euclidean distance ‖a − b‖₂.
pub fn euclidean_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    Ok(squared_distance(a, b).sqrt())
}

/// Squared Euclidean distance; callers guarantee equal lengths.
#[inline]
pub(crate) fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

#[inline]
pub(crate) fn distance(a: &[f64], b: &[f64]) -> f64 {
    squared_distance(a, b).sqrt()
}

/// Per-dimension min and max over a row-major point buffer.
pub fn data_bounds(points: &[f64], n_dims: usize) -> Result<Bounds> {
    if n_dims == 0 || points.len() < n_dims {
        return Err(Error::EmptyDataset);
    }
    if !points.len().is_multiple_of(n_dims) {
        return Err(Error::DimensionMismatch {
            expected: n_dims,
            got: points.len() % n_dims,
        });
    }
    let mut lower = points[..n_dims].to_vec();
    let mut upper = lower.clone();
    for p in points.chunks_exact(n_dims).skip(1) {
        for (d, &v) in p.iter().enumerate() {
            lower[d] = lower[d].min(v);
            upper[d] = upper[d].max(v);
        }
    }
    Ok(Bounds { lower, upper })
}

/// Draws C centres uniformly inside the box.
pub(crate) fn uniform_centres<R: rand::Rng>(bounds: &Bounds, n_clusters: usize, rng: &mut R) -> CentroidMatrix {
    let mut centres = Vec::with_capacity(n_clusters * bounds.dims());
    for _ in 0..n_clusters {
        for (lo, hi) in bounds.lower.iter().zip(&bounds.upper) {
            centres.push(lo + (hi - lo) * rng.random::<f64>());
        }
    }
    CentroidMatrix {
        centres,
        n_dims: bounds.dims(),
    }
}

pub(crate) fn check_cluster_count(n_clusters: usize, n_points: usize) -> Result<()> {
    if n_clusters <= 1 || n_clusters >= n_points {
        return Err(Error::InvalidClusterCount {
            clusters: n_clusters,
            points: n_points,
        });
    }
    Ok(())
}
