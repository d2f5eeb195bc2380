//! Fuzzy C-Means: membership, centroid update and objective, plus the
//! classic alternating optimization loop.

use rand::Rng;

use crate::data::{
    check_cluster_count, squared_distance, uniform_centres, CentroidMatrix, Dataset, MembershipMatrix, RngSeed,
};
use crate::error::{Error, Result};

/// Fuzzifier exponent `m`, strictly greater than 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fuzzifier(f64);

impl Fuzzifier {
    pub fn new(m: f64) -> Result<Self> {
        if !(m.is_finite() && m > 1.0) {
            return Err(Error::InvalidFuzzifier(m));
        }
        Ok(Self(m))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    #[inline]
    fn pow(self, mu: f64) -> f64 {
        if self.0 == 2.0 {
            mu * mu
        } else {
            mu.powf(self.0)
        }
    }
}

impl Default for Fuzzifier {
    fn default() -> Self {
        Self(2.0)
    }
}

/// Memberships of one point given its squared distances to every centre.
///
/// Centres coinciding with the point share its membership equally; otherwise
/// μ_i = 1 / Σ_r (d_i/d_r)^(2/(m−1)), evaluated relative to the nearest
/// centre so no term can overflow.
#[inline]
fn point_memberships(sq_dists: &[f64], m: Fuzzifier, out: &mut [f64]) {
    let coincident = sq_dists.iter().filter(|&&d| d == 0.0).count();
    if coincident > 0 {
        let share = 1.0 / coincident as f64;
        for (o, &d) in out.iter_mut().zip(sq_dists) {
            *o = if d == 0.0 { share } else { 0.0 };
        }
        return;
    }
    let exponent = 1.0 / (m.value() - 1.0);
    let nearest = sq_dists.iter().copied().fold(f64::INFINITY, f64::min);
    let mut total = 0.0;
    for (o, &d) in out.iter_mut().zip(sq_dists) {
        let ratio = nearest / d;
        *o = if exponent == 1.0 { ratio } else { ratio.powf(exponent) };
        total += *o;
    }
    for o in out.iter_mut() {
        *o /= total;
    }
}

pub fn compute_membership(centroids: &CentroidMatrix, data: &Dataset, m: Fuzzifier) -> MembershipMatrix {
    let n_clusters = centroids.n_clusters();
    let n_points = data.n_points();
    let mut mu = vec![0.0; n_clusters * n_points];
    let mut sq = vec![0.0; n_clusters];
    let mut col = vec![0.0; n_clusters];
    for (j, p) in data.points().enumerate() {
        for (s, c) in sq.iter_mut().zip(centroids.centres()) {
            *s = squared_distance(p, c);
        }
        point_memberships(&sq, m, &mut col);
        for (i, &v) in col.iter().enumerate() {
            mu[i * n_points + j] = v;
        }
    }
    MembershipMatrix::from_raw(mu, n_clusters, n_points)
}

/// Result of a centroid update; `reseeded` lists clusters whose weights were
/// all zero and were moved to a random data point.
#[derive(Debug, Clone, PartialEq)]
pub struct CentroidUpdate {
    pub centroids: CentroidMatrix,
    pub reseeded: Vec<usize>,
}

/// x_i = Σ_j μ_ij^m y_j / Σ_j μ_ij^m, summed in ascending point order.
pub fn update_centroids<R: Rng>(mu: &MembershipMatrix, data: &Dataset, m: Fuzzifier, rng: &mut R) -> CentroidUpdate {
    let n_dims = data.n_dims();
    let n_clusters = mu.n_clusters();
    let mut centres = vec![0.0; n_clusters * n_dims];
    let mut reseeded = Vec::new();
    for i in 0..n_clusters {
        let acc = &mut centres[i * n_dims..(i + 1) * n_dims];
        let mut weight_sum = 0.0;
        for (w, p) in mu.row(i).iter().zip(data.points()) {
            let w = m.pow(*w);
            if w == 0.0 {
                continue;
            }
            weight_sum += w;
            for (a, v) in acc.iter_mut().zip(p) {
                *a += w * v;
            }
        }
        if weight_sum > 0.0 {
            for a in acc.iter_mut() {
                *a /= weight_sum;
            }
        } else {
            acc.copy_from_slice(data.point(rng.random_range(0..data.n_points())));
            reseeded.push(i);
        }
    }
    CentroidUpdate {
        centroids: CentroidMatrix::new(centres, n_dims).expect("shape derived from data"),
        reseeded,
    }
}

/// φ = Σ_i Σ_j μ_ij^m ‖x_i − y_j‖².
pub fn fcm_cost(centroids: &CentroidMatrix, mu: &MembershipMatrix, data: &Dataset, m: Fuzzifier) -> f64 {
    let mut total = 0.0;
    for (i, c) in centroids.centres().enumerate() {
        for (w, p) in mu.row(i).iter().zip(data.points()) {
            let w = m.pow(*w);
            if w != 0.0 {
                total += w * squared_distance(c, p);
            }
        }
    }
    total
}

/// FCM objective of a flat row-major centre buffer, with memberships derived
/// from those centres. Equivalent to
/// `fcm_cost(X, compute_membership(X, data, m), data, m)` without
/// materializing the membership matrix.
pub fn fuzzy_objective(centres: &[f64], data: &Dataset, m: Fuzzifier) -> f64 {
    let n_dims = data.n_dims();
    let n_clusters = centres.len() / n_dims;
    let mut sq = vec![0.0; n_clusters];
    let mut col = vec![0.0; n_clusters];
    let mut by_cluster = vec![0.0; n_clusters];
    for p in data.points() {
        for (s, c) in sq.iter_mut().zip(centres.chunks_exact(n_dims)) {
            *s = squared_distance(p, c);
        }
        point_memberships(&sq, m, &mut col);
        for ((acc, &u), &d) in by_cluster.iter_mut().zip(&col).zip(&sq) {
            let w = m.pow(u);
            if w != 0.0 {
                *acc += w * d;
            }
        }
    }
    by_cluster.iter().sum()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FcmParams {
    pub n_clusters: usize,
    pub fuzzifier: Fuzzifier,
    /// Stop once |φ_t − φ_{t−1}| falls below this.
    pub tol: f64,
    pub max_iter: usize,
}

impl FcmParams {
    pub fn new(n_clusters: usize) -> Self {
        Self {
            n_clusters,
            fuzzifier: Fuzzifier::default(),
            tol: 1e-8,
            max_iter: 300,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FcmResult {
    pub centroids: CentroidMatrix,
    pub membership: MembershipMatrix,
    pub cost: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Objective at the initial centres followed by one entry per iteration.
    pub cost_trace: Vec<f64>,
    pub reseeded: usize,
}

/// Alternates membership and centroid updates from centres drawn uniformly
/// inside the data bounding box.
pub fn run_fcm(data: &Dataset, params: &FcmParams, seed: RngSeed) -> Result<FcmResult> {
    check_cluster_count(params.n_clusters, data.n_points())?;
    let m = params.fuzzifier;
    let mut rng = seed.rng();
    let mut centroids = uniform_centres(&data.bounds(), params.n_clusters, &mut rng);
    let mut membership = compute_membership(&centroids, data, m);
    let mut cost = fcm_cost(&centroids, &membership, data, m);
    let mut cost_trace = vec![cost];
    let mut converged = false;
    let mut iterations = 0;
    let mut reseeded = 0;

    while iterations < params.max_iter {
        let update = update_centroids(&membership, data, m, &mut rng);
        reseeded += update.reseeded.len();
        centroids = update.centroids;
        membership = compute_membership(&centroids, data, m);
        let next = fcm_cost(&centroids, &membership, data, m);
        iterations += 1;
        cost_trace.push(next);
        let delta = (cost - next).abs();
        cost = next;
        if delta < params.tol {
            converged = true;
            break;
        }
    }

    Ok(FcmResult {
        centroids,
        membership,
        cost,
        iterations,
        converged,
        cost_trace,
        reseeded,
    })
}
