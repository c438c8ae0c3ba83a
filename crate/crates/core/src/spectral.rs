//! Spectral clustering with silhouette-based choice of the cluster count.
//!
//! The pipeline is: normalized Laplacian, bottom `k_max` eigenvectors
//! (computed once), then for each candidate `K` the first `K` columns are
//! row-normalized, clustered with k-means, and scored by the global
//! silhouette under `d = 1 - w`.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{ClusterAssignment, DistanceMatrix, WeightedGraph};
use crate::kmeans::{kmeans, KMeansConfig};
use crate::matrix::DenseMatrix;
use crate::metrics::silhouette;
use crate::rng;

/// `L = S^{-1/2} (S - W) S^{-1/2}` with `S` the diagonal strength matrix.
/// A zero-strength node gets scaling factor 0, so its row and column are
/// zero except `L_ii = 1`.
pub fn normalized_laplacian(g: &WeightedGraph) -> DenseMatrix {
    let n = g.n();
    let inv_sqrt: Vec<f64> = g
        .strengths()
        .into_iter()
        .map(|s| if s > 0.0 { 1.0 / s.sqrt() } else { 0.0 })
        .collect();
    let mut l = DenseMatrix::zeros(n, n);
    for i in 0..n {
        let row = g.row(i);
        let out = l.row_mut(i);
        for j in 0..n {
            out[j] = -row[j] * inv_sqrt[i] * inv_sqrt[j];
        }
        out[i] = 1.0;
    }
    // Products above are formed in a fixed order, but force exact symmetry.
    for i in 0..n {
        for j in i + 1..n {
            let v = l.get(i, j);
            l.set(j, i, v);
        }
    }
    l
}

/// Full symmetric eigendecomposition, eigenvalues ascending, eigenvectors
/// as columns.
pub fn symmetric_eigen(m: &DenseMatrix) -> Result<(Vec<f64>, DenseMatrix)> {
    let n = m.rows();
    if n != m.cols() {
        return Err(Error::Dimension {
            expected: n,
            got: m.cols(),
        });
    }
    if m.as_slice().iter().any(|x| !x.is_finite()) {
        return Err(Error::Numeric("matrix has non-finite entries".into()));
    }
    let a = faer::Mat::<f64>::from_fn(n, n, |i, j| m.get(i, j));
    let evd = a
        .self_adjoint_eigen(faer::Side::Lower)
        .map_err(|e| Error::Numeric(format!("symmetric eigensolver did not converge (n = {n}): {e:?}")))?;
    let s = evd.S().column_vector();
    let u = evd.U();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| s[a].total_cmp(&s[b]).then(a.cmp(&b)));
    let values = order.iter().map(|&c| s[c]).collect();
    let vectors = DenseMatrix::from_fn(n, n, |i, j| u[(i, order[j])]);
    Ok((values, vectors))
}

/// Bottom eigenpairs of the normalized Laplacian.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralEmbedding {
    /// `n x k_max`, column `j` is the eigenvector of the `j`-th smallest
    /// eigenvalue.
    pub vectors: DenseMatrix,
    pub eigenvalues: Vec<f64>,
}

impl SpectralEmbedding {
    pub fn k_max(&self) -> usize {
        self.eigenvalues.len()
    }

    /// First `k` eigenvectors.
    pub fn leading(&self, k: usize) -> DenseMatrix {
        self.vectors.leading_columns(k)
    }
}

/// Flips each column so its largest-magnitude entry is positive. Entries
/// within a relative 1e-9 of the maximum count as ties; the lowest index
/// among them decides.
fn fix_signs(vectors: &mut DenseMatrix) {
    for j in 0..vectors.cols() {
        let max = (0..vectors.rows()).map(|i| vectors.get(i, j).abs()).fold(0.0, f64::max);
        if max == 0.0 {
            continue;
        }
        let pivot = (0..vectors.rows())
            .find(|&i| vectors.get(i, j).abs() >= max * (1.0 - 1e-9))
            .unwrap();
        if vectors.get(pivot, j) < 0.0 {
            for i in 0..vectors.rows() {
                let v = vectors.get(i, j);
                vectors.set(i, j, -v);
            }
        }
    }
}

pub fn spectral_embedding(g: &WeightedGraph, k_max: usize) -> Result<SpectralEmbedding> {
    let n = g.n();
    if k_max == 0 || k_max > n {
        return Err(Error::Config(format!("need 1 <= k_max <= n, got k_max = {k_max}, n = {n}")));
    }
    let (values, vectors) = symmetric_eigen(&normalized_laplacian(g))?;
    let mut vectors = vectors.leading_columns(k_max);
    fix_signs(&mut vectors);
    Ok(SpectralEmbedding {
        vectors,
        eigenvalues: values[..k_max].to_vec(),
    })
}

/// Scales each row to unit Euclidean norm; zero rows stay zero.
pub fn row_normalize(m: &DenseMatrix) -> DenseMatrix {
    let mut out = m.clone();
    for i in 0..out.rows() {
        let row = out.row_mut(i);
        let norm = row.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            row.iter_mut().for_each(|x| *x /= norm);
        }
    }
    out
}

/// Tunables for the K sweep.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SelectKOptions {
    pub k_min: usize,
    pub k_max: usize,
    pub kmeans: KMeansConfig,
    /// Keep the assignment for every K, not just the winner.
    pub keep_all: bool,
}

impl Default for SelectKOptions {
    fn default() -> Self {
        Self {
            k_min: 2,
            k_max: 20,
            kmeans: KMeansConfig::default(),
            keep_all: false,
        }
    }
}

impl SelectKOptions {
    pub fn with_k_max(k_max: usize) -> Self {
        Self {
            k_max,
            ..Self::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KSelectionResult {
    pub best_k: usize,
    pub assignment: ClusterAssignment,
    /// Global silhouette for every candidate K.
    pub curve: BTreeMap<usize, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_k_assignments: Option<BTreeMap<usize, ClusterAssignment>>,
}

/// Seed of the k-means stream used at a given K.
pub fn kmeans_seed(seed: u64, k: usize) -> u64 {
    rng::child_seed(seed, "kmeans", k as u64)
}

fn cluster_with_distances(
    d: &DistanceMatrix,
    emb: &SpectralEmbedding,
    k: usize,
    seed: u64,
    config: &KMeansConfig,
) -> Result<(ClusterAssignment, f64)> {
    if k < 2 || k > emb.k_max() {
        return Err(Error::Config(format!(
            "K = {k} outside [2, {}] for this embedding",
            emb.k_max()
        )));
    }
    let points = row_normalize(&emb.leading(k));
    let result = kmeans(&points, k, kmeans_seed(seed, k), config)?;
    let score = silhouette(d, &result.assignment)?.global;
    Ok((result.assignment, score))
}

/// Clusters with a fixed K and scores the result.
pub fn cluster_with_k(
    g: &WeightedGraph,
    emb: &SpectralEmbedding,
    k: usize,
    seed: u64,
    config: &KMeansConfig,
) -> Result<(ClusterAssignment, f64)> {
    if emb.vectors.rows() != g.n() {
        return Err(Error::Dimension {
            expected: g.n(),
            got: emb.vectors.rows(),
        });
    }
    cluster_with_distances(&g.distance_matrix(), emb, k, seed, config)
}

/// Chooses K in `[k_min, k_max]` maximizing the global silhouette; exact
/// ties go to the smallest K. The K runs are independent and may execute
/// in parallel; each uses its own derived k-means stream.
pub fn select_k(g: &WeightedGraph, seed: u64, opts: &SelectKOptions) -> Result<KSelectionResult> {
    if opts.k_min < 2 || opts.k_max < opts.k_min {
        return Err(Error::Config(format!(
            "invalid K range [{}, {}] (need 2 <= k_min <= k_max)",
            opts.k_min, opts.k_max
        )));
    }
    if opts.k_max > g.n() {
        return Err(Error::Config(format!("k_max = {} exceeds n = {}", opts.k_max, g.n())));
    }
    let emb = spectral_embedding(g, opts.k_max)?;
    let d = g.distance_matrix();
    let runs: Vec<(usize, ClusterAssignment, f64)> = (opts.k_min..=opts.k_max)
        .into_par_iter()
        .map(|k| cluster_with_distances(&d, &emb, k, seed, &opts.kmeans).map(|(z, s)| (k, z, s)))
        .collect::<Result<_>>()?;

    let mut best = 0;
    for (i, run) in runs.iter().enumerate() {
        if run.2 > runs[best].2 {
            best = i;
        }
    }
    let curve = runs.iter().map(|(k, _, s)| (*k, *s)).collect();
    let best_k = runs[best].0;
    let assignment = runs[best].1.clone();
    let per_k_assignments = opts
        .keep_all
        .then(|| runs.into_iter().map(|(k, z, _)| (k, z)).collect());
    Ok(KSelectionResult {
        best_k,
        assignment,
        curve,
        per_k_assignments,
    })
}
