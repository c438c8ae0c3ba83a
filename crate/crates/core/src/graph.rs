//! Graph, distance and partition types, plus the concentric-ring point
//! generator used to probe non-convex cluster shapes.

use std::f64::consts::TAU;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

/// Undirected weighted graph stored as a dense symmetric matrix with
/// weights in `[0, 1]` and a zero diagonal. A pair is an edge iff its
/// weight is nonzero.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedGraph {
    n: usize,
    weights: Vec<f64>,
    node_ids: Option<Vec<String>>,
}

impl WeightedGraph {
    /// Graph with `n` nodes and no edges.
    pub fn empty(n: usize) -> Self {
        Self {
            n,
            weights: vec![0.0; n * n],
            node_ids: None,
        }
    }

    /// Validates and wraps a row-major `n * n` weight buffer.
    pub fn from_dense(n: usize, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != n * n {
            return Err(Error::Dimension {
                expected: n * n,
                got: weights.len(),
            });
        }
        let g = Self {
            n,
            weights,
            node_ids: None,
        };
        g.validate()?;
        Ok(g)
    }

    /// Builds a graph from undirected `(i, j, w)` triples. Later triples for
    /// the same pair overwrite earlier ones.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        let mut g = Self::empty(n);
        for (i, j, w) in edges {
            if i >= n || j >= n {
                return Err(Error::Invariant(format!("edge ({i}, {j}) out of range for n = {n}")));
            }
            if i == j {
                return Err(Error::Invariant(format!("self-loop on node {i}")));
            }
            check_weight(w, i, j)?;
            g.set_pair(i, j, w);
        }
        Ok(g)
    }

    pub fn with_node_ids(mut self, ids: Vec<String>) -> Result<Self> {
        if ids.len() != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                got: ids.len(),
            });
        }
        self.node_ids = Some(ids);
        Ok(self)
    }

    #[inline]
    pub(crate) fn set_pair(&mut self, i: usize, j: usize, w: f64) {
        self.weights[i * self.n + j] = w;
        self.weights[j * self.n + i] = w;
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.weights[i * self.n + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.weights[i * self.n..(i + 1) * self.n]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn node_ids(&self) -> Option<&[String]> {
        self.node_ids.as_deref()
    }

    /// Label for node `i`: its id if present, else the index.
    pub fn node_label(&self, i: usize) -> String {
        match &self.node_ids {
            Some(ids) => ids[i].clone(),
            None => i.to_string(),
        }
    }

    /// Number of unordered pairs with nonzero weight.
    pub fn edge_count(&self) -> usize {
        (0..self.n)
            .map(|i| self.row(i)[i + 1..].iter().filter(|&&w| w != 0.0).count())
            .sum()
    }

    /// Sum of incident weights of node `i`.
    pub fn strength(&self, i: usize) -> f64 {
        self.row(i).iter().sum()
    }

    pub fn strengths(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.strength(i)).collect()
    }

    /// Iterates `(i, j, w)` over nonzero pairs with `i < j`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |i| {
            (i + 1..self.n).filter_map(move |j| {
                let w = self.weight(i, j);
                (w != 0.0).then_some((i, j, w))
            })
        })
    }

    /// Checks symmetry, zero diagonal and the `[0, 1]` weight range.
    pub fn validate(&self) -> Result<()> {
        for i in 0..self.n {
            if self.weight(i, i) != 0.0 {
                return Err(Error::Invariant(format!("nonzero diagonal at node {i}")));
            }
            for j in i + 1..self.n {
                let w = self.weight(i, j);
                check_weight(w, i, j)?;
                if w != self.weight(j, i) {
                    return Err(Error::Invariant(format!("asymmetric weight at ({i}, {j})")));
                }
            }
        }
        Ok(())
    }

    /// Number of connected components of the nonzero-weight edge set.
    pub fn connected_components(&self) -> usize {
        let mut seen = vec![false; self.n];
        let mut stack = Vec::new();
        let mut count = 0;
        for start in 0..self.n {
            if seen[start] {
                continue;
            }
            count += 1;
            seen[start] = true;
            stack.push(start);
            while let Some(u) = stack.pop() {
                for (v, &w) in self.row(u).iter().enumerate() {
                    if w != 0.0 && !seen[v] {
                        seen[v] = true;
                        stack.push(v);
                    }
                }
            }
        }
        count
    }

    /// Relabels nodes so that new node `i` is old node `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.n);
        let n = self.n;
        let mut weights = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                weights[i * n + j] = self.weight(perm[i], perm[j]);
            }
        }
        Self {
            n,
            weights,
            node_ids: self
                .node_ids
                .as_ref()
                .map(|ids| perm.iter().map(|&p| ids[p].clone()).collect()),
        }
    }

    /// Dissimilarity `d_ij = 1 - w_ij` off the diagonal, zero on it.
    pub fn distance_matrix(&self) -> DistanceMatrix {
        distance_from_adjacency(self)
    }
}

fn check_weight(w: f64, i: usize, j: usize) -> Result<()> {
    if !(0.0..=1.0).contains(&w) {
        return Err(Error::Invariant(format!("weight {w} at ({i}, {j}) outside [0, 1]")));
    }
    Ok(())
}

/// Dense symmetric dissimilarity matrix with zero diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    dist: Vec<f64>,
}

impl DistanceMatrix {
    pub fn from_dense(n: usize, dist: Vec<f64>) -> Result<Self> {
        if dist.len() != n * n {
            return Err(Error::Dimension {
                expected: n * n,
                got: dist.len(),
            });
        }
        for i in 0..n {
            if dist[i * n + i] != 0.0 {
                return Err(Error::Invariant(format!("nonzero self-distance at {i}")));
            }
            for j in i + 1..n {
                let d = dist[i * n + j];
                if !(0.0..=1.0).contains(&d) || d != dist[j * n + i] {
                    return Err(Error::Invariant(format!("invalid distance {d} at ({i}, {j})")));
                }
            }
        }
        Ok(Self { n, dist })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.n + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.dist[i * self.n..(i + 1) * self.n]
    }

    pub fn permuted(&self, perm: &[usize]) -> Self {
        let n = self.n;
        let mut dist = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                dist[i * n + j] = self.get(perm[i], perm[j]);
            }
        }
        Self { n, dist }
    }
}

pub fn distance_from_adjacency(g: &WeightedGraph) -> DistanceMatrix {
    let n = g.n();
    let mut dist = Vec::with_capacity(n * n);
    for i in 0..n {
        for (j, &w) in g.row(i).iter().enumerate() {
            dist.push(if i == j { 0.0 } else { 1.0 - w });
        }
    }
    DistanceMatrix { n, dist }
}

/// Hard partition of `n` nodes into `k` nonempty clusters labeled `0..k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterAssignment {
    labels: Vec<usize>,
    k: usize,
}

impl ClusterAssignment {
    /// Accepts labels already in `0..k` with every label used.
    pub fn new(labels: Vec<usize>) -> Result<Self> {
        let k = labels.iter().max().map_or(0, |&m| m + 1);
        let mut used = vec![false; k];
        for &l in &labels {
            used[l] = true;
        }
        if let Some(empty) = used.iter().position(|&u| !u) {
            return Err(Error::Invariant(format!("cluster {empty} of {k} is empty")));
        }
        Ok(Self { labels, k })
    }

    /// Compacts arbitrary labels to `0..k` in order of first appearance.
    pub fn from_raw_labels(raw: &[usize]) -> Self {
        let mut map = std::collections::HashMap::new();
        let labels = raw
            .iter()
            .map(|l| {
                let next = map.len();
                *map.entry(*l).or_insert(next)
            })
            .collect();
        Self { labels, k: map.len() }
    }

    /// Contiguous blocks: `sizes[0]` nodes in cluster 0, then cluster 1, ...
    pub fn from_block_sizes(sizes: &[usize]) -> Result<Self> {
        let labels = sizes
            .iter()
            .enumerate()
            .flat_map(|(b, &s)| std::iter::repeat_n(b, s))
            .collect();
        Self::new(labels)
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> usize {
        self.labels[i]
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &l in &self.labels {
            sizes[l] += 1;
        }
        sizes
    }

    pub fn members(&self, cluster: usize) -> Vec<usize> {
        (0..self.n()).filter(|&i| self.labels[i] == cluster).collect()
    }

    /// Relabels clusters by descending size; ties keep the cluster whose
    /// lowest-index member comes first.
    pub fn relabeled_by_size(&self) -> Self {
        let sizes = self.sizes();
        let mut first = vec![usize::MAX; self.k];
        for (i, &l) in self.labels.iter().enumerate() {
            first[l] = first[l].min(i);
        }
        let mut order: Vec<usize> = (0..self.k).collect();
        order.sort_by(|&a, &b| sizes[b].cmp(&sizes[a]).then(first[a].cmp(&first[b])));
        let mut new_of = vec![0; self.k];
        for (new, &old) in order.iter().enumerate() {
            new_of[old] = new;
        }
        Self {
            labels: self.labels.iter().map(|&l| new_of[l]).collect(),
            k: self.k,
        }
    }

    pub fn permuted(&self, perm: &[usize]) -> Self {
        Self {
            labels: perm.iter().map(|&p| self.labels[p]).collect(),
            k: self.k,
        }
    }
}

/// 2-D points with ground-truth ring labels.
#[derive(Clone, Debug, PartialEq)]
pub struct PointCloud {
    pub points: Vec<[f64; 2]>,
    pub labels: Vec<usize>,
}

impl PointCloud {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn truth(&self) -> ClusterAssignment {
        ClusterAssignment::from_raw_labels(&self.labels)
    }
}

/// Points on concentric circles: `counts[r]` points at radius `radii[r]`,
/// angles uniform on `[0, 2pi)`. No radial noise.
pub fn generate_rings(counts: &[usize], radii: &[f64], seed: u64) -> Result<PointCloud> {
    if counts.len() != radii.len() {
        return Err(Error::Config(format!(
            "{} ring counts but {} radii",
            counts.len(),
            radii.len()
        )));
    }
    if counts.is_empty() || counts.contains(&0) {
        return Err(Error::Config("every ring needs at least one point".into()));
    }
    if radii.iter().any(|r| !r.is_finite() || *r < 0.0) {
        return Err(Error::Config("ring radii must be finite and non-negative".into()));
    }
    let mut rng = rng::stream(seed);
    let n: usize = counts.iter().sum();
    let mut points = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for (ring, (&count, &radius)) in counts.iter().zip(radii).enumerate() {
        for _ in 0..count {
            let theta = TAU * rng.random::<f64>();
            points.push([radius * theta.cos(), radius * theta.sin()]);
            labels.push(ring);
        }
    }
    Ok(PointCloud { points, labels })
}

/// Similarity graph over a point cloud: Euclidean distances min-max
/// rescaled over all `i < j` pairs, weight = 1 - rescaled distance.
pub fn adjacency_from_points(pc: &PointCloud) -> Result<WeightedGraph> {
    let n = pc.len();
    if n < 2 {
        return Err(Error::Degenerate("need at least two points".into()));
    }
    let dist = |i: usize, j: usize| {
        let [x0, y0] = pc.points[i];
        let [x1, y1] = pc.points[j];
        (x0 - x1).hypot(y0 - y1)
    };
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..n {
        for j in i + 1..n {
            let d = dist(i, j);
            lo = lo.min(d);
            hi = hi.max(d);
        }
    }
    let range = hi - lo;
    if !(range > 0.0) {
        return Err(Error::Degenerate("all pairwise distances are equal (zero range)".into()));
    }
    let mut g = WeightedGraph::empty(n);
    for i in 0..n {
        for j in i + 1..n {
            let rescaled = ((dist(i, j) - lo) / range).clamp(0.0, 1.0);
            g.set_pair(i, j, 1.0 - rescaled);
        }
    }
    Ok(g)
}
