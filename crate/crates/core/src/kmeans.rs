//! Lloyd's k-means with k-means++ seeding and multiple restarts.

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::ClusterAssignment;
use crate::matrix::{squared_distance, DenseMatrix};
use crate::rng;

/// How initial centers are chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum KMeansInit {
    /// k-means++ (D^2 sampling).
    #[default]
    PlusPlus,
    /// `k` distinct points drawn uniformly (Forgy).
    Random,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KMeansConfig {
    pub init: KMeansInit,
    pub restarts: usize,
    pub max_iter: usize,
    /// Stop when the relative decrease of the objective falls below this.
    pub tol: f64,
}

impl Default for KMeansConfig {
    fn default() -> Self {
        Self {
            init: KMeansInit::PlusPlus,
            restarts: 25,
            max_iter: 300,
            tol: 1e-8,
        }
    }
}

#[derive(Clone, Debug)]
pub struct KMeansResult {
    pub assignment: ClusterAssignment,
    pub centroids: DenseMatrix,
    /// Within-cluster sum of squared distances.
    pub objective: f64,
    pub iterations: usize,
}

/// Clusters the rows of `points` into `k` groups. The best of
/// `config.restarts` seeded runs (lowest objective, earliest on ties) wins.
pub fn kmeans(points: &DenseMatrix, k: usize, seed: u64, config: &KMeansConfig) -> Result<KMeansResult> {
    let n = points.rows();
    if k == 0 || k > n {
        return Err(Error::Config(format!("k-means needs 1 <= K <= n, got K = {k}, n = {n}")));
    }
    if config.restarts == 0 {
        return Err(Error::Config("k-means needs at least one restart".into()));
    }
    let mut rng = rng::stream(seed);
    let mut best: Option<Run> = None;
    for _ in 0..config.restarts {
        let centers = match config.init {
            KMeansInit::PlusPlus => init_plus_plus(points, k, &mut rng),
            KMeansInit::Random => init_random(points, k, &mut rng),
        };
        let run = lloyd(points, centers, config);
        if best.as_ref().is_none_or(|b| run.objective < b.objective) {
            best = Some(run);
        }
    }
    let best = best.expect("at least one restart");
    Ok(KMeansResult {
        assignment: ClusterAssignment::new(best.labels)?,
        centroids: best.centroids,
        objective: best.objective,
        iterations: best.iterations,
    })
}

struct Run {
    labels: Vec<usize>,
    centroids: DenseMatrix,
    objective: f64,
    iterations: usize,
    #[cfg_attr(not(test), allow(dead_code))]
    trace: Vec<f64>,
}

/// k-means++: first center uniform, each next one drawn with probability
/// proportional to the squared distance to the nearest chosen center.
/// Once every point coincides with a center, remaining centers are drawn
/// uniformly among points not yet chosen.
fn init_plus_plus<R: Rng>(points: &DenseMatrix, k: usize, rng: &mut R) -> DenseMatrix {
    let n = points.rows();
    let dim = points.cols();
    let mut centroids = DenseMatrix::zeros(k, dim);
    let mut chosen = vec![false; n];
    let first = rng.random_range(0..n);
    chosen[first] = true;
    centroids.row_mut(0).copy_from_slice(points.row(first));
    let mut nearest: Vec<f64> = (0..n)
        .map(|i| squared_distance(points.row(i), points.row(first)))
        .collect();
    for c in 1..k {
        let total: f64 = nearest.iter().sum();
        let pick = if total > 0.0 {
            let target = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut pick = None;
            for (i, &d) in nearest.iter().enumerate() {
                acc += d;
                if d > 0.0 && acc > target {
                    pick = Some(i);
                    break;
                }
            }
            // Rounding can leave `acc` a hair below `target`; fall back to
            // the last point with positive weight.
            pick.unwrap_or_else(|| nearest.iter().rposition(|&d| d > 0.0).unwrap())
        } else {
            let free: Vec<usize> = (0..n).filter(|&i| !chosen[i]).collect();
            free[rng.random_range(0..free.len())]
        };
        chosen[pick] = true;
        centroids.row_mut(c).copy_from_slice(points.row(pick));
        for (i, d) in nearest.iter_mut().enumerate() {
            *d = d.min(squared_distance(points.row(i), points.row(pick)));
        }
    }
    centroids
}

fn init_random<R: Rng>(points: &DenseMatrix, k: usize, rng: &mut R) -> DenseMatrix {
    let picks = rand::seq::index::sample(rng, points.rows(), k);
    let mut centroids = DenseMatrix::zeros(k, points.cols());
    for (c, i) in picks.iter().enumerate() {
        centroids.row_mut(c).copy_from_slice(points.row(i));
    }
    centroids
}

fn assign(points: &DenseMatrix, centroids: &DenseMatrix, labels: &mut [usize], dists: &mut [f64]) -> f64 {
    let mut objective = 0.0;
    for i in 0..points.rows() {
        let p = points.row(i);
        let mut best = (0, f64::INFINITY);
        for c in 0..centroids.rows() {
            let d = squared_distance(p, centroids.row(c));
            if d < best.1 {
                best = (c, d);
            }
        }
        labels[i] = best.0;
        dists[i] = best.1;
        objective += best.1;
    }
    objective
}

/// Gives every empty cluster a point: the point farthest from its current
/// centroid among clusters with more than one member.
fn repair_empty(points: &DenseMatrix, centroids: &mut DenseMatrix, labels: &mut [usize], dists: &mut [f64]) -> bool {
    let k = centroids.rows();
    let mut counts = vec![0usize; k];
    for &l in labels.iter() {
        counts[l] += 1;
    }
    let mut repaired = false;
    for c in 0..k {
        if counts[c] > 0 {
            continue;
        }
        let donor = (0..labels.len())
            .filter(|&i| counts[labels[i]] > 1)
            .fold(None::<usize>, |best, i| match best {
                Some(b) if dists[b] >= dists[i] => Some(b),
                _ => Some(i),
            })
            .expect("k <= n leaves a cluster with a spare point");
        counts[labels[donor]] -= 1;
        counts[c] = 1;
        labels[donor] = c;
        dists[donor] = 0.0;
        centroids.row_mut(c).copy_from_slice(points.row(donor));
        repaired = true;
    }
    repaired
}

fn update_centroids(points: &DenseMatrix, labels: &[usize], centroids: &mut DenseMatrix) {
    let k = centroids.rows();
    let dim = points.cols();
    let mut sums = DenseMatrix::zeros(k, dim);
    let mut counts = vec![0usize; k];
    for (i, &l) in labels.iter().enumerate() {
        counts[l] += 1;
        for (s, &x) in sums.row_mut(l).iter_mut().zip(points.row(i)) {
            *s += x;
        }
    }
    for c in 0..k {
        if counts[c] == 0 {
            continue;
        }
        let inv = 1.0 / counts[c] as f64;
        for (dst, &s) in centroids.row_mut(c).iter_mut().zip(sums.row(c)) {
            *dst = s * inv;
        }
    }
}

fn objective_of(points: &DenseMatrix, labels: &[usize], centroids: &DenseMatrix) -> f64 {
    labels
        .iter()
        .enumerate()
        .map(|(i, &l)| squared_distance(points.row(i), centroids.row(l)))
        .sum()
}

fn lloyd(points: &DenseMatrix, mut centroids: DenseMatrix, config: &KMeansConfig) -> Run {
    let n = points.rows();
    let mut labels = vec![0usize; n];
    let mut dists = vec![0.0; n];
    let mut previous = f64::INFINITY;
    let mut iterations = 0;
    let mut trace = Vec::new();
    while iterations < config.max_iter {
        iterations += 1;
        assign(points, &centroids, &mut labels, &mut dists);
        repair_empty(points, &mut centroids, &mut labels, &mut dists);
        update_centroids(points, &labels, &mut centroids);
        let objective = objective_of(points, &labels, &centroids);
        trace.push(objective);
        let converged = previous.is_finite() && previous - objective <= config.tol * previous;
        previous = objective;
        if converged {
            break;
        }
    }
    Run {
        objective: previous,
        labels,
        centroids,
        iterations,
        trace,
    }
}

/// Objective after one additional assign + update step from a result.
pub fn one_more_step_objective(points: &DenseMatrix, result: &KMeansResult) -> f64 {
    let n = points.rows();
    let mut labels = vec![0usize; n];
    let mut dists = vec![0.0; n];
    let mut centroids = result.centroids.clone();
    assign(points, &centroids, &mut labels, &mut dists);
    repair_empty(points, &mut centroids, &mut labels, &mut dists);
    update_centroids(points, &labels, &mut centroids);
    objective_of(points, &labels, &centroids)
}
