//! Stochastic block model samplers.
//!
//! All samplers walk node pairs in row-major order (`i < j`) over a single
//! seeded stream. For each pair they draw one uniform for edge presence
//! (skipped in the fully connected sampler) and, if the edge is present, one
//! weight from the block-appropriate distribution. The unweighted sampler is
//! the weighted sampler with both distributions pinned at 1.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{ClusterAssignment, WeightedGraph};
use crate::rng;

/// Cluster-size profile.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SizeProfile {
    /// Equal sizes (differ by at most one).
    Equal,
    /// One dominant cluster holding `dominant` of the nodes; the remainder is
    /// split evenly among the other clusters.
    Imbalanced { dominant: f64 },
}

impl SizeProfile {
    /// The imbalanced profile used in the simulation grid: 80/10/10 for
    /// three clusters and 65/5x7 for eight.
    pub fn imbalanced_for(k: usize) -> Result<Self> {
        match k {
            3 => Ok(Self::Imbalanced { dominant: 0.8 }),
            8 => Ok(Self::Imbalanced { dominant: 0.65 }),
            _ => Err(Error::Config(format!(
                "no default imbalanced profile for K = {k}; use an explicit dominant fraction"
            ))),
        }
    }
}

/// Cluster sizes for `n` nodes, returned in descending order. Fractional
/// quotas are rounded by the largest-remainder method so they sum to `n`.
pub fn allocate_sizes(n: usize, k: usize, profile: SizeProfile) -> Result<Vec<usize>> {
    if k < 2 || n < k {
        return Err(Error::Config(format!("need n >= K >= 2, got n = {n}, K = {k}")));
    }
    let fractions: Vec<f64> = match profile {
        SizeProfile::Equal => vec![1.0 / k as f64; k],
        SizeProfile::Imbalanced { dominant } => {
            if !(0.0 < dominant && dominant < 1.0) {
                return Err(Error::Config(format!("dominant fraction {dominant} not in (0, 1)")));
            }
            let rest = (1.0 - dominant) / (k - 1) as f64;
            std::iter::once(dominant)
                .chain(std::iter::repeat_n(rest, k - 1))
                .collect()
        }
    };
    // Quotas are formed in exact-ish arithmetic then nudged: tiny float error
    // (0.8 * 240 = 191.99999...) must not cost a node.
    let quotas: Vec<f64> = fractions.iter().map(|f| f * n as f64).collect();
    let mut sizes: Vec<usize> = quotas.iter().map(|q| (q + 1e-9).floor() as usize).collect();
    let assigned: usize = sizes.iter().sum();
    let mut order: Vec<usize> = (0..k).collect();
    let remainder = |i: usize| (quotas[i] + 1e-9).fract();
    order.sort_by(|&a, &b| remainder(b).total_cmp(&remainder(a)).then(a.cmp(&b)));
    for &i in order.iter().take(n.saturating_sub(assigned)) {
        sizes[i] += 1;
    }
    if let Some(pos) = sizes.iter().position(|&s| s == 0) {
        return Err(Error::Config(format!(
            "cluster {pos} rounds to zero nodes (n = {n}, K = {k})"
        )));
    }
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    Ok(sizes)
}

/// Symmetric block link-probability matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockProbMatrix {
    k: usize,
    probs: Vec<f64>,
}

/// One designated block pair whose link probability differs from the rest.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeakPair {
    pub a: usize,
    pub b: usize,
    pub p: f64,
}

impl BlockProbMatrix {
    pub fn build(k: usize, p_win: f64, p_btw: f64, weak_pair: Option<WeakPair>) -> Result<Self> {
        check_prob("p_win", p_win)?;
        check_prob("p_btw", p_btw)?;
        let mut probs = vec![p_btw; k * k];
        for i in 0..k {
            probs[i * k + i] = p_win;
        }
        if let Some(WeakPair { a, b, p }) = weak_pair {
            check_prob("weak pair p", p)?;
            if a == b || a >= k || b >= k {
                return Err(Error::Config(format!(
                    "weak pair ({a}, {b}) must name two distinct blocks below K = {k}"
                )));
            }
            probs[a * k + b] = p;
            probs[b * k + a] = p;
        }
        Ok(Self { k, probs })
    }

    /// Validates an explicit row-major matrix.
    pub fn from_dense(k: usize, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != k * k {
            return Err(Error::Dimension {
                expected: k * k,
                got: probs.len(),
            });
        }
        for i in 0..k {
            for j in 0..k {
                check_prob("block probability", probs[i * k + j])?;
                if probs[i * k + j] != probs[j * k + i] {
                    return Err(Error::Config(format!("block matrix asymmetric at ({i}, {j})")));
                }
            }
        }
        Ok(Self { k, probs })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.probs[a * self.k + b]
    }
}

fn check_prob(name: &str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Config(format!("{name} = {p} outside [0, 1]")));
    }
    Ok(())
}

/// Uniform distribution on `[lo, hi]` for edge weights.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightDistribution {
    pub lo: f64,
    pub hi: f64,
}

impl WeightDistribution {
    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        let d = Self { lo, hi };
        d.validate()?;
        Ok(d)
    }

    /// Point mass at 1 (unweighted edges).
    pub const UNIT: Self = Self { lo: 1.0, hi: 1.0 };

    pub fn validate(&self) -> Result<()> {
        if !(0.0 <= self.lo && self.lo <= self.hi && self.hi <= 1.0) {
            return Err(Error::Config(format!(
                "weight distribution Unif({}, {}) must satisfy 0 <= lo <= hi <= 1",
                self.lo, self.hi
            )));
        }
        Ok(())
    }

    pub fn mean(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    #[inline]
    fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        (self.lo + (self.hi - self.lo) * u).min(self.hi)
    }
}

impl std::fmt::Display for WeightDistribution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Unif({}, {})", self.lo, self.hi)
    }
}

fn check_sizes(sizes: &[usize], k: Option<usize>) -> Result<ClusterAssignment> {
    if sizes.is_empty() || sizes.contains(&0) {
        return Err(Error::Config("block sizes must be nonempty and positive".into()));
    }
    if let Some(k) = k {
        if k != sizes.len() {
            return Err(Error::Dimension {
                expected: k,
                got: sizes.len(),
            });
        }
    }
    ClusterAssignment::from_block_sizes(sizes)
}

fn sample_pairs(
    truth: &ClusterAssignment,
    presence: Option<&BlockProbMatrix>,
    w_win: WeightDistribution,
    w_btw: WeightDistribution,
    seed: u64,
) -> Result<WeightedGraph> {
    w_win.validate()?;
    w_btw.validate()?;
    let n = truth.n();
    let labels = truth.labels();
    let mut rng = rng::stream(seed);
    let mut g = WeightedGraph::empty(n);
    for i in 0..n {
        for j in i + 1..n {
            let (bi, bj) = (labels[i], labels[j]);
            if let Some(p) = presence {
                let u: f64 = rng.random();
                if u >= p.get(bi, bj) {
                    continue;
                }
            }
            let dist = if bi == bj { &w_win } else { &w_btw };
            g.set_pair(i, j, dist.sample(&mut rng));
        }
    }
    Ok(g)
}

/// Unweighted SBM: each pair is an edge of weight 1 with its block-pair
/// probability. Nodes are labeled block-contiguously.
pub fn sample_unweighted(
    sizes: &[usize],
    probs: &BlockProbMatrix,
    seed: u64,
) -> Result<(WeightedGraph, ClusterAssignment)> {
    sample_weighted(sizes, probs, WeightDistribution::UNIT, WeightDistribution::UNIT, seed)
}

/// Weighted SBM: presence as in the unweighted model, weights drawn from
/// `w_win` within blocks and `w_btw` between blocks.
pub fn sample_weighted(
    sizes: &[usize],
    probs: &BlockProbMatrix,
    w_win: WeightDistribution,
    w_btw: WeightDistribution,
    seed: u64,
) -> Result<(WeightedGraph, ClusterAssignment)> {
    let truth = check_sizes(sizes, Some(probs.k()))?;
    let g = sample_pairs(&truth, Some(probs), w_win, w_btw, seed)?;
    Ok((g, truth))
}

/// Every pair linked; weights from `w_win` within blocks, `w_btw` between.
pub fn sample_fully_connected(
    sizes: &[usize],
    w_win: WeightDistribution,
    w_btw: WeightDistribution,
    seed: u64,
) -> Result<(WeightedGraph, ClusterAssignment)> {
    let truth = check_sizes(sizes, None)?;
    let g = sample_pairs(&truth, None, w_win, w_btw, seed)?;
    Ok((g, truth))
}
