//! Silhouette widths and the adjusted Rand index.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{ClusterAssignment, DistanceMatrix};
use crate::numeric::{compensated_sum, CompensatedSum};

/// Per-node cohesion `a`, separation `b`, width `s`, and their mean.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SilhouetteReport {
    pub global: f64,
    pub per_node: Vec<f64>,
    pub per_node_a: Vec<f64>,
    pub per_node_b: Vec<f64>,
}

/// Silhouette of a hard partition under a precomputed dissimilarity.
///
/// `a_i` is the mean distance to the other members of `i`'s cluster and
/// `b_i` the smallest mean distance to any other cluster. Nodes in singleton
/// clusters get `s_i = 0` (their `a_i` is reported as 0). When
/// `a_i = b_i = 0` the width is also 0. The global score is the plain mean
/// over all nodes, singletons included.
pub fn silhouette(d: &DistanceMatrix, z: &ClusterAssignment) -> Result<SilhouetteReport> {
    if d.n() != z.n() {
        return Err(Error::Dimension {
            expected: d.n(),
            got: z.n(),
        });
    }
    let k = z.k();
    if k < 2 {
        return Err(Error::UndefinedIndex(k));
    }
    let sizes = z.sizes();
    let labels = z.labels();

    let nodes: Vec<(f64, f64, f64)> = (0..d.n())
        .into_par_iter()
        .map(|i| {
            let own = labels[i];
            let mut sums = vec![CompensatedSum::new(); k];
            for (j, &dij) in d.row(i).iter().enumerate() {
                if j != i {
                    sums[labels[j]].add(dij);
                }
            }
            let b = (0..k)
                .filter(|&c| c != own)
                .map(|c| sums[c].value() / sizes[c] as f64)
                .fold(f64::INFINITY, f64::min);
            if sizes[own] == 1 {
                return (0.0, b, 0.0);
            }
            let a = sums[own].value() / (sizes[own] - 1) as f64;
            let denom = a.max(b);
            let s = if denom > 0.0 { ((b - a) / denom).clamp(-1.0, 1.0) } else { 0.0 };
            (a, b, s)
        })
        .collect();

    let per_node: Vec<f64> = nodes.iter().map(|t| t.2).collect();
    let global = compensated_sum(per_node.iter().copied()) / per_node.len() as f64;
    Ok(SilhouetteReport {
        global,
        per_node,
        per_node_a: nodes.iter().map(|t| t.0).collect(),
        per_node_b: nodes.iter().map(|t| t.1).collect(),
    })
}

fn choose2(x: u64) -> i128 {
    let x = x as i128;
    x * (x - 1) / 2
}

/// Hubert-Arabie adjusted Rand index.
///
/// Computed as an exact integer ratio
/// `2 (T * index - a * b) / (T (a + b) - 2 a b)` with `T = C(n, 2)` and
/// rounded once. When the denominator vanishes (both partitions trivial)
/// the result is 1 if the partitions coincide up to relabeling, else 0.
pub fn adjusted_rand_index(z1: &ClusterAssignment, z2: &ClusterAssignment) -> Result<f64> {
    if z1.n() != z2.n() {
        return Err(Error::Dimension {
            expected: z1.n(),
            got: z2.n(),
        });
    }
    let (k1, k2) = (z1.k(), z2.k());
    let mut table = vec![0u64; k1 * k2];
    for (&a, &b) in z1.labels().iter().zip(z2.labels()) {
        table[a * k2 + b] += 1;
    }
    let index: i128 = table.iter().map(|&c| choose2(c)).sum();
    let a: i128 = z1.sizes().iter().map(|&c| choose2(c as u64)).sum();
    let b: i128 = z2.sizes().iter().map(|&c| choose2(c as u64)).sum();
    let total = choose2(z1.n() as u64);
    let num = 2 * (total * index - a * b);
    let den = total * (a + b) - 2 * a * b;
    if den == 0 {
        return Ok(if same_partition(z1, z2) { 1.0 } else { 0.0 });
    }
    Ok(num as f64 / den as f64)
}

fn same_partition(z1: &ClusterAssignment, z2: &ClusterAssignment) -> bool {
    ClusterAssignment::from_raw_labels(z1.labels()) == ClusterAssignment::from_raw_labels(z2.labels())
}
