//! Seed derivation. Every random stream in the crate is a ChaCha8 generator
//! keyed by a 64-bit seed derived from a master seed and a path of labels,
//! so a replicate's stream does not depend on which thread runs it or when.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

/// Generator algorithm and version, echoed into run manifests.
pub const GENERATOR: &str = "ChaCha8 (rand_chacha 0.9), seeds derived by SHA-256";

pub type Stream = ChaCha8Rng;

pub fn stream(seed: u64) -> Stream {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Seed for one replicate of one scenario.
pub fn replicate_seed(master_seed: u64, scenario_id: &str, replicate: usize) -> u64 {
    let mut h = Sha256::new();
    h.update(b"replicate");
    h.update(master_seed.to_le_bytes());
    h.update((scenario_id.len() as u64).to_le_bytes());
    h.update(scenario_id.as_bytes());
    h.update((replicate as u64).to_le_bytes());
    fold(h)
}

/// Seed for a named sub-stream of `seed` (e.g. the k-means run at a given K).
pub fn child_seed(seed: u64, label: &str, index: u64) -> u64 {
    let mut h = Sha256::new();
    h.update(b"child");
    h.update(seed.to_le_bytes());
    h.update((label.len() as u64).to_le_bytes());
    h.update(label.as_bytes());
    h.update(index.to_le_bytes());
    fold(h)
}

fn fold(h: Sha256) -> u64 {
    let digest = h.finalize();
    let mut bytes = [0u8; 8];
    bytes.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(bytes)
}
