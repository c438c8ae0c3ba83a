//! Reference implementations used by the acceptance checks.

#[path = "../../core/tests/common/mod.rs"]
mod oracles;

pub use oracles::brute_force_ari;
