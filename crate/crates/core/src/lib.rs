//! Community detection on weighted networks with the number of communities
//! chosen by maximizing the global silhouette of a spectral clustering.
//!
//! Modules:
//! - [`graph`]: graph, distance and partition types; ring point clouds.
//! - [`sbm`]: stochastic block model samplers.
//! - [`metrics`]: silhouette widths and the adjusted Rand index.
//! - [`spectral`]: normalized Laplacian embedding, k-means, K selection.
//! - [`harness`]: scenario replication, aggregation and suite output.
//! - [`airline`]: directed reachability network preprocessing and analysis.

pub mod airline;
pub mod edgelist;
pub mod error;
pub mod graph;
pub mod harness;
pub mod kmeans;
pub mod matrix;
pub mod metrics;
pub mod numeric;
pub mod rng;
pub mod sbm;
pub mod spectral;
pub mod suites;

pub use error::{Error, Result};
pub use graph::{ClusterAssignment, DistanceMatrix, PointCloud, WeightedGraph};
pub use metrics::{adjusted_rand_index, silhouette, SilhouetteReport};
pub use spectral::{select_k, KSelectionResult, SelectKOptions};

/// Crate version, echoed into output manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
