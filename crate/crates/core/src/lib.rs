//! Spectral seriation of networks and scoring of sequences against
//! community partitions.
//!
//! The pipeline is: build a [`Graph`], pick a [`MatrixKind`], compute a
//! spectral [`Ordering`] or [`Partition`], then compare them with the
//! label continuity error in [`metrics`].

pub mod clustering;
pub mod eigen;
pub mod error;
pub mod experiment;
pub mod graph;
pub mod io;
pub mod matrices;
pub mod metrics;
pub mod models;
pub mod ordering;
pub mod seed;

pub use clustering::{spectral_cluster, Partition};
pub use eigen::{eig_symmetric, Spectrum, SpectrumResult, Which};
pub use error::{Error, Result};
pub use experiment::{run_orgm_sweep, run_real, run_sbm_sweep, ResultRecord, SweepConfig};
pub use graph::{load_edge_list, Graph};
pub use matrices::{build_matrix, MatrixKind, MatrixSpec};
pub use metrics::{lce, max_lce, mean_lce, nmi, normalized_lce, var_lce};
pub use models::{orgm_generate, sbm_generate, OrgmParams, SbmParams};
pub use ordering::{h2, rank_discretize, spectral_order, Ordering};
