//! Community-density personalized differential privacy for health networks.
//!
//! Link communities give every user a density-driven privacy level; records
//! are released once per community with Laplace or exponential noise, the
//! copies coupled through one noise ladder so that combining them never
//! beats the least noisy copy; and each community keeps a proof-of-work
//! sub-chain of its releases.

pub mod community;
pub mod config;
pub mod coupling;
pub mod dp;
pub mod experiments;
pub mod graph;
pub mod ledger;
pub mod rng;

use thiserror::Error;

pub use community::{
    detect_communities, detect_communities_with, AssignmentPolicy, Community, CommunityError, CommunityPartition,
    Dendrogram, DetectOptions,
};
pub use config::Config;
pub use coupling::{coupled_release, CouplingError, Estimator, LinkageScenario, NoiseLadder, NoiseSource};
pub use dp::{
    sanitize_pipeline, DpError, EpsilonMapping, MappingParams, Mechanism, Payload, PipelineConfig, PrivacyAssignment,
    SanitizedRelease, SensitiveRecord,
};
pub use experiments::{run_experiment, Artifact, Experiment};
pub use graph::{Edge, GraphError, HealthGraph, NodeId};
pub use ledger::{Block, BlockHeader, DifficultyRule, LedgerError, SubChain, Transaction};

/// Any failure surfaced by the library's top-level entry points.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Community(#[from] CommunityError),
    #[error(transparent)]
    Dp(#[from] DpError),
    #[error(transparent)]
    Coupling(#[from] CouplingError),
    #[error(transparent)]
    Ledger(#[from] LedgerError),
    #[error("config: {0}")]
    Config(String),
    #[error("unknown experiment `{0}`")]
    UnknownExperiment(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
