//! Friends & Smokers benchmark: world generator, evidence split, PR-AUC and
//! the domain-size generalization experiment.

mod evidence;
mod experiment;
mod generate;
mod metrics;

pub use evidence::make_evidence;
pub use experiment::{mean_auc, run_experiment, write_gnuplot, ExperimentConfig, FsGibbs};
pub use generate::{generate_fs, FsParams, FsWorld};
pub use metrics::{average_precision, pr_auc};

use thiserror::Error;

use crate::grounder::GroundError;
use crate::inference::InferenceError;
use crate::learning::LearnError;

/// The shipped model: smoking causes cancer, friends smoke alike, and a
/// singleton for every predicate.
pub const FS_MODEL: &str = include_str!("../../models/fs.mln");

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BenchError {
    #[error("domain size must be at least 2, got {0}")]
    InvalidSize(usize),
    #[error("no positive labels")]
    NoPositives,
    #[error("no score for {0}")]
    MissingScore(String),
    #[error("invalid experiment configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Learn(#[from] LearnError),
    #[error(transparent)]
    Ground(#[from] GroundError),
    #[error(transparent)]
    Inference(#[from] InferenceError),
}

/// SplitMix64 finalizer over a base seed and a path of labels.
pub(crate) fn derive_seed(base: u64, path: &[u64]) -> u64 {
    let mut x = base;
    for &p in path {
        x ^= p
            .wrapping_add(0x9e37_79b9_7f4a_7c15)
            .wrapping_add(x << 6)
            .wrapping_add(x >> 2);
        x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
        x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        x ^= x >> 31;
    }
    x
}
