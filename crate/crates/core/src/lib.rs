//! Momentum low-rank compression for memory-efficient optimizers.
//!
//! The crate stores optimizer moments as randomized-SVD factors instead of
//! full matrices. It provides the dense linear algebra, the compressed and
//! exact optimizers, two synthetic problem families, spectral and memory
//! metrics, and a deterministic experiment harness.

pub mod compress;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod metrics;
pub mod optim;
pub mod problems;
pub mod rng;
pub mod rsvd;

pub use error::{Error, Result};
pub use linalg::{Matrix, SvdResult};
pub use optim::{
    optimizer_step, HyperParams, OptimizerKind, OptimizerState, StateFootprint, StepReport,
};
pub use rng::RngStream;
pub use rsvd::{reconstruct, rsvd, FactoredMomentum};
