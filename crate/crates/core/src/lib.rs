//! Random-projection flipping probabilities and the structure-aware
//! zero-one loss generalization bounds built on them.
//!
//! The crate is organised bottom-up:
//!
//! * [`flipkernel`]: exact flipping probability `f_k(θ)`, its Chernoff
//!   bounds, the induced loss `min(1, 2 f_k)` and its derivative.
//! * [`projection`]: random projection matrices and the Monte-Carlo
//!   flip-rate oracle.
//! * [`bounds`]: evaluators for the compressive and dataspace bounds,
//!   Gaussian width estimation and sufficient-`k` calculators.
//! * [`optimizer`]: the bound-minimizing classifier, low-dimensional ERM
//!   and the L_q-regularised logistic baseline.
//! * [`harness`]: dataset ingestion, persistence and experiment runners.
//!
//! Data-parallel loops go through [`par`], which falls back to sequential
//! execution when the `parallel` feature is disabled. Results never depend
//! on the degree of parallelism.

pub mod bounds;
pub mod dataset;
pub mod error;
pub mod flipkernel;
pub mod harness;
pub mod linalg;
pub mod optimizer;
pub mod par;
pub mod projection;
pub mod rng;

pub use dataset::Dataset;
pub use error::{Error, Result};
pub use linalg::Matrix;
