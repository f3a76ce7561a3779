//! Recovery of block-constant matrices observed through noisy discrete
//! channels with erasures.
//!
//! A hidden matrix is constant on every block formed by a row cluster and a
//! column cluster. Each entry passes through a discrete memoryless channel
//! and is then erased independently with some probability. This crate
//! provides:
//!
//! * the random block-constant ensemble and the channel model ([`model`],
//!   [`channel`]),
//! * the two-stage estimator: pairwise normalized-Hamming clustering with a
//!   threshold, then per-block majority or maximum-likelihood decoding
//!   ([`clustering`], [`decode`]),
//! * exact error formulas and all computable bounds: the per-sample
//!   reliability constant, the cluster-area recovery threshold, fill-error
//!   sandwich bounds, clustering-error bounds, and Chernoff exponents for
//!   general alphabets ([`bounds`]),
//! * a deterministic experiment harness with Monte Carlo trials, parameter
//!   sweeps, and CSV/SVG emission ([`harness`]).
//!
//! Everything stochastic is a pure function of explicit 64-bit seeds, so
//! every result is reproducible bit-for-bit across runs, platforms, and
//! thread counts.

pub mod bounds;
pub mod channel;
pub mod clustering;
pub mod decode;
mod error;
pub mod harness;
pub mod model;
pub mod rng;

pub use error::{Error, Result};
