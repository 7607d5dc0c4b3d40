//! molga: a budgeted genetic-algorithm engine for molecular graphs.
//!
//! The crate provides a molecular graph model with valence rules and
//! canonical forms, a SMILES subset parser and writer, circular
//! fingerprints with Tanimoto similarity, valence-safe mutation and
//! crossover operators, rank-quantile parent sampling, a budget-accounted
//! GA loop, built-in objective functions, and the evaluation metrics for
//! generation and optimization benchmarks.

mod error;

pub mod engine;
pub mod fingerprint;
pub mod genops;
pub mod metrics;
pub mod molgraph;
pub mod oracles;
pub mod reference;
pub mod sampler;
pub mod scalar;
pub mod smiles;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Default score scalar used by the CLI, bundled configs and type aliases.
pub type Score = f64;
