use thiserror::Error;

use crate::molgraph::MAX_HEAVY_ATOMS;

/// Crate-wide error type.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("valence violation at atom {atom}: {msg}")]
    ValenceViolation { atom: usize, msg: String },
    #[error("invalid molecule: {0}")]
    InvalidMolecule(String),
    #[error("syntax error at byte {offset}: {msg}")]
    Syntax { offset: usize, msg: String },
    #[error("unsupported feature at byte {offset}: {feature}")]
    Unsupported { offset: usize, feature: String },
    #[error("kekulization failure: {0}")]
    Kekulization(String),
    #[error("molecule exceeds {MAX_HEAVY_ATOMS} heavy atoms")]
    TooLarge,
    #[error("molecule is disconnected")]
    Disconnected,
    #[error("malformed graph: {0}")]
    Structure(String),
    #[error("malformed formula: {0}")]
    Formula(String),
    #[error("fingerprint radius {0} outside 1..=4")]
    FingerprintRadius(u32),
    #[error("empty fingerprint")]
    EmptyFingerprint,
    #[error("empty population")]
    EmptyPopulation,
    #[error("empty reference set")]
    EmptyReference,
    #[error("empty history")]
    EmptyHistory,
    #[error("oracle budget exhausted")]
    BudgetExhausted,
    #[error("no atom with a free valence")]
    NoFreeValence,
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("oracle failure: {0}")]
    Oracle(String),
}

pub type Result<T> = std::result::Result<T, Error>;
