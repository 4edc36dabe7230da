//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Two input strings agree up to the probe depth and cannot be separated.
    #[error("inputs {i} and {j} agree to depth {depth}: duplicate or probe cap too small")]
    DuplicateInput { i: usize, j: usize, depth: usize },

    #[error("{word} is not a leaf of the tree")]
    NotALeaf { word: String },

    #[error("cannot prune the one-leaf tree")]
    Underflow,

    #[error("depth cap {cap} is below the maximum leaf depth {required}")]
    CapTooSmall { cap: usize, required: usize },

    #[error("cylinder of {prefix} has zero mass under the source measure")]
    ZeroMassPrefix { prefix: String },

    /// Two sampled strings agreed beyond the probe cap; the measure is
    /// presumably not diffuse (or the cap is far too small).
    #[error("sampled strings agree beyond depth {depth}; source measure looks non-diffuse")]
    SeparationDepthExceeded { depth: usize },

    #[error("invalid tree: {0}")]
    InvalidTree(String),

    #[error("invalid source measure: {0}")]
    InvalidMeasure(String),

    #[error("measure has a diffuse component; total boundary mass is not a finite sum")]
    NonAtomic,

    #[error("enumeration would produce {projected} states, above the limit {limit}")]
    Explosion { projected: u64, limit: u64 },

    #[error("requires a diffuse source measure")]
    NotDiffuse,

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
