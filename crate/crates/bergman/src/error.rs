//! Error type shared by the library and the CLI.
//!
//! Variants split into two families: *validation* errors (bad syntax, bad
//! parameters, requests outside a table's range) and *numerical* errors
//! (quadrature that never settled, weights whose moments degenerate). The CLI
//! maps the first family to exit code 1 and the second to exit code 2.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Weight spec string does not match the grammar.
    #[error("weight spec syntax error: {0}")]
    Syntax(String),

    /// Parameter outside its admissible range (t <= -1, B <= 0, ...).
    #[error("parameter out of domain: {0}")]
    Domain(String),

    /// Cutoff weights take a non-cutoff base.
    #[error("cutoff weights cannot be nested")]
    NestedCutoff,

    /// Derivative order beyond what is implemented.
    #[error("derivative order {order} not supported here (max {max})")]
    UnsupportedOrder { order: u32, max: u32 },

    /// An operation needed moments beyond the computed table.
    #[error("moment table too small: need indices up to {needed}, table holds up to {available}")]
    InsufficientRange { needed: usize, available: usize },

    /// Tanh-sinh refinement hit the level cap without meeting the tolerance.
    #[error("quadrature failed to converge for moment n={n} within {levels} levels")]
    QuadratureNonConvergence { n: usize, levels: u32 },

    /// A moment integral came out zero or non-finite.
    #[error("degenerate weight: moment integral vanished or was non-finite at n={0}")]
    DegenerateWeight(usize),

    /// Every sample in a randomized sweep fell below the norm threshold.
    #[error("all samples degenerate (norms below threshold)")]
    DegenerateSamples,

    /// CLI flag validation failure.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors that arise from numerical failure rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::QuadratureNonConvergence { .. }
                | Error::DegenerateWeight(_)
                | Error::DegenerateSamples
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
