//! Error types shared across the simulation crate.

use thiserror::Error;

/// Errors produced by line, ladder, oracle, and scenario operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input violated a documented precondition (negative component
    /// value, zero segment length, degenerate line parameters, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A damage case failed validation (duplicate component, zero amount,
    /// generation index out of range).
    #[error("invalid damage case: {0}")]
    InvalidDamage(String),

    /// The analytic line solution is undefined for this boundary
    /// configuration (e.g. matched-load denominators vanish).
    #[error("singular configuration: {0}")]
    SingularConfiguration(&'static str),

    /// A single impedance/gain step hit a zero denominator. Raised by the
    /// step operations, which do not know their generation index; the
    /// ladder sweep converts this into [`Error::SingularNetwork`].
    #[error("singular step: {0}")]
    SingularStep(&'static str),

    /// The ladder recursion encountered a zero denominator at a specific
    /// generation.
    #[error("singular network at generation {generation}: {reason}")]
    SingularNetwork {
        generation: usize,
        reason: &'static str,
    },

    /// A node has zero voltage gain, so no voltage can be anchored there.
    #[error("singular gain at node {node}")]
    SingularGain { node: usize },

    /// A node has zero impedance, so its current is unbounded.
    #[error("singular impedance at node {node}")]
    SingularImpedance { node: usize },

    /// The assembled nodal system is singular (zero pivot during
    /// elimination).
    #[error("singular nodal system: zero pivot at row {row}")]
    SingularSystem { row: usize },

    /// The requested configuration is valid but deliberately unsupported
    /// (e.g. train wheelbase spacing different from the segment length).
    #[error("unsupported configuration: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
