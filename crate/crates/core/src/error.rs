use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModuliError {
    /// Non-finite coordinates, points off the unit sphere, zero vectors.
    #[error("invalid input: {0}")]
    Input(String),

    /// A norm description that does not define an origin-symmetric convex gauge.
    #[error("invalid norm representation: {0}")]
    Representation(String),

    /// Arguments that violate an operation's precondition (for example a
    /// direction that is not quasi-orthogonal to the base point).
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A parameter outside the legal domain of a modulus.
    #[error("{kind}: eps = {eps} is outside the domain {domain}")]
    Domain { kind: String, eps: f64, domain: String },

    /// The search found no feasible configuration.
    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, ModuliError>;
