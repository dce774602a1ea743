use thiserror::Error;

/// Errors shared by the game, dynamics and diagnostics modules.
#[derive(Debug, Error)]
pub enum Error {
    /// Dimension or indexing mismatch between a game and a strategy profile.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// Invalid or inconsistent configuration (empty schedule, non-interior
    /// reference policy, missing information-set policy, ...).
    #[error("configuration error: {0}")]
    Config(String),

    /// Non-finite value encountered during an update. Carries a dump of the
    /// offending state so a failed run can be diagnosed post-mortem.
    #[error("numeric failure: {what}; state: {dump}")]
    Numeric { what: String, dump: String },

    /// A hand-constructed game tree violates a structural invariant
    /// (tree-ness, chance distributions, perfect recall).
    #[error("invalid game tree: {0}")]
    InvalidTree(String),
}

pub type Result<T> = std::result::Result<T, Error>;
