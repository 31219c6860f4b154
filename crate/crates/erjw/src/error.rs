use thiserror::Error;

/// Errors shared across the engine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A reduced fraction ended up with an even denominator, i.e. the value
    /// is not in Z localized at 2. Every quantity in this engine is 2-local,
    /// so this always signals an upstream arithmetic bug.
    #[error("not 2-local: reduced denominator {0} is even")]
    NotTwoLocal(String),

    /// An operation needed series or filtration data beyond the truncation
    /// the caller provided.
    #[error("truncation exceeded: needed length {needed} but truncated at {available}")]
    TruncationExceeded { needed: u32, available: u32 },

    /// Lead term of the zero element requested.
    #[error("zero element has no lead term")]
    ZeroElement,

    /// A symmetric-function key must have weakly decreasing 2i_k + eps_k, all positive.
    #[error("key {0} does not satisfy property A")]
    PropertyAViolation(String),

    /// A graded d1 stage found a source whose image vanishes in the current
    /// page, or two sources with the same image.
    #[error("stage {stage} not injective: {reason}")]
    StageNotInjective { stage: usize, reason: String },

    /// The v1h-rewrite had no admissible index for a class that must not survive.
    #[error("no admissible rewrite index for {0}")]
    RewriteFailed(String),

    /// The truncation window is too small to finish the requested computation.
    #[error("window exhausted: {0}")]
    WindowExhausted(String),

    /// The spectral sequence failed to converge to zero.
    #[error("page 8 is nonzero: {0} generators survive")]
    PageEightNonzero(usize),

    /// Invalid run configuration.
    #[error("usage: {0}")]
    Usage(String),
}

pub type Result<T> = std::result::Result<T, Error>;
