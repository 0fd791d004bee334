//! Error types shared across the engine.

/// Engine error. The CLI maps `Config`/`Io` to exit code 2 and the
/// data-shaped variants to exit code 3.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Bad configuration: unknown column, absent reference level, flag misuse.
    #[error("configuration error: {0}")]
    Config(String),

    /// A record failed validation; the message carries the 1-based data row.
    #[error("validation error: {0}")]
    Validation(String),

    /// No usable rows after parsing and rejection.
    #[error("empty input: {0}")]
    EmptyInput(String),

    /// Labels contain only one class where both are required.
    #[error("degenerate labels: {0}")]
    DegenerateLabels(String),

    /// Weighted normal equations are singular.
    #[error("rank-deficient system: {0}")]
    RankDeficient(String),

    /// Dimension mismatch between design matrix and coefficients.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// A group selector matched no records.
    #[error("empty group: {0}")]
    EmptyGroup(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
