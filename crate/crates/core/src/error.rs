use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite coordinate at index {0}")]
    NonFiniteCoordinate(usize),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("qubit index {qubit} out of range for {qubits} qubits")]
    QubitOutOfRange { qubit: usize, qubits: usize },

    #[error("parameter index {index} out of range for {count} parameters")]
    ParameterOutOfRange { index: usize, count: usize },

    #[error("atom counts differ ({left} vs {right}); use w2_squared_general")]
    UnequalAtomCounts { left: usize, right: usize },

    #[error("checkpoint schedules differ between coupled trajectories")]
    ScheduleMismatch,

    #[error("dynamics blow-up: non-finite drift at t = {t}")]
    BlowUp { t: f64 },

    /// Violated precondition on an operation argument.
    #[error("{0}")]
    InvalidInput(String),

    /// Invalid configuration; the message names the offending field.
    #[error("invalid config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("serialization: {0}")]
    Json(#[from] serde_json::Error),

    #[error("config parse: {0}")]
    TomlParse(#[from] toml::de::Error),

    #[error("config write: {0}")]
    TomlWrite(#[from] toml::ser::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
