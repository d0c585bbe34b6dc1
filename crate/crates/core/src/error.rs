use thiserror::Error;

/// Errors raised anywhere in the simulator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("qubit count {0} outside the supported range 1..=4")]
    QubitCount(usize),

    #[error("matrix is {rows}x{cols}, expected a square power-of-two dimension")]
    Dimension { rows: usize, cols: usize },

    #[error("operands have mismatched dimensions ({0} vs {1})")]
    DimensionMismatch(usize, usize),

    #[error("state is not physical: {0}")]
    Unphysical(String),

    #[error("qubit index {index} out of range for a {n_qubits}-qubit state")]
    QubitOutOfRange { index: usize, n_qubits: usize },

    #[error("qubit indices must be distinct")]
    DuplicateQubit,

    #[error("the set of kept qubits is empty")]
    EmptyKeep,

    #[error("channel acts on {channel} qubit(s) but {given} target(s) were given")]
    ArityMismatch { channel: usize, given: usize },

    #[error("channel is not trace preserving (max deviation {0:e})")]
    NotTracePreserving(f64),

    #[error("channel is not completely positive (Choi eigenvalue {0:e})")]
    NotCompletelyPositive(f64),

    #[error("`{name}` = {value} is out of range, expected {expected}")]
    ParameterRange {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("purification success probability {0:e} is degenerate")]
    DegeneratePurification(f64),

    #[error("fixed-point iteration did not converge within {0} rounds")]
    NoConvergence(usize),

    #[error("invalid station count {0}: M must be at least 2 with M-1 a power of two")]
    InvalidStations(usize),

    #[error("expected {expected} purification success probabilities, got {given}")]
    MissingPurificationProbability { expected: usize, given: usize },

    #[error("calibration failed: {0}")]
    Calibration(String),

    #[error("config line {line}: {message}")]
    ConfigParse { line: usize, message: String },

    #[error("invalid config: {0}")]
    ConfigInvalid(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

/// Checks `lo < value <= hi` (or `lo <= value` when `lo_inclusive`).
pub(crate) fn check_range(
    name: &'static str,
    value: f64,
    lo: f64,
    lo_inclusive: bool,
    hi: f64,
    expected: &'static str,
) -> Result<f64> {
    let lo_ok = if lo_inclusive {
        value >= lo
    } else {
        value > lo
    };
    if value.is_finite() && lo_ok && value <= hi {
        Ok(value)
    } else {
        Err(Error::ParameterRange {
            name,
            value,
            expected,
        })
    }
}
