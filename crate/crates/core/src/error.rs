use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("amplitude array has length {got}, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("state has zero norm")]
    ZeroNorm,

    #[error("qubit {qubit} out of range for a {n_qubits}-qubit state")]
    QubitOutOfRange { qubit: usize, n_qubits: usize },

    #[error("qubit {0} appears more than once")]
    DuplicateQubit(usize),

    #[error("empty factor list")]
    EmptyFactors,

    #[error("invalid size {got}: need at least {min}")]
    BadSize { got: usize, min: usize },

    #[error("parameters have squared norm {0}, expected 1")]
    BadNorm(f64),

    #[error("invalid axis ({0}, {1}, {2})")]
    InvalidAxis(f64, f64, f64),

    #[error("outcome has probability {probability:e}{}", step_suffix(*.step))]
    ZeroProbabilityOutcome { probability: f64, step: Option<usize> },

    #[error("denominator of the sequential expectation vanishes")]
    ZeroDenominator,

    #[error("target qubit {0} is also measured")]
    QubitOverlap(usize),

    #[error("qubit {qubit} is not maximally entangled (entanglement distance {ed})")]
    NotMaximallyEntangled { qubit: usize, ed: f64 },

    #[error("pair needs two distinct qubits, got {0} twice")]
    SameQubit(usize),

    #[error("measured qubit {0} listed among the targets")]
    NuInTargets(usize),

    #[error("matrix is not symmetric (asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("{n_qubits} qubits exceeds the limit of {max}")]
    TooLarge { n_qubits: usize, max: usize },

    #[error("expectation value has imaginary residue {0:e}")]
    ImaginaryResidue(f64),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn step_suffix(step: Option<usize>) -> String {
    match step {
        Some(k) => format!(" at measurement step {k}"),
        None => String::new(),
    }
}

impl Error {
    /// Whether the failure comes from malformed input rather than a numeric
    /// contract violation.
    pub fn is_input_error(&self) -> bool {
        matches!(self, Error::Parse(_) | Error::Io(_) | Error::Json(_))
    }
}
