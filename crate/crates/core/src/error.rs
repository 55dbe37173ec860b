use thiserror::Error;

/// Errors raised across the simulator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("amplitude count {got} does not match 2^{num_qubits}")]
    DimensionMismatch { num_qubits: usize, got: usize },
    #[error("state has (near) zero norm")]
    ZeroVector,
    #[error("{requested} qubits exceeds the register capacity of {max}")]
    CapacityExceeded { requested: usize, max: usize },
    #[error("qubit {qubit} out of range for a {num_qubits}-qubit state")]
    IndexOutOfRange { qubit: usize, num_qubits: usize },
    #[error("control and target are the same qubit ({0})")]
    SameQubit(usize),
    #[error("invalid measurement basis: {0}")]
    InvalidBasis(String),
    #[error("unknown state label `{0}`")]
    UnknownLabel(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid outcome: {0}")]
    InvalidOutcome(String),
    #[error("outcome does not belong to the {0} basis")]
    BasisMismatch(String),
    #[error("attack `{attack}` expects {expected} transit qubit(s), got {got}")]
    ArityMismatch {
        attack: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("public transcript is missing {0}")]
    MissingTranscript(&'static str),
    #[error("no exact analysis for scheme `{scheme}` with attack `{attack}`")]
    UnsupportedPair {
        scheme: &'static str,
        attack: &'static str,
    },
    #[error("invalid counts: {successes} successes out of {trials} trials")]
    InvalidCounts { successes: u64, trials: u64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
