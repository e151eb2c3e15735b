use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("qubit count {0} outside supported range 1..=12")]
    QubitCount(usize),
    #[error("qubit {qubit} out of range for a {num_qubits}-qubit state")]
    QubitOutOfRange { qubit: usize, num_qubits: usize },
    #[error("target qubits must be distinct, got {0:?}")]
    DuplicateQubits(Vec<usize>),
    #[error("matrix is not unitary (deviation {0:e})")]
    NotUnitary(f64),
    #[error("gate acts on {expected} qubits but {got} targets were given")]
    TargetArity { expected: usize, got: usize },
    #[error("amplitude vector is not normalized (norm² = {0})")]
    NotNormalized(f64),
    #[error("length {0} is not a power of two")]
    BadLength(usize),
    #[error("forced outcome has probability {0:e}, below the branch threshold")]
    ImpossibleOutcome(f64),
    #[error("dimension mismatch: {0} vs {1} qubits")]
    DimensionMismatch(usize, usize),
    #[error("cannot discard every qubit of the state")]
    DiscardAll,
    #[error("nothing to discard")]
    EmptyDiscard,
    #[error("probability {0} outside [0, 1]")]
    InvalidProbability(f64),
    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),
    #[error("invalid code parameters: {0}")]
    InvalidCode(String),
    #[error("output qubit lost")]
    OutputQubitLost,
    #[error("code block {block} fully lost")]
    BlockFullyLost { block: usize },
    #[error("syndrome is outside the single-error table")]
    Unidentifiable,
    #[error("loss tolerance violated: logical qubit {0} lost every photon, each loss-affected logical qubit must keep at least one")]
    LogicalQubitDestroyed(String),
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for errors describing a violated simulation precondition rather
    /// than malformed input.
    pub fn is_precondition_violation(&self) -> bool {
        matches!(
            self,
            Error::OutputQubitLost
                | Error::BlockFullyLost { .. }
                | Error::LogicalQubitDestroyed(_)
                | Error::Unidentifiable
                | Error::ImpossibleOutcome(_)
        )
    }
}
