use thiserror::Error;

/// Errors raised anywhere in the simulator, protocol engine or audits.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("qubit index {index} out of range for {num_qubits} qubits")]
    QubitOutOfRange { index: usize, num_qubits: usize },

    #[error("gate acts on {expected} qubit(s) but {got} target(s) were given")]
    ArityMismatch { expected: usize, got: usize },

    #[error("target qubits must be distinct")]
    DuplicateTargets,

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("measurement basis eigenstates are not orthogonal (overlap {0:.3e})")]
    DegenerateBasis(f64),

    #[error("random coin {0} outside [0, 1)")]
    InvalidCoin(f64),

    #[error("branch budget of {0} exceeded")]
    BranchBudgetExceeded(usize),

    #[error("matrix is not unitary (deviation {0:.3e})")]
    NotUnitary(f64),

    #[error("angle octant {0} out of range 0..8")]
    InvalidOctant(u8),

    #[error("angle {0} is not a multiple of pi/4")]
    NotAnOctant(f64),

    #[error("octant {octant} is not admissible here: {reason}")]
    InadmissibleAngle { octant: u8, reason: &'static str },

    #[error("unsupported gate for this operation: {0}")]
    UnsupportedGate(String),

    #[error("gadget search exhausted without a match")]
    SearchExhausted,

    #[error("wiring fixture parse error on line {line}: {message}")]
    FixtureParse { line: usize, message: String },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("client capability violation: {0}")]
    CapabilityViolation(String),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("checkpoint {0} out of range")]
    CheckpointOutOfRange(u8),

    #[error("message schedules differ between secrets: {0}")]
    ScheduleMismatch(String),

    #[error("invalid spec string: {0}")]
    InvalidSpec(String),
}

pub type Result<T> = std::result::Result<T, Error>;
