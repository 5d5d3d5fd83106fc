use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{what} needs {requested} qubits but the dense cap is {cap}")]
    CapExceeded {
        what: &'static str,
        requested: usize,
        cap: usize,
    },

    #[error("custom gate matrix is not unitary (max deviation {deviation:e})")]
    NonUnitaryCustomGate { deviation: f64 },

    #[error("custom gate on {targets} targets needs a {expected}x{expected} matrix, got {rows}x{cols}")]
    CustomShape {
        targets: usize,
        expected: usize,
        rows: usize,
        cols: usize,
    },

    #[error("qubit index {index} out of range for {n_qubits} qubits")]
    IndexOutOfRange { index: usize, n_qubits: usize },

    #[error("qubit {0} listed twice in one gate")]
    DuplicateTarget(usize),

    #[error("gate {gate} expects {expected} targets, got {got}")]
    Arity {
        gate: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("replacement acts on {replacement:?}, original gate on {original:?}")]
    TargetMismatch {
        original: Vec<usize>,
        replacement: Vec<usize>,
    },

    #[error("gate position {position} out of range for a {len}-gate circuit")]
    PositionOutOfRange { position: usize, len: usize },

    #[error("black box does not grant the {0} capability")]
    CapabilityMissing(&'static str),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("batch size must be odd, got {0}")]
    EvenBatch(usize),

    #[error("{gate} is not a Clifford gate")]
    NonCliffordGate { gate: &'static str },

    #[error("no candidate within {depth} replacement(s) matched the black box")]
    NotFound { depth: usize },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: unknown gate `{name}`")]
    UnknownGate { line: usize, name: String },

    #[error("{path}: {message}")]
    Io { path: String, message: String },

    #[error("state vector is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },
}
