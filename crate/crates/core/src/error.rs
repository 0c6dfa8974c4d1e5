use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("qubit index out of range: {index} (register has {n_qubits} qubits)")]
    QubitIndexOutOfRange { index: usize, n_qubits: usize },

    #[error("duplicate qubit index {0}")]
    DuplicateQubitIndex(usize),

    #[error("qubit subset must be nonempty")]
    EmptySubset,

    #[error("matrix is not square: {rows} rows, row {row} has {cols} entries")]
    NotSquare {
        rows: usize,
        row: usize,
        cols: usize,
    },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("length must be a power of two (got {0})")]
    LengthNotPowerOfTwo(usize),

    #[error("qubit count mismatch: expected {expected}, found {found}")]
    QubitCountMismatch { expected: usize, found: usize },

    #[error("entries must be finite")]
    NonFinite,

    #[error("not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("state is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("trace is not 1 (got {0})")]
    InvalidTrace(f64),

    #[error("not positive semidefinite (min eigenvalue {0:e})")]
    NotPositive(f64),

    #[error("{name} = {value} is outside {range}")]
    ParameterOutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("invalid permutation {0:?}")]
    InvalidPermutation(Vec<usize>),

    #[error("malformed state JSON: {0}")]
    MalformedJson(String),

    #[error("unknown state spec `{0}`")]
    UnknownStateSpec(String),

    #[error("qudit normalization out of scope (d = {0})")]
    QuditNormalization(usize),

    #[error("density matrix has rank 0")]
    ZeroRank,

    #[error("matrix columns are not orthonormal (deviation {0:e})")]
    NotIsometry(f64),

    #[error("Jacobi iteration did not converge after {0} sweeps")]
    EigenNoConvergence(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
