use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    #[error("CFL multiplier must be a positive half-integer, got {0}")]
    InvalidCflMultiplier(f64),

    #[error("site index {index:?} out of range for lattice of {points:?} points")]
    IndexOutOfRange {
        index: [usize; 3],
        points: [usize; 3],
    },

    #[error("field has zero norm")]
    ZeroNorm,

    #[error("field is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("amplitude buffer has length {got}, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("potential returned a non-finite value at {position:?}, t = {time}")]
    NonFinitePotential { position: [f64; 3], time: f64 },

    #[error(
        "streaming coefficient {coefficient} with N* = {n_star} is not an integer number of sites"
    )]
    NonIntegerShift { coefficient: String, n_star: f64 },

    #[error("invalid splitting scheme: {0}")]
    InvalidScheme(String),

    #[error("Suzuki constraint violated: {0}")]
    SuzukiConstraint(String),

    #[error("invalid wire {wire} for a register of {n_qubits} qubits")]
    InvalidWire { wire: usize, n_qubits: usize },

    #[error("wire {0} is used more than once in a gate")]
    OverlappingWires(usize),

    #[error("matrix is not unitary (deviation {0:e})")]
    NotUnitary(f64),

    #[error("need {needed} clean ancillas, only {available} available")]
    InsufficientAncillas { needed: usize, available: usize },

    #[error("ancilla wire {0} is not in |0>")]
    DirtyAncilla(usize),

    #[error("uniformly controlled gate with {controls} controls needs {expected} table entries, got {got}")]
    TableSize {
        controls: usize,
        expected: usize,
        got: usize,
    },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("energy {energy} outside the representable band [-{limit}, {limit}]")]
    EnergyOutOfBand { energy: f64, limit: f64 },

    #[error("projection onto the success outcome has zero probability")]
    ZeroProjection,

    #[error("empty series")]
    EmptySeries,

    #[error("precision {0:e} outside (0, 0.1]")]
    InvalidPrecision(f64),

    #[error("rotation synthesis failed: {0}")]
    Synthesis(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
