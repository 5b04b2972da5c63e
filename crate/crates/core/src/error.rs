use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("cannot normalize null state")]
    NullState,

    #[error("unsupported emission order {0} (supported: 1, 2, 3)")]
    UnsupportedOrder(u32),

    #[error("phase must be finite, got {0}")]
    NonFinitePhase(f64),

    #[error("amplitudes not normalized: sum of squared magnitudes is {0}")]
    NotNormalized(f64),

    #[error("substitution rule is not an isometry (deviation {0:.3e})")]
    NotIsometric(f64),

    #[error("matrix is not unitary (deviation {0:.3e})")]
    NotUnitary(f64),

    #[error("matrix is not Hermitian (deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("post-selection impossible: no component with one photon per mode")]
    PostSelectionImpossible,

    #[error("zero-probability projection")]
    ZeroProbability,

    #[error("invalid qubit count {0} (expected 1..=6)")]
    QubitCount(usize),

    #[error("qubit position {position} out of range for {n} qubits")]
    Position { position: usize, n: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("unknown named state {0:?}")]
    UnknownState(String),

    #[error("invalid Pauli word {0:?}")]
    PauliWord(String),

    #[error("probability {0} outside [0, 1]")]
    Probability(f64),

    #[error("overlap bound {0} outside (0, 1)")]
    OverlapBound(f64),

    #[error("not a witness for this target: expectation {0} is non-negative")]
    NotAWitness(f64),

    #[error("witness reduction degenerated: optimal scale {0:.3e} is not positive")]
    DegenerateReduction(f64),

    #[error("reduced witness evaluation needs counts for setting {0}")]
    MissingSetting(char),

    #[error("correlation {0} outside [-1, 1]")]
    Correlation(f64),

    #[error("counts table has zero total")]
    ZeroCounts,

    #[error("invalid measurement setting: {0}")]
    Setting(String),

    #[error("invalid split: {0}")]
    Split(String),

    #[error("golden file parse error at line {line}: {msg}")]
    Golden { line: usize, msg: String },

    #[error("csv: {0}")]
    Csv(String),
}

pub type Result<T> = std::result::Result<T, Error>;
