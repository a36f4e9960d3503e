use crate::fock::Space;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid dimension {0}: the truncated Fock space needs at least 2 levels")]
    InvalidDimension(usize),

    #[error("space mismatch: expected {expected}, got {got}")]
    SpaceMismatch { expected: Space, got: Space },

    #[error("operator is not Hermitian-flagged / Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("matrix is not unitary (max deviation {0:.3e})")]
    NotUnitary(f64),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("closed form requires delta_ratio = 0, got {0}")]
    ClosedFormNotApplicable(f64),

    #[error("eta must be positive, got {0}")]
    BadEta(f64),

    #[error("atomic preparation not normalized: a² + b² = {0}")]
    BadAtomPrep(f64),

    #[error("coefficients of an atomic preparation must be nonnegative")]
    NegativePrepCoefficient,

    #[error("cat protocol expects the Lamb-Dicke regime, got eta = {0} > 0.1")]
    OutsidePaperRegime(f64),

    #[error("measurement branch has probability {0:.3e}; cannot post-select on it")]
    ZeroProbabilityBranch(f64),

    #[error("odd coherent superposition is undefined at alpha = 0")]
    DegenerateCat,

    #[error("probability {0} outside [0, 1]")]
    InvalidProbability(f64),

    #[error("the two probe preparations must isolate the cosine and sine traces")]
    BadProbePreparation,

    #[error(
        "control point k = {k:.6} needs omega_ratio = {required:.6}, above the declared bound {bound:.6}"
    )]
    InfeasibleControl { k: f64, required: f64, bound: f64 },

    #[error("quadrature angle undefined at tau = {0}: the radial variable k vanishes there")]
    UndefinedAngle(f64),

    #[error("shots must be at least 1")]
    NoShots,

    #[error("characteristic-function grid is empty")]
    EmptyGrid,

    #[error("grid is missing required point (k = {k:.6}, theta = {theta:.6})")]
    MissingGridPoint { k: f64, theta: f64 },

    #[error("an exact-mode grid is required: {0}")]
    ExactGridRequired(&'static str),

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("invalid quadrature spec: {0}")]
    BadQuadSpec(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
