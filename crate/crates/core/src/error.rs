use thiserror::Error;

/// Errors raised by the solver library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum QdetError {
    #[error("quaternion is zero (norm {norm:e}); no inverse, argument or logarithm")]
    ZeroDivisor { norm: f64 },
    #[error("matrix is {rows}x{cols}, expected a square matrix")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is singular (p-determinant {pdet:e})")]
    Singular { pdet: f64 },
    #[error("characteristic coefficient {index} has imaginary part {imag:e}")]
    NonRealCoefficient { index: usize, imag: f64 },
    #[error("{size}x{size} is above the enumeration guard of {limit}")]
    TooLarge { size: usize, limit: usize },
    #[error("root finding failed: residual {residual:e} exceeds {bound:e}")]
    RootFindingFailed { residual: f64, bound: f64 },
    #[error("{re}{im:+}i is not an eigenvalue of the complex adjoint")]
    NotAnEigenvalue { re: f64, im: f64 },
    #[error("eigenspace exhausted: {found} independent eigenvectors, {requested} requested")]
    DefectiveDirection { found: usize, requested: usize },
    #[error("matrix has only {found} right linearly independent eigenvectors, {needed} needed")]
    Defective { found: usize, needed: usize },
    #[error("t = {t} is not a point of the time scale")]
    NotInScale { t: f64 },
    #[error("empty window [{t0}, {t_end}]")]
    EmptyWindow { t0: f64, t_end: f64 },
    #[error("t = {t} is outside the kappa set; no delta derivative there")]
    OutOfKappa { t: f64 },
    #[error("tabulated function has no value at t = {t}")]
    NotTabulated { t: f64 },
    #[error("not regressive at t = {t}: {detail} (requires 1 + mu(t) p(t) != 0, resp. I + mu(t) A(t) invertible)")]
    NotRegressive { t: f64, detail: String },
    #[error("state is not finite at t = {t}")]
    NonFiniteState { t: f64 },
    #[error("Putzer annihilation failed: |P_m| = {residual:e} exceeds {bound:e}")]
    AnnihilationFailed { residual: f64, bound: f64 },
    #[error("coefficient matrix is time-varying; {0} requires a constant matrix")]
    TimeVarying(&'static str),
    #[error("internal consistency check failed: {0}")]
    Internal(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, QdetError>;
