use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("shape mismatch: expected {expected}, found {found}")]
    ShapeMismatch { expected: String, found: String },

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("matrix is not Hermitian (residual {residual:.3e})")]
    NotHermitian { residual: f64 },

    #[error("matrix is not positive semidefinite: min eigenvalue {min_eigenvalue:.3e} below -{clip_tol:.3e}")]
    NotPsd { min_eigenvalue: f64, clip_tol: f64 },

    #[error("operator is not a contraction: norm {norm:.12}")]
    NotContraction { norm: f64 },

    #[error("no convergence after {steps} steps (last residual {residual:.3e})")]
    NoConvergence { steps: usize, residual: f64 },

    #[error("matrices do not commute (residual {residual:.3e} > tol {tol:.3e})")]
    NotCommuting { residual: f64, tol: f64 },

    #[error("matrix is not normal (residual {residual:.3e} > tol {tol:.3e})")]
    NotNormal { residual: f64, tol: f64 },

    #[error("operator is not pure: spectral radius {spectral_radius:.12} >= 1")]
    NotPure { spectral_radius: f64 },

    #[error("defect space has rank zero")]
    DefectRankZero,

    #[error("monomial degree {degree} exceeds truncation budget {max_degree}")]
    DegreeTooLarge { degree: usize, max_degree: usize },

    #[error("series has {have} coefficients, need at least {needed}")]
    InsufficientCoefficients { needed: usize, have: usize },

    #[error("pencil norm condition violated at symbol {index}: {norm:.12} > 1")]
    PencilNormViolation { index: usize, norm: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
