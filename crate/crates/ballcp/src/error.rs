//! Error type shared across modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Elements from different descriptors were combined.
    #[error("descriptor mismatch: {0}")]
    DescriptorMismatch(String),

    /// The operation is not defined for this descriptor kind.
    #[error("unsupported operation: {0}")]
    Unsupported(String),

    /// A matrix expected to be Hermitian is not, beyond tolerance.
    #[error("not Hermitian: defect {defect:.3e} exceeds {tol:.3e} (‖H‖ = {norm:.3e})")]
    NotHermitian { defect: f64, tol: f64, norm: f64 },

    /// An argument left the domain where the map is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// A semigroup table failed validation.
    #[error("invalid semigroup table: {0}")]
    InvalidTable(String),

    /// An absolute value failed validation.
    #[error("invalid absolute value: {0}")]
    InvalidAbsoluteValue(String),

    /// A Gram matrix required to be PSD failed the check.
    #[error("not positive definite: min eigenvalue {min_eig:.6e} (dim {dim})")]
    NotPositiveDefinite { min_eig: f64, dim: usize },

    /// The GNS relation solve left a residual above tolerance.
    #[error(
        "ill-conditioned GNS solve: relation residual {residual:.3e}, rank {rank}, \
         smallest kept Gram eigenvalue {min_kept:.3e}"
    )]
    IllConditioned { residual: f64, rank: usize, min_kept: f64 },

    /// Training samples do not span the required coordinate space.
    #[error("rank-deficient training span: achieved {achieved} of {needed}; request more samples")]
    RankDeficient { achieved: usize, needed: usize },

    /// Polynomial fitting failed at the requested degree cap.
    #[error("degree cap too small: relative fit residual {residual:.3e} at cap {cap}")]
    DegreeCapTooSmall { cap: usize, residual: f64 },

    /// The map offered as a representation is not multiplicative.
    #[error("not a representation: {0}")]
    NotARepresentation(String),

    /// A dilation input was not minimal.
    #[error("dilation not minimal: {0}; re-run gns_construct")]
    NotMinimal(String),

    /// Configuration parsing or validation failure.
    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
