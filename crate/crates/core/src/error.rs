//! Error and warning types shared across the crate.

use num_complex::Complex64;

/// Errors surfaced by measure ingestion, matrix oracles and the numerical kernels.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("negative density {value:.3e} at parameter t = {parameter:.6}")]
    NegativeDensity { parameter: f64, value: f64 },

    #[error("unsupported transform: {0}")]
    UnsupportedTransform(String),

    #[error("entry ({j},{k}) out of range for explicit matrix of size {size}")]
    IndexOutOfRange { j: usize, k: usize, size: usize },

    #[error("matrix is not Hermitian (max deviation {max_dev:.3e})")]
    NotHermitian { max_dev: f64 },

    #[error("matrix is not positive definite at truncation order {failing_order}")]
    NotPositiveDefinite { failing_order: usize },

    #[error("eigenvalue bisection did not converge; best bracket [{lo:.17e}, {hi:.17e}]")]
    NoConvergence { lo: f64, hi: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("kernel evaluation overflows at order {order} for |z0| = {abs_z0}")]
    Overflow { order: usize, abs_z0: f64 },

    #[error("sequence too short: need at least {needed} values, got {got}")]
    TooShort { needed: usize, got: usize },

    #[error("singular system in least-squares solve")]
    SingularSystem,

    #[error("measure is not supported on the unit circle: {0}")]
    NotOnCircle(String),

    #[error("density verdict not applicable: {0}")]
    NotApplicable(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Non-fatal conditions recorded alongside results. Jobs collect these into
/// their report; a warning never changes a computed value.
#[derive(Debug, Clone, PartialEq)]
pub enum Warning {
    /// Quadrature hit `max_nodes` before meeting the relative tolerance.
    NonConvergedQuadrature { j: usize, k: usize, error_bound: f64 },
    /// An incremental factorization sweep stopped early.
    EarlyBreakdown { failing_order: usize },
    /// Two-path agreement worse than expected, usually conditioning.
    ConditioningGap { max_rel_gap: f64 },
    /// Szegő geometric-mean oracle disagrees with the γ limit.
    SzegoCrosscheckMismatch { gamma: f64, integral: f64 },
    /// Kernel value overflowed at a grid point; the point is reported as 0.
    KernelOverflow { z0: Complex64 },
}

impl std::fmt::Display for Warning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Warning::NonConvergedQuadrature { j, k, error_bound } => write!(
                f,
                "non-converged quadrature for moment ({j},{k}); error bound {error_bound:.3e}"
            ),
            Warning::EarlyBreakdown { failing_order } => write!(
                f,
                "factorization not positive definite at order {failing_order}; sweep truncated"
            ),
            Warning::ConditioningGap { max_rel_gap } => write!(
                f,
                "two-path relative gap {max_rel_gap:.3e} exceeds 1e-6; conditioning suspect"
            ),
            Warning::SzegoCrosscheckMismatch { gamma, integral } => write!(
                f,
                "gamma limit {gamma:.9} disagrees with Szegő integral {integral:.9}"
            ),
            Warning::KernelOverflow { z0 } => {
                write!(f, "kernel overflow at z0 = {} + {}i; value reported as 0", z0.re, z0.im)
            }
        }
    }
}
