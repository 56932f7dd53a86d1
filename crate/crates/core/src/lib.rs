//! Matrix indexes of Hermitian positive-definite moment matrices.
//!
//! Given a compactly supported measure μ on ℂ (or a Toeplitz symbol, or an
//! explicit Hermitian matrix), this crate computes the truncation sequences of
//! the indexes
//!
//! - λ(M): limit of the smallest eigenvalues,
//! - γ(M): squared M-distance from 1 to the polynomials vanishing at 0,
//!   equal to 1/Σ|φ_k(0)|² over the orthonormal polynomials,
//! - α(M): infimum of the monic polynomial norms ‖Φ_n‖² (determinant ratios),
//! - γ_{z0}(M): the shifted index 1/K(z0,z0) built from the
//!   Christoffel–Darboux kernel,
//!
//! estimates their limits with explicit stopping rules, audits the order
//! relations between them, and turns the results into three-valued verdicts:
//! does a circle measure satisfy the Szegő condition, are polynomials dense
//! in L²(μ) on a Jordan curve, is a point a bounded point evaluation.
//!
//! The pipeline is moment quadrature → memoizing matrix oracle → incremental
//! Cholesky → kernel/pivot sequences → limit estimates → verdicts, with an
//! independent LU route (`linalg`, `gamma_direct_ls`) and a binomial
//! similarity route (`similarity`) cross-checking the main path.

pub mod error;
pub mod hermitian;
pub mod indexes;
pub mod linalg;
pub mod matrix_source;
pub mod measures;
pub mod orthopoly;
pub mod similarity;

pub use error::{Error, Result, Warning};
pub use hermitian::{
    cholesky, cholesky_extend, cholesky_with_tol, smallest_eigenvalue, CholeskyFactor,
    HermitianSection, DEFAULT_PIVOT_TOL_REL,
};
pub use indexes::{
    alpha_sequence, audit_inequalities, bpe_map, bpe_verdict, density_verdict, estimate_limit,
    estimate_limit_lenient, gamma_at_sequence, gamma_direct_ls, gamma_sequence, lambda_sequence,
    szego_verdict, Answer,
    AuditReport, AuditRow, GammaMap, GridSpec, IndexKind, IndexSequence, LimitConfig,
    LimitEstimate, LimitStatus, Question, Verdict,
};
pub use matrix_source::{geometric_symbol, MatrixOracle, MomentOracle};
pub use measures::{
    szego_integral, Atom, CurveFamily, DensitySpec, MeasureSpec, Moment, QuadratureConfig,
    SumPart,
};
pub use orthopoly::{kernel_diag, monic_norms, orthonormal_coeffs, KernelValue, OrthonormalBasis};
pub use similarity::{
    binomial_matrix, conjugate_section, gamma_shift_crosscheck, inverse_binomial, AffineMap,
    BinomialMatrix, ShiftCrosscheck, MAX_BINOMIAL_ORDER,
};

/// Version string embedded in CLI reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
