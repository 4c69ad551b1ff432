use alloc::vec::Vec;

use crate::sdp::SdpStatus;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max |a_ij - conj(a_ji)| = {asymmetry:e})")]
    NotHermitian { asymmetry: f64 },

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },

    #[error("matrix is singular or nearly so (|det| = {det:e})")]
    Singular { det: f64 },

    #[error("shape mismatch for {what}: expected {expected}, found {found}")]
    ShapeMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("{what} must not be empty")]
    Empty { what: &'static str },

    #[error("{what} too large: {n} exceeds the limit of {max}")]
    TooLarge {
        what: &'static str,
        n: usize,
        max: usize,
    },

    #[error("effect is not between 0 and I: offending eigenvalues {eigenvalues:?}")]
    InvalidEffect { eigenvalues: Vec<f64> },

    #[error("observable {index} has operator norm {norm} > 1")]
    InvalidObservable { index: usize, norm: f64 },

    #[error("noise parameter {0} is outside [0, 1]")]
    NoiseOutOfRange(f64),

    #[error("game parameter {name} = {value} is outside [0, 1]")]
    ParameterOutOfRange { name: &'static str, value: f64 },

    #[error("degenerate game: classical bias is zero")]
    DegenerateGame,

    #[error("the zero tuple has no finite noise threshold")]
    ZeroTuple,

    #[error("malformed SDP problem: {0}")]
    InvalidProblem(&'static str),

    #[error(
        "SDP solver stopped with status {status:?} after {iterations} iterations \
         (primal residual {primal_residual:e}, dual residual {dual_residual:e}, gap {gap:e})"
    )]
    Solver {
        status: SdpStatus,
        iterations: usize,
        primal_residual: f64,
        dual_residual: f64,
        gap: f64,
    },

    #[error(
        "joint POVM certificate rejected: min eigenvalue {min_eigenvalue:e}, \
         |sum - I| = {sum_residual:e}, marginal residuals {marginal_residuals:?}"
    )]
    InvalidCertificate {
        min_eigenvalue: f64,
        sum_residual: f64,
        marginal_residuals: Vec<f64>,
    },
}
