use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix contains non-finite entries")]
    NotFinite,

    #[error("matrix is not Hermitian (asymmetry {asymmetry:.3e} exceeds tolerance {tol:.3e})")]
    NotHermitian { asymmetry: f64, tol: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("matrix is singular at the requested rank tolerance (min eigenvalue {min_eigenvalue:.3e})")]
    Singular { min_eigenvalue: f64 },

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal residual {off_diagonal:.3e})")]
    EighNoConvergence { sweeps: usize, off_diagonal: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid priors: {0}")]
    PriorsInvalid(String),

    #[error("state is not a density operator: {0}")]
    InvalidDensity(String),

    #[error("joint eigenvectors of the ensemble span only a {rank}-dimensional subspace of a {dim}-dimensional space (deficiency {deficiency}); restate the problem on the spanned subspace")]
    SpanDeficient {
        rank: usize,
        dim: usize,
        deficiency: usize,
    },

    #[error("POVM invalid: {0}")]
    InvalidPovm(String),

    #[error("element {index} is not unitary (residual {residual:.3e})")]
    NotUnitary { index: usize, residual: f64 },

    #[error("group is not closed: product of elements {i} and {j} matches no element (nearest residual {residual:.3e})")]
    NotClosed { i: usize, j: usize, residual: f64 },

    #[error("no identity element in the proposed group")]
    NoIdentity,

    #[error("elements {i} and {j} coincide (distance {distance:.3e}); a group has no repeated elements")]
    DuplicateElement { i: usize, j: usize, distance: f64 },

    #[error("operator count {got} does not match group order x generator count = {expected}")]
    CountMismatch { expected: usize, got: usize },

    #[error("square-root optimality condition does not hold (max deviation {max_deviation:.3e})")]
    ConditionNotMet { max_deviation: f64 },

    #[error("generator factors are not an orbit of the given group (residual {residual:.3e})")]
    GeneratorsNotGu { residual: f64 },

    #[error("the two groups do not commute up to a phase (worst residual {residual:.3e})")]
    NotPhaseCommuting { residual: f64 },

    #[error("solver hit the iteration cap {max_iters} (duality gap {gap:.3e})")]
    MaxIterations { max_iters: usize, gap: f64 },

    #[error("numerical breakdown in the solver: {0}")]
    NumericalBreakdown(String),

    #[error("cannot recover a POVM from the certificate (completion residual {residual:.3e})")]
    RecoveryInfeasible { residual: f64 },

    #[error("invalid solver options: {0}")]
    InvalidOptions(String),

    #[error("problem file invalid: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
