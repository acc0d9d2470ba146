#![doc = include_str!("../../../book/src/overview.md")]

pub mod ensemble;
pub mod error;
pub mod hermitian;
pub mod io;
pub mod lsm;
pub mod sdp;
pub mod symmetry;

pub use ensemble::{
    correct_detection_probability, per_state_detection, DensityOperator, Ensemble, Povm,
};
pub use error::{Error, Result};
pub use hermitian::{
    eigh, factorize, is_psd, matrix_inv_sqrt, matrix_pinv_sqrt, matrix_sqrt, ComplexMatrix,
    EigenDecomposition, HermitianMatrix,
};
pub use lsm::{
    certificate_from_condition, check_square_root_condition, least_squares_measurement,
    LsmResult, OptimalityReport,
};
pub use sdp::{
    recover_povm, solve_cgu, solve_gu, solve_optimal, verify_optimality, Certificate, Solution,
    SolverOptions, VerificationReport,
};
pub use symmetry::{
    build_group, cgu_gu_lsm_single_generator, cgu_lsm_generators, check_phase_commutation,
    generate_cgu, generate_gu, gu_lsm_generator, symmetrize_povm, CguSpec, GuSpec, UnitaryGroup,
};

/// The long-form guide, kept in sync with the book: each chapter's examples
/// run as doc-tests.
pub mod guide {
    #[doc = include_str!("../../../book/src/lsm.md")]
    pub mod least_squares_measurement {}

    #[doc = include_str!("../../../book/src/symmetry.md")]
    pub mod symmetric_state_sets {}

    #[doc = include_str!("../../../book/src/sdp.md")]
    pub mod optimal_measurement {}

    #[doc = include_str!("../../../book/src/cli.md")]
    pub mod command_line {}
}
