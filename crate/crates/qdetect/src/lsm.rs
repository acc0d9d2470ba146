//! The least-squares (square-root) measurement, its optimality condition,
//! and the closed-form dual certificate available when the condition holds.
//!
//! For an ensemble with weighted factors `psi_i = sqrt(p_i) phi_i` and Gram
//! operator `W = Psi Psi*`, the LSM factors are `mu_i = W^{-1/2} psi_i` and
//! the measurement operators are `Sigma_i = mu_i mu_i*`. If every product
//! `psi_i* W^{-1/2} psi_i` equals a common `alpha I`, the LSM is the
//! minimum-error measurement and `X = alpha W^{1/2}` certifies it.

use crate::ensemble::{Ensemble, Povm};
use crate::error::{Error, Result};
use crate::hermitian::{
    matrix_inv_sqrt, matrix_sqrt, ComplexMatrix, HermitianMatrix, RANK_TOL_DEFAULT,
};

/// Default relative gate on the square-root condition; tight enough that the
/// downstream certificate verification at 1e-8 is not starved.
pub const COND_TOL_DEFAULT: f64 = 1e-8;

/// Output of [`least_squares_measurement`].
#[derive(Debug, Clone)]
pub struct LsmResult {
    /// `T = (Psi Psi*)^{-1/2}`.
    pub transform: HermitianMatrix,
    /// Gram operator `W = Psi Psi*`.
    pub gram: HermitianMatrix,
    /// Measurement factors `mu_i = T psi_i`.
    pub factors: Vec<ComplexMatrix>,
    /// `Sigma_i = mu_i mu_i*`, completing to identity.
    pub povm: Povm,
}

/// Evaluation of the square-root optimality condition.
#[derive(Debug, Clone)]
pub struct OptimalityReport {
    pub condition_holds: bool,
    /// The common scalar when the condition holds; for rank-deficient states
    /// each product must equal `alpha I` of its own block size.
    pub alpha: f64,
    /// The products `psi_i* T psi_i`.
    pub per_state_matrices: Vec<HermitianMatrix>,
    /// Largest `|| psi_i* T psi_i - alpha I ||_F`.
    pub max_deviation: f64,
}

/// Construct the LSM for an ensemble whose states jointly span the space.
pub fn least_squares_measurement(e: &Ensemble) -> Result<LsmResult> {
    let gram = e.gram();
    let transform = matrix_inv_sqrt(&gram, RANK_TOL_DEFAULT)?;
    let factors: Vec<ComplexMatrix> = e
        .weighted_factors()
        .iter()
        .map(|psi| transform.as_matrix().mul(psi))
        .collect();
    let operators: Vec<HermitianMatrix> = factors
        .iter()
        .map(|mu| HermitianMatrix::symmetrized(mu.mul(&mu.adjoint())))
        .collect();
    let povm = Povm::new(operators)?;
    Ok(LsmResult { transform, gram, factors, povm })
}

/// Evaluate `psi_i* T psi_i = alpha I` for all states. A failed condition is
/// a report, not an error.
///
/// `alpha` is extracted as the mean diagonal of the first product, which is
/// symmetric and robust to 1-ulp asymmetries; `cond_tol` is relative to
/// `alpha`.
pub fn check_square_root_condition(
    e: &Ensemble,
    lsm: &LsmResult,
    cond_tol: f64,
) -> Result<OptimalityReport> {
    let t = lsm.transform.as_matrix();
    let mut per_state_matrices = Vec::with_capacity(e.len());
    for psi in e.weighted_factors() {
        let prod = psi.adjoint().mul(t).mul(psi);
        per_state_matrices.push(HermitianMatrix::symmetrized(prod));
    }
    let first = &per_state_matrices[0];
    let alpha = (0..first.dim()).map(|i| first.get(i, i).re).sum::<f64>()
        / first.dim().max(1) as f64;
    let mut max_deviation = 0.0f64;
    for prod in &per_state_matrices {
        let dev = prod
            .sub(&HermitianMatrix::identity(prod.dim()).scale(alpha))
            .frobenius_norm();
        max_deviation = max_deviation.max(dev);
    }
    let condition_holds = max_deviation <= cond_tol * alpha.abs().max(1e-300);
    Ok(OptimalityReport { condition_holds, alpha, per_state_matrices, max_deviation })
}

/// The certificate `X = alpha W^{1/2}`, valid exactly when the square-root
/// condition holds: it satisfies `X >= psi_i psi_i*` and
/// `(X - psi_i psi_i*) mu_i mu_i* = 0`.
pub fn certificate_from_condition(
    _e: &Ensemble,
    lsm: &LsmResult,
    report: &OptimalityReport,
) -> Result<HermitianMatrix> {
    if !report.condition_holds {
        return Err(Error::ConditionNotMet { max_deviation: report.max_deviation });
    }
    Ok(matrix_sqrt(&lsm.gram)?.scale(report.alpha))
}
