//! Quantum state ensembles, POVMs, and detection probabilities.

use crate::error::{Error, Result};
use crate::hermitian::{
    eigh, factorize, is_psd, ComplexMatrix, HermitianMatrix, RANK_TOL_DEFAULT,
};

/// Tolerance on `tr(rho) = 1` and on priors summing to 1.
pub const TRACE_TOL: f64 = 1e-10;

/// PSD tolerance for density operators and POVM elements.
pub const PSD_TOL: f64 = 1e-9;

/// Frobenius tolerance on POVM completeness. Looser than the construction
/// tolerances because SDP solutions carry solver residual.
pub const COMPLETENESS_TOL: f64 = 1e-9;

/// PSD Hermitian matrix with unit trace: one transmitted state.
#[derive(Debug, Clone)]
pub struct DensityOperator {
    matrix: HermitianMatrix,
}

impl DensityOperator {
    pub fn new(matrix: HermitianMatrix) -> Result<Self> {
        let tr = matrix.trace();
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidDensity(format!(
                "trace is {tr}, expected 1"
            )));
        }
        if !is_psd(&matrix, PSD_TOL)? {
            return Err(Error::InvalidDensity(
                "matrix is not positive semidefinite".into(),
            ));
        }
        Ok(Self { matrix })
    }

    /// Rank-one state `|phi><phi|` from a unit vector.
    pub fn pure(phi: &ComplexMatrix) -> Result<Self> {
        assert_eq!(phi.cols(), 1);
        let rho = phi.mul(&phi.adjoint());
        Self::new(HermitianMatrix::symmetrized(rho))
    }

    pub fn matrix(&self) -> &HermitianMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }
}

/// A collection of states with priors, with cached factors `phi_i`
/// (`phi_i phi_i* = rho_i`) and weighted factors `psi_i = sqrt(p_i) phi_i`.
#[derive(Debug, Clone)]
pub struct Ensemble {
    states: Vec<DensityOperator>,
    priors: Vec<f64>,
    dim: usize,
    factors: Vec<ComplexMatrix>,
    weighted_factors: Vec<ComplexMatrix>,
}

impl Ensemble {
    /// Build an ensemble with factors computed by eigendecomposition.
    pub fn new(states: Vec<DensityOperator>, priors: Vec<f64>) -> Result<Self> {
        let factors = states
            .iter()
            .map(|s| factorize(s.matrix(), RANK_TOL_DEFAULT))
            .collect::<Result<Vec<_>>>()?;
        Self::with_factors(states, priors, factors)
    }

    /// Build an ensemble with caller-chosen factors (e.g. the GU choice
    /// `phi_i = U_i phi`). Each factor must reproduce its state.
    pub fn with_factors(
        states: Vec<DensityOperator>,
        priors: Vec<f64>,
        factors: Vec<ComplexMatrix>,
    ) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::PriorsInvalid("ensemble is empty".into()));
        }
        if states.len() != priors.len() || states.len() != factors.len() {
            return Err(Error::DimensionMismatch {
                expected: states.len(),
                got: priors.len().min(factors.len()),
            });
        }
        let dim = states[0].dim();
        for s in &states {
            if s.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: s.dim() });
            }
        }
        if priors.iter().any(|&p| !(p > 0.0)) {
            return Err(Error::PriorsInvalid("priors must be positive".into()));
        }
        let total: f64 = priors.iter().sum();
        if (total - 1.0).abs() > TRACE_TOL {
            return Err(Error::PriorsInvalid(format!(
                "priors must sum to 1 (got {total})"
            )));
        }
        let mut weighted_factors = Vec::with_capacity(factors.len());
        for ((s, phi), &p) in states.iter().zip(&factors).zip(&priors) {
            if phi.rows() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: phi.rows() });
            }
            let resid = phi
                .mul(&phi.adjoint())
                .sub(s.matrix().as_matrix())
                .frobenius_norm();
            if resid > 1e-10 * s.matrix().frobenius_norm().max(1.0) {
                return Err(Error::InvalidDensity(format!(
                    "factor does not reproduce its state (residual {resid:.3e})"
                )));
            }
            weighted_factors.push(phi.scale_re(p.sqrt()));
        }
        // span check: rank of Psi Psi*
        let gram = gram_of(&weighted_factors);
        let d = eigh(&gram)?;
        let cut = RANK_TOL_DEFAULT * d.max_eigenvalue().max(0.0);
        let rank = d.eigenvalues.iter().filter(|&&l| l > cut).count();
        if rank < dim {
            return Err(Error::SpanDeficient { rank, dim, deficiency: dim - rank });
        }
        Ok(Self { states, priors, dim, factors, weighted_factors })
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn states(&self) -> &[DensityOperator] {
        &self.states
    }

    pub fn priors(&self) -> &[f64] {
        &self.priors
    }

    pub fn factors(&self) -> &[ComplexMatrix] {
        &self.factors
    }

    pub fn weighted_factors(&self) -> &[ComplexMatrix] {
        &self.weighted_factors
    }

    /// The Gram operator `W = Psi Psi* = sum_i psi_i psi_i*`.
    pub fn gram(&self) -> HermitianMatrix {
        gram_of(&self.weighted_factors)
    }
}

fn gram_of(blocks: &[ComplexMatrix]) -> HermitianMatrix {
    let n = blocks[0].rows();
    let mut w = ComplexMatrix::zeros(n, n);
    for b in blocks {
        w = w.add(&b.mul(&b.adjoint()));
    }
    HermitianMatrix::symmetrized(w)
}

/// Positive operator-valued measure: PSD operators summing to identity.
#[derive(Debug, Clone)]
pub struct Povm {
    operators: Vec<HermitianMatrix>,
    dim: usize,
}

impl Povm {
    pub fn new(operators: Vec<HermitianMatrix>) -> Result<Self> {
        if operators.is_empty() {
            return Err(Error::InvalidPovm("no operators".into()));
        }
        let dim = operators[0].dim();
        let mut sum = HermitianMatrix::zeros(dim);
        for (i, op) in operators.iter().enumerate() {
            if op.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: op.dim() });
            }
            if !is_psd(op, PSD_TOL)? {
                return Err(Error::InvalidPovm(format!(
                    "operator {i} is not positive semidefinite"
                )));
            }
            sum = sum.add(op);
        }
        let resid = sum.sub(&HermitianMatrix::identity(dim)).frobenius_norm();
        if resid > COMPLETENESS_TOL {
            return Err(Error::InvalidPovm(format!(
                "operators do not sum to identity (residual {resid:.3e})"
            )));
        }
        Ok(Self { operators, dim })
    }

    pub fn operators(&self) -> &[HermitianMatrix] {
        &self.operators
    }

    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `max_i ||Pi_i + Pi_i_neg||`-style diagnostics: completeness residual.
    pub fn completeness_residual(&self) -> f64 {
        let mut sum = HermitianMatrix::zeros(self.dim);
        for op in &self.operators {
            sum = sum.add(op);
        }
        sum.sub(&HermitianMatrix::identity(self.dim)).frobenius_norm()
    }
}

fn check_match(e: &Ensemble, m: &Povm) -> Result<()> {
    if e.dim() != m.dim() {
        return Err(Error::DimensionMismatch { expected: e.dim(), got: m.dim() });
    }
    if e.len() != m.len() {
        return Err(Error::DimensionMismatch { expected: e.len(), got: m.len() });
    }
    Ok(())
}

/// Conditional success probabilities `tr(rho_j Pi_j)`, priors excluded.
pub fn per_state_detection(e: &Ensemble, m: &Povm) -> Result<Vec<f64>> {
    check_match(e, m)?;
    Ok(e.states()
        .iter()
        .zip(m.operators())
        .map(|(rho, pi)| rho.matrix().as_matrix().mul(pi.as_matrix()).trace().re)
        .collect())
}

/// Probability of correct detection `P_d = sum_i p_i tr(rho_i Pi_i)`.
pub fn correct_detection_probability(e: &Ensemble, m: &Povm) -> Result<f64> {
    let per_state = per_state_detection(e, m)?;
    Ok(e.priors()
        .iter()
        .zip(&per_state)
        .map(|(p, t)| p * t)
        .sum())
}
