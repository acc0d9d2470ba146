//! JSON file formats: problem/POVM/certificate files and report payloads.
//!
//! Complex scalars are `[re, im]` pairs; matrices are row-major nested
//! arrays of pairs. serde_json prints floats with shortest round-trip
//! precision, so every emitted matrix re-parses to the exact in-memory
//! value.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::ensemble::{DensityOperator, Ensemble, Povm};
use crate::error::{Error, Result};
use crate::hermitian::{ComplexMatrix, HermitianMatrix};
use crate::sdp::Certificate;
use crate::symmetry::{build_group, CguSpec, GuSpec, UnitaryGroup};

pub type MatrixJson = Vec<Vec<[f64; 2]>>;

pub fn matrix_to_json(m: &ComplexMatrix) -> MatrixJson {
    (0..m.rows())
        .map(|i| {
            (0..m.cols())
                .map(|j| {
                    let v = m.get(i, j);
                    [v.re, v.im]
                })
                .collect()
        })
        .collect()
}

/// Parse a nested-array matrix; `field` anchors error messages.
pub fn matrix_from_json(field: &str, rows: &MatrixJson) -> Result<ComplexMatrix> {
    if rows.is_empty() {
        return Err(Error::Parse(format!("{field}: matrix has no rows")));
    }
    let cols = rows[0].len();
    if cols == 0 {
        return Err(Error::Parse(format!("{field}: matrix has no columns")));
    }
    let mut m = ComplexMatrix::zeros(rows.len(), cols);
    for (i, row) in rows.iter().enumerate() {
        if row.len() != cols {
            return Err(Error::Parse(format!(
                "{field}: row {i} has {} entries, expected {cols}",
                row.len()
            )));
        }
        for (j, &[re, im]) in row.iter().enumerate() {
            if !(re.is_finite() && im.is_finite()) {
                return Err(Error::Parse(format!("{field}: entry ({i}, {j}) is not finite")));
            }
            m.set(i, j, Complex64::new(re, im));
        }
    }
    Ok(m)
}

fn hermitian_from_json(field: &str, rows: &MatrixJson, dim: usize) -> Result<HermitianMatrix> {
    let m = matrix_from_json(field, rows)?;
    if m.rows() != dim || m.cols() != dim {
        return Err(Error::Parse(format!(
            "{field}: expected a {dim}x{dim} matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    HermitianMatrix::new(m).map_err(|e| Error::Parse(format!("{field}: {e}")))
}

// ---------------------------------------------------------------------------
// Problem files
// ---------------------------------------------------------------------------

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProblemFile {
    pub schema_version: String,
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub states: Option<Vec<MatrixJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub priors: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<Vec<MatrixJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators: Option<Vec<MatrixJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub second_group: Option<Vec<MatrixJson>>,
}

/// A parsed and validated problem: either an explicit ensemble or a
/// symmetric (CGU; GU when there is one generator) construction.
#[derive(Debug, Clone)]
pub enum Problem {
    Explicit(Ensemble),
    Symmetric {
        spec: CguSpec,
        /// Second group `{V_k}` for the CGU-with-GU-generators form.
        second_group: Option<UnitaryGroup>,
        ensemble: Ensemble,
    },
}

impl Problem {
    pub fn ensemble(&self) -> &Ensemble {
        match self {
            Problem::Explicit(e) => e,
            Problem::Symmetric { ensemble, .. } => ensemble,
        }
    }

    pub fn gu_spec(&self) -> Option<GuSpec> {
        match self {
            Problem::Symmetric { spec, .. } if spec.generator_factors.len() == 1 => Some(
                GuSpec::new(spec.group.clone(), spec.generator_factors[0].clone())
                    .expect("dimensions validated at parse time"),
            ),
            _ => None,
        }
    }
}

fn parse_group(field: &str, matrices: &[MatrixJson], dim: usize) -> Result<UnitaryGroup> {
    let mut elems = Vec::with_capacity(matrices.len());
    for (i, m) in matrices.iter().enumerate() {
        let u = matrix_from_json(&format!("{field}[{i}]"), m)?;
        if u.rows() != dim || u.cols() != dim {
            return Err(Error::Parse(format!(
                "{field}[{i}]: expected a {dim}x{dim} matrix, got {}x{}",
                u.rows(),
                u.cols()
            )));
        }
        elems.push(u);
    }
    build_group(elems)
}

pub fn parse_problem(file: &ProblemFile) -> Result<Problem> {
    if file.schema_version != SCHEMA_VERSION {
        return Err(Error::Parse(format!(
            "schema_version: expected \"{SCHEMA_VERSION}\", got \"{}\"",
            file.schema_version
        )));
    }
    let dim = file.dim;
    if dim == 0 {
        return Err(Error::Parse("dim: must be positive".into()));
    }
    let explicit = file.states.is_some() || file.priors.is_some();
    let symmetric = file.group.is_some() || file.generators.is_some();
    if explicit == symmetric {
        return Err(Error::Parse(
            "exactly one of {states+priors} or {group+generators} must be present".into(),
        ));
    }
    if explicit {
        let states_json = file
            .states
            .as_ref()
            .ok_or_else(|| Error::Parse("states: missing (priors given)".into()))?;
        let priors = file
            .priors
            .clone()
            .ok_or_else(|| Error::Parse("priors: missing (states given)".into()))?;
        let mut states = Vec::with_capacity(states_json.len());
        for (i, s) in states_json.iter().enumerate() {
            let h = hermitian_from_json(&format!("states[{i}]"), s, dim)?;
            states.push(
                DensityOperator::new(h)
                    .map_err(|e| Error::Parse(format!("states[{i}]: {e}")))?,
            );
        }
        if !priors.iter().all(|p| p.is_finite()) {
            return Err(Error::Parse("priors: entries must be finite".into()));
        }
        let sum: f64 = priors.iter().sum();
        if priors.iter().any(|&p| p <= 0.0) || (sum - 1.0).abs() > crate::ensemble::TRACE_TOL {
            return Err(Error::Parse("priors must sum to 1 and be positive".into()));
        }
        return Ok(Problem::Explicit(Ensemble::new(states, priors)?));
    }
    let group_json = file
        .group
        .as_ref()
        .ok_or_else(|| Error::Parse("group: missing (generators given)".into()))?;
    let gens_json = file
        .generators
        .as_ref()
        .ok_or_else(|| Error::Parse("generators: missing (group given)".into()))?;
    let group = parse_group("group", group_json, dim)?;
    let second_group = match &file.second_group {
        Some(sg) => Some(parse_group("second_group", sg, dim)?),
        None => None,
    };
    let mut generators = Vec::with_capacity(gens_json.len());
    for (i, g) in gens_json.iter().enumerate() {
        let m = matrix_from_json(&format!("generators[{i}]"), g)?;
        if m.rows() != dim {
            return Err(Error::Parse(format!(
                "generators[{i}]: expected {dim} rows, got {}",
                m.rows()
            )));
        }
        generators.push(m);
    }
    // a second group with a single seed generator means: the generators are
    // the orbit of the seed under {V_k}
    let factors = match (&second_group, generators.len()) {
        (Some(q), 1) => q.elements().iter().map(|v| v.mul(&generators[0])).collect(),
        (Some(_), _) => {
            return Err(Error::Parse(
                "second_group requires exactly one seed generator".into(),
            ))
        }
        (None, _) => generators,
    };
    let spec = CguSpec::new(group, factors)?;
    let ensemble = crate::symmetry::generate_cgu(&spec)?;
    Ok(Problem::Symmetric { spec, second_group, ensemble })
}

pub fn load_problem(path: &Path) -> Result<Problem> {
    let text = std::fs::read_to_string(path)?;
    let file: ProblemFile = serde_json::from_str(&text)?;
    parse_problem(&file)
}

// ---------------------------------------------------------------------------
// POVM and certificate files
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PovmFile {
    pub dim: usize,
    pub operators: Vec<MatrixJson>,
}

impl PovmFile {
    pub fn from_povm(m: &Povm) -> Self {
        Self {
            dim: m.dim(),
            operators: m.operators().iter().map(|op| matrix_to_json(op.as_matrix())).collect(),
        }
    }
}

pub fn load_povm(path: &Path) -> Result<Povm> {
    let text = std::fs::read_to_string(path)?;
    let file: PovmFile = serde_json::from_str(&text)?;
    let mut ops = Vec::with_capacity(file.operators.len());
    for (i, op) in file.operators.iter().enumerate() {
        ops.push(hermitian_from_json(&format!("operators[{i}]"), op, file.dim)?);
    }
    Povm::new(ops)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertFile {
    pub dim: usize,
    pub x: MatrixJson,
}

impl CertFile {
    pub fn from_certificate(cert: &Certificate) -> Self {
        Self { dim: cert.x.dim(), x: matrix_to_json(cert.x.as_matrix()) }
    }
}

/// Load a certificate file and attach the per-state slacks for `e`.
pub fn load_certificate(path: &Path, e: &Ensemble) -> Result<Certificate> {
    let text = std::fs::read_to_string(path)?;
    let file: CertFile = serde_json::from_str(&text)?;
    if file.dim != e.dim() {
        return Err(Error::DimensionMismatch { expected: e.dim(), got: file.dim });
    }
    let x = hermitian_from_json("x", &file.x, file.dim)?;
    Ok(Certificate::from_dual(x, e))
}

// ---------------------------------------------------------------------------
// Report payloads
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct ConditionReport {
    pub condition_holds: bool,
    pub alpha: f64,
    pub max_deviation: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationJson {
    pub slack_min_eigenvalues: Vec<f64>,
    pub complementary_residuals: Vec<f64>,
    pub povm_completeness_residual: f64,
    pub slack_psd_ok: bool,
    pub complementary_ok: bool,
    pub optimal: bool,
}

impl From<&crate::sdp::VerificationReport> for VerificationJson {
    fn from(r: &crate::sdp::VerificationReport) -> Self {
        Self {
            slack_min_eigenvalues: r.slack_min_eigenvalues.clone(),
            complementary_residuals: r.complementary_residuals.clone(),
            povm_completeness_residual: r.povm_completeness_residual,
            slack_psd_ok: r.slack_psd_ok,
            complementary_ok: r.complementary_ok,
            optimal: r.optimal,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LsmReport {
    pub dim: usize,
    pub state_count: usize,
    pub p_correct: f64,
    pub per_state_detection: Vec<f64>,
    pub condition: ConditionReport,
    pub factors: Vec<MatrixJson>,
    pub operators: Vec<MatrixJson>,
    /// Present when the square-root condition holds.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CertificateReport>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CertificateReport {
    pub trace: f64,
    pub x: MatrixJson,
    pub verification: VerificationJson,
}

#[derive(Debug, Clone, Serialize)]
pub struct OptimalReport {
    pub dim: usize,
    pub state_count: usize,
    pub reduction: String,
    pub p_correct: f64,
    pub certificate_trace: f64,
    pub duality_gap: f64,
    pub iterations: usize,
    pub unknowns: usize,
    pub constraints: usize,
    pub full_unknowns: usize,
    pub full_constraints: usize,
    pub operators: Vec<MatrixJson>,
    pub certificate: CertificateReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidateReport {
    pub dim: usize,
    pub kind: String,
    pub state_count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub group_order: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generator_count: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub second_group_phase_commutes: Option<bool>,
}
