//! Finite unitary groups and the GU / CGU ensemble machinery.
//!
//! A geometrically uniform (GU) state set is the orbit of one generator
//! under a finite unitary matrix group; a compound GU (CGU) set is the union
//! of several orbits under the same group. Both admit least-squares
//! measurements computed from generators alone, and arbitrary POVMs on them
//! can be symmetrized without changing the detection probability.
//!
//! Group elements differing by a global phase are distinct here: these are
//! matrix groups, not projective groups. Physics users expecting projective
//! identification must quotient phases themselves before building the group.

use num_complex::Complex64;

use crate::ensemble::{DensityOperator, Ensemble, Povm};
use crate::error::{Error, Result};
use crate::hermitian::{matrix_inv_sqrt, ComplexMatrix, HermitianMatrix, RANK_TOL_DEFAULT};

/// Frobenius tolerance for matching group-element products under closure.
pub const ELEMENT_MATCH_TOL: f64 = 1e-8;

/// Frobenius tolerance on `U*U = I` per element.
pub const UNITARY_TOL: f64 = 1e-10;

/// Residual tolerance for phase commutation and GU-generator checks.
pub const PHASE_TOL: f64 = 1e-8;

/// A finite closed set of unitary matrices with its multiplication table.
///
/// The identity is stored at index 0 (elements are reordered if needed);
/// `r_map(j, i) = k` iff `U_j* U_i = U_k`.
#[derive(Debug, Clone)]
pub struct UnitaryGroup {
    elements: Vec<ComplexMatrix>,
    mult_table: Vec<Vec<usize>>,
    r_map: Vec<Vec<usize>>,
    inverses: Vec<usize>,
}

impl UnitaryGroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn dim(&self) -> usize {
        self.elements[0].rows()
    }

    pub fn elements(&self) -> &[ComplexMatrix] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &ComplexMatrix {
        &self.elements[i]
    }

    /// Index of `U_i U_j`.
    pub fn mult(&self, i: usize, j: usize) -> usize {
        self.mult_table[i][j]
    }

    /// Index of `U_i^{-1} = U_i*`.
    pub fn inverse(&self, i: usize) -> usize {
        self.inverses[i]
    }

    /// `r(j, i) = k` iff `U_j* U_i = U_k`.
    pub fn r_map(&self, j: usize, i: usize) -> usize {
        self.r_map[j][i]
    }
}

/// Validate closure, identity, inverses, and unitarity; build the tables.
pub fn build_group(matrices: Vec<ComplexMatrix>) -> Result<UnitaryGroup> {
    if matrices.is_empty() {
        return Err(Error::NoIdentity);
    }
    let n = matrices[0].rows();
    for (idx, u) in matrices.iter().enumerate() {
        if u.rows() != n || u.cols() != n {
            return Err(Error::DimensionMismatch { expected: n, got: u.rows().max(u.cols()) });
        }
        let resid = u
            .adjoint()
            .mul(u)
            .sub(&ComplexMatrix::identity(n))
            .frobenius_norm();
        if resid > UNITARY_TOL {
            return Err(Error::NotUnitary { index: idx, residual: resid });
        }
    }
    for i in 0..matrices.len() {
        for j in (i + 1)..matrices.len() {
            let d = matrices[i].sub(&matrices[j]).frobenius_norm();
            if d < ELEMENT_MATCH_TOL {
                return Err(Error::DuplicateElement { i, j, distance: d });
            }
        }
    }
    let mut elements = matrices;
    let id = ComplexMatrix::identity(n);
    let id_pos = elements
        .iter()
        .position(|u| u.sub(&id).frobenius_norm() < ELEMENT_MATCH_TOL)
        .ok_or(Error::NoIdentity)?;
    elements.swap(0, id_pos);

    let m = elements.len();
    let nearest = |prod: &ComplexMatrix| -> (usize, f64) {
        let mut best = (0usize, f64::INFINITY);
        for (k, u) in elements.iter().enumerate() {
            let d = prod.sub(u).frobenius_norm();
            if d < best.1 {
                best = (k, d);
            }
        }
        best
    };
    let mut mult_table = vec![vec![0usize; m]; m];
    for i in 0..m {
        for j in 0..m {
            let prod = elements[i].mul(&elements[j]);
            let (k, d) = nearest(&prod);
            if d > ELEMENT_MATCH_TOL {
                return Err(Error::NotClosed { i, j, residual: d });
            }
            mult_table[i][j] = k;
        }
    }
    let mut inverses = vec![0usize; m];
    for i in 0..m {
        let inv = (0..m)
            .find(|&j| mult_table[i][j] == 0)
            .ok_or(Error::NotClosed { i, j: i, residual: f64::INFINITY })?;
        // the adjoint must itself be a group element
        let (k, d) = nearest(&elements[i].adjoint());
        if d > ELEMENT_MATCH_TOL || k != inv {
            return Err(Error::NotClosed { i, j: inv, residual: d });
        }
        inverses[i] = inv;
    }
    let mut r_map = vec![vec![0usize; m]; m];
    for j in 0..m {
        for i in 0..m {
            r_map[j][i] = mult_table[inverses[j]][i];
        }
    }
    Ok(UnitaryGroup { elements, mult_table, r_map, inverses })
}

/// A GU ensemble specification: group plus one generator factor `phi` with
/// `rho = phi phi*`.
#[derive(Debug, Clone)]
pub struct GuSpec {
    pub group: UnitaryGroup,
    pub generator_factor: ComplexMatrix,
}

impl GuSpec {
    pub fn new(group: UnitaryGroup, generator_factor: ComplexMatrix) -> Result<Self> {
        if generator_factor.rows() != group.dim() {
            return Err(Error::DimensionMismatch {
                expected: group.dim(),
                got: generator_factor.rows(),
            });
        }
        Ok(Self { group, generator_factor })
    }
}

/// A CGU ensemble specification: group plus generator factors `phi_k`.
#[derive(Debug, Clone)]
pub struct CguSpec {
    pub group: UnitaryGroup,
    pub generator_factors: Vec<ComplexMatrix>,
}

impl CguSpec {
    pub fn new(group: UnitaryGroup, generator_factors: Vec<ComplexMatrix>) -> Result<Self> {
        if generator_factors.is_empty() {
            return Err(Error::Parse("CGU spec needs at least one generator".into()));
        }
        for f in &generator_factors {
            if f.rows() != group.dim() {
                return Err(Error::DimensionMismatch { expected: group.dim(), got: f.rows() });
            }
        }
        Ok(Self { group, generator_factors })
    }
}

/// Result of checking whether two groups commute up to a phase.
#[derive(Debug, Clone)]
pub struct PhaseCommutationReport {
    pub commutes: bool,
    /// `theta(p, t)` in radians with `U_p V_t = e^{i theta} V_t U_p`;
    /// present iff `commutes`.
    pub phases: Option<Vec<Vec<f64>>>,
    pub max_residual: f64,
}

/// Orbit of a single generator: states `U_i rho U_i*`, factors `U_i phi`,
/// equal priors `1/m`.
pub fn generate_gu(spec: &GuSpec) -> Result<Ensemble> {
    let cgu = CguSpec {
        group: spec.group.clone(),
        generator_factors: vec![spec.generator_factor.clone()],
    };
    generate_cgu(&cgu)
}

/// Union of orbits: `l * r` states ordered i-outer / k-inner (state index
/// `i * r + k`), factors `phi_ik = U_i phi_k`, equal priors.
pub fn generate_cgu(spec: &CguSpec) -> Result<Ensemble> {
    let l = spec.group.order();
    let r = spec.generator_factors.len();
    let mut states = Vec::with_capacity(l * r);
    let mut factors = Vec::with_capacity(l * r);
    for i in 0..l {
        let u = spec.group.element(i);
        for phi_k in &spec.generator_factors {
            let phi_ik = u.mul(phi_k);
            let rho = HermitianMatrix::symmetrized(phi_ik.mul(&phi_ik.adjoint()));
            states.push(DensityOperator::new(rho)?);
            factors.push(phi_ik);
        }
    }
    let priors = vec![1.0 / (l * r) as f64; l * r];
    Ensemble::with_factors(states, priors, factors)
}

fn full_factor_matrix(spec: &CguSpec) -> ComplexMatrix {
    let mut blocks = Vec::new();
    for i in 0..spec.group.order() {
        for phi_k in &spec.generator_factors {
            blocks.push(spec.group.element(i).mul(phi_k));
        }
    }
    let refs: Vec<&ComplexMatrix> = blocks.iter().collect();
    ComplexMatrix::hconcat(&refs)
}

/// LSM generator for a GU set: `mu = (Phi Phi*)^{-1/2} phi`. The full LSM
/// factors are the orbit `U_i mu`.
pub fn gu_lsm_generator(spec: &GuSpec) -> Result<ComplexMatrix> {
    let gens = cgu_lsm_generators(&CguSpec {
        group: spec.group.clone(),
        generator_factors: vec![spec.generator_factor.clone()],
    })?;
    Ok(gens.into_iter().next().unwrap())
}

/// LSM generators for a CGU set: `mu_k = (Phi Phi*)^{-1/2} phi_k`. The full
/// LSM factors are `U_i mu_k`.
pub fn cgu_lsm_generators(spec: &CguSpec) -> Result<Vec<ComplexMatrix>> {
    let phi = full_factor_matrix(spec);
    let gram = HermitianMatrix::symmetrized(phi.mul(&phi.adjoint()));
    let m = matrix_inv_sqrt(&gram, RANK_TOL_DEFAULT)?;
    Ok(spec
        .generator_factors
        .iter()
        .map(|phi_k| m.as_matrix().mul(phi_k))
        .collect())
}

/// Check whether `U_p V_t = e^{i theta(p,t)} V_t U_p` for all pairs. A
/// negative result is a report, not an error.
pub fn check_phase_commutation(g: &UnitaryGroup, q: &UnitaryGroup) -> Result<PhaseCommutationReport> {
    if g.dim() != q.dim() {
        return Err(Error::DimensionMismatch { expected: g.dim(), got: q.dim() });
    }
    let mut phases = vec![vec![0.0f64; q.order()]; g.order()];
    let mut max_residual = 0.0f64;
    let mut commutes = true;
    for p in 0..g.order() {
        for t in 0..q.order() {
            let uv = g.element(p).mul(q.element(t));
            let vu = q.element(t).mul(g.element(p));
            // phase from the largest-magnitude entry of V_t U_p, which stays
            // clear of division by near-zeros
            let mut best = (0usize, 0usize, 0.0f64);
            for i in 0..vu.rows() {
                for j in 0..vu.cols() {
                    let a = vu.get(i, j).norm();
                    if a > best.2 {
                        best = (i, j, a);
                    }
                }
            }
            let ratio = uv.get(best.0, best.1) / vu.get(best.0, best.1);
            let theta = ratio.arg();
            let phase = Complex64::from_polar(1.0, theta);
            let resid = uv.sub(&vu.scale(phase)).frobenius_norm();
            max_residual = max_residual.max(resid);
            if resid > PHASE_TOL {
                commutes = false;
            }
            phases[p][t] = theta;
        }
    }
    Ok(PhaseCommutationReport {
        commutes,
        phases: commutes.then_some(phases),
        max_residual,
    })
}

/// For a CGU set whose generators are themselves the orbit `phi_k = V_k phi`
/// of a group `Q` that commutes with the CGU group up to a phase, the whole
/// LSM is generated by the single vector `mu_bar = (Phi Phi*)^{-1/2} phi`:
/// the full factors are `U_i V_k mu_bar`.
pub fn cgu_gu_lsm_single_generator(spec: &CguSpec, q: &UnitaryGroup) -> Result<ComplexMatrix> {
    if q.order() != spec.generator_factors.len() {
        return Err(Error::CountMismatch {
            expected: q.order(),
            got: spec.generator_factors.len(),
        });
    }
    let phi = &spec.generator_factors[0];
    let mut worst = 0.0f64;
    for (k, phi_k) in spec.generator_factors.iter().enumerate() {
        let resid = phi_k.sub(&q.element(k).mul(phi)).frobenius_norm();
        worst = worst.max(resid);
    }
    if worst > PHASE_TOL {
        return Err(Error::GeneratorsNotGu { residual: worst });
    }
    let report = check_phase_commutation(&spec.group, q)?;
    if !report.commutes {
        return Err(Error::NotPhaseCommuting { residual: report.max_residual });
    }
    let full = full_factor_matrix(spec);
    let gram = HermitianMatrix::symmetrized(full.mul(&full.adjoint()));
    let m = matrix_inv_sqrt(&gram, RANK_TOL_DEFAULT)?;
    Ok(m.as_matrix().mul(phi))
}

/// Group-average a POVM over a GU/CGU structure: with operators ordered
/// i-outer / k-inner (`r = 1` for plain GU), returns the covariant POVM
/// `Pi_ik = U_i Pi_bar_k U_i*` with `Pi_bar_k = (1/l) sum_j U_j* Pi_jk U_j`.
/// On a matching GU/CGU ensemble this leaves the detection probability
/// unchanged.
pub fn symmetrize_povm(g: &UnitaryGroup, m: &Povm, r: usize) -> Result<Povm> {
    let l = g.order();
    if m.len() != l * r {
        return Err(Error::CountMismatch { expected: l * r, got: m.len() });
    }
    if m.dim() != g.dim() {
        return Err(Error::DimensionMismatch { expected: g.dim(), got: m.dim() });
    }
    let mut generators = Vec::with_capacity(r);
    for k in 0..r {
        let mut acc = ComplexMatrix::zeros(g.dim(), g.dim());
        for j in 0..l {
            let uj = g.element(j);
            let term = uj
                .adjoint()
                .mul(m.operators()[j * r + k].as_matrix())
                .mul(uj);
            acc = acc.add(&term);
        }
        generators.push(HermitianMatrix::symmetrized(acc.scale_re(1.0 / l as f64)));
    }
    let mut out = Vec::with_capacity(l * r);
    for i in 0..l {
        let ui = g.element(i);
        for gen in &generators {
            out.push(HermitianMatrix::symmetrized(gen.as_matrix().conjugate_by(ui)));
        }
    }
    Povm::new(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::{correct_detection_probability, per_state_detection};
    use crate::lsm::least_squares_measurement;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn mat(rows: Vec<Vec<f64>>) -> ComplexMatrix {
        ComplexMatrix::from_rows(
            rows.into_iter()
                .map(|r| r.into_iter().map(|x| c(x, 0.0)).collect())
                .collect(),
        )
        .unwrap()
    }

    fn pauli_z() -> ComplexMatrix {
        mat(vec![vec![1.0, 0.0], vec![0.0, -1.0]])
    }

    fn swap2() -> ComplexMatrix {
        mat(vec![vec![0.0, 1.0], vec![1.0, 0.0]])
    }

    fn reflection_u() -> ComplexMatrix {
        let r3 = 3f64.sqrt();
        mat(vec![vec![0.5, 0.5 * r3], vec![0.5 * r3, -0.5]])
    }

    fn col(entries: &[f64]) -> ComplexMatrix {
        ComplexMatrix::column_from_reals(entries)
    }

    fn cyclic_shift(n: usize) -> ComplexMatrix {
        let mut z = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            z.set(i, (i + 1) % n, c(1.0, 0.0));
        }
        z
    }

    #[test]
    fn order_two_groups_build() {
        let g = build_group(vec![ComplexMatrix::identity(2), swap2()]).unwrap();
        assert_eq!(g.order(), 2);
        assert_eq!(g.r_map(0, 0), 0);
        assert_eq!(g.r_map(0, 1), 1);
        assert_eq!(g.r_map(1, 0), 1);
        assert_eq!(g.r_map(1, 1), 0);

        let g = build_group(vec![ComplexMatrix::identity(2), reflection_u()]).unwrap();
        assert_eq!(g.order(), 2);
    }

    #[test]
    fn non_closed_set_rejected() {
        let mut u = ComplexMatrix::identity(2);
        u.set(1, 1, Complex64::from_polar(1.0, PI / 3.0));
        assert!(matches!(
            build_group(vec![ComplexMatrix::identity(2), u]),
            Err(Error::NotClosed { .. })
        ));
    }

    #[test]
    fn duplicates_and_missing_identity_rejected() {
        assert!(matches!(
            build_group(vec![ComplexMatrix::identity(2), ComplexMatrix::identity(2)]),
            Err(Error::DuplicateElement { .. })
        ));
        assert!(matches!(
            build_group(vec![pauli_z().scale(c(-1.0, 0.0)), pauli_z()]),
            Err(Error::NoIdentity)
        ));
    }

    #[test]
    fn quaternion_like_group_of_order_eight() {
        // {±I, ±iX, ±iY, ±iZ}: a nonabelian closed group.
        let i2 = ComplexMatrix::identity(2);
        let ix = mat(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).scale(c(0.0, 1.0));
        let iy = ComplexMatrix::from_rows(vec![
            vec![c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(-1.0, 0.0), c(0.0, 0.0)],
        ])
        .unwrap();
        let iz = pauli_z().scale(c(0.0, 1.0));
        let neg = |m: &ComplexMatrix| m.scale(c(-1.0, 0.0));
        let g = build_group(vec![
            i2.clone(),
            neg(&i2),
            ix.clone(),
            neg(&ix),
            iy.clone(),
            neg(&iy),
            iz.clone(),
            neg(&iz),
        ])
        .unwrap();
        assert_eq!(g.order(), 8);
    }

    #[test]
    fn gu_orbit_of_trivial_group() {
        // group {I} with a full-rank generator: a single-state ensemble.
        let g = build_group(vec![ComplexMatrix::identity(2)]).unwrap();
        let phi = ComplexMatrix::identity(2).scale_re(1.0 / 2f64.sqrt());
        let e = generate_gu(&GuSpec::new(g, phi).unwrap()).unwrap();
        assert_eq!(e.len(), 1);
        assert!((e.priors()[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn gu_orbit_under_reflection() {
        let g = build_group(vec![ComplexMatrix::identity(2), reflection_u()]).unwrap();
        let s = 1.0 / 2f64.sqrt();
        let e = generate_gu(&GuSpec::new(g, col(&[s, s])).unwrap()).unwrap();
        assert_eq!(e.len(), 2);
        let expected = reflection_u().mul(&col(&[s, s]));
        assert!(e.factors()[1].sub(&expected).frobenius_norm() < 1e-14);
    }

    #[test]
    fn cyclic_shift_orbit_is_orthonormal_basis() {
        let n = 4;
        let z = cyclic_shift(n);
        let mut elems = vec![ComplexMatrix::identity(n)];
        let mut acc = z.clone();
        for _ in 1..n {
            elems.push(acc.clone());
            acc = acc.mul(&z);
        }
        let g = build_group(elems).unwrap();
        let mut e1 = vec![0.0; n];
        e1[0] = 1.0;
        let spec = GuSpec::new(g, col(&e1)).unwrap();
        let e = generate_gu(&spec).unwrap();
        assert_eq!(e.len(), n);
        // mu = phi for an orthonormal orbit
        let mu = gu_lsm_generator(&spec).unwrap();
        assert!(mu.sub(&col(&e1)).frobenius_norm() < 1e-12);
    }

    #[test]
    fn cgu_reflection_example_generators() {
        let g = build_group(vec![ComplexMatrix::identity(2), reflection_u()]).unwrap();
        let s = 1.0 / 2f64.sqrt();
        let spec = CguSpec::new(g, vec![col(&[s, s]), col(&[s, -s])]).unwrap();
        let e = generate_cgu(&spec).unwrap();
        assert_eq!(e.len(), 4);
        let gens = cgu_lsm_generators(&spec).unwrap();
        assert!(gens[0].sub(&col(&[0.5, 0.5])).frobenius_norm() < 1e-12);
        assert!(gens[1].sub(&col(&[0.5, -0.5])).frobenius_norm() < 1e-12);
    }

    #[test]
    fn cgu_with_r1_matches_gu() {
        let g = build_group(vec![ComplexMatrix::identity(2), pauli_z()]).unwrap();
        let phi = col(&[(PI / 6.0).cos(), (PI / 6.0).sin()]);
        let gu = GuSpec::new(g.clone(), phi.clone()).unwrap();
        let cgu = CguSpec::new(g, vec![phi]).unwrap();
        let mu_gu = gu_lsm_generator(&gu).unwrap();
        let mu_cgu = cgu_lsm_generators(&cgu).unwrap();
        assert!(mu_gu.sub(&mu_cgu[0]).frobenius_norm() < 1e-14);
        let e_gu = generate_gu(&gu).unwrap();
        let e_cgu = generate_cgu(&cgu).unwrap();
        for (a, b) in e_gu.factors().iter().zip(e_cgu.factors()) {
            assert!(a.sub(b).frobenius_norm() < 1e-14);
        }
    }

    #[test]
    fn gu_generator_matches_expanded_lsm() {
        // {I, diag(1,-1)} acting on (cos t, sin t): cross-check mu against
        // the full-ensemble LSM, and equal per-state detection.
        let g = build_group(vec![ComplexMatrix::identity(2), pauli_z()]).unwrap();
        let t = PI / 6.0;
        let spec = GuSpec::new(g.clone(), col(&[t.cos(), t.sin()])).unwrap();
        let mu = gu_lsm_generator(&spec).unwrap();
        let e = generate_gu(&spec).unwrap();
        let lsm = least_squares_measurement(&e).unwrap();
        for (i, full_mu) in lsm.factors.iter().enumerate() {
            // T psi_i = M phi_i = U_i mu: the sqrt(m) in T cancels the
            // sqrt(1/m) prior weight in psi.
            let orbit = g.element(i).mul(&mu);
            assert!(full_mu.sub(&orbit).frobenius_norm() < 1e-9);
        }
        let per = per_state_detection(&e, &lsm.povm).unwrap();
        assert!((per[0] - per[1]).abs() < 1e-12);
    }

    #[test]
    fn phase_commutation_of_z_and_b() {
        let g = build_group(vec![ComplexMatrix::identity(2), swap2()]).unwrap();
        let q = build_group(vec![ComplexMatrix::identity(2), pauli_z()]).unwrap();
        let report = check_phase_commutation(&g, &q).unwrap();
        assert!(report.commutes);
        let phases = report.phases.unwrap();
        assert!((phases[1][1].abs() - PI).abs() < 1e-12); // ZB = -BZ
        assert!(phases[0][0].abs() < 1e-12);
    }

    #[test]
    fn reflection_group_does_not_phase_commute_with_b() {
        let g = build_group(vec![ComplexMatrix::identity(2), reflection_u()]).unwrap();
        let q = build_group(vec![ComplexMatrix::identity(2), pauli_z()]).unwrap();
        let report = check_phase_commutation(&g, &q).unwrap();
        assert!(!report.commutes);
    }

    #[test]
    fn trivial_q_always_commutes() {
        let g = build_group(vec![ComplexMatrix::identity(2), reflection_u()]).unwrap();
        let q = build_group(vec![ComplexMatrix::identity(2)]).unwrap();
        let report = check_phase_commutation(&g, &q).unwrap();
        assert!(report.commutes);
        assert!(report.phases.unwrap().iter().flatten().all(|t| t.abs() < 1e-12));
    }

    #[test]
    fn single_generator_for_swap_and_sign_groups() {
        // G = {I, Z-swap}, Q = {I, B}, phi = (2, 1)/sqrt5: mu_bar =
        // phi/sqrt(2) because the Gram is 2I.
        let g = build_group(vec![ComplexMatrix::identity(2), swap2()]).unwrap();
        let q = build_group(vec![ComplexMatrix::identity(2), pauli_z()]).unwrap();
        let b1 = 2.0 / 5f64.sqrt();
        let b2 = 1.0 / 5f64.sqrt();
        let phi = col(&[b1, b2]);
        let gens = vec![phi.clone(), pauli_z().mul(&phi)];
        let spec = CguSpec::new(g, gens).unwrap();
        let mu_bar = cgu_gu_lsm_single_generator(&spec, &q).unwrap();
        assert!(mu_bar.sub(&phi.scale_re(1.0 / 2f64.sqrt())).frobenius_norm() < 1e-12);
    }

    #[test]
    fn single_generator_rejects_bad_inputs() {
        let g = build_group(vec![ComplexMatrix::identity(2), reflection_u()]).unwrap();
        let q = build_group(vec![ComplexMatrix::identity(2), pauli_z()]).unwrap();
        let s = 1.0 / 2f64.sqrt();
        // generators are the B-orbit of (1,1)/sqrt2, but G and Q do not
        // commute up to a phase
        let spec = CguSpec::new(g, vec![col(&[s, s]), col(&[s, -s])]).unwrap();
        assert!(matches!(
            cgu_gu_lsm_single_generator(&spec, &q),
            Err(Error::NotPhaseCommuting { .. })
        ));
        // generators that are no orbit of Q at all
        let g2 = build_group(vec![ComplexMatrix::identity(2), swap2()]).unwrap();
        let spec2 = CguSpec::new(g2, vec![col(&[s, s]), col(&[0.6, 0.8])]).unwrap();
        assert!(matches!(
            cgu_gu_lsm_single_generator(&spec2, &q),
            Err(Error::GeneratorsNotGu { .. })
        ));
    }

    #[test]
    fn cyclic_phase_construction_expansion_equality() {
        // order-l cyclic shift G and diagonal-phase Q at l = 3: the single
        // generator expands to exactly the per-k generators.
        let l = 3;
        let z = cyclic_shift(l);
        let mut gelems = vec![ComplexMatrix::identity(l)];
        let mut acc = z.clone();
        for _ in 1..l {
            gelems.push(acc.clone());
            acc = acc.mul(&z);
        }
        let g = build_group(gelems).unwrap();
        let mut b = ComplexMatrix::zeros(l, l);
        for s in 0..l {
            b.set(s, s, Complex64::from_polar(1.0, 2.0 * PI * s as f64 / l as f64));
        }
        let mut qelems = vec![ComplexMatrix::identity(l)];
        let mut acc = b.clone();
        for _ in 1..l {
            qelems.push(acc.clone());
            acc = acc.mul(&b);
        }
        let q = build_group(qelems).unwrap();
        let raw = [0.9, -0.3, 0.6];
        let norm = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
        let phi = col(&raw.iter().map(|x| x / norm).collect::<Vec<_>>());
        let gens: Vec<ComplexMatrix> = (0..l).map(|k| q.element(k).mul(&phi)).collect();
        let spec = CguSpec::new(g, gens).unwrap();
        let mu_bar = cgu_gu_lsm_single_generator(&spec, &q).unwrap();
        let mu_ks = cgu_lsm_generators(&spec).unwrap();
        for (k, mu_k) in mu_ks.iter().enumerate() {
            let via_single = q.element(k).mul(&mu_bar);
            assert!(mu_k.sub(&via_single).frobenius_norm() < 1e-9);
        }
    }

    #[test]
    fn symmetrize_povm_fixed_points_and_pd_invariance() {
        let g = build_group(vec![ComplexMatrix::identity(2), pauli_z()]).unwrap();
        let t = PI / 6.0;
        let spec = GuSpec::new(g.clone(), col(&[t.cos(), t.sin()])).unwrap();
        let e = generate_gu(&spec).unwrap();

        // the LSM POVM is already covariant: a fixed point
        let lsm = least_squares_measurement(&e).unwrap();
        let sym = symmetrize_povm(&g, &lsm.povm, 1).unwrap();
        for (a, b) in sym.operators().iter().zip(lsm.povm.operators()) {
            assert!(a.sub(b).frobenius_norm() < 1e-10);
        }

        // I/m is group-invariant
        let half = HermitianMatrix::identity(2).scale(0.5);
        let uniform = Povm::new(vec![half.clone(), half]).unwrap();
        let sym = symmetrize_povm(&g, &uniform, 1).unwrap();
        for (a, b) in sym.operators().iter().zip(uniform.operators()) {
            assert!(a.sub(b).frobenius_norm() < 1e-12);
        }

        // a non-covariant POVM keeps its detection probability and the
        // output is covariant by construction
        let proj0 = HermitianMatrix::new(mat(vec![vec![1.0, 0.0], vec![0.0, 0.0]])).unwrap();
        let proj1 = HermitianMatrix::new(mat(vec![vec![0.0, 0.0], vec![0.0, 1.0]])).unwrap();
        let skew = Povm::new(vec![proj0, proj1]).unwrap();
        let sym = symmetrize_povm(&g, &skew, 1).unwrap();
        let pd_before = correct_detection_probability(&e, &skew).unwrap();
        let pd_after = correct_detection_probability(&e, &sym).unwrap();
        assert!((pd_before - pd_after).abs() < 1e-9);
        for (i, op) in sym.operators().iter().enumerate() {
            let gen = sym.operators()[0].as_matrix();
            let cov = gen.conjugate_by(g.element(i));
            assert!(op.as_matrix().sub(&cov).frobenius_norm() < 1e-12);
        }
    }

    #[test]
    fn gram_commutes_with_group() {
        let g = build_group(vec![ComplexMatrix::identity(2), reflection_u()]).unwrap();
        let s = 1.0 / 2f64.sqrt();
        let spec = CguSpec::new(g.clone(), vec![col(&[s, s]), col(&[s, -s])]).unwrap();
        let phi = full_factor_matrix(&spec);
        let gram = phi.mul(&phi.adjoint());
        for u in g.elements() {
            let lhs = gram.mul(u);
            let rhs = u.mul(&gram);
            assert!(lhs.sub(&rhs).frobenius_norm() < 1e-10);
        }
    }
}
