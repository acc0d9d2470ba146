//! Minimum-error measurement as a semidefinite program: full,
//! GU-reduced, and CGU-reduced forms, plus dual certificates.
//!
//! All three problems are instances of one template over a finite unitary
//! group `{U_i}` (the trivial group for the full problem) and weighted
//! generator targets `{C_k}`:
//!
//! ```text
//!   primal:  max sum_k <C_k, Pi_k>   s.t.  Pi_k >= 0,  sum_{i,k} U_i Pi_k U_i* = I
//!   dual:    min tr(Y)               s.t.  sum_i U_i* Y U_i >= C_k  for all k
//! ```
//!
//! The solver is a dual barrier path-following method. Minimizing
//! `tr(Y) - mu sum_k log det(S_k)` with slacks `S_k = sum_i U_i* Y U_i - C_k`
//! has the stationarity condition `sum_{i,k} U_i (mu S_k^{-1}) U_i* = I`, so
//! the matrices `Pi_k = mu S_k^{-1}` are a strictly feasible primal point
//! with duality gap exactly `mu * k * n` at the central path. Driving `mu`
//! down yields a primal/dual pair whose gap certifies optimality.

use num_complex::Complex64;

use crate::ensemble::{correct_detection_probability, Ensemble, Povm};
use crate::error::{Error, Result};
use crate::hermitian::{
    eigh, matrix_inv_sqrt, ComplexMatrix, HermitianMatrix, RANK_TOL_DEFAULT,
};
use crate::symmetry::{generate_cgu, generate_gu, CguSpec, GuSpec};

/// Relative kernel threshold when recovering a POVM from a certificate.
const RECOVERY_KERNEL_TOL: f64 = 1e-7;

/// Completion residual above which recovery is declared infeasible.
const RECOVERY_RESIDUAL_TOL: f64 = 1e-6;

/// Interior-point options.
#[derive(Debug, Clone)]
pub struct SolverOptions {
    /// Stop when `|tr(X) - P_d| <= gap_tol * max(1, P_d)`.
    pub gap_tol: f64,
    /// Dual feasibility slack tolerance used by certificate checks.
    pub feas_tol: f64,
    /// Cap on total Newton iterations.
    pub max_iters: usize,
    /// Initial barrier parameter.
    pub mu_init: f64,
    /// Barrier reduction factor per centering stage, in (0, 1).
    pub sigma: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            gap_tol: 1e-8,
            feas_tol: 1e-9,
            max_iters: 200,
            mu_init: 1.0,
            sigma: 0.1,
        }
    }
}

impl SolverOptions {
    fn validate(&self) -> Result<()> {
        if !(self.gap_tol > 0.0 && self.feas_tol > 0.0 && self.mu_init > 0.0) {
            return Err(Error::InvalidOptions("tolerances must be positive".into()));
        }
        if !(self.sigma > 0.0 && self.sigma < 1.0) {
            return Err(Error::InvalidOptions("sigma must lie in (0, 1)".into()));
        }
        Ok(())
    }
}

/// Dual certificate: Hermitian `X` with `X >= p_i rho_i` whose trace bounds
/// (and at the optimum equals) the best attainable detection probability.
#[derive(Debug, Clone)]
pub struct Certificate {
    pub x: HermitianMatrix,
    /// Per-state slack matrices `X - p_i rho_i`.
    pub slacks: Vec<HermitianMatrix>,
    pub trace: f64,
}

impl Certificate {
    /// Build a certificate from the dual variable and an ensemble.
    pub fn from_dual(x: HermitianMatrix, e: &Ensemble) -> Self {
        let slacks = e
            .states()
            .iter()
            .zip(e.priors())
            .map(|(rho, &p)| x.sub(&rho.matrix().scale(p)))
            .collect();
        let trace = x.trace();
        Self { x, slacks, trace }
    }
}

/// One recorded point of the interior-point path: a feasible dual objective
/// and a feasible primal objective (weak duality: dual >= primal always).
#[derive(Debug, Clone, Copy)]
pub struct PathPoint {
    pub mu: f64,
    pub dual_objective: f64,
    pub primal_objective: f64,
}

/// Problem-size accounting for the solved form and its full counterpart.
#[derive(Debug, Clone)]
pub struct Diagnostics {
    /// Real unknowns of the problem as solved (`r n^2` reduced, `m n^2` full).
    pub unknowns: usize,
    /// Constraint count of the problem as solved (`r + 1` reduced, `m + 1` full).
    pub constraints: usize,
    pub full_unknowns: usize,
    pub full_constraints: usize,
    pub path: Vec<PathPoint>,
}

/// Converged solver output.
#[derive(Debug, Clone)]
pub struct Solution {
    pub povm: Povm,
    pub certificate: Certificate,
    pub p_correct: f64,
    /// `|tr(X) - P_d|` of the returned feasible pair.
    pub duality_gap: f64,
    /// Newton iterations spent.
    pub iterations: usize,
    pub diagnostics: Diagnostics,
}

/// Residuals of the paper's optimality conditions for a (POVM, certificate)
/// pair.
#[derive(Debug, Clone)]
pub struct VerificationReport {
    /// Smallest eigenvalue of each slack `X - p_i rho_i`.
    pub slack_min_eigenvalues: Vec<f64>,
    /// `||(X - p_i rho_i) Pi_i||_F` per state.
    pub complementary_residuals: Vec<f64>,
    pub povm_completeness_residual: f64,
    pub slack_psd_ok: bool,
    pub complementary_ok: bool,
    pub optimal: bool,
}

// ---------------------------------------------------------------------------
// Hermitian coordinate basis and small real solves
// ---------------------------------------------------------------------------

/// Orthonormal (under `Re tr(A*B)`) real basis of n x n Hermitian matrices.
fn hermitian_basis(n: usize) -> Vec<ComplexMatrix> {
    let inv_sqrt2 = 1.0 / 2f64.sqrt();
    let mut basis = Vec::with_capacity(n * n);
    for i in 0..n {
        let mut e = ComplexMatrix::zeros(n, n);
        e.set(i, i, Complex64::new(1.0, 0.0));
        basis.push(e);
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let mut re = ComplexMatrix::zeros(n, n);
            re.set(i, j, Complex64::new(inv_sqrt2, 0.0));
            re.set(j, i, Complex64::new(inv_sqrt2, 0.0));
            basis.push(re);
            let mut im = ComplexMatrix::zeros(n, n);
            im.set(i, j, Complex64::new(0.0, -inv_sqrt2));
            im.set(j, i, Complex64::new(0.0, inv_sqrt2));
            basis.push(im);
        }
    }
    basis
}

fn from_coords(basis: &[ComplexMatrix], coords: &[f64]) -> ComplexMatrix {
    let n = basis[0].rows();
    let mut out = ComplexMatrix::zeros(n, n);
    for (e, &c) in basis.iter().zip(coords) {
        if c != 0.0 {
            out = out.add(&e.scale_re(c));
        }
    }
    out
}

/// Dense real solve by LU with partial pivoting.
fn solve_real(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let (pivot, pmax) = (col..n)
            .map(|r| (r, a[r][col].abs()))
            .max_by(|x, y| x.1.partial_cmp(&y.1).unwrap())?;
        if pmax == 0.0 || !pmax.is_finite() {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for r in (col + 1)..n {
            let f = a[r][col] / a[col][col];
            if f == 0.0 {
                continue;
            }
            for c in col..n {
                a[r][c] -= f * a[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let mut s = b[r];
        for c in (r + 1)..n {
            s -= a[r][c] * x[c];
        }
        x[r] = s / a[r][r];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

/// Least-squares solve of an overdetermined real system via eigenvalue
/// pseudo-inverse of the normal equations.
fn solve_least_squares(a: &[Vec<f64>], b: &[f64]) -> Result<Vec<f64>> {
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut normal = ComplexMatrix::zeros(cols, cols);
    let mut rhs = vec![0.0f64; cols];
    for i in 0..cols {
        for j in 0..cols {
            let mut s = 0.0;
            for r in 0..rows {
                s += a[r][i] * a[r][j];
            }
            normal.set(i, j, Complex64::new(s, 0.0));
        }
        for r in 0..rows {
            rhs[i] += a[r][i] * b[r];
        }
    }
    let d = eigh(&HermitianMatrix::symmetrized(normal))?;
    let cut = 1e-12 * d.max_eigenvalue().max(1e-300);
    let mut x = vec![0.0f64; cols];
    for (k, &lam) in d.eigenvalues.iter().enumerate() {
        if lam <= cut {
            continue;
        }
        let mut proj = 0.0;
        for i in 0..cols {
            proj += d.eigenvectors.get(i, k).re * rhs[i];
        }
        proj /= lam;
        for i in 0..cols {
            x[i] += d.eigenvectors.get(i, k).re * proj;
        }
    }
    Ok(x)
}

// ---------------------------------------------------------------------------
// The barrier solver on the group template
// ---------------------------------------------------------------------------

struct Template<'a> {
    /// Group elements `U_i`, identity first (a single identity for the full
    /// problem).
    group: &'a [ComplexMatrix],
    /// Weighted targets `C_k`.
    targets: &'a [HermitianMatrix],
}

struct TemplateSolution {
    dual: HermitianMatrix,
    generators: Vec<HermitianMatrix>,
    iterations: usize,
    path: Vec<PathPoint>,
}

impl Template<'_> {
    fn dim(&self) -> usize {
        self.targets[0].dim()
    }

    /// `A*(M) = sum_i U_i* M U_i`.
    fn apply_astar(&self, m: &ComplexMatrix) -> ComplexMatrix {
        let n = self.dim();
        let mut out = ComplexMatrix::zeros(n, n);
        for u in self.group {
            out = out.add(&u.adjoint().mul(m).mul(u));
        }
        out
    }

    /// `A(M) = sum_i U_i M U_i*`.
    fn apply_a(&self, m: &ComplexMatrix) -> ComplexMatrix {
        let n = self.dim();
        let mut out = ComplexMatrix::zeros(n, n);
        for u in self.group {
            out = out.add(&m.conjugate_by(u));
        }
        out
    }

    fn slacks(&self, y: &HermitianMatrix) -> Vec<HermitianMatrix> {
        let ay = HermitianMatrix::symmetrized(self.apply_astar(y.as_matrix()));
        self.targets.iter().map(|c| ay.sub(c)).collect()
    }

    /// Barrier objective; `None` when any slack leaves the cone.
    fn barrier_value(&self, y: &HermitianMatrix, mu: f64) -> Option<f64> {
        let mut val = y.trace();
        for s in self.slacks(y) {
            val -= mu * s.cholesky()?.log_det();
        }
        Some(val)
    }

    /// Group-average `Pi_k = mu S_k^{-1}`, then rescale multiplicatively so
    /// `sum_k A(Pi_k) = I` holds exactly (the rescaling matrix commutes with
    /// every group element because `sum_k A(Pi_k)` is conjugation-invariant).
    fn feasible_generators(
        &self,
        slacks: &[HermitianMatrix],
        mu: f64,
    ) -> Result<Vec<HermitianMatrix>> {
        let mut gens: Vec<HermitianMatrix> = Vec::with_capacity(slacks.len());
        for s in slacks {
            let ch = s
                .cholesky()
                .ok_or_else(|| Error::NumericalBreakdown("slack left the PSD cone".into()))?;
            gens.push(ch.inverse().scale(mu));
        }
        let mut total = ComplexMatrix::zeros(self.dim(), self.dim());
        for g in &gens {
            total = total.add(&self.apply_a(g.as_matrix()));
        }
        let corr = matrix_inv_sqrt(&HermitianMatrix::symmetrized(total), RANK_TOL_DEFAULT)
            .map_err(|_| Error::NumericalBreakdown("primal completeness correction failed".into()))?;
        Ok(gens
            .into_iter()
            .map(|g| {
                HermitianMatrix::symmetrized(
                    corr.as_matrix().mul(g.as_matrix()).mul(corr.as_matrix()),
                )
            })
            .collect())
    }

    fn solve(&self, opts: &SolverOptions) -> Result<TemplateSolution> {
        opts.validate()?;
        let n = self.dim();
        let basis = hermitian_basis(n);
        let d = basis.len();
        let astar_basis: Vec<ComplexMatrix> =
            basis.iter().map(|e| self.apply_astar(e)).collect();
        // For the trivial group A* is the identity map and each basis
        // element has at most two nonzero entries, so
        // tr(E_b M E_a M) = sum over those entries of products of M —
        // O(1) per Hessian entry instead of O(n^2).
        let trivial_group = self.group.len() == 1
            && self.group[0]
                .sub(&ComplexMatrix::identity(n))
                .max_abs_entry()
                <= 1e-14;
        let sparse: Option<Vec<Vec<(usize, usize, Complex64)>>> = trivial_group.then(|| {
            basis
                .iter()
                .map(|e| {
                    let mut entries = Vec::with_capacity(2);
                    for i in 0..n {
                        for j in 0..n {
                            let v = e.get(i, j);
                            if v.norm_sqr() > 0.0 {
                                entries.push((i, j, v));
                            }
                        }
                    }
                    entries
                })
                .collect()
        });

        // Strictly feasible start: Y0 = c I with A*(c I) = c l I above every
        // target.
        let l = self.group.len() as f64;
        let mut top = 0.0f64;
        for c in self.targets {
            top = top.max(eigh(c)?.max_eigenvalue());
        }
        let mut y = HermitianMatrix::identity(n).scale((1.0 + top) / l);
        let mut mu = opts.mu_init;
        let mut iterations = 0usize;
        let mut path = Vec::new();

        loop {
            // center at the current mu
            let mut stage_steps = 0usize;
            let mut last_gnorm = f64::INFINITY;
            loop {
                let slacks = self.slacks(&y);
                let mut sinvs = Vec::with_capacity(slacks.len());
                for s in &slacks {
                    let ch = s.cholesky().ok_or_else(|| {
                        Error::NumericalBreakdown("iterate left the feasible region".into())
                    })?;
                    sinvs.push(ch.inverse());
                }
                // gradient of the barrier in matrix form
                let mut grad_mat = ComplexMatrix::identity(n);
                for sinv in &sinvs {
                    grad_mat = grad_mat.sub(&self.apply_a(sinv.as_matrix()).scale_re(mu));
                }
                let g: Vec<f64> = basis.iter().map(|e| e.inner_re(&grad_mat)).collect();
                let gnorm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
                // stop when centered, when progress stalls at the numerical
                // floor, or at the per-stage cap; the gap test below judges
                // the iterate either way
                if gnorm <= (1e-3 * mu).max(1e-11)
                    || gnorm >= 0.99 * last_gnorm
                    || stage_steps >= 25
                {
                    break;
                }
                last_gnorm = gnorm;
                if iterations >= opts.max_iters {
                    let gap = mu * self.targets.len() as f64 * n as f64;
                    return Err(Error::MaxIterations { max_iters: opts.max_iters, gap });
                }
                // Hessian H[a][b] = mu sum_k <A*(E_b), S_k^{-1} A*(E_a) S_k^{-1}>
                let mut h = vec![vec![0.0f64; d]; d];
                if let Some(sp) = &sparse {
                    for sinv in &sinvs {
                        let m = sinv.as_matrix();
                        for a in 0..d {
                            for b in a..d {
                                // tr(E_b M E_a M) = sum beta alpha M[v,s] M[t,u]
                                let mut acc = Complex64::new(0.0, 0.0);
                                for &(s, t, alpha) in &sp[a] {
                                    for &(u, v, beta) in &sp[b] {
                                        acc += beta * alpha * m.get(v, s) * m.get(t, u);
                                    }
                                }
                                let val = mu * acc.re;
                                h[a][b] += val;
                                if a != b {
                                    h[b][a] += val;
                                }
                            }
                        }
                    }
                } else {
                    for sinv in &sinvs {
                        let si = sinv.as_matrix();
                        let fs: Vec<ComplexMatrix> = astar_basis
                            .iter()
                            .map(|ae| si.mul(ae).mul(si))
                            .collect();
                        for a in 0..d {
                            for b in a..d {
                                let v = mu * astar_basis[b].inner_re(&fs[a]);
                                h[a][b] += v;
                                if a != b {
                                    h[b][a] += v;
                                }
                            }
                        }
                    }
                }
                // The dual variable is determined only up to the kernel of
                // A* (gauge directions along which both tr(Y) and the
                // barrier are flat), so H is singular for nontrivial
                // groups. The gradient vanishes identically there; a tiny
                // relative Tikhonov shift makes the Newton system
                // nonsingular without moving the step in active directions.
                let hmax = (0..d).map(|a| h[a][a]).fold(0.0f64, f64::max);
                for (a, row) in h.iter_mut().enumerate() {
                    row[a] += 1e-12 * hmax.max(1e-300);
                }
                let neg_g: Vec<f64> = g.iter().map(|v| -v).collect();
                let Some(delta) = solve_real(h, neg_g) else {
                    break; // stalled Newton system; accept the iterate
                };
                let dir = HermitianMatrix::symmetrized(from_coords(&basis, &delta));
                let slope: f64 = g.iter().zip(&delta).map(|(gi, di)| gi * di).sum();
                if !(slope < 0.0) {
                    break; // not a descent direction at this conditioning
                }
                let f0 = self
                    .barrier_value(&y, mu)
                    .ok_or_else(|| Error::NumericalBreakdown("infeasible iterate".into()))?;
                let mut t = 1.0f64;
                let mut accepted = false;
                for _ in 0..60 {
                    let cand = y.add(&dir.scale(t));
                    if let Some(fv) = self.barrier_value(&cand, mu) {
                        if fv <= f0 + 0.25 * t * slope {
                            y = cand;
                            accepted = true;
                            break;
                        }
                    }
                    t *= 0.5;
                }
                iterations += 1;
                stage_steps += 1;
                if !accepted {
                    break; // line search exhausted; accept the iterate
                }
            }

            // feasible primal/dual pair at this stage
            let slacks = self.slacks(&y);
            let generators = self.feasible_generators(&slacks, mu)?;
            let dual_objective = y.trace();
            let primal_objective: f64 = self
                .targets
                .iter()
                .zip(&generators)
                .map(|(c, p)| c.as_matrix().inner_re(p.as_matrix()))
                .sum();
            path.push(PathPoint { mu, dual_objective, primal_objective });
            let gap = dual_objective - primal_objective;
            log::debug!(
                "mu={mu:.3e} dual={dual_objective:.12} primal={primal_objective:.12} gap={gap:.3e} iters={iterations}"
            );
            if gap.abs() <= opts.gap_tol * primal_objective.abs().max(1.0) {
                return Ok(TemplateSolution { dual: y, generators, iterations, path });
            }
            if mu < 1e-14 {
                return Err(Error::NumericalBreakdown(format!(
                    "barrier exhausted with duality gap {gap:.3e}"
                )));
            }
            if iterations >= opts.max_iters {
                return Err(Error::MaxIterations { max_iters: opts.max_iters, gap });
            }
            mu *= opts.sigma;
        }
    }
}

// ---------------------------------------------------------------------------
// Public solver entry points
// ---------------------------------------------------------------------------

fn identity_group(n: usize) -> Vec<ComplexMatrix> {
    vec![ComplexMatrix::identity(n)]
}

/// Solve the full minimum-error problem over the ensemble.
pub fn solve_optimal(e: &Ensemble, opts: &SolverOptions) -> Result<Solution> {
    let n = e.dim();
    let m = e.len();
    let targets: Vec<HermitianMatrix> = e
        .states()
        .iter()
        .zip(e.priors())
        .map(|(rho, &p)| rho.matrix().scale(p))
        .collect();
    let group = identity_group(n);
    let t = Template { group: &group, targets: &targets };
    let sol = t.solve(opts)?;
    let povm = Povm::new(sol.generators)?;
    let p_correct = correct_detection_probability(e, &povm)?;
    let certificate = Certificate::from_dual(sol.dual, e);
    let duality_gap = (certificate.trace - p_correct).abs();
    Ok(Solution {
        povm,
        certificate,
        p_correct,
        duality_gap,
        iterations: sol.iterations,
        diagnostics: Diagnostics {
            unknowns: m * n * n,
            constraints: m + 1,
            full_unknowns: m * n * n,
            full_constraints: m + 1,
            path: sol.path,
        },
    })
}

fn expand_reduced(
    group: &[ComplexMatrix],
    generators: &[HermitianMatrix],
) -> Vec<HermitianMatrix> {
    let mut out = Vec::with_capacity(group.len() * generators.len());
    for u in group {
        for g in generators {
            out.push(HermitianMatrix::symmetrized(g.as_matrix().conjugate_by(u)));
        }
    }
    out
}

/// Full-problem dual variable from the reduced one: the group average
/// `(1/l) sum_j U_j Y U_j*`, which inherits feasibility and the trace.
fn expanded_certificate(group: &[ComplexMatrix], y: &HermitianMatrix) -> HermitianMatrix {
    let n = y.dim();
    let mut acc = ComplexMatrix::zeros(n, n);
    for u in group {
        acc = acc.add(&y.as_matrix().conjugate_by(u));
    }
    HermitianMatrix::symmetrized(acc.scale_re(1.0 / group.len() as f64))
}

fn solve_reduced(
    group: &[ComplexMatrix],
    generator_states: &[HermitianMatrix],
    e: &Ensemble,
    opts: &SolverOptions,
) -> Result<Solution> {
    let n = e.dim();
    let l = group.len();
    let r = generator_states.len();
    // P_d = (1/r) sum_k tr(rho_k Pi_k) at equal priors 1/(l r)
    let targets: Vec<HermitianMatrix> = generator_states
        .iter()
        .map(|rho| rho.scale(1.0 / r as f64))
        .collect();
    let t = Template { group, targets: &targets };
    let sol = t.solve(opts)?;
    let povm = Povm::new(expand_reduced(group, &sol.generators))?;
    let p_correct = correct_detection_probability(e, &povm)?;
    let certificate = Certificate::from_dual(expanded_certificate(group, &sol.dual), e);
    let duality_gap = (certificate.trace - p_correct).abs();
    Ok(Solution {
        povm,
        certificate,
        p_correct,
        duality_gap,
        iterations: sol.iterations,
        diagnostics: Diagnostics {
            unknowns: r * n * n,
            constraints: r + 1,
            full_unknowns: l * r * n * n,
            full_constraints: l * r + 1,
            path: sol.path,
        },
    })
}

/// Solve the GU-reduced problem (`n^2` real unknowns instead of `m n^2`) and
/// expand the covariant optimal POVM.
pub fn solve_gu(spec: &GuSpec, opts: &SolverOptions) -> Result<Solution> {
    let e = generate_gu(spec)?;
    let rho = HermitianMatrix::symmetrized(
        spec.generator_factor.mul(&spec.generator_factor.adjoint()),
    );
    solve_reduced(spec.group.elements(), &[rho], &e, opts)
}

/// Solve the CGU-reduced problem (`r n^2` real unknowns instead of
/// `l r n^2`) and expand the covariant optimal POVM.
pub fn solve_cgu(spec: &CguSpec, opts: &SolverOptions) -> Result<Solution> {
    let e = generate_cgu(spec)?;
    let gens: Vec<HermitianMatrix> = spec
        .generator_factors
        .iter()
        .map(|phi| HermitianMatrix::symmetrized(phi.mul(&phi.adjoint())))
        .collect();
    solve_reduced(spec.group.elements(), &gens, &e, opts)
}

/// Recover an optimal POVM from a feasible dual certificate: each operator
/// is supported on the kernel of its slack, with completion coefficients
/// found by least squares and projected back to the PSD cone.
pub fn recover_povm(e: &Ensemble, cert: &Certificate) -> Result<Povm> {
    let n = e.dim();
    if cert.x.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: cert.x.dim() });
    }
    if cert.slacks.len() != e.len() {
        return Err(Error::DimensionMismatch { expected: e.len(), got: cert.slacks.len() });
    }
    // kernel bases
    let mut kernels: Vec<ComplexMatrix> = Vec::with_capacity(e.len());
    for slack in &cert.slacks {
        let d = eigh(slack)?;
        let cut = RECOVERY_KERNEL_TOL * d.max_eigenvalue().max(0.0);
        let cols: Vec<usize> = (0..n).filter(|&k| d.eigenvalues[k] <= cut).collect();
        let mut p = ComplexMatrix::zeros(n, cols.len());
        for (c, &k) in cols.iter().enumerate() {
            for row in 0..n {
                p.set(row, c, d.eigenvectors.get(row, k));
            }
        }
        kernels.push(p);
    }
    // unknowns: Hermitian C_i on each kernel; equations: sum_i P_i C_i P_i* = I
    let outer_basis = hermitian_basis(n);
    let mut design: Vec<Vec<f64>> = Vec::new();
    let mut columns: Vec<(usize, ComplexMatrix)> = Vec::new(); // (state, embedded basis op)
    for (i, p) in kernels.iter().enumerate() {
        let k = p.cols();
        if k == 0 {
            continue;
        }
        for eb in hermitian_basis(k) {
            let embedded = p.mul(&eb).mul(&p.adjoint());
            columns.push((i, embedded));
        }
    }
    if columns.is_empty() {
        return Err(Error::RecoveryInfeasible { residual: (n as f64).sqrt() });
    }
    for ob in &outer_basis {
        design.push(columns.iter().map(|(_, emb)| ob.inner_re(emb)).collect());
    }
    let rhs: Vec<f64> = outer_basis
        .iter()
        .map(|ob| ob.inner_re(&ComplexMatrix::identity(n)))
        .collect();
    let coeffs = solve_least_squares(&design, &rhs)?;
    // assemble, PSD-project each block, and measure the completion residual
    let mut raw = vec![ComplexMatrix::zeros(n, n); e.len()];
    for ((i, emb), &c) in columns.iter().zip(&coeffs) {
        raw[*i] = raw[*i].add(&emb.scale_re(c));
    }
    let mut ops = Vec::with_capacity(e.len());
    let mut total = ComplexMatrix::zeros(n, n);
    for r in raw {
        let h = HermitianMatrix::symmetrized(r);
        let projected = eigh(&h)?.apply(|l| l.max(0.0));
        total = total.add(projected.as_matrix());
        ops.push(projected);
    }
    let residual = total.sub(&ComplexMatrix::identity(n)).frobenius_norm();
    if residual > RECOVERY_RESIDUAL_TOL {
        return Err(Error::RecoveryInfeasible { residual });
    }
    // absorb the tiny residual multiplicatively so the POVM is exact
    let corr = matrix_inv_sqrt(&HermitianMatrix::symmetrized(total), RANK_TOL_DEFAULT)
        .map_err(|_| Error::RecoveryInfeasible { residual })?;
    let ops = ops
        .into_iter()
        .map(|op| {
            HermitianMatrix::symmetrized(
                corr.as_matrix().mul(op.as_matrix()).mul(corr.as_matrix()),
            )
        })
        .collect();
    Povm::new(ops)
}

/// Check the optimality conditions: slack PSD-ness, complementary slackness
/// `(X - p_i rho_i) Pi_i = 0`, and POVM validity.
pub fn verify_optimality(
    e: &Ensemble,
    m: &Povm,
    cert: &Certificate,
    tol: f64,
) -> Result<VerificationReport> {
    if e.dim() != m.dim() || e.dim() != cert.x.dim() {
        return Err(Error::DimensionMismatch { expected: e.dim(), got: m.dim().min(cert.x.dim()) });
    }
    if e.len() != m.len() || e.len() != cert.slacks.len() {
        return Err(Error::DimensionMismatch {
            expected: e.len(),
            got: m.len().min(cert.slacks.len()),
        });
    }
    let mut slack_min_eigenvalues = Vec::with_capacity(e.len());
    let mut complementary_residuals = Vec::with_capacity(e.len());
    let mut scale = 1.0f64;
    for (slack, pi) in cert.slacks.iter().zip(m.operators()) {
        let d = eigh(slack)?;
        slack_min_eigenvalues.push(d.min_eigenvalue());
        scale = scale.max(d.max_eigenvalue());
        complementary_residuals
            .push(slack.as_matrix().mul(pi.as_matrix()).frobenius_norm());
    }
    let slack_psd_ok = slack_min_eigenvalues.iter().all(|&l| l >= -tol * scale);
    let complementary_ok = complementary_residuals.iter().all(|&r| r <= tol);
    let povm_completeness_residual = m.completeness_residual();
    let optimal = slack_psd_ok
        && complementary_ok
        && povm_completeness_residual <= crate::ensemble::COMPLETENESS_TOL;
    Ok(VerificationReport {
        slack_min_eigenvalues,
        complementary_residuals,
        povm_completeness_residual,
        slack_psd_ok,
        complementary_ok,
        optimal,
    })
}
