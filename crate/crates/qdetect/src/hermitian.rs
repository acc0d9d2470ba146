//! Dense complex matrices and Hermitian matrix functions.
//!
//! Everything downstream (ensembles, measurements, the SDP solver) is built
//! on two types: a general [`ComplexMatrix`] for factors and block-column
//! concatenations, and a [`HermitianMatrix`] for operators. The Hermitian
//! eigensolver is a cyclic Jacobi iteration, which is accurate and entirely
//! self-contained at the dimensions this crate targets (a few hundred at
//! most).

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default relative rank tolerance: the noise floor of a double-precision
/// eigensolve.
pub const RANK_TOL_DEFAULT: f64 = 1e-10;

/// Relative tolerance for accepting a matrix as Hermitian at construction.
pub const HERMITICITY_TOL: f64 = 1e-12;

const MAX_JACOBI_SWEEPS: usize = 100;

/// Dense complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Parse("ragged rows in matrix".into()));
        }
        let data: Vec<Complex64> = rows.into_iter().flatten().collect();
        let m = Self { rows: r, cols: c, data };
        if !m.is_finite() {
            return Err(Error::NotFinite);
        }
        Ok(m)
    }

    /// Column vector from real entries.
    pub fn column_from_reals(entries: &[f64]) -> Self {
        Self {
            rows: entries.len(),
            cols: 1,
            data: entries.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).conj());
            }
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "inner dimensions must match");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        Self { rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        Self { rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let data = self.data.iter().map(|a| a * s).collect();
        Self { rows: self.rows, cols: self.cols, data }
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    pub fn trace(&self) -> Complex64 {
        assert_eq!(self.rows, self.cols);
        (0..self.rows).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Block-column concatenation `[A | B | ...]`.
    pub fn hconcat(blocks: &[&ComplexMatrix]) -> Self {
        assert!(!blocks.is_empty());
        let rows = blocks[0].rows;
        assert!(blocks.iter().all(|b| b.rows == rows));
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = Self::zeros(rows, cols);
        let mut offset = 0;
        for b in blocks {
            for i in 0..rows {
                for j in 0..b.cols {
                    out.set(i, offset + j, b.get(i, j));
                }
            }
            offset += b.cols;
        }
        out
    }

    /// `Re tr(A* B)`, the real trace inner product.
    pub fn inner_re(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a.conj() * b).re)
            .sum()
    }

    /// `self * other * self_adjoint_of(u)`, i.e. `U M U*` when called as
    /// `u.conjugate(m)`.
    pub fn conjugate_by(&self, u: &ComplexMatrix) -> ComplexMatrix {
        u.mul(self).mul(&u.adjoint())
    }
}

/// Hermitian matrix. Construction symmetrizes `(A + A*)/2`, so the stored
/// entries satisfy `entry(i,j) = conj(entry(j,i))` exactly and the diagonal
/// is real.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    mat: ComplexMatrix,
}

impl HermitianMatrix {
    /// Validating constructor: the input must be square, finite, and
    /// Hermitian within [`HERMITICITY_TOL`] relative to its largest entry.
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        if m.rows != m.cols {
            return Err(Error::NotSquare { rows: m.rows, cols: m.cols });
        }
        if !m.is_finite() {
            return Err(Error::NotFinite);
        }
        let scale = m.max_abs_entry().max(1e-300);
        let mut asym: f64 = 0.0;
        for i in 0..m.rows {
            for j in i..m.cols {
                asym = asym.max((m.get(i, j) - m.get(j, i).conj()).norm());
            }
        }
        if asym > HERMITICITY_TOL * scale {
            return Err(Error::NotHermitian {
                asymmetry: asym / scale,
                tol: HERMITICITY_TOL,
            });
        }
        Ok(Self::symmetrized(m))
    }

    /// Symmetrize without a tolerance check, for matrices that are Hermitian
    /// by construction up to accumulation error.
    pub fn symmetrized(m: ComplexMatrix) -> Self {
        assert_eq!(m.rows, m.cols);
        let n = m.rows;
        let mut out = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            out.set(i, i, Complex64::new(m.get(i, i).re, 0.0));
            for j in (i + 1)..n {
                let v = (m.get(i, j) + m.get(j, i).conj()).scale(0.5);
                out.set(i, j, v);
                out.set(j, i, v.conj());
            }
        }
        Self { mat: out }
    }

    pub fn zeros(n: usize) -> Self {
        Self { mat: ComplexMatrix::zeros(n, n) }
    }

    pub fn identity(n: usize) -> Self {
        Self { mat: ComplexMatrix::identity(n) }
    }

    pub fn dim(&self) -> usize {
        self.mat.rows
    }

    pub fn as_matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.mat.get(i, j)
    }

    pub fn trace(&self) -> f64 {
        self.mat.trace().re
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.mat.frobenius_norm()
    }

    pub fn add(&self, other: &Self) -> Self {
        Self { mat: self.mat.add(&other.mat) }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self { mat: self.mat.sub(&other.mat) }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { mat: self.mat.scale_re(s) }
    }

    /// Cholesky factorization `H = L L*`. Returns `None` unless `H` is
    /// strictly positive definite (every pivot positive and finite).
    pub fn cholesky(&self) -> Option<Cholesky> {
        let n = self.dim();
        let mut l = ComplexMatrix::zeros(n, n);
        for j in 0..n {
            let mut d = self.get(j, j).re;
            for k in 0..j {
                d -= l.get(j, k).norm_sqr();
            }
            if !(d > 0.0) || !d.is_finite() {
                return None;
            }
            let dj = d.sqrt();
            l.set(j, j, Complex64::new(dj, 0.0));
            for i in (j + 1)..n {
                let mut s = self.get(i, j);
                for k in 0..j {
                    s -= l.get(i, k) * l.get(j, k).conj();
                }
                l.set(i, j, s / dj);
            }
        }
        Some(Cholesky { l })
    }
}

/// Lower-triangular Cholesky factor of a positive definite Hermitian matrix.
#[derive(Debug, Clone)]
pub struct Cholesky {
    l: ComplexMatrix,
}

impl Cholesky {
    pub fn log_det(&self) -> f64 {
        (0..self.l.rows()).map(|i| self.l.get(i, i).re.ln()).sum::<f64>() * 2.0
    }

    /// Solve `H x = b` columnwise for a full matrix `b`.
    pub fn solve(&self, b: &ComplexMatrix) -> ComplexMatrix {
        let n = self.l.rows();
        assert_eq!(b.rows(), n);
        let mut x = b.clone();
        // forward: L y = b
        for j in 0..b.cols() {
            for i in 0..n {
                let mut s = x.get(i, j);
                for k in 0..i {
                    s -= self.l.get(i, k) * x.get(k, j);
                }
                x.set(i, j, s / self.l.get(i, i));
            }
            // backward: L* x = y
            for i in (0..n).rev() {
                let mut s = x.get(i, j);
                for k in (i + 1)..n {
                    s -= self.l.get(k, i).conj() * x.get(k, j);
                }
                x.set(i, j, s / self.l.get(i, i));
            }
        }
        x
    }

    pub fn inverse(&self) -> HermitianMatrix {
        let n = self.l.rows();
        HermitianMatrix::symmetrized(self.solve(&ComplexMatrix::identity(n)))
    }
}

/// Eigendecomposition `H = U diag(eigenvalues) U*` with eigenvalues ascending
/// and unitary `U` (columns are eigenvectors).
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl EigenDecomposition {
    pub fn min_eigenvalue(&self) -> f64 {
        *self.eigenvalues.first().unwrap_or(&0.0)
    }

    pub fn max_eigenvalue(&self) -> f64 {
        *self.eigenvalues.last().unwrap_or(&0.0)
    }

    /// Reassemble `U f(Λ) U*` for a scalar function of the eigenvalues.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> HermitianMatrix {
        let n = self.eigenvectors.rows();
        let u = &self.eigenvectors;
        let mut out = ComplexMatrix::zeros(n, n);
        for (k, &lam) in self.eigenvalues.iter().enumerate() {
            let flam = f(lam);
            if flam == 0.0 {
                continue;
            }
            for i in 0..n {
                let ui = u.get(i, k) * flam;
                for j in 0..n {
                    let v = out.get(i, j) + ui * u.get(j, k).conj();
                    out.set(i, j, v);
                }
            }
        }
        HermitianMatrix::symmetrized(out)
    }
}

/// Hermitian eigendecomposition by cyclic Jacobi rotations.
pub fn eigh(h: &HermitianMatrix) -> Result<EigenDecomposition> {
    let n = h.dim();
    let mut a = h.as_matrix().clone();
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm().max(1e-300);
    let tol = 1e-15 * scale;

    let mut converged = false;
    let mut last_off = 0.0;
    for _sweep in 0..MAX_JACOBI_SWEEPS {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a.get(p, q).norm_sqr();
            }
        }
        last_off = (2.0 * off).sqrt();
        if last_off <= tol {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let g = a.get(p, q);
                let absg = g.norm();
                if absg <= tol / (n as f64 * 10.0) {
                    continue;
                }
                let phase = g / absg;
                let alpha = a.get(p, p).re;
                let beta = a.get(q, q).re;
                let tau = (beta - alpha) / (2.0 * absg);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // Unitary J restricted to (p, q):
                //   [ c            s           ]
                //   [ -s e^{-i phi}  c e^{-i phi} ]
                let j21 = phase.conj() * (-s);
                let j22 = phase.conj() * c;
                // A <- A J (columns p, q)
                for k in 0..n {
                    let akp = a.get(k, p);
                    let akq = a.get(k, q);
                    a.set(k, p, akp * c + akq * j21);
                    a.set(k, q, akp * s + akq * j22);
                }
                // A <- J* A (rows p, q)
                for k in 0..n {
                    let apk = a.get(p, k);
                    let aqk = a.get(q, k);
                    a.set(p, k, apk * c + aqk * j21.conj());
                    a.set(q, k, apk * s + aqk * j22.conj());
                }
                a.set(p, q, Complex64::new(0.0, 0.0));
                a.set(q, p, Complex64::new(0.0, 0.0));
                a.set(p, p, Complex64::new(a.get(p, p).re, 0.0));
                a.set(q, q, Complex64::new(a.get(q, q).re, 0.0));
                // V <- V J
                for k in 0..n {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, vkp * c + vkq * j21);
                    v.set(k, q, vkp * s + vkq * j22);
                }
            }
        }
    }
    if !converged {
        return Err(Error::EighNoConvergence {
            sweeps: MAX_JACOBI_SWEEPS,
            off_diagonal: last_off,
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a.get(i, i).re.partial_cmp(&a.get(j, j).re).unwrap());
    let eigenvalues: Vec<f64> = order.iter().map(|&i| a.get(i, i).re).collect();
    let mut u = ComplexMatrix::zeros(n, n);
    for (col, &src) in order.iter().enumerate() {
        for row in 0..n {
            u.set(row, col, v.get(row, src));
        }
    }
    Ok(EigenDecomposition { eigenvalues, eigenvectors: u })
}

fn psd_eigs(h: &HermitianMatrix, rank_tol: f64) -> Result<EigenDecomposition> {
    let d = eigh(h)?;
    let scale = d
        .eigenvalues
        .iter()
        .map(|l| l.abs())
        .fold(0.0f64, f64::max)
        .max(1e-300);
    let min = d.min_eigenvalue();
    if min < -rank_tol * scale {
        return Err(Error::NotPsd { min_eigenvalue: min });
    }
    Ok(d)
}

/// Unique PSD Hermitian square root of a PSD matrix.
pub fn matrix_sqrt(h: &HermitianMatrix) -> Result<HermitianMatrix> {
    let d = psd_eigs(h, RANK_TOL_DEFAULT)?;
    Ok(d.apply(|l| l.max(0.0).sqrt()))
}

/// Inverse square root of a strictly positive definite matrix.
///
/// Eigenvalues below `rank_tol * lambda_max` make the input singular for
/// this operation; use [`matrix_pinv_sqrt`] for pseudo-inverse semantics on
/// the support.
pub fn matrix_inv_sqrt(h: &HermitianMatrix, rank_tol: f64) -> Result<HermitianMatrix> {
    let d = psd_eigs(h, rank_tol)?;
    let lmax = d.max_eigenvalue();
    let min = d.min_eigenvalue();
    if lmax <= 0.0 || min <= rank_tol * lmax {
        return Err(Error::Singular { min_eigenvalue: min });
    }
    Ok(d.apply(|l| 1.0 / l.sqrt()))
}

/// Pseudo-inverse square root: zero on the numerical kernel, `1/sqrt` on the
/// support. The loud, explicitly-named variant for rank-deficient input.
pub fn matrix_pinv_sqrt(h: &HermitianMatrix, rank_tol: f64) -> Result<HermitianMatrix> {
    let d = psd_eigs(h, rank_tol)?;
    let cut = rank_tol * d.max_eigenvalue().max(0.0);
    Ok(d.apply(|l| if l > cut { 1.0 / l.sqrt() } else { 0.0 }))
}

/// `true` iff `lambda_min(H) >= -tol * max(1, lambda_max(H))`.
pub fn is_psd(h: &HermitianMatrix, tol: f64) -> Result<bool> {
    let d = eigh(h)?;
    Ok(d.min_eigenvalue() >= -tol * d.max_eigenvalue().max(1.0))
}

/// Factor a PSD matrix as `rho = phi phi*` with one column per nonzero
/// eigenvalue (eigendecomposition route, so rank-deficient input is fine).
pub fn factorize(rho: &HermitianMatrix, rank_tol: f64) -> Result<ComplexMatrix> {
    let d = psd_eigs(rho, rank_tol)?;
    let cut = rank_tol * d.max_eigenvalue().max(0.0);
    let n = rho.dim();
    let kept: Vec<usize> = (0..n)
        .rev()
        .filter(|&k| d.eigenvalues[k] > cut)
        .collect();
    let mut phi = ComplexMatrix::zeros(n, kept.len());
    for (col, &k) in kept.iter().enumerate() {
        let root = d.eigenvalues[k].sqrt();
        for row in 0..n {
            phi.set(row, col, d.eigenvectors.get(row, k).scale(root));
        }
    }
    Ok(phi)
}

/// Numerical rank: count of eigenvalues above `rank_tol * lambda_max`.
pub fn numerical_rank(h: &HermitianMatrix, rank_tol: f64) -> Result<usize> {
    let d = eigh(h)?;
    let cut = rank_tol * d.eigenvalues.iter().map(|l| l.abs()).fold(0.0f64, f64::max);
    Ok(d.eigenvalues.iter().filter(|&&l| l.abs() > cut).count())
}
