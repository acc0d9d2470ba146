//! Shared fixtures for integration tests: seeded random ensembles with
//! exact group structure, and an independent Helstrom sweep oracle.

use num_complex::Complex64;
use qdetect::{
    build_group, CguSpec, ComplexMatrix, DensityOperator, Ensemble, GuSpec, UnitaryGroup,
};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard normal via Box-Muller.
pub fn gaussian(r: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = r.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = r.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

pub fn random_complex(r: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(gaussian(r), gaussian(r))
}

pub fn random_matrix(r: &mut ChaCha8Rng, rows: usize, cols: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m.set(i, j, random_complex(r));
        }
    }
    m
}

/// Haar-ish random unitary: Gram-Schmidt on a complex Gaussian matrix.
pub fn random_unitary(r: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    loop {
        let g = random_matrix(r, n, n);
        if let Some(q) = gram_schmidt(&g) {
            return q;
        }
    }
}

fn gram_schmidt(g: &ComplexMatrix) -> Option<ComplexMatrix> {
    let n = g.rows();
    let mut q = g.clone();
    for j in 0..n {
        for k in 0..j {
            // proj = <q_k, q_j>
            let mut proj = Complex64::new(0.0, 0.0);
            for i in 0..n {
                proj += q.get(i, k).conj() * q.get(i, j);
            }
            for i in 0..n {
                let v = q.get(i, j) - proj * q.get(i, k);
                q.set(i, j, v);
            }
        }
        let norm: f64 = (0..n).map(|i| q.get(i, j).norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-8 {
            return None;
        }
        for i in 0..n {
            q.set(i, j, q.get(i, j) / norm);
        }
    }
    Some(q)
}

/// Random Hermitian matrix with Gaussian entries.
pub fn random_hermitian(r: &mut ChaCha8Rng, n: usize) -> qdetect::HermitianMatrix {
    let g = random_matrix(r, n, n);
    qdetect::HermitianMatrix::symmetrized(g.add(&g.adjoint()))
}

/// Cyclic group of order `m` acting on dimension `n <= m`: conjugated
/// diagonal phase matrices `Q diag(w^(j*0), ..., w^(j*(n-1))) Q*` for
/// `j = 0..m`. The distinct eigenphases make generic orbits span the
/// whole space. Elements are built directly (not by powering), so
/// closure is exact to rounding.
pub fn cyclic_phase_group(r: &mut ChaCha8Rng, n: usize, m: usize) -> UnitaryGroup {
    assert!(n <= m, "need n <= m for distinct eigenphases");
    let q = random_unitary(r, n);
    let qs = q.adjoint();
    let w = 2.0 * std::f64::consts::PI / m as f64;
    let elements = (0..m)
        .map(|j| {
            let mut d = ComplexMatrix::zeros(n, n);
            for i in 0..n {
                d.set(i, i, Complex64::from_polar(1.0, w * (j * i) as f64));
            }
            q.mul(&d).mul(&qs)
        })
        .collect();
    build_group(elements).expect("cyclic phase set is a group by construction")
}

fn normalize_columns_frobenius(m: &ComplexMatrix) -> ComplexMatrix {
    m.scale_re(1.0 / m.frobenius_norm())
}

/// Random pure GU ensemble. A Gaussian generator has nonzero components
/// in the group's eigenbasis almost surely; span-deficient draws are
/// rejected by the ensemble constructor and retried.
pub fn random_gu_pure(r: &mut ChaCha8Rng, n: usize, m: usize) -> (GuSpec, Ensemble) {
    loop {
        let group = cyclic_phase_group(r, n, m);
        let phi = normalize_columns_frobenius(&random_matrix(r, n, 1));
        let spec = GuSpec::new(group, phi).unwrap();
        if let Ok(e) = qdetect::generate_gu(&spec) {
            return (spec, e);
        }
    }
}

pub fn random_gu_mixed(
    r: &mut ChaCha8Rng,
    n: usize,
    m: usize,
    rank: usize,
) -> (GuSpec, Ensemble) {
    loop {
        let group = cyclic_phase_group(r, n, m);
        let phi = normalize_columns_frobenius(&random_matrix(r, n, rank));
        let spec = GuSpec::new(group, phi).unwrap();
        if let Ok(e) = qdetect::generate_gu(&spec) {
            return (spec, e);
        }
    }
}

pub fn random_cgu_mixed(
    r: &mut ChaCha8Rng,
    n: usize,
    l: usize,
    gens: usize,
    rank: usize,
) -> (CguSpec, Ensemble) {
    loop {
        let group = cyclic_phase_group(r, n, l);
        let factors = (0..gens)
            .map(|_| normalize_columns_frobenius(&random_matrix(r, n, rank)))
            .collect();
        let spec = CguSpec::new(group, factors).unwrap();
        if let Ok(e) = qdetect::generate_cgu(&spec) {
            return (spec, e);
        }
    }
}

pub fn pure_ensemble(vectors: &[Vec<f64>], priors: Vec<f64>) -> Ensemble {
    let states: Vec<DensityOperator> = vectors
        .iter()
        .map(|v| DensityOperator::pure(&ComplexMatrix::column_from_reals(v)).unwrap())
        .collect();
    let factors = vectors
        .iter()
        .map(|v| ComplexMatrix::column_from_reals(v))
        .collect();
    Ensemble::with_factors(states, priors, factors).unwrap()
}

/// Independent oracle for two real pure states in two dimensions:
/// exhaustively sweep projective measurements (w(theta), w(theta+pi/2))
/// and return the best P_d found. For binary discrimination a projective
/// measurement in the span is optimal, so this brackets the true optimum
/// to the sweep resolution.
pub fn helstrom_sweep(phi1: &[f64; 2], phi2: &[f64; 2], p1: f64, p2: f64) -> f64 {
    let step = 1e-5f64;
    let mut best = 0.0f64;
    let mut theta = 0.0f64;
    while theta < std::f64::consts::PI {
        let (s, c) = theta.sin_cos();
        let a = c * phi1[0] + s * phi1[1];
        let b = -s * phi2[0] + c * phi2[1];
        let pd = p1 * a * a + p2 * b * b;
        if pd > best {
            best = pd;
        }
        theta += step;
    }
    best
}
