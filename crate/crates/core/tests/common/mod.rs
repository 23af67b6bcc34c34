//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use itertools::Itertools;
use magnon_ep_lab::{ComplexMatrix4, SystemParams};
use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Frequencies in [20, 30], γ in [0, 2], θ in [0, 2π), g = 1.
pub fn random_params(rng: &mut ChaCha8Rng) -> SystemParams {
    SystemParams::unit_coupling(
        rng.gen_range(20.0..30.0),
        rng.gen_range(20.0..30.0),
        rng.gen_range(20.0..30.0),
        rng.gen_range(0.0..2.0),
        rng.gen_range(0.0..std::f64::consts::TAU),
    )
    .unwrap()
}

pub fn to_nalgebra(m: &ComplexMatrix4) -> Matrix4<Complex64> {
    Matrix4::from_fn(|i, j| m[(i, j)])
}

/// Eigenvalues from nalgebra's complex Schur decomposition.
pub fn dense_eigenvalues(m: &ComplexMatrix4) -> [Complex64; 4] {
    let ev = to_nalgebra(m).schur().eigenvalues().expect("complex Schur form is triangular");
    [ev[0], ev[1], ev[2], ev[3]]
}

/// Smallest achievable max-distance between two 4-element multisets.
pub fn paired_distance(a: &[Complex64; 4], b: &[Complex64; 4]) -> f64 {
    (0..4)
        .permutations(4)
        .map(|p| (0..4).map(|i| (a[i] - b[p[i]]).norm()).fold(0.0, f64::max))
        .fold(f64::INFINITY, f64::min)
}

fn sign(p: &[usize]) -> f64 {
    let mut s = 1.0;
    for i in 0..p.len() {
        for j in (i + 1)..p.len() {
            if p[i] > p[j] {
                s = -s;
            }
        }
    }
    s
}

/// Leibniz determinant of the principal submatrix on `idx`.
fn principal_minor(m: &ComplexMatrix4, idx: &[usize]) -> Complex64 {
    let k = idx.len();
    (0..k)
        .permutations(k)
        .map(|p| {
            let prod: Complex64 = (0..k).map(|r| m[(idx[r], idx[p[r]])]).product();
            prod * sign(&p)
        })
        .sum()
}

/// Coefficients of det(ωI − M) from sums of principal minors:
/// c_{4−k} = (−1)^k E_k.
pub fn charpoly_by_minors(m: &ComplexMatrix4) -> [Complex64; 5] {
    let mut c = [Complex64::new(0.0, 0.0); 5];
    c[4] = Complex64::new(1.0, 0.0);
    for k in 1..=4 {
        let e: Complex64 = (0..4).combinations(k).map(|idx| principal_minor(m, &idx)).sum();
        c[4 - k] = if k % 2 == 0 { e } else { -e };
    }
    c
}

pub fn leibniz_det(m: &ComplexMatrix4) -> Complex64 {
    principal_minor(m, &[0, 1, 2, 3])
}

/// S21 from the frequency-domain Langevin equations, solved as a dense
/// linear system. Both cavities leak into baths a and b at rate β; the drive
/// enters through bath a and the signal leaves through bath b:
///
/// (ω − H + iβ J) x = −i√β a_in u,   b_out = √β uᵀx,
///
/// with J the all-ones block on the cavities and u = (1, 1, 0, 0).
pub fn s21_linear_system(p: &SystemParams, beta: f64, omega: f64) -> Complex64 {
    let h = magnon_ep_lab::hamiltonian::build_hamiltonian(&p.normalized());
    let w = omega / p.g();
    let i = Complex64::i();
    let mut m = to_nalgebra(&h).map(|z| -z);
    for k in 0..4 {
        m[(k, k)] += w;
    }
    for r in 0..2 {
        for c in 0..2 {
            m[(r, c)] += i * beta;
        }
    }
    let u = Vector4::new(1.0, 1.0, 0.0, 0.0).map(|v| Complex64::new(v, 0.0));
    let rhs = u * (-i * beta.sqrt());
    let x = m.lu().solve(&rhs).expect("off-pole system is regular");
    u.dot(&x) * beta.sqrt()
}

pub fn local_maxima(xs: &[f64], ys: &[f64]) -> Vec<(f64, f64)> {
    (1..ys.len() - 1)
        .filter(|&i| ys[i] > ys[i - 1] && ys[i] >= ys[i + 1])
        .map(|i| (xs[i], ys[i]))
        .collect()
}
