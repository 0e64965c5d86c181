//! Independent oracles shared by the integration tests: dense SVD and
//! companion-matrix Schur eigenvalues from nalgebra.
#![allow(dead_code)]

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use specframe::holocalc::Polynomial;
use specframe::numkernel::ComplexMatrix;
use specframe::C64;

pub fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn to_dense(m: &ComplexMatrix) -> DMatrix<C64> {
    DMatrix::from_fn(m.rows(), m.cols(), |i, j| m.get(i, j))
}

/// Singular values in ascending order.
pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    let mut s: Vec<f64> = to_dense(m).singular_values().iter().copied().collect();
    s.sort_by(|a, b| a.partial_cmp(b).unwrap());
    s
}

pub fn sigma_min(m: &ComplexMatrix) -> f64 {
    // A tall matrix has exactly `cols` singular values.
    singular_values(m)[0]
}

pub fn sigma_max(m: &ComplexMatrix) -> f64 {
    *singular_values(m).last().unwrap()
}

/// Roots by Schur decomposition of the companion matrix.
pub fn oracle_roots(coeffs: &[C64]) -> Vec<C64> {
    let n = coeffs.len() - 1;
    let lead = coeffs[n];
    let m = DMatrix::from_fn(n, n, |i, j| {
        if i == 0 {
            -coeffs[n - 1 - j] / lead
        } else if i == j + 1 {
            c(1.0)
        } else {
            c(0.0)
        }
    });
    let schur = m.schur();
    let (_, t) = schur.unpack();
    (0..n).map(|i| t[(i, i)]).collect()
}

pub fn random_complex(rng: &mut ChaCha8Rng, half_width: f64) -> C64 {
    C64::new(
        rng.gen_range(-half_width..=half_width),
        rng.gen_range(-half_width..=half_width),
    )
}

/// Random polynomial of degree `1..=max_degree` with coefficients in the box
/// `[-w, w]^2`, leading coefficient kept away from zero.
pub fn random_polynomial(rng: &mut ChaCha8Rng, max_degree: usize, w: f64) -> Polynomial {
    let d = rng.gen_range(1..=max_degree);
    let mut coeffs: Vec<C64> = (0..=d).map(|_| random_complex(rng, w)).collect();
    while coeffs[d].norm() < 0.1 * w {
        coeffs[d] = random_complex(rng, w);
    }
    Polynomial::new(coeffs).unwrap()
}

/// `lead * prod (z - r_k)` in ascending coefficients.
pub fn from_roots(lead: C64, roots: &[C64]) -> Polynomial {
    let mut coeffs = vec![lead];
    for &r in roots {
        let mut next = vec![c(0.0); coeffs.len() + 1];
        for (k, &a) in coeffs.iter().enumerate() {
            next[k + 1] += a;
            next[k] -= a * r;
        }
        coeffs = next;
    }
    Polynomial::new(coeffs).unwrap()
}
