//! Polynomial roots as eigenvalues of the balanced companion matrix.

use crate::{Error, Result, C64};

/// Root finder settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootConfig {
    /// Leading coefficients below this fraction of the largest coefficient
    /// are treated as underflow.
    pub underflow: f64,
    /// QR sweeps allowed per eigenvalue before giving up.
    pub max_sweeps_per_root: usize,
}

impl Default for RootConfig {
    fn default() -> Self {
        Self {
            underflow: 1e-14,
            max_sweeps_per_root: 60,
        }
    }
}

/// All roots (with multiplicity) of `sum_j coeffs[j] z^j`.
pub fn polynomial_roots(coeffs: &[C64]) -> Result<Vec<C64>> {
    polynomial_roots_with(coeffs, &RootConfig::default())
}

pub fn polynomial_roots_with(coeffs: &[C64], config: &RootConfig) -> Result<Vec<C64>> {
    if coeffs.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
        return Err(Error::InvalidPolynomial("non-finite coefficient".into()));
    }
    if coeffs.len() < 2 {
        return Err(Error::ConstantPolynomial);
    }
    let degree = coeffs.len() - 1;
    let lead = coeffs[degree];
    let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if scale == 0.0 || lead.norm() <= config.underflow * scale {
        return Err(Error::LeadingCoefficientUnderflow {
            magnitude: if scale == 0.0 { 0.0 } else { lead.norm() / scale },
        });
    }
    if degree == 1 {
        return Ok(vec![-coeffs[0] / lead]);
    }

    // Companion in upper Hessenberg form: first row -a_{n-1}/a_n ... -a_0/a_n.
    let mut h = vec![vec![C64::new(0.0, 0.0); degree]; degree];
    for j in 0..degree {
        h[0][j] = -coeffs[degree - 1 - j] / lead;
    }
    for i in 1..degree {
        h[i][i - 1] = C64::new(1.0, 0.0);
    }
    balance(&mut h);
    let mut roots = hessenberg_eigenvalues(h, config.max_sweeps_per_root)?;
    for z in roots.iter_mut() {
        *z = newton_polish(coeffs, *z);
    }
    Ok(roots)
}

/// Value and derivative by Horner.
fn horner_with_derivative(coeffs: &[C64], z: C64) -> (C64, C64) {
    let mut p = C64::new(0.0, 0.0);
    let mut dp = C64::new(0.0, 0.0);
    for &a in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

/// One Newton step, kept only if it lowers `|p|`.
fn newton_polish(coeffs: &[C64], z: C64) -> C64 {
    let (p, dp) = horner_with_derivative(coeffs, z);
    if p == C64::new(0.0, 0.0) || dp == C64::new(0.0, 0.0) {
        return z;
    }
    let candidate = z - p / dp;
    let (pc, _) = horner_with_derivative(coeffs, candidate);
    if candidate.re.is_finite() && candidate.im.is_finite() && pc.norm() < p.norm() {
        candidate
    } else {
        z
    }
}

/// Parlett-Reinsch balancing with radix-2 scale factors.
fn balance(a: &mut [Vec<C64>]) {
    let n = a.len();
    let radix = 2.0_f64;
    let sq = radix * radix;
    let l1 = |z: C64| z.re.abs() + z.im.abs();
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += l1(a[j][i]);
                    r += l1(a[i][j]);
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / radix;
            while c < g {
                f *= radix;
                c *= sq;
            }
            g = r * radix;
            while c > g {
                f /= radix;
                c /= sq;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                let g = 1.0 / f;
                for j in 0..n {
                    a[i][j] *= g;
                }
                for row in a.iter_mut() {
                    row[i] *= f;
                }
            }
        }
    }
}

/// Eigenvalues of an upper Hessenberg matrix by single-shift complex QR with
/// Wilkinson shifts.
fn hessenberg_eigenvalues(mut h: Vec<Vec<C64>>, max_sweeps: usize) -> Result<Vec<C64>> {
    let n = h.len();
    let mut eig = vec![C64::new(0.0, 0.0); n];
    let mut hi = n - 1;
    let mut sweeps = 0usize;
    let mut total = 0usize;
    let l1 = |z: C64| z.re.abs() + z.im.abs();

    loop {
        if hi == 0 {
            eig[0] = h[0][0];
            break;
        }
        let mut lo = hi;
        while lo > 0 {
            let scale = l1(h[lo - 1][lo - 1]) + l1(h[lo][lo]);
            let tiny = if scale == 0.0 { f64::MIN_POSITIVE } else { f64::EPSILON * scale };
            if l1(h[lo][lo - 1]) <= tiny {
                h[lo][lo - 1] = C64::new(0.0, 0.0);
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            eig[hi] = h[hi][hi];
            hi -= 1;
            sweeps = 0;
            continue;
        }

        sweeps += 1;
        total += 1;
        if sweeps > max_sweeps {
            return Err(Error::NonConvergence {
                iterations: total,
                best: h[hi][hi].norm(),
                residual: h[hi][hi - 1].norm(),
            });
        }

        let mu = if sweeps % 11 == 0 {
            // Exceptional shift to break cycles.
            h[hi][hi] + C64::new(0.75 * l1(h[hi][hi - 1]), 0.4 * l1(h[hi - 1][hi.saturating_sub(2).max(lo)]))
        } else {
            wilkinson_shift(h[hi - 1][hi - 1], h[hi - 1][hi], h[hi][hi - 1], h[hi][hi])
        };

        for k in lo..=hi {
            h[k][k] -= mu;
        }
        let mut rotations = Vec::with_capacity(hi - lo);
        for k in lo..hi {
            let (c, s) = givens(h[k][k], h[k + 1][k]);
            let sc = s.conj();
            for col in k..=hi {
                let x = h[k][col];
                let y = h[k + 1][col];
                h[k][col] = x * c + s * y;
                h[k + 1][col] = -sc * x + y * c;
            }
            h[k + 1][k] = C64::new(0.0, 0.0);
            rotations.push((c, s));
        }
        for (offset, &(c, s)) in rotations.iter().enumerate() {
            let k = lo + offset;
            let sc = s.conj();
            for row in h.iter_mut().take((k + 2).min(hi + 1)).skip(lo) {
                let u = row[k];
                let v = row[k + 1];
                row[k] = u * c + v * sc;
                row[k + 1] = -u * s + v * c;
            }
        }
        for k in lo..=hi {
            h[k][k] += mu;
        }
    }
    Ok(eig)
}

fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let m1 = (a + d) * 0.5 + disc;
    let m2 = (a + d) * 0.5 - disc;
    if (m1 - d).norm() <= (m2 - d).norm() {
        m1
    } else {
        m2
    }
}

fn givens(x1: C64, x2: C64) -> (f64, C64) {
    let a1 = x1.norm();
    let a2 = x2.norm();
    if a2 == 0.0 {
        return (1.0, C64::new(0.0, 0.0));
    }
    if a1 == 0.0 {
        return (0.0, C64::new(1.0, 0.0));
    }
    let rho = a1.hypot(a2);
    (a1 / rho, (x1 / a1) * x2.conj() / rho)
}
