//! Extremal singular values of banded (or dense) complex matrices.
//!
//! The Gram matrix `G = M^H M` inherits a band of half-width
//! `lower + upper`. It is reduced to real symmetric tridiagonal form by
//! band-preserving Givens rotations with bulge chasing, and the extreme
//! eigenvalue is located by Sturm-count bisection. For the smallest value the
//! bisection estimate is then used as the shift of an inverse iteration on
//! `G - shift I`, and the singular value is read off as `|M x|` for the
//! converged unit vector `x`. Reading it from `M` rather than from `G` keeps
//! absolute accuracy near `eps |M|` even when `sigma_min` is far below
//! `sqrt(eps) |M|`.

use super::matrix::ComplexMatrix;
use crate::{Error, Result, C64};

/// Which end of the singular spectrum to compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extremal {
    Smallest,
    Largest,
}

/// Tolerance and iteration budget for the kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelConfig {
    pub tol: f64,
    pub max_iterations: usize,
}

impl Default for KernelConfig {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iterations: 10_000,
        }
    }
}

/// Extremal singular value of `m` with absolute error at most
/// `tol * max(1, sigma_max)`.
///
/// "Smallest" means `inf_{|x| = 1} |M x|`, which is zero for wide matrices.
pub fn extremal_singular_value(m: &ComplexMatrix, which: Extremal, tol: f64) -> Result<f64> {
    extremal_singular_value_with(
        m,
        which,
        &KernelConfig {
            tol,
            ..KernelConfig::default()
        },
    )
}

pub fn extremal_singular_value_with(
    m: &ComplexMatrix,
    which: Extremal,
    config: &KernelConfig,
) -> Result<f64> {
    Ok(extremal(m, which, config)?.sigma)
}

/// Extremal eigenvalue of `M^H M`, i.e. the squared extremal singular value.
///
/// When the Gram matrix is diagonal the value is the exact column energy, so
/// orthogonal-column matrices report `|c|^2` with no rounding from a square root.
pub fn extremal_gram_eigenvalue(
    m: &ComplexMatrix,
    which: Extremal,
    config: &KernelConfig,
) -> Result<f64> {
    Ok(extremal(m, which, config)?.gram)
}

struct ExtremalValue {
    sigma: f64,
    gram: f64,
}

fn extremal(m: &ComplexMatrix, which: Extremal, config: &KernelConfig) -> Result<ExtremalValue> {
    if !(config.tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tol must be positive, got {}",
            config.tol
        )));
    }
    let b = m.gram_bandwidth();
    let gram = HermitianBand::gram(m, b);

    if b == 0 {
        let diag = (0..gram.n).map(|i| gram.get(i, i).re);
        let value = match which {
            Extremal::Smallest => diag.fold(f64::INFINITY, f64::min),
            Extremal::Largest => diag.fold(0.0, f64::max),
        };
        return Ok(ExtremalValue {
            sigma: value.sqrt(),
            gram: value,
        });
    }

    let (d, e) = gram.clone().tridiagonalize(b);
    let e2: Vec<f64> = e.iter().map(|x| x * x).collect();
    let n = d.len();
    let lambda_max = bisect_eigenvalue(&d, &e, &e2, n - 1).max(0.0);
    match which {
        Extremal::Largest => Ok(ExtremalValue {
            sigma: lambda_max.sqrt(),
            gram: lambda_max,
        }),
        Extremal::Smallest => {
            let shift = bisect_eigenvalue(&d, &e, &e2, 0);
            let sigma = refine_smallest(m, &gram, shift, lambda_max.sqrt(), config)?;
            Ok(ExtremalValue {
                sigma,
                gram: sigma * sigma,
            })
        }
    }
}

/// Shifted inverse iteration on `G - shift I`; returns `|M x|`.
fn refine_smallest(
    m: &ComplexMatrix,
    gram: &HermitianBand,
    shift: f64,
    sigma_max: f64,
    config: &KernelConfig,
) -> Result<f64> {
    let n = gram.n;
    let lu = BandLu::factor(gram, shift);
    let mut x: Vec<C64> = (0..n)
        .map(|j| {
            C64::new(
                1.0 + ((j * 7919) % 101) as f64 / 101.0,
                ((j * 104_729) % 97) as f64 / 97.0 - 0.5,
            )
        })
        .collect();
    normalize(&mut x);

    let scale = sigma_max.max(1.0);
    let mut prev = f64::INFINITY;
    let mut sigma = f64::INFINITY;
    for iteration in 1..=config.max_iterations {
        x = lu.solve(x);
        if !normalize(&mut x) {
            // Solve overflowed to a non-finite vector; restart from a basis vector.
            x = vec![C64::new(0.0, 0.0); n];
            x[iteration % n] = C64::new(1.0, 0.0);
        }
        sigma = norm(&m.mul_vec(&x));
        if iteration >= 2 && (prev - sigma).abs() <= 0.01 * config.tol * scale {
            return Ok(sigma);
        }
        prev = sigma;
    }
    let gx = gram.mul_vec(&x);
    let residual = norm(
        &gx.iter()
            .zip(&x)
            .map(|(g, xi)| g - xi * (sigma * sigma))
            .collect::<Vec<_>>(),
    );
    Err(Error::NonConvergence {
        iterations: config.max_iterations,
        best: sigma,
        residual,
    })
}

fn norm(v: &[C64]) -> f64 {
    // Scaled accumulation so that tiny residual vectors do not underflow.
    let big = v.iter().map(|z| z.re.abs().max(z.im.abs())).fold(0.0, f64::max);
    if big == 0.0 || !big.is_finite() {
        return big;
    }
    let s: f64 = v.iter().map(|z| (z / big).norm_sqr()).sum();
    big * s.sqrt()
}

fn normalize(v: &mut [C64]) -> bool {
    let nrm = norm(v);
    if !(nrm.is_finite() && nrm > 0.0) {
        return false;
    }
    for z in v.iter_mut() {
        *z /= nrm;
    }
    true
}

/// `k`-th smallest eigenvalue (0-based) of the symmetric tridiagonal matrix
/// with diagonal `d` and off-diagonal moduli `e`.
pub(crate) fn bisect_eigenvalue(d: &[f64], e: &[f64], e2: &[f64], k: usize) -> f64 {
    let n = d.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let r = if i > 0 { e[i - 1] } else { 0.0 } + if i + 1 < n { e[i] } else { 0.0 };
        lo = lo.min(d[i] - r);
        hi = hi.max(d[i] + r);
    }
    let max_e2 = e2.iter().copied().fold(1.0, f64::max);
    let pivmin = f64::MIN_POSITIVE * max_e2;
    let span = lo.abs().max(hi.abs());
    lo -= 2.0 * f64::EPSILON * span + pivmin;
    hi += 2.0 * f64::EPSILON * span + pivmin;
    for _ in 0..256 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= 2.0 * f64::EPSILON * (lo.abs() + hi.abs()) + pivmin {
            break;
        }
        if sturm_count(d, e2, mid, pivmin) > k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Number of eigenvalues strictly below `x`.
fn sturm_count(d: &[f64], e2: &[f64], x: f64, pivmin: f64) -> usize {
    let mut count = 0;
    let mut q = d[0] - x;
    if q.abs() < pivmin {
        q = -pivmin;
    }
    if q < 0.0 {
        count += 1;
    }
    for i in 1..d.len() {
        q = d[i] - x - e2[i - 1] / q;
        if q.abs() < pivmin {
            q = -pivmin;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Lower triangle of a Hermitian band matrix, with one spare diagonal for the
/// bulge created while chasing.
#[derive(Debug, Clone)]
struct HermitianBand {
    n: usize,
    width: usize,
    data: Vec<C64>,
}

impl HermitianBand {
    fn gram(m: &ComplexMatrix, b: usize) -> Self {
        let n = m.cols();
        let width = b + 1;
        let mut g = Self {
            n,
            width,
            data: vec![C64::new(0.0, 0.0); n * (width + 1)],
        };
        for k in 0..n {
            let rk = m.col_range(k);
            for j in k..(k + b + 1).min(n) {
                let rj = m.col_range(j);
                let lo = rk.start.max(rj.start);
                let hi = rk.end.min(rj.end);
                let mut acc = C64::new(0.0, 0.0);
                for i in lo..hi {
                    acc += m.get(i, j).conj() * m.get(i, k);
                }
                g.set(j, k, acc);
            }
        }
        for i in 0..n {
            let v = g.get(i, i);
            g.set(i, i, C64::new(v.re, 0.0));
        }
        g
    }

    /// Lower-triangle entry `(i, j)`, `i >= j`.
    fn get(&self, i: usize, j: usize) -> C64 {
        debug_assert!(i >= j);
        if i - j > self.width {
            C64::new(0.0, 0.0)
        } else {
            self.data[j * (self.width + 1) + (i - j)]
        }
    }

    fn set(&mut self, i: usize, j: usize, v: C64) {
        debug_assert!(i >= j);
        if i - j > self.width {
            debug_assert!(v.norm() <= 1e-300, "bulge escaped storage at ({i}, {j})");
            return;
        }
        self.data[j * (self.width + 1) + (i - j)] = v;
    }

    /// Full Hermitian entry.
    fn entry(&self, i: usize, j: usize) -> C64 {
        if i >= j {
            self.get(i, j)
        } else {
            self.get(j, i).conj()
        }
    }

    fn mul_vec(&self, x: &[C64]) -> Vec<C64> {
        let mut y = vec![C64::new(0.0, 0.0); self.n];
        for (i, yi) in y.iter_mut().enumerate() {
            let lo = i.saturating_sub(self.width);
            let hi = (i + self.width + 1).min(self.n);
            for j in lo..hi {
                *yi += self.entry(i, j) * x[j];
            }
        }
        y
    }

    /// Similarity `G <- R G R^H` with `R = [[c, s], [-conj(s), c]]` acting on
    /// rows/columns `p, p + 1`.
    fn rotate(&mut self, p: usize, c: f64, s: C64) {
        let q = p + 1;
        let sc = s.conj();
        for k in q.saturating_sub(self.width)..p {
            let a = self.get(p, k);
            let b = self.get(q, k);
            self.set(p, k, a * c + s * b);
            self.set(q, k, -sc * a + b * c);
        }

        let a = self.get(p, p).re;
        let d = self.get(q, q).re;
        let b = self.get(q, p);
        let r00 = s * b + c * a;
        let r01 = b.conj() * c + s * d;
        let r10 = -sc * a + b * c;
        let r11 = -sc * b.conj() + c * d;
        let b00 = r00 * c + r01 * sc;
        let b10 = r10 * c + r11 * sc;
        let b11 = -r10 * s + r11 * c;
        self.set(p, p, C64::new(b00.re, 0.0));
        self.set(q, q, C64::new(b11.re, 0.0));
        self.set(q, p, b10);

        let kmax = (q + self.width).min(self.n - 1);
        for k in q + 1..=kmax {
            let a = self.get(k, p);
            let b = self.get(k, q);
            self.set(k, p, a * c + sc * b);
            self.set(k, q, -s * a + b * c);
        }
    }

    /// Reduce bandwidth `b` to tridiagonal; returns the real diagonal and the
    /// moduli of the subdiagonal.
    fn tridiagonalize(mut self, b: usize) -> (Vec<f64>, Vec<f64>) {
        let n = self.n;
        for kb in (2..=b).rev() {
            for j in 0..n {
                if j + kb >= n {
                    break;
                }
                let (mut row, mut col) = (j + kb, j);
                loop {
                    let x2 = self.get(row, col);
                    if x2 == C64::new(0.0, 0.0) {
                        break;
                    }
                    let x1 = self.get(row - 1, col);
                    let (c, s) = givens(x1, x2);
                    self.rotate(row - 1, c, s);
                    self.set(row, col, C64::new(0.0, 0.0));
                    let next = row + kb;
                    if next >= n {
                        break;
                    }
                    col = row - 1;
                    row = next;
                }
            }
        }
        let d = (0..n).map(|i| self.get(i, i).re).collect();
        let e = (0..n.saturating_sub(1)).map(|i| self.get(i + 1, i).norm()).collect();
        (d, e)
    }
}

/// Rotation `[[c, s], [-conj(s), c]]` mapping `(x1, x2)` to `(r, 0)`.
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

/// LU with partial pivoting of the band matrix `G - shift I` (half-width `b`;
/// `U` gets upper half-width `2b`).
struct BandLu {
    n: usize,
    b: usize,
    stride: usize,
    data: Vec<C64>,
    pivots: Vec<usize>,
}

impl BandLu {
    fn factor(g: &HermitianBand, shift: f64) -> Self {
        let n = g.n;
        let b = g.width - 1;
        let stride = 3 * b + 1;
        let mut lu = Self {
            n,
            b,
            stride,
            data: vec![C64::new(0.0, 0.0); n * stride],
            pivots: vec![0; n],
        };
        let mut gmax: f64 = 0.0;
        for i in 0..n {
            for j in i.saturating_sub(b)..(i + b + 1).min(n) {
                let mut v = g.entry(i, j);
                if i == j {
                    v -= shift;
                }
                gmax = gmax.max(v.norm());
                *lu.at(i, j) = v;
            }
        }
        let tiny = f64::EPSILON * gmax.max(f64::MIN_POSITIVE);

        for j in 0..n {
            let last = (j + b).min(n - 1);
            let mut p = j;
            let mut best = lu.get(j, j).norm();
            for i in j + 1..=last {
                let v = lu.get(i, j).norm();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            lu.pivots[j] = p;
            let right = (j + 2 * b).min(n - 1);
            if p != j {
                for col in j..=right {
                    let a = lu.get(j, col);
                    let c = lu.get(p, col);
                    *lu.at(j, col) = c;
                    *lu.at(p, col) = a;
                }
            }
            if lu.get(j, j).norm() < tiny {
                *lu.at(j, j) = C64::new(tiny, 0.0);
            }
            let pivot = lu.get(j, j);
            for i in j + 1..=last {
                let l = lu.get(i, j) / pivot;
                *lu.at(i, j) = l;
                if l == C64::new(0.0, 0.0) {
                    continue;
                }
                for col in j + 1..=right {
                    let u = lu.get(j, col);
                    *lu.at(i, col) -= l * u;
                }
            }
        }
        lu
    }

    fn idx(&self, i: usize, col: usize) -> usize {
        debug_assert!(col + self.b >= i && col <= i + 2 * self.b);
        i * self.stride + (col + self.b - i)
    }

    fn get(&self, i: usize, col: usize) -> C64 {
        self.data[self.idx(i, col)]
    }

    fn at(&mut self, i: usize, col: usize) -> &mut C64 {
        let k = self.idx(i, col);
        &mut self.data[k]
    }

    fn solve(&self, mut y: Vec<C64>) -> Vec<C64> {
        let n = self.n;
        for j in 0..n {
            let p = self.pivots[j];
            if p != j {
                y.swap(j, p);
            }
            let yj = y[j];
            for i in j + 1..=(j + self.b).min(n - 1) {
                y[i] -= self.get(i, j) * yj;
            }
        }
        for i in (0..n).rev() {
            let mut acc = y[i];
            for col in i + 1..=(i + 2 * self.b).min(n - 1) {
                acc -= self.get(i, col) * y[col];
            }
            y[i] = acc / self.get(i, i);
        }
        y
    }
}
