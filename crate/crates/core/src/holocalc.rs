//! Holomorphic functions (polynomials and tail-bounded power series) and the
//! functional calculus `f(T)` on the supported operator models.
//!
//! `f(T)` is always built structurally: band algebra for shifts and Toeplitz
//! operators, pointwise maps for diagonals. Power series are first cut to a
//! polynomial whose discarded tail is certified by a user-declared majorant.

use serde::{Deserialize, Serialize};

use crate::operators::OperatorModel;
use crate::spectral::image_region;
use crate::{Error, Result, C64};

/// Highest degree a power series is ever truncated to.
pub const MAX_SERIES_DEGREE: usize = 512;

/// Truncation accuracy used when a series is applied to an operator.
pub const DEFAULT_SERIES_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polynomial {
    coeffs: Vec<C64>,
}

impl Polynomial {
    /// Coefficients in ascending order. The leading coefficient must be
    /// nonzero; the zero polynomial is `[0]` (or [`Polynomial::zero`]).
    pub fn new(coeffs: Vec<C64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidPolynomial("no coefficients".into()));
        }
        if coeffs.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::InvalidPolynomial("non-finite coefficient".into()));
        }
        if coeffs.len() > 1 && coeffs[coeffs.len() - 1] == C64::new(0.0, 0.0) {
            return Err(Error::InvalidPolynomial(
                "leading coefficient is zero".into(),
            ));
        }
        Ok(Self { coeffs })
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn zero() -> Self {
        Self {
            coeffs: vec![C64::new(0.0, 0.0)],
        }
    }

    pub fn constant(c: C64) -> Self {
        Self { coeffs: vec![c] }
    }

    /// `f(z) = z`.
    pub fn identity() -> Self {
        Self {
            coeffs: vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
        }
    }

    /// Strips exactly-zero leading coefficients produced by arithmetic.
    pub(crate) fn normalized(mut coeffs: Vec<C64>) -> Self {
        while coeffs.len() > 1 && coeffs[coeffs.len() - 1] == C64::new(0.0, 0.0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(C64::new(0.0, 0.0));
        }
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == C64::new(0.0, 0.0)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() == 1
    }

    pub fn is_identity(&self) -> bool {
        self.coeffs == [C64::new(0.0, 0.0), C64::new(1.0, 0.0)]
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.coeffs
            .iter()
            .rev()
            .fold(C64::new(0.0, 0.0), |acc, &a| acc * z + a)
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let mut out = vec![C64::new(0.0, 0.0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::normalized(out)
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(other.coeffs.len());
        let zero = C64::new(0.0, 0.0);
        let out = (0..n)
            .map(|k| {
                self.coeffs.get(k).copied().unwrap_or(zero)
                    + other.coeffs.get(k).copied().unwrap_or(zero)
            })
            .collect();
        Self::normalized(out)
    }

    /// `self(inner(z))`, by Horner in the polynomial ring.
    pub fn compose(&self, inner: &Polynomial) -> Polynomial {
        let mut acc = Polynomial::constant(self.coeffs[self.coeffs.len() - 1]);
        for &a in self.coeffs.iter().rev().skip(1) {
            acc = acc.mul(inner).add(&Polynomial::constant(a));
        }
        acc
    }

    /// `z -> conj(f(conj z))`, i.e. conjugated coefficients.
    pub fn conj_coeffs(&self) -> Polynomial {
        Self {
            coeffs: self.coeffs.iter().map(|c| c.conj()).collect(),
        }
    }

    /// `f(z) - w`.
    pub fn minus_constant(&self, w: C64) -> Polynomial {
        let mut coeffs = self.coeffs.clone();
        coeffs[0] -= w;
        Self::normalized(coeffs)
    }

    /// `w -> f(center + w)`.
    pub fn recentered(&self, center: C64) -> Polynomial {
        if center == C64::new(0.0, 0.0) {
            return self.clone();
        }
        self.compose(&Polynomial {
            coeffs: vec![center, C64::new(1.0, 0.0)],
        })
    }

    /// `sum |a_j| r^j`, a bound for `|f|` on the closed disk of radius `r`.
    pub fn bound_on_disk(&self, r: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, a| acc * r + a.norm())
    }

    /// `sum j |a_j| r^(j-1)`, a Lipschitz constant for `f` on the closed disk of radius `r`.
    pub fn lipschitz_on_disk(&self, r: f64) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(0.0, |acc, (j, a)| acc * r + j as f64 * a.norm())
    }
}

/// Coefficient generating rule of a power series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SeriesRule {
    /// `a_j = rate^j / j!`, i.e. `exp(rate z)`.
    Exp { rate: C64 },
    /// `a_j = ratio^j`, i.e. `1 / (1 - ratio z)`.
    Geometric { ratio: C64 },
}

impl SeriesRule {
    fn natural_radius(&self) -> f64 {
        match self {
            SeriesRule::Exp { .. } => f64::INFINITY,
            SeriesRule::Geometric { ratio } => 1.0 / ratio.norm(),
        }
    }
}

/// Majorant `M_j >= |a_j|` declared alongside a series; it yields the tail
/// bound `tau_D(r) >= sum_{j > D} |a_j| r^j` in closed form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum TailBound {
    /// `M_j = rate^j / j!`, so `tau_D(r) = (rate r)^(D+1) / (D+1)! * e^(rate r)`.
    Factorial { rate: f64 },
    /// `M_j = ratio^j`, so `tau_D(r) = (ratio r)^(D+1) / (1 - ratio r)`.
    Geometric { ratio: f64 },
}

impl TailBound {
    fn majorant(&self, j: usize) -> f64 {
        match *self {
            TailBound::Factorial { rate } => {
                (1..=j).fold(1.0, |acc, k| acc * rate / k as f64)
            }
            TailBound::Geometric { ratio } => ratio.powi(j as i32),
        }
    }

    /// `tau_D(r)`.
    pub fn tail(&self, degree: usize, r: f64) -> f64 {
        match *self {
            TailBound::Factorial { rate } => {
                let x = rate * r;
                let head = (1..=degree + 1).fold(1.0, |acc, k| acc * x / k as f64);
                head * x.exp()
            }
            TailBound::Geometric { ratio } => {
                let x = ratio * r;
                if x >= 1.0 {
                    f64::INFINITY
                } else {
                    x.powi(degree as i32 + 1) / (1.0 - x)
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerSeries {
    rule: SeriesRule,
    radius: f64,
    tail: TailBound,
}

impl PowerSeries {
    /// `radius` is the radius of the open disk on which the series is used; it
    /// may not exceed the rule's own radius of convergence, and the declared
    /// majorant must dominate the coefficients.
    pub fn new(rule: SeriesRule, radius: f64, tail: TailBound) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::InvalidSeries(format!("radius must be positive, got {radius}")));
        }
        let natural = rule.natural_radius();
        if radius > natural {
            return Err(Error::InvalidSeries(format!(
                "radius {radius} exceeds the radius of convergence {natural}"
            )));
        }
        match tail {
            TailBound::Factorial { rate } if !(rate >= 0.0 && rate.is_finite()) => {
                return Err(Error::InvalidSeries(format!("factorial tail rate {rate} invalid")));
            }
            TailBound::Geometric { ratio } if !(ratio > 0.0 && ratio.is_finite()) => {
                return Err(Error::InvalidSeries(format!("geometric tail ratio {ratio} invalid")));
            }
            TailBound::Geometric { ratio } if radius * ratio > 1.0 => {
                return Err(Error::InvalidSeries(format!(
                    "geometric tail ratio {ratio} diverges inside radius {radius}"
                )));
            }
            _ => {}
        }
        let series = Self { rule, radius, tail };
        let mut a = C64::new(1.0, 0.0);
        for j in 0..=MAX_SERIES_DEGREE + 1 {
            if j > 0 {
                a = series.next_coefficient(a, j);
            }
            let m = series.tail.majorant(j);
            if a.norm() > m * (1.0 + 1e-12) + f64::MIN_POSITIVE {
                return Err(Error::InvalidSeries(format!(
                    "tail bound does not dominate coefficient {j}: |a_j| = {:e} > {:e}",
                    a.norm(),
                    m
                )));
            }
        }
        Ok(series)
    }

    pub fn rule(&self) -> &SeriesRule {
        &self.rule
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn tail(&self) -> TailBound {
        self.tail
    }

    fn next_coefficient(&self, prev: C64, j: usize) -> C64 {
        match self.rule {
            SeriesRule::Exp { rate } => prev * rate / j as f64,
            SeriesRule::Geometric { ratio } => prev * ratio,
        }
    }

    /// `a_0 ..= a_degree`.
    pub fn coefficients(&self, degree: usize) -> Vec<C64> {
        let mut out = Vec::with_capacity(degree + 1);
        let mut a = C64::new(1.0, 0.0);
        out.push(a);
        for j in 1..=degree {
            a = self.next_coefficient(a, j);
            out.push(a);
        }
        out
    }

    /// Smallest degree whose declared tail at `r` is at most `eps`.
    fn degree_for(&self, r: f64, eps: f64) -> std::result::Result<usize, f64> {
        for d in 0..=MAX_SERIES_DEGREE {
            if self.tail.tail(d, r) <= eps {
                return Ok(d);
            }
        }
        Err(self.tail.tail(MAX_SERIES_DEGREE, r))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum HoloFunction {
    Polynomial(Polynomial),
    PowerSeries(PowerSeries),
}

impl From<Polynomial> for HoloFunction {
    fn from(p: Polynomial) -> Self {
        HoloFunction::Polynomial(p)
    }
}

/// A value together with a bound on the error from discarded series terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub value: C64,
    pub error_bound: f64,
}

/// Record of a series truncation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesCertificate {
    pub radius: f64,
    pub eps: f64,
    pub degree: usize,
    pub tail_bound: f64,
}

pub fn evaluate(f: &HoloFunction, z: C64) -> Result<Evaluation> {
    match f {
        HoloFunction::Polynomial(p) => Ok(Evaluation {
            value: p.eval(z),
            error_bound: 0.0,
        }),
        HoloFunction::PowerSeries(s) => {
            let r = z.norm();
            if r >= s.radius {
                return Err(Error::Domain {
                    modulus: r,
                    radius: s.radius,
                });
            }
            let degree = s.degree_for(r, f64::EPSILON * 1e-3).unwrap_or(MAX_SERIES_DEGREE);
            let p = Polynomial::normalized(s.coefficients(degree));
            Ok(Evaluation {
                value: p.eval(z),
                error_bound: s.tail.tail(degree, r),
            })
        }
    }
}

/// Cut `f` to a polynomial whose tail on `|z| <= r` is at most `eps`.
pub fn truncate_series(f: &HoloFunction, r: f64, eps: f64) -> Result<(Polynomial, SeriesCertificate)> {
    match f {
        HoloFunction::Polynomial(p) => Ok((
            p.clone(),
            SeriesCertificate {
                radius: r,
                eps,
                degree: p.degree(),
                tail_bound: 0.0,
            },
        )),
        HoloFunction::PowerSeries(s) => {
            if !(r > 0.0 && r < s.radius) {
                return Err(Error::Domain {
                    modulus: r,
                    radius: s.radius,
                });
            }
            if !(eps > 0.0) {
                return Err(Error::InvalidArgument(format!("eps must be positive, got {eps}")));
            }
            let degree = s.degree_for(r, eps).map_err(|achieved| Error::SeriesTailUnreachable {
                achieved,
                eps,
                max_degree: MAX_SERIES_DEGREE,
            })?;
            Ok((
                Polynomial::normalized(s.coefficients(degree)),
                SeriesCertificate {
                    radius: r,
                    eps,
                    degree,
                    tail_bound: s.tail.tail(degree, r),
                },
            ))
        }
    }
}

/// Polynomial standing in for `f` on an operator with the given norm bound,
/// plus the truncation certificate when `f` is a series.
pub(crate) fn polynomial_for_operator(
    f: &HoloFunction,
    op: &OperatorModel,
) -> Result<(Polynomial, Option<SeriesCertificate>)> {
    match f {
        HoloFunction::Polynomial(p) => Ok((p.clone(), None)),
        HoloFunction::PowerSeries(s) => {
            let rho = op.spectrum().max_modulus();
            if rho >= s.radius {
                return Err(Error::Domain {
                    modulus: rho,
                    radius: s.radius,
                });
            }
            // The truncation error is measured in operator norm, so the cut is
            // made on the disk of radius |T|.
            let r = op.norm_bound().max(f64::MIN_POSITIVE);
            let (p, cert) = truncate_series(f, r, DEFAULT_SERIES_EPS)?;
            Ok((p, Some(cert)))
        }
    }
}

/// `f(T)` as a new model. Its spectrum is the image of the spectrum of `T`
/// and its class tags follow from the resulting structure.
pub fn functional_calculus(f: &HoloFunction, op: &OperatorModel) -> Result<OperatorModel> {
    if let HoloFunction::Polynomial(p) = f {
        if p.is_identity() {
            return Ok(op.clone());
        }
    }
    let (p, cert) = polynomial_for_operator(f, op)?;
    let spectrum = image_region(&HoloFunction::Polynomial(p.clone()), op.spectrum())?;
    let model = op.apply_polynomial(&p)?;
    Ok(model.with_spectrum(spectrum).with_series_certificate(cert))
}
