//! Structured bounded operators on `l2(N)`: shifts, banded Toeplitz,
//! diagonal and weighted shift models.
//!
//! Every model is described by its action on basis vectors, `column(j) = T e_j`,
//! which is finitely supported. Truncations and `apply` are built from it, so
//! they never carry truncation error.

mod sequence;

use std::collections::BTreeMap;

use serde::Serialize;

pub use sequence::{ClosedForm, Search, SequencePoint, SequenceRule, TailRule, Transform};

use crate::holocalc::{Polynomial, SeriesCertificate};
use crate::numkernel::{Band, ComplexMatrix};
use crate::spectral::SpectrumRegion;
use crate::{Error, Result, C64};

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Parsed operator description.
#[derive(Debug, Clone, PartialEq)]
pub enum OperatorSpec {
    RightShift,
    LeftShift,
    /// `(offset k, c_k)`: `T e_j = sum_k c_k e_(j+k)`.
    BandedToeplitz(Vec<(i64, C64)>),
    Diagonal(SequenceRule),
    /// `W e_n = w_n e_(n+1)`.
    WeightedShift(SequenceRule),
}

impl OperatorSpec {
    /// Parameterless kinds by name.
    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "right_shift" => Ok(OperatorSpec::RightShift),
            "left_shift" => Ok(OperatorSpec::LeftShift),
            other => Err(Error::UnknownKind(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum OperatorKind {
    RightShift,
    LeftShift,
    /// Nonzero diagonals by offset; offsets all `>= 0` or all `<= 0`.
    BandedToeplitz(BTreeMap<i64, C64>),
    Diagonal(SequenceRule),
    /// `symbol(W)`, or its adjoint when `adjoint` is set.
    WeightedShift {
        weights: SequenceRule,
        symbol: Polynomial,
        adjoint: bool,
    },
}

/// Operator classes relevant to the spectral criterion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct ClassTags {
    pub normal: bool,
    pub compact: bool,
    pub isometry: bool,
    /// Certified `sigma_ap(T*) = sigma(T*)`.
    pub ap_equals_adjoint_spectrum: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OperatorModel {
    kind: OperatorKind,
    spectrum: SpectrumRegion,
    series: Option<SeriesCertificate>,
}

/// Toeplitz data split by direction: `T = sum_k c_k S^k` or `sum_k c_k S*^k`.
enum Symbol {
    Analytic(Polynomial),
    CoAnalytic(Polynomial),
}

fn toeplitz_symbol(diagonals: &BTreeMap<i64, C64>) -> Symbol {
    let coeffs = |sign: i64| {
        let max = diagonals.keys().map(|k| k * sign).max().unwrap_or(0).max(0) as usize;
        let mut c = vec![ZERO; max + 1];
        for (&k, &v) in diagonals {
            c[(k * sign) as usize] = v;
        }
        Polynomial::normalized(c)
    };
    if diagonals.keys().all(|&k| k >= 0) {
        Symbol::Analytic(coeffs(1))
    } else {
        Symbol::CoAnalytic(coeffs(-1))
    }
}

fn toeplitz_from(p: &Polynomial, sign: i64) -> BTreeMap<i64, C64> {
    p.coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| **c != ZERO)
        .map(|(k, &c)| (sign * k as i64, c))
        .collect()
}

fn unit_disk() -> SpectrumRegion {
    SpectrumRegion::ClosedDisk {
        center: ZERO,
        radius: 1.0,
    }
}

fn diagonal_spectrum(rule: &SequenceRule) -> SpectrumRegion {
    if rule.eventually_periodic() {
        SpectrumRegion::finite_set(rule.listed_values())
    } else {
        SpectrumRegion::ClosureOfSequence(rule.clone())
    }
}

fn weighted_shift_spectrum(weights: &SequenceRule, symbol: &Polynomial, adjoint: bool) -> SpectrumRegion {
    let base = if weights.tends_to_zero() {
        SpectrumRegion::finite_set(vec![ZERO])
    } else {
        // Eventually periodic weights: the spectral radius is the geometric mean
        // of the limit cycle; a zero in the cycle makes W quasinilpotent.
        let cycle = weights.accumulation_points();
        let log_mean = cycle.iter().map(|w| w.norm().ln()).sum::<f64>() / cycle.len() as f64;
        let radius = log_mean.exp();
        if radius == 0.0 {
            SpectrumRegion::finite_set(vec![ZERO])
        } else {
            SpectrumRegion::ClosedDisk { center: ZERO, radius }
        }
    };
    let region = base.polynomial_image(symbol);
    if adjoint {
        region.conj()
    } else {
        region
    }
}

/// Build a model with its analytically known spectrum.
pub fn make_operator(spec: &OperatorSpec) -> Result<OperatorModel> {
    let (kind, spectrum) = match spec {
        OperatorSpec::RightShift => (OperatorKind::RightShift, unit_disk()),
        OperatorSpec::LeftShift => (OperatorKind::LeftShift, unit_disk()),
        OperatorSpec::BandedToeplitz(entries) => {
            let mut diagonals = BTreeMap::new();
            for &(k, c) in entries {
                if !(c.re.is_finite() && c.im.is_finite()) {
                    return Err(Error::InvalidArgument(format!("non-finite diagonal at offset {k}")));
                }
                if c != ZERO {
                    *diagonals.entry(k).or_insert(ZERO) += c;
                }
            }
            diagonals.retain(|_, c| *c != ZERO);
            if diagonals.keys().any(|&k| k > 0) && diagonals.keys().any(|&k| k < 0) {
                return Err(Error::UnsupportedOperator(
                    "banded Toeplitz with both positive and negative offsets has no declared spectrum here"
                        .into(),
                ));
            }
            let spectrum = match toeplitz_symbol(&diagonals) {
                Symbol::Analytic(p) | Symbol::CoAnalytic(p) => unit_disk().polynomial_image(&p),
            };
            (OperatorKind::BandedToeplitz(diagonals), spectrum)
        }
        OperatorSpec::Diagonal(rule) => {
            check_bounded(rule)?;
            (OperatorKind::Diagonal(rule.clone()), diagonal_spectrum(rule))
        }
        OperatorSpec::WeightedShift(weights) => {
            check_bounded(weights)?;
            let symbol = Polynomial::identity();
            let spectrum = weighted_shift_spectrum(weights, &symbol, false);
            (
                OperatorKind::WeightedShift {
                    weights: weights.clone(),
                    symbol,
                    adjoint: false,
                },
                spectrum,
            )
        }
    };
    Ok(OperatorModel {
        kind,
        spectrum,
        series: None,
    })
}

fn check_bounded(rule: &SequenceRule) -> Result<()> {
    let b = rule.bound();
    if b.is_finite() {
        Ok(())
    } else {
        Err(Error::UnboundedSequence(format!("declared bound {b}")))
    }
}

/// The adjoint model; an involution.
pub fn adjoint(op: &OperatorModel) -> OperatorModel {
    let kind = match &op.kind {
        OperatorKind::RightShift => OperatorKind::LeftShift,
        OperatorKind::LeftShift => OperatorKind::RightShift,
        OperatorKind::BandedToeplitz(d) => {
            OperatorKind::BandedToeplitz(d.iter().map(|(&k, c)| (-k, c.conj())).collect())
        }
        OperatorKind::Diagonal(rule) => OperatorKind::Diagonal(rule.conjugated()),
        OperatorKind::WeightedShift {
            weights,
            symbol,
            adjoint,
        } => OperatorKind::WeightedShift {
            weights: weights.clone(),
            symbol: symbol.clone(),
            adjoint: !adjoint,
        },
    };
    OperatorModel {
        kind,
        spectrum: op.spectrum.conj(),
        series: op.series.clone(),
    }
}

/// Exact `(N + u) x N` section whose column `j` is the coordinate vector of `T e_j`,
/// `u` being the number of sub-diagonals.
pub fn truncate_columns(op: &OperatorModel, n: usize) -> Result<ComplexMatrix> {
    if n == 0 {
        return Err(Error::EmptyTruncation);
    }
    let band = op.band();
    let mut m = ComplexMatrix::banded_zeros(n + band.lower, n, band)?;
    for j in 0..n {
        for (i, v) in op.column(j) {
            m.set(i, j, v);
        }
    }
    Ok(m)
}

/// `T v` for a finitely supported `v` (index `i` holds the `e_i` coefficient).
pub fn apply(op: &OperatorModel, v: &[C64]) -> Vec<C64> {
    let mut out = vec![ZERO; v.len() + op.band().lower];
    for (j, &x) in v.iter().enumerate() {
        if x == ZERO {
            continue;
        }
        for (i, c) in op.column(j) {
            out[i] += c * x;
        }
    }
    out
}

impl OperatorModel {
    pub fn kind(&self) -> &OperatorKind {
        &self.kind
    }

    /// Declared spectrum.
    pub fn spectrum(&self) -> &SpectrumRegion {
        &self.spectrum
    }

    /// Present when the model came from a truncated power series.
    pub fn series_certificate(&self) -> Option<&SeriesCertificate> {
        self.series.as_ref()
    }

    pub(crate) fn with_spectrum(mut self, spectrum: SpectrumRegion) -> Self {
        self.spectrum = spectrum;
        self
    }

    pub(crate) fn with_series_certificate(mut self, cert: Option<SeriesCertificate>) -> Self {
        if cert.is_some() {
            self.series = cert;
        }
        self
    }

    /// Class tags follow from the structure. The spectral tag holds for
    /// normal and compact models, and for polynomials in the right shift
    /// (inherited from `S` under the functional calculus).
    pub fn tags(&self) -> ClassTags {
        match &self.kind {
            OperatorKind::RightShift => ClassTags {
                isometry: true,
                ap_equals_adjoint_spectrum: true,
                ..ClassTags::default()
            },
            OperatorKind::LeftShift => ClassTags::default(),
            OperatorKind::BandedToeplitz(d) => {
                let scalar = d.keys().all(|&k| k == 0);
                let analytic = d.keys().all(|&k| k >= 0);
                ClassTags {
                    normal: scalar,
                    compact: d.is_empty(),
                    isometry: d.len() == 1
                        && d.iter().all(|(&k, c)| k >= 0 && (c.norm() - 1.0).abs() <= f64::EPSILON),
                    ap_equals_adjoint_spectrum: analytic,
                }
            }
            OperatorKind::Diagonal(rule) => ClassTags {
                normal: true,
                compact: rule.tends_to_zero(),
                isometry: false,
                ap_equals_adjoint_spectrum: true,
            },
            OperatorKind::WeightedShift { weights, symbol, .. } => {
                let quasinilpotent = weights.tends_to_zero();
                ClassTags {
                    normal: false,
                    compact: quasinilpotent && symbol.coeffs()[0] == ZERO,
                    isometry: false,
                    // symbol(W) is a scalar plus a compact operator.
                    ap_equals_adjoint_spectrum: quasinilpotent,
                }
            }
        }
    }

    /// Matrix band of every section: `lower` sub-diagonals, `upper` super-diagonals.
    pub fn band(&self) -> Band {
        match &self.kind {
            OperatorKind::RightShift => Band { lower: 1, upper: 0 },
            OperatorKind::LeftShift => Band { lower: 0, upper: 1 },
            OperatorKind::BandedToeplitz(d) => Band {
                lower: d.keys().copied().max().unwrap_or(0).max(0) as usize,
                upper: (-d.keys().copied().min().unwrap_or(0)).max(0) as usize,
            },
            OperatorKind::Diagonal(_) => Band { lower: 0, upper: 0 },
            OperatorKind::WeightedShift { symbol, adjoint, .. } => {
                let d = symbol.degree();
                if *adjoint {
                    Band { lower: 0, upper: d }
                } else {
                    Band { lower: d, upper: 0 }
                }
            }
        }
    }

    /// Nonzero coordinates of `T e_j`.
    pub fn column(&self, j: usize) -> Vec<(usize, C64)> {
        let mut out = Vec::new();
        match &self.kind {
            OperatorKind::RightShift => out.push((j + 1, ONE)),
            OperatorKind::LeftShift => {
                if j > 0 {
                    out.push((j - 1, ONE));
                }
            }
            OperatorKind::BandedToeplitz(d) => {
                for (&k, &c) in d {
                    let i = j as i64 + k;
                    if i >= 0 {
                        out.push((i as usize, c));
                    }
                }
            }
            OperatorKind::Diagonal(rule) => {
                let v = rule.value(j);
                if v != ZERO {
                    out.push((j, v));
                }
            }
            OperatorKind::WeightedShift {
                weights,
                symbol,
                adjoint: false,
            } => {
                let mut prod = ONE;
                for (k, &a) in symbol.coeffs().iter().enumerate() {
                    if k > 0 {
                        prod *= weights.value(j + k - 1);
                    }
                    let c = a * prod;
                    if c != ZERO {
                        out.push((j + k, c));
                    }
                }
            }
            OperatorKind::WeightedShift {
                weights,
                symbol,
                adjoint: true,
            } => {
                let mut prod = ONE;
                for (k, &a) in symbol.coeffs().iter().enumerate() {
                    if k > j {
                        break;
                    }
                    if k > 0 {
                        prod *= weights.value(j - k).conj();
                    }
                    let c = a.conj() * prod;
                    if c != ZERO {
                        out.push((j - k, c));
                    }
                }
                out.reverse();
            }
        }
        out
    }

    /// Upper bound for the operator norm.
    pub fn norm_bound(&self) -> f64 {
        match &self.kind {
            OperatorKind::RightShift | OperatorKind::LeftShift => 1.0,
            OperatorKind::BandedToeplitz(d) => d.values().map(|c| c.norm()).sum(),
            OperatorKind::Diagonal(rule) => rule.bound(),
            OperatorKind::WeightedShift { weights, symbol, .. } => symbol.bound_on_disk(weights.bound()),
        }
    }

    /// `p(T)` by structure. The declared spectrum is left unchanged; callers
    /// go through the functional calculus, which sets it.
    pub(crate) fn apply_polynomial(&self, p: &Polynomial) -> Result<OperatorModel> {
        let kind = match &self.kind {
            OperatorKind::RightShift => OperatorKind::BandedToeplitz(toeplitz_from(p, 1)),
            OperatorKind::LeftShift => OperatorKind::BandedToeplitz(toeplitz_from(p, -1)),
            OperatorKind::BandedToeplitz(d) => match toeplitz_symbol(d) {
                Symbol::Analytic(q) => OperatorKind::BandedToeplitz(toeplitz_from(&p.compose(&q), 1)),
                Symbol::CoAnalytic(q) => OperatorKind::BandedToeplitz(toeplitz_from(&p.compose(&q), -1)),
            },
            OperatorKind::Diagonal(rule) => OperatorKind::Diagonal(rule.mapped(p)),
            OperatorKind::WeightedShift {
                weights,
                symbol,
                adjoint,
            } => {
                // p(A*) = (conj p)(A)* with conj p the polynomial with conjugated coefficients.
                let outer = if *adjoint { p.conj_coeffs() } else { p.clone() };
                OperatorKind::WeightedShift {
                    weights: weights.clone(),
                    symbol: outer.compose(symbol),
                    adjoint: *adjoint,
                }
            }
        };
        Ok(OperatorModel {
            kind,
            spectrum: self.spectrum.clone(),
            series: self.series.clone(),
        })
    }

    /// `T - lambda`, with its spectrum translated.
    pub fn shifted(&self, lambda: C64) -> Result<OperatorModel> {
        if lambda == ZERO {
            return Ok(self.clone());
        }
        let p = Polynomial::new(vec![-lambda, ONE])?;
        let spectrum = self.spectrum.polynomial_image(&p);
        Ok(self.apply_polynomial(&p)?.with_spectrum(spectrum))
    }
}
