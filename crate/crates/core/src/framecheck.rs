//! Verdict engine for sequences `(f(T) e_n)` and the numerical frame-bound
//! sweep used to corroborate it.
//!
//! The symbolic verdict is authoritative. When `T` carries the certified
//! `sigma_ap(T*) = sigma(T*)` tag, surjectivity and invertibility of `f(T)`
//! coincide, so the sequence is a frame exactly when `0` is not in
//! `f(sigma(T))`, and then it is a Riesz basis. Truncation numerics can only
//! ever agree with or question that answer.

use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::holocalc::{functional_calculus, truncate_series, HoloFunction, DEFAULT_SERIES_EPS};
use crate::numkernel::{extremal_singular_value, Extremal, KernelConfig};
use crate::operators::{adjoint, truncate_columns, OperatorModel};
use crate::spectral::{ap_distance, locate_zero, stabilized, ZeroInImage};
use crate::{Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    RieszBasis,
    NotFrame,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeroLocation {
    Interior,
    Boundary,
    Absent,
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrameVerdict {
    pub verdict: Verdict,
    pub criterion_applicable: bool,
    pub zero_location: ZeroLocation,
    /// A point `s` of `sigma(T)` with `f(s)` approximately zero.
    pub witness: Option<C64>,
    /// Band used by the zero test.
    pub tol: f64,
    pub notes: String,
    /// Fingerprint of the synthesis operator `f(T)`.
    pub provenance: String,
}

/// Stable fingerprint of a model's structure.
pub fn provenance(v: &OperatorModel) -> String {
    let digest = Sha256::digest(format!("{:?}", v.kind()).as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Apply the spectral criterion to `(f(T) e_n)`.
pub fn criterion_verdict(t: &OperatorModel, f: &HoloFunction, tol: f64) -> Result<FrameVerdict> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tol must be positive, got {tol}")));
    }
    let v = functional_calculus(f, t)?;
    let provenance = provenance(&v);
    if !t.tags().ap_equals_adjoint_spectrum {
        return Ok(FrameVerdict {
            verdict: Verdict::Inconclusive,
            criterion_applicable: false,
            zero_location: ZeroLocation::NotApplicable,
            witness: None,
            tol,
            notes: "sigma_ap(T*) = sigma(T*) is not certified for this operator; \
                    surjectivity of f(T) cannot be inferred from invertibility"
                .into(),
            provenance,
        });
    }

    let rho = t.spectrum().max_modulus();
    let (p, cert) = match f {
        HoloFunction::Polynomial(p) => (p.clone(), None),
        HoloFunction::PowerSeries(_) => {
            let (p, cert) = truncate_series(f, rho.max(f64::MIN_POSITIVE), DEFAULT_SERIES_EPS)?;
            (p, Some(cert))
        }
    };
    let search = locate_zero(&p, t.spectrum(), tol)?;
    let (verdict, zero_location, mut notes) = match search.answer {
        ZeroInImage::YesInterior => (
            Verdict::NotFrame,
            ZeroLocation::Interior,
            "0 lies in f(sigma(T)): f(T) is not invertible, hence not surjective".to_string(),
        ),
        ZeroInImage::YesBoundary => (
            Verdict::NotFrame,
            ZeroLocation::Boundary,
            format!(
                "0 lies in f(sigma(T)) up to the tolerance band {tol:e}: f(T) is not invertible, \
                 hence not surjective"
            ),
        ),
        ZeroInImage::No => (
            Verdict::RieszBasis,
            ZeroLocation::Absent,
            "0 is not in f(sigma(T)): f(T) is invertible".to_string(),
        ),
    };
    if let Some(c) = cert {
        notes.push_str(&format!(
            "; series cut at degree {} with tail bound {:e} on |z| <= {}",
            c.degree, c.tail_bound, c.radius
        ));
    }
    Ok(FrameVerdict {
        verdict,
        criterion_applicable: true,
        zero_location,
        witness: search.witness,
        tol,
        notes,
        provenance,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundRow {
    pub n: usize,
    /// Square of the smallest singular value of the `N`-section of `V*`.
    pub lower: f64,
    /// Square of the largest singular value of the `N`-column section of `V`.
    pub upper: f64,
    /// `d_N(0)` of `V*`, i.e. `sqrt(lower)`.
    pub ap_distance_at_zero: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrameBoundEstimates {
    pub rows: Vec<BoundRow>,
    pub lower_nonincreasing: bool,
    pub upper_nondecreasing: bool,
    /// Operator-norm error of a truncated series, when `V` came from one.
    pub series_slack: Option<f64>,
    pub provenance: String,
}

impl FrameBoundEstimates {
    pub fn final_lower(&self) -> f64 {
        self.rows.last().map_or(f64::NAN, |r| r.lower)
    }

    pub fn final_upper(&self) -> f64 {
        self.rows.last().map_or(f64::NAN, |r| r.upper)
    }
}

/// Sweep the frame-bound estimates of `(V e_n)` over `n_list`.
///
/// `lower` only ever overestimates the optimal lower frame bound and `upper`
/// underestimates the optimal upper one; the sweep shows how they move.
pub fn estimate_frame_bounds(v: &OperatorModel, n_list: &[usize]) -> Result<FrameBoundEstimates> {
    crate::spectral::check_n_list(n_list)?;
    let tol = KernelConfig::default().tol;
    let adj = adjoint(v);
    let rows = n_list
        .par_iter()
        .map(|&n| {
            let d = extremal_singular_value(&truncate_columns(&adj, n)?, Extremal::Smallest, tol)?;
            let s = extremal_singular_value(&truncate_columns(v, n)?, Extremal::Largest, tol)?;
            Ok(BoundRow {
                n,
                lower: d * d,
                upper: s * s,
                ap_distance_at_zero: d,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let slack = tol * rows.iter().map(|r| r.upper).fold(1.0, f64::max);
    Ok(FrameBoundEstimates {
        lower_nonincreasing: rows.windows(2).all(|w| w[1].lower <= w[0].lower + slack),
        upper_nondecreasing: rows.windows(2).all(|w| w[1].upper + slack >= w[0].upper),
        rows,
        series_slack: v.series_certificate().map(|c| c.tail_bound),
        provenance: provenance(v),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CrossValidation {
    Consistent,
    Tension(String),
}

/// Compare a symbolic verdict with the sweep. Never changes the verdict.
pub fn cross_validate(
    verdict: &FrameVerdict,
    bounds: &FrameBoundEstimates,
    decay_threshold: f64,
    tol: f64,
) -> Result<CrossValidation> {
    if verdict.provenance != bounds.provenance {
        return Err(Error::ProvenanceMismatch {
            verdict: verdict.provenance.clone(),
            bounds: bounds.provenance.clone(),
        });
    }
    let lowers: Vec<f64> = bounds.rows.iter().map(|r| r.lower).collect();
    let Some(&last) = lowers.last() else {
        return Err(Error::InvalidArgument("empty bound sweep".into()));
    };
    let n = bounds.rows.last().map_or(0, |r| r.n);
    Ok(match verdict.verdict {
        Verdict::Inconclusive => CrossValidation::Consistent,
        Verdict::NotFrame => {
            let decreasing = lowers.len() >= 2 && {
                let prev = lowers[lowers.len() - 2];
                prev > 0.0 && (prev - last) / prev > tol
            };
            if last < decay_threshold || decreasing {
                CrossValidation::Consistent
            } else {
                CrossValidation::Tension(format!(
                    "verdict NotFrame but lower estimate at N = {n} is {last:.6e}, \
                     above the decay threshold {decay_threshold:e} and not decreasing"
                ))
            }
        }
        Verdict::RieszBasis => {
            if last > decay_threshold && stabilized(&lowers, tol) {
                CrossValidation::Consistent
            } else {
                CrossValidation::Tension(format!(
                    "verdict RieszBasis but lower estimate at N = {n} is {last:.6e} \
                     (decay threshold {decay_threshold:e}, stabilized: {})",
                    stabilized(&lowers, tol)
                ))
            }
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Surjectivity {
    BoundedBelowEvidence,
    Decaying,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurjectivityProbe {
    pub outcome: Surjectivity,
    /// `d_N(0)` of the adjoint per `N`.
    pub values: Vec<f64>,
}

/// Evidence on whether `op` is onto, through `d_N(0)` of its adjoint.
pub fn surjectivity_probe(op: &OperatorModel, n_list: &[usize], tol: f64) -> Result<SurjectivityProbe> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tol must be positive, got {tol}")));
    }
    crate::spectral::check_n_list(n_list)?;
    let adj = adjoint(op);
    let zero = C64::new(0.0, 0.0);
    let values = n_list
        .par_iter()
        .map(|&n| ap_distance(&adj, zero, n))
        .collect::<Result<Vec<_>>>()?;
    let last = values[values.len() - 1];
    let outcome = if last < tol {
        Surjectivity::Decaying
    } else if last > 10.0 * tol && stabilized(&values, tol) {
        Surjectivity::BoundedBelowEvidence
    } else if values.len() >= 2 && last < values[values.len() - 2] {
        Surjectivity::Decaying
    } else {
        Surjectivity::Inconclusive
    };
    Ok(SurjectivityProbe { outcome, values })
}
