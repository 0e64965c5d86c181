use std::f64::consts::PI;

use rayon::prelude::*;

use crate::numkernel::{extremal_singular_value, Extremal, KernelConfig};
use crate::operators::{adjoint, truncate_columns, OperatorModel, SequencePoint};
use crate::{Error, Result, C64};

use super::region::{region_membership, Membership, SpectrumRegion};

/// `d_N(lambda)`: smallest singular value of the exact `N`-column section of
/// `T - lambda`. Nonincreasing in `N`, with limit 0 exactly on `sigma_ap(T)`.
pub fn ap_distance(op: &OperatorModel, lambda: C64, n: usize) -> Result<f64> {
    let m = truncate_columns(&op.shifted(lambda)?, n)?;
    extremal_singular_value(&m, Extremal::Smallest, KernelConfig::default().tol)
}

/// True when the last three values change by less than `tol` relative to the last.
pub(crate) fn stabilized(values: &[f64], tol: f64) -> bool {
    if values.len() < 3 {
        return false;
    }
    let tail = &values[values.len() - 3..];
    let scale = tail[2].abs().max(f64::MIN_POSITIVE);
    tail.windows(2).all(|w| (w[1] - w[0]).abs() / scale < tol)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeStatus {
    Consistent,
    Violation,
    Inconclusive,
    /// Outside the declared spectrum of the adjoint; not probed.
    Skipped,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ProbePoint {
    pub lambda: C64,
    pub membership: Membership,
    /// `d_N(lambda)` of the adjoint for each `N` in the sweep.
    pub distances: Vec<f64>,
    pub status: ProbeStatus,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeOutcome {
    Consistent,
    ViolationFound { witness: C64, distance: f64 },
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ProbeReport {
    pub outcome: ProbeOutcome,
    pub points: Vec<ProbePoint>,
    pub n_list: Vec<usize>,
    pub tol: f64,
}

pub(crate) fn check_n_list(n_list: &[usize]) -> Result<()> {
    if n_list.is_empty() || n_list[0] == 0 {
        return Err(Error::InvalidArgument("N_list must be nonempty with entries >= 1".into()));
    }
    if n_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("N_list not increasing".into()));
    }
    Ok(())
}

/// Test `sigma_ap(T*) = sigma(T*)` on the grid points lying in the declared
/// spectrum of `T*`. A point is consistent when `d_N` on `T*` drops below
/// `tol` at the largest `N`, a violation when it stabilizes above `10 tol`,
/// inconclusive otherwise. Points are evaluated in parallel; the result is
/// the same as a sequential run.
pub fn probe_ap_equals_spectrum(
    op: &OperatorModel,
    grid: &[C64],
    n_list: &[usize],
    tol: f64,
) -> Result<ProbeReport> {
    if grid.is_empty() {
        return Err(Error::InvalidArgument("probe grid is empty".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tol must be positive, got {tol}")));
    }
    check_n_list(n_list)?;
    let adj = adjoint(op);
    let points = grid
        .par_iter()
        .map(|&lambda| probe_point(&adj, lambda, n_list, tol))
        .collect::<Result<Vec<_>>>()?;

    let outcome = if let Some(p) = points.iter().find(|p| p.status == ProbeStatus::Violation) {
        ProbeOutcome::ViolationFound {
            witness: p.lambda,
            distance: *p.distances.last().expect("nonempty N_list"),
        }
    } else if points
        .iter()
        .any(|p| p.status == ProbeStatus::Inconclusive)
        || points.iter().all(|p| p.status == ProbeStatus::Skipped)
    {
        ProbeOutcome::Inconclusive
    } else {
        ProbeOutcome::Consistent
    };
    Ok(ProbeReport {
        outcome,
        points,
        n_list: n_list.to_vec(),
        tol,
    })
}

fn probe_point(adj: &OperatorModel, lambda: C64, n_list: &[usize], tol: f64) -> Result<ProbePoint> {
    let membership = region_membership(adj.spectrum(), lambda, tol);
    if membership == Membership::Outside {
        return Ok(ProbePoint {
            lambda,
            membership,
            distances: Vec::new(),
            status: ProbeStatus::Skipped,
        });
    }
    let distances = n_list
        .iter()
        .map(|&n| ap_distance(adj, lambda, n))
        .collect::<Result<Vec<_>>>()?;
    let last = *distances.last().expect("nonempty N_list");
    let status = if last < tol {
        ProbeStatus::Consistent
    } else if last > 10.0 * tol && stabilized(&distances, tol) {
        ProbeStatus::Violation
    } else {
        ProbeStatus::Inconclusive
    };
    Ok(ProbePoint {
        lambda,
        membership,
        distances,
        status,
    })
}

/// Probe points for a region: about two thirds on the boundary, the rest in
/// the interior. Point sets contribute their listed points instead.
pub fn default_grid(region: &SpectrumRegion, size: usize) -> Vec<C64> {
    let size = size.max(1);
    match region {
        SpectrumRegion::ClosedDisk { center, radius } => disk_grid(*center, *radius, size),
        SpectrumRegion::PolynomialImageOfDisk { map, center, radius } => disk_grid(*center, *radius, size)
            .into_iter()
            .map(|z| map.eval(z))
            .collect(),
        SpectrumRegion::FiniteSet(points) => points.iter().copied().take(size).collect(),
        SpectrumRegion::ClosureOfSequence(rule) => {
            let mut out = Vec::with_capacity(size);
            for (k, _) in rule.accumulation_points().iter().enumerate().take(size) {
                out.push(rule.point_value(SequencePoint::Accumulation(k)));
            }
            let mut n = 0;
            while out.len() < size {
                out.push(rule.value(n));
                n += 1;
            }
            out
        }
        SpectrumRegion::Union(parts) => {
            let share = size.div_ceil(parts.len().max(1));
            parts.iter().flat_map(|r| default_grid(r, share)).take(size).collect()
        }
    }
}

fn disk_grid(center: C64, radius: f64, size: usize) -> Vec<C64> {
    let boundary = (2 * size).div_ceil(3);
    let interior = size - boundary;
    let mut out: Vec<C64> = (0..boundary)
        .map(|k| center + C64::from_polar(radius, 2.0 * PI * k as f64 / boundary as f64))
        .collect();
    if interior > 0 {
        out.push(center);
        let ring = interior - 1;
        for k in 0..ring {
            // Offset the ring so its points avoid the boundary rays.
            let theta = 2.0 * PI * (k as f64 + 0.5) / ring as f64;
            out.push(center + C64::from_polar(0.5 * radius, theta));
        }
    }
    out
}
