use crate::holocalc::{truncate_series, HoloFunction, Polynomial, DEFAULT_SERIES_EPS};
use crate::operators::{Search, SequenceRule};
use crate::{Error, Result, C64};

use super::winding::{zero_in_image, ZeroInImage};

/// Compact nonempty subset of the plane, described analytically.
#[derive(Debug, Clone, PartialEq)]
pub enum SpectrumRegion {
    ClosedDisk { center: C64, radius: f64 },
    FiniteSet(Vec<C64>),
    /// Closure of `{lambda_n}`: the terms plus the rule's limit points.
    ClosureOfSequence(SequenceRule),
    Union(Vec<SpectrumRegion>),
    /// `map(closed disk)`.
    PolynomialImageOfDisk { map: Polynomial, center: C64, radius: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Membership {
    Outside,
    Boundary,
    Inside,
}

impl SpectrumRegion {
    /// Finite set with exact duplicates removed (first occurrence kept).
    pub fn finite_set(points: Vec<C64>) -> Self {
        let mut out: Vec<C64> = Vec::with_capacity(points.len());
        for p in points {
            if !out.contains(&p) {
                out.push(p);
            }
        }
        SpectrumRegion::FiniteSet(out)
    }

    /// Complex conjugate region.
    pub fn conj(&self) -> Self {
        match self {
            SpectrumRegion::ClosedDisk { center, radius } => SpectrumRegion::ClosedDisk {
                center: center.conj(),
                radius: *radius,
            },
            SpectrumRegion::FiniteSet(points) => SpectrumRegion::FiniteSet(points.iter().map(|p| p.conj()).collect()),
            SpectrumRegion::ClosureOfSequence(rule) => SpectrumRegion::ClosureOfSequence(rule.conjugated()),
            SpectrumRegion::Union(parts) => SpectrumRegion::Union(parts.iter().map(Self::conj).collect()),
            SpectrumRegion::PolynomialImageOfDisk { map, center, radius } => {
                SpectrumRegion::PolynomialImageOfDisk {
                    map: map.conj_coeffs(),
                    center: center.conj(),
                    radius: *radius,
                }
            }
        }
    }

    /// Upper bound for `max |z|` over the region.
    pub fn max_modulus(&self) -> f64 {
        match self {
            SpectrumRegion::ClosedDisk { center, radius } => center.norm() + radius,
            SpectrumRegion::FiniteSet(points) => points.iter().map(|p| p.norm()).fold(0.0, f64::max),
            SpectrumRegion::ClosureOfSequence(rule) => rule.bound(),
            SpectrumRegion::Union(parts) => parts.iter().map(Self::max_modulus).fold(0.0, f64::max),
            SpectrumRegion::PolynomialImageOfDisk { map, center, radius } => {
                map.recentered(*center).bound_on_disk(*radius)
            }
        }
    }

    /// `p(region)`, exact for every variant.
    pub fn polynomial_image(&self, p: &Polynomial) -> Self {
        if p.is_identity() {
            return self.clone();
        }
        if p.is_constant() {
            return SpectrumRegion::FiniteSet(vec![p.coeffs()[0]]);
        }
        match self {
            SpectrumRegion::ClosedDisk { center, radius } => SpectrumRegion::PolynomialImageOfDisk {
                map: p.clone(),
                center: *center,
                radius: *radius,
            },
            SpectrumRegion::FiniteSet(points) => Self::finite_set(points.iter().map(|z| p.eval(*z)).collect()),
            SpectrumRegion::ClosureOfSequence(rule) => SpectrumRegion::ClosureOfSequence(rule.mapped(p)),
            SpectrumRegion::Union(parts) => {
                SpectrumRegion::Union(parts.iter().map(|r| r.polynomial_image(p)).collect())
            }
            SpectrumRegion::PolynomialImageOfDisk { map, center, radius } => {
                SpectrumRegion::PolynomialImageOfDisk {
                    map: p.compose(map),
                    center: *center,
                    radius: *radius,
                }
            }
        }
    }
}

/// Three-valued membership. Point sets answer `Inside` within `tol` and
/// `Boundary` within `2 tol`; disks use a band of width `tol` around the
/// circle; polynomial images defer to [`zero_in_image`] of `map - z`.
pub fn region_membership(region: &SpectrumRegion, z: C64, tol: f64) -> Membership {
    match region {
        SpectrumRegion::ClosedDisk { center, radius } => {
            let d = (z - center).norm();
            if d < radius - tol {
                Membership::Inside
            } else if d <= radius + tol {
                Membership::Boundary
            } else {
                Membership::Outside
            }
        }
        SpectrumRegion::FiniteSet(points) => {
            let d = points.iter().map(|p| (p - z).norm()).fold(f64::INFINITY, f64::min);
            point_membership(d, tol)
        }
        SpectrumRegion::ClosureOfSequence(rule) => match rule.find_within(z, tol) {
            Search::Found { .. } => Membership::Inside,
            Search::NotFound { .. } => match rule.find_within(z, 2.0 * tol) {
                Search::Found { .. } | Search::NotFound { exhaustive: false } => Membership::Boundary,
                Search::NotFound { exhaustive: true } => Membership::Outside,
            },
        },
        SpectrumRegion::Union(parts) => parts
            .iter()
            .map(|r| region_membership(r, z, tol))
            .max()
            .unwrap_or(Membership::Outside),
        SpectrumRegion::PolynomialImageOfDisk { map, center, radius } => {
            match zero_in_image(&map.minus_constant(z), *center, *radius, tol) {
                Ok(t) => match t.answer {
                    ZeroInImage::YesInterior => Membership::Inside,
                    ZeroInImage::YesBoundary => Membership::Boundary,
                    ZeroInImage::No => Membership::Outside,
                },
                // Undecidable at this resolution; never collapse it to a side.
                Err(_) => Membership::Boundary,
            }
        }
    }
}

fn point_membership(d: f64, tol: f64) -> Membership {
    if d <= tol {
        Membership::Inside
    } else if d <= 2.0 * tol {
        Membership::Boundary
    } else {
        Membership::Outside
    }
}

/// `f(region)`. Series are cut to a polynomial on the disk of radius
/// `max_modulus(region)` first.
pub fn image_region(f: &HoloFunction, region: &SpectrumRegion) -> Result<SpectrumRegion> {
    match f {
        HoloFunction::Polynomial(p) => Ok(region.polynomial_image(p)),
        HoloFunction::PowerSeries(s) => {
            let rho = region.max_modulus();
            if rho >= s.radius() {
                return Err(Error::Domain {
                    modulus: rho,
                    radius: s.radius(),
                });
            }
            let (p, _) = truncate_series(f, rho.max(f64::MIN_POSITIVE), DEFAULT_SERIES_EPS)?;
            Ok(region.polynomial_image(&p))
        }
    }
}

/// Where 0 sits relative to `f(region)`, with a witness `s` in the region
/// such that `f(s)` is (approximately) zero.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroSearch {
    pub answer: ZeroInImage,
    pub witness: Option<C64>,
    /// Relative band (disks) or absolute distance (point sets) used to decide.
    pub tol: f64,
}

fn rank(a: ZeroInImage) -> u8 {
    match a {
        ZeroInImage::No => 0,
        ZeroInImage::YesBoundary => 1,
        ZeroInImage::YesInterior => 2,
    }
}

/// Pull a root in the tolerance band back onto the closed disk.
fn project(root: C64, center: C64, radius: f64) -> C64 {
    let w = root - center;
    if w.norm() > radius {
        center + w * (radius / w.norm())
    } else {
        root
    }
}

/// Decide `0 in f(region)`.
pub fn locate_zero(f: &Polynomial, region: &SpectrumRegion, tol: f64) -> Result<ZeroSearch> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tol must be positive, got {tol}")));
    }
    let found = |answer: ZeroInImage, witness: Option<C64>| ZeroSearch { answer, witness, tol };
    match region {
        SpectrumRegion::ClosedDisk { center, radius } => {
            let t = zero_in_image(f, *center, *radius, tol)?;
            let witness = match t.answer {
                ZeroInImage::No => None,
                _ => t.nearest_root.map(|r| project(r, *center, *radius)),
            };
            Ok(found(t.answer, witness))
        }
        SpectrumRegion::PolynomialImageOfDisk { map, center, radius } => {
            let t = zero_in_image(&f.compose(map), *center, *radius, tol)?;
            let witness = match t.answer {
                ZeroInImage::No => None,
                _ => t.nearest_root.map(|r| map.eval(project(r, *center, *radius))),
            };
            Ok(found(t.answer, witness))
        }
        SpectrumRegion::FiniteSet(points) => {
            let Some((best, d)) = points
                .iter()
                .map(|z| (*z, f.eval(*z).norm()))
                .min_by(|a, b| a.1.total_cmp(&b.1))
            else {
                return Ok(found(ZeroInImage::No, None));
            };
            Ok(match point_membership(d, tol) {
                Membership::Inside => found(ZeroInImage::YesInterior, Some(best)),
                Membership::Boundary => found(ZeroInImage::YesBoundary, Some(best)),
                Membership::Outside => found(ZeroInImage::No, None),
            })
        }
        SpectrumRegion::ClosureOfSequence(rule) => {
            let image = rule.mapped(f);
            let zero = C64::new(0.0, 0.0);
            for (radius, answer) in [(tol, ZeroInImage::YesInterior), (2.0 * tol, ZeroInImage::YesBoundary)] {
                match image.find_within(zero, radius) {
                    Search::Found { point, .. } => return Ok(found(answer, Some(rule.point_value(point)))),
                    Search::NotFound { exhaustive: false } => {
                        return Err(Error::SamplingCapExceeded { cap: 10_000_000 })
                    }
                    Search::NotFound { exhaustive: true } => {}
                }
            }
            Ok(found(ZeroInImage::No, None))
        }
        SpectrumRegion::Union(parts) => {
            let mut best = found(ZeroInImage::No, None);
            for part in parts {
                let r = locate_zero(f, part, tol)?;
                if rank(r.answer) > rank(best.answer) {
                    best = r;
                }
            }
            Ok(best)
        }
    }
}
