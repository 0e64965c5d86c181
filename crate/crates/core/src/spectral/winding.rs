use std::f64::consts::{FRAC_PI_2, PI};

use crate::holocalc::Polynomial;
use crate::numkernel::polynomial_roots;
use crate::{Error, Result, C64};

pub const MIN_WINDING_SAMPLES: usize = 64;

/// Total evaluations allowed for one winding number. A root at relative
/// distance `d` from the contour needs steps of about `2d`, so this covers
/// roots down to roughly `1e-6` away.
pub const WINDING_SAMPLE_CAP: usize = 1 << 22;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeroInImage {
    YesInterior,
    YesBoundary,
    No,
}

/// Outcome of [`zero_in_image`] with the evidence of both methods.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroTest {
    pub answer: ZeroInImage,
    /// Root of `f` closest to the disk center, in original coordinates.
    pub nearest_root: Option<C64>,
    /// Modulus of that root relative to the center.
    pub nearest_modulus: Option<f64>,
    /// Roots strictly inside the inner and outer test circles.
    pub root_counts: (usize, usize),
    /// Winding numbers on the same circles.
    pub winding: (i64, i64),
}

/// Does `f` vanish on the closed disk `|z - center| <= radius`?
///
/// Roots are classified by modulus with a relative band `tol` around the
/// circle. The root counts inside the circles of radius `(1 -+ delta) radius`,
/// `delta = max(tol, 1e-6)`, must match the winding numbers there.
pub fn zero_in_image(f: &Polynomial, center: C64, radius: f64, tol: f64) -> Result<ZeroTest> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tol must be positive, got {tol}")));
    }
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidArgument(format!("disk radius must be positive, got {radius}")));
    }
    if f.is_zero() {
        return Ok(ZeroTest {
            answer: ZeroInImage::YesInterior,
            nearest_root: Some(center),
            nearest_modulus: Some(0.0),
            root_counts: (0, 0),
            winding: (0, 0),
        });
    }
    if f.is_constant() {
        return Ok(ZeroTest {
            answer: ZeroInImage::No,
            nearest_root: None,
            nearest_modulus: None,
            root_counts: (0, 0),
            winding: (0, 0),
        });
    }

    let g = f.recentered(center);
    let roots = polynomial_roots(g.coeffs())?;
    let (nearest, modulus) = roots
        .iter()
        .map(|w| (*w, w.norm()))
        .fold((roots[0], f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc });

    let answer = if modulus <= radius * (1.0 - tol) {
        ZeroInImage::YesInterior
    } else if modulus <= radius * (1.0 + tol) {
        ZeroInImage::YesBoundary
    } else {
        ZeroInImage::No
    };

    let mut delta = tol.max(1e-6);
    let (inner, outer) = loop {
        let attempt = (|| {
            let inner = winding_number(&g, C64::new(0.0, 0.0), radius * (1.0 - delta), MIN_WINDING_SAMPLES)?;
            let outer = winding_number(&g, C64::new(0.0, 0.0), radius * (1.0 + delta), MIN_WINDING_SAMPLES)?;
            Ok((inner, outer))
        })();
        match attempt {
            // A root sitting on a test circle: move the circles once.
            Err(Error::ContourThroughZero { .. }) if delta < 0.5 && delta == tol.max(1e-6) => delta *= 1.37,
            other => break other?,
        }
    };
    let count = |r: f64| roots.iter().filter(|w| w.norm() < r).count();
    let counts = (count(radius * (1.0 - delta)), count(radius * (1.0 + delta)));
    if counts.0 as i64 != inner || counts.1 as i64 != outer {
        return Err(Error::RootWindingMismatch {
            roots: (counts.0, counts.1),
            winding: (inner, outer),
            radius,
        });
    }
    Ok(ZeroTest {
        answer,
        nearest_root: Some(center + nearest),
        nearest_modulus: Some(modulus),
        root_counts: counts,
        winding: (inner, outer),
    })
}

/// Winding number of `f` around 0 along `|z - center| = radius`.
///
/// Starts from `samples` equispaced points and bisects every step whose
/// argument change reaches `pi/2`, up to [`WINDING_SAMPLE_CAP`] evaluations.
pub fn winding_number(f: &Polynomial, center: C64, radius: f64, samples: usize) -> Result<i64> {
    if samples < MIN_WINDING_SAMPLES {
        return Err(Error::InvalidArgument(format!(
            "winding number needs at least {MIN_WINDING_SAMPLES} samples, got {samples}"
        )));
    }
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidArgument(format!("contour radius must be positive, got {radius}")));
    }
    let g = f.recentered(center);
    let floor = 10.0 * f64::EPSILON * g.bound_on_disk(radius);
    let mut walker = Walker {
        g: &g,
        radius,
        floor,
        center,
        evaluations: 0,
    };

    let step = 2.0 * PI / samples as f64;
    let first = walker.eval(0.0)?;
    let mut prev = first;
    let mut total = 0.0;
    for k in 1..=samples {
        let theta = k as f64 * step;
        let next = if k == samples { first } else { walker.eval(theta)? };
        total += walker.arg_change(theta - step, prev, theta, next)?;
        prev = next;
    }
    Ok((total / (2.0 * PI)).round() as i64)
}

struct Walker<'a> {
    g: &'a Polynomial,
    radius: f64,
    floor: f64,
    center: C64,
    evaluations: usize,
}

impl Walker<'_> {
    fn eval(&mut self, theta: f64) -> Result<C64> {
        self.evaluations += 1;
        if self.evaluations > WINDING_SAMPLE_CAP {
            return Err(Error::SamplingCapExceeded { cap: WINDING_SAMPLE_CAP });
        }
        let v = self.g.eval(C64::from_polar(self.radius, theta));
        if v.norm() < self.floor {
            return Err(Error::ContourThroughZero {
                center: self.center,
                radius: self.radius,
                min_modulus: v.norm(),
            });
        }
        Ok(v)
    }

    fn arg_change(&mut self, a: f64, va: C64, b: f64, vb: C64) -> Result<f64> {
        let d = (vb / va).arg();
        if d.abs() < FRAC_PI_2 {
            return Ok(d);
        }
        let m = 0.5 * (a + b);
        let vm = self.eval(m)?;
        Ok(self.arg_change(a, va, m, vm)? + self.arg_change(m, vm, b, vb)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(c: &[f64]) -> Polynomial {
        Polynomial::from_real(c).unwrap()
    }

    const O: C64 = C64::new(0.0, 0.0);

    #[test]
    fn winding_examples() {
        assert_eq!(winding_number(&poly(&[0.0, 0.0, 1.0]), O, 1.0, 64).unwrap(), 2);
        assert_eq!(winding_number(&poly(&[1.0, 1.0]), O, 2.0, 64).unwrap(), 1);
        assert_eq!(winding_number(&poly(&[-2.0, 1.0]), O, 1.0, 64).unwrap(), 0);
        assert_eq!(winding_number(&poly(&[3.0]), O, 1.0, 64).unwrap(), 0);
    }

    #[test]
    fn winding_errors() {
        assert!(matches!(
            winding_number(&poly(&[1.0, 1.0]), O, 1.0, 64),
            Err(Error::ContourThroughZero { .. })
        ));
        assert!(matches!(
            winding_number(&poly(&[1.0, 1.0]), O, 2.0, 8),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn winding_resolves_nearby_root() {
        // Root at 1 + 1e-6, just outside the unit circle.
        let f = poly(&[-(1.0 + 1e-6), 1.0]);
        assert_eq!(winding_number(&f, O, 1.0, 64).unwrap(), 0);
        assert_eq!(winding_number(&f, O, 1.0 + 2e-6, 64).unwrap(), 1);
    }

    #[test]
    fn zero_in_image_examples() {
        let t = zero_in_image(&poly(&[1.0, 1.0]), O, 1.0, 1e-8).unwrap();
        assert_eq!(t.answer, ZeroInImage::YesBoundary);
        assert!((t.nearest_root.unwrap() + 1.0).norm() < 1e-15);
        assert_eq!(t.winding, (0, 1));

        let t = zero_in_image(&poly(&[1.0, 1.0, 1.0, 1.0]), O, 1.0, 1e-8).unwrap();
        assert_eq!(t.answer, ZeroInImage::YesBoundary);
        assert_eq!(t.root_counts, (0, 3));

        assert_eq!(zero_in_image(&poly(&[-2.0, 1.0]), O, 1.0, 1e-8).unwrap().answer, ZeroInImage::No);
        assert_eq!(
            zero_in_image(&poly(&[-0.5, 1.0]), O, 1.0, 1e-8).unwrap().answer,
            ZeroInImage::YesInterior
        );
        assert_eq!(zero_in_image(&Polynomial::zero(), O, 1.0, 1e-8).unwrap().answer, ZeroInImage::YesInterior);
        assert_eq!(zero_in_image(&poly(&[2.0]), O, 1.0, 1e-8).unwrap().answer, ZeroInImage::No);
    }

    #[test]
    fn off_center_disk() {
        // Root at 2 lies on the circle |z - 1| = 1.
        let t = zero_in_image(&poly(&[-2.0, 1.0]), C64::new(1.0, 0.0), 1.0, 1e-8).unwrap();
        assert_eq!(t.answer, ZeroInImage::YesBoundary);
        assert!((t.nearest_root.unwrap() - 2.0).norm() < 1e-15);
    }
}
