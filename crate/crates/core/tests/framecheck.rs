mod common;

use std::f64::consts::PI;

use common::{c, from_roots, rng, sigma_max, sigma_min};
use proptest::prelude::*;
use rand::Rng;
use specframe::framecheck::{
    criterion_verdict, cross_validate, estimate_frame_bounds, provenance, surjectivity_probe, CrossValidation,
    Surjectivity, Verdict, ZeroLocation,
};
use specframe::holocalc::{functional_calculus, HoloFunction, Polynomial, PowerSeries, SeriesRule, TailBound};
use specframe::operators::{adjoint, make_operator, truncate_columns, OperatorModel, OperatorSpec, SequenceRule};
use specframe::{Error, C64};

const TOL: f64 = 1e-8;
const PROBE_TOL: f64 = 1e-2;
const DECAY: f64 = 1e-4;
const N_LIST: [usize; 4] = [250, 500, 1000, 2000];

fn shift() -> OperatorModel {
    make_operator(&OperatorSpec::RightShift).unwrap()
}

fn poly(coeffs: &[f64]) -> Polynomial {
    Polynomial::from_real(coeffs).unwrap()
}

fn synthesis(f: &Polynomial) -> OperatorModel {
    functional_calculus(&f.clone().into(), &shift()).unwrap()
}

/// Polynomial whose roots avoid the annulus `0.7 < |z| < 2.5`.
fn separated_polynomial(r: &mut rand_chacha::ChaCha8Rng) -> Polynomial {
    let degree = r.gen_range(1..=5);
    let roots: Vec<C64> = (0..degree)
        .map(|_| {
            let modulus = if r.gen_bool(0.5) { r.gen_range(0.0..=0.7) } else { r.gen_range(2.5..=4.0) };
            C64::from_polar(modulus, r.gen_range(0.0..2.0 * PI))
        })
        .collect();
    let lead = C64::from_polar(r.gen_range(0.5..=1.5), r.gen_range(0.0..2.0 * PI));
    from_roots(lead, &roots)
}

fn circle_extremes(f: &Polynomial, samples: usize) -> (f64, f64) {
    (0..samples)
        .map(|k| f.eval(C64::from_polar(1.0, 2.0 * PI * k as f64 / samples as f64)).norm_sqr())
        .fold((f64::INFINITY, 0.0), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

#[test]
fn example_one_verdicts() {
    let v = criterion_verdict(&shift(), &poly(&[1.0, 1.0]).into(), TOL).unwrap();
    assert_eq!((v.verdict, v.zero_location), (Verdict::NotFrame, ZeroLocation::Boundary));
    assert!((v.witness.unwrap() - c(-1.0)).norm() < 1e-8);
    assert!(v.criterion_applicable);

    for k in 2..=8 {
        let v = criterion_verdict(&shift(), &poly(&vec![1.0; k + 1]).into(), TOL).unwrap();
        assert_eq!(v.verdict, Verdict::NotFrame, "k = {k}");
    }

    let v = criterion_verdict(&shift(), &poly(&[-2.0, 1.0]).into(), TOL).unwrap();
    assert_eq!((v.verdict, v.zero_location), (Verdict::RieszBasis, ZeroLocation::Absent));
    assert_eq!(v.witness, None);

    let v = criterion_verdict(&shift(), &poly(&[-0.5, 1.0]).into(), TOL).unwrap();
    assert_eq!((v.verdict, v.zero_location), (Verdict::NotFrame, ZeroLocation::Interior));
}

#[test]
fn uncertified_operators_are_inconclusive() {
    let l = make_operator(&OperatorSpec::LeftShift).unwrap();
    let v = criterion_verdict(&l, &poly(&[-2.0, 1.0]).into(), TOL).unwrap();
    assert_eq!(v.verdict, Verdict::Inconclusive);
    assert!(!v.criterion_applicable);
    assert_eq!(v.zero_location, ZeroLocation::NotApplicable);
    assert!(criterion_verdict(&shift(), &poly(&[1.0, 1.0]).into(), 0.0).is_err());
}

#[test]
fn verdicts_agree_with_oracle_roots() {
    let mut r = rng(606);
    for case in 0..50 {
        let f = common::random_polynomial(&mut r, 6, 1.0);
        let v = criterion_verdict(&shift(), &f.clone().into(), TOL).unwrap();
        let m = common::oracle_roots(f.coeffs()).iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
        if (m - 1.0).abs() <= 1e-6 {
            // Inside the declared band both answers count as a match.
            assert_ne!(v.verdict, Verdict::Inconclusive, "case {case}");
        } else {
            let expect = if m < 1.0 { Verdict::NotFrame } else { Verdict::RieszBasis };
            assert_eq!(v.verdict, expect, "case {case}: oracle min modulus {m}");
        }
    }
}

#[test]
fn diagonal_verdicts() {
    let d = make_operator(&OperatorSpec::Diagonal(SequenceRule::reciprocal(c(1.0), 1.0).unwrap())).unwrap();
    // f(z) = z - 1/4 vanishes at lambda_3.
    let v = criterion_verdict(&d, &poly(&[-0.25, 1.0]).into(), TOL).unwrap();
    assert_eq!(v.verdict, Verdict::NotFrame);
    assert_eq!(v.witness, Some(c(0.25)));
    // f(z) = z vanishes only at the accumulation point 0.
    let v = criterion_verdict(&d, &poly(&[0.0, 1.0]).into(), TOL).unwrap();
    assert_eq!(v.verdict, Verdict::NotFrame);
    // f(z) = z + 1 stays away from zero on [0, 1].
    let v = criterion_verdict(&d, &poly(&[1.0, 1.0]).into(), TOL).unwrap();
    assert_eq!(v.verdict, Verdict::RieszBasis);
}

#[test]
fn series_verdict_and_bounds() {
    let exp = HoloFunction::PowerSeries(
        PowerSeries::new(SeriesRule::Exp { rate: c(1.0) }, f64::INFINITY, TailBound::Factorial { rate: 1.0 }).unwrap(),
    );
    let v = criterion_verdict(&shift(), &exp, TOL).unwrap();
    assert_eq!(v.verdict, Verdict::RieszBasis);
    assert!(v.notes.contains("degree 15"));
    let model = functional_calculus(&exp, &shift()).unwrap();
    let b = estimate_frame_bounds(&model, &N_LIST).unwrap();
    assert!(b.series_slack.unwrap() <= 1e-12);
    assert!((b.final_lower() - (-2f64).exp()).abs() < 1e-6);
    assert!((b.final_upper() - 2f64.exp()).abs() < 1e-4);
    assert_eq!(cross_validate(&v, &b, DECAY, PROBE_TOL).unwrap(), CrossValidation::Consistent);
}

#[test]
fn one_plus_shift_lower_bound_closed_form() {
    let v = synthesis(&poly(&[1.0, 1.0]));
    let b = estimate_frame_bounds(&v, &[2, 50, 500, 2000]).unwrap();
    assert!((b.rows[0].lower - (3.0 - 5f64.sqrt()) / 2.0).abs() < 1e-10);
    for row in &b.rows[1..] {
        let n = row.n as f64;
        let closed = 4.0 * (n * PI / (2.0 * n + 1.0)).cos().powi(2);
        assert!((row.lower - closed).abs() <= 1e-8, "N = {}: {} vs {}", row.n, row.lower, closed);
    }
    assert!(b.lower_nonincreasing && b.upper_nondecreasing);
    assert!(b.final_lower() < 7e-7 && b.final_lower() > 6e-7);
    assert!(b.final_upper() <= 4.0 && b.final_upper() > 3.99);

    // Dense oracle on the sections themselves.
    for n in [50, 500] {
        let lower = sigma_min(&truncate_columns(&adjoint(&v), n).unwrap()).powi(2);
        let upper = sigma_max(&truncate_columns(&v, n).unwrap()).powi(2);
        let row = estimate_frame_bounds(&v, &[n]).unwrap().rows[0];
        assert!((row.lower - lower).abs() < 1e-9 && (row.upper - upper).abs() < 1e-9);
    }

    let verdict = criterion_verdict(&shift(), &poly(&[1.0, 1.0]).into(), TOL).unwrap();
    assert_eq!(cross_validate(&verdict, &b, DECAY, PROBE_TOL).unwrap(), CrossValidation::Consistent);
}

#[test]
fn shift_minus_two_bounds() {
    let v = synthesis(&poly(&[-2.0, 1.0]));
    let b = estimate_frame_bounds(&v, &N_LIST).unwrap();
    assert!((b.final_lower() - 1.0).abs() < 1e-5);
    assert!((b.final_upper() - 9.0).abs() < 1e-4);
    let row = estimate_frame_bounds(&v, &[500]).unwrap().rows[0];
    assert!((row.lower - sigma_min(&truncate_columns(&adjoint(&v), 500).unwrap()).powi(2)).abs() < 1e-9);
    assert!((row.upper - sigma_max(&truncate_columns(&v, 500).unwrap()).powi(2)).abs() < 1e-9);
    let verdict = criterion_verdict(&shift(), &poly(&[-2.0, 1.0]).into(), TOL).unwrap();
    assert_eq!(cross_validate(&verdict, &b, DECAY, PROBE_TOL).unwrap(), CrossValidation::Consistent);
}

#[test]
fn constant_functions_give_tight_frames() {
    for (re, im) in [(1.0, 0.0), (2.0, 0.0), (3.0, 4.0), (0.0, -1.0)] {
        let f = Polynomial::new(vec![C64::new(re, im)]).unwrap();
        let b = estimate_frame_bounds(&synthesis(&f), &[1, 7, 100, 1000]).unwrap();
        let expect = re * re + im * im;
        for row in &b.rows {
            assert_eq!((row.lower, row.upper), (expect, expect), "c = {re} + {im}i");
        }
    }
    let mut r = rng(5);
    for _ in 0..20 {
        let a = common::random_complex(&mut r, 3.0);
        let f = Polynomial::new(vec![a]).unwrap();
        let b = estimate_frame_bounds(&synthesis(&f), &[10, 100]).unwrap();
        for row in &b.rows {
            assert!((row.lower - a.norm_sqr()).abs() <= 1e-14 * a.norm_sqr());
            assert!((row.upper - a.norm_sqr()).abs() <= 1e-14 * a.norm_sqr());
        }
    }
    let identity = estimate_frame_bounds(&shift(), &[10, 100]).unwrap();
    assert!(identity.rows.iter().all(|r| (r.lower - 0.0).abs() < 1e-12 && (r.upper - 1.0).abs() < 1e-12));
}

#[test]
fn zero_function_is_not_a_frame() {
    let v = criterion_verdict(&shift(), &Polynomial::zero().into(), TOL).unwrap();
    assert_eq!(v.verdict, Verdict::NotFrame);
    let b = estimate_frame_bounds(&synthesis(&Polynomial::zero()), &[5, 10, 20]).unwrap();
    assert!(b.rows.iter().all(|r| r.lower == 0.0 && r.upper == 0.0));
    assert_eq!(cross_validate(&v, &b, DECAY, PROBE_TOL).unwrap(), CrossValidation::Consistent);
}

#[test]
fn cross_validation_reports_tension_and_mismatch() {
    let one_plus = synthesis(&poly(&[1.0, 1.0]));
    let b = estimate_frame_bounds(&one_plus, &N_LIST).unwrap();
    let mut v = criterion_verdict(&shift(), &poly(&[1.0, 1.0]).into(), TOL).unwrap();
    v.verdict = Verdict::RieszBasis;
    assert!(matches!(cross_validate(&v, &b, DECAY, PROBE_TOL).unwrap(), CrossValidation::Tension(_)));

    let other = estimate_frame_bounds(&synthesis(&poly(&[-2.0, 1.0])), &N_LIST).unwrap();
    assert!(matches!(cross_validate(&v, &other, DECAY, PROBE_TOL), Err(Error::ProvenanceMismatch { .. })));
    assert_eq!(v.provenance, provenance(&one_plus));
    assert_ne!(provenance(&one_plus), provenance(&shift()));
}

#[test]
fn surjectivity_probe_examples() {
    let s = shift();
    let l = adjoint(&s);
    // S* is onto: its adjoint S is an isometry.
    assert_eq!(surjectivity_probe(&l, &N_LIST, PROBE_TOL).unwrap().outcome, Surjectivity::BoundedBelowEvidence);
    let p = surjectivity_probe(&s, &N_LIST, PROBE_TOL).unwrap();
    assert_eq!(p.outcome, Surjectivity::Decaying);
    assert!(p.values.iter().all(|&x| x < 1e-12));
    let riesz = synthesis(&poly(&[-2.0, 1.0]));
    assert_eq!(
        surjectivity_probe(&riesz, &N_LIST, PROBE_TOL).unwrap().outcome,
        Surjectivity::BoundedBelowEvidence
    );
    assert!(surjectivity_probe(&riesz, &[10, 10], PROBE_TOL).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn verdicts_are_corroborated_by_sections(seed in any::<u64>()) {
        let mut r = rng(seed);
        let f = separated_polynomial(&mut r);
        let verdict = criterion_verdict(&shift(), &f.clone().into(), TOL).unwrap();
        let v = synthesis(&f);
        let b = estimate_frame_bounds(&v, &N_LIST).unwrap();
        prop_assert_eq!(cross_validate(&verdict, &b, DECAY, PROBE_TOL).unwrap(), CrossValidation::Consistent);
        let probe = surjectivity_probe(&v, &N_LIST, PROBE_TOL).unwrap();
        let expect = match verdict.verdict {
            Verdict::RieszBasis => Surjectivity::BoundedBelowEvidence,
            _ => Surjectivity::Decaying,
        };
        prop_assert_eq!(probe.outcome, expect);
    }

    #[test]
    fn riesz_bounds_bracket_circle_extremes(seed in any::<u64>()) {
        let mut r = rng(seed);
        let f = loop {
            let f = separated_polynomial(&mut r);
            if criterion_verdict(&shift(), &f.clone().into(), TOL).unwrap().verdict == Verdict::RieszBasis {
                break f;
            }
        };
        let (lo, hi) = circle_extremes(&f, 1 << 16);
        let b = estimate_frame_bounds(&synthesis(&f), &N_LIST).unwrap();
        // Sections overestimate A and underestimate B; the sampled extremes
        // are accurate to second order in the mesh width.
        let slack = 1e-6 * hi;
        for row in &b.rows {
            prop_assert!(row.lower >= lo - slack, "{} < {}", row.lower, lo);
            prop_assert!(row.upper <= hi + slack, "{} > {}", row.upper, hi);
        }
        prop_assert!(b.final_lower() <= lo * (1.0 + PROBE_TOL));
        prop_assert!(b.final_upper() >= hi * (1.0 - PROBE_TOL));
    }
}
