//! The scenario pipeline. Each stage runs only if the stages it depends on
//! succeeded; failures are recorded in the report instead of aborting.

use std::time::Instant;

use specframe::framecheck::{
    criterion_verdict, cross_validate, estimate_frame_bounds, surjectivity_probe, FrameBoundEstimates, FrameVerdict,
};
use specframe::holocalc::{functional_calculus, DEFAULT_SERIES_EPS};
use specframe::numkernel::KernelConfig;
use specframe::operators::{adjoint, make_operator, OperatorModel};
use specframe::spectral::{default_grid, probe_ap_equals_spectrum, SpectrumRegion};
use specframe::C64;

use crate::report::{
    BoundsBlock, Command, CrossValidationBlock, OperatorBlock, ProbeBlock, Report, StageError, SurjectivityBlock,
    Timing, Tolerances, VerdictBlock, TOOL,
};
use crate::scenario::Scenario;

struct Stages {
    errors: Vec<StageError>,
    timings: Vec<Timing>,
}

impl Stages {
    fn run<T>(&mut self, stage: &str, f: impl FnOnce() -> specframe::Result<T>) -> Option<T> {
        let start = Instant::now();
        let out = f();
        self.timings.push(Timing {
            stage: stage.into(),
            seconds: start.elapsed().as_secs_f64(),
        });
        match out {
            Ok(x) => Some(x),
            Err(e) => {
                self.errors.push(StageError {
                    stage: stage.into(),
                    message: e.to_string(),
                });
                None
            }
        }
    }
}

fn complex(z: C64) -> String {
    format!("{} {:+}i", z.re, z.im)
}

/// Short human-readable description of a spectrum region.
pub fn describe(region: &SpectrumRegion) -> String {
    match region {
        SpectrumRegion::ClosedDisk { center, radius } => format!("closed disk |z - ({})| <= {radius}", complex(*center)),
        SpectrumRegion::FiniteSet(points) => {
            let items: Vec<String> = points.iter().map(|p| complex(*p)).collect();
            format!("{{{}}}", items.join(", "))
        }
        SpectrumRegion::ClosureOfSequence(rule) => {
            let limits: Vec<String> = rule.accumulation_points().iter().map(|p| complex(*p)).collect();
            format!("closure of a sequence with limit points {{{}}}", limits.join(", "))
        }
        SpectrumRegion::Union(parts) => parts.iter().map(describe).collect::<Vec<_>>().join(" U "),
        SpectrumRegion::PolynomialImageOfDisk { map, center, radius } => format!(
            "image of the closed disk |z - ({})| <= {radius} under a degree {} polynomial",
            complex(*center),
            map.degree()
        ),
    }
}

fn build_operator(s: &Scenario) -> specframe::Result<OperatorModel> {
    let t = make_operator(&s.operator)?;
    Ok(if s.adjoint { adjoint(&t) } else { t })
}

/// Full `check` pipeline.
pub fn run_scenario(s: &Scenario) -> Report {
    run(s, Command::Check)
}

/// Run the stages a command needs, in the order
/// operator, f(T), verdict, bounds, surjectivity, cross-validation, probe.
pub fn run(s: &Scenario, command: Command) -> Report {
    let a = &s.analysis;
    let kernel = KernelConfig::default();
    let mut st = Stages {
        errors: Vec::new(),
        timings: Vec::new(),
    };
    let mut report = Report {
        tool: TOOL.into(),
        command,
        scenario: s.to_toml(),
        tolerances: Tolerances {
            tol: a.tol,
            probe_tol: a.probe_tol,
            decay_threshold: a.decay_threshold,
            kernel_tol: kernel.tol,
            kernel_max_iterations: kernel.max_iterations,
            series_eps: DEFAULT_SERIES_EPS,
            n_list: a.n_list.clone(),
            grid_size: a.grid_size,
        },
        operator: None,
        verdict: None,
        bounds: None,
        surjectivity: None,
        cross_validation: None,
        probe: None,
        errors: Vec::new(),
        timings: None,
    };

    if let Some(t) = st.run("make_operator", || build_operator(s)) {
        report.operator = Some(OperatorBlock::new(t.tags(), describe(t.spectrum())));

        if command != Command::Probe {
            let v = st.run("functional_calculus", || functional_calculus(&s.function, &t));
            let verdict: Option<FrameVerdict> = if command == Command::Check {
                st.run("criterion_verdict", || criterion_verdict(&t, &s.function, a.tol))
            } else {
                None
            };
            let bounds: Option<FrameBoundEstimates> =
                v.as_ref().and_then(|v| st.run("estimate_frame_bounds", || estimate_frame_bounds(v, &a.n_list)));
            if command == Command::Check {
                if let Some(v) = &v {
                    let p = st.run("surjectivity_probe", || surjectivity_probe(v, &a.n_list, a.probe_tol));
                    report.surjectivity = p.as_ref().map(SurjectivityBlock::from);
                }
                if let (Some(verdict), Some(bounds)) = (&verdict, &bounds) {
                    let c = st.run("cross_validate", || {
                        cross_validate(verdict, bounds, a.decay_threshold, a.probe_tol)
                    });
                    report.cross_validation = c.as_ref().map(CrossValidationBlock::from);
                }
            }
            report.verdict = verdict.as_ref().map(VerdictBlock::from);
            report.bounds = bounds.as_ref().map(BoundsBlock::from);
        }

        if command != Command::Bounds {
            let grid = default_grid(adjoint(&t).spectrum(), a.grid_size);
            let p = st.run("probe_ap_equals_spectrum", || {
                probe_ap_equals_spectrum(&t, &grid, &a.n_list, a.probe_tol)
            });
            report.probe = p.as_ref().map(ProbeBlock::from);
        }
    }

    report.errors = st.errors;
    if s.outputs.timings {
        report.timings = Some(st.timings);
    }
    report
}
