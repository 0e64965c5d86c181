//! Report model and its three renderings: JSON (round-trips exactly), a
//! text summary with a verdict headline, and the frame-bound CSV.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use specframe::framecheck::{
    CrossValidation, FrameBoundEstimates, FrameVerdict, Surjectivity, SurjectivityProbe, Verdict, ZeroLocation,
};
use specframe::operators::ClassTags;
use specframe::spectral::{Membership, ProbeOutcome, ProbeReport, ProbeStatus};
use specframe::C64;

use crate::scenario::Verbosity;

pub const TOOL: &str = concat!("specframe ", env!("CARGO_PKG_VERSION"));

pub const CSV_HEADER: &str = "N,lower_bound_estimate,upper_bound_estimate,ap_distance_at_zero";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Check,
    Probe,
    Bounds,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool: String,
    pub command: Command,
    /// Canonical scenario document; running it again reproduces this report.
    pub scenario: String,
    pub tolerances: Tolerances,
    pub operator: Option<OperatorBlock>,
    pub verdict: Option<VerdictBlock>,
    pub bounds: Option<BoundsBlock>,
    pub surjectivity: Option<SurjectivityBlock>,
    pub cross_validation: Option<CrossValidationBlock>,
    pub probe: Option<ProbeBlock>,
    pub errors: Vec<StageError>,
    pub timings: Option<Vec<Timing>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub tol: f64,
    pub probe_tol: f64,
    pub decay_threshold: f64,
    pub kernel_tol: f64,
    pub kernel_max_iterations: usize,
    pub series_eps: f64,
    pub n_list: Vec<usize>,
    pub grid_size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorBlock {
    pub normal: bool,
    pub compact: bool,
    pub isometry: bool,
    pub ap_equals_adjoint_spectrum: bool,
    pub spectrum: String,
}

impl OperatorBlock {
    pub fn new(tags: ClassTags, spectrum: String) -> Self {
        Self {
            normal: tags.normal,
            compact: tags.compact,
            isometry: tags.isometry,
            ap_equals_adjoint_spectrum: tags.ap_equals_adjoint_spectrum,
            spectrum,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictKind {
    RieszBasis,
    NotFrame,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictBlock {
    pub verdict: VerdictKind,
    pub criterion_applicable: bool,
    /// `interior`, `boundary`, `absent` or `n/a`.
    pub zero_location: String,
    pub witness: Option<[f64; 2]>,
    pub tol: f64,
    pub notes: String,
    pub provenance: String,
}

fn pair(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

impl From<&FrameVerdict> for VerdictBlock {
    fn from(v: &FrameVerdict) -> Self {
        Self {
            verdict: match v.verdict {
                Verdict::RieszBasis => VerdictKind::RieszBasis,
                Verdict::NotFrame => VerdictKind::NotFrame,
                Verdict::Inconclusive => VerdictKind::Inconclusive,
            },
            criterion_applicable: v.criterion_applicable,
            zero_location: match v.zero_location {
                ZeroLocation::Interior => "interior",
                ZeroLocation::Boundary => "boundary",
                ZeroLocation::Absent => "absent",
                ZeroLocation::NotApplicable => "n/a",
            }
            .into(),
            witness: v.witness.map(pair),
            tol: v.tol,
            notes: v.notes.clone(),
            provenance: v.provenance.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundRow {
    pub n: usize,
    pub lower: f64,
    pub upper: f64,
    pub ap_distance_at_zero: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsBlock {
    pub rows: Vec<BoundRow>,
    pub lower_nonincreasing: bool,
    pub upper_nondecreasing: bool,
    pub series_slack: Option<f64>,
    pub provenance: String,
}

impl From<&FrameBoundEstimates> for BoundsBlock {
    fn from(b: &FrameBoundEstimates) -> Self {
        Self {
            rows: b
                .rows
                .iter()
                .map(|r| BoundRow {
                    n: r.n,
                    lower: r.lower,
                    upper: r.upper,
                    ap_distance_at_zero: r.ap_distance_at_zero,
                })
                .collect(),
            lower_nonincreasing: b.lower_nonincreasing,
            upper_nondecreasing: b.upper_nondecreasing,
            series_slack: b.series_slack,
            provenance: b.provenance.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurjectivityBlock {
    /// `bounded_below_evidence`, `decaying` or `inconclusive`.
    pub outcome: String,
    pub values: Vec<f64>,
}

impl From<&SurjectivityProbe> for SurjectivityBlock {
    fn from(p: &SurjectivityProbe) -> Self {
        Self {
            outcome: match p.outcome {
                Surjectivity::BoundedBelowEvidence => "bounded_below_evidence",
                Surjectivity::Decaying => "decaying",
                Surjectivity::Inconclusive => "inconclusive",
            }
            .into(),
            values: p.values.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossValidationBlock {
    pub consistent: bool,
    pub detail: Option<String>,
}

impl From<&CrossValidation> for CrossValidationBlock {
    fn from(c: &CrossValidation) -> Self {
        match c {
            CrossValidation::Consistent => Self { consistent: true, detail: None },
            CrossValidation::Tension(d) => Self { consistent: false, detail: Some(d.clone()) },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbePointOut {
    pub lambda: [f64; 2],
    pub membership: String,
    pub distances: Vec<f64>,
    pub status: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeBlock {
    /// `consistent`, `violation_found` or `inconclusive`.
    pub outcome: String,
    pub witness: Option<[f64; 2]>,
    pub distance: Option<f64>,
    pub n_list: Vec<usize>,
    pub tol: f64,
    pub points: Vec<ProbePointOut>,
}

impl From<&ProbeReport> for ProbeBlock {
    fn from(r: &ProbeReport) -> Self {
        let (outcome, witness, distance) = match &r.outcome {
            ProbeOutcome::Consistent => ("consistent", None, None),
            ProbeOutcome::ViolationFound { witness, distance } => {
                ("violation_found", Some(pair(*witness)), Some(*distance))
            }
            ProbeOutcome::Inconclusive => ("inconclusive", None, None),
        };
        Self {
            outcome: outcome.into(),
            witness,
            distance,
            n_list: r.n_list.clone(),
            tol: r.tol,
            points: r
                .points
                .iter()
                .map(|p| ProbePointOut {
                    lambda: pair(p.lambda),
                    membership: match p.membership {
                        Membership::Inside => "inside",
                        Membership::Boundary => "boundary",
                        Membership::Outside => "outside",
                    }
                    .into(),
                    distances: p.distances.clone(),
                    status: match p.status {
                        ProbeStatus::Consistent => "consistent",
                        ProbeStatus::Violation => "violation",
                        ProbeStatus::Inconclusive => "inconclusive",
                        ProbeStatus::Skipped => "skipped",
                    }
                    .into(),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageError {
    pub stage: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub stage: String,
    pub seconds: f64,
}

impl Report {
    /// 0 when the requested answer was delivered, 2 when it is inconclusive,
    /// 1 on any error.
    pub fn exit_code(&self) -> i32 {
        if !self.errors.is_empty() {
            return 1;
        }
        let inconclusive = match self.command {
            Command::Check => self.verdict.as_ref().is_some_and(|v| v.verdict == VerdictKind::Inconclusive),
            Command::Probe => self.probe.as_ref().is_some_and(|p| p.outcome == "inconclusive"),
            Command::Bounds => false,
        };
        if inconclusive {
            2
        } else {
            0
        }
    }

    pub fn to_json(&self) -> String {
        let value = serde_json::to_value(self).expect("report fields are plain data");
        let mut out = String::new();
        write_json(&value, 0, &mut out);
        out.push('\n');
        out
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    pub fn to_csv(&self) -> Option<String> {
        let bounds = self.bounds.as_ref()?;
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &bounds.rows {
            // `{:?}` is the shortest exact decimal, independent of locale.
            let _ = writeln!(out, "{},{:?},{:?},{:?}", r.n, r.lower, r.upper, r.ap_distance_at_zero);
        }
        Some(out)
    }

    pub fn to_text(&self, verbosity: Verbosity) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}", self.headline());
        if verbosity == Verbosity::Quiet {
            return out;
        }
        if let Some(c) = &self.cross_validation {
            if let Some(d) = &c.detail {
                let _ = writeln!(out, "CROSS-VALIDATION TENSION: {d}");
            }
        }
        for e in &self.errors {
            let _ = writeln!(out, "error in {}: {}", e.stage, e.message);
        }
        let _ = writeln!(out);
        if let Some(v) = &self.verdict {
            let _ = writeln!(out, "criterion applicable  {}", v.criterion_applicable);
            let _ = writeln!(out, "zero location         {}", v.zero_location);
            if let Some([re, im]) = v.witness {
                let _ = writeln!(out, "witness               {re:.12} {im:+.12}i");
            }
            let _ = writeln!(out, "notes                 {}", v.notes);
        }
        if let Some(o) = &self.operator {
            let _ = writeln!(out, "spectrum of T         {}", o.spectrum);
        }
        if let Some(b) = &self.bounds {
            let _ = writeln!(out);
            let _ = writeln!(out, "{:>8}  {:>22}  {:>22}  {:>22}", "N", "lower estimate", "upper estimate", "d_N(0) of V*");
            for r in &b.rows {
                let _ = writeln!(
                    out,
                    "{:>8}  {:>22.15e}  {:>22.15e}  {:>22.15e}",
                    r.n, r.lower, r.upper, r.ap_distance_at_zero
                );
            }
            if !(b.lower_nonincreasing && b.upper_nondecreasing) {
                let _ = writeln!(out, "warning: estimates are not monotone in N");
            }
            if let Some(s) = b.series_slack {
                let _ = writeln!(out, "series truncation slack {s:e}");
            }
        }
        if let Some(s) = &self.surjectivity {
            let _ = writeln!(out);
            let _ = writeln!(out, "surjectivity probe    {}", s.outcome);
        }
        if let Some(c) = &self.cross_validation {
            if c.consistent {
                let _ = writeln!(out, "cross-validation      consistent");
            }
        }
        if let Some(p) = &self.probe {
            let _ = writeln!(out);
            let skipped = p.points.iter().filter(|q| q.status == "skipped").count();
            let _ = writeln!(
                out,
                "sigma_ap(T*) = sigma(T*) probe: {} ({} points, {} skipped)",
                p.outcome,
                p.points.len(),
                skipped
            );
            if let (Some([re, im]), Some(d)) = (p.witness, p.distance) {
                let _ = writeln!(out, "  witness {re:.6} {im:+.6}i, d_N = {d:.12e}");
            }
            if verbosity == Verbosity::Verbose {
                for q in &p.points {
                    let last = q.distances.last().map_or(String::from("-"), |d| format!("{d:.6e}"));
                    let _ = writeln!(
                        out,
                        "  {:>10.6} {:>+10.6}i  {:<8}  {:<12}  {}",
                        q.lambda[0], q.lambda[1], q.membership, q.status, last
                    );
                }
            }
        }
        let t = &self.tolerances;
        let _ = writeln!(out);
        let _ = writeln!(
            out,
            "tol {:e}  probe_tol {:e}  decay_threshold {:e}  kernel_tol {:e}  N_list {:?}",
            t.tol, t.probe_tol, t.decay_threshold, t.kernel_tol, t.n_list
        );
        if let Some(ts) = &self.timings {
            for x in ts {
                let _ = writeln!(out, "  {:<24} {:.3} s", x.stage, x.seconds);
            }
        }
        let _ = writeln!(out, "{}", self.tool);
        out
    }

    fn headline(&self) -> String {
        if let Some(e) = self.errors.first() {
            return format!("ERROR ({}): {}", e.stage, e.message);
        }
        match self.command {
            Command::Check => match self.verdict.as_ref().map(|v| v.verdict) {
                Some(VerdictKind::NotFrame) => "NOT A FRAME: 0 lies in f(sigma(T)), so f(T) is not onto".into(),
                Some(VerdictKind::RieszBasis) => {
                    "RIESZ BASIS: f(T) is invertible, so (f(T) e_n) is a Riesz basis and a frame".into()
                }
                Some(VerdictKind::Inconclusive) | None => {
                    "INCONCLUSIVE: the criterion does not apply to this operator".into()
                }
            },
            Command::Probe => match self.probe.as_ref().map(|p| p.outcome.as_str()) {
                Some("consistent") => "PROBE CONSISTENT: no grid point separates sigma_ap(T*) from sigma(T*)".into(),
                Some("violation_found") => "PROBE VIOLATION: sigma_ap(T*) differs from sigma(T*)".into(),
                _ => "PROBE INCONCLUSIVE".into(),
            },
            Command::Bounds => "FRAME-BOUND SWEEP".into(),
        }
    }
}

/// Pretty JSON in which every float carries 17 significant digits.
fn write_json(v: &Value, indent: usize, out: &mut String) {
    let pad = |n: usize| "  ".repeat(n);
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => match (n.as_u64(), n.as_i64(), n.as_f64()) {
            (Some(u), _, _) => {
                let _ = write!(out, "{u}");
            }
            (_, Some(i), _) => {
                let _ = write!(out, "{i}");
            }
            (_, _, Some(x)) if x.is_finite() => {
                let _ = write!(out, "{x:.16e}");
            }
            _ => out.push_str("null"),
        },
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            let flat = items.iter().all(|x| !x.is_array() && !x.is_object());
            out.push('[');
            for (i, x) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                if flat {
                    if i > 0 {
                        out.push(' ');
                    }
                } else {
                    out.push('\n');
                    out.push_str(&pad(indent + 1));
                }
                write_json(x, indent + 1, out);
            }
            if !flat {
                out.push('\n');
                out.push_str(&pad(indent));
            }
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push('{');
            for (i, (k, x)) in map.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push('\n');
                out.push_str(&pad(indent + 1));
                out.push_str(&Value::String(k.clone()).to_string());
                out.push_str(": ");
                write_json(x, indent + 1, out);
            }
            out.push('\n');
            out.push_str(&pad(indent));
            out.push('}');
        }
    }
}
