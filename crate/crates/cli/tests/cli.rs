use std::f64::consts::PI;
use std::process::Command as Process;

use proptest::prelude::*;
use specframe_cli::report::{Command, VerdictKind, CSV_HEADER};
use specframe_cli::scenario::Verbosity;
use specframe_cli::{parse_scenario, run, run_scenario, Report, SHIPPED_SCENARIOS};

fn scenario(doc: &str) -> specframe_cli::Scenario {
    parse_scenario(doc).unwrap_or_else(|e| panic!("{e}"))
}

fn check(doc: &str) -> Report {
    run_scenario(&scenario(doc))
}

#[test]
fn pipeline_examples() {
    let r = check("operator = \"right_shift\"\nfunction = [1, 1]\n");
    let v = r.verdict.as_ref().unwrap();
    assert_eq!(v.verdict, VerdictKind::NotFrame);
    assert_eq!(v.zero_location, "boundary");
    assert_eq!(r.exit_code(), 0);

    let r = check("operator = \"right_shift\"\nfunction = [-2, 1]\n");
    assert_eq!(r.verdict.as_ref().unwrap().verdict, VerdictKind::RieszBasis);
    assert!(r.cross_validation.as_ref().unwrap().consistent);
    assert_eq!(r.surjectivity.as_ref().unwrap().outcome, "bounded_below_evidence");

    let r = check("operator = \"right_shift\"\nfunction = [1]\n");
    assert_eq!(r.verdict.as_ref().unwrap().verdict, VerdictKind::RieszBasis);
    for row in &r.bounds.as_ref().unwrap().rows {
        assert_eq!((row.lower, row.upper), (1.0, 1.0));
    }
}

#[test]
fn uncertified_operator_is_inconclusive() {
    let r = check("operator = \"left_shift\"\nfunction = [-2, 1]\n");
    let v = r.verdict.as_ref().unwrap();
    assert_eq!(v.verdict, VerdictKind::Inconclusive);
    assert!(!v.criterion_applicable);
    assert_eq!(v.zero_location, "n/a");
    assert_eq!(r.exit_code(), 2);
    // The probe finds the reason: sigma_ap(S) is only the circle.
    assert_eq!(r.probe.as_ref().unwrap().outcome, "violation_found");
}

#[test]
fn stage_errors_are_captured() {
    let doc = r#"
        operator = "right_shift"
        [function]
        kind = "series"
        rule = "geometric"
        ratio = 1
        tail = { kind = "geometric", ratio = 1 }
    "#;
    let r = check(doc);
    assert_eq!(r.exit_code(), 1);
    assert!(r.errors.iter().any(|e| e.stage == "functional_calculus"));
    assert!(r.to_text(Verbosity::Normal).starts_with("ERROR"));
    // Stages that do not depend on f(T) still ran.
    assert!(r.probe.is_some());
}

#[test]
fn json_round_trips_and_is_deterministic() {
    let docs = [
        "operator = \"right_shift\"\nfunction = [1, 1]\n[analysis]\nN_list = [10, 20, 40]\n",
        "operator = \"left_shift\"\nfunction = [-2, 1]\n[analysis]\nN_list = [10, 20, 40]\n",
        "function = [[0.5, -1], 1]\n[operator]\nkind = \"diagonal\"\ntail = \"reciprocal\"\n[analysis]\nN_list = [5, 50]\n",
        "operator = \"right_shift\"\n[function]\nkind = \"series\"\nrule = \"exp\"\ntail = { kind = \"factorial\", rate = 1 }\n[analysis]\nN_list = [8, 16]\n",
    ];
    for doc in docs {
        let s = scenario(doc);
        for cmd in [Command::Check, Command::Probe, Command::Bounds] {
            let a = run(&s, cmd);
            let json = a.to_json();
            assert_eq!(Report::from_json(&json).unwrap(), a);
            assert_eq!(run(&s, cmd).to_json(), json, "not deterministic");
            // The echoed scenario reproduces the report.
            let echoed = parse_scenario(&a.scenario).unwrap();
            assert_eq!(run(&echoed, cmd).to_json(), json);
        }
    }
}

#[test]
fn timings_are_opt_in() {
    let r = check("operator = \"right_shift\"\nfunction = [1, 1]\n[analysis]\nN_list = [4, 8]\n");
    assert!(r.timings.is_none());
    let r = check("operator = \"right_shift\"\nfunction = [1, 1]\n[analysis]\nN_list = [4, 8]\n[outputs]\ntimings = true\n");
    let stages: Vec<&str> = r.timings.as_ref().unwrap().iter().map(|t| t.stage.as_str()).collect();
    assert_eq!(
        stages,
        [
            "make_operator",
            "functional_calculus",
            "criterion_verdict",
            "estimate_frame_bounds",
            "surjectivity_probe",
            "cross_validate",
            "probe_ap_equals_spectrum"
        ]
    );
}

#[test]
fn text_headlines() {
    let r = check("operator = \"right_shift\"\nfunction = [1, 1]\n[analysis]\nN_list = [10, 20]\n");
    assert!(r.to_text(Verbosity::Normal).lines().next().unwrap().contains("NOT A FRAME"));
    assert_eq!(r.to_text(Verbosity::Quiet).lines().count(), 1);

    // A root just outside the circle: the verdict stands, but small sections
    // have not stabilized yet.
    let r = check("operator = \"right_shift\"\nfunction = [-1.001, 1]\n[analysis]\nN_list = [10, 20, 40]\n");
    assert_eq!(r.verdict.as_ref().unwrap().verdict, VerdictKind::RieszBasis);
    let text = r.to_text(Verbosity::Normal);
    assert!(text.starts_with("RIESZ BASIS"));
    assert!(text.contains("CROSS-VALIDATION TENSION"));
    assert_eq!(r.exit_code(), 0);
}

fn csv_rows(r: &Report) -> Vec<Vec<String>> {
    let csv = r.to_csv().unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some(CSV_HEADER));
    lines.map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn csv_examples() {
    let r = check("operator = \"right_shift\"\nfunction = [1, 1]\n[analysis]\nN_list = [50, 500, 2000]\n");
    let rows = csv_rows(&r);
    assert_eq!(rows.len(), 3);
    for row in &rows {
        let n: f64 = row[0].parse().unwrap();
        let lower: f64 = row[1].parse().unwrap();
        assert!((lower - 4.0 * (n * PI / (2.0 * n + 1.0)).cos().powi(2)).abs() < 1e-8);
    }
    let lowers: Vec<f64> = rows.iter().map(|r| r[1].parse().unwrap()).collect();
    let uppers: Vec<f64> = rows.iter().map(|r| r[2].parse().unwrap()).collect();
    assert!(lowers.windows(2).all(|w| w[1] <= w[0]));
    assert!(uppers.windows(2).all(|w| w[1] >= w[0]));

    let r = check("operator = \"right_shift\"\nfunction = [1]\n[analysis]\nN_list = [1, 10, 100]\n");
    for row in csv_rows(&r) {
        assert_eq!((row[1].as_str(), row[2].as_str()), ("1.0", "1.0"));
    }

    let r = check("operator = \"right_shift\"\nfunction = [-2, 1]\n");
    let last = csv_rows(&r).pop().unwrap();
    let (lower, upper): (f64, f64) = (last[1].parse().unwrap(), last[2].parse().unwrap());
    assert!((lower - 1.0).abs() < 1e-5 && (upper - 9.0).abs() < 1e-4);
}

#[test]
fn shipped_scenarios_parse_and_deliver() {
    for (name, doc) in SHIPPED_SCENARIOS {
        let s = scenario(doc);
        assert_eq!(s.name.as_deref(), Some(name));
        let r = run_scenario(&s);
        let expect = if name.starts_with("riesz") { VerdictKind::RieszBasis } else { VerdictKind::NotFrame };
        assert_eq!(r.verdict.as_ref().unwrap().verdict, expect, "{name}");
        assert_eq!(r.exit_code(), 0, "{name}");
        assert!(r.cross_validation.as_ref().unwrap().consistent, "{name}");
    }
}

#[test]
fn every_malformed_field_gets_exactly_one_error() {
    let base = "operator = \"right_shift\"\nfunction = [1, 1]\n";
    let cases = [
        ("[analysis]\nN_list = [100, 50]\n", "analysis.N_list"),
        ("[analysis]\nN_list = []\n", "analysis.N_list"),
        ("[analysis]\nN_list = [0, 5]\n", "analysis.N_list"),
        ("[analysis]\ntol = 0\n", "analysis.tol"),
        ("[analysis]\nprobe_tol = \"x\"\n", "analysis.probe_tol"),
        ("[analysis]\ndecay_threshold = -1e-4\n", "analysis.decay_threshold"),
        ("[analysis]\ngrid_size = 1.5\n", "analysis.grid_size"),
        ("[analysis]\nN_lists = [1]\n", "analysis.N_lists"),
        ("[outputs]\ntimings = 1\n", "outputs.timings"),
        ("[outputs]\ncolour = true\n", "outputs.colour"),
        ("seed = 3\n", "seed"),
    ];
    for (extra, key) in cases {
        // Top-level keys must precede the sections.
        let doc = if extra.starts_with('[') { format!("{base}{extra}") } else { format!("{extra}{base}") };
        let errors = parse_scenario(&doc).unwrap_err().0;
        assert_eq!(errors.len(), 1, "{doc}: {errors:?}");
        assert_eq!(errors[0].key, key);
    }

    let section_cases = [
        ("[operator]\nkind = \"volterra\"\n", "function = [1]\n", "operator.kind"),
        ("[operator]\nkind = \"diagonal\"\ntail = \"periodic\"\ncycle = []\n", "function = [1]\n", "operator.cycle"),
        ("[operator]\nkind = \"diagonal\"\ntail = \"geometric\"\nstart = 1\nratio = 2\n", "function = [1]\n", "operator.tail"),
        ("[operator]\nkind = \"diagonal\"\n", "function = [1]\n", "operator.tail"),
        ("operator = \"right_shift\"\n", "[function]\ncoefficients = [1, [1, 2, 3]]\n", "function.coefficients"),
        ("operator = \"right_shift\"\n", "[function]\nkind = \"series\"\nrule = \"exp\"\n", "function.tail"),
        ("operator = \"right_shift\"\n", "[function]\nkind = \"series\"\nrule = \"sin\"\ntail = { kind = \"factorial\", rate = 1 }\n", "function.rule"),
        ("operator = \"right_shift\"\n", "[function]\nkind = \"series\"\nrule = \"exp\"\ntail = { kind = \"factorial\" }\n", "function.tail"),
        ("operator = \"right_shift\"\n", "[function]\nkind = \"series\"\nrule = \"exp\"\nrate = 2\ntail = { kind = \"factorial\", rate = 1 }\n", "function.rule"),
        ("operator = \"right_shift\"\n", "", "function"),
        ("", "function = [1]\n", "operator"),
    ];
    for (op, f, key) in section_cases {
        let doc = if op.starts_with('[') { format!("{f}{op}") } else { format!("{op}{f}") };
        let errors = parse_scenario(&doc).unwrap_err().0;
        assert_eq!(errors.len(), 1, "{doc}: {errors:?}");
        assert_eq!(errors[0].key, key, "{doc}");
    }
    assert_eq!(parse_scenario("operator = ").unwrap_err().0[0].key, "document");
}

/// Random documents assembled from plausible and implausible pieces.
fn document() -> impl Strategy<Value = String> {
    let value = prop_oneof![
        Just("1".to_string()),
        Just("-1".to_string()),
        Just("0".to_string()),
        Just("1e-8".to_string()),
        Just("inf".to_string()),
        Just("nan".to_string()),
        Just("\"right_shift\"".to_string()),
        Just("\"diagonal\"".to_string()),
        Just("\"series\"".to_string()),
        Just("\"exp\"".to_string()),
        Just("\"periodic\"".to_string()),
        Just("[1, 1]".to_string()),
        Just("[[0, 1], 2]".to_string()),
        Just("[100, 50]".to_string()),
        Just("[]".to_string()),
        Just("true".to_string()),
        Just("{ kind = \"factorial\", rate = 1 }".to_string()),
        Just("{ kind = \"geometric\", ratio = 2 }".to_string()),
    ];
    let key = prop_oneof![
        Just("kind"),
        Just("coefficients"),
        Just("offsets"),
        Just("tail"),
        Just("cycle"),
        Just("rule"),
        Just("radius"),
        Just("N_list"),
        Just("tol"),
        Just("grid_size"),
        Just("adjoint"),
        Just("verbosity"),
        Just("bogus"),
    ];
    let section = prop_oneof![Just("operator"), Just("function"), Just("analysis"), Just("outputs"), Just("extra")];
    let entries = prop::collection::vec((key, value), 0..6);
    prop::collection::vec((section, entries), 0..5).prop_map(|sections| {
        let mut doc = String::new();
        for (name, entries) in sections {
            doc.push_str(&format!("[{name}]\n"));
            for (k, v) in entries {
                doc.push_str(&format!("{k} = {v}\n"));
            }
        }
        doc
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn arbitrary_text_never_panics(text in "\\PC{0,200}") {
        let _ = parse_scenario(&text);
    }

    #[test]
    fn structured_documents_never_panic(doc in document()) {
        match parse_scenario(&doc) {
            Ok(s) => {
                // Valid documents survive the canonical round trip.
                prop_assert_eq!(parse_scenario(&s.to_toml()).unwrap(), s);
            }
            Err(e) => {
                prop_assert!(!e.0.is_empty());
                prop_assert!(e.0.iter().all(|x| !x.key.is_empty() && !x.message.is_empty()));
            }
        }
    }
}

fn bin() -> Process {
    Process::new(env!("CARGO_BIN_EXE_specframe"))
}

#[test]
fn binary_exit_codes_and_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, text: &str| {
        let p = dir.path().join(name);
        std::fs::write(&p, text).unwrap();
        p
    };

    let csv = dir.path().join("sweep.csv");
    let out = bin()
        .args(["check", "--scenario", "example:example1_k1", "--max-n", "500", "--csv"])
        .arg(&csv)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("NOT A FRAME"));
    let csv = std::fs::read_to_string(csv).unwrap();
    assert_eq!(csv.lines().count(), 3);
    assert!(csv.starts_with(CSV_HEADER));

    let left = write("left.toml", "operator = \"left_shift\"\nfunction = [1, 1]\n[analysis]\nN_list = [10, 20]\n");
    let out = bin().args(["check", "--format", "json", "--scenario"]).arg(&left).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let report = Report::from_json(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(report.verdict.unwrap().verdict, VerdictKind::Inconclusive);

    let bad = write("bad.toml", "operator = \"right_shift\"\n[analysis]\nN_list = [100, 50]\n");
    let out = bin().args(["check", "--scenario"]).arg(&bad).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("N_list not increasing") && err.contains("function: missing required field"));

    let out = bin().args(["check", "--scenario", "/nonexistent/x.toml"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));

    let out = bin().args(["probe", "--scenario", "example:example1_k1", "--max-n", "2000"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("PROBE CONSISTENT"));

    let out = bin()
        .args(["bounds", "--scenario", "example:riesz_z_minus_2", "--format", "json", "--tol", "1e-6"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let report = Report::from_json(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert!(report.verdict.is_none() && report.probe.is_none());
    assert_eq!(report.tolerances.tol, 1e-6);
    assert_eq!(report.bounds.unwrap().rows.len(), 4);

    let out = bin().args(["examples"]).output().unwrap();
    assert_eq!(String::from_utf8_lossy(&out.stdout).lines().count(), SHIPPED_SCENARIOS.len());
    let out = bin().args(["examples", "riesz_z_minus_2"]).output().unwrap();
    assert_eq!(String::from_utf8_lossy(&out.stdout), SHIPPED_SCENARIOS[3].1);
    assert_eq!(bin().args(["examples", "nope"]).status().unwrap().code(), Some(1));

    // A report path in the scenario receives the JSON report.
    let target = dir.path().join("report.json");
    let doc = format!(
        "operator = \"right_shift\"\nfunction = [1]\n[analysis]\nN_list = [3, 6]\n[outputs]\nreport = {:?}\n",
        target.display().to_string()
    );
    let with_report = write("with_report.toml", &doc);
    assert_eq!(bin().args(["check", "--scenario"]).arg(&with_report).status().unwrap().code(), Some(0));
    let saved = Report::from_json(&std::fs::read_to_string(&target).unwrap()).unwrap();
    assert_eq!(saved.verdict.unwrap().verdict, VerdictKind::RieszBasis);
}
