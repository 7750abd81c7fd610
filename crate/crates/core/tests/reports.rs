use lorentz_covers::report::scenario::{PuncturedParams, SphereParams};
use lorentz_covers::report::{emit_svg, run_scenario, Provenance, Report, Scenario, Target, SCHEMA_VERSION};
use lorentz_covers::Error;
use serde_json::{json, Value};

fn small_cone() -> Scenario {
    let mut s = Scenario::builtin("cone-cover-closure").unwrap();
    if let Target::Cone(c) = &mut s.target {
        c.samples = 200;
    }
    s
}

#[test]
fn reports_round_trip_and_reject_unknown_fields() {
    let r = run_scenario(&small_cone()).unwrap();
    assert!(r.passed());
    let text = r.to_json();
    assert_eq!(Report::from_json(&text).unwrap(), r);

    let mut v: Value = serde_json::from_str(&text).unwrap();
    v["extra"] = json!(1);
    assert!(Report::from_json(&v.to_string()).is_err());

    let mut v: Value = serde_json::from_str(&text).unwrap();
    v["schema_version"] = json!(SCHEMA_VERSION + 1);
    assert!(Report::from_json(&v.to_string()).is_err());
}

#[test]
fn every_verdict_has_a_provenance_and_decisions_stay_three_valued() {
    let r = run_scenario(&small_cone()).unwrap();
    let text = r.payload();
    let v: Value = serde_json::from_str(&text).unwrap();
    for verdict in v["verdicts"].as_array().unwrap() {
        assert!(["paper", "derived", "trivial"].contains(&verdict["provenance"].as_str().unwrap()));
    }
    assert_eq!(r.value("universal.causal_relation_closed"), Some(&json!("false")));
    assert_eq!(r.verdict("l0").unwrap().provenance, Provenance::Paper);
    assert!(!text.contains("wall_clock_ms"));
    assert!(r.to_json().contains("wall_clock_ms"));
}

#[test]
fn mismatched_expectations_fail_the_report() {
    let mut s = Scenario::new("sphere-check", Target::Sphere(SphereParams { grid: 3, ..SphereParams::default() }));
    s.expect.insert("inner_trapped".into(), json!(false));
    s.expect.insert("no_such_claim".into(), json!(1));
    let r = run_scenario(&s).unwrap();
    assert!(!r.passed());
    assert_eq!(r.expectations.iter().filter(|e| !e.ok).count(), 2);
    assert!(r.expectations.iter().any(|e| e.claim == "no_such_claim" && e.actual.is_none()));
}

#[test]
fn swapped_sphere_reverses_signs() {
    let s = Scenario::new("swapped", Target::Sphere(SphereParams { n: 3, radius: 2.0, grid: 4, swap: true, ..SphereParams::default() }));
    let r = run_scenario(&s).unwrap();
    assert_eq!(r.value("inner_trapped"), Some(&json!(false)));
    assert_eq!(r.value("k_plus_negative"), Some(&json!(false)));
    let err = r.value("max_error_vs_closed_form").unwrap().as_f64().unwrap();
    assert!(err < 1e-8, "{err}");
}

#[test]
fn punctured_diagram_marks_points_and_gap() {
    let params = PuncturedParams { base_samples: 0, k_max: 20, ..PuncturedParams::default() };
    let s = Scenario::new("fig", Target::Punctured(params));
    let r = run_scenario(&s).unwrap();
    let svg = emit_svg(&s, &r).unwrap();
    for needle in [">p</text>", ">q</text>", ">r</text>", ">r1</text>", "#f2c14e"] {
        assert!(svg.contains(needle), "missing {needle}");
    }
    // Every coordinate carries at most three decimals.
    let decimals = svg
        .split(|c: char| !(c.is_ascii_digit() || c == '.'))
        .filter_map(|tok| tok.split_once('.').map(|(_, d)| d.len()))
        .max()
        .unwrap_or(0);
    assert!(decimals <= 3);
}

#[test]
fn diagramless_targets_are_rejected() {
    let s = Scenario::builtin("criterion-lines").unwrap();
    let r = run_scenario(&s).unwrap();
    assert!(matches!(emit_svg(&s, &r), Err(Error::NoDiagram(_))));
}

#[test]
fn invalid_parameters_are_reported() {
    let s = Scenario::from_toml("name = \"bad\"\nseed = 1\n[target.cone]\nslope = -1.0\n");
    assert!(matches!(s, Err(Error::Scenario(_))));
    let s = Scenario::from_toml("name = \"bad\"\n[target.punctured]\np = [\"1\", \"0\"]\nbase_samples = 0\n").unwrap();
    // p above the axis is not a crossing pair.
    assert!(matches!(run_scenario(&s), Err(Error::UnsupportedShape(_))));
}
