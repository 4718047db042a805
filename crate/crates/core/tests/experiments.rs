use serde_json::json;
use spacelab::harness::{run_experiment, Verdict, EXPERIMENTS};
use spacelab::DEFAULT_BUDGET;

fn cell<'a>(
    report: &'a spacelab::harness::ExperimentReport,
    table: &str,
    row: usize,
    col: &str,
) -> &'a str {
    let t = report
        .observations
        .iter()
        .find(|t| t.name == table)
        .unwrap();
    &t.rows[row][t.column(col).unwrap()]
}

#[test]
fn every_default_experiment_is_consistent() {
    for id in EXPERIMENTS {
        let r = run_experiment(id, &serde_json::Value::Null, DEFAULT_BUDGET).unwrap();
        let failed: Vec<_> = r.failed_checks().collect();
        assert_eq!(
            r.verdict,
            Verdict::Consistent,
            "{id}: {failed:?} {:?}",
            r.notes
        );
        assert!(!r.checks.is_empty(), "{id} asserts nothing");
    }
}

#[test]
fn delta_kills_density_k3() {
    let r = run_experiment(
        "delta-kills-density",
        &json!({"k": 3, "n_max": 24}),
        DEFAULT_BUDGET,
    )
    .unwrap();
    assert_eq!(r.verdict, Verdict::Consistent);
    assert_eq!(cell(&r, "max_ones", 23, "omega_n"), "3");
}

#[test]
fn density_entropy_bound_at_multiples2_n20() {
    let r = run_experiment(
        "density-entropy-bound",
        &json!({"ks": [2], "n_min": 20, "n_max": 20, "include_corpus": false}),
        DEFAULT_BUDGET,
    )
    .unwrap();
    assert_eq!(r.verdict, Verdict::Consistent);
    assert_eq!(cell(&r, "bound", 0, "c_n"), "2047");
    assert_eq!(cell(&r, "bound", 0, "gamma"), "1/2");
    let h: f64 = cell(&r, "bound", 0, "h_n").parse().unwrap();
    assert!((h - 2047f64.log2() / 20.0).abs() < 1e-15);
}

#[test]
fn zero_entropy_proximal_not_multiples2() {
    let r = run_experiment(
        "zero-entropy-proximal",
        &json!({"members": ["not-multiples2"], "horizon": 256, "max_block": 32}),
        DEFAULT_BUDGET,
    )
    .unwrap();
    assert_eq!(r.verdict, Verdict::Consistent);
    assert!(r.observations[0].rows.iter().all(|row| row[5] == "true"));
}

#[test]
fn small_budget_gives_inconclusive_not_violation() {
    let r = run_experiment("entropy-iff-banach", &serde_json::Value::Null, 20).unwrap();
    assert_eq!(r.verdict, Verdict::Inconclusive);
}

#[test]
fn violations_are_reported() {
    // for not-5N the half rule needs more than n <= 12
    let r = run_experiment(
        "zero-density-zero-entropy",
        &json!({"k": 5, "n_max": 12}),
        DEFAULT_BUDGET,
    )
    .unwrap();
    assert_eq!(r.verdict, Verdict::Violation);
    assert_eq!(r.failed_checks().next().unwrap().name, "h_n decays");
}

#[test]
fn reports_are_deterministic() {
    for id in EXPERIMENTS {
        let a = run_experiment(id, &serde_json::Value::Null, DEFAULT_BUDGET).unwrap();
        let b = run_experiment(id, &serde_json::Value::Null, DEFAULT_BUDGET).unwrap();
        assert_eq!(a.to_json(), b.to_json());
    }
}

#[test]
fn non_transitive_case_has_defects() {
    let r = run_experiment(
        "transitive-needs-ipip",
        &serde_json::Value::Null,
        DEFAULT_BUDGET,
    )
    .unwrap();
    let t = r
        .observations
        .iter()
        .find(|t| t.name == "joinability")
        .unwrap();
    let row = t.rows.iter().find(|r| r[0] == "multiples3+{1,2}").unwrap();
    assert_ne!(row[2], row[3]);
    assert_eq!((row[4].as_str(), row[5].as_str()), ("10", "011"));
}
