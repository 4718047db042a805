use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn corpus(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("corpus")
        .join(format!("{name}.json"))
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spacelab"))
        .args(args)
        .env_remove("SPACELAB_BUDGET")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr_json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stderr).expect("stderr is JSON")
}

#[test]
fn count_prints_the_number() {
    let spec = corpus("multiples2");
    let o = run(&[
        "lang",
        "count",
        "--spec",
        spec.to_str().unwrap(),
        "--n",
        "4",
        "--mode",
        "naive",
    ]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "7\n");
}

#[test]
fn delta_witness_round_trips_through_verify() {
    let dir = tempfile::tempdir().unwrap();
    let spec = corpus("squares");
    let o = run(&[
        "detect",
        "delta",
        "--spec",
        spec.to_str().unwrap(),
        "--depth",
        "3",
        "--bound",
        "100",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let w: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(w["S"], serde_json::json!([1, 10, 26]));
    let witness = dir.path().join("witness.json");
    assert!(dir.path().join("manifest.json").exists());
    let v = run(&[
        "detect",
        "delta",
        "--spec",
        spec.to_str().unwrap(),
        "--bound",
        "100",
        "--verify",
        witness.to_str().unwrap(),
    ]);
    assert!(v.status.success());
    assert_eq!(stdout(&v), "verified\n");

    // a tampered certificate fails
    std::fs::write(
        &witness,
        r#"{"kind":"delta_chain","S":[1,10,27],"verified":true,"depth":3,"bound":100}"#,
    )
    .unwrap();
    let v = run(&[
        "detect",
        "delta",
        "--spec",
        spec.to_str().unwrap(),
        "--bound",
        "100",
        "--verify",
        witness.to_str().unwrap(),
    ]);
    assert_eq!(v.status.code(), Some(1));
    assert_eq!(stdout(&v), "not verified\n");
}

#[test]
fn ip_and_intersect_witnesses_verify() {
    let dir = tempfile::tempdir().unwrap();
    let w = dir.path().join("w.json");
    let o = run(&[
        "detect",
        "ip",
        "--spec",
        "corpus:multiples2",
        "--depth",
        "2",
        "--bound",
        "10",
    ]);
    assert!(o.status.success());
    assert!(stdout(&o).contains(r#""A":[2,4]"#));
    std::fs::write(&w, stdout(&o)).unwrap();
    let v = run(&[
        "detect",
        "ip",
        "--spec",
        "corpus:multiples2",
        "--bound",
        "10",
        "--verify",
        w.to_str().unwrap(),
    ]);
    assert_eq!(stdout(&v), "verified\n");

    let o = run(&[
        "detect",
        "intersect",
        "--spec",
        "corpus:squares",
        "--against",
        "corpus:multiples2",
        "--horizon",
        "50",
    ]);
    assert!(stdout(&o).contains(r#""value":4"#));
    std::fs::write(&w, stdout(&o)).unwrap();
    let v = run(&[
        "detect",
        "intersect",
        "--spec",
        "corpus:squares",
        "--against",
        "corpus:multiples2",
        "--horizon",
        "50",
        "--verify",
        w.to_str().unwrap(),
    ]);
    assert_eq!(stdout(&v), "verified\n");
}

#[test]
fn periodic_point_is_emitted() {
    let spec = corpus("multiples3");
    let o = run(&[
        "dyn",
        "periodic",
        "--spec",
        spec.to_str().unwrap(),
        "--k",
        "3",
        "--horizon",
        "30",
    ]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["admissible"], true);
    assert_eq!(v["point"], "100".repeat(10));
}

#[test]
fn unknown_flags_are_usage_errors() {
    let o = run(&[
        "lang",
        "count",
        "--spec",
        "corpus:full",
        "--n",
        "3",
        "--frobnicate",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr_json(&o)["error"], "usage");
}

#[test]
fn validation_errors_exit_2() {
    let o = run(&[
        "lang",
        "count",
        "--spec",
        r#"{"type":"explicit","elems":[3,2]}"#,
        "--n",
        "3",
    ]);
    assert_eq!(o.status.code(), Some(2));
    let e = stderr_json(&o);
    assert_eq!(e["error"], "validation");
    assert!(e["message"].as_str().unwrap().contains("$.elems"));

    let o = run(&["lang", "greedy", "--spec", "corpus:full"]);
    assert_eq!(o.status.code(), Some(2));

    let o = run(&["exp", "run", "no-such-experiment"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr_json(&o)["error"], "unknown_experiment");
}

#[test]
fn budget_exhaustion_exits_3() {
    let o = run(&[
        "lang",
        "count",
        "--spec",
        "corpus:not-squares",
        "--n",
        "24",
        "--budget",
        "10",
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(stderr_json(&o)["error"], "budget_exhausted");

    let o = Command::new(env!("CARGO_BIN_EXE_spacelab"))
        .args(["lang", "count", "--spec", "corpus:not-squares", "--n", "24"])
        .env("SPACELAB_BUDGET", "10")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn manifest_records_budget_and_horizon_sources() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_spacelab"))
        .args([
            "lang",
            "entropy",
            "--spec",
            "corpus:multiples2",
            "--n-grid",
            "4,8",
            "--out",
        ])
        .arg(dir.path())
        .env("SPACELAB_BUDGET", "123456")
        .output()
        .unwrap();
    assert!(o.status.success());
    let m: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("manifest.json")).unwrap())
            .unwrap();
    assert_eq!(m["budget"], 123456);
    assert_eq!(m["budget_source"], "env");
    assert_eq!(m["params"]["horizon"], 8);
    assert_eq!(m["params"]["horizon_source"], "derived");
    assert_eq!(m["version"], env!("CARGO_PKG_VERSION"));
    let digest = spacelab::corpus::member("multiples2")
        .unwrap()
        .spec
        .digest();
    assert_eq!(m["params"]["spec_digest"], digest);
    let csv = std::fs::read_to_string(dir.path().join("entropy.csv")).unwrap();
    assert_eq!(csv, stdout(&o));
    assert!(csv.starts_with("n,c_n,h_n,omega_n,omega_over_n\n4,7,"));
}

#[test]
fn identical_invocations_give_identical_files() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let o = run(&[
            "dyn",
            "fstat",
            "--spec",
            "corpus:not-multiples3",
            "--horizon",
            "80",
            "--x",
            "greedy",
            "--y",
            "random",
            "--seed",
            "7",
            "--l",
            "2",
            "--n-grid",
            "10,20,40",
            "--plot",
            "--out",
            d.path().to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    for f in ["fstat.csv", "fstat.svg"] {
        assert_eq!(
            std::fs::read(a.path().join(f)).unwrap(),
            std::fs::read(b.path().join(f)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn plot_requires_out() {
    let o = run(&[
        "lang",
        "entropy",
        "--spec",
        "corpus:full",
        "--n-grid",
        "4",
        "--plot",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn remaining_subcommands_run() {
    for args in [
        &[
            "pset",
            "density",
            "--spec",
            "corpus:squares",
            "--horizon",
            "200",
            "--windows",
            "50",
        ][..],
        &[
            "detect",
            "ipip",
            "--spec",
            "corpus:multiples3",
            "--depth",
            "2",
            "--bound",
            "20",
        ],
        &[
            "detect",
            "syndetic",
            "--spec",
            "corpus:squares",
            "--horizon",
            "100",
        ],
        &[
            "detect",
            "thick",
            "--spec",
            "corpus:not-squares",
            "--horizon",
            "100",
        ],
        &[
            "lang",
            "maxones",
            "--spec",
            "corpus:not-multiples3",
            "--n",
            "12",
        ],
        &[
            "lang",
            "greedy",
            "--spec",
            "corpus:not-multiples3",
            "--horizon",
            "12",
        ],
        &[
            "lang",
            "transitive",
            "--spec",
            "corpus:diffset-fs-1-4-16-64",
            "--word-len",
            "2",
            "--gap",
            "10",
            "--horizon",
            "100",
        ],
        &[
            "dyn",
            "proximal",
            "--spec",
            "corpus:not-multiples2",
            "--horizon",
            "64",
            "--x",
            "greedy",
            "--y",
            "zero",
            "--block",
            "8",
        ],
        &[
            "exp",
            "run",
            "delta-kills-density",
            "--params",
            r#"{"k":2,"n_max":10}"#,
        ],
    ] {
        let o = run(args);
        assert!(
            o.status.success(),
            "{args:?}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
    }
    let o = run(&[
        "detect",
        "thick",
        "--spec",
        "corpus:not-squares",
        "--horizon",
        "100",
    ]);
    assert!(stdout(&o).contains("\"value\": 18"));
    let o = run(&[
        "lang",
        "greedy",
        "--spec",
        "corpus:not-multiples3",
        "--horizon",
        "12",
    ]);
    assert_eq!(stdout(&o), "111000000000\n");
}
