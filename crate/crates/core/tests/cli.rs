use std::path::Path;
use std::process::{Command, Output};

fn f2norm(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_f2norm"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn construct_norm_lowerbound_checkcert() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let o = f2norm(
        &[
            "construct",
            "--family",
            "geometric4",
            "--k",
            "2",
            "--n",
            "4",
            "--out",
            "a.set",
        ],
        p,
    );
    assert_eq!(o.status.code(), Some(0), "{o:?}");
    assert!(p.join("a.set.witness.json").exists());
    let witness: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(p.join("a.set.witness.json")).unwrap())
            .unwrap();
    assert_eq!(witness["exponents"], serde_json::json!([2, 4]));

    let o = f2norm(&["norm", "a.set"], p);
    assert_eq!(o.status.code(), Some(0));
    let line = stdout(&o);
    // Density 5/16 as a disjoint union of a 1/4-coset and a 1/16-coset.
    assert!(line.starts_with("7/2^2 = 7/4"), "{line}");

    let o = f2norm(
        &[
            "lowerbound",
            "a.set",
            "--max-order",
            "15",
            "--out",
            "a.cert",
        ],
        p,
    );
    assert_eq!(o.status.code(), Some(0), "{o:?}");
    let o = f2norm(&["check-cert", "a.set", "a.cert"], p);
    assert_eq!(o.status.code(), Some(0), "{o:?}");
    assert!(stdout(&o).starts_with("certificate ok"));
}

#[test]
fn certificate_is_byte_identical_and_ordered() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    std::fs::write(p.join("s.set"), "n=4\n0\n1\n2\n5\n9\ne\n").unwrap();
    let a = f2norm(&["lowerbound", "s.set", "--max-order", "16"], p);
    let b = f2norm(&["lowerbound", "s.set", "--max-order", "16"], p);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    let keys = [
        "\"version\"",
        "\"n\"",
        "\"max_order\"",
        "\"alpha\"",
        "\"a_norm\"",
        "\"trace\"",
        "\"final_bound\"",
        "\"termination\"",
        "\"hypothesis\"",
        "\"tool_commit\"",
    ];
    let pos: Vec<usize> = keys.iter().map(|k| text.find(k).unwrap()).collect();
    assert!(pos.windows(2).all(|w| w[0] < w[1]), "{pos:?}");
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["alpha"], serde_json::json!({"num": 3, "exp": 3}));
}

#[test]
fn tampered_certificate_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    std::fs::write(p.join("s.set"), "n=3\nhexbits=17\n").unwrap();
    let o = f2norm(
        &["lowerbound", "s.set", "--max-order", "8", "--out", "c.json"],
        p,
    );
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(p.join("c.json")).unwrap();
    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    v["final_bound"] = serde_json::json!({"num": 9, "exp": 0});
    std::fs::write(p.join("c.json"), v.to_string()).unwrap();
    assert_eq!(
        f2norm(&["check-cert", "s.set", "c.json"], p).status.code(),
        Some(1)
    );
}

#[test]
fn profile_row() {
    let dir = tempfile::tempdir().unwrap();
    let o = f2norm(
        &["profile", "--alpha", "5/2^4", "--max-dim", "3"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0));
    assert!(
        stdout(&o)
            .lines()
            .any(|l| l.starts_with("d=1 product=15/64")),
        "{}",
        stdout(&o)
    );
}

#[test]
fn verify_techlem_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = f2norm(
        &[
            "verify", "--suite", "techlem", "--trials", "10000", "--seed", "1",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{o:?}");
    assert_eq!(stdout(&o), "techlem: 10000 trials, 0 violations (seed 1)\n");
}

#[test]
fn verify_output_independent_of_jobs() {
    let dir = tempfile::tempdir().unwrap();
    let a = f2norm(
        &[
            "verify", "--suite", "all", "--trials", "50", "--seed", "7", "--jobs", "1",
        ],
        dir.path(),
    );
    let b = f2norm(
        &[
            "verify", "--suite", "all", "--trials", "50", "--seed", "7", "--jobs", "4",
        ],
        dir.path(),
    );
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn explore_appends_ledger_rows() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    for method in ["exhaustive", "anneal"] {
        let o = f2norm(
            &[
                "explore", "--n", "2", "--size", "3", "--method", method, "--seed", "3",
                "--ledger", "l.csv",
            ],
            p,
        );
        assert_eq!(o.status.code(), Some(0), "{o:?}");
    }
    let ledger = std::fs::read_to_string(p.join("l.csv")).unwrap();
    let lines: Vec<&str> = ledger.lines().collect();
    assert_eq!(
        lines[0],
        "n,size,method,seed,best_norm_num,best_norm_exp,set_hex,evaluations"
    );
    assert_eq!(lines.len(), 3);
    for row in &lines[1..] {
        let cols: Vec<&str> = row.split(',').collect();
        assert_eq!((cols[4], cols[5]), ("3", "1"), "{row}");
    }
}

#[test]
fn config_overrides_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    std::fs::write(p.join("c.toml"), "exhaustive_budget = 2\n").unwrap();
    let o = f2norm(
        &["--config", "c.toml", "explore", "--n", "3", "--size", "3"],
        p,
    );
    assert_eq!(o.status.code(), Some(3));
    std::fs::write(p.join("bad.toml"), "unknown = 1\n").unwrap();
    let o = f2norm(
        &[
            "--config",
            "bad.toml",
            "profile",
            "--alpha",
            "1/2",
            "--max-dim",
            "1",
        ],
        p,
    );
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn exit_codes_for_bad_input_and_caps() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    std::fs::write(p.join("dup.set"), "n=2\n1\n1\n").unwrap();
    std::fs::write(p.join("big.set"), "n=20\n").unwrap();
    let cases: [(&[&str], i32); 7] = [
        (&["norm", "missing.set"], 2),
        (&["norm", "dup.set"], 2),
        (&["norm", "big.set"], 3),
        (&["profile", "--alpha", "1/3", "--max-dim", "2"], 2),
        (
            &["construct", "--family", "nope", "--k", "1", "--n", "2"],
            2,
        ),
        (&["explore", "--n", "6", "--size", "30"], 3),
        (&["frobnicate"], 2),
    ];
    for (args, code) in cases {
        assert_eq!(f2norm(args, p).status.code(), Some(code), "{args:?}");
    }
}
