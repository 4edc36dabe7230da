//! End-to-end tests against the compiled binary.

use std::process::{Command, Output};

fn radixlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_radixlab"))
        .args(args)
        .env_remove("RADIXLAB_SEED")
        .output()
        .expect("binary runs")
}

fn stdout_of(args: &[&str]) -> String {
    let out = radixlab(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

const NU1: &str = r#"{"type":"atomic","atoms":[{"s":"(0)","mass":"1/3"},{"s":"(1)","mass":"2/3"}]}"#;

#[test]
fn build_matches_the_worked_example() {
    assert_eq!(stdout_of(&["build", "--strings", "0(0),01(1),1(1)"]), "00,01,1\n");
    assert_eq!(
        stdout_of(&["build", "--strings", "0(0),01(1),1(1)", "--format", "json"]),
        "{\"leaves\":[\"00\",\"01\",\"1\"]}\n"
    );
}

#[test]
fn law_values_are_exact_rationals() {
    assert_eq!(stdout_of(&["laws", "marginal", "--tree", "00,01,1"]), "3/16\n");
    assert_eq!(
        stdout_of(&["laws", "forward", "--from", "0,1", "--to", "00,01,1"]),
        "1/4\n"
    );
    assert_eq!(
        stdout_of(&["laws", "backward", "--from", "0,1", "--to", "00,01,1"]),
        "2/3\n"
    );
    assert_eq!(
        stdout_of(&["laws", "kernel", "--from", "0,1", "--to", "00,01,1"]),
        "4/3\n"
    );
    assert_eq!(
        stdout_of(&["laws", "green", "--from", "e", "--to", "00,01,1"]),
        "3/16\n"
    );
    assert_eq!(
        stdout_of(&[
            "laws",
            "marginal",
            "--tree",
            "0,1",
            "--measure",
            r#"{"type":"bernoulli","p1":"1/3"}"#,
        ]),
        "4/9\n"
    );
}

#[test]
fn harmonic_reports_the_two_atom_quantities() {
    let json = stdout_of(&[
        "harmonic", "--measure", NU1, "--tree", "0,1", "--format", "json",
    ]);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["h"], "8/9");
    assert_eq!(v["eta"], "8/9");
    assert_eq!(v["theta"], "4/9");
    assert_eq!(v["theta_total"], "1");
    assert_eq!(v["diffuse"], false);
}

#[test]
fn enumerate_lists_all_shapes() {
    let out = stdout_of(&["enumerate", "--n", "2", "--depth-cap", "2"]);
    let mut lines: Vec<&str> = out.lines().collect();
    lines.sort_unstable();
    assert_eq!(lines, vec!["0,1", "00,01", "10,11"]);
}

#[test]
fn verify_small_scope_passes() {
    let out = radixlab(&[
        "verify",
        "--measure",
        r#"{"type":"bernoulli","p1":"1/3"}"#,
        "--n-max",
        "3",
        "--depth-max",
        "3",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("verification passed"), "{text}");
}

#[test]
fn counterexample_shows_identical_laws() {
    let out = stdout_of(&["counterexample", "--replicas", "0"]);
    assert_eq!(out.matches("5/9,4/9,8/9,1").count(), 4, "{out}");
}

#[test]
fn counterexample_monte_carlo_agrees() {
    let json = stdout_of(&[
        "counterexample", "--replicas", "4000", "--seed", "7", "--format", "json",
    ]);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    for m in v["measures"].as_array().unwrap() {
        assert_eq!(m["p_die_at_2"], "5/9");
        assert_eq!(m["p_pair_then_die"], "4/9");
        let mc = m["mc_die_at_2"].as_f64().unwrap();
        assert!((mc - 5.0 / 9.0).abs() < 0.03, "{mc}");
    }
}

#[test]
fn seeded_outputs_are_byte_identical() {
    let a = stdout_of(&["simulate", "--n", "12", "--replicas", "3", "--seed", "9"]);
    let b = stdout_of(&["simulate", "--n", "12", "--replicas", "3", "--seed", "9"]);
    let c = stdout_of(&["simulate", "--n", "12", "--replicas", "3", "--seed", "10"]);
    assert_eq!(a, b);
    assert_ne!(a, c);
    assert!(a.starts_with("replica,step,tree\n0,1,e\n"));
}

#[test]
fn thread_count_does_not_change_output() {
    let args = |threads: &'static str| {
        vec![
            "convergence", "--tree", "0,1", "--n", "64", "--replicas", "16", "--seed", "3",
            "--checkpoints", "64", "--threads", threads,
        ]
    };
    assert_eq!(stdout_of(&args("1")), stdout_of(&args("4")));
}

#[test]
fn env_seed_is_the_fallback() {
    let with_env = Command::new(env!("CARGO_BIN_EXE_radixlab"))
        .args(["simulate", "--n", "8", "--replicas", "1"])
        .env("RADIXLAB_SEED", "123")
        .output()
        .unwrap();
    let with_flag = stdout_of(&["simulate", "--n", "8", "--replicas", "1", "--seed", "123"]);
    assert_eq!(String::from_utf8(with_env.stdout).unwrap(), with_flag);
}

#[test]
fn killed_chain_rows_mark_the_cemetery() {
    let out = stdout_of(&[
        "killed", "--measure", NU1, "--replicas", "5", "--seed", "11",
    ]);
    // every replica of a purely atomic source dies: one cemetery row each
    assert_eq!(out.matches(",+").count(), 5, "{out}");
}

#[test]
fn bridge_paths_end_at_the_target() {
    let out = stdout_of(&["bridge", "--tree", "00,01,1", "--replicas", "4", "--seed", "2"]);
    assert_eq!(out.matches("\"00,01,1\"").count(), 4, "{out}");
}

#[test]
fn usage_errors_exit_one() {
    let out = radixlab(&["no-such-command"]);
    assert_eq!(out.status.code(), Some(1));
    let out = radixlab(&["laws", "marginal"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn domain_errors_exit_two() {
    // not a radix tree (missing sibling)
    let out = radixlab(&["laws", "marginal", "--tree", "00,1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
    // duplicate input strings
    let out = radixlab(&["build", "--strings", "0(0),00(0)"]);
    assert_eq!(out.status.code(), Some(2));
    // measure file that does not exist
    let out = radixlab(&["laws", "marginal", "--tree", "0,1", "--measure", "no-file.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn out_flag_writes_a_file() {
    let dir = std::env::temp_dir().join("radixlab-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("tree.txt");
    let out = radixlab(&[
        "build",
        "--strings",
        "0(0),01(1),1(1)",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), "00,01,1\n");
    std::fs::remove_file(&path).ok();
}

#[test]
fn recover_reports_match_exact_masses() {
    let json = stdout_of(&[
        "recover", "--n", "1000", "--replicas", "2", "--depth", "1", "--seed", "6",
        "--format", "json",
    ]);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    let estimates = v["estimates"].as_array().unwrap();
    assert_eq!(estimates.len(), 3); // root plus the two depth-1 cylinders
    for e in estimates {
        let diff = (e["estimate"].as_f64().unwrap() - e["exact"].as_f64().unwrap()).abs();
        assert!(diff < 0.05);
    }
}
