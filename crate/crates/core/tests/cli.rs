//! End-to-end runs of the `lcaudit` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use lcaudit::report::parse_machine;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_lcaudit"));
    c.env_remove("LCAUDIT_TOL");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn gen(dir: &Path, name: &str, extra: &[&str]) -> PathBuf {
    let mut args = vec!["gen", name];
    args.extend_from_slice(extra);
    let out = run(&args);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let path = dir.join(format!("{name}.json"));
    std::fs::write(&path, &out.stdout).unwrap();
    path
}

#[test]
fn singlet_audit_fails_on_the_outcome_clause_only() {
    let dir = tempfile::tempdir().unwrap();
    let file = gen(dir.path(), "singlet", &[]);
    let out = run(&["audit", file.to_str().unwrap(), "--format", "machine"]);
    assert_eq!(out.status.code(), Some(1));
    let r = parse_machine(&stdout(&out)).unwrap();
    assert!(!r.check("statistical-sufficiency").unwrap().passed);
    assert!(r.check("functional-sufficiency").unwrap().passed);
    assert!(!r.check("local-causality").unwrap().passed);
}

#[test]
fn deterministic_local_audit_passes() {
    let dir = tempfile::tempdir().unwrap();
    let file = gen(dir.path(), "deterministic-local", &[]);
    let out = run(&[
        "audit",
        file.to_str().unwrap(),
        "--checks",
        "all",
        "--format",
        "machine",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = parse_machine(&stdout(&out)).unwrap();
    assert!(
        r.checks.iter().all(|c| c.max_deviation == Some(0.0)),
        "{r:?}"
    );
}

#[test]
fn pr_box_chsh_is_four() {
    let dir = tempfile::tempdir().unwrap();
    let file = gen(dir.path(), "pr-box", &[]);
    let out = run(&["audit", file.to_str().unwrap(), "--checks", "chsh"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("= 4.000000000"), "{}", stdout(&out));
}

#[test]
fn machine_report_reproduces_text_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let file = gen(dir.path(), "random", &["--seed", "42"]);
    let f = file.to_str().unwrap();
    let machine = run(&["audit", f, "--checks", "all", "--format", "machine"]);
    let text = run(&["audit", f, "--checks", "all"]);
    assert_eq!(machine.status.code(), text.status.code());
    let r = parse_machine(&stdout(&machine)).unwrap();
    for c in &r.checks {
        let line = stdout(&text)
            .lines()
            .find(|l| l.split_whitespace().next() == Some(c.id.as_str()))
            .unwrap()
            .to_string();
        assert!(line.contains(&c.verdict), "{line}");
    }
    assert_eq!(machine.status.code(), Some(r.exit_code()));
}

#[test]
fn seeded_generation_is_reproducible() {
    let a = run(&["gen", "random", "--seed", "7"]);
    let b = run(&["gen", "random", "--seed", "7"]);
    assert_eq!(a.stdout, b.stdout);
    assert!(String::from_utf8_lossy(&a.stderr).contains("seed: 7"));
}

#[test]
fn tolerance_from_environment_is_echoed() {
    let dir = tempfile::tempdir().unwrap();
    let file = gen(dir.path(), "singlet", &[]);
    let out = bin()
        .args(["chsh", file.to_str().unwrap()])
        .env("LCAUDIT_TOL", "1e-6")
        .output()
        .unwrap();
    assert!(
        stdout(&out).contains("(LCAUDIT_TOL=1e-6)"),
        "{}",
        stdout(&out)
    );
}

#[test]
fn lhv_and_phenomenology_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let noise = gen(dir.path(), "white-noise", &[]);
    let out = run(&["lhv", noise.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let out = run(&["audit", noise.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let out = run(&[
        "audit",
        noise.to_str().unwrap(),
        "--checks",
        "local-causality",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sufficiency_subcommand() {
    let dir = tempfile::tempdir().unwrap();
    let fam = gen(
        dir.path(),
        "bernoulli",
        &["--params", "0.2,0.6", "--trials", "4"],
    );
    let out = run(&["suff", fam.to_str().unwrap(), "--statistic", "sum"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("5 classes"));
    let out = run(&["suff", fam.to_str().unwrap(), "--statistic", "constant"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn usage_and_parse_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ \"kind\": ").unwrap();
    let out = run(&["audit", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("syntax error at line"));

    let file = gen(dir.path(), "singlet", &[]);
    assert_eq!(
        run(&["audit", file.to_str().unwrap(), "--checks", "nope"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn setting_dependent_model_fails_only_free_variables() {
    let dir = tempfile::tempdir().unwrap();
    let file = gen(dir.path(), "setting-dependent", &[]);
    let out = run(&["audit", file.to_str().unwrap(), "--format", "machine"]);
    let r = parse_machine(&stdout(&out)).unwrap();
    let fv = r.check("free-variables").unwrap();
    assert!(!fv.passed);
    assert_eq!(fv.max_deviation, Some(1.0));
    assert!(r.check("local-causality").unwrap().passed);
    assert!(r.check("factorizability").unwrap().passed);
}
