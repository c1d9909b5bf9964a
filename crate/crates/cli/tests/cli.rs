use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_skewfep"))
}

fn scenario(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write_tmp(dir: &tempfile::TempDir, text: &str) -> String {
    let p = dir.path().join("s.scn");
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

#[test]
fn lists_builtins() {
    let o = run(&["run", "--list-builtin"]);
    assert!(o.status.success());
    let out = stdout(&o);
    for name in ["q8", "inner_twist_counterexample", "instance_matrix", "center", "round_trips", "cyclic_factor_twist"] {
        assert!(out.lines().any(|l| l.starts_with(name)), "{name} missing from\n{out}");
    }
}

#[test]
fn q8_file_reports_not_split_and_weak_solution() {
    let o = run(&["run", scenario("q8.scn").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("  split: false"));
    assert!(out.contains("  weak_solution: true"));
    assert!(out.contains("summary: pass=8 fail=0"));
}

#[test]
fn counterexample_file_reports_orders() {
    let o = run(&["run", scenario("inner_twist_counterexample.scn").to_str().unwrap(), "--no-timing"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    for line in [
        "  ord_sigma: 2",
        "  ord_tau: 2",
        "  sigma_tilde_identity: true",
        "  tau_tilde_identity: false",
        "  eq_produit: false",
        "  status: hypothesis-failed",
    ] {
        assert!(out.contains(line), "missing `{line}`");
    }
    assert!(!out.contains("time_ms"));
}

#[test]
fn parse_errors_exit_2_with_position() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_tmp(&dir, "[fields]\nq2 = quadratic 2\nbroken line\n");
    let o = run(&["run", &p]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));
}

#[test]
fn unresolved_reference_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_tmp(&dir, "[algebras]\nH = quaternion Q -1 -1\n[checks]\nanisotropy H nowhere\n");
    let o = run(&["run", &p]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unresolved reference `nowhere` at line 4"));
    let p = write_tmp(&dir, "[checks]\nno_such_op\n");
    assert_eq!(run(&["run", &p]).status.code(), Some(2));
}

#[test]
fn failed_expectation_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_tmp(
        &dir,
        "[fields]\nq2 = quadratic 2\n[algebras]\nH = quaternion Q -1 -1\n[checks]\nanisotropy H q2 expect.verdict=isotropic\n",
    );
    let o = run(&["run", &p]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("mismatch: verdict expected isotropic, observed anisotropic-certified"));
}

#[test]
fn setup_failure_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_tmp(&dir, "[fields]\nqi = quadratic -1\n[algebras]\nH = quaternion Q -1 -1\n[extensions]\nE = galois H qi\n");
    let o = run(&["run", &p]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("setup_error: line 6"));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["run"]).status.code(), Some(2));
    assert_eq!(run(&["run", "--builtin", "nope"]).status.code(), Some(2));
    assert_eq!(run(&["run", "--parallel", "0", "--builtin", "q8"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn parallel_runs_agree_and_report_file_is_written() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.txt");
    let serial = run(&["run", "--builtin", "round_trips", "--no-timing"]);
    let par = run(&[
        "run",
        "--builtin",
        "round_trips",
        "--no-timing",
        "--parallel",
        "4",
        "--report",
        report.to_str().unwrap(),
    ]);
    assert_eq!(serial.status.code(), Some(0));
    assert_eq!(par.status.code(), Some(0));
    assert!(stdout(&par).is_empty());
    let a = stdout(&serial).replace("parallel=1", "");
    let b = std::fs::read_to_string(&report).unwrap().replace("parallel=4", "");
    assert_eq!(a, b);
}
