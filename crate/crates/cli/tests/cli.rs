use std::process::{Command, Output};

fn kit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_walker-kit")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn bracket_table_and_jacobi() {
    let o = kit(&["brackets"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert_eq!(s.lines().filter(|l| l.starts_with("[X")).count(), 7);
    assert!(s.contains("PASS brackets/jacobi"));
}

#[test]
fn first_family_verifies_symbolically() {
    let o = kit(&["verify", "--entry", "eq25.family1", "--mode", "symbolic"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("PASS eq25.family1/solution/system"));
    assert!(s.contains("FLAG eq25.family1/solution/reducibility"));
    assert!(!s.contains("FAIL"));
}

#[test]
fn flat_metric_is_einstein() {
    let o = kit(&["einstein", "--a", "0", "--b", "0", "--c", "0"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("Ricci: identically zero"));
    assert!(s.contains("Einstein: yes"));
}

#[test]
fn non_solution_is_not_einstein() {
    let o = kit(&["einstein", "--a", "x^2*t", "--b", "0", "--c", "0"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("Einstein: no"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(kit(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(kit(&["verify", "--entry", "missing"]).status.code(), Some(2));
    assert_eq!(kit(&["adjoint", "--gen", "9", "--s", "1"]).status.code(), Some(2));
    assert_eq!(kit(&["einstein", "--a", "a_5", "--b", "0", "--c", "0"]).status.code(), Some(2));
    assert_eq!(kit(&["verify"]).status.code(), Some(2));
}

#[test]
fn full_verification_reports_the_failing_family() {
    let o = kit(&["verify", "--all", "--mode", "numeric"]);
    assert_eq!(o.status.code(), Some(1));
    let s = stdout(&o);
    let fails: Vec<&str> = s.lines().filter(|l| l.starts_with("FAIL")).collect();
    assert_eq!(fails.len(), 1, "{fails:?}");
    assert!(fails[0].starts_with("FAIL eq26.family3/solution/system"));
}

#[test]
fn json_report_is_reproducible() {
    let args = ["verify", "--entry", "table1.row2", "--seed", "7", "--report", "json"];
    let (a, b) = (kit(&args), kit(&args));
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["summary"]["failed"], 0);
}

#[test]
fn catalog_round_trips_through_the_command_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.jsonl");
    let p = path.to_str().unwrap();
    assert_eq!(kit(&["catalog", "--save", p]).status.code(), Some(0));
    let o = kit(&["--catalog", p, "verify", "--entry", "eq27"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("PASS eq27/solution/einstein"));
    std::fs::write(&path, "{\"id\":\"x\",\"provenance\":\"p\",\"invariants\":[\"a_5\"]}\n").unwrap();
    let bad = kit(&["--catalog", p, "catalog"]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("a_5"));
}

#[test]
fn metric_emission() {
    let o = kit(&["emit-metric", "--entry", "eq27", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["metric"][0][2], "1");
    let t = stdout(&kit(&["emit-metric", "--entry", "eq27"]));
    assert!(t.starts_with("ds^2 = 2(dx dy + dt dz)"));
}

#[test]
fn symmetries_and_probe() {
    let o = kit(&["symmetries", "--samples", "20"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("PASS symmetry/control"));
    let p = kit(&["equivalence-probe", "--samples", "40"]);
    assert_eq!(p.status.code(), Some(0));
    assert!(stdout(&p).contains("E_xy = +0.250000*eq1"));
}

#[test]
fn defect_and_reducibility_commands() {
    let d = stdout(&kit(&["defect", "--entry", "eq25.family3"]));
    assert!(d.contains("defect 1, declared 1"));
    let r = stdout(&kit(&["reducibility", "--entry", "eq25.family3"]));
    assert!(r.contains("(1 : 0)"));
    assert_eq!(kit(&["defect", "--entry", "onedim.1"]).status.code(), Some(2));
}

#[test]
fn adjoint_replay_passes() {
    let o = kit(&["adjoint", "--gen", "5", "--s", "-1/2", "--replay"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("(Plus)"));
    assert!(s.contains("PASS replay/f"));
}

#[test]
fn subalgebra_closure_from_the_command_line() {
    let o = kit(&["subalgebra", "--gens", "X3 + eps*X4; eps*X5 + X6 - 2*X7", "--check-closed"]);
    assert_eq!(o.status.code(), Some(0));
    let n = kit(&["subalgebra", "--gens", "X1; X4", "--check-closed"]);
    assert_eq!(n.status.code(), Some(1));
}
