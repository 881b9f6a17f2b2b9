use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hessian-sym"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8 output")
}

#[test]
fn g8_tables_follow_the_printed_layout() {
    let o = run(&["tables", "g8"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("| Z1 | 0 | 0 | 0 | -Z3 | -Z2 | 0 | 0 | Z1 |"), "{s}");
    assert!(s.contains("### Adjoint representation"));
    assert_eq!(s.lines().filter(|l| l.starts_with("| Z")).count(), 16);
}

#[test]
fn principal_table_is_zero_and_g12_json_has_twelve_labels() {
    let s = stdout(&run(&["tables", "principal"]));
    let rows: Vec<&str> = s.lines().filter(|l| l.starts_with("| V")).collect();
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r.matches("| 0 ").count() == 4));
    let v: serde_json::Value = serde_json::from_str(&stdout(&run(&["tables", "g12", "--format", "json"]))).unwrap();
    assert_eq!(v["commutators"]["labels"].as_array().unwrap().len(), 12);
    assert!(v.get("adjoint").is_none());
}

#[test]
fn unknown_algebra_is_an_error() {
    let o = run(&["tables", "sl2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown algebra"));
}

#[test]
fn reduce_examples() {
    assert!(stdout(&run(&["reduce", "0,0,0,0,0,0,1,0"])).contains("result: A1 = Z7"));
    assert!(stdout(&run(&["reduce", "0,1,0,0.5,0,0,1,0"])).contains("result: A6 = Z2 + 0.5*Z4 + Z7"));
    let v: serde_json::Value =
        serde_json::from_str(&stdout(&run(&["reduce", "1,0,0,0,0,0,1,0", "--format", "json"]))).unwrap();
    assert_eq!(v["pattern"]["id"], "A2");
    assert_eq!(run(&["reduce", "0,0,0,0,0,0,0,0"]).status.code(), Some(2));
}

#[test]
fn symmetry_checks_set_the_exit_status() {
    let o = run(&["check-symmetry", "--f", "exp(2*x)*(y^2+z^2+1)", "--vf", "1;0;0;u"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("verdict: pass"));
    assert!(run(&["check-symmetry", "--f", "0", "--vf", "0;0;0;x"]).status.success());
    let o = run(&["check-symmetry", "--f", "1", "--vf", "x;0;0;0"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("witness"));
    let o = run(&["check-symmetry", "--f", "exp(x", "--vf", "1;0;0;0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_reports_flags_without_failing() {
    let o = run(&["verify", "commutators"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("67 pass, 0 flagged, 0 fail"));
    let o = run(&["verify", "classification", "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["status"], "flagged");
    let flagged: Vec<&str> = v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["status"] == "flagged")
        .map(|c| c["id"].as_str().unwrap())
        .collect();
    assert_eq!(flagged, ["A10(a6=0,b2!=0)", "A11(a7=b3=0,g5!=0)", "A12(a8=b4=0,g6!=0)"]);
}

#[test]
fn verify_json_is_deterministic() {
    let args = ["verify", "optimal", "--seed", "42", "--format", "json"];
    let (a, b) = (run(&args), run(&args));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).contains("10000/10000 reduced"));
    assert!(!stdout(&a).contains("wall_time"));
    assert!(stdout(&run(&["verify", "invariants", "--timings"])).contains("wall time"));
}

#[test]
fn tight_tolerance_makes_verify_fail() {
    let o = run(&["verify", "determining", "--tol", "1e-300"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(run(&["verify", "nope"]).status.code(), Some(2));
}

#[test]
fn transform_examples() {
    let o = run(&["transform", "14", "--t", "0.3", "--u", "x^2+y^2+z^2"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("u~(x, y, z) = 0.5488116361*x^2 + 0.5488116361*y^2 + 0.5488116361*z^2"), "{s}");
    let s = stdout(&run(&["transform", "1", "--t", "1", "--fixture", "1,1,1,1"]));
    assert!(s.contains("u~(x, y, z) = 0.5*x^2 + 0.5*y^2 + 0.5*z^2 + 1"), "{s}");
    assert!(s.contains("S2[u](0) = 3.000000000000, S2[u~](g.0) = 3.000000000000"), "{s}");
    let o = run(&["transform", "6", "--param", "g=2", "--t", "0.5", "--fixture", "1.5,-0.5,2,0.5", "--sin-omega"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("t -> e^t - 1"));
    assert_eq!(run(&["transform", "16", "--t", "1", "--u", "x"]).status.code(), Some(2));
}

#[test]
fn invariants_command() {
    let o = run(&["invariants", "A3", "--param", "g=2"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).matches("ProvedZero").count(), 3);
    let o = run(&["invariants", "A1"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("no invariant f"));
    assert_eq!(run(&["invariants", "A3", "--invariant", "f"]).status.code(), Some(1));
}

#[test]
fn out_flag_writes_a_file() {
    let path = std::env::temp_dir().join(format!("hessian-sym-{}.json", std::process::id()));
    let o = run(&["tables", "principal", "--format", "json", "--out", path.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["algebra"], "principal");
    std::fs::remove_file(path).unwrap();
}
