use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn tfacpp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tfacpp"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Small binding instance: 3 months, yearly cap below three monthly caps.
fn small_instance(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("inst.json");
    let o = tfacpp(&[
        "generate", "--seed", "4", "--stations", "3", "--legs-per-month", "8", "--months", "3", "--out", s(&path),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let mut v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    for fam in v["fleet_families"].as_array_mut().unwrap() {
        fam["yearly_cap_per_crew"] = serde_json::json!(220.0);
    }
    fs::write(&path, serde_json::to_string_pretty(&v).unwrap()).unwrap();
    path
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn csv_rows(path: &Path) -> Vec<csv::StringRecord> {
    csv::Reader::from_path(path).unwrap().records().map(|r| r.unwrap()).collect()
}

#[test]
fn generate_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        assert_eq!(code(&tfacpp(&["generate", "--seed", "7", "--stations", "4", "--out", s(p)])), 0);
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(code(&tfacpp(&["generate", "--seed", "7"])), 2);
    let dir = tempfile::tempdir().unwrap();
    let inst = small_instance(dir.path());
    let o = tfacpp(&["solve", "--instance", s(&inst), "--mode", "bogus", "--out", s(dir.path())]);
    assert_eq!(code(&o), 2);
    assert_eq!(code(&tfacpp(&["frobnicate"])), 2);
}

#[test]
fn invalid_instance_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.json");
    // a single station has no legs
    assert_eq!(code(&tfacpp(&["generate", "--stations", "1", "--out", s(&out)])), 4);
    fs::write(&out, r#"{"months":["M1"],"stations":[],"fleet_types":[],"fleet_families":[],"legs":[]}"#).unwrap();
    let o = tfacpp(&["solve", "--instance", s(&out), "--out", s(dir.path())]);
    assert_eq!(code(&o), 4, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn colgen_matches_monolithic_lp_and_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let inst = small_instance(dir.path());
    let cg = dir.path().join("cg");
    let o = tfacpp(&["solve", "--instance", s(&inst), "--mode", "colgen", "--demand", "mid", "--out", s(&cg)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["solution.json", "convergence.csv", "allocation.csv", "months.csv"] {
        assert!(cg.join(f).exists(), "{f}");
    }
    let mono = dir.path().join("mono");
    let o = tfacpp(&["solve", "--instance", s(&inst), "--mode", "monolithic", "--relax", "--out", s(&mono)]);
    assert_eq!(code(&o), 0);
    let a = json(&cg.join("solution.json"))["lp_objective"].as_f64().unwrap();
    let b = json(&mono.join("solution.json"))["objective"].as_f64().unwrap();
    assert!((a - b).abs() <= 1e-6 * b.abs(), "{a} vs {b}");
    // the budget binds, so column generation iterates and β is positive
    let rows = csv_rows(&cg.join("convergence.csv"));
    assert!(rows.len() > 1);
    let beta = &json(&cg.join("solution.json"))["duals"]["beta"];
    assert!(beta.as_object().unwrap().values().any(|v| v.as_f64().unwrap() > 0.0));
    // finishing never exceeds its LP month
    for r in csv_rows(&cg.join("months.csv")) {
        if &r[5] == "false" {
            assert!(r[3].parse::<f64>().unwrap() <= 1e-9);
        }
    }
}

#[test]
fn solve_is_deterministic_with_one_thread() {
    let dir = tempfile::tempdir().unwrap();
    let inst = small_instance(dir.path());
    let run = |name: &str| {
        let out = dir.path().join(name);
        let o = tfacpp(&["solve", "--instance", s(&inst), "--threads", "1", "--demand", "high", "--seed", "3", "--out", s(&out)]);
        assert_eq!(code(&o), 0);
        fs::read(out.join("solution.json")).unwrap()
    };
    assert_eq!(run("a"), run("b"));
}

#[test]
fn iteration_cap_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let inst = small_instance(dir.path());
    let o = tfacpp(&["solve", "--instance", s(&inst), "--max-iterations", "1", "--out", s(dir.path())]);
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn analyze_requires_lp_duals() {
    let dir = tempfile::tempdir().unwrap();
    let inst = small_instance(dir.path());
    let mip = dir.path().join("mip");
    assert_eq!(code(&tfacpp(&["solve", "--instance", s(&inst), "--mode", "monolithic", "--out", s(&mip)])), 0);
    let o = tfacpp(&[
        "analyze", "--instance", s(&inst), "--solution", s(&mip.join("solution.json")), "--out", s(dir.path()),
    ]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("LP mode"));
}

#[test]
fn analyze_groups_by_thresholds_and_reports_growth() {
    let dir = tempfile::tempdir().unwrap();
    let inst = small_instance(dir.path());
    let cg = dir.path().join("cg");
    assert_eq!(code(&tfacpp(&["solve", "--instance", s(&inst), "--cover", "drop", "--out", s(&cg)])), 0);
    let an = dir.path().join("an");
    let (g0, b0) = (1e6, 1e5);
    let o = tfacpp(&[
        "analyze",
        "--instance",
        s(&inst),
        "--solution",
        s(&cg.join("solution.json")),
        "--gamma0",
        &g0.to_string(),
        "--beta0",
        &b0.to_string(),
        "--out",
        s(&an),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    for r in csv_rows(&an.join("quadrants.csv")) {
        let (g, b): (f64, f64) = (r[1].parse().unwrap(), r[3].parse().unwrap());
        let expect = match (g >= g0, b >= b0) {
            (true, true) => "I",
            (false, true) => "II",
            (false, false) => "III",
            (true, false) => "IV",
        };
        assert_eq!(&r[4], expect);
    }
    let text = fs::read_to_string(an.join("eam.csv")).unwrap();
    let last = text.lines().last().unwrap();
    let v: Vec<f64> = last.split(',').map(|x| x.parse().unwrap()).collect();
    assert!(v[0] >= v[1] - 1e-6 * v[1].abs());
    assert!((v[2] - (v[0] - v[1]) / v[1] * 100.0).abs() < 1e-5);
    assert!(an.join("marginal.csv").exists());
}

#[test]
fn eam_and_benders_trace_commands() {
    let dir = tempfile::tempdir().unwrap();
    let inst = small_instance(dir.path());
    let o = tfacpp(&["eam", "--instance", s(&inst), "--out", s(dir.path())]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("growth"));
    let trace = dir.path().join("trace.csv");
    let o = tfacpp(&["benders-trace", "--instance", s(&inst), "--out", s(&trace)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rows = csv_rows(&trace);
    assert!(!rows.is_empty());
    for w in rows.windows(2) {
        assert!(w[1][1].parse::<f64>().unwrap() <= w[0][1].parse::<f64>().unwrap() + 1e-6);
    }
}

#[test]
fn infeasible_yearly_budget_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let inst = small_instance(dir.path());
    let mut v = json(&inst);
    for fam in v["fleet_families"].as_array_mut().unwrap() {
        fam["yearly_cap_per_crew"] = serde_json::json!(150.0);
    }
    fs::write(&inst, serde_json::to_string_pretty(&v).unwrap()).unwrap();
    let o = tfacpp(&["solve", "--instance", s(&inst), "--demand", "high", "--out", s(dir.path())]);
    assert_eq!(code(&o), 4, "{}", String::from_utf8_lossy(&o.stderr));
}
