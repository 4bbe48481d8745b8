use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_connexion-lab"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("report is JSON")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn catalog_lists_examples() {
    let o = run(&["catalog"]);
    assert!(o.status.success());
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.lines().count() >= 7);
    assert!(text.contains("airy"));

    let o = run(&["catalog", "--json"]);
    let v = stdout_json(&o);
    let names: Vec<&str> = v.as_array().unwrap().iter().map(|e| e["name"].as_str().unwrap()).collect();
    for n in ["kummer-half", "airy", "e-inverse-z", "rank2-stokes"] {
        assert!(names.contains(&n), "{n} missing");
    }
}

#[test]
fn analyze_airy() {
    let o = run(&["analyze", "airy", "--samples", "32"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v = stdout_json(&o);
    assert_eq!(v["q"], 2);
    assert_eq!(v["irregularity"], 1);
    assert_eq!(v["rank"], 2);
    assert_eq!(v["index"]["h1_min"], 1);
    assert_eq!(v["index"]["full"], serde_json::json!([0, 1]));
    assert_eq!(v["index"]["consistent"], true);
    assert_eq!(v["metric"]["positive_definite"], true);
    assert!(v["round_trip"].as_array().unwrap().iter().all(|r| r["ok"] == true));
}

#[test]
fn analyze_kummer_half() {
    let o = run(&["analyze", "kummer-half", "--samples", "32"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v = stdout_json(&o);
    assert_eq!(v["q"], 1);
    assert_eq!(v["irregularity"], 0);
    assert_eq!(v["index"]["full"], serde_json::json!([0, 0]));
    assert_eq!(v["index"]["consistent"], true);
    assert_eq!(v["l2"][0]["excluded"], true);
}

#[test]
fn analyze_writes_tables() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = bin().args(["analyze", "rank2-stokes", "--samples", "16", "--out"]).arg(&out).output().unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(o.stdout.is_empty());
    let v: Value = serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    assert!(v["metric"]["glued"].is_object());
    let csv = std::fs::read_to_string(dir.path().join("r.metric.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "z_re,z_im,a,det_K,ratio,pseudo_norm,glued_delta");
    assert_eq!(csv.lines().count(), 17);
}

#[test]
fn malformed_input_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.json");
    std::fs::write(&p, "{\"kind\": \"matrix\", \"rows\": [[").unwrap();
    let o = bin().arg("analyze").arg(&p).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("ParseError"));

    let o = run(&["analyze", "no/such/file.json"]);
    assert_eq!(o.status.code(), Some(2));

    let o = run(&["analyze", "airy", "--grid", "huge"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unknown_name_suggests() {
    let o = run(&["analyze", "airyy"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("did you mean \"airy\""), "{}", stderr(&o));
}

#[test]
fn unwritable_output_exits_1() {
    let o = run(&["analyze", "trivial", "--samples", "4", "--out", "/nonexistent-dir/r.json"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn l2verify_irregular_line() {
    let o = run(&["l2verify", "e-inverse-z", "--trials", "1"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v = stdout_json(&o);
    assert_eq!(v["ok"], true);
    let line = &v["lines"][0];
    assert_eq!(line["excluded"], false);
    assert_eq!(line["ell"], 1);
    assert_eq!(line["psi_verdicts"].as_array().unwrap().len(), 11);
    assert!(line["hardy_angular"]["c_max"].as_f64().unwrap() <= line["hardy_angular"]["bound"].as_f64().unwrap());
}

#[test]
fn l2verify_flat_line_is_excluded() {
    let o = run(&["l2verify", "trivial"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v = stdout_json(&o);
    assert_eq!(v["lines"][0]["excluded"], true);
    assert_eq!(v["lines"][0]["vanishing"], Value::Null);
}

#[test]
fn l2verify_sector_through_cos_zero_exits_5() {
    // For e^{1/z}, cos θ vanishes at π/2.
    let o = run(&["l2verify", "e-inverse-z", "--trials", "1", "--sector", "1.2,1.9"]);
    assert_eq!(o.status.code(), Some(5), "{}", stderr(&o));
    assert!(stderr(&o).contains("BoundViolated"));
}

fn read_all(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap())
        })
        .collect();
    v.sort();
    v
}

#[test]
fn reports_are_byte_stable() {
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for d in &dirs {
        let o = bin().args(["l2verify", "kummer-half", "--trials", "1", "--beta", "0.5", "--out"]).arg(d.path().join("l2.json")).output().unwrap();
        assert!(o.status.success(), "{}", stderr(&o));
        let o = bin().args(["analyze", "mixed-reg-irr", "--samples", "16", "--out"]).arg(d.path().join("an.json")).output().unwrap();
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let (a, b) = (read_all(dirs[0].path()), read_all(dirs[1].path()));
    assert_eq!(a.len(), 6);
    assert_eq!(a, b);
}
