use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_blanchfield")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

fn path(dir: &TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn emit_trefoil(dir: &TempDir) -> PathBuf {
    let f = path(dir, "trefoil.json");
    let o = run(&["knot", "--seifert", "trefoil", "--checks", "none", "--emit-triad", s(&f)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    f
}

fn emit_lens(dir: &TempDir, p: &str) -> PathBuf {
    let f = path(dir, &format!("lens{p}.json"));
    assert_eq!(code(&run(&["lens", p, "1", "--checks", "none", "--emit-triad", s(&f)])), 0);
    f
}

fn edit(file: &Path, out: &Path, f: impl FnOnce(&mut Value)) {
    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(file).unwrap()).unwrap();
    f(&mut v);
    std::fs::write(out, serde_json::to_string(&v).unwrap()).unwrap();
}

#[test]
fn validate_emitted_trefoil() {
    let dir = TempDir::new().unwrap();
    let f = emit_trefoil(&dir);
    let o = run(&["validate", s(&f), "--format", "json"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["passed"], true);
    assert_eq!(v["poincare"]["passed"], true);
}

#[test]
fn validate_locates_perturbation() {
    let dir = TempDir::new().unwrap();
    let f = emit_trefoil(&dir);
    let bad = path(&dir, "bad.json");
    edit(&f, &bad, |v| {
        let e = &mut v["Phi"][0]["1"][0][0];
        *e = Value::String(format!("{} + 1", e.as_str().unwrap()));
    });
    let o = run(&["validate", s(&bad), "--format", "json"]);
    assert_eq!(code(&o), 1);
    let failures = json(&o)["structure"]["failures"].as_array().unwrap().clone();
    assert!(!failures.is_empty());
    assert!(failures.iter().all(|f| f["part"].as_str().unwrap().contains("Phi") || f["s"].is_number()));
    let text = stdout(&run(&["validate", s(&bad)]));
    assert!(text.contains("nonzero"), "{text}");
}

#[test]
fn malformed_input_exits_2() {
    let dir = TempDir::new().unwrap();
    let f = path(&dir, "trunc.json");
    std::fs::write(&f, "{\"ring\": \"Z[pi]\", \"dimension\": ").unwrap();
    for cmd in ["validate", "pairing"] {
        let o = run(&[cmd, s(&f)]);
        assert_eq!(code(&o), 2);
        assert!(String::from_utf8_lossy(&o.stderr).contains("malformed JSON"));
    }
    assert_eq!(code(&run(&["validate", "/nonexistent/file.json"])), 2);
    assert_eq!(code(&run(&["lens", "4", "2"])), 2);
    assert_eq!(code(&run(&["pairing", s(&f), "--checks", "bogus"])), 2);
}

#[test]
fn pairing_of_trefoil_file() {
    let dir = TempDir::new().unwrap();
    let f = emit_trefoil(&dir);
    let o = run(&["pairing", s(&f), "--format", "json"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["matrix"], serde_json::json!([["(t)/(t^2 - t + 1)"]]));
    for c in ["hermitian", "nonsingular", "sesquilinear", "well_defined"] {
        assert_eq!(v["checks"][c], true, "{c}");
    }
    let co = json(&run(&["pairing", s(&f), "--side", "cohomology", "--checks", "none", "--format", "json"]));
    assert_eq!(co["side"], "cohomology");
    assert_eq!(co["matrix"].as_array().unwrap().len(), 1);
}

#[test]
fn closed_lens_file_with_trivial_rep() {
    let dir = TempDir::new().unwrap();
    let f = emit_lens(&dir, "2");
    let rep = path(&dir, "trivial.json");
    std::fs::write(&rep, r#"{"ring": "Z", "dim": 1, "generators": [{"name": "t", "matrix": [["1"]], "inverse": [["1"]]}]}"#).unwrap();
    let o = run(&["pairing", s(&f), "--rep", s(&rep), "--format", "json"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["matrix"], serde_json::json!([["1/2"]]));
}

#[test]
fn non_poincare_homology_side_exits_2() {
    let dir = TempDir::new().unwrap();
    let f = emit_lens(&dir, "2");
    let zero = path(&dir, "zero.json");
    edit(&f, &zero, |v| v["Phi"] = serde_json::json!([]));
    assert_eq!(code(&run(&["validate", s(&zero)])), 1);
    let o = run(&["pairing", s(&zero), "--side", "homology"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("Poincaré required"));
}

#[test]
fn lens_command() {
    let o = run(&["lens", "2", "1", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["matrix"], serde_json::json!([["1/2"]]));
    assert_eq!(v["orientation"], 1);
    let rev = json(&run(&["lens", "3", "1", "--orientation", "-1", "--checks", "none", "--format", "json"]));
    assert_eq!(rev["matrix"], serde_json::json!([["2/3"]]));
}

#[test]
fn knot_oracle_agrees() {
    for knot in ["trefoil", "figure-eight", "unknot"] {
        let o = run(&["knot", "--seifert", knot, "--oracle", "--checks", "none", "--format", "json"]);
        assert_eq!(code(&o), 0, "{knot}");
        assert_eq!(json(&o)["oracle"]["agreement"], "exact");
    }
    let dir = TempDir::new().unwrap();
    let m = path(&dir, "v.json");
    std::fs::write(&m, "[[-1, 1], [0, -1]]").unwrap();
    let v = json(&run(&["knot", "--seifert", s(&m), "--oracle", "--checks", "none", "--format", "json"]));
    assert_eq!(v["matrix"], serde_json::json!([["(t)/(t^2 - t + 1)"]]));
    std::fs::write(&m, "[[1, 0], [0, 1]]").unwrap();
    assert_eq!(code(&run(&["knot", "--seifert", s(&m)])), 2);
}

#[test]
fn branched_covers() {
    let o = run(&["branched", "--seifert", "trefoil", "-k", "2", "--lens", "3", "1", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["annihilators"], serde_json::json!(["3"]));
    assert_eq!(v["cross_check"]["isometric"], true);
    let fig = json(&run(&["branched", "--seifert", "figure-eight", "-k", "2", "--lens", "5", "2", "--checks", "none", "--format", "json"]));
    assert_eq!(fig["annihilators"], serde_json::json!(["5"]));
    assert_eq!(fig["cross_check"]["isometric"], true);
    // 3/5 is not +-u^2 / 5
    let o = run(&["branched", "--seifert", "figure-eight", "-k", "2", "--lens", "5", "1", "--checks", "none"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("not isometric"));
}

#[test]
fn json_output_is_deterministic() {
    let args = ["knot", "--seifert", "figure-eight", "--oracle", "--format", "json"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let dir = TempDir::new().unwrap();
    let (f1, f2) = (path(&dir, "a.json"), path(&dir, "b.json"));
    run(&["lens", "5", "2", "--checks", "none", "--emit-triad", s(&f1)]);
    run(&["lens", "5", "2", "--checks", "none", "--emit-triad", s(&f2)]);
    assert_eq!(std::fs::read(&f1).unwrap(), std::fs::read(&f2).unwrap());
}

#[test]
fn union_command() {
    let dir = TempDir::new().unwrap();
    let cob = |name: &str, extra: &[&str]| {
        let f = path(&dir, name);
        let mut args = vec!["knot", "--seifert", "trefoil", "--checks", "none", "--emit-cobordism", s(&f)];
        args.extend_from_slice(extra);
        assert_eq!(code(&run(&args)), 0);
        f
    };
    let out = cob("out.json", &["--direction", "outgoing"]);
    let back = cob("back.json", &["--negate"]);
    let plain = cob("in.json", &[]);
    let other = cob("b_out.json", &["--piece", "b", "--direction", "outgoing"]);
    let glued = path(&dir, "glued.json");
    let o = run(&["union", s(&out), s(&back), "--emit", s(&glued), "--format", "json"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(json(&o)["passed"], true);
    assert_eq!(code(&run(&["validate", s(&glued)])), 0);
    // along the zero complex
    assert_eq!(code(&run(&["union", s(&plain), s(&other)])), 0);
    // structures on the shared end disagree
    let o = run(&["union", s(&out), s(&plain)]);
    assert_eq!(code(&o), 2);
}

#[test]
fn emit_schema_and_output_file() {
    let all = json(&run(&["emit-schema"]));
    for k in ["complex", "representation", "triad", "cobordism", "pairing"] {
        assert!(all[k].is_object(), "{k}");
    }
    let dir = TempDir::new().unwrap();
    let f = path(&dir, "triad.schema.json");
    assert_eq!(code(&run(&["emit-schema", "triad", "-o", s(&f)])), 0);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&f).unwrap()).unwrap();
    assert!(v["properties"]["sigma"].is_object());
    assert_eq!(code(&run(&["emit-schema", "nothing"])), 2);
}

#[test]
fn validate_complex_file() {
    let dir = TempDir::new().unwrap();
    let f = path(&dir, "c.json");
    std::fs::write(&f, r#"{"ring": "Z", "degrees": {"0": 1, "1": 1, "2": 1}, "boundaries": {"1": [["2"]], "2": [["0"]]}}"#).unwrap();
    assert_eq!(code(&run(&["validate", s(&f)])), 0);
    std::fs::write(&f, r#"{"ring": "Z", "degrees": {"0": 1, "1": 1, "2": 1}, "boundaries": {"1": [["2"]], "2": [["1"]]}}"#).unwrap();
    let o = run(&["validate", s(&f), "--format", "json"]);
    assert_eq!(code(&o), 1);
    assert_eq!(json(&o)["nonzero_square"], serde_json::json!([2]));
}
