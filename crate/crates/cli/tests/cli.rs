use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_explograph"))
}

fn run(args: &[&str], dir: &Path) -> Output {
    bin().args(args).current_dir(dir).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap_or(-1)
}

fn write(dir: &Path, name: &str, v: &Value) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, serde_json::to_string(v).unwrap()).unwrap();
    p
}

fn read(p: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

fn schema(name: &str) -> jsonschema::JSONSchema {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../schemas").join(format!("{name}.v1.json"));
    let doc: Value = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::JSONSchema::compile(&doc).expect("schema compiles")
}

fn assert_schema(name: &str, v: &Value) {
    let s = schema(name);
    let msgs: Vec<String> = match s.validate(v) {
        Ok(()) => return,
        Err(errs) => errs.map(|e| format!("{} at {}", e, e.instance_path)).collect(),
    };
    panic!("{name} schema rejects output: {msgs:?}");
}

/// Check passes on an emitted file.
fn assert_checks(dir: &Path, file: &str) {
    let o = run(&["explode", "--check", file], dir);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
}

// Plane degree-d rational curve counts from the WDVV recursion.
fn kontsevich(d: usize) -> i128 {
    let mut n = vec![0i128; d + 1];
    n[1] = 1;
    let binom = |n: usize, k: usize| -> i128 {
        if k > n {
            return 0;
        }
        (0..k).fold(1i128, |acc, i| acc * (n - i) as i128 / (i + 1) as i128)
    };
    for m in 2..=d {
        let mut s = 0i128;
        for a in 1..m {
            let b = m - a;
            let (a2, b2) = ((a * a * b * b) as i128, (a * a * a * b) as i128);
            s += n[a] * n[b] * (a2 * binom(3 * m - 4, 3 * a - 2) - b2 * binom(3 * m - 4, 3 * a - 1));
        }
        n[m] = s;
    }
    n[d]
}

#[test]
fn kontsevich_oracle() {
    assert_eq!((1..=4).map(kontsevich).collect::<Vec<_>>(), vec![1, 1, 12, 620]);
}

#[test]
fn count_line_both() {
    let t = TempDir::new().unwrap();
    write(t.path(), "p.json", &json!({"degree": 1}));
    let o = run(&["count", "p.json", "--both", "--out", "r.json"], t.path());
    assert_eq!(code(&o), 0);
    let r = read(&t.path().join("r.json"));
    assert_eq!(r["direct"], "1/1");
    assert_eq!(r["glued"], "1/1");
    assert_eq!(r["verdict"], "EQUAL");
    assert_eq!(r["seed"], 0);
    assert!(r["tool"].as_str().unwrap().starts_with("explograph "));
    assert_schema("count-report", &r);
    assert_checks(t.path(), "r.json");
}

#[test]
fn count_cubics_both() {
    let t = TempDir::new().unwrap();
    write(t.path(), "p.json", &json!({"degree": 3}));
    let o = run(&["count", "p.json", "--both", "--seed", "2", "--out", "r.json"], t.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = read(&t.path().join("r.json"));
    let want = format!("{}/1", kontsevich(3));
    assert_eq!(r["direct"], want.as_str());
    assert_eq!(r["glued"], want.as_str());
    assert_eq!(r["verdict"], "EQUAL");
    assert_schema("count-report", &r);
    assert_checks(t.path(), "r.json");
}

#[test]
fn count_single_pipelines() {
    let t = TempDir::new().unwrap();
    write(t.path(), "p.json", &json!({"degree": 2}));
    for (flag, present, absent) in [("--direct", "direct", "glued"), ("--glued", "glued", "direct")] {
        let o = run(&["count", "p.json", flag, "--out", "r.json"], t.path());
        assert_eq!(code(&o), 0);
        let r = read(&t.path().join("r.json"));
        assert_eq!(r[present], "1/1");
        assert!(r.get(absent).is_none() && r.get("verdict").is_none());
        assert_schema("count-report", &r);
        assert_checks(t.path(), "r.json");
    }
    let o = run(&["count", "p.json", "--direct", "--glued"], t.path());
    assert_ne!(code(&o), 0);
}

#[test]
fn seeded_runs_are_reproducible() {
    let t = TempDir::new().unwrap();
    write(t.path(), "p.json", &json!({"degree": 2}));
    let a = run(&["count", "p.json", "--seed", "7"], t.path());
    let b = run(&["count", "p.json", "--seed", "7"], t.path());
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let r: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(r["seed"], 7);
}

#[test]
fn degenerate_points_exit_5() {
    let t = TempDir::new().unwrap();
    write(t.path(), "p.json", &json!({"degree": 1, "points": [["0", "0"], ["0", "0"]]}));
    let o = run(&["count", "p.json", "--both"], t.path());
    assert_eq!(code(&o), 5);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("perturb points"), "{err}");
    assert!(err.contains("--seed"), "{err}");
    let o = run(&["enumerate", "p.json"], t.path());
    assert_eq!(code(&o), 5);
}

#[test]
fn malformed_input_exit_2() {
    let t = TempDir::new().unwrap();
    fs::write(t.path().join("a.json"), "{\"k\": 1,").unwrap();
    let o = run(&["explode", "a.json"], t.path());
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line"));

    write(t.path(), "b.json", &json!({"k": 1, "nerve": [[], ["x"]]}));
    let o = run(&["explode", "b.json"], t.path());
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("nerve[1][0]"));

    write(t.path(), "c.json", &json!({"degree": 2, "colour": "red"}));
    assert_eq!(code(&run(&["count", "c.json"], t.path())), 2);
    write(t.path(), "d.json", &json!({"degree": 1, "points": [["0", "1"]]}));
    assert_eq!(code(&run(&["count", "d.json"], t.path())), 2);
}

#[test]
fn invalid_nerve_exit_3() {
    let t = TempDir::new().unwrap();
    // {1,2} present without {2}
    write(t.path(), "n.json", &json!({"k": 2, "nerve": [[], [1], [1, 2]]}));
    assert_eq!(code(&run(&["explode", "n.json"], t.path())), 3);
    assert_eq!(code(&run(&["rend", "n.json"], t.path())), 3);
}

#[test]
fn explode_single_divisor() {
    let t = TempDir::new().unwrap();
    write(t.path(), "k1.json", &json!({"k": 1, "nerve": [[], [1]]}));
    let o = run(&["explode", "k1.json", "--out", "c.json"], t.path());
    assert_eq!(code(&o), 0);
    let c = read(&t.path().join("c.json"));
    assert_schema("complex", &c);
    let charts = c["complex"]["charts"].as_array().unwrap();
    assert_eq!(charts.len(), 1);
    // one half-line chart x ≥ 0
    let cons = charts[0]["polytope"]["constraints"].as_array().unwrap();
    assert_eq!(charts[0]["polytope"]["dim"], 1);
    assert_eq!(cons.len(), 1);
    assert_eq!(cons[0]["alpha"], json!([1]));
    assert_eq!(cons[0]["a"], "0/1");
    assert_checks(t.path(), "c.json");
}

#[test]
fn explode_projective_plane_fan() {
    let t = TempDir::new().unwrap();
    let fan = json!({"fan": {"dim": 2, "rays": [[1, 0], [0, 1], [-1, -1]], "cones": [[0, 1], [1, 2], [2, 0]]}});
    assert_schema("fan", &fan);
    write(t.path(), "fan.json", &fan);
    let o = run(&["explode", "fan.json", "--out", "c.json"], t.path());
    assert_eq!(code(&o), 0);
    let c = read(&t.path().join("c.json"));
    assert_eq!(c["complex"]["charts"].as_array().unwrap().len(), 3);
    assert_schema("complex", &c);
    assert_checks(t.path(), "c.json");
    let o = run(&["refine", "fan.json", "--out", "r.json"], t.path());
    assert_eq!(code(&o), 0);
    assert_eq!(read(&t.path().join("r.json"))["complex"], c["complex"]);
}

#[test]
fn refine_complete_and_rend_round_trip() {
    let t = TempDir::new().unwrap();
    write(t.path(), "k1.json", &json!({"k": 1, "nerve": [[], [1]]}));
    assert_eq!(code(&run(&["explode", "k1.json", "--out", "c.json"], t.path())), 0);
    // split [0,∞) at 1
    let sub = json!({"subdivisions": [[
        {"dim": 1, "constraints": [{"alpha": [1], "a": "0/1"}, {"alpha": [-1], "a": "1/1"}]},
        {"dim": 1, "constraints": [{"alpha": [1], "a": "-1/1"}]}
    ]]});
    assert_schema("polytope", &sub["subdivisions"][0][0]);
    write(t.path(), "s.json", &sub);
    let o = run(&["refine", "s.json", "--complex", "c.json", "--out", "r.json"], t.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = read(&t.path().join("r.json"));
    assert_eq!(r["complex"]["complex"]["cells"].as_array().unwrap().len(), 2);
    assert_schema("complex", &r);
    assert_checks(t.path(), "r.json");

    assert_eq!(code(&run(&["refine", "s.json"], t.path())), 2);

    let o = run(&["complete", "r.json", "--at", "1", "--out", "t.json"], t.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let tc = read(&t.path().join("t.json"));
    assert_eq!(tc["complex"]["charts"].as_array().unwrap().len(), 2);
    assert_checks(t.path(), "t.json");

    let o = run(&["rend", "k1.json", "--max-order", "3", "--out", "rend.json"], t.path());
    assert_eq!(code(&o), 0);
    let rend = read(&t.path().join("rend.json"));
    assert_eq!(rend["components"].as_array().unwrap().len(), 4);
    assert_schema("rend", &rend);
    assert_checks(t.path(), "rend.json");
}

#[test]
fn check_accepts_inputs_and_rejects_tampering() {
    let t = TempDir::new().unwrap();
    let p = json!({"degree": 2});
    assert_schema("problem", &p);
    write(t.path(), "p.json", &p);
    assert_checks(t.path(), "p.json");
    let nc = json!({"k": 2, "nerve": [[], [1], [2], [1, 2]]});
    assert_schema("nc-configuration", &nc);
    write(t.path(), "nc.json", &nc);
    assert_checks(t.path(), "nc.json");

    assert_eq!(code(&run(&["count", "p.json", "--out", "r.json"], t.path())), 0);
    let mut r = read(&t.path().join("r.json"));
    r["glued"] = json!("2/1");
    write(t.path(), "bad.json", &r);
    assert_eq!(code(&run(&["explode", "--check", "bad.json"], t.path())), 2);

    assert_eq!(code(&run(&["enumerate", "p.json", "--out", "e.json"], t.path())), 0);
    let mut e = read(&t.path().join("e.json"));
    e["curves"][0]["curve"]["ends"][0]["d"] = json!([0, -2]);
    write(t.path(), "bad2.json", &e);
    assert_eq!(code(&run(&["explode", "--check", "bad2.json"], t.path())), 2);
}

fn line_curve() -> Value {
    json!({"vertices": [{"pos": ["0/1", "0/1"]}], "ends": [
        {"v": 0, "d": [-1, 0]}, {"v": 0, "d": [0, -1]}, {"v": 0, "d": [1, 1]}
    ]})
}

#[test]
fn render_line() {
    let t = TempDir::new().unwrap();
    let c = line_curve();
    assert_schema("curve", &c);
    write(t.path(), "line.json", &c);
    let o = run(&["render", "line.json", "--out", "line.svg"], t.path());
    assert_eq!(code(&o), 0);
    let svg = fs::read_to_string(t.path().join("line.svg")).unwrap();
    assert!(svg.starts_with("<svg"));
    assert_eq!(svg.matches("class=\"vertex\"").count(), 1);
    assert_eq!(svg.matches("class=\"end\"").count(), 3);
    assert_eq!(svg.matches("class=\"edge\"").count(), 0);
    assert_eq!(svg.matches("class=\"weight\"").count(), 0);
}

#[test]
fn render_is_deterministic() {
    let t = TempDir::new().unwrap();
    write(t.path(), "line.json", &line_curve());
    let a = run(&["render", "line.json"], t.path());
    let b = run(&["render", "line.json"], t.path());
    assert_eq!(code(&a), 0);
    assert!(!a.stdout.is_empty());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn render_labels_multiplicities() {
    let t = TempDir::new().unwrap();
    // conic tangent to the line at infinity: one end of weight 2
    let c = json!({"vertices": [{"pos": ["0/1", "0/1"]}], "ends": [
        {"v": 0, "d": [-2, 0]}, {"v": 0, "d": [1, -1]}, {"v": 0, "d": [1, 1]}
    ]});
    write(t.path(), "c.json", &c);
    let o = run(&["render", "c.json"], t.path());
    assert_eq!(code(&o), 0);
    let svg = String::from_utf8(o.stdout).unwrap();
    assert_eq!(svg.matches("class=\"weight\"").count(), 1);
    assert!(svg.contains(">2</text>"));
}

#[test]
fn render_report_one_file_per_type() {
    let t = TempDir::new().unwrap();
    write(t.path(), "p.json", &json!({"degree": 3}));
    assert_eq!(code(&run(&["enumerate", "p.json", "--seed", "1", "--out", "e.json"], t.path())), 0);
    let e = read(&t.path().join("e.json"));
    assert_schema("enumeration", &e);
    assert_checks(t.path(), "e.json");
    let types = e["types"].as_u64().unwrap() as usize;
    assert_eq!(types, e["curves"].as_array().unwrap().len());
    let o = run(&["render", "e.json", "--out", "svg"], t.path());
    assert_eq!(code(&o), 0);
    let files: Vec<_> = fs::read_dir(t.path().join("svg")).unwrap().collect();
    assert_eq!(files.len(), types);
    // marks drawn at each of the 8 points
    for f in files {
        let s = fs::read_to_string(f.unwrap().path()).unwrap();
        assert_eq!(s.matches("class=\"mark\"").count(), 8);
    }
}

#[test]
fn render_rejects_space_curves() {
    let t = TempDir::new().unwrap();
    let c = json!({"vertices": [{"pos": ["0/1", "0/1", "0/1"]}], "ends": [
        {"v": 0, "d": [1, 0, 0]}, {"v": 0, "d": [0, 1, 0]}, {"v": 0, "d": [0, 0, 1]}, {"v": 0, "d": [-1, -1, -1]}
    ]});
    write(t.path(), "c.json", &c);
    assert_eq!(code(&run(&["render", "c.json"], t.path())), 6);
}
