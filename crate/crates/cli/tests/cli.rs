use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn dioph(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dioph"))
        .args(args)
        .env_remove("DIOPH_PRECISION")
        .env_remove("DIOPH_BUDGET")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

fn schema(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../schemas").join(format!("{name}.schema.json"))
}

/// Validate with the reference Python implementation when it is installed.
fn validate(value: &serde_json::Value, name: &str) {
    let dir = tempfile::tempdir().unwrap();
    let doc = dir.path().join("doc.json");
    std::fs::write(&doc, value.to_string()).unwrap();
    let script = "import json,sys,jsonschema\njsonschema.validate(json.load(open(sys.argv[1])), json.load(open(sys.argv[2])))";
    let out = match Command::new("python3").args(["-c", script]).arg(&doc).arg(schema(name)).output() {
        Ok(o) => o,
        Err(_) => return eprintln!("python3 unavailable, schema {name} not checked"),
    };
    let err = String::from_utf8_lossy(&out.stderr);
    if err.contains("No module named 'jsonschema'") {
        return eprintln!("python jsonschema unavailable, schema {name} not checked");
    }
    assert!(out.status.success(), "{name} schema: {err}");
}

#[test]
fn records_csv_and_usage_errors() {
    let o = dioph(&["records", "--theta", "sqrt:2,sqrt:3", "--kind", "sim", "--T", "10"]);
    assert_eq!(code(&o), 0);
    let s = stdout(&o);
    let lines: Vec<&str> = s.lines().collect();
    assert_eq!(lines[0], "kind,k,t,err_lo,err_hi,x0,x1,x2,r_lo,r_hi,h_lo,h_hi");
    assert_eq!(lines.len(), 4);
    assert!(lines[3].starts_with("SIM,2,7,0.1243556"));

    assert_eq!(code(&dioph(&["records", "--theta", "sqrt2", "--kind", "sim", "--T", "0"])), 64);
    assert_eq!(code(&dioph(&["records", "--kind", "sim"])), 64);
    assert_eq!(code(&dioph(&["records", "--kind", "sim", "--T", "5"])), 64);
    assert_eq!(code(&dioph(&["nonsense"])), 64);
    assert_eq!(code(&dioph(&["--theta", "sqrt:-2", "records", "--kind", "sim", "--T", "5"])), 64);
    assert_eq!(code(&dioph(&["--help"])), 0);
}

#[test]
fn rational_relation_is_reported() {
    let o = dioph(&["records", "--theta", "rat:1/2,rat:1/3", "--kind", "lin", "--T", "5", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["degenerate"], serde_json::json!([-1, 2, 0]));
    assert_eq!(v["records"].as_array().unwrap().last().unwrap()["err"], serde_json::json!(["0", "0"]));
    assert!(String::from_utf8_lossy(&o.stderr).contains("exact relation"));
    validate(&v, "records");
}

#[test]
fn budget_exit_code() {
    let o = dioph(&["records", "--theta", "sqrt2-sqrt3", "--kind", "lin", "--T", "100000", "--budget", "1000"]);
    assert_eq!(code(&o), 2);
    let o = dioph(&["records", "--theta", "sqrt2", "--kind", "sim", "--T", "100000", "--budget", "10"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn exponents_from_records_file() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("sim.csv");
    let o = dioph(&["records", "--theta", "sqrt2-sqrt3", "--kind", "sim", "--T", "2000", "-o", csv.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let mut a = json(&dioph(&["exponents", "--theta", "sqrt2-sqrt3", "--kind", "sim", "--records", csv.to_str().unwrap()]));
    let mut b = json(&dioph(&["exponents", "--theta", "sqrt2-sqrt3", "--kind", "sim", "--T", "2000"]));
    // a CSV carries no search bound; it is read back as the last record's t
    assert_eq!(a["search_bound"], 1463);
    validate(&a, "exponents");
    a.as_object_mut().unwrap().remove("search_bound");
    b.as_object_mut().unwrap().remove("search_bound");
    assert_eq!(a, b);
    let wrong = dioph(&["exponents", "--theta", "sqrt:3,sqrt:2", "--kind", "sim", "--records", csv.to_str().unwrap()]);
    assert_eq!(code(&wrong), 65);
}

#[test]
fn transfer_contract() {
    let o = dioph(&["transfer", "--tuple", "2:0.5,0.5,2,2"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert!(v["inequalities"].as_array().unwrap().iter().all(|e| e["verdict"] == "HOLDS"));
    validate(&v, "transfer");

    let o = dioph(&["transfer", "--tuple", "2:0.6,0.6,3,3"]);
    assert_eq!(code(&o), 1);
    let v = json(&o);
    let jarnik = v["inequalities"].as_array().unwrap().iter().find(|e| e["name"] == "jarnik_identity").unwrap();
    assert_eq!(jarnik["verdict"], "VIOLATED");

    let o = dioph(&["transfer", "--tuple", "2:0.6,0.6,3,3", "--provenance", "estimated"]);
    assert_eq!(code(&o), 0);
    assert_eq!(code(&dioph(&["transfer", "--tuple", "2:1,2"])), 64);
}

#[test]
fn transfer_from_records() {
    let o = dioph(&["transfer", "--theta", "sqrt2-sqrt3", "--T-sim", "3000", "--T-lin", "300"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["provenance"], "ESTIMATED");
    assert!(v["inequalities"].as_array().unwrap().iter().all(|e| e.get("severity").is_none_or(|s| s == "warning")));
    validate(&v, "transfer");
}

#[test]
fn cylinder_bundles_and_figure() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("c.svg");
    let o = dioph(&["cylinder", "--theta", "sqrt2-sqrt3", "--record", "5", "--brute", "--svg", svg.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["lemma"]["verdict"], "CERTIFIED_EMPTY");
    assert_eq!(v["brute_force"]["verdict"], "EMPTY");
    validate(&v, "cylinder");
    let fig = std::fs::read_to_string(&svg).unwrap();
    assert!(fig.starts_with("<?xml") && fig.contains("<svg"));

    let o = dioph(&["cylinder", "--theta", "sqrt2-sqrt3", "--record", "0"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["lemma"]["verdict"], "HYPOTHESIS_FAILS");

    let o = dioph(&["cylinder", "--theta", "plastic", "--case", "case2", "--all", "--T", "40"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert!(v.as_array().unwrap().iter().all(|w| w["case"] == "CASE2" && w["beta_vs_alpha"] == "LESS"));
    validate(&v, "cylinder");

    let o = dioph(&["cylinder", "--theta", "sqrt2-sqrt3", "--record", "50", "--T", "100"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn records_figure() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("r.svg");
    let o = dioph(&["records", "--theta", "golden", "--kind", "sim", "--T", "1000", "--svg", svg.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let fig = std::fs::read_to_string(&svg).unwrap();
    assert!(fig.contains("<polyline") && fig.trim_end().ends_with("</svg>"));
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn nesterenko_contract() {
    let dir = tempfile::tempdir().unwrap();
    let ev = dir.path().join("ev.json");
    let o = dioph(&["evidence", "--theta", "sqrt2-sqrt3", "--T", "500", "-o", ev.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let evj: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&ev).unwrap()).unwrap();
    validate(&evj, "evidence");
    let ev = ev.to_str().unwrap();

    let o = dioph(&["nesterenko", "--evidence", ev, "--d", "1", "--angle-T", "100"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["hypothesis"]["all_hold"], true);
    // δ(1) = (1+β)/α with α = β
    let a: f64 = v["alpha"][0].as_str().unwrap().parse().unwrap();
    let d: f64 = v["delta"][0].as_str().unwrap().parse().unwrap();
    assert!((d - (1.0 + a) / a).abs() < 1e-12);
    validate(&v, "nesterenko");

    let o = dioph(&["nesterenko", "--evidence", ev, "--d", "3"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("not below"));

    let weak = write(
        dir.path(),
        "weak.json",
        r#"{"alpha": 1, "beta": 2, "c1": "0.001", "c2": 1000, "theta": "sqrt:2,sqrt:3",
            "entries": [{"t": 4, "x": [-3, 1, 1]}, {"t": 9, "x": [-8, 2, 3]}]}"#,
    );
    let o = dioph(&["nesterenko", "--evidence", &weak, "--d", "1", "--prop4"]);
    assert_eq!(code(&o), 1);
    assert_eq!(json(&o)["prop4"]["condition"], "PRECONDITION");

    let bad = write(dir.path(), "bad.json", "{ not json");
    assert_eq!(code(&dioph(&["nesterenko", "--evidence", &bad, "--d", "1"])), 65);
    let shape = write(dir.path(), "shape.json", r#"{"alpha": 1}"#);
    assert_eq!(code(&dioph(&["nesterenko", "--evidence", &shape, "--d", "1"])), 65);
}

#[test]
fn config_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", "theta = \"sqrt2-sqrt3\"\nprecision = 96\nformat = \"json\"\n");
    let precision = |extra: &[&str], env: Option<&str>| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_dioph"));
        c.args(["--config", &cfg, "records", "--kind", "sim", "--T", "10"]).args(extra).env_remove("DIOPH_PRECISION");
        if let Some(e) = env {
            c.env("DIOPH_PRECISION", e);
        }
        let o = c.output().unwrap();
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        json(&o)["precision"].as_u64().unwrap()
    };
    assert_eq!(precision(&[], None), 96);
    assert_eq!(precision(&[], Some("80")), 80);
    assert_eq!(precision(&["--precision", "72"], Some("80")), 72);

    let broken = write(dir.path(), "b.toml", "precison = 3\n");
    assert_eq!(code(&dioph(&["--config", &broken, "corpus", "list"])), 65);
}

#[test]
fn corpus_listing() {
    let o = dioph(&["corpus", "list"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert!(v.as_array().unwrap().iter().any(|e| e["name"] == "plastic"));
    validate(&v, "corpus");
    let csv = stdout(&dioph(&["corpus", "list", "--format", "csv"]));
    assert!(csv.starts_with("name,spec,n,note\n"));
}
