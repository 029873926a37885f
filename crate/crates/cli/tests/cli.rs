use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn joincert(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_joincert"))
        .args(args)
        .env_remove("JOINCERT_PRIME")
        .env_remove("JOINCERT_WORKERS")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}", String::from_utf8_lossy(&out.stdout))
    })
}

fn results(v: &Value) -> &Vec<Value> {
    v["results"].as_array().unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("joincert-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn validator() -> jsonschema::Validator {
    let out = joincert(&["schema"]);
    assert!(out.status.success());
    jsonschema::validator_for(&json(&out)).expect("schema compiles")
}

fn assert_valid(schema: &jsonschema::Validator, report: &Value) {
    let errors: Vec<String> = schema.iter_errors(report).map(|e| format!("{e} at {}", e.instance_path)).collect();
    assert!(errors.is_empty(), "{errors:#?}");
}

#[test]
fn dims_plane_septics() {
    let out = joincert(&["dims", "--m", "2", "--d", "7", "--t", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let r = &results(&v)[0]["result"];
    for (key, want) in [("tau_dim", 7), ("sigma_dim", 8), ("expected_tau", 7), ("expected_sigma", 8)] {
        assert_eq!(r[key], want, "{key}");
    }
    assert_eq!(v["schema_version"], 1);
}

#[test]
fn h1_quadruple_rank() {
    let out = joincert(&["h1", "--lemma", "quadruple", "--m", "2", "--d", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let r = &results(&v)[0]["result"];
    assert_eq!(r["kind"], "certificate");
    assert_eq!(r["achieved_rank"], 28);
    assert_eq!(r["verdict"], "certified");
}

#[test]
fn h1_triples_gives_both_variants() {
    let out = joincert(&["h1", "--lemma", "triples", "--m", "2", "--d", "6"]);
    let v = json(&out);
    let degrees: Vec<_> = results(&v).iter().map(|r| r["result"]["scheme_degree"].clone()).collect();
    assert_eq!(degrees, vec![Value::from(24), Value::from(27)]);
}

#[test]
fn certify_grid_one_report_per_cell() {
    let out = joincert(&["certify", "--grid", "m=2..3", "d=7", "t=3..5", "--trials", "5", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let cells: Vec<(u64, u64, u64)> = results(&v)
        .iter()
        .map(|r| {
            assert_eq!(r["result"]["kind"], "drip");
            assert_eq!(r["job"]["seed"], 7);
            let p = &r["result"]["params"];
            (p["m"].as_u64().unwrap(), p["d"].as_u64().unwrap(), p["t"].as_u64().unwrap())
        })
        .collect();
    assert_eq!(cells, vec![(2, 7, 3), (2, 7, 4), (2, 7, 5), (3, 7, 3), (3, 7, 4), (3, 7, 5)]);
    assert_eq!(v["meta"]["job_wall_time_ms"].as_array().unwrap().len(), 6);
}

#[test]
fn every_report_kind_validates() {
    let schema = validator();
    let runs: [&[&str]; 6] = [
        &["dims", "--m", "2", "--d", "7", "--t", "3"],
        &["h1", "--lemma", "custom", "--m", "2", "--d", "7", "--scheme", "Z23,2P*3"],
        &["weak3o", "--m", "2", "--d", "7", "--t", "4"],
        &["certify", "--m", "2", "--d", "7", "--t", "9", "--allow-out-of-range"],
        &["unique", "--m", "2", "--d", "7", "--t", "3", "--instances", "1", "--restarts", "4", "--control"],
        &["certify", "--m", "2", "--d", "6", "--t", "3"],
    ];
    for args in runs {
        let v = json(&joincert(args));
        assert_valid(&schema, &v);
    }
    // A report from an older layout must not validate.
    let mut v = json(&joincert(&["dims", "--m", "2", "--d", "7", "--t", "3"]));
    v["schema_version"] = Value::from(0);
    assert!(!schema.is_valid(&v));
}

#[test]
fn csv_has_one_row_per_job() {
    let out = joincert(&["certify", "--grid", "m=2", "d=7", "t=3..5", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let headers = reader.headers().unwrap().clone();
    let verdict = headers.iter().position(|h| h == "verdict").expect("verdict column");
    let rows: Vec<_> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| &r[verdict] == "certified"));
}

fn without_meta(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("meta");
    v
}

#[test]
fn reruns_are_identical_outside_meta() {
    let job = scratch("det.json");
    std::fs::write(
        &job,
        r#"[{"command":"certify","grid":"m=2 d=7 t=3..4","seed":3},
            {"command":"unique","m":2,"d":7,"t":3,"instances":2,"restarts":6,"seed":5},
            {"command":"h1","m":2,"d":7,"lemma":"quadruple"}]"#,
    )
    .unwrap();
    let a = joincert(&["run", "--job", job.to_str().unwrap()]);
    let b = joincert(&["run", "--job", job.to_str().unwrap(), "--workers", "2"]);
    assert_eq!(a.status.code(), b.status.code());
    let (a, b) = (json(&a), json(&b));
    assert_eq!(results(&a).len(), 5);
    assert_eq!(
        serde_json::to_string(&without_meta(a)).unwrap(),
        serde_json::to_string(&without_meta(b)).unwrap()
    );
}

#[test]
fn out_file_is_written() {
    let path = scratch("report.json");
    let out = joincert(&["dims", "--m", "2", "--d", "7", "--t", "4", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(results(&v)[0]["result"]["tau_dim"], 10);
}

#[test]
fn exit_codes() {
    // Violated hypothesis and malformed input.
    assert_eq!(joincert(&["certify", "--m", "2", "--d", "6", "--t", "3"]).status.code(), Some(64));
    assert_eq!(joincert(&["dims", "--m", "2"]).status.code(), Some(64));
    assert_eq!(joincert(&["certify", "--grid", "m=2", "q=3"]).status.code(), Some(64));
    assert_eq!(joincert(&["--prime", "15", "dims", "--m", "2", "--d", "7", "--t", "3"]).status.code(), Some(64));
    let bad = scratch("bad.json");
    std::fs::write(&bad, r#"{"command":"dims","m":2,"d":7,"t":3,"extra":1}"#).unwrap();
    assert_eq!(joincert(&["run", "--job", bad.to_str().unwrap()]).status.code(), Some(64));
    // Out of range is reported, not certified.
    let out = joincert(&["certify", "--m", "2", "--d", "7", "--t", "9", "--allow-out-of-range"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(results(&json(&out))[0]["result"]["verdict"], "out_of_range");
    // sigma_5 of plane quartics is defective: the mod-p rank cannot certify.
    let out = joincert(&["dims", "--m", "2", "--d", "4", "--t", "5"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(results(&json(&out))[0]["result"]["sigma_dim"], 13);
}

#[test]
fn environment_sets_prime() {
    let out = Command::new(env!("CARGO_BIN_EXE_joincert"))
        .args(["dims", "--m", "2", "--d", "7", "--t", "3"])
        .env("JOINCERT_PRIME", "4611686018427387817")
        .output()
        .unwrap();
    let v = json(&out);
    assert_eq!(results(&v)[0]["job"]["prime"], 4611686018427387817u64);
    assert_eq!(results(&v)[0]["result"]["tau_dim"], 7);
}
