use std::process::{Command, Output};

use serde_json::Value;

fn tilelink(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tilelink"))
        .args(args)
        .env_remove("TILELINK_FORMAT")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_str(&stdout(o)).expect("valid json")
}

#[test]
fn gram_64_json() {
    let o = tilelink(&["gram", "6", "4", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["m"], 6);
    assert_eq!(v["n"], 4);
    assert_eq!(v["gram_decimal"][3][5], "-3.46410161514");
    assert_eq!(v["gram_decimal"][0][1], "-1.73205080757");
}

#[test]
fn swapped_pair_is_normalized() {
    let a = stdout(&tilelink(&["gram", "4", "6", "--format", "json"]));
    let b = stdout(&tilelink(&["gram", "6", "4", "--format", "json"]));
    assert_eq!(a, b);
}

#[test]
fn spherical_53_certificate() {
    let o = tilelink(&["arithmetic", "5", "3", "--spherical", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["arithmetic"], false);
    assert_eq!(v["failing_item"]["cycle"], serde_json::json!([1, 2]));
}

#[test]
fn commensurable_gaussian_family() {
    let o = tilelink(&["commensurable", "3", "3", "6", "6"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("true, clause \"Q(i) family\""));
    let v = json(&tilelink(&["commensurable", "6", "4", "6", "6", "--format", "json"]));
    assert_eq!(v["commensurable"], false);
    assert_eq!(v["clause"], "trace field mismatch");
}

#[test]
fn domain_errors_exit_2() {
    for args in [&["gram", "2", "5"][..], &["gram", "4", "4"], &["report", "--bound", "51"], &["classify", "1", "3"]] {
        let o = tilelink(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        let line = String::from_utf8(o.stderr).unwrap();
        let err: Value = serde_json::from_str(line.trim()).expect("one-line json error");
        assert!(err["reason"].is_string());
    }
}

#[test]
fn json_round_trips() {
    for args in [
        &["gram", "6", "6", "--format", "json"][..],
        &["tracefield", "6", "4", "--format", "json"],
        &["report", "--bound", "8", "--samples", "200", "--format", "json"],
    ] {
        let text = stdout(&tilelink(args));
        let v: Value = serde_json::from_str(&text).unwrap();
        let mut again = serde_json::to_string_pretty(&v).unwrap();
        again.push('\n');
        assert_eq!(text, again, "{args:?}");
    }
}

#[test]
fn seed_reproduces_geometry_report() {
    let args = ["geometry-verify", "--bound", "7", "--samples", "500", "--seed", "42", "--format", "json"];
    let a = tilelink(&args);
    let b = tilelink(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let seq = tilelink(&[&args[..], &["--sequential"]].concat());
    assert_eq!(a.stdout, seq.stdout);
    let v = json(&a);
    assert_eq!(v["passed"], true);
    assert_eq!(v["basins"][0]["seed"], 42);
}

#[test]
fn report_bound_6_has_euclidean_rows() {
    let v = json(&tilelink(&["report", "--bound", "6", "--no-geometry", "--format", "json"]));
    let rows: Vec<(u64, u64, String)> = v["arithmetic"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| (r["m"].as_u64().unwrap(), r["n"].as_u64().unwrap(), r["geometry"].as_str().unwrap().to_string()))
        .collect();
    assert_eq!(rows.len(), 6);
    assert!(rows.contains(&(4, 4, "euclidean".into())));
    assert!(rows.contains(&(6, 3, "euclidean".into())));
}

#[test]
fn format_from_environment_and_csv() {
    let o = Command::new(env!("CARGO_BIN_EXE_tilelink"))
        .args(["report", "--bound", "4", "--no-geometry"])
        .env("TILELINK_FORMAT", "csv")
        .output()
        .unwrap();
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("m,n,geometry,arithmetic,trace_field,min_orbifold_degree,commensurability_class_id"));
    assert_eq!(lines.next(), Some("3,3,spherical,true,Q(i),not_applicable,1"));
}

#[test]
fn out_file() {
    let dir = std::env::temp_dir().join(format!("tilelink-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("sweep.csv");
    let o = tilelink(&["sweep", "--bound", "6", "--format", "csv", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.contains("6,4,true,"));
    assert!(text.contains("5,5,false,"));
    std::fs::remove_dir_all(&dir).unwrap();
}
