use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn strata(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_strata"))
        .args(args)
        .env_remove("STRATA_CACHE")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn multiply_then_integrate() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("product.txt");
    let g = fixture("worked_g.txt");
    let h = fixture("worked_h.txt");
    let o = strata(&["multiply", g.to_str().unwrap(), h.to_str().unwrap(), "-o", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let o = strata(&["integrate", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "1/8\n");
}

#[test]
fn json_product_is_valid() {
    let g = fixture("worked_g.txt");
    let h = fixture("worked_h.txt");
    let o = strata(&["multiply", g.to_str().unwrap(), h.to_str().unwrap(), "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v.is_object() || v.is_array());
}

#[test]
fn rank_table_csv_and_json() {
    let o = strata(&["rank-table", "-g", "2", "-n", "0", "--space", "mbar"]);
    assert_eq!(stdout(&o), "1,2,2,1\n");
    let o = strata(&["rank-table", "-g", "2", "-n", "0", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["ranks"], serde_json::json!([1, 2, 2, 1]));
    assert_eq!(v["space"], "mbar");
}

#[test]
fn gram_scaling() {
    let o = strata(&["gram", "-g", "2", "-n", "0", "-k", "1"]);
    assert_eq!(stdout(&o), "row,c0,c1\nr0,-4,1\nr1,2,-1/12\n");
    let o = strata(&["gram", "-g", "2", "-n", "0", "-k", "1", "--scale", "12"]);
    assert_eq!(stdout(&o), "row,c0,c1\nr0,-48,12\nr1,24,-1\n");
}

#[test]
fn verify_relation_exit_codes() {
    let m4 = fixture("m4_relation.txt");
    let o = strata(&["verify-relation", m4.to_str().unwrap(), "-g", "4", "-n", "0"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("PASS"));

    let g = fixture("worked_g.txt");
    let o = strata(&["verify-relation", g.to_str().unwrap(), "-g", "4", "-n", "0"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).lines().last().unwrap().starts_with("FAIL"));

    let o = strata(&["verify-relation", m4.to_str().unwrap(), "-g", "3", "-n", "0"]);
    assert_eq!(o.status.code(), Some(2));
    let o = strata(&["integrate", "/nonexistent/input.txt"]);
    assert_eq!(o.status.code(), Some(2));
    let o = strata(&["rank-table", "-g", "0", "-n", "2"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn output_independent_of_jobs_and_cache() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache.bin");
    let base = ["gram", "-g", "3", "-n", "1", "-k", "2", "--space", "ct"];
    let one = strata(&[&base[..], &["--jobs", "1"]].concat());
    let four = strata(&[&base[..], &["--jobs", "4"]].concat());
    assert_eq!(one.stdout, four.stdout);
    let cache_arg = ["--cache", cache.to_str().unwrap()];
    let cold = strata(&[&base[..], &cache_arg[..]].concat());
    assert!(cache.exists());
    let warm = strata(&[&base[..], &cache_arg[..]].concat());
    assert_eq!(one.stdout, cold.stdout);
    assert_eq!(one.stdout, warm.stdout);
}

#[test]
fn enumerate_lists_spanning_set() {
    let o = strata(&["enumerate", "-g", "1", "-n", "1", "-k", "1"]);
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("index,edges,graph"));
    assert!(lines.count() >= 1);
}
