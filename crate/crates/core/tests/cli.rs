use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

const ELLIPSOID: &str = r#"{
  "surface": {"type": "ellipsoid", "parameters": {"a": 3, "b": 2, "c": 1}},
  "seed": 7,
  "trace": {"starts": [[2.5, 1.5, 0.7853981633974483]], "random": 2, "arc_length": 4}
}"#;

fn darboux(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_darboux")).args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

fn snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.is_file())
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

#[test]
fn bad_config_exits_with_one() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "bad.json", r#"{"surface": {"parameters": {"a": 3}}}"#);
    let out = darboux(&["trace", "--config", &cfg, "--out", tmp.path().join("o").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("missing field `type`"), "{err}");

    let cfg = write_config(tmp.path(), "order.json", r#"{"surface": {"type": "ellipsoid", "parameters": {"a": 1, "b": 2, "c": 3}}}"#);
    let out = darboux(&["trace", "--config", &cfg, "--out", tmp.path().join("o").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));

    let out = darboux(&["ridges"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn umbilic_trace_exits_with_two_and_is_partial() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        "umbilic.json",
        r#"{
  "surface": {"type": "ellipsoid", "parameters": {"a": 3, "b": 2, "c": 1}, "chart": "angular"},
  "trace": {"flow": "geodesic", "starts": [[3.141592653589793, 0.3, -1.5707963267948966]], "arc_length": 5}
}"#,
    );
    let dir = tmp.path().join("o");
    let out = darboux(&["trace", "--config", &cfg, "--out", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
    let meta: serde_json::Value = serde_json::from_slice(&fs::read(dir.join("trace_000.json")).unwrap()).unwrap();
    assert_eq!(meta["partial"], true);
    assert!(dir.join("trace_000.csv").exists());
}

#[test]
fn trace_outputs_carry_metadata() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "e.json", ELLIPSOID);
    let dir = tmp.path().join("o");
    let out = darboux(&["trace", "--config", &cfg, "--out", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.join("trace_000.csv")).unwrap();
    let header = csv.lines().next().unwrap();
    assert!(header.starts_with("s,u,v,alpha,x,y,z") && header.split(',').any(|c| c == "quadric"), "{header}");
    for i in 0..3 {
        assert!(dir.join(format!("trace_{i:03}.csv")).exists());
    }
    let meta: serde_json::Value = serde_json::from_slice(&fs::read(dir.join("trace_000.json")).unwrap()).unwrap();
    let hash = meta["metadata"]["config_hash"].as_str().unwrap();
    assert_eq!(hash.len(), 64);
    assert_eq!(meta["metadata"]["seed"], 7);

    // same config into another directory: same hash; another seed: different hash
    let other = tmp.path().join("p");
    darboux(&["trace", "--config", &cfg, "--out", other.to_str().unwrap(), "--seed", "8"]);
    let meta2: serde_json::Value = serde_json::from_slice(&fs::read(other.join("trace_000.json")).unwrap()).unwrap();
    assert_ne!(meta2["metadata"]["config_hash"].as_str().unwrap(), hash);
    let third = tmp.path().join("q");
    darboux(&["trace", "--config", &cfg, "--out", third.to_str().unwrap()]);
    let meta3: serde_json::Value = serde_json::from_slice(&fs::read(third.join("trace_000.json")).unwrap()).unwrap();
    assert_eq!(meta3["metadata"]["config_hash"].as_str().unwrap(), hash);
}

#[test]
fn catalog_lists_the_registries() {
    let out = darboux(&["catalog"]);
    assert_eq!(out.status.code(), Some(0));
    let listing: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let names = |key: &str| -> Vec<String> {
        listing[key].as_array().unwrap().iter().map(|e| e["name"].as_str().unwrap().to_owned()).collect()
    };
    for s in ["ellipsoid", "one-sheet", "two-sheet", "cylinder", "cone", "revolution"] {
        assert!(names("surfaces").iter().any(|n| n.contains(s)), "{s} missing: {listing}");
    }
    assert!(names("flows").contains(&"darboux".to_owned()));
    assert!(listing["integrals"].as_array().unwrap().iter().any(|n| n == "quadric"));
}

#[test]
fn every_command_is_byte_stable() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "e.json", ELLIPSOID);
    for cmd in ["trace", "ridges", "rotation", "regimes", "cansec", "integrability", "catalog"] {
        let a = tmp.path().join(format!("{cmd}_a"));
        let b = tmp.path().join(format!("{cmd}_b"));
        let ra = darboux(&[cmd, "--config", &cfg, "--out", a.to_str().unwrap(), "--jobs", "1"]);
        let rb = darboux(&[cmd, "--config", &cfg, "--out", b.to_str().unwrap(), "--jobs", "3"]);
        assert_eq!(ra.status.code(), Some(0), "{cmd}: {}", String::from_utf8_lossy(&ra.stderr));
        assert_eq!(rb.status.code(), Some(0), "{cmd}");
        let (sa, sb) = (snapshot(&a), snapshot(&b));
        assert!(!sa.is_empty(), "{cmd}");
        assert_eq!(sa, sb, "{cmd} outputs differ");
    }
}
