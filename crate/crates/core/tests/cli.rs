use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn potkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_potkit")).args(args).output().unwrap()
}

fn write_config(dir: &Path, text: &str) -> String {
    let p = dir.join("c.toml");
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn run_writes_outputs_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "triples = 4\n");
    let out = dir.path().join("out");
    let o = potkit(&["run", "pipeline-identity", "--config", &cfg, "--seed", "5", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["pipeline.csv", "summary.json", "manifest.json"] {
        assert!(out.join(f).exists(), "{f}");
    }
    let manifest: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 5);
    assert_eq!(manifest["scenario"], "pipeline-identity");
}

#[test]
fn same_seed_same_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "triples = 6\n");
    let dirs = ["a", "b"].map(|d| dir.path().join(d));
    for d in &dirs {
        let o = potkit(&["run", "pipeline-identity", "--config", &cfg, "--seed", "9", "--out", d.to_str().unwrap()]);
        assert!(o.status.success());
    }
    for f in ["pipeline.csv", "summary.json"] {
        assert_eq!(fs::read(dirs[0].join(f)).unwrap(), fs::read(dirs[1].join(f)).unwrap(), "{f}");
    }
}

#[test]
fn validation_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "alpha = 1.0\n");
    let o = potkit(&["run", "pipeline-identity", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("0<α<1"));

    let cfg = write_config(dir.path(), "bogus_key = 1\n");
    assert_eq!(potkit(&["run", "wiener", "--config", &cfg]).status.code(), Some(2));

    let cfg = write_config(dir.path(), "triples = 2\n");
    assert_eq!(potkit(&["run", "no-such-scenario", "--config", &cfg]).status.code(), Some(2));
    assert_eq!(potkit(&["describe", "no-such-scenario"]).status.code(), Some(2));
}

#[test]
fn numeric_failure_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "radius = 1e-300\nlevels = [1]\n");
    let o = potkit(&["run", "capacity-ball", "--config", &cfg, "--out", dir.path().join("out").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn describe_lists_defaults() {
    for s in ["cheese-build", "capacity-ball", "wiener", "exceptional-set", "dq-theorem", "pipeline-identity"] {
        let o = potkit(&["describe", s]);
        assert!(o.status.success(), "{s}");
        let text = String::from_utf8(o.stdout).unwrap();
        assert!(text.starts_with(s));
        assert!(text.contains("seed = "));
    }
}
