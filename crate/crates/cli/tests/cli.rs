use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const SMALL: &str = r#"
protocol = "ts"
layers = [2, 3, 4]
eta = 0.7
T1_e = 2.0
T2_e = 0.1
cnot_error = 1e-3
placement = { kind = "top_layers", offset = 1 }
n_sims = 8
base_seed = 3
"#;

fn qramnet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qramnet"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn sweep_is_byte_identical_across_runs_and_worker_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "small.toml", SMALL);
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let out = qramnet(&["sweep", &cfg, "--out", a.to_str().unwrap(), "--json"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let out = qramnet(&["--workers", "1", "sweep", &cfg, "--out", b.to_str().unwrap()]);
    assert!(out.status.success());
    let a_bytes = fs::read(&a).unwrap();
    assert_eq!(a_bytes, fs::read(&b).unwrap());
    assert!(a_bytes.starts_with(b"#schema=1\n"));
    let text = String::from_utf8(a_bytes).unwrap();
    assert_eq!(text.lines().count(), 2 + 3);
    assert!(dir.path().join("a.json").exists());
}

#[test]
fn stdout_sweep_matches_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "small.toml", SMALL);
    let path = dir.path().join("x.csv");
    let to_file = qramnet(&["sweep", &cfg, "--out", path.to_str().unwrap()]);
    assert!(to_file.status.success());
    let to_stdout = qramnet(&["sweep", &cfg]);
    assert!(to_stdout.status.success());
    assert_eq!(to_stdout.stdout, fs::read(&path).unwrap());
}

#[test]
fn seed_flag_changes_rows() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "small.toml", SMALL);
    let a = qramnet(&["sweep", &cfg, "--seed", "3"]);
    let b = qramnet(&["sweep", &cfg, "--seed", "4"]);
    let c = qramnet(&["sweep", &cfg]);
    assert_eq!(a.stdout, c.stdout);
    assert_ne!(a.stdout, b.stdout);
}

#[test]
fn run_prints_json_for_single_point() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "one.toml", &SMALL.replace("[2, 3, 4]", "3"));
    let out = qramnet(&["run", &cfg, "--n-sims", "5"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["layers"], 3);
    assert_eq!(v["n_sims"], 5);
    assert!(v["mean_fidelity"].as_f64().unwrap() > 0.0);

    let multi = write_config(dir.path(), "multi.toml", SMALL);
    assert!(!qramnet(&["run", &multi]).status.success());
}

#[test]
fn config_errors_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let typo = write_config(dir.path(), "typo.toml", &format!("{SMALL}\nnsims = 3\n"));
    let out = qramnet(&["sweep", &typo]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("nsims"));

    let empty = write_config(dir.path(), "empty.toml", &SMALL.replace("[2, 3, 4]", "[]"));
    assert!(!qramnet(&["sweep", &empty]).status.success());

    assert!(!qramnet(&["sweep", "/nonexistent/cfg.toml"]).status.success());

    let cfg = write_config(dir.path(), "small.toml", SMALL);
    let blocked = dir.path().join("small.toml").join("x.csv");
    assert!(!qramnet(&["sweep", &cfg, "--out", blocked.to_str().unwrap()]).status.success());
    assert!(!qramnet(&["sweep", &cfg, "--max-grid", "2"]).status.success());
}

#[test]
fn presets_list_and_print() {
    let out = qramnet(&["preset", "--list"]);
    assert!(out.status.success());
    let names = String::from_utf8(out.stdout).unwrap();
    for n in ["fig6", "fig8", "fig14", "appF-fidelities-3"] {
        assert!(names.lines().any(|l| l == n), "{n}");
    }
    let out = qramnet(&["preset", "fig9"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let cfg = qramnet::SweepConfig::from_toml_str(&text).unwrap();
    assert_eq!(cfg.grid_size(), 55);

    assert!(!qramnet(&["preset", "fig99"]).status.success());
}
