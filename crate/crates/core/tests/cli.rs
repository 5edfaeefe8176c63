use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn scenarios() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

fn nsk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nsk"))
        .args(args)
        .env_remove("NSK_OUT_DIR")
        .output()
        .expect("spawn nsk")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn csv_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir.join("series"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "csv"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

#[test]
fn passing_scenario_exits_zero_and_writes_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("heat");
    let cfg = scenarios().join("heat_anchor.toml");
    let o = nsk(&["linear-decay", "--config", path(&cfg), "--out", path(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["manifest.json", "report.json"] {
        assert!(out.join(f).is_file(), "{f}");
    }
    assert!(!csv_files(&out).is_empty());
    assert!(fs::read_dir(out.join("plots")).unwrap().count() > 0);
    let report: serde_json::Value = serde_json::from_slice(&fs::read(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["verdict"], "pass");
}

#[test]
fn failing_verdict_exits_two() {
    let tmp = tempfile::tempdir().unwrap();
    let src = fs::read_to_string(scenarios().join("heat_anchor.toml")).unwrap();
    let strict = src.replace("tolerance = 0.05", "tolerance = 1e-30");
    assert_ne!(src, strict);
    let cfg = tmp.path().join("strict.toml");
    fs::write(&cfg, strict).unwrap();
    let o = nsk(&["linear-decay", "--config", path(&cfg), "--out", path(&tmp.path().join("o"))]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn invalid_config_exits_one_with_message() {
    let tmp = tempfile::tempdir().unwrap();
    let src = fs::read_to_string(scenarios().join("heat_anchor.toml")).unwrap();
    let cfg = tmp.path().join("typo.toml");
    fs::write(&cfg, src.replace("kappa_star", "kapa_star")).unwrap();
    let o = nsk(&["linear-decay", "--config", path(&cfg), "--out", path(&tmp.path().join("o"))]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("kapa_star"));

    let o = nsk(&["verify-symbols", "--config", path(&scenarios().join("heat_anchor.toml"))]);
    assert_eq!(o.status.code(), Some(1));
    let o = nsk(&["linear-decay", "--config", path(&tmp.path().join("missing.toml"))]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn out_dir_comes_from_environment() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("env");
    let o = Command::new(env!("CARGO_BIN_EXE_nsk"))
        .args(["verify-symbols", "--config", path(&scenarios().join("symbols.toml"))])
        .env("NSK_OUT_DIR", &out)
        .current_dir(tmp.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(out.join("report.json").is_file());
    assert!(!tmp.path().join("nsk-out").exists());
}

#[test]
fn dry_run_prints_normalized_config_without_running() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("o");
    let cfg = scenarios().join("nonlinear_2d_quick.toml");
    let o = nsk(&["nonlinear-run", "--config", path(&cfg), "--seed", "11", "--dry-run", "--out", path(&out)]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("seed = 11"));
    assert!(text.contains("tensor_width"));
    assert!(nsk_core::io::parse_config(&text).is_ok());
    assert!(!out.exists());
}

#[test]
fn reruns_write_identical_series() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = scenarios().join("nonlinear_2d_quick.toml");
    let runs: Vec<_> = ["a", "b"]
        .iter()
        .map(|name| {
            let out = tmp.path().join(name);
            let o = nsk(&["nonlinear-run", "--config", path(&cfg), "--out", path(&out)]);
            assert_eq!(o.status.code(), Some(0));
            csv_files(&out)
        })
        .collect();
    assert!(runs[0].len() > 1);
    assert_eq!(runs[0], runs[1]);
}

#[test]
fn sweep_runs_every_entry() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("sweep");
    let o = nsk(&["sweep", "--config", path(&scenarios().join("quick_sweep.toml")), "--threads", "2", "--out", path(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    for name in ["symbols", "heat_anchor", "nonlinear_2d_quick"] {
        assert!(out.join(name).join("report.json").is_file(), "{name}");
    }
}
