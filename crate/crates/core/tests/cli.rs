use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn reflectlab(args: &[&str], env_out: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_reflectlab"));
    cmd.args(args).env_remove("REFLECTLAB_OUT");
    if let Some(p) = env_out {
        cmd.env("REFLECTLAB_OUT", p);
    }
    cmd.output().expect("binary runs")
}

fn write_config(dir: &Path, text: &str) -> String {
    let p = dir.join("run.toml");
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn passing_run_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "presets = [\"meromorphic_real\", \"recursive_table\"]\n");
    let out = dir.path().join("out");
    let o = reflectlab(&["run", "--config", &cfg, "--out", out.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let summary = fs::read_to_string(out.join("summary.csv")).unwrap();
    assert!(summary.starts_with("id,kind,paper_anchor,hypothesis_status,max_residual,tolerance,status,runtime_ms"));
    assert_eq!(summary.lines().count(), 3);
    assert!(out.join("reports/meromorphic_real.json").exists());
    assert!(out.join("reports.json").exists());
}

#[test]
fn environment_overrides_out_flag() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "output_dir = \"ignored\"\npresets = [\"meromorphic_real\"]\n");
    let flag = dir.path().join("flag");
    let env = dir.path().join("env");
    let o = reflectlab(&["run", "--config", &cfg, "--out", flag.to_str().unwrap()], Some(&env));
    assert_eq!(o.status.code(), Some(0));
    assert!(env.join("summary.csv").exists());
    assert!(!flag.exists());
}

#[test]
fn unknown_kind_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[[experiment]]\nid = \"x\"\nkind = \"warp_drive\"\n");
    let o = reflectlab(&["run", "--config", &cfg, "--out", dir.path().join("o").to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("warp_drive") && err.contains("`kind`"), "{err}");
}

#[test]
fn unmet_expectation_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "[[experiment]]\nid = \"bump\"\nkind = \"minimal_surface\"\n[experiment.params]\nperturbation = 1e-3\n",
    );
    let o = reflectlab(&["run", "--config", &cfg, "--out", dir.path().join("o").to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn lookup_needs_a_table() {
    let o = reflectlab(&["lookup"], None);
    assert_eq!(o.status.code(), Some(2));
    let o = reflectlab(&["lookup", "--type", "CI", "--n", "2"], None);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).contains("Sp(n/2, C)"));
}

#[test]
fn chain_check_negative_control_fails() {
    let o = reflectlab(&["chain-check", "--family", "hermitian_hyperbolic", "--n", "3", "--negative-control"], None);
    assert_eq!(o.status.code(), Some(1));
    let o = reflectlab(&["chain-check", "--family", "quadric", "--n", "3", "--q", "1", "--trials", "20"], None);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
}
