use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_faddeev-ep"));
    c.env_remove("FADDEEV_EP_CACHE");
    c
}

fn status(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn write(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn config_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", r#"{"n": 17}"#);
    let out = bin().arg("run").arg(&bad).output().unwrap();
    assert_eq!(status(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("n must be even"));

    let out = bin().arg("run").arg(dir.path().join("missing.json")).output().unwrap();
    assert_eq!(status(&out), 1);

    let out = bin().args(["scan", "--n", "zero"]).output().unwrap();
    assert_eq!(status(&out), 1);

    let out =
        bin().args(["locus", "--potential", "zero", "--no-cache", "--output-dir"]).arg(dir.path()).output().unwrap();
    assert_eq!(status(&out), 0, "a failing detector is recorded, not fatal");
}

#[test]
fn empty_run_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let cfg = write(
        dir.path(),
        "cfg.json",
        &format!(r#"{{"n": 32, "detectors": [], "output_dir": {:?}, "cache": {{"enabled": false}}}}"#, out_dir),
    );
    let out = bin().arg("run").arg(&cfg).output().unwrap();
    assert_eq!(status(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let runs: Vec<_> = std::fs::read_dir(&out_dir).unwrap().collect();
    assert_eq!(runs.len(), 1);
    let run_dir = runs[0].as_ref().unwrap().path();
    assert_eq!(run_dir.file_name().unwrap().len(), 16);
    assert!(run_dir.join("manifest.json").is_file());
    assert!(run_dir.join("summary.json").is_file());
}

#[test]
fn help_exits_with_zero() {
    assert_eq!(status(&bin().arg("--help").output().unwrap()), 0);
    assert_eq!(status(&bin().args(["validate", "--help"]).output().unwrap()), 0);
}

#[test]
fn validation_passes_on_the_default_circle() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["validate", "--curve", "circle", "--n", "64", "--no-cache", "--output-dir"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(status(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("PASS fout_identity"));
    assert!(!stdout.contains("FAIL"));
}

#[test]
fn validation_failure_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    // 16 nodes cannot resolve the kite
    let out = bin()
        .args(["validate", "--curve", "kite", "--n", "16", "--no-cache", "--output-dir"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(status(&out), 2);
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL f0_annihilates_constants"));
}

#[test]
fn cache_directory_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let out = bin()
        .env("FADDEEV_EP_CACHE", &cache)
        .args(["scan", "--n", "32", "--n-radii", "2", "--n-angles", "1", "--output-dir"])
        .arg(dir.path().join("out"))
        .output()
        .unwrap();
    assert_eq!(status(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let stored = std::fs::read_dir(&cache).unwrap().count();
    assert!(stored > 0, "nothing cached in {}", cache.display());
}

#[test]
fn shortcut_flags_reach_the_transform_grid() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["transform", "--n", "32", "--potential", "conductive", "--k-min", "1e-3", "--k-max", "1e-1"])
        .args(["--n-radii", "3", "--n-angles", "2", "--no-cache", "--output-dir"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(status(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let run_dir = std::fs::read_dir(dir.path()).unwrap().next().unwrap().unwrap().path();
    let csv = std::fs::read_to_string(run_dir.join("transform.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 6);
    assert!(csv.starts_with("k_re,k_im,t_re,t_im,bound_product"));
}
