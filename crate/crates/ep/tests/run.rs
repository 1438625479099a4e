use std::path::Path;

use faddeev_ep::config::{Detector, KGridSpec};
use faddeev_ep::{run, RunConfig};

fn small_scan(out: &Path, cache: Option<&Path>) -> RunConfig {
    let mut cfg = RunConfig {
        n: 64,
        k_grid: KGridSpec::Polar { k_min: 1e-3, k_max: 0.5, n_radii: 3, n_angles: 2 },
        detectors: vec![Detector::SigmaScan],
        output_dir: out.to_path_buf(),
        threads: 1,
        ..RunConfig::default()
    };
    match cache {
        Some(dir) => cfg.cache.dir = Some(dir.to_path_buf()),
        None => cfg.cache.enabled = false,
    }
    cfg
}

fn read(dir: &Path, name: &str) -> Vec<u8> {
    std::fs::read(dir.join(name)).unwrap_or_else(|e| panic!("{}: {e}", dir.join(name).display()))
}

#[test]
fn output_layout_and_manifest() {
    let out = tempfile::tempdir().unwrap();
    let cfg = small_scan(out.path(), None);
    let m = run(&cfg, Path::new(".")).unwrap();
    assert_eq!(m.output_dir, out.path().join(cfg.hash()));
    let names: Vec<&str> = m.files.iter().map(|f| f.name.as_str()).collect();
    assert_eq!(names, ["scan.csv", "summary.json"]);
    assert!(m.output_dir.join("manifest.json").is_file());
    let csv = String::from_utf8(read(&m.output_dir, "scan.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("k_re,k_im,eps,sigma_min_A,eig_near_zero,sigma_min_P,n_minus,flags"));
    assert_eq!(lines.count(), 6);
    assert_eq!(m.exit_code(), 0);
}

#[test]
fn runs_are_deterministic_across_threads() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let ma = run(&small_scan(a.path(), None), Path::new(".")).unwrap();
    let mut cfg = small_scan(b.path(), None);
    cfg.threads = 3;
    let mb = run(&cfg, Path::new(".")).unwrap();
    assert_eq!(ma.config_hash, mb.config_hash);
    assert_eq!(read(&ma.output_dir, "scan.csv"), read(&mb.output_dir, "scan.csv"));
}

#[test]
fn cache_is_transparent_and_fast() {
    let cache = tempfile::tempdir().unwrap();
    let (a, b, c) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let mut cold_cfg = small_scan(a.path(), Some(cache.path()));
    cold_cfg.n = 128;
    let cold = run(&cold_cfg, Path::new(".")).unwrap();
    assert_eq!(cold.cache.hits, 0);
    assert!(cold.cache.misses > 0);

    let mut warm_cfg = cold_cfg.clone();
    warm_cfg.output_dir = b.path().to_path_buf();
    let warm = run(&warm_cfg, Path::new(".")).unwrap();
    assert_eq!(warm.cache.misses, 0);
    assert_eq!(warm.cache.hits, cold.cache.misses);

    let mut off_cfg = cold_cfg.clone();
    off_cfg.output_dir = c.path().to_path_buf();
    off_cfg.cache.enabled = false;
    let off = run(&off_cfg, Path::new(".")).unwrap();

    let reference = read(&off.output_dir, "scan.csv");
    assert_eq!(read(&cold.output_dir, "scan.csv"), reference);
    assert_eq!(read(&warm.output_dir, "scan.csv"), reference);

    let speedup = cold.timings["assembly"] / warm.timings["assembly"];
    assert!(speedup >= 10.0, "assembly speedup {speedup:.1}x");
}

#[test]
fn corrupted_entry_is_evicted_and_rebuilt() {
    let cache = tempfile::tempdir().unwrap();
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let first = run(&small_scan(a.path(), Some(cache.path())), Path::new(".")).unwrap();

    // flip bytes in the middle of one stored operator
    let mut entries: Vec<_> =
        walk(cache.path()).into_iter().filter(|p| p.extension().is_some_and(|e| e == "fep")).collect();
    entries.sort();
    let victim = &entries[0];
    let mut bytes = std::fs::read(victim).unwrap();
    let mid = bytes.len() / 2;
    bytes[mid] ^= 0xff;
    bytes[mid + 1] ^= 0x0f;
    std::fs::write(victim, bytes).unwrap();

    let second = run(&small_scan(b.path(), Some(cache.path())), Path::new(".")).unwrap();
    assert_eq!(second.cache.evictions, 1);
    assert_eq!(second.cache.misses, 1);
    assert_eq!(read(&first.output_dir, "scan.csv"), read(&second.output_dir, "scan.csv"));
}

fn walk(dir: &Path) -> Vec<std::path::PathBuf> {
    let mut out = Vec::new();
    for e in std::fs::read_dir(dir).unwrap() {
        let p = e.unwrap().path();
        if p.is_dir() {
            out.extend(walk(&p));
        } else {
            out.push(p);
        }
    }
    out
}

#[test]
fn empty_detector_list_writes_an_empty_manifest() {
    let out = tempfile::tempdir().unwrap();
    let mut cfg = small_scan(out.path(), None);
    cfg.detectors.clear();
    let m = run(&cfg, Path::new(".")).unwrap();
    assert!(m.detectors.is_empty());
    assert_eq!(m.validation, None);
    let text = std::fs::read_to_string(m.output_dir.join("manifest.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["detectors"].as_array().map(Vec::len), Some(0));
}

#[test]
fn locus_summary_and_csv() {
    let out = tempfile::tempdir().unwrap();
    let mut cfg = small_scan(out.path(), None);
    cfg.detectors = vec![Detector::Locus];
    cfg.locus.n_angles = 2;
    cfg.locus.n_eps = 16;
    let m = run(&cfg, Path::new(".")).unwrap();
    let text = std::fs::read_to_string(m.output_dir.join("summary.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    let locus = &v["locus"];
    let mu = locus["mu"].as_f64().unwrap();
    assert!((mu - 15.0 * std::f64::consts::PI / 28.0).abs() < 1e-10);
    assert_eq!(locus["found"], 2);
    let eps = locus["eps_star_mean"].as_f64().unwrap();
    let ratio = locus["ratio"].as_f64().unwrap();
    assert!((ratio - eps / (mu * 0.05)).abs() < 1e-12);
    let csv = String::from_utf8(read(&m.output_dir, "locus.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
}
