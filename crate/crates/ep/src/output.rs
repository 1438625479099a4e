//! CSV and JSON artifacts.

use std::path::Path;

use faddeev_core::exceptional::{Locus, ScanRecord};
use faddeev_core::green::remainder;
use faddeev_core::transform::TransformValue;
use faddeev_core::C64;
use serde::Serialize;

use crate::config::GreenDumpSpec;
use crate::container::sha256_hex;
use crate::error::{EpError, EpResult};
use crate::runner::FileEntry;

fn opt(x: Option<f64>) -> String {
    x.map_or_else(String::new, |v| v.to_string())
}

fn writer(path: &Path) -> EpResult<csv::Writer<std::fs::File>> {
    csv::Writer::from_path(path).map_err(|e| csv_error(path, e))
}

fn csv_error(path: &Path, e: csv::Error) -> EpError {
    EpError::io(path, std::io::Error::other(e))
}

fn finish(path: &Path, mut w: csv::Writer<std::fs::File>) -> EpResult<()> {
    w.flush().map_err(|e| EpError::io(path, e))
}

pub fn write_scan_csv(path: &Path, records: &[ScanRecord]) -> EpResult<()> {
    let mut w = writer(path)?;
    let header = ["k_re", "k_im", "eps", "sigma_min_A", "eig_near_zero", "sigma_min_P", "n_minus", "flags"];
    w.write_record(header).map_err(|e| csv_error(path, e))?;
    for r in records {
        let flags: Vec<String> = r.flags.iter().map(|f| f.label()).collect();
        let row = [
            r.k.k.re.to_string(),
            r.k.k.im.to_string(),
            opt(r.eps),
            opt(r.sigma_min_a),
            opt(r.eig_near_zero),
            opt(r.sigma_min_p),
            r.n_minus.map_or_else(String::new, |n| n.to_string()),
            flags.join(";"),
        ];
        w.write_record(&row).map_err(|e| csv_error(path, e))?;
    }
    finish(path, w)
}

pub fn write_locus_csv(path: &Path, locus: &Locus) -> EpResult<()> {
    let mut w = writer(path)?;
    w.write_record(["phi", "eps_star", "k_abs", "cell_lo", "cell_hi", "ratio"]).map_err(|e| csv_error(path, e))?;
    let target = locus.mu * locus.lambda;
    for p in &locus.points {
        let row = [p.phi, p.eps, p.k_abs, p.cell.0, p.cell.1, p.eps / target].map(|v| v.to_string());
        w.write_record(&row).map_err(|e| csv_error(path, e))?;
    }
    finish(path, w)
}

pub fn write_transform_csv(path: &Path, values: &[TransformValue]) -> EpResult<()> {
    let mut w = writer(path)?;
    w.write_record(["k_re", "k_im", "t_re", "t_im", "bound_product"]).map_err(|e| csv_error(path, e))?;
    for v in values {
        let row = [v.k.k.re, v.k.k.im, v.t.re, v.t.im, v.bound_product].map(|x| x.to_string());
        w.write_record(&row).map_err(|e| csv_error(path, e))?;
    }
    finish(path, w)
}

/// `N(w)` on a polar grid `|w| <= w_max`.
pub fn write_green_dump(path: &Path, spec: &GreenDumpSpec) -> EpResult<()> {
    let mut w = writer(path)?;
    w.write_record(["w_re", "w_im", "N"]).map_err(|e| csv_error(path, e))?;
    for i in 0..spec.n_r {
        let r = spec.w_max * (i + 1) as f64 / spec.n_r as f64;
        for j in 0..spec.n_theta {
            let z = C64::from_polar(r, std::f64::consts::TAU * j as f64 / spec.n_theta as f64);
            let row = [z.re, z.im, remainder(z)].map(|x| x.to_string());
            w.write_record(&row).map_err(|e| csv_error(path, e))?;
        }
    }
    finish(path, w)
}

pub fn write_json(path: &Path, value: &impl Serialize) -> EpResult<()> {
    let mut text = serde_json::to_string_pretty(value).expect("serializes");
    text.push('\n');
    std::fs::write(path, text).map_err(|e| EpError::io(path, e))
}

/// Files in `dir` (not recursive), sorted by name, with sizes and checksums.
pub fn inventory(dir: &Path, skip: &[&str]) -> EpResult<Vec<FileEntry>> {
    let mut out = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(|e| EpError::io(dir, e))? {
        let entry = entry.map_err(|e| EpError::io(dir, e))?;
        let name = entry.file_name().to_string_lossy().into_owned();
        if skip.contains(&name.as_str()) || !entry.path().is_file() {
            continue;
        }
        let bytes = std::fs::read(entry.path()).map_err(|e| EpError::io(entry.path(), e))?;
        out.push(FileEntry { name, bytes: bytes.len() as u64, sha256: sha256_hex(&bytes) });
    }
    out.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(out)
}
