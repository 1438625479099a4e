//! Binary operator container.
//!
//! Layout: the 8-byte magic `FEPMAT01`, a little-endian `u32` header
//! length, a UTF-8 JSON header, then `rows * cols` complex entries in
//! row-major order, each stored as two little-endian `f64` (re, im).

use std::io::{Read, Write};
use std::path::Path;

use faddeev_core::boundary_ops::{BoundaryOperator, SpaceTag};
use faddeev_core::{CMat, C64};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{EpError, EpResult};

pub const MAGIC: &[u8; 8] = b"FEPMAT01";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Header {
    pub curve: String,
    pub n: usize,
    /// spectral parameter `(re, im)`, absent for `k`-independent operators
    pub k: Option<(f64, f64)>,
    pub kind: String,
    pub domain: String,
    pub range: String,
    pub rows: usize,
    pub cols: usize,
    /// hex SHA-256 of the data block
    pub sha256: String,
}

pub fn space_label(tag: SpaceTag) -> &'static str {
    tag.label()
}

pub fn parse_space(label: &str) -> Option<SpaceTag> {
    [SpaceTag::L2, SpaceTag::HHalf, SpaceTag::HMinusHalf].into_iter().find(|t| t.label() == label)
}

pub fn encode_data(m: &CMat) -> Vec<u8> {
    let mut out = Vec::with_capacity(16 * m.nrows() * m.ncols());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let z = m[(i, j)];
            out.extend_from_slice(&z.re.to_le_bytes());
            out.extend_from_slice(&z.im.to_le_bytes());
        }
    }
    out
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Serialize a matrix with its header; `sha256`, `rows` and `cols` are filled in.
pub fn to_bytes(mut header: Header, m: &CMat) -> Vec<u8> {
    let data = encode_data(m);
    header.rows = m.nrows();
    header.cols = m.ncols();
    header.sha256 = sha256_hex(&data);
    let json = serde_json::to_vec(&header).expect("header serializes");
    let mut out = Vec::with_capacity(12 + json.len() + data.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(json.len() as u32).to_le_bytes());
    out.extend_from_slice(&json);
    out.extend_from_slice(&data);
    out
}

/// Parse and checksum-verify a container.
pub fn from_bytes(bytes: &[u8]) -> Result<(Header, CMat), String> {
    if bytes.len() < 12 || &bytes[..8] != MAGIC {
        return Err("bad magic".into());
    }
    let hlen = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
    let body = bytes.get(12..12 + hlen).ok_or("truncated header")?;
    let header: Header = serde_json::from_slice(body).map_err(|e| format!("header: {e}"))?;
    let data = &bytes[12 + hlen..];
    if data.len() != 16 * header.rows * header.cols {
        return Err(format!("data block has {} bytes, expected {}", data.len(), 16 * header.rows * header.cols));
    }
    if sha256_hex(data) != header.sha256 {
        return Err("checksum mismatch".into());
    }
    let mut m = CMat::zeros(header.rows, header.cols);
    for (idx, chunk) in data.chunks_exact(16).enumerate() {
        let re = f64::from_le_bytes(chunk[..8].try_into().unwrap());
        let im = f64::from_le_bytes(chunk[8..].try_into().unwrap());
        m[(idx / header.cols, idx % header.cols)] = C64::new(re, im);
    }
    Ok((header, m))
}

pub fn write(path: &Path, header: Header, m: &CMat) -> EpResult<()> {
    let bytes = to_bytes(header, m);
    // write-then-rename so concurrent readers never see a partial file
    let tmp = path.with_extension(format!("tmp{}", std::process::id()));
    let mut f = std::fs::File::create(&tmp).map_err(|e| EpError::io(&tmp, e))?;
    f.write_all(&bytes).map_err(|e| EpError::io(&tmp, e))?;
    drop(f);
    std::fs::rename(&tmp, path).map_err(|e| EpError::io(path, e))
}

pub fn read(path: &Path) -> EpResult<(Header, CMat)> {
    let mut bytes = Vec::new();
    std::fs::File::open(path).and_then(|mut f| f.read_to_end(&mut bytes)).map_err(|e| EpError::io(path, e))?;
    from_bytes(&bytes).map_err(|msg| EpError::Container { path: path.to_path_buf(), msg })
}

/// Header describing a boundary operator.
pub fn operator_header(op: &BoundaryOperator, kind: &str, k: Option<C64>) -> Header {
    Header {
        curve: op.nodes.curve.name.clone(),
        n: op.dim(),
        k: k.map(|k| (k.re, k.im)),
        kind: kind.to_string(),
        domain: space_label(op.domain).to_string(),
        range: space_label(op.range).to_string(),
        rows: 0,
        cols: 0,
        sha256: String::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn header() -> Header {
        Header {
            curve: "circle".into(),
            n: 3,
            k: Some((0.1, -0.2)),
            kind: "s".into(),
            domain: "H^-1/2".into(),
            range: "H^1/2".into(),
            rows: 0,
            cols: 0,
            sha256: String::new(),
        }
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let m = CMat::from_fn(3, 2, |i, j| C64::new(i as f64 / 3.0, -(j as f64) * 1e-300));
        let (h, back) = from_bytes(&to_bytes(header(), &m)).unwrap();
        assert_eq!((h.rows, h.cols), (3, 2));
        assert_eq!(back, m);
    }

    #[test]
    fn flipped_bit_is_detected() {
        let m = CMat::from_element(2, 2, C64::new(1.0, 2.0));
        let mut bytes = to_bytes(header(), &m);
        let last = bytes.len() - 1;
        bytes[last] ^= 1;
        assert_eq!(from_bytes(&bytes).unwrap_err(), "checksum mismatch");
    }
}
