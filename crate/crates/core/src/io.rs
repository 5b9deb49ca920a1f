//! File formats: the TWF1 field container, multiplier tables, JSON
//! sidecars with content checksums, and CSV formatting helpers.
//!
//! A TWF1 file is a single JSON header line (UTF-8, terminated by `\n`)
//! followed by the raw little-endian `f64` pairs `(re, im)` of the samples
//! in row-major order. Round trips are bit-exact.

use crate::error::{Error, Result};
use crate::grid::{Field, GridSpec};
use crate::spectral::MultiplierSpec;
use crate::C64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

#[derive(Serialize, Deserialize)]
struct Twf1Header {
    magic: String,
    dim: usize,
    points: usize,
    half_width: f64,
    label: String,
}

/// Writes a field as TWF1.
pub fn write_field(path: &Path, f: &Field) -> Result<()> {
    f.check_finite()?;
    let header = Twf1Header {
        magic: "TWF1".into(),
        dim: f.grid.dim,
        points: f.grid.points,
        half_width: f.grid.half_width,
        label: f.label.clone(),
    };
    let mut out = serde_json::to_vec(&header).map_err(|e| Error::Format(e.to_string()))?;
    out.push(b'\n');
    out.reserve(16 * f.values.len());
    for v in &f.values {
        out.extend_from_slice(&v.re.to_le_bytes());
        out.extend_from_slice(&v.im.to_le_bytes());
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Reads a TWF1 field (bit-exact inverse of [`write_field`]).
pub fn read_field(path: &Path) -> Result<Field> {
    let bytes = std::fs::read(path)?;
    let nl = bytes
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| Error::Format("TWF1: missing header line".into()))?;
    let header: Twf1Header = serde_json::from_slice(&bytes[..nl])
        .map_err(|e| Error::Format(format!("TWF1 header: {e}")))?;
    if header.magic != "TWF1" {
        return Err(Error::Format(format!("bad magic '{}'", header.magic)));
    }
    let grid = GridSpec::new(header.dim, header.points, header.half_width)?;
    let body = &bytes[nl + 1..];
    if body.len() != 16 * grid.len() {
        return Err(Error::Format(format!(
            "TWF1 body: expected {} bytes for {} samples, found {}",
            16 * grid.len(),
            grid.len(),
            body.len()
        )));
    }
    let values = body
        .chunks_exact(16)
        .map(|c| {
            C64::new(
                f64::from_le_bytes(c[..8].try_into().unwrap()),
                f64::from_le_bytes(c[8..].try_into().unwrap()),
            )
        })
        .collect();
    Field::from_values(grid, values, &header.label)
}

/// Metadata sidecar written next to generated artifacts.
#[derive(Serialize, Deserialize)]
pub struct Sidecar {
    pub dim: usize,
    pub points: usize,
    pub half_width: f64,
    pub label: String,
    /// SHA-256 of the TWF1 file, hex.
    pub sha256: String,
    /// Free-form parameter record for reproducibility.
    pub params: BTreeMap<String, String>,
}

/// Writes `path.json` describing the artifact at `path`.
pub fn write_sidecar(path: &Path, f: &Field, params: BTreeMap<String, String>) -> Result<()> {
    let bytes = std::fs::read(path)?;
    let mut hasher = Sha256::new();
    hasher.update(&bytes);
    let sidecar = Sidecar {
        dim: f.grid.dim,
        points: f.grid.points,
        half_width: f.grid.half_width,
        label: f.label.clone(),
        sha256: format!("{:x}", hasher.finalize()),
        params,
    };
    let json =
        serde_json::to_string_pretty(&sidecar).map_err(|e| Error::Format(e.to_string()))?;
    std::fs::write(path.with_extension("json"), json)?;
    Ok(())
}

/// Writes a multiplier table: a header line `TWM1 <d> <K> <description>`
/// followed by lines `k value_re value_im` (17 significant digits).
pub fn write_multiplier_spec(w: &mut impl Write, spec: &MultiplierSpec) -> Result<()> {
    writeln!(w, "TWM1 {} {} {}", spec.d, spec.truncation, spec.description)?;
    for (k, v) in &spec.values {
        writeln!(w, "{k} {} {}", format_g17(v.re), format_g17(v.im))?;
    }
    Ok(())
}

/// Reads a multiplier table written by [`write_multiplier_spec`].
pub fn read_multiplier_spec(r: &mut impl Read) -> Result<MultiplierSpec> {
    let mut text = String::new();
    r.read_to_string(&mut text)?;
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| Error::Format("empty multiplier file".into()))?;
    let mut parts = header.splitn(4, ' ');
    if parts.next() != Some("TWM1") {
        return Err(Error::Format("multiplier file: bad magic (want TWM1)".into()));
    }
    let d: usize = parts
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::Format("multiplier header: bad d".into()))?;
    let truncation: usize = parts
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::Format("multiplier header: bad truncation".into()))?;
    let description = parts.next().unwrap_or("").to_string();
    let mut values = BTreeMap::new();
    for (ln, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let mut cols = line.split_whitespace();
        let parse = |s: Option<&str>, what: &str| -> Result<f64> {
            s.and_then(|v| v.parse().ok())
                .ok_or_else(|| Error::Format(format!("multiplier line {}: bad {what}", ln + 2)))
        };
        let k: usize = cols
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Format(format!("multiplier line {}: bad k", ln + 2)))?;
        let re = parse(cols.next(), "real part")?;
        let im = parse(cols.next(), "imaginary part")?;
        values.insert(k, C64::new(re, im));
    }
    for k in 0..=truncation {
        if !values.contains_key(&k) {
            return Err(Error::Format(format!(
                "multiplier file: missing value at k = {k} (truncation {truncation})"
            )));
        }
    }
    Ok(MultiplierSpec { d, values, truncation, description })
}

/// Formats a float with 17 significant digits (shortest form that still
/// round-trips `f64` exactly); used for all CSV output so identical runs
/// diff cleanly.
pub fn format_g17(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let s = format!("{:.16e}", v);
    // Trim trailing zeros in the mantissa for stable, compact output.
    if let Some((mant, exp)) = s.split_once('e') {
        let mant = mant.trim_end_matches('0').trim_end_matches('.');
        format!("{mant}e{exp}")
    } else {
        s
    }
}

/// Writes one CSV row from string cells.
pub fn csv_row(w: &mut impl Write, cells: &[String]) -> Result<()> {
    writeln!(w, "{}", cells.join(","))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twf1_round_trip_is_bit_exact() {
        let grid = GridSpec::landau(2, 16).unwrap();
        let f = Field::from_fn(grid, "probe", |z| {
            C64::new((-z[0] * z[0] - 0.3 * z[1]).exp(), z[0] * 0.817 + 1e-300)
        });
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("probe.twf1");
        write_field(&path, &f).unwrap();
        let g = read_field(&path).unwrap();
        assert_eq!(f.grid, g.grid);
        assert_eq!(f.label, g.label);
        for (a, b) in f.values.iter().zip(&g.values) {
            assert_eq!(a.re.to_bits(), b.re.to_bits());
            assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
    }

    #[test]
    fn sidecar_checksums_the_artifact() {
        let grid = GridSpec::landau(2, 8).unwrap();
        let f = Field::from_fn(grid, "s", |z| C64::new((-z[0] * z[0]).exp(), 0.0));
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.twf1");
        write_field(&path, &f).unwrap();
        write_sidecar(&path, &f, BTreeMap::new()).unwrap();
        let json = std::fs::read_to_string(path.with_extension("json")).unwrap();
        let sc: Sidecar = serde_json::from_str(&json).unwrap();
        assert_eq!(sc.sha256.len(), 64);
        assert_eq!(sc.points, 8);
    }

    #[test]
    fn multiplier_table_round_trip() {
        let spec = MultiplierSpec::from_fn(1, 7, "heat t=0.25", |x| {
            C64::new((-0.25 * x).exp(), 1.0 / x)
        })
        .unwrap();
        let mut buf = Vec::new();
        write_multiplier_spec(&mut buf, &spec).unwrap();
        let back = read_multiplier_spec(&mut buf.as_slice()).unwrap();
        assert_eq!(back.d, 1);
        assert_eq!(back.truncation, 7);
        assert_eq!(back.description, "heat t=0.25");
        for k in 0..=7 {
            assert_eq!(spec.value(k).unwrap(), back.value(k).unwrap());
        }
    }

    #[test]
    fn malformed_inputs_are_rejected() {
        assert!(read_multiplier_spec(&mut "BOGUS 1 1 x\n".as_bytes()).is_err());
        assert!(read_multiplier_spec(&mut "TWM1 1 3 gap\n0 1 0\n".as_bytes()).is_err());
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.twf1");
        std::fs::write(&path, b"{\"magic\":\"NOPE\",\"dim\":2,\"points\":4,\"half_width\":3.0,\"label\":\"\"}\n").unwrap();
        assert!(read_field(&path).is_err());
    }

    #[test]
    fn g17_formatting_round_trips() {
        for v in [1.0, -0.1, 3.141592653589793, 1e-300, 2.2250738585072014e-308, 123456.789] {
            let s = format_g17(v);
            assert_eq!(s.parse::<f64>().unwrap(), v, "{s}");
        }
        assert_eq!(format_g17(0.0), "0");
    }
}
