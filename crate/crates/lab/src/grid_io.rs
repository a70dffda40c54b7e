//! Grid CSV files, JSON sidecars and the metadata header shared by all outputs.
//!
//! A grid file looks like
//!
//! ```text
//! # superbroad 0.1.0 config=3f2a… shape=quadratic(beta=1) duration_ns=177.777778
//! amplitude_mhz\detuning_mhz,-60,-59.5,…
//! 0,0,0,…
//! 0.25,1.2345e-05,…
//! ```
//!
//! The first row holds the detunings, the first column the amplitudes, and
//! the body P₂ at nine significant digits.

use std::fmt::Write as _;

use serde::Serialize;
use sha2::{Digest, Sha256};
use superbroad_core::landscape::LandscapeGrid;

use crate::exit::LabError;

pub const TOOL: &str = "superbroad";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
const CORNER: &str = "amplitude_mhz\\detuning_mhz";

/// Formats like C's `%.9g`.
pub fn sig9(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let exp = v.abs().log10().floor() as i32;
    let sci = format!("{v:.8e}");
    // rounding can bump the exponent, so read it back from the scientific form
    let exp = sci.rsplit('e').next().and_then(|e| e.parse::<i32>().ok()).unwrap_or(exp);
    if (-5..9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        let fixed = format!("{v:.decimals$}");
        if fixed.contains('.') {
            fixed.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            fixed
        }
    } else {
        let (mantissa, e) = sci.split_once('e').expect("scientific form");
        let mantissa = if mantissa.contains('.') {
            mantissa.trim_end_matches('0').trim_end_matches('.')
        } else {
            mantissa
        };
        format!("{mantissa}e{e}")
    }
}

/// First 16 hex digits of the SHA-256 of the configuration's JSON form.
pub fn config_hash<T: Serialize>(config: &T) -> String {
    let json = serde_json::to_vec(config).expect("config serialises");
    let digest = Sha256::digest(&json);
    digest.iter().take(8).fold(String::new(), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

/// `# superbroad <version> config=<hash> key=value …`
pub fn header_line(hash: &str, fields: &[(&str, String)]) -> String {
    let mut line = format!("# {TOOL} {VERSION} config={hash}");
    for (k, v) in fields {
        let _ = write!(line, " {k}={v}");
    }
    line
}

/// Parses `key=value` pairs from a header line.
pub fn header_fields(line: &str) -> Vec<(String, String)> {
    line.trim_start_matches('#')
        .split_whitespace()
        .filter_map(|tok| tok.split_once('='))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

pub fn write_grid_csv(grid: &LandscapeGrid, header: &str) -> String {
    let mut out = String::with_capacity(12 * (grid.p2.len() + grid.cols() + grid.rows()) + header.len() + 64);
    out.push_str(header);
    out.push('\n');
    out.push_str(CORNER);
    for d in &grid.detunings {
        out.push(',');
        out.push_str(&sig9(*d));
    }
    out.push('\n');
    for i in 0..grid.rows() {
        out.push_str(&sig9(grid.amplitudes[i]));
        for v in grid.row(i) {
            out.push(',');
            out.push_str(&sig9(*v));
        }
        out.push('\n');
    }
    out
}

fn bad(detail: impl Into<String>) -> LabError {
    LabError::Format {
        what: "grid file",
        detail: detail.into(),
    }
}

fn parse_num(tok: &str, line: usize) -> Result<f64, LabError> {
    tok.trim()
        .parse::<f64>()
        .map_err(|_| bad(format!("line {line}: '{tok}' is not a number")))
}

/// Reads a grid written by [`write_grid_csv`]. Shape and duration come from the
/// header when present.
pub fn read_grid_csv(text: &str) -> Result<LandscapeGrid, LabError> {
    let mut shape_id = String::from("unknown");
    let mut duration = f64::NAN;
    let mut detunings: Option<Vec<f64>> = None;
    let mut amplitudes = Vec::new();
    let mut p2 = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let lineno = n + 1;
        if line.trim().is_empty() {
            continue;
        }
        if line.starts_with('#') {
            for (k, v) in header_fields(line) {
                match k.as_str() {
                    "shape" => shape_id = v,
                    "duration_ns" => duration = parse_num(&v, lineno)?,
                    _ => {}
                }
            }
            continue;
        }
        let mut cells = line.split(',');
        let first = cells.next().unwrap_or_default();
        match detunings {
            None => {
                detunings = Some(cells.map(|c| parse_num(c, lineno)).collect::<Result<_, _>>()?);
            }
            Some(ref d) => {
                amplitudes.push(parse_num(first, lineno)?);
                let before = p2.len();
                for c in cells {
                    p2.push(parse_num(c, lineno)?);
                }
                if p2.len() - before != d.len() {
                    return Err(bad(format!(
                        "line {lineno}: {} values, header has {} detunings",
                        p2.len() - before,
                        d.len()
                    )));
                }
            }
        }
    }
    let detunings = detunings.ok_or_else(|| bad("no detuning row"))?;
    LandscapeGrid::new(detunings, amplitudes, p2, shape_id, duration).map_err(|e| bad(e.to_string()))
}

/// Optional JSON companion of a grid file.
#[derive(Debug, Clone, Serialize)]
pub struct Sidecar<'a, C: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub config_hash: &'a str,
    pub shape: &'a str,
    pub duration_ns: f64,
    pub rows: usize,
    pub cols: usize,
    pub config: &'a C,
    /// Unix seconds; only recorded on request so repeated runs stay byte-identical.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generated_unix: Option<u64>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn sig9_matches_printf_g() {
        assert_eq!(sig9(0.0), "0");
        assert_eq!(sig9(1.0), "1");
        assert_eq!(sig9(-60.0), "-60");
        assert_eq!(sig9(0.5), "0.5");
        assert_eq!(sig9(177.77777777777777), "177.777778");
        assert_eq!(sig9(1.0 / 3.0), "0.333333333");
        assert_eq!(sig9(1.234e-7), "1.234e-7");
        assert_eq!(sig9(0.99999999999), "1");
        assert_eq!(sig9(123456789012.0), "1.23456789e11");
    }

    proptest! {
        #[test]
        fn sig9_keeps_nine_digits(v in -1e6f64..1e6) {
            let back: f64 = sig9(v).parse().unwrap();
            prop_assert!((back - v).abs() <= 1e-8 * v.abs().max(1e-300) + 1e-300);
        }
    }

    #[test]
    fn grid_round_trip() {
        let grid = LandscapeGrid::new(
            vec![-1.0, 0.0, 1.0],
            vec![0.0, 2.5],
            vec![0.0, 0.0, 0.0, 0.1, 0.987654321, 1.0 / 3.0],
            "quadratic(beta=1)".into(),
            177.8,
        )
        .unwrap();
        let text = write_grid_csv(&grid, &header_line("abc", &[("shape", grid.shape_id.clone()), ("duration_ns", sig9(177.8))]));
        let back = read_grid_csv(&text).unwrap();
        assert_eq!(back.detunings, grid.detunings);
        assert_eq!(back.amplitudes, grid.amplitudes);
        assert_eq!(back.shape_id, grid.shape_id);
        assert_eq!(back.duration, 177.8);
        for (a, b) in back.p2.iter().zip(&grid.p2) {
            assert!((a - b).abs() < 1e-9);
        }
        assert_eq!(write_grid_csv(&back, &header_line("abc", &[("shape", back.shape_id.clone()), ("duration_ns", sig9(177.8))])), text);
    }

    #[test]
    fn malformed_grids_rejected() {
        assert!(read_grid_csv("").is_err());
        assert!(read_grid_csv("x,1,2\n0,0.1\n").is_err());
        assert!(read_grid_csv("x,1,2\n0,0.1,abc\n").is_err());
        assert!(read_grid_csv("x,1,2\n0,0.1,2\n1,0,0\n").is_err());
    }

    #[test]
    fn hash_is_stable_and_sensitive() {
        #[derive(Serialize)]
        struct C {
            a: u32,
        }
        assert_eq!(config_hash(&C { a: 1 }), config_hash(&C { a: 1 }));
        assert_ne!(config_hash(&C { a: 1 }), config_hash(&C { a: 2 }));
        assert_eq!(config_hash(&C { a: 1 }).len(), 16);
    }
}
