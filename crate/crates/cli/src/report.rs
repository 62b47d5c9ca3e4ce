//! Report serialization.
//!
//! Payload files are deterministic: rerunning a command with identical
//! inputs reproduces them byte for byte. Anything run-specific (wall-clock
//! time, tool version) goes into a `.meta.json` sidecar next to the payload
//! so the payload itself stays comparable. Files land atomically via a
//! write-temp-then-rename, and their names encode the check that ran plus
//! a hash of the symbol file, so sweeps over fixtures never collide.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use szegolab_core::{IdentityReport, C64};

use crate::config::Format;
use crate::runner::CliError;

/// One tabulated section size. Complex logs are `[re, im]` pairs.
#[derive(Serialize, Debug)]
pub struct RowPayload {
    pub n: usize,
    pub lhs_log: [f64; 2],
    pub rhs_log: [f64; 2],
    pub residual: f64,
}

impl RowPayload {
    pub fn new(n: usize, lhs: C64, rhs: C64, residual: f64) -> Self {
        Self { n, lhs_log: [lhs.re, lhs.im], rhs_log: [rhs.re, rhs.im], residual }
    }
}

/// The full report payload. Field order is the serialization order.
#[derive(Serialize, Debug)]
pub struct ReportPayload {
    pub command: String,
    /// Which check actually ran (e.g. `th` resolves to the even or the
    /// non-even theorem at runtime).
    pub check: String,
    pub symbol_hash: String,
    pub block_size: usize,
    pub n_min: usize,
    pub n_max: usize,
    pub tol: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variant: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub function: Option<String>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub flatness: Option<f64>,
    /// Named scalar outputs (constants, fitted values) as `[re, im]` pairs,
    /// in key order.
    pub constants: BTreeMap<String, [f64; 2]>,
    pub rows: Vec<RowPayload>,
}

impl ReportPayload {
    pub fn from_identity(
        command: &str,
        report: &IdentityReport,
        symbol_hash: String,
        block_size: usize,
        n_min: usize,
        n_max: usize,
        tol: f64,
    ) -> Self {
        let rows = report
            .rows
            .iter()
            .map(|r| RowPayload::new(r.n, r.lhs_log, r.rhs_log, r.residual))
            .collect::<Vec<_>>();
        ReportPayload {
            command: command.to_string(),
            check: report.tag.as_str().to_string(),
            symbol_hash,
            block_size,
            n_min,
            n_max,
            tol,
            variant: None,
            function: None,
            pass: report.pass,
            flatness: report.flatness,
            constants: BTreeMap::new(),
            rows,
        }
    }

    pub fn insert_constant(&mut self, key: &str, value: C64) {
        self.constants.insert(key.to_string(), [value.re, value.im]);
    }

    /// File stem shared by the payload and its sidecar.
    pub fn file_stem(&self) -> String {
        format!("{}_{}", self.check.to_lowercase(), self.symbol_hash)
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("payload serializes");
        text.push('\n');
        text
    }

    /// Fixed column order; floats in scientific notation with the shortest
    /// digits that round-trip.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,lhs_log_re,lhs_log_im,rhs_log_re,rhs_log_im,residual\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{:e},{:e},{:e},{:e},{:e}\n",
                r.n, r.lhs_log[0], r.lhs_log[1], r.rhs_log[0], r.rhs_log[1], r.residual
            ));
        }
        out
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.to_json(),
            Format::Csv => self.to_csv(),
        }
    }
}

/// Written on numerical failure (exit status 3) so the failing stage is on
/// record, not just on stderr.
#[derive(Serialize, Debug)]
pub struct FailurePayload {
    pub command: String,
    pub stage: String,
    pub error: String,
    pub pass: bool,
}

#[derive(Serialize, Debug)]
struct MetaSidecar<'a> {
    generated_unix_ms: u128,
    tool_version: &'a str,
}

/// FNV-1a over the raw symbol file bytes; 16 hex digits.
pub fn symbol_hash(bytes: &[u8]) -> String {
    let mut h: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    format!("{h:016x}")
}

/// Atomic write: a temporary file in the target directory, then a rename.
pub fn write_atomic(dir: &Path, name: &str, contents: &[u8]) -> Result<PathBuf, CliError> {
    let final_path = dir.join(name);
    let tmp_path = dir.join(format!(".{name}.tmp-{}", std::process::id()));
    let io_err = |e: std::io::Error| {
        CliError::usage(format!("cannot write report `{}`: {e}", final_path.display()))
    };
    let mut tmp = std::fs::File::create(&tmp_path).map_err(io_err)?;
    tmp.write_all(contents).map_err(io_err)?;
    tmp.sync_all().map_err(io_err)?;
    drop(tmp);
    std::fs::rename(&tmp_path, &final_path).map_err(io_err)?;
    Ok(final_path)
}

/// Write the payload and its timestamp sidecar; returns the payload path.
pub fn write_report(payload: &ReportPayload, dir: &Path, format: Format) -> Result<PathBuf, CliError> {
    let stem = payload.file_stem();
    let path = write_atomic(
        dir,
        &format!("{stem}.{}", format.extension()),
        payload.render(format).as_bytes(),
    )?;
    write_meta(dir, &stem)?;
    Ok(path)
}

pub fn write_failure(payload: &FailurePayload, dir: &Path, symbol_hash: &str) -> Result<PathBuf, CliError> {
    let stem = format!("{}_{}_failed", payload.command.replace('-', "_"), symbol_hash);
    let mut text = serde_json::to_string_pretty(payload).expect("payload serializes");
    text.push('\n');
    let path = write_atomic(dir, &format!("{stem}.json"), text.as_bytes())?;
    write_meta(dir, &stem)?;
    Ok(path)
}

fn write_meta(dir: &Path, stem: &str) -> Result<(), CliError> {
    let now = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_millis())
        .unwrap_or(0);
    let meta = MetaSidecar { generated_unix_ms: now, tool_version: env!("CARGO_PKG_VERSION") };
    let mut text = serde_json::to_string_pretty(&meta).expect("meta serializes");
    text.push('\n');
    write_atomic(dir, &format!("{stem}.meta.json"), text.as_bytes())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_is_stable_and_input_sensitive() {
        let a = symbol_hash(b"abc");
        assert_eq!(a, symbol_hash(b"abc"));
        assert_ne!(a, symbol_hash(b"abd"));
        assert_eq!(a.len(), 16);
    }

    #[test]
    fn csv_header_and_row_shape() {
        let payload = ReportPayload {
            command: "det-seq".into(),
            check: "DET_SEQ".into(),
            symbol_hash: "0".repeat(16),
            block_size: 1,
            n_min: 1,
            n_max: 2,
            tol: 1e-8,
            variant: None,
            function: None,
            pass: true,
            flatness: None,
            constants: BTreeMap::new(),
            rows: vec![
                RowPayload::new(1, C64::new(0.25, 0.0), C64::new(0.0, 0.0), 0.0),
                RowPayload::new(2, C64::new(0.3125, 0.0), C64::new(0.0, 0.0), 0.0),
            ],
        };
        let csv = payload.to_csv();
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "n,lhs_log_re,lhs_log_im,rhs_log_re,rhs_log_im,residual"
        );
        assert_eq!(lines.next().unwrap(), "1,2.5e-1,0e0,0e0,0e0,0e0");
        assert_eq!(lines.clone().count(), 1);
    }

    #[test]
    fn json_is_deterministic() {
        let make = || {
            let mut p = ReportPayload {
                command: "bocg".into(),
                check: "BOCG".into(),
                symbol_hash: "f".repeat(16),
                block_size: 1,
                n_min: 1,
                n_max: 1,
                tol: 1e-8,
                variant: None,
                function: None,
                pass: true,
                flatness: Some(1.0),
                constants: BTreeMap::new(),
                rows: vec![RowPayload::new(1, C64::new(0.1, -0.2), C64::new(0.1, -0.2), 3e-16)],
            };
            p.insert_constant("log_g", C64::new(0.0, 0.0));
            p.insert_constant("log_e", C64::new(0.2876820724517809, 0.0));
            p.to_json()
        };
        assert_eq!(make(), make());
    }
}
