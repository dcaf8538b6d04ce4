//! Report writing: deterministic JSON bodies wrapped with provenance, CSV
//! summaries, and a separate metadata file for anything time-dependent.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::SystemTime;

use serde::Serialize;
use sha2::{Digest, Sha256};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Hex SHA-256 of the raw config bytes; embedded in every report.
pub fn config_hash(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    let mut out = String::with_capacity(64);
    for byte in digest {
        out.push_str(&format!("{byte:02x}"));
    }
    out
}

#[derive(Serialize)]
pub struct Envelope<T: Serialize> {
    pub tool_version: &'static str,
    pub config_sha256: String,
    #[serde(flatten)]
    pub body: T,
}

pub struct ReportWriter {
    dir: Option<PathBuf>,
    json: bool,
    csv: bool,
    config_sha256: String,
    started: SystemTime,
}

impl ReportWriter {
    pub fn new(
        dir: Option<&Path>,
        formats: &[String],
        config_bytes: &[u8],
    ) -> Result<ReportWriter, String> {
        if let Some(d) = dir {
            fs::create_dir_all(d).map_err(|e| format!("cannot create {}: {e}", d.display()))?;
        }
        let (json, csv) = if formats.is_empty() {
            (true, true)
        } else {
            (
                formats.iter().any(|f| f == "json"),
                formats.iter().any(|f| f == "csv"),
            )
        };
        Ok(ReportWriter {
            dir: dir.map(Path::to_path_buf),
            json,
            csv,
            config_sha256: config_hash(config_bytes),
            started: SystemTime::now(),
        })
    }

    pub fn csv_enabled(&self) -> bool {
        self.csv
    }

    /// Serializes `body` with the provenance envelope. Reports are
    /// deterministic for a fixed config: no timestamps, no timings.
    pub fn write_json<T: Serialize>(&self, name: &str, body: T) -> Result<(), String> {
        if !self.json {
            return Ok(());
        }
        let envelope = Envelope {
            tool_version: TOOL_VERSION,
            config_sha256: self.config_sha256.clone(),
            body,
        };
        let mut text = serde_json::to_string_pretty(&envelope)
            .map_err(|e| format!("serialization failed: {e}"))?;
        text.push('\n');
        self.emit(name, text.as_bytes())
    }

    pub fn write_csv(&self, name: &str, content: &str) -> Result<(), String> {
        if !self.csv {
            return Ok(());
        }
        self.emit(name, content.as_bytes())
    }

    /// Timings and wall-clock facts go to a sibling file excluded from the
    /// determinism contract.
    pub fn write_meta(&self, name: &str, jobs: usize) -> Result<(), String> {
        let elapsed_ms = self.started.elapsed().map(|d| d.as_millis()).unwrap_or(0);
        let meta = serde_json::json!({
            "tool_version": TOOL_VERSION,
            "config_sha256": self.config_sha256,
            "elapsed_ms": elapsed_ms,
            "jobs": jobs,
            "finished_unix_ms": SystemTime::now()
                .duration_since(SystemTime::UNIX_EPOCH)
                .map(|d| d.as_millis())
                .unwrap_or(0),
        });
        let mut text =
            serde_json::to_string_pretty(&meta).map_err(|e| format!("serialization: {e}"))?;
        text.push('\n');
        self.emit(name, text.as_bytes())
    }

    fn emit(&self, name: &str, bytes: &[u8]) -> Result<(), String> {
        match &self.dir {
            Some(dir) => {
                let path = dir.join(name);
                fs::write(&path, bytes)
                    .map_err(|e| format!("cannot write {}: {e}", path.display()))
            }
            None => {
                // No output directory: print to stdout.
                print!("{}", String::from_utf8_lossy(bytes));
                Ok(())
            }
        }
    }
}

/// Formats a float for CSV cells: '.' decimal separator, shortest roundtrip.
pub fn csv_float(x: f64) -> String {
    format!("{x}")
}
