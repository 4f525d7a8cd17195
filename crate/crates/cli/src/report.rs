//! CSV report writing. Reports open with `#`-prefixed comment lines
//! holding the fully resolved configuration (single-line JSON, stable
//! field order), then a header row and data rows. Everything is formatted
//! through Rust's shortest-roundtrip float printing, so identical runs
//! produce identical bytes.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{CliError, CliResult};

pub struct Report {
    buf: String,
    columns: usize,
}

impl Report {
    pub fn new<C: serde::Serialize>(config_label: &str, config: &C, header: &[&str]) -> Self {
        let mut buf = String::new();
        let json = serde_json::to_string(config).expect("config serializes");
        let _ = writeln!(buf, "# {config_label} {json}");
        let columns = header.len();
        let _ = writeln!(buf, "{}", header.join(","));
        Report { buf, columns }
    }

    /// Extra `# key value` comment line (inserted before rows).
    pub fn note(&mut self, key: &str, value: impl std::fmt::Display) {
        // notes are appended in stream order; they appear between rows if
        // added late, which is fine for the tail summaries
        let _ = writeln!(self.buf, "# {key} {value}");
    }

    pub fn row(&mut self, cells: &[String]) {
        debug_assert_eq!(cells.len(), self.columns);
        let _ = writeln!(self.buf, "{}", cells.join(","));
    }

    pub fn write(&self, path: &Path) -> CliResult<()> {
        if let Some(parent) = path.parent() {
            if !parent.as_os_str().is_empty() {
                std::fs::create_dir_all(parent)
                    .map_err(|e| CliError::config(format!("{}: {e}", parent.display())))?;
            }
        }
        std::fs::write(path, &self.buf)
            .map_err(|e| CliError::config(format!("{}: {e}", path.display())))
    }

    pub fn as_str(&self) -> &str {
        &self.buf
    }
}

pub fn out_path(dir: &Path, name: &str) -> PathBuf {
    dir.join(name)
}

/// Shortest-roundtrip decimal for a float cell.
pub fn cell_f64(v: f64) -> String {
    format!("{v}")
}
