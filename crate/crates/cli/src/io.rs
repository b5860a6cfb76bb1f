use std::fs;
use std::path::{Path, PathBuf};

use pulsecell::output::{columns, fields};
use pulsecell::{RunRecord, SystemKind};

use crate::failure::{Failure, Outcome};

/// Sets the directory used when no output path is given.
pub const OUTPUT_DIR_ENV: &str = "PULSECELL_OUTPUT_DIR";

pub fn default_output_dir() -> PathBuf {
    std::env::var_os(OUTPUT_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("."))
}

pub fn ensure_parent(path: &Path) -> Outcome {
    match path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() => fs::create_dir_all(dir).map_err(|e| Failure::io(dir.display(), e)),
        _ => Ok(()),
    }
}

pub fn write_records(path: &Path, system: SystemKind, records: &[RunRecord]) -> Outcome {
    ensure_parent(path)?;
    let err = |e: csv::Error| Failure::io(path.display(), e);
    let mut w = csv::Writer::from_path(path).map_err(err)?;
    w.write_record(columns(system)).map_err(err)?;
    for r in records {
        w.write_record(fields(r)).map_err(err)?;
    }
    w.flush().map_err(|e| Failure::io(path.display(), e))
}
