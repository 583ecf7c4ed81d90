//! Rendering and atomic file output.

use crate::args::Format;
use std::io::Write;
use std::path::{Path, PathBuf};
use twomode_core::table::Table;

/// Environment variable naming the default output directory.
pub const OUT_DIR_VAR: &str = "TWOMODE_OUT_DIR";

pub fn render(table: &Table, format: Format) -> String {
    match format {
        Format::Csv => table.to_csv(),
        Format::Text => table.to_text(),
        Format::Jsonl => {
            let mut out = String::new();
            for record in table.records() {
                out.push_str(&serde_json::to_string(&record).expect("table cells serialize"));
                out.push('\n');
            }
            out
        }
    }
}

pub fn extension(format: Format) -> &'static str {
    match format {
        Format::Csv => "csv",
        Format::Text => "txt",
        Format::Jsonl => "jsonl",
    }
}

fn out_dir() -> Option<PathBuf> {
    std::env::var_os(OUT_DIR_VAR).filter(|v| !v.is_empty()).map(PathBuf::from)
}

/// Resolves where a result goes. `None` means stdout.
///
/// Relative paths are taken against the output directory when it is set.
/// `fallback` names the file used when no path was given but the directory
/// variable is set.
pub fn destination(explicit: Option<&Path>, fallback: Option<&str>) -> Option<PathBuf> {
    let dir = out_dir();
    match (explicit, dir) {
        (Some(p), Some(d)) if p.is_relative() => Some(d.join(p)),
        (Some(p), _) => Some(p.to_path_buf()),
        (None, Some(d)) => fallback.map(|f| d.join(f)),
        (None, None) => None,
    }
}

/// Writes through a temporary file in the target directory and renames it
/// into place, so readers never observe a partial file.
pub fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let parent = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    std::fs::create_dir_all(&parent)?;
    let mut tmp = tempfile::NamedTempFile::new_in(&parent)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

/// Sends `contents` to `dest` or stdout.
pub fn emit(dest: Option<&Path>, contents: &str) -> std::io::Result<()> {
    match dest {
        Some(p) => write_atomic(p, contents),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(contents.as_bytes())?;
            stdout.flush()
        }
    }
}
