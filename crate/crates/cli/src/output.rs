//! Files written by the commands.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use nstr_core::trcore::{write_csv, IterateRecord};
use serde::Serialize;

pub const SCHEMA_VERSION: u32 = 1;

pub fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    write_text(path, &s)
}

pub fn write_iterates(path: &Path, records: &[IterateRecord]) -> Result<()> {
    let f = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
    write_csv(records, std::io::BufWriter::new(f))
        .with_context(|| format!("writing {}", path.display()))
}

/// `row_len` values per line, space separated, shortest round-trip form.
pub fn grid_text(values: &[f64], row_len: usize) -> String {
    let mut s = String::new();
    for row in values.chunks(row_len.max(1)) {
        let line: Vec<String> = row.iter().map(|v| format!("{v:e}")).collect();
        s.push_str(&line.join(" "));
        s.push('\n');
    }
    s
}

/// Whitespace-separated columns, one sample per line.
pub fn columns_text(header: &str, rows: impl IntoIterator<Item = Vec<f64>>) -> String {
    let mut s = format!("# {header}\n");
    for row in rows {
        let line: Vec<String> = row.iter().map(|v| format!("{v:e}")).collect();
        let _ = writeln!(s, "{}", line.join(" "));
    }
    s
}
