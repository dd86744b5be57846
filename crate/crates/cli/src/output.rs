use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::CliResult;

/// `<command>-<n>d-<timestamp>.<ext>` in the working directory unless `out` is given.
pub fn artifact_path(out: Option<&Path>, command: &str, n: u32, ext: &str) -> PathBuf {
    match out {
        Some(p) => p.to_path_buf(),
        None => {
            let stamp = chrono::Local::now().format("%Y%m%dT%H%M%S");
            PathBuf::from(format!("{command}-{n}d-{stamp}.{ext}"))
        }
    }
}

/// `dir/stem-suffix` next to `path`.
pub fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("out");
    path.with_file_name(format!("{stem}-{suffix}"))
}

pub fn write_json(path: &Path, value: &impl Serialize) -> CliResult<()> {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
    s.push('\n');
    fs::write(path, s)?;
    Ok(())
}

/// Writes a CSV table; f64 cells use the shortest round-trip form.
pub fn write_table(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> CliResult<()> {
    let mut s = header.join(",");
    s.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        let _ = writeln!(s, "{}", cells.join(","));
    }
    fs::write(path, s)?;
    Ok(())
}

/// Six significant digits for the terminal.
pub fn g6(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    let e = v.abs().log10().floor() as i32;
    if (-4..6).contains(&e) {
        format!("{:.*}", (5 - e).max(0) as usize, v)
    } else {
        format!("{v:.5e}")
    }
}
