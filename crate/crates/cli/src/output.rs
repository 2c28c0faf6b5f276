//! CSV tables: `#` header lines, one column-name row, LF endings.
//!
//! Numbers use Rust's shortest round-trip formatting, so identical inputs
//! give identical bytes.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use gbdt::{ComplexMatrix, C64};

pub const SINGULAR: &str = "SINGULAR";

pub fn num(v: f64) -> String {
    format!("{v:e}")
}

/// `prefix_i_j.re`, `prefix_i_j.im` for every entry, row-major, 1-based.
pub fn matrix_columns(prefix: &str, rows: usize, cols: usize) -> Vec<String> {
    let mut out = Vec::with_capacity(2 * rows * cols);
    for i in 1..=rows {
        for j in 1..=cols {
            out.push(format!("{prefix}_{i}_{j}.re"));
            out.push(format!("{prefix}_{i}_{j}.im"));
        }
    }
    out
}

pub fn vector_columns(prefix: &str, len: usize) -> Vec<String> {
    (1..=len).flat_map(|i| [format!("{prefix}_{i}.re"), format!("{prefix}_{i}.im")]).collect()
}

pub fn complex_cells(values: impl IntoIterator<Item = C64>) -> Vec<String> {
    values.into_iter().flat_map(|z| [num(z.re), num(z.im)]).collect()
}

pub fn matrix_cells(m: &ComplexMatrix) -> Vec<String> {
    complex_cells(m.as_slice().iter().copied())
}

#[derive(Debug, Default)]
pub struct Table {
    text: String,
    width: usize,
}

impl Table {
    pub fn new(header: &[String], columns: &[String]) -> Self {
        let mut text = String::new();
        for line in header {
            text.push_str("# ");
            text.push_str(line);
            text.push('\n');
        }
        text.push_str(&columns.join(","));
        text.push('\n');
        Table {
            text,
            width: columns.len(),
        }
    }

    pub fn row(&mut self, cells: &[String]) {
        debug_assert_eq!(cells.len(), self.width);
        self.text.push_str(&cells.join(","));
        self.text.push('\n');
    }

    /// Key cells followed by `SINGULAR` in every value column.
    pub fn singular_row(&mut self, keys: &[String]) {
        let mut cells = keys.to_vec();
        cells.resize(self.width, SINGULAR.to_string());
        self.row(&cells);
    }

    pub fn comment(&mut self, line: &str) {
        self.text.push_str("# ");
        self.text.push_str(line);
        self.text.push('\n');
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }
}

/// Writes to `path`, or to stdout when there is none.
pub fn emit(path: Option<&Path>, text: &str) -> io::Result<()> {
    match path {
        Some(p) => fs::write(p, text),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()
        }
    }
}

/// Sidecar path for a machine-readable report next to a CSV.
pub fn report_path(out: &Path) -> std::path::PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".report.json");
    name.into()
}
