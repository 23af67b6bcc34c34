use std::fs;
use std::path::Path;

use super::CliError;

/// Scientific notation with 17 significant digits; parses back to the same f64.
pub fn format_number(v: f64) -> String {
    format!("{v:.16e}")
}

/// An in-memory CSV table rendered with LF endings and no quoting (every
/// field is a number or a bare identifier).
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new(header: &[&'static str]) -> Self {
        Self {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn header(&self) -> &[&'static str] {
        &self.header
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn render(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        fs::write(path, self.render()).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })
    }
}
