//! Reference data shipped with the crate under `data/`.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{CliError, CliResult};

pub const FILES: [(&str, &str); 7] = [
    (
        "linear_reference",
        include_str!("../data/linear_reference.csv"),
    ),
    ("linear_fd_n1", include_str!("../data/linear_fd_n1.csv")),
    ("linear_fd_n3", include_str!("../data/linear_fd_n3.csv")),
    (
        "linear_corrections",
        include_str!("../data/linear_corrections.csv"),
    ),
    ("log_reference", include_str!("../data/log_reference.csv")),
    ("log_fd_n24", include_str!("../data/log_fd_n24.csv")),
    ("mixed_fd_n12", include_str!("../data/mixed_fd_n12.csv")),
];

/// One CSV table. Cells are kept as text; empty cells mean "no value".
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn parse(name: &str, text: &str) -> CliResult<Self> {
        let bad = |msg: String| CliError::config(format!("golden table {name}: {msg}"));
        let mut r = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let columns: Vec<String> = r
            .headers()
            .map_err(|e| bad(e.to_string()))?
            .iter()
            .map(String::from)
            .collect();
        let rows = r
            .records()
            .map(|rec| {
                rec.map(|rec| rec.iter().map(String::from).collect())
                    .map_err(|e| bad(e.to_string()))
            })
            .collect::<CliResult<Vec<Vec<String>>>>()?;
        Ok(Table {
            name: name.to_string(),
            columns,
            rows,
        })
    }

    fn column_index(&self, column: &str) -> CliResult<usize> {
        self.columns
            .iter()
            .position(|c| c == column)
            .ok_or_else(|| {
                CliError::config(format!(
                    "golden table {} has no column '{column}'",
                    self.name
                ))
            })
    }

    /// The numeric cell of `column` in `row`, `None` when empty.
    pub fn value(&self, row: usize, column: &str) -> CliResult<Option<f64>> {
        let c = self.column_index(column)?;
        let cell = self.rows.get(row).and_then(|r| r.get(c)).ok_or_else(|| {
            CliError::config(format!("golden table {} has no row {row}", self.name))
        })?;
        if cell.is_empty() {
            return Ok(None);
        }
        cell.parse().map(Some).map_err(|_| {
            CliError::config(format!(
                "golden table {}: '{cell}' is not a number",
                self.name
            ))
        })
    }

    pub fn number(&self, row: usize, column: &str) -> CliResult<f64> {
        self.value(row, column)?.ok_or_else(|| {
            CliError::config(format!(
                "golden table {}: row {row} '{column}' is empty",
                self.name
            ))
        })
    }

    pub fn text(&self, row: usize, column: &str) -> CliResult<&str> {
        let c = self.column_index(column)?;
        Ok(&self.rows[row][c])
    }

    pub fn integer(&self, row: usize, column: &str) -> CliResult<usize> {
        let v = self.number(row, column)?;
        if v >= 0.0 && v.fract() == 0.0 {
            Ok(v as usize)
        } else {
            Err(CliError::config(format!(
                "golden table {}: {v} is not an index",
                self.name
            )))
        }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

#[derive(Debug, Clone)]
pub struct Golden {
    tables: BTreeMap<String, Table>,
}

impl Golden {
    /// The tables compiled into the binary.
    pub fn embedded() -> Self {
        let tables = FILES
            .iter()
            .map(|(name, text)| {
                let t = Table::parse(name, text).expect("embedded golden data parses");
                (name.to_string(), t)
            })
            .collect();
        Golden { tables }
    }

    /// Embedded tables, each replaced by `<dir>/<name>.csv` when present.
    pub fn with_overrides(dir: &Path) -> CliResult<Self> {
        let mut g = Self::embedded();
        for (name, _) in FILES {
            let p = dir.join(format!("{name}.csv"));
            if p.exists() {
                let text = std::fs::read_to_string(&p).map_err(|e| CliError::io(&p, e))?;
                g.tables
                    .insert(name.to_string(), Table::parse(name, &text)?);
            }
        }
        Ok(g)
    }

    pub fn table(&self, name: &str) -> CliResult<&Table> {
        self.tables
            .get(name)
            .ok_or_else(|| CliError::config(format!("no golden table '{name}'")))
    }
}
