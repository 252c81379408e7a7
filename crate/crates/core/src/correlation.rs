//! Correlation matrices read from CSV: a header row of variable names
//! followed by an n x n numeric body.

use std::collections::HashSet;

use thiserror::Error;

pub const SYMMETRY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum CorrelationError {
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
    #[error("row {row}: expected {expected} entries, found {found}")]
    RowLength { row: usize, expected: usize, found: usize },
    #[error("expected {expected} data rows, found {found}")]
    RowCount { expected: usize, found: usize },
    #[error("row {row}, column {col}: {text:?} is not a finite number")]
    NotNumeric { row: usize, col: usize, text: String },
    #[error("entries ({i},{j}) and ({j},{i}) differ: {a} vs {b}")]
    Asymmetric { i: usize, j: usize, a: f64, b: f64 },
    #[error("duplicate variable name {0:?}")]
    DuplicateName(String),
    #[error("{0:?} is not a valid variable name")]
    InvalidName(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    pub names: Vec<String>,
    pub entries: Vec<Vec<f64>>,
}

impl CorrelationMatrix {
    pub fn new(names: Vec<String>, entries: Vec<Vec<f64>>) -> Result<CorrelationMatrix, CorrelationError> {
        let n = names.len();
        let mut seen = HashSet::new();
        for name in &names {
            if !is_identifier(name) {
                return Err(CorrelationError::InvalidName(name.clone()));
            }
            if !seen.insert(name.as_str()) {
                return Err(CorrelationError::DuplicateName(name.clone()));
            }
        }
        if entries.len() != n {
            return Err(CorrelationError::RowCount { expected: n, found: entries.len() });
        }
        for (row, r) in entries.iter().enumerate() {
            if r.len() != n {
                return Err(CorrelationError::RowLength { row: row + 1, expected: n, found: r.len() });
            }
        }
        for (i, row) in entries.iter().enumerate() {
            for j in i + 1..n {
                let (a, b) = (row[j], entries[j][i]);
                if (a - b).abs() > SYMMETRY_TOLERANCE {
                    return Err(CorrelationError::Asymmetric { i: i + 1, j: j + 1, a, b });
                }
            }
        }
        Ok(CorrelationMatrix { names, entries })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i][j]
    }

    /// Sets both `(i, j)` and `(j, i)`.
    pub fn set_symmetric(&mut self, i: usize, j: usize, value: f64) {
        self.entries[i][j] = value;
        self.entries[j][i] = value;
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(|c| c.is_ascii_alphabetic()) && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

pub fn parse_correlation_csv(text: &str) -> Result<CorrelationMatrix, CorrelationError> {
    if text.trim().is_empty() {
        return Ok(CorrelationMatrix { names: Vec::new(), entries: Vec::new() });
    }
    let mut reader =
        csv::ReaderBuilder::new().has_headers(true).flexible(true).trim(csv::Trim::All).from_reader(text.as_bytes());
    let names: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    let mut entries = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        let values = record
            .iter()
            .enumerate()
            .map(|(col, cell)| {
                cell.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| CorrelationError::NotNumeric {
                    row: row + 1,
                    col: col + 1,
                    text: cell.to_string(),
                })
            })
            .collect::<Result<Vec<f64>, _>>()?;
        entries.push(values);
    }
    CorrelationMatrix::new(names, entries)
}
