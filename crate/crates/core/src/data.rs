//! Column-major sample matrix with named columns and CSV I/O.

use std::collections::HashSet;
use std::io::{Read, Write};

use num_traits::Float;
use thiserror::Error;

use crate::Scalar;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("dataset has no columns")]
    NoColumns,
    #[error("duplicate column {0}")]
    DuplicateColumn(String),
    #[error("unknown column {0}")]
    UnknownColumn(String),
    #[error("column {column} has {found} rows, expected {expected}")]
    RaggedColumn {
        column: String,
        expected: usize,
        found: usize,
    },
    #[error("row {row}, column {column}: cannot parse {value:?} as a number")]
    BadValue {
        row: usize,
        column: String,
        value: String,
    },
    #[error("row {row}, column {column}: value is not finite")]
    NonFinite { row: usize, column: String },
    #[error("cannot hide {0}: it is the exposure or outcome")]
    ProtectedColumn(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// n x p sample matrix. Discrete processes store integer values in the
/// floating-point type.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset<T> {
    columns: Vec<String>,
    values: Vec<Vec<T>>,
    seed: Option<u64>,
    provenance: String,
    roles: Option<(String, String)>,
}

impl<T: Scalar> Dataset<T> {
    /// `values[j]` is the column named `columns[j]`.
    pub fn new(columns: Vec<String>, values: Vec<Vec<T>>) -> Result<Self, DataError> {
        if columns.is_empty() {
            return Err(DataError::NoColumns);
        }
        let mut seen = HashSet::new();
        for c in &columns {
            if !seen.insert(c.as_str()) {
                return Err(DataError::DuplicateColumn(c.clone()));
            }
        }
        let expected = values.first().map_or(0, Vec::len);
        if values.len() != columns.len() {
            return Err(DataError::RaggedColumn {
                column: format!("<{} value columns>", values.len()),
                expected: columns.len(),
                found: values.len(),
            });
        }
        for (c, col) in columns.iter().zip(&values) {
            if col.len() != expected {
                return Err(DataError::RaggedColumn {
                    column: c.clone(),
                    expected,
                    found: col.len(),
                });
            }
            if let Some(row) = col.iter().position(|v| !Float::is_finite(*v)) {
                return Err(DataError::NonFinite {
                    row,
                    column: c.clone(),
                });
            }
        }
        Ok(Dataset {
            columns,
            values,
            seed: None,
            provenance: String::new(),
            roles: None,
        })
    }

    pub fn with_provenance(mut self, provenance: impl Into<String>, seed: Option<u64>) -> Self {
        self.provenance = provenance.into();
        self.seed = seed;
        self
    }

    /// Marks the exposure and outcome columns so they cannot be masked.
    pub fn with_roles(mut self, exposure: &str, outcome: &str) -> Result<Self, DataError> {
        self.index(exposure)?;
        self.index(outcome)?;
        self.roles = Some((exposure.to_string(), outcome.to_string()));
        Ok(self)
    }

    pub fn n_rows(&self) -> usize {
        self.values.first().map_or(0, Vec::len)
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn roles(&self) -> Option<(&str, &str)> {
        self.roles.as_ref().map(|(x, y)| (x.as_str(), y.as_str()))
    }

    pub fn index(&self, name: &str) -> Result<usize, DataError> {
        self.columns
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| DataError::UnknownColumn(name.to_string()))
    }

    pub fn column(&self, name: &str) -> Result<&[T], DataError> {
        Ok(&self.values[self.index(name)?])
    }

    pub fn column_at(&self, j: usize) -> &[T] {
        &self.values[j]
    }

    /// Copy without the named columns. Fails on unknown names and on the
    /// exposure or outcome when roles are set.
    pub fn without_columns<S: AsRef<str>>(&self, hidden: &[S]) -> Result<Self, DataError> {
        let mut drop = HashSet::new();
        for h in hidden {
            let h = h.as_ref();
            if let Some((x, y)) = self.roles() {
                if h == x || h == y {
                    return Err(DataError::ProtectedColumn(h.to_string()));
                }
            }
            drop.insert(self.index(h)?);
        }
        let keep: Vec<usize> = (0..self.n_cols()).filter(|j| !drop.contains(j)).collect();
        let mut provenance = self.provenance.clone();
        if !hidden.is_empty() {
            let names: Vec<&str> = hidden.iter().map(AsRef::as_ref).collect();
            provenance = format!("{provenance}; hidden={}", names.join(","));
        }
        Ok(Dataset {
            columns: keep.iter().map(|&j| self.columns[j].clone()).collect(),
            values: keep.iter().map(|&j| self.values[j].clone()).collect(),
            seed: self.seed,
            provenance,
            roles: self.roles.clone(),
        })
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self, DataError> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let columns: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
        let mut values = vec![Vec::new(); columns.len()];
        for (row, rec) in rdr.records().enumerate() {
            let rec = rec?;
            for (j, field) in rec.iter().enumerate() {
                let v: T = field.parse().map_err(|_| DataError::BadValue {
                    row: row + 1,
                    column: columns[j].clone(),
                    value: field.to_string(),
                })?;
                values[j].push(v);
            }
        }
        Self::new(columns, values)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<(), DataError> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(&self.columns)?;
        let mut row = Vec::with_capacity(self.n_cols());
        for i in 0..self.n_rows() {
            row.clear();
            row.extend(self.values.iter().map(|c| c[i].to_string()));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}
