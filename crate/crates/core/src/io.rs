//! Text formats shared by the library and the command-line tool.
//!
//! Matrices are read either as JSON `{"n": 2, "rows": [[1, 0], [0, 1]]}` or as CSV
//! with `n` rows of `n` comma-separated numbers. Readers symmetrize.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{MatrixRepr, SymMatrix};

/// `fs::read_to_string` with the path in the error message.
pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        ))
    })
}

pub fn parse_matrix_json(text: &str) -> Result<SymMatrix> {
    let repr: MatrixRepr =
        serde_json::from_str(text).map_err(|e| Error::Format(format!("matrix JSON: {e}")))?;
    SymMatrix::try_from(repr)
}

pub fn parse_matrix_csv(text: &str) -> Result<SymMatrix> {
    SymMatrix::from_rows(&parse_csv_rows(text)?)
}

/// Rows of numbers from headerless CSV. Blank lines are skipped.
pub fn parse_csv_rows(text: &str) -> Result<Vec<Vec<f64>>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::Format(format!("CSV: {e}")))?;
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        let row = record
            .iter()
            .map(|f| {
                f.parse::<f64>()
                    .map_err(|_| Error::Format(format!("CSV: cannot parse {f:?} as a number")))
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Format("CSV: no rows".into()));
    }
    Ok(rows)
}

fn is_json_path(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

/// Reads a matrix, choosing the format from the file extension (`.json` or CSV otherwise).
pub fn read_matrix(path: &Path) -> Result<SymMatrix> {
    let text = read_text(path)?;
    if is_json_path(path) {
        parse_matrix_json(&text)
    } else {
        parse_matrix_csv(&text)
    }
}

pub fn matrix_to_json(m: &SymMatrix) -> String {
    serde_json::to_string(m).expect("matrix serializes")
}

pub fn matrix_to_csv(m: &SymMatrix) -> String {
    let mut out = String::new();
    for i in 0..m.dim() {
        let row: Vec<String> = m.row(i).iter().map(|v| format!("{v}")).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// A general rectangular matrix (no symmetry), used for least-squares data.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DenseMatrix {
    pub rows: Vec<Vec<f64>>,
}

impl DenseMatrix {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.is_empty() || cols == 0 {
            return Err(Error::InvalidInput("empty matrix".into()));
        }
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidInput("ragged matrix rows".into()));
        }
        if rows.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite matrix entry".into()));
        }
        Ok(DenseMatrix { rows })
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.rows[0].len()
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        self.rows.iter().map(|r| crate::linalg::dot(r, x)).collect()
    }

    pub fn mul_transpose_vec(&self, y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.ncols()];
        for (row, yi) in self.rows.iter().zip(y) {
            for (o, a) in out.iter_mut().zip(row) {
                *o += a * yi;
            }
        }
        out
    }
}

pub fn read_dense_matrix(path: &Path) -> Result<DenseMatrix> {
    let text = read_text(path)?;
    let rows = if is_json_path(path) {
        #[derive(Deserialize)]
        struct Rows {
            rows: Vec<Vec<f64>>,
        }
        serde_json::from_str::<Rows>(&text)
            .map_err(|e| Error::Format(format!("matrix JSON: {e}")))?
            .rows
    } else {
        parse_csv_rows(&text)?
    };
    DenseMatrix::new(rows)
}

/// Reads a vector: a JSON array, or CSV holding a single row or a single column.
pub fn read_vector(path: &Path) -> Result<Vec<f64>> {
    let text = read_text(path)?;
    let v: Vec<f64> = if is_json_path(path) {
        serde_json::from_str(&text).map_err(|e| Error::Format(format!("vector JSON: {e}")))?
    } else {
        let rows = parse_csv_rows(&text)?;
        if rows.len() == 1 {
            rows.into_iter().next().unwrap()
        } else if rows.iter().all(|r| r.len() == 1) {
            rows.into_iter().map(|r| r[0]).collect()
        } else {
            return Err(Error::Format(
                "vector CSV must be one row or one column".into(),
            ));
        }
    };
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidInput("non-finite vector entry".into()));
    }
    Ok(v)
}

/// Writes `contents` to `path` through a temporary file in the same directory
/// followed by a rename.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}
