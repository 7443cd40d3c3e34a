use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::scalar::Real;

fn parse_err(path: &Path, row: usize, col: usize, detail: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        row,
        col,
        detail: detail.into(),
    }
}

/// Reads a headerless, comma-separated numeric matrix. Rows and columns in
/// errors are 1-based.
pub fn load_matrix_csv<T: Real>(path: impl AsRef<Path>) -> Result<DMatrix<T>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(file);

    let mut width = None;
    let mut values = Vec::new();
    let mut rows = 0;
    for (r, record) in reader.records().enumerate() {
        let row = r + 1;
        let record = record.map_err(|e| parse_err(path, row, 0, e.to_string()))?;
        let expected = *width.get_or_insert(record.len());
        if record.len() != expected {
            return Err(parse_err(
                path,
                row,
                record.len().min(expected) + 1,
                format!("ragged row: {} fields, expected {expected}", record.len()),
            ));
        }
        for (c, cell) in record.iter().enumerate() {
            let v: f64 = cell
                .parse()
                .map_err(|_| parse_err(path, row, c + 1, format!("not a number: {cell:?}")))?;
            if !v.is_finite() {
                return Err(parse_err(path, row, c + 1, format!("non-finite value {cell:?}")));
            }
            values.push(T::lit(v));
        }
        rows += 1;
    }
    match width {
        Some(w) if w > 0 => Ok(DMatrix::from_row_slice(rows, w, &values)),
        _ => Err(parse_err(path, 0, 0, "empty file")),
    }
}

/// Writes a matrix in the format [`load_matrix_csv`] reads, using the
/// shortest decimal representation that round-trips.
pub fn write_matrix_csv<T: Real>(path: impl AsRef<Path>, m: &DMatrix<T>) -> Result<()> {
    let path = path.as_ref();
    let io = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut out = BufWriter::new(File::create(path).map_err(io)?);
    for i in 0..m.nrows() {
        let line: Vec<String> = m.row(i).iter().map(|v| v.to_f64_lossy().to_string()).collect();
        writeln!(out, "{}", line.join(",")).map_err(io)?;
    }
    out.flush().map_err(io)
}
