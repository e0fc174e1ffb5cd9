//! CSV input and output for data matrices: `n` rows by `d` comma-separated
//! columns, with an optional header line.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Sample};

/// Reads a numeric matrix. The first line is taken as a header when any of
/// its fields fails to parse as a number.
pub fn read_matrix<R: Read>(input: R) -> Result<Matrix> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(input);
    let mut data = Vec::new();
    let mut width: Option<usize> = None;
    for (k, record) in reader.records().enumerate() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            Error::Parse {
                line,
                column: 0,
                message: e.to_string(),
            }
        })?;
        let line = record.position().map_or(k + 1, |p| p.line() as usize);
        if record.iter().all(str::is_empty) {
            continue;
        }
        let parsed: Vec<std::result::Result<f64, _>> = record.iter().map(str::parse::<f64>).collect();
        if width.is_none() && data.is_empty() && parsed.iter().any(|v| v.is_err()) {
            // header
            width = Some(record.len());
            continue;
        }
        match width {
            Some(w) if w != record.len() => {
                return Err(Error::Parse {
                    line,
                    column: w.min(record.len()) + 1,
                    message: format!("expected {w} fields, found {}", record.len()),
                })
            }
            None => width = Some(record.len()),
            _ => {}
        }
        for (j, v) in parsed.into_iter().enumerate() {
            let v = v.map_err(|e| Error::Parse {
                line,
                column: j + 1,
                message: format!("{:?}: {e}", &record[j]),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    line,
                    column: j + 1,
                    message: format!("non-finite value {v}"),
                });
            }
            data.push(v);
        }
    }
    let d = width.unwrap_or(0);
    if data.is_empty() || d == 0 {
        return Err(Error::InvalidSample("no data rows".into()));
    }
    Ok(Matrix::from_vec(data.len() / d, d, data))
}

pub fn read_matrix_path(path: &Path) -> Result<Matrix> {
    read_matrix(File::open(path)?)
}

/// Reads a matrix and validates it as a [`Sample`].
pub fn read_sample_path(path: &Path) -> Result<Sample> {
    Sample::new(read_matrix_path(path)?)
}

/// Writes a matrix with an optional header, values in round-trip precision.
pub fn write_matrix<W: Write>(out: W, m: &Matrix, header: Option<&[String]>) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| Error::Io(std::io::Error::other(e));
    if let Some(h) = header {
        w.write_record(h).map_err(csv_err)?;
    }
    for row in m.row_iter() {
        w.write_record(row.iter().map(|v| format!("{v:e}"))).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Default column names `x1, …, xd`.
pub fn column_names(d: usize) -> Vec<String> {
    (1..=d).map(|j| format!("x{j}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_with_and_without_header() {
        let a = read_matrix("x,y\n1,2\n3.5,-4e-1\n".as_bytes()).unwrap();
        let b = read_matrix("1, 2\n3.5,-4e-1\n\n".as_bytes()).unwrap();
        assert_eq!(a, b);
        assert_eq!((a.rows(), a.cols()), (2, 2));
        assert_eq!(a.row(1), &[3.5, -0.4]);
    }

    #[test]
    fn ragged_row_names_the_line() {
        match read_matrix("a,b\n1,2\n3\n4,5\n".as_bytes()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn bad_number_names_line_and_column() {
        match read_matrix("1,2\n3,x\n".as_bytes()) {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (2, 2)),
            other => panic!("{other:?}"),
        }
        assert!(read_matrix("1,nan\n".as_bytes()).is_err());
        assert!(read_matrix("x,y\n".as_bytes()).is_err());
    }

    #[test]
    fn round_trip_is_exact() {
        let m = Matrix::from_rows(&[[0.1, -1.0 / 3.0], [1e-300, 2.5e10]]);
        let mut buf = Vec::new();
        write_matrix(&mut buf, &m, Some(&column_names(2))).unwrap();
        assert_eq!(read_matrix(buf.as_slice()).unwrap(), m);
    }
}
