//! Matrix Market exchange format.
//!
//! Coordinate files (`%%MatrixMarket matrix coordinate real general`) load as
//! [`SparseMatrix`], array files as [`DenseMatrix`] (column-major on disk).
//! `real` and `integer` fields are accepted, with `general` or `symmetric`
//! symmetry. Values are written with 17 significant digits so a write followed
//! by a read reproduces every `f64` exactly.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::matrix::{DenseMatrix, Matrix, SparseMatrix};

#[derive(Debug, Error)]
pub enum MmError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("line {line}: malformed header: {msg}")]
    Header { line: usize, msg: String },
    #[error("line {line}: unsupported field type '{field}' (only real and integer are supported)")]
    Field { line: usize, field: String },
    #[error("line {line}: unsupported symmetry '{symmetry}'")]
    Symmetry { line: usize, symmetry: String },
    #[error("line {line}: malformed size line: {msg}")]
    Size { line: usize, msg: String },
    #[error("line {line}: malformed entry: {msg}")]
    Entry { line: usize, msg: String },
    #[error("line {line}: index ({row}, {col}) outside a {rows}x{cols} matrix")]
    IndexOutOfBounds { line: usize, row: usize, col: usize, rows: usize, cols: usize },
    #[error("line {line}: expected {expected} entries, found {found}")]
    EntryCount { line: usize, expected: usize, found: usize },
    #[error("line {line}: duplicate entry ({row}, {col})")]
    Duplicate { line: usize, row: usize, col: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Layout {
    Coordinate,
    Array,
}

struct Header {
    layout: Layout,
    symmetric: bool,
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> MmError + '_ {
    move |source| MmError::Io { path: path.to_path_buf(), source }
}

pub fn read_matrix(path: impl AsRef<Path>) -> Result<Matrix, MmError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(io_err(path))?;
    read_matrix_from(BufReader::new(file)).map_err(|e| match e {
        MmError::Io { source, .. } => MmError::Io { path: path.to_path_buf(), source },
        other => other,
    })
}

fn parse_header(line: &str, lineno: usize) -> Result<Header, MmError> {
    let header = |msg: &str| MmError::Header { line: lineno, msg: msg.to_string() };
    let mut tokens = line.split_whitespace();
    if tokens.next() != Some("%%MatrixMarket") {
        return Err(header("first line must start with %%MatrixMarket"));
    }
    let object = tokens.next().ok_or_else(|| header("missing object"))?.to_ascii_lowercase();
    if object != "matrix" {
        return Err(header(&format!("object '{object}' is not 'matrix'")));
    }
    let layout = match tokens.next().ok_or_else(|| header("missing format"))?.to_ascii_lowercase().as_str() {
        "coordinate" => Layout::Coordinate,
        "array" => Layout::Array,
        other => return Err(header(&format!("format '{other}' is neither coordinate nor array"))),
    };
    let field = tokens.next().ok_or_else(|| header("missing field"))?.to_ascii_lowercase();
    if field != "real" && field != "integer" && field != "double" {
        return Err(MmError::Field { line: lineno, field });
    }
    let symmetry = tokens.next().ok_or_else(|| header("missing symmetry"))?.to_ascii_lowercase();
    let symmetric = match symmetry.as_str() {
        "general" => false,
        "symmetric" => true,
        _ => return Err(MmError::Symmetry { line: lineno, symmetry }),
    };
    if tokens.next().is_some() {
        return Err(header("unexpected trailing tokens"));
    }
    Ok(Header { layout, symmetric })
}

fn parse_value(tok: &str, lineno: usize) -> Result<f64, MmError> {
    let v: f64 =
        tok.parse().map_err(|_| MmError::Entry { line: lineno, msg: format!("cannot parse value '{tok}'") })?;
    if !v.is_finite() {
        return Err(MmError::Entry { line: lineno, msg: format!("non-finite value '{tok}'") });
    }
    Ok(v)
}

fn parse_index(tok: Option<&str>, lineno: usize) -> Result<usize, MmError> {
    let tok = tok.ok_or_else(|| MmError::Entry { line: lineno, msg: "expected 'row col value'".into() })?;
    tok.parse().map_err(|_| MmError::Entry { line: lineno, msg: format!("cannot parse index '{tok}'") })
}

/// Reads a matrix from any buffered source. Line numbers in errors are 1-based.
pub fn read_matrix_from(reader: impl BufRead) -> Result<Matrix, MmError> {
    let mut lines = reader.lines().enumerate().map(|(k, l)| (k + 1, l));
    let no_path = |source| MmError::Io { path: PathBuf::new(), source };

    let (first_no, first) = match lines.next() {
        Some((k, l)) => (k, l.map_err(no_path)?),
        None => return Err(MmError::Header { line: 1, msg: "empty input".into() }),
    };
    let header = parse_header(&first, first_no)?;

    // Remaining non-comment, non-blank lines.
    let mut data = lines.filter_map(|(k, l)| match l {
        Ok(s) => {
            let t = s.trim();
            if t.is_empty() || t.starts_with('%') {
                None
            } else {
                Some(Ok((k, t.to_string())))
            }
        }
        Err(e) => Some(Err(e)),
    });

    let (size_no, size_line) = match data.next() {
        Some(r) => r.map_err(no_path)?,
        None => return Err(MmError::Size { line: first_no + 1, msg: "missing size line".into() }),
    };
    let sizes: Vec<usize> = size_line
        .split_whitespace()
        .map(|t| t.parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|_| MmError::Size { line: size_no, msg: format!("cannot parse '{size_line}'") })?;
    let expected_len = match header.layout {
        Layout::Coordinate => 3,
        Layout::Array => 2,
    };
    if sizes.len() != expected_len {
        return Err(MmError::Size {
            line: size_no,
            msg: format!("expected {expected_len} integers, found {}", sizes.len()),
        });
    }
    let (rows, cols) = (sizes[0], sizes[1]);
    if header.symmetric && rows != cols {
        return Err(MmError::Size {
            line: size_no,
            msg: format!("symmetric matrix must be square, got {rows}x{cols}"),
        });
    }

    let mut last_line = size_no;
    match header.layout {
        Layout::Coordinate => {
            let nnz = sizes[2];
            let mut entries: Vec<(usize, usize, f64, usize)> = Vec::with_capacity(nnz);
            for item in data {
                let (k, line) = item.map_err(no_path)?;
                last_line = k;
                if entries.len() == nnz {
                    return Err(MmError::EntryCount { line: k, expected: nnz, found: nnz + 1 });
                }
                let mut tok = line.split_whitespace();
                let i = parse_index(tok.next(), k)?;
                let j = parse_index(tok.next(), k)?;
                let v = parse_value(
                    tok.next().ok_or_else(|| MmError::Entry { line: k, msg: "expected 'row col value'".into() })?,
                    k,
                )?;
                if tok.next().is_some() {
                    return Err(MmError::Entry { line: k, msg: "too many fields".into() });
                }
                if i == 0 || j == 0 || i > rows || j > cols {
                    return Err(MmError::IndexOutOfBounds { line: k, row: i, col: j, rows, cols });
                }
                if header.symmetric && j > i {
                    return Err(MmError::Entry {
                        line: k,
                        msg: format!("symmetric storage expects the lower triangle, got ({i}, {j})"),
                    });
                }
                entries.push((i - 1, j - 1, v, k));
            }
            if entries.len() != nnz {
                return Err(MmError::EntryCount { line: last_line, expected: nnz, found: entries.len() });
            }
            entries.sort_by_key(|e| (e.0, e.1, e.3));
            if let Some(w) = entries.windows(2).find(|w| (w[0].0, w[0].1) == (w[1].0, w[1].1)) {
                return Err(MmError::Duplicate { line: w[1].3, row: w[1].0 + 1, col: w[1].1 + 1 });
            }
            let mirrored = entries.iter().filter(|e| header.symmetric && e.0 != e.1).map(|e| (e.1, e.0, e.2));
            let triplets: Vec<_> = entries.iter().map(|e| (e.0, e.1, e.2)).chain(mirrored).collect();
            let sparse = SparseMatrix::from_triplets(rows, cols, triplets)
                .map_err(|e| MmError::Entry { line: last_line, msg: e.to_string() })?;
            Ok(Matrix::Sparse(sparse))
        }
        Layout::Array => {
            // Column-major; symmetric files store the lower triangle only.
            let positions: Vec<(usize, usize)> = if header.symmetric {
                (0..cols).flat_map(|j| (j..rows).map(move |i| (i, j))).collect()
            } else {
                (0..cols).flat_map(|j| (0..rows).map(move |i| (i, j))).collect()
            };
            let mut dense = DenseMatrix::zeros(rows, cols);
            let mut count = 0usize;
            for item in data {
                let (k, line) = item.map_err(no_path)?;
                last_line = k;
                let mut tok = line.split_whitespace();
                let v = parse_value(tok.next().unwrap_or_default(), k)?;
                if tok.next().is_some() {
                    return Err(MmError::Entry { line: k, msg: "array entries hold one value per line".into() });
                }
                let Some(&(i, j)) = positions.get(count) else {
                    return Err(MmError::EntryCount { line: k, expected: positions.len(), found: count + 1 });
                };
                dense[(i, j)] = v;
                if header.symmetric {
                    dense[(j, i)] = v;
                }
                count += 1;
            }
            if count != positions.len() {
                return Err(MmError::EntryCount { line: last_line, expected: positions.len(), found: count });
            }
            Ok(Matrix::Dense(dense))
        }
    }
}

/// Reads any Matrix Market file and densifies it.
pub fn read_dense(path: impl AsRef<Path>) -> Result<DenseMatrix, MmError> {
    Ok(read_matrix(path)?.to_dense())
}

pub fn write_matrix(path: impl AsRef<Path>, m: &Matrix) -> Result<(), MmError> {
    let path = path.as_ref();
    let file = File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(file);
    write_matrix_to(&mut w, m).map_err(io_err(path))?;
    w.flush().map_err(io_err(path))
}

pub fn write_matrix_to(w: &mut impl Write, m: &Matrix) -> io::Result<()> {
    match m {
        Matrix::Dense(d) => write_dense_to(w, d),
        Matrix::Sparse(s) => write_sparse_to(w, s),
    }
}

pub fn write_dense_to(w: &mut impl Write, d: &DenseMatrix) -> io::Result<()> {
    writeln!(w, "%%MatrixMarket matrix array real general")?;
    writeln!(w, "{} {}", d.rows(), d.cols())?;
    for j in 0..d.cols() {
        for i in 0..d.rows() {
            writeln!(w, "{:.16e}", d[(i, j)])?;
        }
    }
    Ok(())
}

pub fn write_sparse_to(w: &mut impl Write, s: &SparseMatrix) -> io::Result<()> {
    writeln!(w, "%%MatrixMarket matrix coordinate real general")?;
    writeln!(w, "{} {} {}", s.rows(), s.cols(), s.nnz())?;
    for (i, j, v) in s.iter() {
        writeln!(w, "{} {} {:.16e}", i + 1, j + 1, v)?;
    }
    Ok(())
}
