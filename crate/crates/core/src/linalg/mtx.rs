//! MatrixMarket reader/writer.
//!
//! Supports `coordinate` and `array` formats with `real`, `integer`,
//! `complex` and `pattern` fields and `general`, `symmetric`,
//! `skew-symmetric` and `hermitian` symmetry. Symmetric storage is expanded
//! on read. Coordinate files become [`CsrMatrix`] (duplicates summed), array
//! files become [`DenseMatrix`]. Writers always emit `general` storage with
//! 17 significant digits so values round-trip bit-exactly.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::{CsrMatrix, DenseMatrix, Matrix};
use crate::scalar::Field;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MtxFormat {
    Coordinate,
    Array,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MtxField {
    Real,
    Integer,
    Complex,
    Pattern,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MtxSymmetry {
    General,
    Symmetric,
    SkewSymmetric,
    Hermitian,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MtxHeader {
    pub format: MtxFormat,
    pub field: MtxField,
    pub symmetry: MtxSymmetry,
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn parse_header(line: &str) -> Result<MtxHeader> {
    let toks: Vec<String> = line.split_whitespace().map(str::to_ascii_lowercase).collect();
    if toks.len() != 5 || toks[0] != "%%matrixmarket" || toks[1] != "matrix" {
        return Err(parse_err(1, "missing %%MatrixMarket matrix banner"));
    }
    let format = match toks[2].as_str() {
        "coordinate" => MtxFormat::Coordinate,
        "array" => MtxFormat::Array,
        f => return Err(parse_err(1, format!("unsupported format '{f}'"))),
    };
    let field = match toks[3].as_str() {
        "real" | "double" => MtxField::Real,
        "integer" => MtxField::Integer,
        "complex" => MtxField::Complex,
        "pattern" => MtxField::Pattern,
        f => return Err(parse_err(1, format!("unsupported field '{f}'"))),
    };
    let symmetry = match toks[4].as_str() {
        "general" => MtxSymmetry::General,
        "symmetric" => MtxSymmetry::Symmetric,
        "skew-symmetric" => MtxSymmetry::SkewSymmetric,
        "hermitian" => MtxSymmetry::Hermitian,
        s => return Err(parse_err(1, format!("unsupported symmetry '{s}'"))),
    };
    if format == MtxFormat::Array && field == MtxField::Pattern {
        return Err(parse_err(1, "pattern field requires coordinate format"));
    }
    if symmetry == MtxSymmetry::Hermitian && field != MtxField::Complex {
        return Err(parse_err(1, "hermitian symmetry requires complex field"));
    }
    Ok(MtxHeader {
        format,
        field,
        symmetry,
    })
}

/// Reads only the banner line of a file.
pub fn read_header(path: impl AsRef<Path>) -> Result<MtxHeader> {
    let mut reader = BufReader::new(File::open(path)?);
    let mut first = String::new();
    reader.read_line(&mut first)?;
    parse_header(&first)
}

/// Raw contents: header, shape and expanded `(row, col, re, im)` entries.
struct RawMtx {
    header: MtxHeader,
    rows: usize,
    cols: usize,
    entries: Vec<(usize, usize, f64, f64)>,
}

fn parse_num(tok: Option<&str>, line: usize) -> Result<f64> {
    let tok = tok.ok_or_else(|| parse_err(line, "missing value"))?;
    tok.parse::<f64>()
        .map_err(|_| parse_err(line, format!("invalid number '{tok}'")))
}

fn parse_index(tok: Option<&str>, line: usize, bound: usize) -> Result<usize> {
    let tok = tok.ok_or_else(|| parse_err(line, "missing index"))?;
    let i: usize = tok
        .parse()
        .map_err(|_| parse_err(line, format!("invalid index '{tok}'")))?;
    if i == 0 || i > bound {
        return Err(parse_err(line, format!("index {i} out of range 1..={bound}")));
    }
    Ok(i - 1)
}

fn read_raw(reader: impl Read) -> Result<RawMtx> {
    let reader = BufReader::new(reader);
    let mut lines = reader.lines().enumerate();
    let header = match lines.next() {
        Some((_, l)) => parse_header(&l?)?,
        None => return Err(parse_err(1, "empty file")),
    };

    let mut body = Vec::new();
    for (idx, l) in lines {
        let l = l?;
        let t = l.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        body.push((idx + 1, t.to_string()));
    }
    let mut it = body.into_iter();
    let (size_line, size) = it.next().ok_or_else(|| parse_err(2, "missing size line"))?;
    let dims: Vec<usize> = size
        .split_whitespace()
        .map(|t| t.parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| parse_err(size_line, "invalid size line"))?;

    let sym = header.symmetry;
    let complex = header.field == MtxField::Complex;
    let mut entries = Vec::new();
    let mut push = |i: usize, j: usize, re: f64, im: f64| {
        entries.push((i, j, re, im));
        if i != j {
            match sym {
                MtxSymmetry::General => {}
                MtxSymmetry::Symmetric => entries.push((j, i, re, im)),
                MtxSymmetry::SkewSymmetric => entries.push((j, i, -re, -im)),
                MtxSymmetry::Hermitian => entries.push((j, i, re, -im)),
            }
        }
    };

    let (rows, cols) = match header.format {
        MtxFormat::Coordinate => {
            if dims.len() != 3 {
                return Err(parse_err(size_line, "coordinate size line needs rows cols nnz"));
            }
            let (rows, cols, nnz) = (dims[0], dims[1], dims[2]);
            let mut count = 0;
            for (ln, l) in it {
                let mut toks = l.split_whitespace();
                let i = parse_index(toks.next(), ln, rows)?;
                let j = parse_index(toks.next(), ln, cols)?;
                let (re, im) = match header.field {
                    MtxField::Pattern => (1.0, 0.0),
                    MtxField::Complex => (parse_num(toks.next(), ln)?, parse_num(toks.next(), ln)?),
                    _ => (parse_num(toks.next(), ln)?, 0.0),
                };
                if sym != MtxSymmetry::General && j > i {
                    return Err(parse_err(ln, "symmetric storage must list the lower triangle"));
                }
                push(i, j, re, im);
                count += 1;
            }
            if count != nnz {
                return Err(parse_err(size_line, format!("expected {nnz} entries, found {count}")));
            }
            (rows, cols)
        }
        MtxFormat::Array => {
            if dims.len() != 2 {
                return Err(parse_err(size_line, "array size line needs rows cols"));
            }
            let (rows, cols) = (dims[0], dims[1]);
            if sym != MtxSymmetry::General && rows != cols {
                return Err(parse_err(size_line, "symmetric array must be square"));
            }
            // Column-major; symmetric variants list the lower triangle only
            // (skew-symmetric omits the diagonal).
            let mut slots = Vec::new();
            for j in 0..cols {
                let start = match sym {
                    MtxSymmetry::General => 0,
                    MtxSymmetry::SkewSymmetric => j + 1,
                    _ => j,
                };
                for i in start..rows {
                    slots.push((i, j));
                }
            }
            let mut slot = slots.into_iter();
            for (ln, l) in it {
                let mut toks = l.split_whitespace();
                let re = parse_num(toks.next(), ln)?;
                let im = if complex { parse_num(toks.next(), ln)? } else { 0.0 };
                let (i, j) = slot
                    .next()
                    .ok_or_else(|| parse_err(ln, "too many array entries"))?;
                push(i, j, re, im);
            }
            if slot.next().is_some() {
                return Err(parse_err(size_line, "too few array entries"));
            }
            (rows, cols)
        }
    };
    Ok(RawMtx {
        header,
        rows,
        cols,
        entries,
    })
}

fn convert<S: Field>(raw: &RawMtx) -> Result<Vec<(usize, usize, S)>> {
    if raw.header.field == MtxField::Complex && !S::IS_COMPLEX {
        if raw.entries.iter().any(|e| e.3 != 0.0) {
            return Err(parse_err(1, "complex entries cannot be read into a real matrix"));
        }
    }
    Ok(raw
        .entries
        .iter()
        .map(|&(i, j, re, im)| (i, j, S::from_parts(re, im)))
        .collect())
}

/// Reads a matrix: coordinate files become CSR, array files dense.
pub fn read_matrix<S: Field>(reader: impl Read) -> Result<Matrix<S>> {
    let raw = read_raw(reader)?;
    let trip = convert::<S>(&raw)?;
    match raw.header.format {
        MtxFormat::Coordinate => Ok(Matrix::Csr(CsrMatrix::from_triplets(raw.rows, raw.cols, &trip)?)),
        MtxFormat::Array => {
            let mut d = DenseMatrix::zeros(raw.rows, raw.cols);
            for (i, j, v) in trip {
                d.set(i, j, v);
            }
            // Re-validate for non-finite entries.
            Ok(Matrix::Dense(DenseMatrix::new(raw.rows, raw.cols, d.as_slice().to_vec())?))
        }
    }
}

pub fn read_matrix_file<S: Field>(path: impl AsRef<Path>) -> Result<Matrix<S>> {
    read_matrix(File::open(path)?)
}

/// Reads a vector stored as an `n x 1` (or `1 x n`) matrix in either format.
pub fn read_vector<S: Field>(reader: impl Read) -> Result<Vec<S>> {
    let raw = read_raw(reader)?;
    if raw.rows != 1 && raw.cols != 1 {
        return Err(parse_err(2, format!("expected a vector, got {}x{}", raw.rows, raw.cols)));
    }
    let n = raw.rows.max(raw.cols);
    let mut v = vec![S::zero(); n];
    for (i, j, x) in convert::<S>(&raw)? {
        v[i.max(j)] += x;
    }
    Ok(v)
}

pub fn read_vector_file<S: Field>(path: impl AsRef<Path>) -> Result<Vec<S>> {
    read_vector(File::open(path)?)
}

fn field_name<S: Field>() -> &'static str {
    if S::IS_COMPLEX {
        "complex"
    } else {
        "real"
    }
}

fn write_value<S: Field>(out: &mut impl Write, v: S) -> std::io::Result<()> {
    let (re, im) = v.to_parts();
    if S::IS_COMPLEX {
        write!(out, " {re:.16e} {im:.16e}")
    } else {
        write!(out, " {re:.16e}")
    }
}

/// Writes CSR storage as `coordinate general`.
pub fn write_csr<S: Field>(mut out: impl Write, a: &CsrMatrix<S>) -> Result<()> {
    writeln!(out, "%%MatrixMarket matrix coordinate {} general", field_name::<S>())?;
    writeln!(out, "{} {} {}", a.nrows(), a.ncols(), a.nnz())?;
    for (i, j, v) in a.triplets() {
        write!(out, "{} {}", i + 1, j + 1)?;
        write_value(&mut out, v)?;
        writeln!(out)?;
    }
    Ok(())
}

/// Writes a dense matrix as `array general` (column-major).
pub fn write_dense<S: Field>(mut out: impl Write, a: &DenseMatrix<S>) -> Result<()> {
    writeln!(out, "%%MatrixMarket matrix array {} general", field_name::<S>())?;
    writeln!(out, "{} {}", a.nrows(), a.ncols())?;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            let mut line = Vec::new();
            write_value(&mut line, a.get(i, j))?;
            out.write_all(&line[1..])?;
            writeln!(out)?;
        }
    }
    Ok(())
}

pub fn write_matrix<S: Field>(out: impl Write, a: &Matrix<S>) -> Result<()> {
    match a {
        Matrix::Dense(d) => write_dense(out, d),
        Matrix::Csr(c) => write_csr(out, c),
    }
}

/// Writes a vector as an `n x 1` array.
pub fn write_vector<S: Field>(mut out: impl Write, v: &[S]) -> Result<()> {
    writeln!(out, "%%MatrixMarket matrix array {} general", field_name::<S>())?;
    writeln!(out, "{} 1", v.len())?;
    for &x in v {
        let mut line = Vec::new();
        write_value(&mut line, x)?;
        out.write_all(&line[1..])?;
        writeln!(out)?;
    }
    Ok(())
}

pub fn write_matrix_file<S: Field>(path: impl AsRef<Path>, a: &Matrix<S>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_matrix(&mut w, a)?;
    w.flush()?;
    Ok(())
}

pub fn write_vector_file<S: Field>(path: impl AsRef<Path>, v: &[S]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_vector(&mut w, v)?;
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn symmetric_coordinate_is_expanded() {
        let src = "%%MatrixMarket matrix coordinate real symmetric\n% comment\n3 3 4\n1 1 4\n2 1 -1\n3 2 -1\n3 3 4\n";
        let m: Matrix<f64> = read_matrix(src.as_bytes()).unwrap();
        let Matrix::Csr(c) = m else { panic!("expected csr") };
        assert_eq!(c.nnz(), 6);
        assert_eq!(c.get(0, 1), -1.0);
        assert_eq!(c.get(1, 0), -1.0);
        assert!(c.is_symmetric());
    }

    #[test]
    fn hermitian_complex() {
        let src = "%%MatrixMarket matrix coordinate complex hermitian\n2 2 3\n1 1 2 0\n2 1 1 1\n2 2 3 0\n";
        let m: Matrix<Complex64> = read_matrix(src.as_bytes()).unwrap();
        let d = m.to_dense();
        assert_eq!(d.get(1, 0), Complex64::new(1.0, 1.0));
        assert_eq!(d.get(0, 1), Complex64::new(1.0, -1.0));
        assert!(read_matrix::<f64>(src.as_bytes()).is_err());
    }

    #[test]
    fn array_and_vector() {
        let src = "%%MatrixMarket matrix array real general\n2 2\n1\n2\n3\n4\n";
        let d = read_matrix::<f64>(src.as_bytes()).unwrap().to_dense();
        assert_eq!(d.row(0), &[1.0, 3.0]);
        let v: Vec<f64> = read_vector("%%MatrixMarket matrix array real general\n3 1\n1\n2\n3\n".as_bytes()).unwrap();
        assert_eq!(v, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn malformed_inputs() {
        for bad in [
            "",
            "%%MatrixMarket matrix coordinate real general\n",
            "%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1.0\n",
            "%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1.0\n",
            "%%MatrixMarket matrix coordinate real general\n2 2 1\n1 1 abc\n",
            "%%MatrixMarket matrix array real general\n2 1\n1\n",
            "%%MatrixMarket tensor coordinate real general\n1 1 0\n",
        ] {
            assert!(read_matrix::<f64>(bad.as_bytes()).is_err(), "accepted: {bad:?}");
        }
    }

    #[test]
    fn write_read_is_bit_exact() {
        let c = CsrMatrix::from_triplets(2, 2, &[(0, 0, 0.1), (1, 0, -1.0 / 3.0), (1, 1, 1e-300)]).unwrap();
        let mut buf = Vec::new();
        write_csr(&mut buf, &c).unwrap();
        let back: Matrix<f64> = read_matrix(buf.as_slice()).unwrap();
        assert_eq!(back, Matrix::Csr(c));

        let v = vec![Complex64::new(0.1, -0.7), Complex64::new(f64::MIN_POSITIVE, 2.0)];
        let mut buf = Vec::new();
        write_vector(&mut buf, &v).unwrap();
        assert_eq!(read_vector::<Complex64>(buf.as_slice()).unwrap(), v);
    }
}
