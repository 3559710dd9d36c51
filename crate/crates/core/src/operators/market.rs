//! Matrix Market coordinate (sparse) and array (dense) files.

use std::fmt::Write as _;
use std::path::Path;

use super::CsrMatrix;
use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::vector::Vector;
use crate::C64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Field {
    Real,
    Complex,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
    Hermitian,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Layout {
    Coordinate,
    Array,
}

struct Header {
    layout: Layout,
    field: Field,
    symmetry: Symmetry,
}

fn parse_header(line: &str) -> Result<Header> {
    let err = |msg: &str| Error::Parse { line: 1, msg: msg.to_string() };
    let toks: Vec<String> = line.split_whitespace().map(|t| t.to_ascii_lowercase()).collect();
    if toks.len() != 5 || toks[0] != "%%matrixmarket" {
        return Err(err("expected '%%MatrixMarket matrix <format> <field> <symmetry>'"));
    }
    if toks[1] != "matrix" {
        return Err(Error::UnsupportedFormat(format!("object '{}'", toks[1])));
    }
    let layout = match toks[2].as_str() {
        "coordinate" => Layout::Coordinate,
        "array" => Layout::Array,
        other => return Err(err(&format!("unknown format '{other}'"))),
    };
    let field = match toks[3].as_str() {
        "real" | "integer" | "double" => Field::Real,
        "complex" => Field::Complex,
        "pattern" => return Err(Error::UnsupportedFormat("pattern matrices".into())),
        other => return Err(err(&format!("unknown field '{other}'"))),
    };
    let symmetry = match toks[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        "hermitian" => Symmetry::Hermitian,
        other => return Err(Error::UnsupportedFormat(format!("symmetry '{other}'"))),
    };
    Ok(Header { layout, field, symmetry })
}

/// Non-comment lines with their 1-based line numbers.
fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .skip(1)
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('%'))
}

fn parse_num<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T> {
    tok.and_then(|t| t.parse().ok())
        .ok_or_else(|| Error::Parse { line, msg: format!("expected {what}") })
}

fn parse_value(toks: &mut std::str::SplitWhitespace<'_>, field: Field, line: usize) -> Result<C64> {
    let re: f64 = parse_num(toks.next(), line, "real part")?;
    let im: f64 = match field {
        Field::Real => 0.0,
        Field::Complex => parse_num(toks.next(), line, "imaginary part")?,
    };
    if !(re.is_finite() && im.is_finite()) {
        return Err(Error::Parse { line, msg: "non-finite value".into() });
    }
    Ok(C64::new(re, im))
}

/// Parses coordinate-format text into a CSR matrix.
pub fn parse_matrix_market(text: &str) -> Result<CsrMatrix> {
    let first = text.lines().next().ok_or(Error::Parse { line: 1, msg: "empty file".into() })?;
    let header = parse_header(first)?;
    if header.layout == Layout::Array {
        return Err(Error::UnsupportedFormat("array format where a sparse matrix was expected".into()));
    }
    let mut lines = data_lines(text);
    let (size_line, size) = lines.next().ok_or(Error::Parse { line: 2, msg: "missing size line".into() })?;
    let mut toks = size.split_whitespace();
    let rows: usize = parse_num(toks.next(), size_line, "row count")?;
    let cols: usize = parse_num(toks.next(), size_line, "column count")?;
    let nnz: usize = parse_num(toks.next(), size_line, "entry count")?;
    if rows != cols || rows == 0 {
        return Err(Error::Parse { line: size_line, msg: format!("operator must be square and nonempty, got {rows}x{cols}") });
    }
    let mut trips = Vec::with_capacity(nnz * 2);
    let mut count = 0;
    for (line, l) in lines {
        let mut toks = l.split_whitespace();
        let i: usize = parse_num(toks.next(), line, "row index")?;
        let j: usize = parse_num(toks.next(), line, "column index")?;
        if i == 0 || j == 0 || i > rows || j > cols {
            return Err(Error::Parse { line, msg: format!("index ({i}, {j}) out of range") });
        }
        let v = parse_value(&mut toks, header.field, line)?;
        if toks.next().is_some() {
            return Err(Error::Parse { line, msg: "trailing tokens".into() });
        }
        let (i, j) = (i - 1, j - 1);
        trips.push((i, j, v));
        if i != j {
            match header.symmetry {
                Symmetry::General => {}
                Symmetry::Symmetric => trips.push((j, i, v)),
                Symmetry::Hermitian => trips.push((j, i, v.conj())),
            }
        }
        count += 1;
    }
    if count != nnz {
        return Err(Error::Parse { line: size_line, msg: format!("header announces {nnz} entries, found {count}") });
    }
    CsrMatrix::from_triplets(rows, &trips)
}

pub fn read_matrix_market(path: impl AsRef<Path>) -> Result<CsrMatrix> {
    parse_matrix_market(&std::fs::read_to_string(path)?)
}

/// Parses array-format text (column-major) into a dense matrix.
pub fn parse_dense_array(text: &str) -> Result<DenseMatrix> {
    let first = text.lines().next().ok_or(Error::Parse { line: 1, msg: "empty file".into() })?;
    let header = parse_header(first)?;
    if header.layout != Layout::Array {
        return Err(Error::UnsupportedFormat("expected array format for dense data".into()));
    }
    if header.symmetry != Symmetry::General {
        return Err(Error::UnsupportedFormat("only general dense arrays are supported".into()));
    }
    let mut lines = data_lines(text);
    let (size_line, size) = lines.next().ok_or(Error::Parse { line: 2, msg: "missing size line".into() })?;
    let mut toks = size.split_whitespace();
    let rows: usize = parse_num(toks.next(), size_line, "row count")?;
    let cols: usize = parse_num(toks.next(), size_line, "column count")?;
    let mut data = Vec::with_capacity(rows * cols);
    for (line, l) in lines {
        let mut toks = l.split_whitespace();
        data.push(parse_value(&mut toks, header.field, line)?);
    }
    if data.len() != rows * cols {
        return Err(Error::Parse { line: size_line, msg: format!("expected {} values, found {}", rows * cols, data.len()) });
    }
    DenseMatrix::from_col_major(rows, cols, data)
}

pub fn read_dense_array(path: impl AsRef<Path>) -> Result<DenseMatrix> {
    parse_dense_array(&std::fs::read_to_string(path)?)
}

/// Right-hand side from the literal `ones` or a single-column dense array file.
pub fn read_rhs(spec: &str, n: usize) -> Result<Vector> {
    if spec.eq_ignore_ascii_case("ones") {
        return Ok(vec![C64::new(1.0, 0.0); n]);
    }
    let m = read_dense_array(spec)?;
    if m.cols() != 1 || m.rows() != n {
        return Err(Error::invalid(format!("rhs must be {n}x1, file holds {}x{}", m.rows(), m.cols())));
    }
    Ok(m.col(0).to_vec())
}

fn is_real(values: impl IntoIterator<Item = C64>) -> bool {
    values.into_iter().all(|v| v.im == 0.0)
}

fn fmt_value(out: &mut String, v: C64, real: bool) {
    if real {
        let _ = write!(out, "{:.17e}", v.re);
    } else {
        let _ = write!(out, "{:.17e} {:.17e}", v.re, v.im);
    }
}

pub fn format_matrix_market(a: &CsrMatrix) -> String {
    let trips = a.triplets();
    let real = is_real(trips.iter().map(|t| t.2));
    let mut out = format!(
        "%%MatrixMarket matrix coordinate {} general\n{} {} {}\n",
        if real { "real" } else { "complex" },
        a.n(),
        a.n(),
        trips.len()
    );
    for (i, j, v) in trips {
        let _ = write!(out, "{} {} ", i + 1, j + 1);
        fmt_value(&mut out, v, real);
        out.push('\n');
    }
    out
}

pub fn write_matrix_market(a: &CsrMatrix, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, format_matrix_market(a))?;
    Ok(())
}

pub fn format_dense_array(m: &DenseMatrix) -> String {
    let real = is_real(m.as_slice().iter().copied());
    let mut out = format!(
        "%%MatrixMarket matrix array {} general\n{} {}\n",
        if real { "real" } else { "complex" },
        m.rows(),
        m.cols()
    );
    for &v in m.as_slice() {
        fmt_value(&mut out, v, real);
        out.push('\n');
    }
    out
}

pub fn write_dense_array(m: &DenseMatrix, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, format_dense_array(m))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;
    use crate::operators::LinearOperator;

    #[test]
    fn identity_file() {
        let a = parse_matrix_market("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1.0\n2 2 1.0\n").unwrap();
        assert_eq!(a.diagonal(), vec![c64(1.0, 0.0), c64(1.0, 0.0)]);
        assert_eq!(a.nnz(), 2);
    }

    #[test]
    fn symmetric_expansion() {
        let text = "%%MatrixMarket matrix coordinate real symmetric\n% lower triangle\n2 2 3\n1 1 2\n2 1 1\n2 2 3\n";
        let a = parse_matrix_market(text).unwrap();
        assert_eq!(a.nnz(), 4);
        assert_eq!(a.get(0, 1), c64(1.0, 0.0));
        assert_eq!(a.get(1, 0), c64(1.0, 0.0));
        assert!(a.is_hermitian());
    }

    #[test]
    fn hermitian_expansion_conjugates() {
        let text = "%%MatrixMarket matrix coordinate complex hermitian\n2 2 3\n1 1 2 0\n2 1 1 1\n2 2 3 0\n";
        let a = parse_matrix_market(text).unwrap();
        assert_eq!(a.get(1, 0), c64(1.0, 1.0));
        assert_eq!(a.get(0, 1), c64(1.0, -1.0));
        assert!(a.is_hermitian());
    }

    #[test]
    fn malformed_entry_reports_line() {
        let text = "%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1.0\n2 x 1.0\n";
        match parse_matrix_market(text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn pattern_and_array_rejected() {
        let pat = "%%MatrixMarket matrix coordinate pattern general\n1 1 1\n1 1\n";
        assert!(matches!(parse_matrix_market(pat), Err(Error::UnsupportedFormat(_))));
        let arr = "%%MatrixMarket matrix array real general\n1 1\n1\n";
        assert!(matches!(parse_matrix_market(arr), Err(Error::UnsupportedFormat(_))));
    }

    #[test]
    fn bad_header() {
        assert!(matches!(parse_matrix_market("hello\n"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn dense_array_column_major() {
        let m = parse_dense_array("%%MatrixMarket matrix array real general\n2 2\n1\n2\n3\n4\n").unwrap();
        assert_eq!(m[(1, 0)], c64(2.0, 0.0));
        assert_eq!(m[(0, 1)], c64(3.0, 0.0));
    }

    #[test]
    fn write_then_read_preserves_entries() {
        let a = CsrMatrix::from_triplets(3, &[(0, 2, c64(1.5, -2.0)), (1, 1, c64(0.1, 0.0)), (2, 0, c64(-3.0, 0.25))]).unwrap();
        let back = parse_matrix_market(&format_matrix_market(&a)).unwrap();
        assert_eq!(back, a);
        let x = vec![c64(1.0, 0.0), c64(2.0, 0.0), c64(0.0, 1.0)];
        assert_eq!(back.apply(&x), a.apply(&x));
    }
}
