//! Plain-text matrix and transform files.
//!
//! Matrix file: a header line `p n m a`, then `a` blocks of `n` rows with `m`
//! integers each. Transform file: a header line `p a b`, then `b` lines each
//! holding one polynomial in `x1..xa`. In both, blank lines and lines whose
//! first non-blank character is `#` are ignored, and entries reduce mod `p`.

use std::fmt;

use crate::algebra::PrimeField;
use crate::error::{Error, Result};
use crate::matrix::{Matrix, MatrixTuple};
use crate::wildness::{NcPoly, Transform};

/// Non-comment lines with their 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(k, l)| {
        let t = l.trim();
        (!t.is_empty() && !t.starts_with('#')).then_some((k + 1, t))
    })
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn ints(line: usize, s: &str) -> Result<Vec<i64>> {
    s.split_whitespace()
        .map(|w| {
            w.parse::<i64>()
                .map_err(|_| parse_err(line, format!("`{w}` is not an integer")))
        })
        .collect()
}

fn header(line: usize, s: &str, names: &[&str]) -> Result<Vec<i64>> {
    let v = ints(line, s)?;
    if v.len() != names.len() {
        return Err(parse_err(
            line,
            format!(
                "header needs {} fields ({}), found {}",
                names.len(),
                names.join(" "),
                v.len()
            ),
        ));
    }
    Ok(v)
}

fn field_of(line: usize, p: i64) -> Result<PrimeField> {
    u64::try_from(p)
        .ok()
        .and_then(|p| PrimeField::new(p).ok())
        .ok_or_else(|| parse_err(line, format!("modulus {p} is not a prime")))
}

fn positive(line: usize, name: &str, v: i64) -> Result<usize> {
    usize::try_from(v)
        .ok()
        .filter(|&v| v > 0)
        .ok_or_else(|| parse_err(line, format!("{name} must be positive, got {v}")))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixFile {
    pub field: PrimeField,
    pub rows: usize,
    pub cols: usize,
    pub matrices: Vec<Matrix>,
}

impl MatrixFile {
    pub fn new(matrices: Vec<Matrix>) -> Result<Self> {
        let first = matrices.first().ok_or_else(|| {
            Error::ShapeMismatch("a matrix file holds at least one matrix".into())
        })?;
        let (field, rows, cols) = (first.field(), first.rows(), first.cols());
        if let Some(m) = matrices
            .iter()
            .find(|m| m.field() != field || m.rows() != rows || m.cols() != cols)
        {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} over F_{} next to {rows}x{cols} over F_{}",
                m.rows(),
                m.cols(),
                m.field().modulus(),
                field.modulus()
            )));
        }
        Ok(Self {
            field,
            rows,
            cols,
            matrices,
        })
    }

    pub fn from_tuple(t: &MatrixTuple) -> Self {
        Self::new(t.parts().to_vec()).expect("tuples are non-empty and uniform")
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = content_lines(text);
        let (hl, h) = lines
            .next()
            .ok_or_else(|| parse_err(1, "missing header `p n m a`"))?;
        let h = header(hl, h, &["p", "n", "m", "a"])?;
        let field = field_of(hl, h[0])?;
        let rows = positive(hl, "n", h[1])?;
        let cols = positive(hl, "m", h[2])?;
        let count = positive(hl, "a", h[3])?;
        let mut last = hl;
        let mut matrices = Vec::with_capacity(count);
        for k in 0..count {
            let mut entries = Vec::with_capacity(rows * cols);
            for r in 0..rows {
                let (ln, s) = lines.next().ok_or_else(|| {
                    parse_err(
                        last + 1,
                        format!("file ends before row {} of matrix {}", r + 1, k + 1),
                    )
                })?;
                let row = ints(ln, s)?;
                if row.len() != cols {
                    return Err(parse_err(
                        ln,
                        format!("expected {cols} entries, found {}", row.len()),
                    ));
                }
                entries.extend(row);
                last = ln;
            }
            matrices.push(Matrix::new(field, rows, cols, entries)?);
        }
        if let Some((ln, _)) = lines.next() {
            return Err(parse_err(
                ln,
                format!("trailing data after {count} matrices"),
            ));
        }
        Ok(Self {
            field,
            rows,
            cols,
            matrices,
        })
    }

    /// The single square matrix the file must contain.
    pub fn single_square(&self) -> Result<&Matrix> {
        if self.matrices.len() != 1 {
            return Err(Error::ShapeMismatch(format!(
                "expected one matrix, file holds {}",
                self.matrices.len()
            )));
        }
        if self.rows != self.cols {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        Ok(&self.matrices[0])
    }

    /// The matrices as a tuple of the given arity.
    pub fn tuple(&self, arity: usize) -> Result<MatrixTuple> {
        if self.matrices.len() != arity {
            return Err(Error::ArityMismatch {
                expected: arity,
                got: self.matrices.len(),
            });
        }
        MatrixTuple::new(self.matrices.clone())
    }
}

impl fmt::Display for MatrixFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{} {} {} {}",
            self.field.modulus(),
            self.rows,
            self.cols,
            self.matrices.len()
        )?;
        for (k, m) in self.matrices.iter().enumerate() {
            if k > 0 {
                writeln!(f)?;
            }
            write!(f, "{m}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransformFile {
    pub transform: Transform,
}

impl TransformFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = content_lines(text);
        let (hl, h) = lines
            .next()
            .ok_or_else(|| parse_err(1, "missing header `p a b`"))?;
        let h = header(hl, h, &["p", "a", "b"])?;
        let field = field_of(hl, h[0])?;
        let arity_in = positive(hl, "a", h[1])?;
        let arity_out = positive(hl, "b", h[2])?;
        let mut last = hl;
        let mut polys = Vec::with_capacity(arity_out);
        for k in 0..arity_out {
            let (ln, s) = lines.next().ok_or_else(|| {
                parse_err(last + 1, format!("file ends before polynomial {}", k + 1))
            })?;
            polys.push(NcPoly::parse(field, arity_in, s).map_err(|msg| parse_err(ln, msg))?);
            last = ln;
        }
        if let Some((ln, _)) = lines.next() {
            return Err(parse_err(
                ln,
                format!("trailing data after {arity_out} polynomials"),
            ));
        }
        Ok(Self {
            transform: Transform::new(arity_in, polys)?,
        })
    }
}

impl fmt::Display for TransformFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t = &self.transform;
        writeln!(
            f,
            "{} {} {}",
            t.field().modulus(),
            t.arity_in(),
            t.arity_out()
        )?;
        for p in t.polys() {
            writeln!(f, "{p}")?;
        }
        Ok(())
    }
}

/// Wraps a file body between `# begin <name>` and `# end <name>` markers so
/// command output can carry several replayable files.
pub fn section(name: &str, body: &str) -> String {
    format!("# begin {name}\n{body}# end {name}\n")
}

/// Body of the named section, if present.
pub fn extract_section(text: &str, name: &str) -> Option<String> {
    let begin = format!("# begin {name}");
    let end = format!("# end {name}");
    let mut lines = text.lines().skip_while(|l| l.trim() != begin);
    lines.next()?;
    let mut body = String::new();
    for l in lines {
        if l.trim() == end {
            return Some(body);
        }
        body.push_str(l);
        body.push('\n');
    }
    None
}
