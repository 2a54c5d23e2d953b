//! Similarity invariants of a square matrix: rank, determinant, the
//! characteristic polynomial, roots in the base field, and the complete
//! invariant, the chain of invariant factors read off the Smith normal form
//! of `xI - A`.

use std::fmt;

use crate::algebra::{poly_divmod, FieldElement, Poly, PrimeField};
use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Dense matrix over `F_p[x]`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PolyMatrix {
    rows: usize,
    cols: usize,
    field: PrimeField,
    entries: Vec<Poly>,
}

impl PolyMatrix {
    pub fn new(field: PrimeField, rows: usize, cols: usize, entries: Vec<Poly>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::ShapeMismatch(format!(
                "{rows}x{cols} polynomial matrix needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        if let Some(bad) = entries.iter().find(|e| e.field() != field) {
            return Err(Error::ModulusMismatch(
                field.modulus(),
                bad.field().modulus(),
            ));
        }
        Ok(Self {
            rows,
            cols,
            field,
            entries,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Poly {
        &self.entries[i * self.cols + j]
    }

    /// Cofactor expansion along the first row. Exponential; meant for
    /// small cross-checks only.
    pub fn det_by_cofactors(&self) -> Result<Poly> {
        if self.rows != self.cols {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let idx: Vec<usize> = (0..self.rows).collect();
        Ok(self.minor_det(&idx, &idx))
    }

    fn minor_det(&self, rows: &[usize], cols: &[usize]) -> Poly {
        if rows.is_empty() {
            return Poly::one(self.field);
        }
        let mut acc = Poly::zero(self.field);
        for (k, &c) in cols.iter().enumerate() {
            let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
            let term = self.get(rows[0], c) * &self.minor_det(&rows[1..], &rest);
            acc = if k % 2 == 0 {
                &acc + &term
            } else {
                &acc - &term
            };
        }
        acc
    }
}

/// The chain `(i_1, ..., i_n)` of monic invariant factors, `i_k | i_{k+1}`.
/// Unit factors are kept, so the chain always has length `n`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct InvariantFactors {
    factors: Vec<Poly>,
}

impl InvariantFactors {
    /// Validates monicity, divisibility and that the degrees sum to the
    /// chain length.
    pub fn new(factors: Vec<Poly>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidChain("empty chain".into()));
        }
        if let Some(f) = factors.iter().find(|f| !f.is_monic()) {
            return Err(Error::InvalidChain(format!("factor {f} is not monic")));
        }
        for w in factors.windows(2) {
            if w[0].field() != w[1].field() {
                return Err(Error::InvalidChain("factors over different fields".into()));
            }
            if !poly_divmod(&w[1], &w[0])?.1.is_zero() {
                return Err(Error::InvalidChain(format!(
                    "{} does not divide {}",
                    w[0], w[1]
                )));
            }
        }
        let total: usize = factors.iter().filter_map(Poly::degree).sum();
        if total != factors.len() {
            return Err(Error::InvalidChain(format!(
                "degrees sum to {total} but the chain has {} entries",
                factors.len()
            )));
        }
        Ok(Self { factors })
    }

    pub fn factors(&self) -> &[Poly] {
        &self.factors
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn field(&self) -> PrimeField {
        self.factors[0].field()
    }

    /// Product of the chain, i.e. the characteristic polynomial.
    pub fn product(&self) -> Poly {
        self.factors
            .iter()
            .fold(Poly::one(self.field()), |acc, f| &acc * f)
    }

    /// The largest factor, the minimal polynomial.
    pub fn minimal_polynomial(&self) -> &Poly {
        self.factors.last().expect("chain is non-empty")
    }
}

impl fmt::Display for InvariantFactors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.factors.iter().map(Poly::to_string).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// `xI - A`.
pub fn char_matrix(a: &Matrix) -> Result<PolyMatrix> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let n = a.rows();
    let field = a.field();
    let mut entries = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let c = -a.get(i, j);
            entries.push(if i == j {
                Poly::new(field, [c.value() as i64, 1])
            } else {
                Poly::constant(c)
            });
        }
    }
    PolyMatrix::new(field, n, n, entries)
}

/// Smith normal form of `xI - A`-shaped input as an invariant-factor chain.
/// Inputs whose diagonal degrees do not sum to `n` are rejected with
/// `InvalidChain`; use [`smith_diagonal`] for general polynomial matrices.
pub fn smith_normal_form(m: &PolyMatrix) -> Result<InvariantFactors> {
    InvariantFactors::new(smith_diagonal(m)?)
}

/// Diagonalizes a nonsingular square polynomial matrix by unimodular row
/// and column operations and returns the monic diagonal `d_1 | ... | d_n`.
///
/// Each stage moves the minimal-degree entry of the trailing block to the
/// pivot (ties broken row-major), clears its row and column by division,
/// and if the pivot fails to divide some remaining entry, adds that row to
/// the pivot row and repeats.
pub fn smith_diagonal(m: &PolyMatrix) -> Result<Vec<Poly>> {
    if m.rows != m.cols {
        return Err(Error::NotSquare {
            rows: m.rows,
            cols: m.cols,
        });
    }
    let n = m.rows;
    let mut a: Vec<Vec<Poly>> = (0..n)
        .map(|i| m.entries[i * n..(i + 1) * n].to_vec())
        .collect();

    for k in 0..n {
        loop {
            let (pi, pj) = min_degree_entry(&a, k).ok_or(Error::SingularPolyMatrix)?;
            a.swap(k, pi);
            for row in a.iter_mut() {
                row.swap(k, pj);
            }

            let mut leftover = false;
            for i in k + 1..n {
                if a[i][k].is_zero() {
                    continue;
                }
                let (q, r) = poly_divmod(&a[i][k], &a[k][k])?;
                let (top, bottom) = a.split_at_mut(i);
                for (x, y) in bottom[0][k..].iter_mut().zip(&top[k][k..]) {
                    *x = &*x - &(&q * y);
                }
                leftover |= !r.is_zero();
            }
            for j in k + 1..n {
                if a[k][j].is_zero() {
                    continue;
                }
                let (q, r) = poly_divmod(&a[k][j], &a[k][k])?;
                for row in a.iter_mut().skip(k) {
                    let t = &q * &row[k];
                    row[j] = &row[j] - &t;
                }
                leftover |= !r.is_zero();
            }
            if leftover {
                continue;
            }

            let offender = (k + 1..n).find(|&i| {
                (k + 1..n).any(|j| {
                    !poly_divmod(&a[i][j], &a[k][k])
                        .map(|(_, r)| r.is_zero())
                        .unwrap_or(true)
                })
            });
            match offender {
                Some(i) => {
                    let (top, bottom) = a.split_at_mut(i);
                    for (x, y) in top[k][k..].iter_mut().zip(&bottom[0][k..]) {
                        *x = &*x + y;
                    }
                }
                None => break,
            }
        }
        a[k][k] = a[k][k].monic();
    }

    Ok((0..n).map(|k| a[k][k].clone()).collect())
}

fn min_degree_entry(a: &[Vec<Poly>], k: usize) -> Option<(usize, usize)> {
    let n = a.len();
    let mut best: Option<(usize, usize, usize)> = None;
    for (i, row) in a.iter().enumerate().skip(k) {
        for (j, e) in row.iter().enumerate().skip(k) {
            if let Some(d) = e.degree() {
                if best.is_none_or(|(bd, _, _)| d < bd) {
                    best = Some((d, i, j));
                }
            }
        }
    }
    debug_assert!(best.is_none_or(|(_, i, j)| i < n && j < n));
    best.map(|(_, i, j)| (i, j))
}

/// The complete similarity invariant of `a`.
pub fn invariant_factors(a: &Matrix) -> Result<InvariantFactors> {
    smith_normal_form(&char_matrix(a)?)
}

/// `det(xI - A)`, monic of degree n.
pub fn char_poly(a: &Matrix) -> Result<Poly> {
    Ok(invariant_factors(a)?.product())
}

/// Roots of the characteristic polynomial that lie in F_p, with
/// multiplicity, in increasing order. Misses roots outside the base field,
/// so this is a partial invariant only.
pub fn spectrum_in_field(a: &Matrix) -> Result<Vec<FieldElement>> {
    let mut f = char_poly(a)?;
    let field = a.field();
    let mut roots = Vec::new();
    for lambda in field.elements() {
        let linear = Poly::new(field, [-(lambda.value() as i64), 1]);
        while !f.is_zero() && f.eval(lambda).is_zero() {
            f = poly_divmod(&f, &linear)?.0;
            roots.push(lambda);
        }
    }
    Ok(roots)
}

/// Companion matrix of a monic polynomial of degree d >= 1: ones on the
/// subdiagonal, last column `-c_0, ..., -c_{d-1}`.
pub fn companion(f: &Poly) -> Result<Matrix> {
    let d = match f.degree() {
        Some(d) if d >= 1 && f.is_monic() => d,
        _ => {
            return Err(Error::InvalidChain(format!(
                "companion needs a monic polynomial of positive degree, got {f}"
            )))
        }
    };
    let field = f.field();
    let mut m = Matrix::zeros(field, d, d);
    for i in 1..d {
        m.set(i, i - 1, field.one());
    }
    for i in 0..d {
        m.set(i, d - 1, -f.coeff(i));
    }
    Ok(m)
}

/// Block-diagonal matrix of companion blocks of the non-unit factors.
pub fn rational_canonical_form(f: &InvariantFactors) -> Result<Matrix> {
    // re-validate: the chain may have been built by hand
    let f = InvariantFactors::new(f.factors.clone())?;
    let n = f.len();
    let mut out = Matrix::zeros(f.field(), n, n);
    let mut offset = 0;
    for factor in f.factors.iter().filter(|p| !p.is_one()) {
        let block = companion(factor)?;
        for i in 0..block.rows() {
            for j in 0..block.cols() {
                out.set(offset + i, offset + j, block.get(i, j));
            }
        }
        offset += block.rows();
    }
    debug_assert_eq!(offset, n);
    Ok(out)
}
