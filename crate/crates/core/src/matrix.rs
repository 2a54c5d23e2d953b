//! Dense matrices over F_p, elimination kernels, and exhaustive enumeration
//! of `M_n(F_p)` and `GL_n(F_p)`.

use std::fmt;

use crate::algebra::{FieldElement, PrimeField};
use crate::error::{Error, Result};

/// Hard cap on `p^(n^2)` for exhaustive enumeration.
pub const ENUMERATION_LIMIT: u64 = 10_000_000;

/// Row-major dense matrix. Ordering is lexicographic on the entry vector
/// among matrices of equal shape and modulus.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    field: PrimeField,
    entries: Vec<u32>,
}

impl Matrix {
    /// Builds a matrix from row-major integers, reducing each mod p.
    pub fn new(
        field: PrimeField,
        rows: usize,
        cols: usize,
        entries: impl IntoIterator<Item = i64>,
    ) -> Result<Self> {
        let entries: Vec<u32> = entries.into_iter().map(|v| field.elem(v).value()).collect();
        if rows == 0 || cols == 0 {
            return Err(Error::ShapeMismatch(format!(
                "matrix dimensions must be positive, got {rows}x{cols}"
            )));
        }
        if entries.len() != rows * cols {
            return Err(Error::ShapeMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        Ok(Self {
            rows,
            cols,
            field,
            entries,
        })
    }

    pub fn from_rows(field: PrimeField, rows: &[&[i64]]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::ShapeMismatch("ragged rows".into()));
        }
        Self::new(field, r, c, rows.iter().flat_map(|row| row.iter().copied()))
    }

    pub(crate) fn from_raw(field: PrimeField, rows: usize, cols: usize, entries: Vec<u32>) -> Self {
        debug_assert_eq!(entries.len(), rows * cols);
        Self {
            rows,
            cols,
            field,
            entries,
        }
    }

    pub fn zeros(field: PrimeField, rows: usize, cols: usize) -> Self {
        Self::from_raw(field, rows, cols, vec![0; rows * cols])
    }

    pub fn identity(field: PrimeField, n: usize) -> Self {
        Self::scalar(field.one(), n)
    }

    /// `c * I_n`
    pub fn scalar(c: FieldElement, n: usize) -> Self {
        let mut m = Self::zeros(c.field(), n, n);
        for i in 0..n {
            m.entries[i * n + i] = c.value();
        }
        m
    }

    /// The matrix unit with a single 1 at `(i, j)`, zero-based.
    pub fn unit(field: PrimeField, rows: usize, cols: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(field, rows, cols);
        m.entries[i * cols + j] = 1;
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> FieldElement {
        self.field.elem(self.entries[i * self.cols + j] as i64)
    }

    pub fn set(&mut self, i: usize, j: usize, v: FieldElement) {
        assert_eq!(v.modulus(), self.field.modulus());
        self.entries[i * self.cols + j] = v.value();
    }

    /// Row-major residues.
    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&e| e == 0)
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Vec::with_capacity(self.entries.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                out.push(self.entries[i * self.cols + j]);
            }
        }
        Self::from_raw(self.field, self.cols, self.rows, out)
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        self.same_shape(other)?;
        let f = self.field;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(&a, &b)| f.add_raw(a, b))
            .collect();
        Ok(Self::from_raw(f, self.rows, self.cols, entries))
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix> {
        self.add(&other.scale(-self.field.one()))
    }

    pub fn scale(&self, c: FieldElement) -> Matrix {
        assert_eq!(c.modulus(), self.field.modulus());
        let f = self.field;
        let entries = self
            .entries
            .iter()
            .map(|&a| f.mul_raw(a, c.value()))
            .collect();
        Self::from_raw(f, self.rows, self.cols, entries)
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        mat_mul(self, other)
    }

    fn same_shape(&self, other: &Matrix) -> Result<()> {
        if self.field != other.field {
            return Err(Error::ModulusMismatch(
                self.field.modulus(),
                other.field.modulus(),
            ));
        }
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    fn require_square(&self) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            })
        }
    }

    /// Row-reduces a copy in place. Returns (echelon form, rank, det factor)
    /// where the det factor is the signed product of pivots.
    fn eliminate(&self) -> (Vec<u32>, usize, u32) {
        let f = self.field;
        let (rows, cols) = (self.rows, self.cols);
        let mut a = self.entries.clone();
        let mut rank = 0;
        let mut det = 1u32;
        for col in 0..cols {
            if rank == rows {
                break;
            }
            let Some(pivot) = (rank..rows).find(|&r| a[r * cols + col] != 0) else {
                det = 0;
                continue;
            };
            if pivot != rank {
                for j in 0..cols {
                    a.swap(pivot * cols + j, rank * cols + j);
                }
                det = f.neg_raw(det);
            }
            let pv = a[rank * cols + col];
            det = f.mul_raw(det, pv);
            let inv = f.inv_raw(pv).expect("pivot is nonzero");
            for r in rank + 1..rows {
                let factor = f.mul_raw(a[r * cols + col], inv);
                if factor == 0 {
                    continue;
                }
                for j in col..cols {
                    let v = f.mul_raw(factor, a[rank * cols + j]);
                    a[r * cols + j] = f.sub_raw(a[r * cols + j], v);
                }
            }
            rank += 1;
        }
        if rank < rows {
            det = 0;
        }
        (a, rank, det)
    }
}

impl fmt::Display for Matrix {
    /// One line per row, entries separated by single spaces.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row = &self.entries[i * self.cols..(i + 1) * self.cols];
            let line: Vec<String> = row.iter().map(u32::to_string).collect();
            writeln!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix[F_{}]", self.field.modulus())?;
        let rows: Vec<&[u32]> = self.entries.chunks(self.cols).collect();
        write!(f, "{rows:?}")
    }
}

pub fn mat_mul(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    if a.field != b.field {
        return Err(Error::ModulusMismatch(a.field.modulus(), b.field.modulus()));
    }
    if a.cols != b.rows {
        return Err(Error::ShapeMismatch(format!(
            "cannot multiply {}x{} by {}x{}",
            a.rows, a.cols, b.rows, b.cols
        )));
    }
    let p = a.field.modulus() as u64;
    let mut out = vec![0u32; a.rows * b.cols];
    for i in 0..a.rows {
        for j in 0..b.cols {
            let mut acc = 0u64;
            for k in 0..a.cols {
                acc =
                    (acc + a.entries[i * a.cols + k] as u64 * b.entries[k * b.cols + j] as u64) % p;
            }
            out[i * b.cols + j] = acc as u32;
        }
    }
    Ok(Matrix::from_raw(a.field, a.rows, b.cols, out))
}

pub fn mat_rank(a: &Matrix) -> usize {
    a.eliminate().1
}

pub fn mat_det(a: &Matrix) -> Result<FieldElement> {
    a.require_square()?;
    Ok(a.field.elem(a.eliminate().2 as i64))
}

/// Gauss-Jordan on `[A | I]`.
pub fn mat_inverse(a: &Matrix) -> Result<Matrix> {
    let n = a.require_square()?;
    let f = a.field;
    let w = 2 * n;
    let mut aug = vec![0u32; n * w];
    for i in 0..n {
        aug[i * w..i * w + n].copy_from_slice(&a.entries[i * n..(i + 1) * n]);
        aug[i * w + n + i] = 1;
    }
    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| aug[r * w + col] != 0)
            .ok_or(Error::Singular)?;
        if pivot != col {
            for j in 0..w {
                aug.swap(pivot * w + j, col * w + j);
            }
        }
        let inv = f.inv_raw(aug[col * w + col])?;
        for j in 0..w {
            aug[col * w + j] = f.mul_raw(aug[col * w + j], inv);
        }
        for r in 0..n {
            let factor = aug[r * w + col];
            if r == col || factor == 0 {
                continue;
            }
            for j in 0..w {
                let v = f.mul_raw(factor, aug[col * w + j]);
                aug[r * w + j] = f.sub_raw(aug[r * w + j], v);
            }
        }
    }
    let entries = (0..n)
        .flat_map(|i| aug[i * w + n..(i + 1) * w].to_vec())
        .collect();
    Ok(Matrix::from_raw(f, n, n, entries))
}

/// All of `M_n(F_p)` in lexicographic order on row-major entries, so the
/// index of a matrix is its entry vector read as a base-p numeral with the
/// `(0,0)` entry most significant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MatrixSpace {
    n: usize,
    field: PrimeField,
    count: u64,
}

impl MatrixSpace {
    pub fn new(n: usize, field: PrimeField) -> Result<Self> {
        let count = (field.modulus() as u64)
            .checked_pow((n * n) as u32)
            .filter(|&c| n >= 1 && c <= ENUMERATION_LIMIT)
            .ok_or_else(|| {
                Error::TooLarge(format!(
                    "{}^({n}^2) matrices exceeds the enumeration limit {ENUMERATION_LIMIT}",
                    field.modulus()
                ))
            })?;
        Ok(Self { n, field, count })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn len(&self) -> usize {
        self.count as usize
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn matrix(&self, mut index: usize) -> Matrix {
        let p = self.field.modulus() as usize;
        let mut entries = vec![0u32; self.n * self.n];
        for slot in entries.iter_mut().rev() {
            *slot = (index % p) as u32;
            index /= p;
        }
        Matrix::from_raw(self.field, self.n, self.n, entries)
    }

    pub fn index_of(&self, m: &Matrix) -> usize {
        let p = self.field.modulus() as usize;
        m.entries.iter().fold(0, |acc, &e| acc * p + e as usize)
    }

    pub fn iter(&self) -> impl Iterator<Item = Matrix> + '_ {
        (0..self.len()).map(|i| self.matrix(i))
    }
}

/// Every invertible n x n matrix over F_p, in lexicographic order.
pub fn enumerate_gl(n: usize, field: PrimeField) -> Result<impl Iterator<Item = Matrix>> {
    let space = MatrixSpace::new(n, field)?;
    Ok((0..space.len())
        .map(move |i| space.matrix(i))
        .filter(|m| m.eliminate().1 == m.rows))
}

/// `|GL_n(F_p)| = prod_{k<n} (p^n - p^k)`
pub fn gl_order(n: usize, p: u64) -> u64 {
    let pn = p.pow(n as u32);
    (0..n as u32).map(|k| pn - p.pow(k)).product()
}

/// An ordered tuple of equally sized square matrices over one field.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MatrixTuple {
    parts: Vec<Matrix>,
}

impl MatrixTuple {
    pub fn new(parts: Vec<Matrix>) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::ShapeMismatch("a matrix tuple needs at least one part".into()))?;
        first.require_square()?;
        for m in &parts[1..] {
            first.same_shape(m)?;
        }
        Ok(Self { parts })
    }

    pub fn pair(a: Matrix, b: Matrix) -> Result<Self> {
        Self::new(vec![a, b])
    }

    pub fn parts(&self) -> &[Matrix] {
        &self.parts
    }

    pub fn arity(&self) -> usize {
        self.parts.len()
    }

    /// Side length of the square parts.
    pub fn size(&self) -> usize {
        self.parts[0].rows
    }

    pub fn field(&self) -> PrimeField {
        self.parts[0].field
    }
}

impl fmt::Debug for MatrixTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("MatrixTuple").field(&self.parts).finish()
    }
}

/// `(S A_1 S^-1, ..., S A_a S^-1)` with one shared `S`.
pub fn conjugate_tuple(t: &MatrixTuple, s: &Matrix) -> Result<MatrixTuple> {
    if s.field != t.field() {
        return Err(Error::ModulusMismatch(
            s.field.modulus(),
            t.field().modulus(),
        ));
    }
    if s.rows != t.size() || s.cols != t.size() {
        return Err(Error::ShapeMismatch(format!(
            "conjugator is {}x{}, tuple parts are {}x{}",
            s.rows,
            s.cols,
            t.size(),
            t.size()
        )));
    }
    let s_inv = mat_inverse(s)?;
    let parts = t
        .parts
        .iter()
        .map(|a| mat_mul(&mat_mul(s, a)?, &s_inv))
        .collect::<Result<Vec<_>>>()?;
    Ok(MatrixTuple { parts })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn fp(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    fn random_matrix(rng: &mut StdRng, f: PrimeField, n: usize) -> Matrix {
        let p = f.modulus() as i64;
        Matrix::new(f, n, n, (0..n * n).map(|_| rng.random_range(0..p))).unwrap()
    }

    #[test]
    fn mul_examples() {
        let f2 = fp(2);
        let a = Matrix::from_rows(f2, &[&[1, 1], &[0, 1]]).unwrap();
        let i = Matrix::identity(f2, 2);
        assert_eq!(mat_mul(&i, &a).unwrap(), a);
        let e12 = Matrix::unit(f2, 2, 2, 0, 1);
        let e21 = Matrix::unit(f2, 2, 2, 1, 0);
        assert_eq!(mat_mul(&e12, &e21).unwrap(), Matrix::unit(f2, 2, 2, 0, 0));
        assert!(mat_mul(&a, &Matrix::zeros(f2, 2, 2)).unwrap().is_zero());
    }

    #[test]
    fn mul_errors() {
        let f2 = fp(2);
        let a = Matrix::zeros(f2, 2, 3);
        assert!(matches!(mat_mul(&a, &a), Err(Error::ShapeMismatch(_))));
        let b = Matrix::zeros(fp(3), 3, 2);
        assert_eq!(mat_mul(&a, &b), Err(Error::ModulusMismatch(2, 3)));
        assert!(Matrix::new(f2, 2, 2, [1, 2, 3]).is_err());
        assert!(Matrix::new(f2, 0, 2, []).is_err());
    }

    #[test]
    fn rank_examples() {
        let f5 = fp(5);
        assert_eq!(mat_rank(&Matrix::zeros(f5, 2, 3)), 0);
        assert_eq!(mat_rank(&Matrix::identity(f5, 4)), 4);
        assert_eq!(mat_rank(&Matrix::unit(fp(2), 2, 2, 0, 1)), 1);
        let wide = Matrix::from_rows(f5, &[&[1, 2, 3], &[2, 4, 6]]).unwrap();
        assert_eq!(mat_rank(&wide), 1);
    }

    #[test]
    fn det_examples() {
        let f3 = fp(3);
        assert_eq!(mat_det(&Matrix::identity(f3, 3)).unwrap(), f3.one());
        let rep = Matrix::from_rows(f3, &[&[1, 2], &[1, 2]]).unwrap();
        assert!(mat_det(&rep).unwrap().is_zero());
        let f2 = fp(2);
        let t = Matrix::from_rows(f2, &[&[1, 1], &[0, 1]]).unwrap();
        assert_eq!(mat_det(&t).unwrap(), f2.one());
        // swap sign
        let f5 = fp(5);
        let swap = Matrix::from_rows(f5, &[&[0, 1], &[1, 0]]).unwrap();
        assert_eq!(mat_det(&swap).unwrap(), f5.elem(-1));
        assert!(matches!(
            mat_det(&Matrix::zeros(f5, 2, 3)),
            Err(Error::NotSquare { rows: 2, cols: 3 })
        ));
    }

    #[test]
    fn inverse_examples() {
        let f2 = fp(2);
        let i = Matrix::identity(f2, 3);
        assert_eq!(mat_inverse(&i).unwrap(), i);
        let t = Matrix::from_rows(f2, &[&[1, 1], &[0, 1]]).unwrap();
        assert_eq!(mat_inverse(&t).unwrap(), t);
        assert_eq!(mat_inverse(&Matrix::zeros(f2, 2, 2)), Err(Error::Singular));
    }

    #[test]
    fn gl_counts() {
        for (n, p, expected) in [(1, 2, 1), (2, 2, 6), (2, 3, 48), (3, 2, 168)] {
            let f = fp(p);
            let all: Vec<Matrix> = enumerate_gl(n, f).unwrap().collect();
            assert_eq!(all.len() as u64, expected, "GL_{n}(F_{p})");
            assert_eq!(gl_order(n, p), expected);
            assert!(all.iter().all(|m| !mat_det(m).unwrap().is_zero()));
            assert!(all.windows(2).all(|w| w[0] < w[1]), "strictly increasing");
        }
        assert!(matches!(enumerate_gl(4, fp(3)), Err(Error::TooLarge(_))));
    }

    #[test]
    fn space_indexing_is_lexicographic() {
        let space = MatrixSpace::new(2, fp(2)).unwrap();
        assert_eq!(space.len(), 16);
        let e12 = Matrix::unit(fp(2), 2, 2, 0, 1);
        assert_eq!(space.index_of(&e12), 4);
        for i in 0..space.len() {
            assert_eq!(space.index_of(&space.matrix(i)), i);
        }
        let all: Vec<Matrix> = space.iter().collect();
        assert!(all.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn conjugate_examples() {
        let f2 = fp(2);
        let a = Matrix::from_rows(f2, &[&[1, 1], &[0, 0]]).unwrap();
        let t = MatrixTuple::new(vec![a.clone()]).unwrap();
        assert_eq!(conjugate_tuple(&t, &Matrix::identity(f2, 2)).unwrap(), t);

        let f5 = fp(5);
        let scalars =
            MatrixTuple::pair(Matrix::scalar(f5.elem(2), 2), Matrix::scalar(f5.elem(3), 2))
                .unwrap();
        for s in enumerate_gl(2, f5).unwrap().step_by(37) {
            assert_eq!(conjugate_tuple(&scalars, &s).unwrap(), scalars);
        }

        let swap = Matrix::from_rows(f2, &[&[0, 1], &[1, 0]]).unwrap();
        let t = MatrixTuple::new(vec![Matrix::unit(f2, 2, 2, 0, 1)]).unwrap();
        let u = conjugate_tuple(&t, &swap).unwrap();
        assert_eq!(u.parts()[0], Matrix::unit(f2, 2, 2, 1, 0));
        assert_eq!(
            conjugate_tuple(&t, &Matrix::zeros(f2, 2, 2)),
            Err(Error::Singular)
        );
    }

    #[test]
    fn tuple_validation() {
        let f2 = fp(2);
        assert!(MatrixTuple::new(vec![]).is_err());
        assert!(MatrixTuple::new(vec![Matrix::zeros(f2, 2, 3)]).is_err());
        assert!(MatrixTuple::pair(Matrix::zeros(f2, 2, 2), Matrix::zeros(f2, 3, 3)).is_err());
        assert!(MatrixTuple::pair(Matrix::zeros(f2, 2, 2), Matrix::zeros(fp(3), 2, 2)).is_err());
    }

    #[test]
    fn mul_associative_with_unit() {
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..200 {
            let f = fp([2, 3, 5, 7][rng.random_range(0..4)]);
            let n = rng.random_range(1..=4);
            let (a, b, c) = (
                random_matrix(&mut rng, f, n),
                random_matrix(&mut rng, f, n),
                random_matrix(&mut rng, f, n),
            );
            let left = mat_mul(&mat_mul(&a, &b).unwrap(), &c).unwrap();
            let right = mat_mul(&a, &mat_mul(&b, &c).unwrap()).unwrap();
            assert_eq!(left, right);
            let i = Matrix::identity(f, n);
            assert_eq!(mat_mul(&a, &i).unwrap(), a);
            assert_eq!(mat_mul(&i, &a).unwrap(), a);
        }
    }

    #[test]
    fn det_multiplicative_and_inverse_roundtrip() {
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..300 {
            let f = fp([2, 3, 5][rng.random_range(0..3)]);
            let n = rng.random_range(1..=4);
            let a = random_matrix(&mut rng, f, n);
            let b = random_matrix(&mut rng, f, n);
            let ab = mat_mul(&a, &b).unwrap();
            assert_eq!(
                mat_det(&ab).unwrap(),
                mat_det(&a).unwrap() * mat_det(&b).unwrap()
            );
            match mat_inverse(&a) {
                Ok(inv) => {
                    assert_eq!(mat_mul(&a, &inv).unwrap(), Matrix::identity(f, n));
                    assert_eq!(mat_mul(&inv, &a).unwrap(), Matrix::identity(f, n));
                }
                Err(Error::Singular) => assert!(mat_det(&a).unwrap().is_zero()),
                Err(e) => panic!("{e}"),
            }
        }
    }

    #[test]
    fn rank_conjugation_invariant_exhaustive() {
        let f2 = fp(2);
        let gl: Vec<Matrix> = enumerate_gl(2, f2).unwrap().collect();
        for a in MatrixSpace::new(2, f2).unwrap().iter() {
            let t = MatrixTuple::new(vec![a.clone()]).unwrap();
            for s in &gl {
                let c = conjugate_tuple(&t, s).unwrap();
                assert_eq!(mat_rank(&c.parts()[0]), mat_rank(&a));
            }
        }
    }

    #[test]
    fn conjugation_roundtrip_exhaustive() {
        let f2 = fp(2);
        let space = MatrixSpace::new(2, f2).unwrap();
        let gl: Vec<Matrix> = enumerate_gl(2, f2).unwrap().collect();
        for i in 0..space.len() {
            for j in 0..space.len() {
                let t = MatrixTuple::pair(space.matrix(i), space.matrix(j)).unwrap();
                for s in &gl {
                    let back =
                        conjugate_tuple(&conjugate_tuple(&t, s).unwrap(), &mat_inverse(s).unwrap())
                            .unwrap();
                    assert_eq!(back, t);
                }
            }
        }
    }
}
