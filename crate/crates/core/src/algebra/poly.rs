//! Dense univariate polynomials over F_p.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::field::{FieldElement, PrimeField};
use crate::error::{Error, Result};

/// Polynomial over a prime field, coefficients lowest degree first.
///
/// Trailing zeros are never stored, so the zero polynomial has an empty
/// coefficient vector and `degree() == None`. Since `None < Some(_)` the
/// derived ordering on degrees puts zero below every constant.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    field: PrimeField,
    coeffs: Vec<u32>,
}

impl Poly {
    pub fn new(field: PrimeField, coeffs: impl IntoIterator<Item = i64>) -> Self {
        let coeffs = coeffs.into_iter().map(|c| field.elem(c).value()).collect();
        Self::from_raw(field, coeffs)
    }

    pub fn from_elements(field: PrimeField, coeffs: &[FieldElement]) -> Result<Self> {
        let mut raw = Vec::with_capacity(coeffs.len());
        for c in coeffs {
            if c.modulus() != field.modulus() {
                return Err(Error::ModulusMismatch(field.modulus(), c.modulus()));
            }
            raw.push(c.value());
        }
        Ok(Self::from_raw(field, raw))
    }

    pub(crate) fn from_raw(field: PrimeField, mut coeffs: Vec<u32>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Self { field, coeffs }
    }

    pub fn zero(field: PrimeField) -> Self {
        Self {
            field,
            coeffs: Vec::new(),
        }
    }

    pub fn one(field: PrimeField) -> Self {
        Self::constant(field.one())
    }

    pub fn constant(c: FieldElement) -> Self {
        Self::from_raw(c.field(), vec![c.value()])
    }

    /// The polynomial `x`.
    pub fn x(field: PrimeField) -> Self {
        Self::from_raw(field, vec![0, 1])
    }

    /// `c * x^k`
    pub fn monomial(c: FieldElement, k: usize) -> Self {
        let mut coeffs = vec![0; k + 1];
        coeffs[k] = c.value();
        Self::from_raw(c.field(), coeffs)
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs == [1]
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last() == Some(&1)
    }

    /// Coefficient of `x^k` (zero past the degree).
    pub fn coeff(&self, k: usize) -> FieldElement {
        self.field
            .elem(self.coeffs.get(k).copied().unwrap_or(0) as i64)
    }

    pub fn coefficients(&self) -> Vec<FieldElement> {
        self.coeffs
            .iter()
            .map(|&c| self.field.elem(c as i64))
            .collect()
    }

    pub fn leading(&self) -> Option<FieldElement> {
        self.coeffs.last().map(|&c| self.field.elem(c as i64))
    }

    pub fn scale(&self, c: FieldElement) -> Poly {
        self.check_elem(c);
        let f = self.field;
        Self::from_raw(
            f,
            self.coeffs
                .iter()
                .map(|&a| f.mul_raw(a, c.value()))
                .collect(),
        )
    }

    /// Divides by the leading coefficient; zero stays zero.
    pub fn monic(&self) -> Poly {
        match self.leading() {
            None => self.clone(),
            Some(lc) => self.scale(lc.inverse().expect("leading coefficient is nonzero")),
        }
    }

    /// Horner evaluation.
    pub fn eval(&self, a: FieldElement) -> FieldElement {
        self.check_elem(a);
        let f = self.field;
        let v = self
            .coeffs
            .iter()
            .rev()
            .fold(0u32, |acc, &c| f.add_raw(f.mul_raw(acc, a.value()), c));
        f.elem(v as i64)
    }

    /// `self(inner(x))`, by Horner over polynomials.
    pub fn compose(&self, inner: &Poly) -> Poly {
        let mut acc = Poly::zero(self.field);
        for &c in self.coeffs.iter().rev() {
            acc = &(&acc * inner) + &Poly::constant(self.field.elem(c as i64));
        }
        acc
    }

    /// Reduction modulo `x^p - x`: the unique representative of degree
    /// below `p` inducing the same function `F_p -> F_p`.
    pub fn reduce_as_function(&self) -> Poly {
        let p = self.field.size();
        if self.coeffs.len() <= p {
            return self.clone();
        }
        // x^k == x^(k - (p-1)) for k >= p
        let mut out = self.coeffs.clone();
        for k in (p..out.len()).rev() {
            let c = out[k];
            if c != 0 {
                out[k] = 0;
                let target = k - (p - 1);
                out[target] = self.field.add_raw(out[target], c);
            }
        }
        Poly::from_raw(self.field, out)
    }

    fn check(&self, other: &Poly) {
        assert_eq!(self.field, other.field, "polynomials over different moduli");
    }

    fn check_elem(&self, a: FieldElement) {
        assert_eq!(
            self.field.modulus(),
            a.modulus(),
            "polynomial and scalar over different moduli"
        );
    }
}

/// Euclidean division: `num = q * den + r` with `deg r < deg den`.
pub fn poly_divmod(num: &Poly, den: &Poly) -> Result<(Poly, Poly)> {
    if num.field != den.field {
        return Err(Error::ModulusMismatch(
            num.field.modulus(),
            den.field.modulus(),
        ));
    }
    let f = num.field;
    let dd = den.degree().ok_or(Error::DivisionByZeroPoly)?;
    let inv_lc = f.inv_raw(den.coeffs[dd])?;
    let mut rem = num.coeffs.clone();
    if rem.len() <= dd {
        return Ok((Poly::zero(f), num.clone()));
    }
    let mut quot = vec![0u32; rem.len() - dd];
    for k in (dd..rem.len()).rev() {
        let c = rem[k];
        if c == 0 {
            continue;
        }
        let q = f.mul_raw(c, inv_lc);
        quot[k - dd] = q;
        for (i, &d) in den.coeffs.iter().enumerate() {
            let idx = k - dd + i;
            rem[idx] = f.sub_raw(rem[idx], f.mul_raw(q, d));
        }
    }
    rem.truncate(dd);
    Ok((Poly::from_raw(f, quot), Poly::from_raw(f, rem)))
}

/// Monic gcd by the Euclidean algorithm.
pub fn poly_gcd_monic(f: &Poly, g: &Poly) -> Result<Poly> {
    if f.field != g.field {
        return Err(Error::ModulusMismatch(f.field.modulus(), g.field.modulus()));
    }
    if f.is_zero() && g.is_zero() {
        return Err(Error::BothZero);
    }
    let (mut a, mut b) = (f.clone(), g.clone());
    while !b.is_zero() {
        let (_, r) = poly_divmod(&a, &b)?;
        a = b;
        b = r;
    }
    Ok(a.monic())
}

pub fn poly_eval(f: &Poly, a: FieldElement) -> Result<FieldElement> {
    if f.field.modulus() != a.modulus() {
        return Err(Error::ModulusMismatch(f.field.modulus(), a.modulus()));
    }
    Ok(f.eval(a))
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        self.check(rhs);
        let f = self.field;
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n)
            .map(|i| {
                f.add_raw(
                    self.coeffs.get(i).copied().unwrap_or(0),
                    rhs.coeffs.get(i).copied().unwrap_or(0),
                )
            })
            .collect();
        Poly::from_raw(f, coeffs)
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self + &(-rhs)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        let f = self.field;
        Poly::from_raw(f, self.coeffs.iter().map(|&c| f.neg_raw(c)).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        self.check(rhs);
        let f = self.field;
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero(f);
        }
        let mut out = vec![0u32; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = f.add_raw(out[i + j], f.mul_raw(a, b));
            }
        }
        Poly::from_raw(f, out)
    }
}

impl fmt::Display for Poly {
    /// Highest degree first, e.g. `x^2+x+1`, `2x+2`, `0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, "+")?;
            }
            first = false;
            match (k, c) {
                (0, c) => write!(f, "{c}")?,
                (1, 1) => write!(f, "x")?,
                (1, c) => write!(f, "{c}x")?,
                (k, 1) => write!(f, "x^{k}")?,
                (k, c) => write!(f, "{c}x^{k}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly[F_{}]({})", self.field.modulus(), self)
    }
}
