//! The prime field F_p.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const MAX_MODULUS: u64 = 1 << 31;

/// A validated prime modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct PrimeField {
    p: u32,
}

impl PrimeField {
    /// Checks primality by trial division.
    pub fn new(p: u64) -> Result<Self> {
        if !(2..=MAX_MODULUS).contains(&p) || !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(Self { p: p as u32 })
    }

    pub fn modulus(self) -> u32 {
        self.p
    }

    pub fn size(self) -> usize {
        self.p as usize
    }

    /// Reduces an arbitrary integer into the field.
    pub fn elem(self, v: i64) -> FieldElement {
        let p = self.p as i64;
        FieldElement {
            value: v.rem_euclid(p) as u32,
            modulus: self.p,
        }
    }

    pub fn zero(self) -> FieldElement {
        FieldElement {
            value: 0,
            modulus: self.p,
        }
    }

    pub fn one(self) -> FieldElement {
        FieldElement {
            value: 1,
            modulus: self.p,
        }
    }

    /// All elements `0, 1, ..., p-1` in order.
    pub fn elements(self) -> impl Iterator<Item = FieldElement> {
        (0..self.p).map(move |value| FieldElement {
            value,
            modulus: self.p,
        })
    }

    pub(crate) fn add_raw(self, a: u32, b: u32) -> u32 {
        ((a as u64 + b as u64) % self.p as u64) as u32
    }

    pub(crate) fn sub_raw(self, a: u32, b: u32) -> u32 {
        ((a as u64 + self.p as u64 - b as u64) % self.p as u64) as u32
    }

    pub(crate) fn mul_raw(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    pub(crate) fn neg_raw(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    pub(crate) fn inv_raw(self, a: u32) -> Result<u32> {
        if a == 0 {
            return Err(Error::ZeroInverse);
        }
        // extended Euclid on (a, p)
        let (mut r0, mut r1) = (self.p as i64, a as i64);
        let (mut t0, mut t1) = (0i64, 1i64);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        debug_assert_eq!(r0, 1);
        Ok(t0.rem_euclid(self.p as i64) as u32)
    }
}

impl TryFrom<u64> for PrimeField {
    type Error = Error;
    fn try_from(p: u64) -> Result<Self> {
        Self::new(p)
    }
}

impl From<PrimeField> for u64 {
    fn from(f: PrimeField) -> u64 {
        f.p as u64
    }
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// A residue `0 <= value < modulus`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElement {
    value: u32,
    modulus: u32,
}

impl FieldElement {
    pub fn value(self) -> u32 {
        self.value
    }

    pub fn modulus(self) -> u32 {
        self.modulus
    }

    pub fn field(self) -> PrimeField {
        PrimeField { p: self.modulus }
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    pub fn inverse(self) -> Result<FieldElement> {
        field_inverse(self)
    }

    pub fn pow(self, mut e: u64) -> FieldElement {
        let f = self.field();
        let mut base = self.value;
        let mut acc = 1u32;
        while e > 0 {
            if e & 1 == 1 {
                acc = f.mul_raw(acc, base);
            }
            base = f.mul_raw(base, base);
            e >>= 1;
        }
        f.elem(acc as i64)
    }

    fn check(self, other: FieldElement) {
        assert_eq!(
            self.modulus, other.modulus,
            "field elements over different moduli"
        );
    }
}

/// Multiplicative inverse in F_p.
pub fn field_inverse(a: FieldElement) -> Result<FieldElement> {
    let value = a.field().inv_raw(a.value)?;
    Ok(FieldElement {
        value,
        modulus: a.modulus,
    })
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl Add for FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: FieldElement) -> FieldElement {
        self.check(rhs);
        FieldElement {
            value: self.field().add_raw(self.value, rhs.value),
            modulus: self.modulus,
        }
    }
}

impl Sub for FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: FieldElement) -> FieldElement {
        self.check(rhs);
        FieldElement {
            value: self.field().sub_raw(self.value, rhs.value),
            modulus: self.modulus,
        }
    }
}

impl Mul for FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: FieldElement) -> FieldElement {
        self.check(rhs);
        FieldElement {
            value: self.field().mul_raw(self.value, rhs.value),
            modulus: self.modulus,
        }
    }
}

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement {
            value: self.field().neg_raw(self.value),
            modulus: self.modulus,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_composites_and_out_of_range() {
        for bad in [0u64, 1, 4, 9, 15, 91, (1 << 31) + 1] {
            assert!(
                matches!(PrimeField::new(bad), Err(Error::NotPrime(_))),
                "{bad}"
            );
        }
        for good in [2u64, 3, 5, 7, 101, 2147483647] {
            assert!(PrimeField::new(good).is_ok(), "{good}");
        }
    }

    #[test]
    fn inverse_examples() {
        let f5 = PrimeField::new(5).unwrap();
        assert_eq!(field_inverse(f5.one()).unwrap(), f5.one());
        assert_eq!(field_inverse(f5.elem(2)).unwrap(), f5.elem(3));
        let f7 = PrimeField::new(7).unwrap();
        assert_eq!(field_inverse(f7.zero()), Err(Error::ZeroInverse));
    }

    #[test]
    fn inverse_exhaustive_small_primes() {
        for p in (2..=101u64).filter(|&p| is_prime(p)) {
            let f = PrimeField::new(p).unwrap();
            for a in f.elements().skip(1) {
                assert_eq!(a * field_inverse(a).unwrap(), f.one(), "p={p} a={a}");
            }
        }
    }

    #[test]
    fn negative_reduction() {
        let f = PrimeField::new(7).unwrap();
        assert_eq!(f.elem(-1).value(), 6);
        assert_eq!(f.elem(-15).value(), 6);
        assert_eq!(-f.elem(3), f.elem(4));
        assert_eq!(f.elem(3).pow(6), f.one());
    }

    #[test]
    fn large_modulus_does_not_overflow() {
        let f = PrimeField::new(2147483647).unwrap();
        let a = f.elem(2147483646);
        assert_eq!(a * a, f.one());
        assert_eq!(a + a, f.elem(2147483645));
    }
}
