//! Non-commutative polynomials in `x_1, ..., x_a` and tuples of them.

use std::collections::BTreeMap;
use std::fmt;

use crate::algebra::{FieldElement, PrimeField};
use crate::equivalence::StepCounter;
use crate::error::{Error, Result};
use crate::matrix::{mat_mul, Matrix, MatrixTuple};

/// A word over zero-based variable indices; the empty word is the constant
/// monomial. Displayed one-based (`x1x2`).
pub type Word = Vec<usize>;

/// Element of the free algebra `F_p<x_1, ..., x_a>`. Only nonzero
/// coefficients are stored.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct NcPoly {
    field: PrimeField,
    arity: usize,
    terms: BTreeMap<Word, u32>,
}

impl NcPoly {
    pub fn zero(field: PrimeField, arity: usize) -> Self {
        Self {
            field,
            arity,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: FieldElement, arity: usize) -> Self {
        let mut p = Self::zero(c.field(), arity);
        p.add_term(Vec::new(), c.value());
        p
    }

    /// The variable `x_{index+1}`.
    pub fn var(field: PrimeField, arity: usize, index: usize) -> Result<Self> {
        Self::from_terms(field, arity, [(vec![index], 1)])
    }

    pub fn from_terms(
        field: PrimeField,
        arity: usize,
        terms: impl IntoIterator<Item = (Word, i64)>,
    ) -> Result<Self> {
        let mut p = Self::zero(field, arity);
        for (word, c) in terms {
            if let Some(&bad) = word.iter().find(|&&v| v >= arity) {
                return Err(Error::ArityMismatch {
                    expected: arity,
                    got: bad + 1,
                });
            }
            p.add_term(word, field.elem(c).value());
        }
        Ok(p)
    }

    fn add_term(&mut self, word: Word, c: u32) {
        let f = self.field;
        let entry = self.terms.entry(word).or_insert(0);
        *entry = f.add_raw(*entry, c);
        self.terms.retain(|_, v| *v != 0);
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Zero or a multiple of the empty word.
    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Vec::is_empty)
    }

    /// Coefficient of the empty word.
    pub fn constant_term(&self) -> FieldElement {
        self.coeff(&[])
    }

    pub fn coeff(&self, word: &[usize]) -> FieldElement {
        self.field
            .elem(self.terms.get(word).copied().unwrap_or(0) as i64)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, FieldElement)> {
        self.terms
            .iter()
            .map(|(w, &c)| (w, self.field.elem(c as i64)))
    }

    pub fn max_word_len(&self) -> usize {
        self.terms.keys().map(Vec::len).max().unwrap_or(0)
    }

    pub fn add(&self, other: &NcPoly) -> Result<NcPoly> {
        self.compatible(other)?;
        let mut out = self.clone();
        for (w, &c) in &other.terms {
            out.add_term(w.clone(), c);
        }
        Ok(out)
    }

    pub fn scale(&self, c: FieldElement) -> NcPoly {
        let f = self.field;
        let mut out = Self::zero(f, self.arity);
        for (w, &v) in &self.terms {
            out.add_term(w.clone(), f.mul_raw(v, c.value()));
        }
        out
    }

    pub fn sub(&self, other: &NcPoly) -> Result<NcPoly> {
        self.add(&other.scale(-self.field.one()))
    }

    /// Product in the free algebra: words concatenate, nothing commutes.
    pub fn mul(&self, other: &NcPoly) -> Result<NcPoly> {
        self.compatible(other)?;
        let f = self.field;
        let mut out = Self::zero(f, self.arity);
        for (u, &a) in &self.terms {
            for (v, &b) in &other.terms {
                let mut w = u.clone();
                w.extend_from_slice(v);
                out.add_term(w, f.mul_raw(a, b));
            }
        }
        Ok(out)
    }

    fn compatible(&self, other: &NcPoly) -> Result<()> {
        if self.field != other.field {
            return Err(Error::ModulusMismatch(
                self.field.modulus(),
                other.field.modulus(),
            ));
        }
        if self.arity != other.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                got: other.arity,
            });
        }
        Ok(())
    }

    /// Parses `c*x1x2 + x2 - 3*1`. Terms are separated by `+` or `-`; a
    /// missing coefficient means 1; the empty word is written `1`; a bare
    /// integer is a constant; `0` alone is the zero polynomial.
    pub fn parse(field: PrimeField, arity: usize, s: &str) -> std::result::Result<NcPoly, String> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err("empty polynomial".into());
        }
        let mut p = Self::zero(field, arity);
        let mut rest = compact.as_str();
        let mut first = true;
        while !rest.is_empty() {
            let sign = match rest.as_bytes()[0] {
                b'+' => {
                    rest = &rest[1..];
                    1
                }
                b'-' => {
                    rest = &rest[1..];
                    -1
                }
                _ if first => 1,
                _ => unreachable!("terms end at a sign"),
            };
            first = false;
            let end = rest.find(['+', '-']).unwrap_or(rest.len());
            let term = &rest[..end];
            rest = &rest[end..];
            if term.is_empty() {
                return Err("dangling sign".into());
            }
            let (coeff, word) = match term.split_once('*') {
                Some((c, w)) => (
                    c.parse::<i64>()
                        .map_err(|_| format!("bad coefficient {c:?}"))?,
                    parse_word(w, arity)?,
                ),
                None if term.starts_with('x') => (1, parse_word(term, arity)?),
                None => (
                    term.parse::<i64>()
                        .map_err(|_| format!("bad term {term:?}"))?,
                    Vec::new(),
                ),
            };
            p.add_term(word, field.elem(sign * coeff).value());
        }
        Ok(p)
    }
}

fn parse_word(w: &str, arity: usize) -> std::result::Result<Word, String> {
    if w == "1" {
        return Ok(Vec::new());
    }
    let mut word = Vec::new();
    let mut rest = w;
    while !rest.is_empty() {
        let Some(tail) = rest.strip_prefix('x') else {
            return Err(format!("bad word {w:?}"));
        };
        let end = tail.find('x').unwrap_or(tail.len());
        let idx: usize = tail[..end]
            .parse()
            .map_err(|_| format!("bad variable in {w:?}"))?;
        if idx == 0 || idx > arity {
            return Err(format!("unknown variable x{idx} (arity {arity})"));
        }
        word.push(idx - 1);
        rest = &tail[end..];
    }
    if word.is_empty() {
        return Err(format!("bad word {w:?}"));
    }
    Ok(word)
}

impl fmt::Display for NcPoly {
    /// Canonical `c*word` terms joined by `+`, shortlex word order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut words: Vec<(&Word, &u32)> = self.terms.iter().collect();
        words.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then(a.0.cmp(b.0)));
        let parts: Vec<String> = words
            .into_iter()
            .map(|(w, c)| {
                if w.is_empty() {
                    format!("{c}*1")
                } else {
                    let vars: String = w.iter().map(|v| format!("x{}", v + 1)).collect();
                    format!("{c}*{vars}")
                }
            })
            .collect();
        write!(f, "{}", parts.join("+"))
    }
}

impl fmt::Debug for NcPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "NcPoly[F_{}; a={}]({})",
            self.field.modulus(),
            self.arity,
            self
        )
    }
}

/// `sum_w c_w * (product of the word's matrices, left to right)`, the empty
/// word contributing `c * I`.
pub fn nc_eval(f: &NcPoly, t: &MatrixTuple) -> Result<Matrix> {
    nc_eval_counted(f, t, &mut StepCounter::new())
}

/// [`nc_eval`], charging one step per field multiply-add.
pub fn nc_eval_counted(f: &NcPoly, t: &MatrixTuple, steps: &mut StepCounter) -> Result<Matrix> {
    if t.arity() != f.arity {
        return Err(Error::ArityMismatch {
            expected: f.arity,
            got: t.arity(),
        });
    }
    if t.field() != f.field {
        return Err(Error::ModulusMismatch(
            f.field.modulus(),
            t.field().modulus(),
        ));
    }
    let n = t.size();
    let cube = (n * n * n) as u64;
    let mut acc = Matrix::zeros(f.field, n, n);
    for (word, &c) in &f.terms {
        let c = f.field.elem(c as i64);
        let Some((&first, rest)) = word.split_first() else {
            steps.charge(n as u64);
            acc = acc.add(&Matrix::scalar(c, n))?;
            continue;
        };
        let mut prod = t.parts()[first].clone();
        for &v in rest {
            prod = mat_mul(&prod, &t.parts()[v])?;
            steps.charge(cube);
        }
        steps.charge((n * n) as u64);
        acc = acc.add(&prod.scale(c))?;
    }
    Ok(acc)
}

/// A `b`-tuple of polynomials in `a` variables, with an optional step
/// budget per application.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Transform {
    arity_in: usize,
    polys: Vec<NcPoly>,
    budget: Option<u64>,
}

impl Transform {
    pub fn new(arity_in: usize, polys: Vec<NcPoly>) -> Result<Self> {
        if arity_in == 0 {
            return Err(Error::ArityMismatch {
                expected: 1,
                got: 0,
            });
        }
        let first = polys.first().ok_or(Error::ArityMismatch {
            expected: 1,
            got: 0,
        })?;
        for p in &polys {
            if p.arity != arity_in {
                return Err(Error::ArityMismatch {
                    expected: arity_in,
                    got: p.arity,
                });
            }
            if p.field != first.field {
                return Err(Error::ModulusMismatch(
                    first.field.modulus(),
                    p.field.modulus(),
                ));
            }
        }
        Ok(Self {
            arity_in,
            polys,
            budget: None,
        })
    }

    /// `(x_1, ..., x_a)`
    pub fn identity(field: PrimeField, arity: usize) -> Result<Self> {
        let polys = (0..arity)
            .map(|i| NcPoly::var(field, arity, i))
            .collect::<Result<Vec<_>>>()?;
        Self::new(arity, polys)
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = Some(budget);
        self
    }

    pub fn arity_in(&self) -> usize {
        self.arity_in
    }

    pub fn arity_out(&self) -> usize {
        self.polys.len()
    }

    pub fn polys(&self) -> &[NcPoly] {
        &self.polys
    }

    pub fn budget(&self) -> Option<u64> {
        self.budget
    }

    pub fn field(&self) -> PrimeField {
        self.polys[0].field
    }
}

/// Componentwise evaluation. Returns the image and the steps it cost.
pub fn apply_transform(t: &Transform, input: &MatrixTuple) -> Result<(MatrixTuple, u64)> {
    let mut steps = StepCounter::new();
    let parts = t
        .polys
        .iter()
        .map(|p| nc_eval_counted(p, input, &mut steps))
        .collect::<Result<Vec<_>>>()?;
    if let Some(budget) = t.budget {
        if steps.used() > budget {
            return Err(Error::BudgetExceeded {
                used: steps.used(),
                budget,
            });
        }
    }
    Ok((MatrixTuple::new(parts)?, steps.used()))
}
