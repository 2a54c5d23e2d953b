//! Refutation of candidate witnesses that pairs of matrices under
//! simultaneous similarity embed into single matrices under similarity.
//!
//! A candidate `T(x1, x2)` must satisfy: `(A1, A2) ~ (B1, B2)` iff
//! `T(A1, A2) ~ T(B1, B2)`. Evaluation commutes with conjugation, so the
//! forward direction always holds; refutation targets the converse.
//!
//! Scalar stage: on scalar pairs `(l I, m I)` the candidate collapses to a
//! commutative polynomial `p(l, m)`. There are `p^2` scalar pairs but only
//! `p` values, so two distinct pairs collide. Distinct scalar pairs are
//! never simultaneously similar (scalars are central), yet their images are
//! equal. When `p(l, m)` is constant but `T` is not, the scalar stage is
//! uninformative and an exhaustive scan over all pairs of tuples runs
//! instead.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use super::ncpoly::{apply_transform, NcPoly, Transform};
use crate::algebra::{FieldElement, PrimeField};
use crate::equivalence::{similar_bruteforce, tuple_at, tuple_index};
use crate::error::{Error, Result};
use crate::invariants::invariant_factors;
use crate::matrix::{conjugate_tuple, enumerate_gl, Matrix, MatrixSpace, MatrixTuple};

/// Largest field size the scalar collision scan accepts.
pub const MAX_SCALAR_FIELD: u32 = 101;
/// Largest number of tuples the exhaustive stage enumerates (`3^8`, i.e.
/// pairs of 2x2 matrices over F_3).
pub const MAX_EXHAUSTIVE_TUPLES: usize = 6561;

/// Bivariate commutative polynomial `sum c_{m,n} l^m mu^n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScalarTable {
    field: PrimeField,
    coeffs: BTreeMap<(usize, usize), u32>,
}

impl ScalarTable {
    pub fn new(
        field: PrimeField,
        entries: impl IntoIterator<Item = ((usize, usize), i64)>,
    ) -> Self {
        let mut table = Self {
            field,
            coeffs: BTreeMap::new(),
        };
        for (k, c) in entries {
            table.add(k, field.elem(c).value());
        }
        table
    }

    fn add(&mut self, k: (usize, usize), c: u32) {
        let e = self.coeffs.entry(k).or_insert(0);
        *e = self.field.add_raw(*e, c);
        if *e == 0 {
            self.coeffs.remove(&k);
        }
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn coeff(&self, m: usize, n: usize) -> FieldElement {
        self.field
            .elem(self.coeffs.get(&(m, n)).copied().unwrap_or(0) as i64)
    }

    /// Nonzero coefficients keyed by `(m, n)`.
    pub fn entries(&self) -> impl Iterator<Item = ((usize, usize), FieldElement)> + '_ {
        self.coeffs
            .iter()
            .map(|(&k, &c)| (k, self.field.elem(c as i64)))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Only `c_{0,0}` may be nonzero.
    pub fn is_constant(&self) -> bool {
        self.coeffs.keys().all(|&k| k == (0, 0))
    }

    pub fn eval(&self, l: FieldElement, m: FieldElement) -> FieldElement {
        self.coeffs
            .iter()
            .fold(self.field.zero(), |acc, (&(i, j), &c)| {
                acc + self.field.elem(c as i64) * l.pow(i as u64) * m.pow(j as u64)
            })
    }
}

/// Collapses each word to `l^(#x1) mu^(#x2)` and sums coefficients, so that
/// `f(l I, mu I) = p(l, mu) I`.
pub fn scalar_specialize(f: &NcPoly) -> Result<ScalarTable> {
    if f.arity() != 2 {
        return Err(Error::ArityMismatch {
            expected: 2,
            got: f.arity(),
        });
    }
    let mut table = ScalarTable::new(f.field(), []);
    for (word, c) in f.terms() {
        let ones = word.iter().filter(|&&v| v == 0).count();
        table.add((ones, word.len() - ones), c.value());
    }
    Ok(table)
}

/// A pair of scalar arguments `(l, mu)`.
pub type ScalarPoint = (FieldElement, FieldElement);

/// First collision of `p(l, mu)` scanning `(l, mu)` lexicographically.
/// Returns `None` only if `p` is injective on `F_p^2`, which cannot happen.
pub fn scalar_collision_search(
    table: &ScalarTable,
    p: u32,
) -> Result<Option<(ScalarPoint, ScalarPoint)>> {
    if table.field.modulus() != p {
        return Err(Error::ModulusMismatch(table.field.modulus(), p));
    }
    if p > MAX_SCALAR_FIELD {
        return Err(Error::TooLarge(format!(
            "scalar scan over F_{p} (limit {MAX_SCALAR_FIELD})"
        )));
    }
    let f = table.field;
    let mut seen: HashMap<FieldElement, ScalarPoint> = HashMap::new();
    for l in f.elements() {
        for m in f.elements() {
            let v = table.eval(l, m);
            if let Some(&first) = seen.get(&v) {
                return Ok(Some((first, (l, m))));
            }
            seen.insert(v, (l, m));
        }
    }
    Ok(None)
}

/// How the scalar stage went.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum ScalarStage {
    /// Two distinct scalar pairs with equal value under the collapsed
    /// polynomial.
    Collision {
        first: (u32, u32),
        second: (u32, u32),
        value: u32,
    },
    /// The collapsed polynomial is constant while the candidate is not.
    Degenerate,
}

/// A concrete violation of "pairs equivalent iff images similar".
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub left: MatrixTuple,
    pub right: MatrixTuple,
    pub left_image: Matrix,
    pub right_image: Matrix,
    /// Whether `left` and `right` are simultaneously similar.
    pub pairs_equivalent: bool,
    /// A conjugator taking `left_image` to `right_image`, when the images
    /// are similar.
    pub image_conjugator: Option<Matrix>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    /// The image of `input` could not be produced within the step budget,
    /// so the candidate does not land in the target problem.
    FailsCondition1 { input: MatrixTuple, reason: String },
    /// Found by the scalar stage.
    FailsCondition2(Witness),
    /// Scalar stage degenerate; witness found by the exhaustive stage.
    DegenerateOnScalars(Witness),
    /// No violation found; only possible when the exhaustive stage was
    /// skipped or bounded.
    NotFalsified { reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub outcome: Outcome,
    pub scalar_stage: ScalarStage,
    pub steps_used: u64,
}

impl Verdict {
    pub fn is_falsified(&self) -> bool {
        !matches!(self.outcome, Outcome::NotFalsified { .. })
    }

    pub fn witness(&self) -> Option<&Witness> {
        match &self.outcome {
            Outcome::FailsCondition2(w) | Outcome::DegenerateOnScalars(w) => Some(w),
            _ => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self.outcome {
            Outcome::FailsCondition1 { .. } => "FailsCondition1",
            Outcome::FailsCondition2(_) => "FailsCondition2",
            Outcome::DegenerateOnScalars(_) => "DegenerateOnScalars",
            Outcome::NotFalsified { .. } => "NotFalsified",
        }
    }
}

impl Witness {
    /// Re-derives everything from scratch: recomputes the images, decides
    /// both relations by brute force, and checks the conjugator.
    pub fn recheck(&self, t: &Transform) -> Result<bool> {
        let (li, _) = apply_transform(t, &self.left)?;
        let (ri, _) = apply_transform(t, &self.right)?;
        if li.parts()[0] != self.left_image || ri.parts()[0] != self.right_image {
            return Ok(false);
        }
        let pairs_equivalent = crate::equivalence::sim_similar(&self.left, &self.right)?.is_some();
        let images_similar = similar_bruteforce(&self.left_image, &self.right_image)?.is_some();
        let conjugator_ok = match &self.image_conjugator {
            Some(s) => {
                let moved = conjugate_tuple(&MatrixTuple::new(vec![self.left_image.clone()])?, s)?;
                moved.parts()[0] == self.right_image
            }
            None => !images_similar,
        };
        Ok(pairs_equivalent == self.pairs_equivalent
            && pairs_equivalent != images_similar
            && conjugator_ok)
    }
}

/// Runs the scalar stage and, if it degenerates, the exhaustive stage on
/// all pairs of `n x n` tuples over `F_p`.
pub fn falsify_containment(t: &Transform, n: usize, p: u32) -> Result<Verdict> {
    if t.arity_in() != 2 {
        return Err(Error::ArityMismatch {
            expected: 2,
            got: t.arity_in(),
        });
    }
    if t.arity_out() != 1 {
        return Err(Error::ArityMismatch {
            expected: 1,
            got: t.arity_out(),
        });
    }
    if t.field().modulus() != p {
        return Err(Error::ModulusMismatch(t.field().modulus(), p));
    }
    if n == 0 {
        return Err(Error::ShapeMismatch("matrix size must be positive".into()));
    }
    let field = t.field();
    let poly = &t.polys()[0];
    let table = scalar_specialize(poly)?;
    let mut steps = 0u64;

    let degenerate = table.is_constant() && !poly.is_constant();
    if !degenerate {
        let (first, second) =
            scalar_collision_search(&table, p)?.expect("p^2 scalar pairs map into p values");
        let scalar_stage = ScalarStage::Collision {
            first: (first.0.value(), first.1.value()),
            second: (second.0.value(), second.1.value()),
            value: table.eval(first.0, first.1).value(),
        };
        let left = scalar_pair(first, n);
        let right = scalar_pair(second, n);
        let mut images = Vec::with_capacity(2);
        for input in [&left, &right] {
            match apply_transform(t, input) {
                Ok((img, s)) => {
                    steps += s;
                    images.push(img.parts()[0].clone());
                }
                Err(e @ Error::BudgetExceeded { .. }) => {
                    return Ok(Verdict {
                        outcome: Outcome::FailsCondition1 {
                            input: input.clone(),
                            reason: e.to_string(),
                        },
                        scalar_stage,
                        steps_used: steps,
                    })
                }
                Err(e) => return Err(e),
            }
        }
        debug_assert_eq!(images[0], images[1]);
        let right_image = images.pop().expect("two images");
        let left_image = images.pop().expect("two images");
        let image_conjugator = Some(Matrix::identity(field, n));
        return Ok(Verdict {
            outcome: Outcome::FailsCondition2(Witness {
                left,
                right,
                left_image,
                right_image,
                pairs_equivalent: false,
                image_conjugator,
            }),
            scalar_stage,
            steps_used: steps,
        });
    }

    let outcome = exhaustive_stage(t, n, field, &mut steps)?;
    Ok(Verdict {
        outcome,
        scalar_stage: ScalarStage::Degenerate,
        steps_used: steps,
    })
}

fn scalar_pair((l, m): ScalarPoint, n: usize) -> MatrixTuple {
    MatrixTuple::pair(Matrix::scalar(l, n), Matrix::scalar(m, n)).expect("same shape")
}

fn exhaustive_stage(
    t: &Transform,
    n: usize,
    field: PrimeField,
    steps: &mut u64,
) -> Result<Outcome> {
    let space = match MatrixSpace::new(n, field) {
        Ok(s)
            if s.len()
                .checked_mul(s.len())
                .is_some_and(|c| c <= MAX_EXHAUSTIVE_TUPLES) =>
        {
            s
        }
        _ => {
            return Ok(Outcome::NotFalsified {
                reason: format!(
                    "scalar stage degenerate and the exhaustive stage over pairs of {n}x{n} \
                     matrices over F_{} exceeds {MAX_EXHAUSTIVE_TUPLES} tuples",
                    field.modulus()
                ),
            })
        }
    };
    let count = space.len() * space.len();
    let tuples: Vec<MatrixTuple> = (0..count).map(|c| tuple_at(&space, 2, c)).collect();

    let mut images = Vec::with_capacity(count);
    for input in &tuples {
        match apply_transform(t, input) {
            Ok((img, s)) => {
                *steps += s;
                images.push(img.parts()[0].clone());
            }
            Err(e @ Error::BudgetExceeded { .. }) => {
                return Ok(Outcome::FailsCondition1 {
                    input: input.clone(),
                    reason: e.to_string(),
                })
            }
            Err(e) => return Err(e),
        }
    }
    let image_keys = images
        .iter()
        .map(invariant_factors)
        .collect::<Result<Vec<_>>>()?;

    // orbit label = smallest index among all conjugates
    let gl: Vec<Matrix> = enumerate_gl(n, field)?.collect();
    let orbit: Vec<usize> = tuples
        .iter()
        .map(|tu| {
            gl.iter()
                .map(|s| tuple_index(&space, &conjugate_tuple(tu, s).expect("invertible")))
                .min()
                .expect("GL is non-empty")
        })
        .collect();

    for i in 0..count {
        for j in i + 1..count {
            let pairs_equivalent = orbit[i] == orbit[j];
            let images_similar = image_keys[i] == image_keys[j];
            if pairs_equivalent != images_similar {
                let image_conjugator = if images_similar {
                    similar_bruteforce(&images[i], &images[j])?
                } else {
                    None
                };
                return Ok(Outcome::DegenerateOnScalars(Witness {
                    left: tuples[i].clone(),
                    right: tuples[j].clone(),
                    left_image: images[i].clone(),
                    right_image: images[j].clone(),
                    pairs_equivalent,
                    image_conjugator,
                }));
            }
        }
    }
    Ok(Outcome::NotFalsified {
        reason: format!(
            "no violation among all {count} pairs of {n}x{n} matrices over F_{}",
            field.modulus()
        ),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wildness::ncpoly::Word;

    fn fp(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    fn single(f: PrimeField, s: &str) -> Transform {
        Transform::new(2, vec![NcPoly::parse(f, 2, s).unwrap()]).unwrap()
    }

    #[test]
    fn specialize_examples() {
        let f5 = fp(5);
        let comm = NcPoly::parse(f5, 2, "x1x2 - x2x1").unwrap();
        assert!(scalar_specialize(&comm).unwrap().is_zero());
        let anti = NcPoly::parse(f5, 2, "x1x2 + x2x1").unwrap();
        let t = scalar_specialize(&anti).unwrap();
        assert_eq!(t, ScalarTable::new(f5, [((1, 1), 2)]));
        let c = scalar_specialize(&NcPoly::constant(f5.elem(3), 2)).unwrap();
        assert_eq!(c, ScalarTable::new(f5, [((0, 0), 3)]));
        assert!(c.is_constant());
        assert!(matches!(
            scalar_specialize(&NcPoly::zero(f5, 3)),
            Err(Error::ArityMismatch { .. })
        ));
    }

    #[test]
    fn collision_examples() {
        let f5 = fp(5);
        let sum = ScalarTable::new(f5, [((1, 0), 1), ((0, 1), 1)]);
        let (a, b) = scalar_collision_search(&sum, 5).unwrap().unwrap();
        assert_eq!((a.0.value(), a.1.value()), (0, 1));
        assert_eq!((b.0.value(), b.1.value()), (1, 0));

        let konst = ScalarTable::new(f5, [((0, 0), 4)]);
        let (a, b) = scalar_collision_search(&konst, 5).unwrap().unwrap();
        assert_eq!((a.0.value(), a.1.value()), (0, 0));
        assert_eq!((b.0.value(), b.1.value()), (0, 1));

        assert!(matches!(
            scalar_collision_search(&konst, 7),
            Err(Error::ModulusMismatch(5, 7))
        ));
        let f103 = fp(103);
        assert!(matches!(
            scalar_collision_search(&ScalarTable::new(f103, []), 103),
            Err(Error::TooLarge(_))
        ));
    }

    /// Every non-constant table over F_5 with exponents below 3 collides.
    #[test]
    fn collision_always_found_f5() {
        let f5 = fp(5);
        let keys: Vec<(usize, usize)> = (0..3).flat_map(|i| (0..3).map(move |j| (i, j))).collect();
        let mut tried = 0;
        // sample the 5^9 tables along a fixed stride
        for code in (0..5u64.pow(9)).step_by(997) {
            let mut c = code;
            let table = ScalarTable::new(
                f5,
                keys.iter().map(|&k| {
                    let v = (c % 5) as i64;
                    c /= 5;
                    (k, v)
                }),
            );
            let (a, b) = scalar_collision_search(&table, 5).unwrap().unwrap();
            assert_ne!(a, b);
            assert_eq!(table.eval(a.0, a.1), table.eval(b.0, b.1));
            tried += 1;
        }
        assert!(tried > 1000);
    }

    #[test]
    fn falsify_first_variable() {
        let f2 = fp(2);
        let t = single(f2, "x1");
        let v = falsify_containment(&t, 2, 2).unwrap();
        let Outcome::FailsCondition2(w) = &v.outcome else {
            panic!("{v:?}")
        };
        let zero = Matrix::zeros(f2, 2, 2);
        assert_eq!(
            w.left,
            MatrixTuple::pair(zero.clone(), zero.clone()).unwrap()
        );
        assert_eq!(
            w.right,
            MatrixTuple::pair(zero, Matrix::identity(f2, 2)).unwrap()
        );
        assert!(w.recheck(&t).unwrap());
        assert!(v.steps_used > 0);
    }

    #[test]
    fn falsify_commutator() {
        let f2 = fp(2);
        let t = single(f2, "x1x2 - x2x1");
        let v = falsify_containment(&t, 2, 2).unwrap();
        assert_eq!(v.scalar_stage, ScalarStage::Degenerate);
        let Outcome::DegenerateOnScalars(w) = &v.outcome else {
            panic!("{v:?}")
        };
        assert!(w.recheck(&t).unwrap());
        assert!(!w.pairs_equivalent);
        // the pair ((0,0), (e12,e12)) is also a violation
        let e12 = Matrix::unit(f2, 2, 2, 0, 1);
        let zero = Matrix::zeros(f2, 2, 2);
        let other = Witness {
            left: MatrixTuple::pair(zero.clone(), zero.clone()).unwrap(),
            right: MatrixTuple::pair(e12.clone(), e12).unwrap(),
            left_image: zero.clone(),
            right_image: zero.clone(),
            pairs_equivalent: false,
            image_conjugator: Some(Matrix::identity(f2, 2)),
        };
        assert!(other.recheck(&t).unwrap());
    }

    #[test]
    fn falsify_constants_fail_immediately() {
        let f3 = fp(3);
        for s in ["0", "1", "2*1"] {
            let t = single(f3, s);
            let v = falsify_containment(&t, 2, 3).unwrap();
            assert!(
                matches!(v.scalar_stage, ScalarStage::Collision { .. }),
                "{s}"
            );
            assert!(matches!(v.outcome, Outcome::FailsCondition2(_)), "{s}");
            assert!(v.witness().unwrap().recheck(&t).unwrap());
        }
    }

    #[test]
    fn falsify_sum_over_f5() {
        let f5 = fp(5);
        let t = single(f5, "x1 + x2");
        let v = falsify_containment(&t, 2, 5).unwrap();
        assert_eq!(
            v.scalar_stage,
            ScalarStage::Collision {
                first: (0, 1),
                second: (1, 0),
                value: 1
            }
        );
        assert!(v.witness().unwrap().recheck(&t).unwrap());
    }

    #[test]
    fn degenerate_beyond_guard_is_not_falsified() {
        let f5 = fp(5);
        let t = single(f5, "x1x2 - x2x1");
        let v = falsify_containment(&t, 2, 5).unwrap();
        assert_eq!(v.scalar_stage, ScalarStage::Degenerate);
        assert!(matches!(v.outcome, Outcome::NotFalsified { .. }));
        assert!(!v.is_falsified());
    }

    #[test]
    fn budget_overrun_fails_condition_one() {
        let f2 = fp(2);
        let t = single(f2, "x1x2x1").with_budget(3);
        let v = falsify_containment(&t, 2, 2).unwrap();
        assert!(matches!(v.outcome, Outcome::FailsCondition1 { .. }));
    }

    #[test]
    fn falsify_rejects_bad_shapes() {
        let f2 = fp(2);
        let wide = Transform::new(2, vec![NcPoly::zero(f2, 2), NcPoly::zero(f2, 2)]).unwrap();
        assert!(matches!(
            falsify_containment(&wide, 2, 2),
            Err(Error::ArityMismatch {
                expected: 1,
                got: 2
            })
        ));
        let unary = Transform::new(1, vec![NcPoly::zero(f2, 1)]).unwrap();
        assert!(matches!(
            falsify_containment(&unary, 2, 2),
            Err(Error::ArityMismatch {
                expected: 2,
                got: 1
            })
        ));
        assert!(matches!(
            falsify_containment(&single(f2, "x1"), 2, 3),
            Err(Error::ModulusMismatch(2, 3))
        ));
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(100))]
        #[test]
        fn scalar_table_matches_eval(
            terms in proptest::collection::vec(
                (proptest::collection::vec(0usize..2, 0..4), 0i64..5),
                0..6,
            )
        ) {
            let f5 = fp(5);
            let f = NcPoly::from_terms(f5, 2, terms).unwrap();
            let table = scalar_specialize(&f).unwrap();
            for l in f5.elements() {
                for m in f5.elements() {
                    let t = scalar_pair((l, m), 2);
                    proptest::prop_assert_eq!(
                        crate::wildness::nc_eval(&f, &t).unwrap(),
                        Matrix::scalar(table.eval(l, m), 2)
                    );
                }
            }
        }
    }

    /// All 2^7 candidates with words of length <= 2 over F_2.
    #[test]
    fn completeness_on_short_words() {
        let f2 = fp(2);
        let words: Vec<Word> = vec![
            vec![],
            vec![0],
            vec![1],
            vec![0, 0],
            vec![0, 1],
            vec![1, 0],
            vec![1, 1],
        ];
        let mut degenerate = 0;
        for mask in 0u32..1 << words.len() {
            let terms = words
                .iter()
                .enumerate()
                .filter(|(k, _)| mask >> k & 1 == 1)
                .map(|(_, w)| (w.clone(), 1));
            let t = Transform::new(2, vec![NcPoly::from_terms(f2, 2, terms).unwrap()]).unwrap();
            let v = falsify_containment(&t, 2, 2).unwrap();
            assert!(v.is_falsified(), "{:?}", t.polys()[0]);
            assert!(v.witness().unwrap().recheck(&t).unwrap());
            degenerate += (v.scalar_stage == ScalarStage::Degenerate) as usize;
        }
        // x1x2 + x2x1 and x1x2 + x2x1 + 1
        assert_eq!(degenerate, 2);
    }
}
