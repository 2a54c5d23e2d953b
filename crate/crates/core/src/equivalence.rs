//! Finite equivalence problems: a listed object set with a decider for the
//! relation, orbit tables, invariant verification, and many-to-one
//! reductions whose maps are charged against a per-object step budget.
//!
//! Two concrete problems are provided: single-matrix similarity and
//! simultaneous similarity of matrix tuples (one shared conjugator).

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::hash::Hash;
use std::sync::Arc;

use serde::Serialize;

use crate::algebra::PrimeField;
use crate::error::{Error, Result};
use crate::invariants::invariant_factors;
use crate::matrix::{enumerate_gl, mat_mul, Matrix, MatrixSpace, MatrixTuple};

/// Upper bound on object-set sizes for exhaustive scans.
pub const MAX_OBJECTS: usize = 100_000;
/// Upper bound on decider invocations in a single scan.
pub const MAX_DECIDE_CALLS: u64 = 100_000_000;

type Decider<T> = Arc<dyn Fn(&T, &T) -> bool + Send + Sync>;

/// `[C, ~]`: an enumerated object set and a decider for `~`.
pub struct EquivProblem<T> {
    name: String,
    objects: Arc<Vec<T>>,
    decide: Decider<T>,
}

impl<T> Clone for EquivProblem<T> {
    fn clone(&self) -> Self {
        Self {
            name: self.name.clone(),
            objects: Arc::clone(&self.objects),
            decide: Arc::clone(&self.decide),
        }
    }
}

impl<T> EquivProblem<T> {
    pub fn new(
        name: impl Into<String>,
        objects: Vec<T>,
        decide: impl Fn(&T, &T) -> bool + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            objects: Arc::new(objects),
            decide: Arc::new(decide),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn objects(&self) -> &[T] {
        &self.objects
    }

    pub fn len(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }

    pub fn decide(&self, a: &T, b: &T) -> bool {
        (self.decide)(a, b)
    }

    fn decide_idx(&self, i: usize, j: usize) -> bool {
        (self.decide)(&self.objects[i], &self.objects[j])
    }

    fn guard_objects(&self) -> Result<()> {
        if self.len() > MAX_OBJECTS {
            return Err(Error::TooLarge(format!(
                "problem {} has {} objects (limit {MAX_OBJECTS})",
                self.name,
                self.len()
            )));
        }
        Ok(())
    }

    fn guard_pairs(&self) -> Result<()> {
        self.guard_objects()?;
        let n = self.len() as u64;
        if n * n.saturating_sub(1) / 2 > MAX_DECIDE_CALLS {
            return Err(Error::TooLarge(format!(
                "problem {} needs {} pairwise decisions (limit {MAX_DECIDE_CALLS})",
                self.name,
                n * (n - 1) / 2
            )));
        }
        Ok(())
    }
}

impl<T> fmt::Debug for EquivProblem<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EquivProblem")
            .field("name", &self.name)
            .field("objects", &self.objects.len())
            .finish()
    }
}

/// Similarity through the complete invariant.
pub fn similar(a: &Matrix, b: &Matrix) -> Result<bool> {
    check_same_square(a, b)?;
    Ok(invariant_factors(a)? == invariant_factors(b)?)
}

/// Searches `GL_n(F_p)` in enumeration order for `S` with `S A S^-1 = B`.
pub fn similar_bruteforce(a: &Matrix, b: &Matrix) -> Result<Option<Matrix>> {
    check_same_square(a, b)?;
    let ta = MatrixTuple::new(vec![a.clone()])?;
    let tb = MatrixTuple::new(vec![b.clone()])?;
    sim_similar(&ta, &tb)
}

/// Searches for one `S` conjugating every component of `t` onto `u`.
pub fn sim_similar(t: &MatrixTuple, u: &MatrixTuple) -> Result<Option<Matrix>> {
    check_tuples(t, u)?;
    let gl = enumerate_gl(t.size(), t.field())?;
    Ok(first_conjugator(gl, t, u))
}

/// Same as [`sim_similar`] over a caller-supplied list of group elements.
pub fn sim_similar_with<'g>(
    gl: impl IntoIterator<Item = &'g Matrix>,
    t: &MatrixTuple,
    u: &MatrixTuple,
) -> Result<Option<Matrix>> {
    check_tuples(t, u)?;
    Ok(first_conjugator(gl.into_iter().cloned(), t, u))
}

// S A S^-1 = B  <=>  S A = B S for invertible S, so no inverses are needed.
fn first_conjugator(
    gl: impl Iterator<Item = Matrix>,
    t: &MatrixTuple,
    u: &MatrixTuple,
) -> Option<Matrix> {
    let pairs: Vec<(&Matrix, &Matrix)> = t.parts().iter().zip(u.parts()).collect();
    gl.into_iter().find(|s| {
        pairs.iter().all(|(a, b)| {
            mat_mul(s, a).expect("shapes checked") == mat_mul(b, s).expect("shapes checked")
        })
    })
}

fn check_same_square(a: &Matrix, b: &Matrix) -> Result<()> {
    if a.field() != b.field() {
        return Err(Error::ModulusMismatch(
            a.field().modulus(),
            b.field().modulus(),
        ));
    }
    if !a.is_square() || a.rows() != b.rows() || a.cols() != b.cols() {
        return Err(Error::ShapeMismatch(format!(
            "similarity needs equal square shapes, got {}x{} and {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    Ok(())
}

fn check_tuples(t: &MatrixTuple, u: &MatrixTuple) -> Result<()> {
    if t.field() != u.field() {
        return Err(Error::ModulusMismatch(
            t.field().modulus(),
            u.field().modulus(),
        ));
    }
    if t.arity() != u.arity() || t.size() != u.size() {
        return Err(Error::ShapeMismatch(format!(
            "tuples of {} {}x{} vs {} {}x{} matrices",
            t.arity(),
            t.size(),
            t.size(),
            u.arity(),
            u.size(),
            u.size()
        )));
    }
    Ok(())
}

/// `M_n(F_p)` under similarity, decided by invariant factors.
pub fn single_similarity_problem(n: usize, field: PrimeField) -> Result<EquivProblem<Matrix>> {
    let space = MatrixSpace::new(n, field)?;
    if space.len() > MAX_OBJECTS {
        return Err(Error::TooLarge(format!(
            "{} matrices exceed {MAX_OBJECTS}",
            space.len()
        )));
    }
    Ok(EquivProblem::new(
        format!("similarity M_{n}(F_{})", field.modulus()),
        space.iter().collect(),
        |a, b| similar(a, b).unwrap_or(false),
    ))
}

/// All `arity`-tuples over `M_n(F_p)` under simultaneous similarity,
/// decided by exhaustive search over `GL_n(F_p)`. Tuples are listed in
/// lexicographic order of their component indices.
pub fn tuple_similarity_problem(
    n: usize,
    field: PrimeField,
    arity: usize,
) -> Result<EquivProblem<MatrixTuple>> {
    let space = MatrixSpace::new(n, field)?;
    let count = (space.len() as u64)
        .checked_pow(arity as u32)
        .filter(|&c| arity >= 1 && c <= MAX_OBJECTS as u64)
        .ok_or_else(|| {
            Error::TooLarge(format!(
                "{}^{arity} tuples exceed {MAX_OBJECTS}",
                space.len()
            ))
        })?;
    let objects = (0..count as usize)
        .map(|code| tuple_at(&space, arity, code))
        .collect();
    let gl: Arc<Vec<Matrix>> = Arc::new(enumerate_gl(n, field)?.collect());
    Ok(EquivProblem::new(
        format!(
            "simultaneous similarity of {arity}-tuples over M_{n}(F_{})",
            field.modulus()
        ),
        objects,
        move |t, u| {
            sim_similar_with(gl.iter(), t, u)
                .map(|s| s.is_some())
                .unwrap_or(false)
        },
    ))
}

/// Pairs `(A, B)` under simultaneous similarity.
pub fn pair_similarity_problem(n: usize, field: PrimeField) -> Result<EquivProblem<MatrixTuple>> {
    tuple_similarity_problem(n, field, 2)
}

/// The tuple with lexicographic index `code`, first component most
/// significant.
pub fn tuple_at(space: &MatrixSpace, arity: usize, mut code: usize) -> MatrixTuple {
    let mut parts = vec![space.matrix(0); arity];
    for slot in parts.iter_mut().rev() {
        *slot = space.matrix(code % space.len());
        code /= space.len();
    }
    MatrixTuple::new(parts).expect("space matrices share a shape")
}

/// Position of `t` in the order produced by [`tuple_at`].
pub fn tuple_index(space: &MatrixSpace, t: &MatrixTuple) -> usize {
    t.parts()
        .iter()
        .fold(0, |acc, m| acc * space.len() + space.index_of(m))
}

/// The quotient `X / ~` as a partition of object indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrbitTable {
    pub problem: String,
    /// Each class sorted ascending; classes ordered by representative.
    pub classes: Vec<Vec<usize>>,
    /// Minimum index of each class.
    pub representatives: Vec<usize>,
}

impl OrbitTable {
    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    pub fn class_sizes(&self) -> Vec<usize> {
        self.classes.iter().map(Vec::len).collect()
    }

    /// Class index for every object.
    pub fn class_of(&self) -> Vec<usize> {
        let n = self.classes.iter().map(Vec::len).sum();
        let mut out = vec![0; n];
        for (c, members) in self.classes.iter().enumerate() {
            for &m in members {
                out[m] = c;
            }
        }
        out
    }
}

/// Partitions the objects by comparing each against the representatives
/// found so far. Relies on the decider being an equivalence relation.
pub fn orbit_table<T>(problem: &EquivProblem<T>) -> Result<OrbitTable> {
    problem.guard_objects()?;
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut calls = 0u64;
    for i in 0..problem.len() {
        let mut home = None;
        for (c, members) in classes.iter().enumerate() {
            calls += 1;
            if calls > MAX_DECIDE_CALLS {
                return Err(Error::TooLarge(format!(
                    "orbit scan of {} exceeded {MAX_DECIDE_CALLS} decisions",
                    problem.name
                )));
            }
            if problem.decide_idx(members[0], i) {
                home = Some(c);
                break;
            }
        }
        match home {
            Some(c) => classes[c].push(i),
            None => classes.push(vec![i]),
        }
    }
    let representatives = classes.iter().map(|c| c[0]).collect();
    Ok(OrbitTable {
        problem: problem.name.clone(),
        classes,
        representatives,
    })
}

/// A candidate invariant `T: X -> Y`.
pub struct InvariantCandidate<T, V> {
    name: String,
    map: Box<dyn Fn(&T) -> V + Send + Sync>,
}

impl<T, V> InvariantCandidate<T, V> {
    pub fn new(name: impl Into<String>, map: impl Fn(&T) -> V + Send + Sync + 'static) -> Self {
        Self {
            name: name.into(),
            map: Box::new(map),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn apply(&self, x: &T) -> V {
        (self.map)(x)
    }
}

/// Outcome of checking `x1 ~ x2 => T x1 = T x2` and its converse on every
/// pair. Witnesses are object indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum InvariantVerdict {
    /// `a ~ b` but `T a != T b`.
    NotInvariant(usize, usize),
    /// Invariant, but `T a = T b` while `a !~ b`.
    Partial(usize, usize),
    Full,
}

pub fn verify_invariant<T, V: PartialEq>(
    problem: &EquivProblem<T>,
    candidate: &InvariantCandidate<T, V>,
) -> Result<InvariantVerdict> {
    problem.guard_pairs()?;
    let values: Vec<V> = problem.objects.iter().map(|x| candidate.apply(x)).collect();
    let mut partial = None;
    for i in 0..problem.len() {
        for j in i + 1..problem.len() {
            let equivalent = problem.decide_idx(i, j);
            let same = values[i] == values[j];
            if equivalent && !same {
                return Ok(InvariantVerdict::NotInvariant(i, j));
            }
            if !equivalent && same && partial.is_none() {
                partial = Some((i, j));
            }
        }
    }
    Ok(match partial {
        Some((i, j)) => InvariantVerdict::Partial(i, j),
        None => InvariantVerdict::Full,
    })
}

/// A violated equivalence-relation axiom, by object indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxiomViolation {
    Reflexivity(usize),
    Symmetry(usize, usize),
    Transitivity(usize, usize, usize),
}

/// Checks reflexivity and symmetry on all pairs, and transitivity on all
/// triples for at most 100 objects or on `sampled_triples` pseudo-random
/// triples above that.
pub fn check_equivalence_axioms<T>(
    problem: &EquivProblem<T>,
    sampled_triples: usize,
) -> Result<Option<AxiomViolation>> {
    problem.guard_pairs()?;
    let n = problem.len();
    for i in 0..n {
        if !problem.decide_idx(i, i) {
            return Ok(Some(AxiomViolation::Reflexivity(i)));
        }
    }
    let mut rel = vec![false; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let ij = problem.decide_idx(i, j);
            if ij != problem.decide_idx(j, i) {
                return Ok(Some(AxiomViolation::Symmetry(i, j)));
            }
            rel[i * n + j] = ij;
            rel[j * n + i] = ij;
        }
        rel[i * n + i] = true;
    }
    let check = |i: usize, j: usize, k: usize| rel[i * n + j] && rel[j * n + k] && !rel[i * n + k];
    if n <= 100 {
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if check(i, j, k) {
                        return Ok(Some(AxiomViolation::Transitivity(i, j, k)));
                    }
                }
            }
        }
    } else {
        // splitmix64; sampling only needs to be reproducible
        let mut state = 0x9e37_79b9_7f4a_7c15u64;
        let mut next = || {
            state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
            let mut z = state;
            z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
            ((z ^ (z >> 31)) % n as u64) as usize
        };
        for _ in 0..sampled_triples {
            let (i, j, k) = (next(), next(), next());
            if check(i, j, k) {
                return Ok(Some(AxiomViolation::Transitivity(i, j, k)));
            }
        }
    }
    Ok(None)
}

/// Elementary-operation counter for reduction maps and transforms.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StepCounter {
    used: u64,
}

impl StepCounter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn charge(&mut self, steps: u64) {
        self.used += steps;
    }

    pub fn used(&self) -> u64 {
        self.used
    }
}

type ReductionMap<S, T> = Arc<dyn Fn(&S, &mut StepCounter) -> T + Send + Sync>;

/// A candidate many-to-one reduction `source -> target` with a budget of
/// elementary steps per mapped object.
pub struct ReductionWitness<S, T> {
    source: EquivProblem<S>,
    target: EquivProblem<T>,
    map: ReductionMap<S, T>,
    step_budget: u64,
    report: Option<ReductionReport>,
}

/// What [`verify_reduction`] observed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReductionReport {
    pub holds: bool,
    /// Source indices `(a, b)` with `a ~ b` disagreeing with `map a ~ map b`.
    pub counterexample: Option<(usize, usize)>,
    /// Source index whose image is not a target object.
    pub outside_target: Option<usize>,
    pub total_steps: u64,
    pub max_steps_per_object: u64,
}

impl<S, T> ReductionWitness<S, T> {
    pub fn new(
        source: &EquivProblem<S>,
        target: &EquivProblem<T>,
        step_budget: u64,
        map: impl Fn(&S, &mut StepCounter) -> T + Send + Sync + 'static,
    ) -> Self {
        Self {
            source: EquivProblem::clone(source),
            target: EquivProblem::clone(target),
            map: Arc::new(map),
            step_budget,
            report: None,
        }
    }

    pub fn source(&self) -> &EquivProblem<S> {
        &self.source
    }

    pub fn target(&self) -> &EquivProblem<T> {
        &self.target
    }

    pub fn step_budget(&self) -> u64 {
        self.step_budget
    }

    /// True only after an exhaustive check succeeded.
    pub fn verified(&self) -> bool {
        self.report.as_ref().is_some_and(|r| r.holds)
    }

    pub fn report(&self) -> Option<&ReductionReport> {
        self.report.as_ref()
    }

    pub fn apply(&self, x: &S, steps: &mut StepCounter) -> T {
        (self.map)(x, steps)
    }
}

impl<S: 'static, T: 'static> ReductionWitness<S, T> {
    /// `other ∘ self`, with budgets added.
    pub fn then<U: 'static>(&self, other: &ReductionWitness<T, U>) -> ReductionWitness<S, U> {
        let (f, g) = (self.map.clone(), other.map.clone());
        ReductionWitness {
            source: self.source.clone(),
            target: other.target.clone(),
            map: Arc::new(move |x, steps| g(&f(x, steps), steps)),
            step_budget: self.step_budget + other.step_budget,
            report: None,
        }
    }
}

/// Checks `a ~ b <=> map a ~ map b` on every source pair and that every
/// image is a target object. Fails with `BudgetExceeded` if any single
/// object costs more than the budget.
pub fn verify_reduction<S, T: Eq + Hash>(w: &mut ReductionWitness<S, T>) -> Result<bool> {
    w.source.guard_pairs()?;
    let mut images = Vec::with_capacity(w.source.len());
    let (mut total, mut max) = (0u64, 0u64);
    for x in w.source.objects.iter() {
        let mut steps = StepCounter::new();
        images.push((w.map)(x, &mut steps));
        if steps.used() > w.step_budget {
            return Err(Error::BudgetExceeded {
                used: steps.used(),
                budget: w.step_budget,
            });
        }
        total += steps.used();
        max = max.max(steps.used());
    }

    let members: HashSet<&T> = w.target.objects.iter().collect();
    let outside_target = images.iter().position(|y| !members.contains(y));

    let mut counterexample = None;
    if outside_target.is_none() {
        'scan: for i in 0..images.len() {
            for j in i + 1..images.len() {
                if w.source.decide_idx(i, j) != w.target.decide(&images[i], &images[j]) {
                    counterexample = Some((i, j));
                    break 'scan;
                }
            }
        }
    }
    let report = ReductionReport {
        holds: outside_target.is_none() && counterexample.is_none(),
        counterexample,
        outside_target,
        total_steps: total,
        max_steps_per_object: max,
    };
    let holds = report.holds;
    w.report = Some(report);
    Ok(holds)
}

/// Identity on any problem; costs nothing.
pub fn identity_reduction<T: Clone + 'static>(p: &EquivProblem<T>) -> ReductionWitness<T, T> {
    ReductionWitness::new(p, p, 0, |x: &T, _| x.clone())
}

/// `A -> A^T`, charging one step per entry written.
pub fn transpose_reduction(
    p: &EquivProblem<Matrix>,
    step_budget: u64,
) -> ReductionWitness<Matrix, Matrix> {
    ReductionWitness::new(p, p, step_budget, |a: &Matrix, steps| {
        steps.charge((a.rows() * a.cols()) as u64);
        a.transpose()
    })
}

/// `A -> (A, I)`, embedding single-matrix similarity into pairs; one step
/// per entry written.
pub fn tame_into_wild_reduction(
    single: &EquivProblem<Matrix>,
    pairs: &EquivProblem<MatrixTuple>,
    step_budget: u64,
) -> ReductionWitness<Matrix, MatrixTuple> {
    ReductionWitness::new(single, pairs, step_budget, |a: &Matrix, steps| {
        steps.charge(2 * (a.rows() * a.cols()) as u64);
        MatrixTuple::pair(a.clone(), Matrix::identity(a.field(), a.rows()))
            .expect("square matrix and identity of the same size")
    })
}

/// Problems and verified in-budget reductions between them, by name. A
/// problem is closed relative to the registry when every other registered
/// problem reaches it through a chain of recorded reductions whose budgets
/// sum to at most the class bound.
#[derive(Debug, Clone, Default)]
pub struct ReductionRegistry {
    problems: Vec<String>,
    edges: HashMap<String, Vec<(String, u64)>>,
}

impl ReductionRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register(&mut self, name: impl Into<String>) {
        let name = name.into();
        if !self.problems.contains(&name) {
            self.problems.push(name);
        }
    }

    /// Records a reduction; it must already have verified.
    pub fn record<S, T>(&mut self, w: &ReductionWitness<S, T>) -> Result<()> {
        if !w.verified() {
            return Err(Error::Unverified(format!(
                "{} -> {}",
                w.source.name, w.target.name
            )));
        }
        self.register(w.source.name.clone());
        self.register(w.target.name.clone());
        self.edges
            .entry(w.source.name.clone())
            .or_default()
            .push((w.target.name.clone(), w.step_budget));
        Ok(())
    }

    /// Cheapest recorded chain cost from `from` to `to`.
    pub fn reduction_cost(&self, from: &str, to: &str) -> Option<u64> {
        let mut best: HashMap<&str, u64> = HashMap::from([(from, 0)]);
        let mut queue = VecDeque::from([from]);
        while let Some(cur) = queue.pop_front() {
            let cost = best[cur];
            for (next, c) in self.edges.get(cur).into_iter().flatten() {
                let cand = cost + c;
                if best.get(next.as_str()).is_none_or(|&b| cand < b) {
                    best.insert(next, cand);
                    queue.push_back(next);
                }
            }
        }
        best.get(to).copied()
    }

    pub fn is_closed(&self, name: &str, class_bound: u64) -> bool {
        self.problems.iter().any(|p| p == name)
            && self
                .problems
                .iter()
                .filter(|p| p.as_str() != name)
                .all(|p| {
                    self.reduction_cost(p, name)
                        .is_some_and(|c| c <= class_bound)
                })
    }
}
