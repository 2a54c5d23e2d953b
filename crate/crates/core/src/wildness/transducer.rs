//! Table-driven machines over `F_p` and their compilation into polynomials.
//!
//! A machine holds one register value. In state `S` reading value `v`, it
//! replaces the register with `out_S(v)`, optionally writes that value to a
//! cell of its output matrix, and moves on or halts. Because every finite
//! function `F_p -> F_p` is a polynomial, each table is interpolated once and
//! the run is tracked symbolically: state indicators, the halt flag, the
//! register and every output cell are polynomials in the input `x`, reduced
//! modulo `x^p - x`. Branching on the register is absorbed by multiplying
//! each branch by its state indicator, so the result is total on `F_p`.

use crate::algebra::{interpolate, FieldElement, Poly, PrimeField};
use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Largest field the compiler accepts.
pub const MAX_TRANSDUCER_FIELD: u32 = 7;
/// Longest run the compiler accepts.
pub const MAX_RUN: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transition {
    pub input: FieldElement,
    pub output: FieldElement,
    /// `None` halts after this step.
    pub next: Option<usize>,
    /// Cell receiving `output`, if any.
    pub write: Option<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransducerState {
    pub transitions: Vec<Transition>,
}

impl TransducerState {
    /// Tabulates `rule` on every element of `field`.
    pub fn from_fn(
        field: PrimeField,
        rule: impl Fn(FieldElement) -> (FieldElement, Option<usize>, Option<(usize, usize)>),
    ) -> Self {
        let transitions = field
            .elements()
            .map(|input| {
                let (output, next, write) = rule(input);
                Transition {
                    input,
                    output,
                    next,
                    write,
                }
            })
            .collect();
        Self { transitions }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldTransducer {
    field: PrimeField,
    states: Vec<TransducerState>,
    start: usize,
    max_run: usize,
    out_rows: usize,
    out_cols: usize,
    /// `tables[s][v]` indexes the transition taken in state `s` on value `v`.
    tables: Vec<Vec<usize>>,
}

impl FieldTransducer {
    pub fn new(
        field: PrimeField,
        states: Vec<TransducerState>,
        start: usize,
        max_run: usize,
        out_shape: (usize, usize),
    ) -> Result<Self> {
        if field.modulus() > MAX_TRANSDUCER_FIELD {
            return Err(Error::TooLarge(format!(
                "transducer over F_{} (limit F_{MAX_TRANSDUCER_FIELD})",
                field.modulus()
            )));
        }
        if max_run == 0 || max_run > MAX_RUN {
            return Err(Error::TooLarge(format!(
                "run length bound {max_run} (must be 1..={MAX_RUN})"
            )));
        }
        if start >= states.len() {
            return Err(Error::ShapeMismatch(format!(
                "start state {start} but only {} states",
                states.len()
            )));
        }
        let (out_rows, out_cols) = out_shape;
        if out_rows == 0 || out_cols == 0 {
            return Err(Error::ShapeMismatch(
                "output matrix must be non-empty".into(),
            ));
        }
        let mut tables = Vec::with_capacity(states.len());
        for (s, state) in states.iter().enumerate() {
            let mut table = vec![None; field.size()];
            for (k, t) in state.transitions.iter().enumerate() {
                if t.input.modulus() != field.modulus() || t.output.modulus() != field.modulus() {
                    return Err(Error::ModulusMismatch(field.modulus(), t.input.modulus()));
                }
                let slot = &mut table[t.input.value() as usize];
                if slot.is_some() {
                    return Err(Error::NondeterministicTable {
                        state: s,
                        reason: format!("input {} has two transitions", t.input.value()),
                    });
                }
                *slot = Some(k);
                if t.next.is_some_and(|n| n >= states.len()) {
                    return Err(Error::ShapeMismatch(format!(
                        "state {s} jumps to missing state {}",
                        t.next.unwrap_or_default()
                    )));
                }
                if t.write.is_some_and(|(i, j)| i >= out_rows || j >= out_cols) {
                    return Err(Error::ShapeMismatch(format!(
                        "state {s} writes outside the {out_rows}x{out_cols} output"
                    )));
                }
            }
            let table = table
                .into_iter()
                .enumerate()
                .map(|(v, k)| {
                    k.ok_or_else(|| Error::NondeterministicTable {
                        state: s,
                        reason: format!("no transition on input {v}"),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            tables.push(table);
        }
        Ok(Self {
            field,
            states,
            start,
            max_run,
            out_rows,
            out_cols,
            tables,
        })
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn states(&self) -> &[TransducerState] {
        &self.states
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn max_run(&self) -> usize {
        self.max_run
    }

    pub fn out_shape(&self) -> (usize, usize) {
        (self.out_rows, self.out_cols)
    }

    fn step(&self, state: usize, v: FieldElement) -> &Transition {
        &self.states[state].transitions[self.tables[state][v.value() as usize]]
    }

    /// Direct execution on input `x`.
    pub fn run(&self, x: FieldElement) -> Result<Matrix> {
        let mut out = Matrix::zeros(self.field, self.out_rows, self.out_cols);
        let mut state = self.start;
        let mut v = self.field.elem(x.value() as i64);
        for _ in 0..self.max_run {
            let t = self.step(state, v);
            v = t.output;
            if let Some((i, j)) = t.write {
                out.set(i, j, v);
            }
            match t.next {
                Some(s) => state = s,
                None => return Ok(out),
            }
        }
        Err(Error::RunTooLong(self.max_run))
    }
}

/// Output of [`compile_transducer`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompiledTransducer {
    field: PrimeField,
    rows: usize,
    cols: usize,
    cells: Vec<Poly>,
    register: Poly,
    transition_polys: Vec<Poly>,
}

impl CompiledTransducer {
    /// Polynomial for output cell `(i, j)`.
    pub fn cell(&self, i: usize, j: usize) -> &Poly {
        &self.cells[i * self.cols + j]
    }

    pub fn cells(&self) -> &[Poly] {
        &self.cells
    }

    /// Register contents at halt, as a polynomial in the input.
    pub fn register(&self) -> &Poly {
        &self.register
    }

    /// Interpolated output table of each state.
    pub fn transition_polys(&self) -> &[Poly] {
        &self.transition_polys
    }

    /// `sum_ij P_ij(x) E_ij`.
    pub fn eval(&self, x: FieldElement) -> Matrix {
        let mut out = Matrix::zeros(self.field, self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.cell(i, j).eval(x));
            }
        }
        out
    }
}

fn tabulate(field: PrimeField, f: impl Fn(FieldElement) -> FieldElement) -> Result<Poly> {
    let nodes: Vec<_> = field.elements().map(|v| (v, f(v))).collect();
    interpolate(&nodes)
}

fn indicator(field: PrimeField, holds: impl Fn(FieldElement) -> bool) -> Result<Poly> {
    tabulate(field, |v| if holds(v) { field.one() } else { field.zero() })
}

fn mul_red(a: &Poly, b: &Poly) -> Poly {
    (a * b).reduce_as_function()
}

pub fn compile_transducer(m: &FieldTransducer) -> Result<CompiledTransducer> {
    let field = m.field;
    let n_states = m.states.len();
    let n_cells = m.out_rows * m.out_cols;
    let cell_of = |(i, j): (usize, usize)| i * m.out_cols + j;

    let mut transition_polys = Vec::with_capacity(n_states);
    let mut next_ind = Vec::with_capacity(n_states);
    let mut halt_ind = Vec::with_capacity(n_states);
    let mut write_ind = Vec::with_capacity(n_states);
    for s in 0..n_states {
        transition_polys.push(tabulate(field, |v| m.step(s, v).output)?);
        next_ind.push(
            (0..n_states)
                .map(|t| indicator(field, |v| m.step(s, v).next == Some(t)))
                .collect::<Result<Vec<_>>>()?,
        );
        halt_ind.push(indicator(field, |v| m.step(s, v).next.is_none())?);
        write_ind.push(
            (0..n_cells)
                .map(|c| indicator(field, |v| m.step(s, v).write.map(cell_of) == Some(c)))
                .collect::<Result<Vec<_>>>()?,
        );
    }

    let zero = Poly::zero(field);
    let mut active: Vec<Poly> = (0..n_states)
        .map(|s| {
            if s == m.start {
                Poly::one(field)
            } else {
                zero.clone()
            }
        })
        .collect();
    let mut halted = zero.clone();
    let mut register = Poly::x(field).reduce_as_function();
    let mut cells = vec![zero.clone(); n_cells];

    for _ in 0..m.max_run {
        let mut new_register = mul_red(&halted, &register);
        let mut new_active = vec![zero.clone(); n_states];
        let mut new_halted = halted.clone();
        let mut new_cells = cells.clone();
        for s in 0..n_states {
            if active[s].is_zero() {
                continue;
            }
            let out = transition_polys[s].compose(&register).reduce_as_function();
            new_register = &new_register + &mul_red(&active[s], &out);
            for (t, ind) in next_ind[s].iter().enumerate() {
                let moved = mul_red(&active[s], &ind.compose(&register));
                new_active[t] = &new_active[t] + &moved;
            }
            new_halted = &new_halted + &mul_red(&active[s], &halt_ind[s].compose(&register));
            for (c, ind) in write_ind[s].iter().enumerate() {
                let writes = mul_red(&active[s], &ind.compose(&register));
                if !writes.is_zero() {
                    new_cells[c] = &new_cells[c] + &mul_red(&writes, &(&out - &cells[c]));
                }
            }
        }
        register = new_register;
        active = new_active;
        halted = new_halted;
        cells = new_cells;
    }

    if !halted.reduce_as_function().is_one() {
        return Err(Error::RunTooLong(m.max_run));
    }
    Ok(CompiledTransducer {
        field,
        rows: m.out_rows,
        cols: m.out_cols,
        cells,
        register,
        transition_polys,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fp(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    fn scalar_machine(
        field: PrimeField,
        steps: Vec<fn(FieldElement) -> FieldElement>,
    ) -> FieldTransducer {
        let last = steps.len() - 1;
        let states = steps
            .into_iter()
            .enumerate()
            .map(|(s, f)| {
                TransducerState::from_fn(field, move |v| {
                    (f(v), (s < last).then_some(s + 1), Some((0, 0)))
                })
            })
            .collect();
        FieldTransducer::new(field, states, 0, 4, (1, 1)).unwrap()
    }

    fn agree(m: &FieldTransducer, c: &CompiledTransducer) {
        for x in m.field().elements() {
            assert_eq!(m.run(x).unwrap(), c.eval(x), "input {}", x.value());
        }
    }

    #[test]
    fn identity_machine_compiles_to_x() {
        let f5 = fp(5);
        let m = scalar_machine(f5, vec![|v| v]);
        let c = compile_transducer(&m).unwrap();
        assert_eq!(c.cell(0, 0), &Poly::x(f5));
        agree(&m, &c);
    }

    #[test]
    fn swap_over_f2_is_x_plus_one() {
        let f2 = fp(2);
        let m = scalar_machine(f2, vec![|v| v + v.field().one()]);
        let c = compile_transducer(&m).unwrap();
        assert_eq!(c.cell(0, 0), &Poly::new(f2, [1, 1]));
        agree(&m, &c);
    }

    #[test]
    fn two_steps_compose() {
        let f5 = fp(5);
        let m = scalar_machine(f5, vec![|v| v + v.field().one(), |v| v * v.field().elem(2)]);
        let c = compile_transducer(&m).unwrap();
        assert_eq!(c.cell(0, 0), &Poly::new(f5, [2, 2]));
        assert_eq!(c.register(), &Poly::new(f5, [2, 2]));
        assert_eq!(c.transition_polys().len(), 2);
        agree(&m, &c);
    }

    #[test]
    fn branching_and_unwritten_cells() {
        // even-ish inputs go to a squaring state, others to a negating one
        let f3 = fp(3);
        let states = vec![
            TransducerState::from_fn(f3, |v| {
                let next = if v.value() == 0 { 1 } else { 2 };
                (v, Some(next), Some((0, 0)))
            }),
            TransducerState::from_fn(f3, |v| (v * v + v.field().one(), None, Some((0, 1)))),
            TransducerState::from_fn(f3, |v| (-v, None, Some((1, 1)))),
        ];
        let m = FieldTransducer::new(f3, states, 0, 2, (2, 2)).unwrap();
        let c = compile_transducer(&m).unwrap();
        assert!(c.cell(1, 0).is_zero());
        agree(&m, &c);
        assert_eq!(
            m.run(f3.elem(0)).unwrap(),
            Matrix::from_rows(f3, &[&[0, 1], &[0, 0]]).unwrap()
        );
    }

    #[test]
    fn non_halting_machine_is_rejected() {
        let f2 = fp(2);
        let looping = TransducerState::from_fn(f2, |v| (v, Some(0), None));
        let m = FieldTransducer::new(f2, vec![looping], 0, 3, (1, 1)).unwrap();
        assert_eq!(m.run(f2.one()), Err(Error::RunTooLong(3)));
        assert_eq!(compile_transducer(&m), Err(Error::RunTooLong(3)));
    }

    #[test]
    fn table_validation() {
        let f3 = fp(3);
        let mut partial = TransducerState::from_fn(f3, |v| (v, None, None));
        partial.transitions.pop();
        assert!(matches!(
            FieldTransducer::new(f3, vec![partial.clone()], 0, 1, (1, 1)),
            Err(Error::NondeterministicTable { state: 0, .. })
        ));
        let mut doubled = partial;
        doubled.transitions.push(doubled.transitions[0].clone());
        assert!(matches!(
            FieldTransducer::new(f3, vec![doubled], 0, 1, (1, 1)),
            Err(Error::NondeterministicTable { state: 0, .. })
        ));
        let ok = TransducerState::from_fn(f3, |v| (v, None, None));
        assert!(matches!(
            FieldTransducer::new(fp(11), vec![], 0, 1, (1, 1)),
            Err(Error::TooLarge(_))
        ));
        assert!(matches!(
            FieldTransducer::new(f3, vec![ok.clone()], 0, 5, (1, 1)),
            Err(Error::TooLarge(_))
        ));
        let wild_jump = TransducerState::from_fn(f3, |v| (v, Some(4), None));
        assert!(matches!(
            FieldTransducer::new(f3, vec![wild_jump], 0, 1, (1, 1)),
            Err(Error::ShapeMismatch(_))
        ));
        let off_grid = TransducerState::from_fn(f3, |v| (v, None, Some((1, 0))));
        assert!(matches!(
            FieldTransducer::new(f3, vec![off_grid], 0, 1, (1, 1)),
            Err(Error::ShapeMismatch(_))
        ));
    }

    fn arb_machine() -> impl Strategy<Value = FieldTransducer> {
        (
            prop::sample::select(vec![2u64, 3, 5, 7]),
            1usize..=3,
            1usize..=4,
            1usize..=2,
        )
            .prop_flat_map(|(p, states, k, side)| {
                let per = p as usize * states;
                (
                    Just((p, states, k, side)),
                    prop::collection::vec(0..p as i64, per),
                    prop::collection::vec(0..=states, per),
                    prop::collection::vec(0..=side * side, per),
                )
            })
            .prop_map(|((p, n_states, k, side), outs, nexts, writes)| {
                let f = fp(p);
                let states = (0..n_states)
                    .map(|s| TransducerState {
                        transitions: f
                            .elements()
                            .map(|v| {
                                let at = s * p as usize + v.value() as usize;
                                Transition {
                                    input: v,
                                    output: f.elem(outs[at]),
                                    // index n_states means halt
                                    next: (nexts[at] < n_states).then_some(nexts[at]),
                                    write: (writes[at] < side * side)
                                        .then(|| (writes[at] / side, writes[at] % side)),
                                }
                            })
                            .collect(),
                    })
                    .collect();
                FieldTransducer::new(f, states, 0, k, (side, side)).unwrap()
            })
    }

    proptest! {
        #[test]
        fn compiled_matches_run(m in arb_machine()) {
            let runs: Vec<_> = m.field().elements().map(|x| m.run(x)).collect();
            match compile_transducer(&m) {
                Ok(c) => {
                    for (x, r) in m.field().elements().zip(runs) {
                        prop_assert_eq!(r.unwrap(), c.eval(x));
                    }
                }
                Err(e) => {
                    prop_assert_eq!(&e, &Error::RunTooLong(m.max_run()));
                    prop_assert!(runs.iter().any(|r| r.is_err()));
                }
            }
        }
    }
}
