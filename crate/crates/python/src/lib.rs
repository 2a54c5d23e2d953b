//! Python bindings. Matrices cross the boundary as lists of rows of ints and
//! polynomials as coefficient lists, lowest degree first.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use tamewild_core::algebra::{interpolate as core_interpolate, Poly, PrimeField};
use tamewild_core::cli::{verdict_text, TransformFile};
use tamewild_core::equivalence::{
    orbit_table, pair_similarity_problem, sim_similar as core_sim_similar, similar as core_similar,
    similar_bruteforce as core_similar_bruteforce, single_similarity_problem,
};
use tamewild_core::invariants::{
    char_poly, invariant_factors, rational_canonical_form, spectrum_in_field,
};
use tamewild_core::matrix::{mat_det, mat_inverse, mat_rank, Matrix, MatrixTuple};
use tamewild_core::wildness::{apply_transform, falsify_containment, Transform, Verdict};
use tamewild_core::Error;

fn py_err(e: Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn field(p: u64) -> PyResult<PrimeField> {
    PrimeField::new(p).map_err(py_err)
}

fn coeffs(f: &Poly) -> Vec<u32> {
    f.coefficients().iter().map(|c| c.value()).collect()
}

fn to_rows(m: &Matrix) -> Vec<Vec<u32>> {
    m.entries().chunks(m.cols()).map(<[u32]>::to_vec).collect()
}

fn from_rows(p: u64, rows: Vec<Vec<i64>>) -> PyResult<Matrix> {
    let refs: Vec<&[i64]> = rows.iter().map(Vec::as_slice).collect();
    Matrix::from_rows(field(p)?, &refs).map_err(py_err)
}

/// A matrix over `F_p`.
#[pyclass(name = "Matrix", frozen, eq, from_py_object)]
#[derive(Clone, PartialEq)]
struct PyMatrix {
    inner: Matrix,
}

#[pymethods]
impl PyMatrix {
    #[new]
    fn new(p: u64, rows: Vec<Vec<i64>>) -> PyResult<Self> {
        Ok(Self {
            inner: from_rows(p, rows)?,
        })
    }

    #[staticmethod]
    fn identity(p: u64, n: usize) -> PyResult<Self> {
        Ok(Self {
            inner: Matrix::identity(field(p)?, n),
        })
    }

    #[getter]
    fn p(&self) -> u32 {
        self.inner.field().modulus()
    }

    #[getter]
    fn shape(&self) -> (usize, usize) {
        (self.inner.rows(), self.inner.cols())
    }

    fn rows(&self) -> Vec<Vec<u32>> {
        to_rows(&self.inner)
    }

    fn rank(&self) -> usize {
        mat_rank(&self.inner)
    }

    fn det(&self) -> PyResult<u32> {
        mat_det(&self.inner).map(|d| d.value()).map_err(py_err)
    }

    fn inverse(&self) -> PyResult<Self> {
        Ok(Self {
            inner: mat_inverse(&self.inner).map_err(py_err)?,
        })
    }

    fn __matmul__(&self, other: &Self) -> PyResult<Self> {
        Ok(Self {
            inner: self.inner.mul(&other.inner).map_err(py_err)?,
        })
    }

    /// Characteristic polynomial, lowest degree first.
    fn char_poly(&self) -> PyResult<Vec<u32>> {
        Ok(coeffs(&char_poly(&self.inner).map_err(py_err)?))
    }

    fn spectrum(&self) -> PyResult<Vec<u32>> {
        Ok(spectrum_in_field(&self.inner)
            .map_err(py_err)?
            .iter()
            .map(|r| r.value())
            .collect())
    }

    /// Invariant factors as coefficient lists.
    fn invariant_factors(&self) -> PyResult<Vec<Vec<u32>>> {
        let f = invariant_factors(&self.inner).map_err(py_err)?;
        Ok(f.factors().iter().map(coeffs).collect())
    }

    /// Invariant factors in display form, e.g. `(1, x^2+x+1)`.
    fn invariant_factors_str(&self) -> PyResult<String> {
        Ok(invariant_factors(&self.inner).map_err(py_err)?.to_string())
    }

    fn rational_canonical_form(&self) -> PyResult<Self> {
        let f = invariant_factors(&self.inner).map_err(py_err)?;
        Ok(Self {
            inner: rational_canonical_form(&f).map_err(py_err)?,
        })
    }

    fn __repr__(&self) -> String {
        format!("Matrix({}, {:?})", self.p(), self.rows())
    }
}

/// A tuple of non-commutative polynomials read from transform-file text:
/// header `p a b` followed by `b` polynomial lines.
#[pyclass(name = "Transform", frozen)]
struct PyTransform {
    inner: Transform,
}

#[pymethods]
impl PyTransform {
    #[new]
    #[pyo3(signature = (text, budget=None))]
    fn new(text: &str, budget: Option<u64>) -> PyResult<Self> {
        let mut inner = TransformFile::parse(text).map_err(py_err)?.transform;
        if let Some(b) = budget {
            inner = inner.with_budget(b);
        }
        Ok(Self { inner })
    }

    #[getter]
    fn arity_in(&self) -> usize {
        self.inner.arity_in()
    }

    #[getter]
    fn arity_out(&self) -> usize {
        self.inner.arity_out()
    }

    /// Evaluates on a tuple of square matrices; returns the images and the
    /// number of steps charged.
    fn apply(&self, inputs: Vec<PyMatrix>) -> PyResult<(Vec<PyMatrix>, u64)> {
        let t = MatrixTuple::new(inputs.into_iter().map(|m| m.inner).collect()).map_err(py_err)?;
        let (out, steps) = apply_transform(&self.inner, &t).map_err(py_err)?;
        let out = out
            .parts()
            .iter()
            .map(|m| PyMatrix { inner: m.clone() })
            .collect();
        Ok((out, steps))
    }

    fn __repr__(&self) -> String {
        let polys: Vec<String> = self.inner.polys().iter().map(ToString::to_string).collect();
        format!("Transform({})", polys.join(", "))
    }
}

/// Outcome of a containment falsification run.
#[pyclass(name = "Verdict", frozen)]
struct PyVerdict {
    inner: Verdict,
}

#[pymethods]
impl PyVerdict {
    #[getter]
    fn label(&self) -> &'static str {
        self.inner.label()
    }

    #[getter]
    fn falsified(&self) -> bool {
        self.inner.is_falsified()
    }

    #[getter]
    fn steps_used(&self) -> u64 {
        self.inner.steps_used
    }

    /// `(left pair, right pair)` of the witness, if one was found.
    fn witness(&self) -> Option<(Vec<PyMatrix>, Vec<PyMatrix>)> {
        let wrap = |t: &MatrixTuple| {
            t.parts()
                .iter()
                .map(|m| PyMatrix { inner: m.clone() })
                .collect()
        };
        self.inner
            .witness()
            .map(|w| (wrap(&w.left), wrap(&w.right)))
    }

    /// The same report the command line prints.
    fn report(&self) -> String {
        verdict_text(&self.inner)
    }

    fn __repr__(&self) -> String {
        format!(
            "Verdict({}, steps_used={})",
            self.label(),
            self.steps_used()
        )
    }
}

#[pyfunction]
fn similar(a: &PyMatrix, b: &PyMatrix) -> PyResult<bool> {
    core_similar(&a.inner, &b.inner).map_err(py_err)
}

/// A conjugator `S` with `S A S^-1 = B`, or `None`.
#[pyfunction]
fn similar_bruteforce(a: &PyMatrix, b: &PyMatrix) -> PyResult<Option<PyMatrix>> {
    Ok(core_similar_bruteforce(&a.inner, &b.inner)
        .map_err(py_err)?
        .map(|inner| PyMatrix { inner }))
}

/// One conjugator for every component, or `None`.
#[pyfunction]
fn sim_similar(a: Vec<PyMatrix>, b: Vec<PyMatrix>) -> PyResult<Option<PyMatrix>> {
    let ta = MatrixTuple::new(a.into_iter().map(|m| m.inner).collect()).map_err(py_err)?;
    let tb = MatrixTuple::new(b.into_iter().map(|m| m.inner).collect()).map_err(py_err)?;
    Ok(core_sim_similar(&ta, &tb)
        .map_err(py_err)?
        .map(|inner| PyMatrix { inner }))
}

/// Number of similarity classes for `problem` in {"single", "pairs"}.
#[pyfunction]
fn orbit_count(problem: &str, n: usize, p: u64) -> PyResult<usize> {
    let f = field(p)?;
    let table = match problem {
        "single" => orbit_table(&single_similarity_problem(n, f).map_err(py_err)?),
        "pairs" => orbit_table(&pair_similarity_problem(n, f).map_err(py_err)?),
        other => return Err(PyValueError::new_err(format!("unknown problem `{other}`"))),
    };
    Ok(table.map_err(py_err)?.class_count())
}

#[pyfunction]
#[pyo3(signature = (transform, n=2))]
fn falsify(transform: &PyTransform, n: usize) -> PyResult<PyVerdict> {
    let p = transform.inner.field().modulus();
    Ok(PyVerdict {
        inner: falsify_containment(&transform.inner, n, p).map_err(py_err)?,
    })
}

/// Interpolating polynomial through `(x, y)` points, lowest degree first.
#[pyfunction]
fn interpolate(p: u64, points: Vec<(i64, i64)>) -> PyResult<Vec<u32>> {
    let f = field(p)?;
    let nodes: Vec<_> = points
        .iter()
        .map(|&(x, y)| (f.elem(x), f.elem(y)))
        .collect();
    Ok(coeffs(&core_interpolate(&nodes).map_err(py_err)?))
}

#[pymodule]
fn pytamewild(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyMatrix>()?;
    m.add_class::<PyTransform>()?;
    m.add_class::<PyVerdict>()?;
    m.add_function(wrap_pyfunction!(similar, m)?)?;
    m.add_function(wrap_pyfunction!(similar_bruteforce, m)?)?;
    m.add_function(wrap_pyfunction!(sim_similar, m)?)?;
    m.add_function(wrap_pyfunction!(orbit_count, m)?)?;
    m.add_function(wrap_pyfunction!(falsify, m)?)?;
    m.add_function(wrap_pyfunction!(interpolate, m)?)?;
    Ok(())
}
