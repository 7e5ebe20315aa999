//! Python bindings for the `zerosum` crate.
//!
//! Reports come back as plain dicts with the same fields as the CLI's JSON.

use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyList;
use serde_json::Value;
use zerosum::{Error, GroupElement, GroupSpec, SearchConfig, Type1Witness, Type2Witness};

create_exception!(pyzerosum, ZeroSumError, PyValueError);
create_exception!(pyzerosum, CapExceededError, ZeroSumError);

fn err(e: Error) -> PyErr {
    match e {
        Error::CapExceeded { .. } => CapExceededError::new_err(e.to_string()),
        _ => ZeroSumError::new_err(e.to_string()),
    }
}

fn to_py<'py>(py: Python<'py>, value: &Value) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (value.to_string(),))
}

fn config(workers: usize) -> SearchConfig {
    SearchConfig::with_workers(workers)
}

/// A finite abelian group `C_{n1} ⊕ ... ⊕ C_{nr}` with `n1 | ... | nr`.
#[pyclass(name = "Group", frozen, eq, hash, skip_from_py_object)]
#[derive(Clone, PartialEq, Eq, Hash)]
struct PyGroup(GroupSpec);

#[pymethods]
impl PyGroup {
    #[new]
    fn new(factors: Vec<i64>) -> PyResult<Self> {
        GroupSpec::new(&factors).map(PyGroup).map_err(err)
    }

    /// Parses `"m1,m2"`.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        text.parse().map(PyGroup).map_err(err)
    }

    #[getter]
    fn invariant_factors(&self) -> Vec<u32> {
        self.0.invariant_factors().to_vec()
    }

    #[getter]
    fn order(&self) -> usize {
        self.0.order()
    }

    #[getter]
    fn exponent(&self) -> u32 {
        self.0.exponent()
    }

    #[getter]
    fn rank(&self) -> usize {
        self.0.rank()
    }

    fn elements(&self) -> Vec<Vec<u32>> {
        self.0.elements().map(|g| g.residues().to_vec()).collect()
    }

    fn add(&self, g: Vec<i64>, h: Vec<i64>) -> PyResult<Vec<u32>> {
        let (g, h) = (self.element(&g)?, self.element(&h)?);
        Ok(self.0.add(&g, &h).map_err(err)?.residues().to_vec())
    }

    fn neg(&self, g: Vec<i64>) -> PyResult<Vec<u32>> {
        Ok(self.0.neg(&self.element(&g)?).map_err(err)?.residues().to_vec())
    }

    fn order_of(&self, g: Vec<i64>) -> PyResult<u64> {
        self.0.order_of(&self.element(&g)?).map_err(err)
    }

    fn is_basis(&self, elems: Vec<Vec<i64>>) -> PyResult<bool> {
        let elems = elems.iter().map(|g| self.element(g)).collect::<PyResult<Vec<_>>>()?;
        self.0.is_basis(&elems).map_err(err)
    }

    fn automorphism_count(&self) -> PyResult<usize> {
        zerosum::automorphisms(&self.0).map(|a| a.len()).map_err(err)
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Group('{}')", self.0)
    }
}

impl PyGroup {
    fn element(&self, residues: &[i64]) -> PyResult<GroupElement> {
        self.0.element(residues).map_err(err)
    }
}

/// A finite multiset of group elements, kept in canonical sorted form.
#[pyclass(name = "Sequence", frozen, eq, ord, hash, skip_from_py_object)]
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct PySequence(zerosum::Sequence);

#[pymethods]
impl PySequence {
    /// Parses text such as `"[0,1]^3 [1,0] [1,1]"`.
    #[new]
    fn new(group: &PyGroup, text: &str) -> PyResult<Self> {
        zerosum::Sequence::parse(&group.0, text).map(PySequence).map_err(err)
    }

    #[staticmethod]
    fn from_elements(group: &PyGroup, elems: Vec<Vec<i64>>) -> PyResult<Self> {
        let elems = elems.iter().map(|g| group.element(g)).collect::<PyResult<Vec<_>>>()?;
        zerosum::Sequence::from_elements(&group.0, elems).map(PySequence).map_err(err)
    }

    #[getter]
    fn group(&self) -> PyGroup {
        PyGroup(self.0.group().clone())
    }

    /// `(residues, multiplicity)` pairs in sorted order.
    fn terms(&self) -> Vec<(Vec<u32>, usize)> {
        self.0.terms().iter().map(|(g, k)| (g.residues().to_vec(), *k)).collect()
    }

    fn sigma(&self) -> Vec<u32> {
        self.0.sigma().residues().to_vec()
    }

    fn reachable_subsums(&self) -> PyResult<Vec<Vec<u32>>> {
        let sums = self.0.reachable_subsums().map_err(err)?;
        Ok(sums.elements().iter().map(|g| g.residues().to_vec()).collect())
    }

    fn is_zero_sum_free(&self) -> PyResult<bool> {
        self.0.is_zero_sum_free().map_err(err)
    }

    fn is_mzss(&self) -> PyResult<bool> {
        self.0.is_mzss().map_err(err)
    }

    fn zss_max_factors(&self) -> PyResult<usize> {
        self.0.zss_max_factors().map_err(err)
    }

    fn extract_zero_sum_of_length(&self, length: usize) -> PyResult<Option<PySequence>> {
        Ok(self.0.extract_zero_sum_of_length(length).map_err(err)?.map(PySequence))
    }

    fn canonicalize(&self) -> PyResult<PySequence> {
        zerosum::canonicalize(&self.0, &SearchConfig::default()).map(PySequence).map_err(err)
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Sequence('{}')", self.0)
    }
}

#[pyfunction]
#[pyo3(signature = (group, workers = 1))]
fn davenport<'py>(py: Python<'py>, group: &PyGroup, workers: usize) -> PyResult<Bound<'py, PyAny>> {
    let r = py.detach(|| zerosum::davenport(&group.0, &config(workers))).map_err(err)?;
    to_py(py, &r.to_json())
}

/// Every ml-mzss over `group`, in enumeration order.
#[pyfunction]
#[pyo3(signature = (group, workers = 1))]
fn enumerate<'py>(py: Python<'py>, group: &PyGroup, workers: usize) -> PyResult<Bound<'py, PyList>> {
    let seqs = py.detach(|| zerosum::ml_mzss(&group.0, &config(workers))).map_err(err)?;
    PyList::new(py, seqs.into_iter().map(PySequence))
}

/// Total and orbit counts, with one canonical representative per orbit.
#[pyfunction]
#[pyo3(signature = (group, workers = 1))]
fn count<'py>(py: Python<'py>, group: &PyGroup, workers: usize) -> PyResult<Bound<'py, PyAny>> {
    let r = py.detach(|| zerosum::count_ml_mzss(&group.0, &config(workers))).map_err(err)?;
    to_py(py, &r.to_json())
}

#[pyfunction]
fn classify<'py>(py: Python<'py>, seq: &PySequence) -> PyResult<Bound<'py, PyAny>> {
    let r = zerosum::classify(seq.0.group(), &seq.0).map_err(err)?;
    to_py(py, &r.to_json(&seq.0))
}

#[pyfunction]
fn gen_type1(group: &PyGroup, e1: Vec<i64>, e2: Vec<i64>, j: u8, x: Vec<u64>) -> PyResult<PySequence> {
    let w = Type1Witness { e1: group.element(&e1)?, e2: group.element(&e2)?, j, x };
    zerosum::gen_type1(&group.0, &w).map(PySequence).map_err(err)
}

#[pyfunction]
fn gen_type2(group: &PyGroup, g1: Vec<i64>, g2: Vec<i64>, s: u32, x: Vec<u64>) -> PyResult<PySequence> {
    let w = Type2Witness { g1: group.element(&g1)?, g2: group.element(&g2)?, s, x };
    zerosum::gen_type2(&group.0, &w).map(PySequence).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (m, workers = 1))]
fn check_property_b<'py>(py: Python<'py>, m: u32, workers: usize) -> PyResult<Bound<'py, PyAny>> {
    let r = py.detach(|| zerosum::check_property_b(m, &config(workers))).map_err(err)?;
    to_py(py, &r.to_json())
}

#[pyfunction]
#[pyo3(signature = (n, workers = 1))]
fn check_cyclic_inverse<'py>(py: Python<'py>, n: u32, workers: usize) -> PyResult<Bound<'py, PyAny>> {
    let r = py.detach(|| zerosum::check_cyclic_inverse(n, &config(workers))).map_err(err)?;
    to_py(py, &r.to_json())
}

#[pyfunction]
#[pyo3(signature = (n, trials = 10_000, seed = 0))]
fn egz_property<'py>(py: Python<'py>, n: u32, trials: u64, seed: u64) -> PyResult<Bound<'py, PyAny>> {
    let r = py.detach(|| zerosum::egz_property(n, trials, seed)).map_err(err)?;
    to_py(py, &r.to_json())
}

#[pyfunction]
#[pyo3(signature = (group, workers = 1))]
fn verify_theorem<'py>(py: Python<'py>, group: &PyGroup, workers: usize) -> PyResult<Bound<'py, PyAny>> {
    let r = py.detach(|| zerosum::verify_theorem(&group.0, &config(workers))).map_err(err)?;
    to_py(py, &r.to_json())
}

#[pyfunction]
fn soundness_sweep<'py>(py: Python<'py>, group: &PyGroup) -> PyResult<Bound<'py, PyAny>> {
    let r = py.detach(|| zerosum::soundness_sweep(&group.0)).map_err(err)?;
    to_py(py, &r.to_json())
}

#[pyfunction]
#[pyo3(signature = (m, t, workers = 1))]
fn tm1_structure_check<'py>(py: Python<'py>, m: u32, t: u32, workers: usize) -> PyResult<Bound<'py, PyAny>> {
    let r = py.detach(|| zerosum::tm1_structure_check(m, t, &config(workers))).map_err(err)?;
    to_py(py, &r.to_json())
}

#[pymodule]
fn pyzerosum(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("ZeroSumError", m.py().get_type::<ZeroSumError>())?;
    m.add("CapExceededError", m.py().get_type::<CapExceededError>())?;
    m.add_class::<PyGroup>()?;
    m.add_class::<PySequence>()?;
    m.add_function(wrap_pyfunction!(davenport, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate, m)?)?;
    m.add_function(wrap_pyfunction!(count, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(gen_type1, m)?)?;
    m.add_function(wrap_pyfunction!(gen_type2, m)?)?;
    m.add_function(wrap_pyfunction!(check_property_b, m)?)?;
    m.add_function(wrap_pyfunction!(check_cyclic_inverse, m)?)?;
    m.add_function(wrap_pyfunction!(egz_property, m)?)?;
    m.add_function(wrap_pyfunction!(verify_theorem, m)?)?;
    m.add_function(wrap_pyfunction!(soundness_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(tm1_structure_check, m)?)?;
    Ok(())
}
