//! Python bindings: parse graded complexes or filtrations, compute Conley
//! complexes and connection matrices, and run the verification oracle.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use conley::bench::{random_complex, GeneratorConfig, PosetShape};
use conley::connect::{compute_with_state, PipelineOptions, Step3Order};
use conley::io;
use conley::oracle;
use conley::reduction::{clearing_reduce, ReduceOptions};

/// A validated poset-graded chain complex over a prime field.
#[pyclass(name = "GradedComplex")]
struct PyGradedComplex {
    inner: conley::GradedComplex,
}

#[pymethods]
impl PyGradedComplex {
    /// Number of generators.
    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "GradedComplex({} generators over Z/{}Z, {} grades)",
            self.inner.len(),
            self.inner.field().characteristic(),
            self.inner.poset().len()
        )
    }

    /// Field characteristic.
    #[getter]
    fn characteristic(&self) -> u64 {
        self.inner.field().characteristic()
    }

    /// Poset element labels in declaration order.
    #[getter]
    fn poset_labels(&self) -> Vec<String> {
        self.inner.poset().labels().to_vec()
    }

    /// Generators as `(id, dim, grade_label)` tuples in global order.
    fn generators(&self) -> Vec<(String, i32, String)> {
        self.inner
            .generators()
            .iter()
            .map(|g| {
                (
                    g.id.clone(),
                    g.dim,
                    self.inner.poset().label(g.grade).to_owned(),
                )
            })
            .collect()
    }

    /// Violated invariants as human-readable strings; empty means valid.
    fn validate(&self) -> Vec<String> {
        self.inner
            .validate()
            .violations
            .iter()
            .map(|v| v.to_string())
            .collect()
    }

    /// Brute-force relative homology dimensions `{(grade_label, dim): k}`.
    fn relative_homology_dims(&self) -> std::collections::HashMap<(String, i32), usize> {
        self.inner
            .relative_homology_dims()
            .into_iter()
            .map(|((g, d), k)| ((self.inner.poset().label(g).to_owned(), d), k))
            .collect()
    }

    /// Computes the Conley complex and connection matrix.
    #[pyo3(signature = (prune = true, parallel = false))]
    fn compute(&self, prune: bool, parallel: bool) -> PyResult<PyConleyComplex> {
        let options = PipelineOptions {
            prune,
            parallel,
            clearing: true,
            step3_order: Step3Order::Ascending,
        };
        let (conley, _) = compute_with_state(&self.inner, options)
            .map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
        Ok(PyConleyComplex {
            inner: conley,
            source: self.inner.clone(),
        })
    }

    /// Runs the full verification oracle; returns failed identities
    /// (empty means everything checks out).
    fn verify(&self) -> PyResult<Vec<String>> {
        let options = PipelineOptions::default();
        let (conley, state) = compute_with_state(&self.inner, options)
            .map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
        let report = oracle::verify_state(&state, Some(conley.delta()))
            .map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
        Ok(report.failures.iter().map(|f| f.to_string()).collect())
    }

    /// Conley index dimensions `{(grade_label, dim): k}` read off the
    /// clearing reduction.
    fn conley_index_dims(&self) -> PyResult<std::collections::HashMap<(String, i32), usize>> {
        let state = clearing_reduce(&self.inner, ReduceOptions::default())
            .map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
        Ok(state
            .conley_index_dims()
            .into_iter()
            .map(|((g, d), k)| ((self.inner.poset().label(g).to_owned(), d), k))
            .collect())
    }
}

/// The Conley complex of a graded complex, with its connection matrix.
#[pyclass(name = "ConleyComplex")]
struct PyConleyComplex {
    inner: conley::ConleyComplex,
    source: conley::GradedComplex,
}

#[pymethods]
impl PyConleyComplex {
    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "ConleyComplex({} index generators, {} delta entries)",
            self.inner.len(),
            self.inner.triplets().len()
        )
    }

    /// Index generators as `(id, dim, grade_label)` tuples.
    fn index_generators(&self) -> Vec<(String, i32, String)> {
        self.inner
            .index_generators()
            .iter()
            .map(|g| {
                (
                    g.id.clone(),
                    g.dim,
                    self.inner.poset().label(g.grade).to_owned(),
                )
            })
            .collect()
    }

    /// Conley index dimensions `{(grade_label, dim): k}`.
    fn index_dims(&self) -> std::collections::HashMap<(String, i32), usize> {
        self.inner
            .index_dims()
            .into_iter()
            .map(|((g, d), k)| ((self.inner.poset().label(g).to_owned(), d), k))
            .collect()
    }

    /// Connection matrix as `(row_id, col_id, coeff)` triplets.
    fn triplets(&self) -> Vec<(String, String, u64)> {
        let gens = self.inner.index_generators();
        self.inner
            .triplets()
            .into_iter()
            .map(|(r, c, v)| (gens[r as usize].id.clone(), gens[c as usize].id.clone(), v))
            .collect()
    }

    /// Serialises the result in the graded-complex file format.
    fn serialize(&self) -> String {
        io::serialize_result(&self.inner, Some(&self.source))
    }
}

/// Parses a graded-complex file.
#[pyfunction]
#[pyo3(signature = (text, field = None))]
fn parse_complex(text: &str, field: Option<u64>) -> PyResult<PyGradedComplex> {
    let inner =
        io::parse_complex_opts(text, field).map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(PyGradedComplex { inner })
}

/// Parses a simplicial filtration file.
#[pyfunction]
#[pyo3(signature = (text, field = None))]
fn parse_filtration(text: &str, field: Option<u64>) -> PyResult<PyGradedComplex> {
    let inner =
        io::parse_filtration_opts(text, field).map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(PyGradedComplex { inner })
}

/// Generates a random valid graded complex (same seed, same complex).
#[pyfunction]
#[pyo3(signature = (seed = 0, generators = 30, poset_size = 4, shape = "chain", density = 0.3, max_dim = 2, field = 2))]
#[allow(clippy::too_many_arguments)]
fn random_instance(
    seed: u64,
    generators: usize,
    poset_size: usize,
    shape: &str,
    density: f64,
    max_dim: usize,
    field: u64,
) -> PyResult<PyGradedComplex> {
    let shape = match shape {
        "chain" => PosetShape::Chain,
        "antichain" => PosetShape::Antichain,
        "random" => PosetShape::RandomDag { edge_prob: 0.35 },
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown shape `{other}` (chain | antichain | random)"
            )))
        }
    };
    let cfg = GeneratorConfig {
        seed,
        poset_size,
        shape,
        target_generators: generators,
        max_dim,
        density,
        characteristic: field,
    };
    let inner = random_complex(&cfg).map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(PyGradedComplex { inner })
}

#[pymodule]
fn conley_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGradedComplex>()?;
    m.add_class::<PyConleyComplex>()?;
    m.add_function(wrap_pyfunction!(parse_complex, m)?)?;
    m.add_function(wrap_pyfunction!(parse_filtration, m)?)?;
    m.add_function(wrap_pyfunction!(random_instance, m)?)?;
    Ok(())
}
