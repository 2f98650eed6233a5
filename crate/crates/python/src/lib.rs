//! Python bindings: movies, surfaces, the invariant and moves.

use pyo3::exceptions::{PyOSError, PyValueError};
use pyo3::prelude::*;

use pequiv::decker::{assemble_decker, DeckerSet};
use pequiv::invariant::{self, invariant_result, FrameSignTable, InvariantResult};
use pequiv::movie::{parse_movie, Movie};
use pequiv::moves::{applicable_moves, apply_move, verify_invariance, MoveInstance};
use pequiv::surface::{build_surface, SurfaceComplex};

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// A parsed movie script.
#[pyclass(name = "Movie", module = "pequiv", frozen)]
struct PyMovie {
    inner: Movie,
}

#[pymethods]
impl PyMovie {
    #[staticmethod]
    fn parse(text: &str) -> PyResult<PyMovie> {
        parse_movie(text)
            .map(|inner| PyMovie { inner })
            .map_err(value_error)
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<PyMovie> {
        let text = std::fs::read_to_string(path).map_err(|e| PyOSError::new_err(e.to_string()))?;
        PyMovie::parse(&text)
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name.clone()
    }

    #[getter]
    fn events(&self) -> usize {
        self.inner.events.len()
    }

    fn is_p_movie(&self) -> bool {
        self.inner.is_p_movie()
    }

    fn morse_euler_characteristic(&self) -> i64 {
        self.inner.morse_euler_characteristic()
    }

    fn script(&self) -> String {
        self.inner.to_script()
    }

    /// Builds the surface; movies with triple points are rejected.
    fn surface(&self) -> PyResult<PySurface> {
        let cx = build_surface(&self.inner).map_err(value_error)?;
        PySurface::from_complex(cx)
    }

    fn __repr__(&self) -> String {
        format!("Movie({:?}, {} events)", self.inner.name, self.inner.events.len())
    }
}

/// Cell complex of a movie's surface together with its decker set.
#[pyclass(name = "Surface", module = "pequiv", frozen)]
struct PySurface {
    cx: SurfaceComplex,
    decker: DeckerSet,
}

impl PySurface {
    fn from_complex(cx: SurfaceComplex) -> PyResult<PySurface> {
        let decker = assemble_decker(&cx).map_err(value_error)?;
        Ok(PySurface { cx, decker })
    }
}

#[pymethods]
impl PySurface {
    #[getter]
    fn euler_characteristic(&self) -> i64 {
        self.cx.euler_characteristic()
    }

    /// `(label, genus)` for every component.
    fn genera(&self) -> Vec<(String, i64)> {
        self.cx
            .component_summary()
            .into_iter()
            .map(|c| (c.label, c.genus))
            .collect()
    }

    /// `(id, component, mate)` for every decker circle.
    fn decker_circles(&self) -> Vec<(usize, String, usize)> {
        self.decker
            .circles
            .iter()
            .map(|c| (c.id, c.component.clone(), c.mate))
            .collect()
    }

    fn a_f(&self) -> Vec<usize> {
        self.decker.a_f()
    }

    fn invariant(&self) -> PyResult<PyInvariant> {
        invariant_result(&self.cx, &self.decker, &FrameSignTable::default())
            .map(|inner| PyInvariant { inner })
            .map_err(value_error)
    }

    /// Applicable moves as JSON move instances.
    fn applicable_moves(&self) -> PyResult<Vec<String>> {
        let moves = applicable_moves(&self.cx).map_err(value_error)?;
        moves
            .iter()
            .map(|m| serde_json::to_string(m).map_err(value_error))
            .collect()
    }

    /// Applies a JSON move instance; returns the new surface and the JSON
    /// instance that undoes it.
    fn apply_move(&self, instance: &str) -> PyResult<(PySurface, String)> {
        let mi: MoveInstance = serde_json::from_str(instance).map_err(value_error)?;
        let (cx, inverse) = apply_move(&self.cx, &mi).map_err(value_error)?;
        let inverse = serde_json::to_string(&inverse).map_err(value_error)?;
        Ok((PySurface::from_complex(cx)?, inverse))
    }

    /// Whether the move leaves the invariant unchanged.
    fn verify_move(&self, instance: &str) -> PyResult<bool> {
        let mi: MoveInstance = serde_json::from_str(instance).map_err(value_error)?;
        verify_invariance(&self.cx, &mi).map_err(value_error)
    }

    fn complex_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.cx).map_err(value_error)
    }
}

/// Invariant values at every polarity.
#[pyclass(name = "Invariant", module = "pequiv", frozen)]
struct PyInvariant {
    inner: InvariantResult,
}

#[pymethods]
impl PyInvariant {
    /// Comparison key: one sorted list of `(genus, divisibility)` per polarity.
    #[getter]
    fn key(&self) -> Vec<Vec<(i64, i64)>> {
        self.inner.key.iter().cloned().collect()
    }

    /// `(label, genus, coordinates, divisibility)` at the all-ones polarity.
    fn canonical(&self) -> Vec<(String, i64, Vec<i64>, i64)> {
        self.inner
            .canonical_class()
            .components
            .iter()
            .map(|c| (c.label.clone(), c.genus, c.coordinates.clone(), c.divisibility))
            .collect()
    }

    fn is_zero(&self) -> bool {
        self.inner.classes.iter().all(|c| c.is_zero())
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.inner.classes).map_err(value_error)
    }
}

/// `"DISTINGUISHED"` or `"INCONCLUSIVE"`; raises `ValueError` when the
/// underlying surfaces differ.
#[pyfunction]
fn compare(a: &PyInvariant, b: &PyInvariant) -> PyResult<String> {
    invariant::compare(&a.inner, &b.inner)
        .map(|v| v.to_string())
        .map_err(value_error)
}

/// Runs the command line tool in-process and returns its exit code.
#[pyfunction]
fn run_cli(args: Vec<String>) -> i32 {
    pequiv::cli::run(std::iter::once("pequiv".to_string()).chain(args))
}

#[pymodule]
#[pyo3(name = "pequiv")]
fn pequiv_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyMovie>()?;
    m.add_class::<PySurface>()?;
    m.add_class::<PyInvariant>()?;
    m.add_function(wrap_pyfunction!(compare, m)?)?;
    m.add_function(wrap_pyfunction!(run_cli, m)?)?;
    Ok(())
}
