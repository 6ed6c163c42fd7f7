//! Python bindings. Rationals cross the boundary as `"p/q"` strings and
//! reports as JSON text.

use std::sync::Arc;

use engine::audit::{self, AuditMode};
use engine::bounds::{self, curve_csv, CurveSet};
use engine::catalog::{SchemeArgs, SchemeSpec};
use engine::rational::{self, Rational};
use engine::system::{self, run_transcript, DemandVector, MessageLibrary, Randomness};
use engine::{verify, Error};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn err(e: Error) -> PyErr {
    match e {
        Error::DecodeFailure(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn ratio(s: &str) -> PyResult<Rational> {
    rational::parse(s).map_err(err)
}

fn opt_ratio(s: Option<&str>) -> PyResult<Option<Rational>> {
    s.map(ratio).transpose()
}

/// A configured scheme.
#[pyclass(name = "Scheme", frozen)]
struct PyScheme {
    inner: Arc<dyn system::Scheme>,
}

#[pymethods]
impl PyScheme {
    #[new]
    #[pyo3(signature = (name, *, k=None, ku=None, n=None, t=None, m=None, lam=None, share_a=None, share_b=None, blocks=1))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        name: &str,
        k: Option<usize>,
        ku: Option<usize>,
        n: Option<usize>,
        t: Option<usize>,
        m: Option<&str>,
        lam: Option<&str>,
        share_a: Option<String>,
        share_b: Option<String>,
        blocks: usize,
    ) -> PyResult<Self> {
        let args = SchemeArgs {
            k,
            ku,
            n,
            t,
            m: opt_ratio(m)?,
            lambda: opt_ratio(lam)?,
            share_a,
            share_b,
        };
        let inner = SchemeSpec::parse(name, &args)
            .and_then(|s| s.build_blocks(blocks))
            .map_err(err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name().to_string()
    }

    /// `{"K", "Ku", "N", "L", "M"}` as JSON.
    fn params(&self) -> String {
        serde_json::to_string(self.inner.params()).expect("plain JSON")
    }

    /// Number of equiprobable realizations, or None for seeded-only schemes.
    fn randomness_size(&self) -> Option<u64> {
        self.inner.randomness().size()
    }

    /// One protocol run on a random library; returns the transcript JSON.
    #[pyo3(signature = (theta, *, seed=0, library_seed=None, realization=None))]
    fn simulate(
        &self,
        theta: &str,
        seed: u64,
        library_seed: Option<u64>,
        realization: Option<u64>,
    ) -> PyResult<String> {
        let s = self.inner.as_ref();
        let p = s.params();
        let demand = DemandVector::parse(theta, p.k).map_err(err)?;
        let lib = MessageLibrary::random(p.k, p.l, library_seed.unwrap_or(seed));
        let r = match realization {
            Some(r) => Randomness::Realization(r),
            None => Randomness::Seed(seed),
        };
        let t = run_transcript(s, &lib, &demand, r).map_err(err)?;
        if !t.is_correct(&lib) {
            return Err(PyRuntimeError::new_err("a user decoded the wrong message"));
        }
        Ok(t.to_json())
    }

    /// Privacy audit of one database; returns the report JSON.
    #[pyo3(signature = (db=1, *, samples=None, threshold=audit::SAMPLED_THRESHOLD, seed=0))]
    fn audit(&self, db: usize, samples: Option<usize>, threshold: f64, seed: u64) -> PyResult<String> {
        let s = self.inner.as_ref();
        let mode = match samples {
            None => AuditMode::Exhaustive,
            Some(samples) => AuditMode::Sampled { samples, threshold },
        };
        let r = audit::audit_privacy(s, db, &audit::all_demands(s), mode, seed).map_err(err)?;
        Ok(r.to_json())
    }

    fn __repr__(&self) -> String {
        format!("Scheme({}, {})", self.inner.name(), self.params())
    }
}

/// Curve table as CSV with header `M,R,label`.
#[pyfunction]
#[pyo3(signature = (set, points=121, k=2, ku=2, n=2))]
fn curve(set: &str, points: usize, k: usize, ku: usize, n: usize) -> PyResult<String> {
    let rows = CurveSet::parse(set, k, ku, n)
        .and_then(|c| c.evaluate(points))
        .map_err(err)?;
    Ok(curve_csv(&rows))
}

#[pyfunction]
fn cia_load(m: &str, n: usize) -> PyResult<String> {
    Ok(rational::format(&bounds::cia_load(ratio(m)?, n).map_err(err)?))
}

#[pyfunction]
fn pd_load(k: usize, ku: usize, n: usize, m: &str) -> PyResult<String> {
    Ok(rational::format(&bounds::pd_load(k, ku, n, ratio(m)?).map_err(err)?))
}

#[pyfunction]
fn converse_quarter(k: usize, ku: usize, n: usize, m: &str) -> PyResult<String> {
    Ok(rational::format(
        &bounds::caching_converse_quarter(k, ku, n, ratio(m)?).map_err(err)?,
    ))
}

#[pyfunction]
fn gap_ratio(k: usize, ku: usize, n: usize, m: &str) -> PyResult<String> {
    Ok(rational::format(&bounds::gap_ratio(k, ku, n, ratio(m)?).map_err(err)?))
}

/// Runs the acceptance criteria; returns the report JSON.
#[pyfunction]
#[pyo3(signature = (seed=0, only=None))]
fn verify_all(py: Python<'_>, seed: u64, only: Option<Vec<usize>>) -> String {
    let only = only.unwrap_or_default();
    py.detach(|| verify::verify_all(seed, &only).to_json())
}

#[pymodule]
fn mupir(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyScheme>()?;
    m.add_function(wrap_pyfunction!(curve, m)?)?;
    m.add_function(wrap_pyfunction!(cia_load, m)?)?;
    m.add_function(wrap_pyfunction!(pd_load, m)?)?;
    m.add_function(wrap_pyfunction!(converse_quarter, m)?)?;
    m.add_function(wrap_pyfunction!(gap_ratio, m)?)?;
    m.add_function(wrap_pyfunction!(verify_all, m)?)?;
    m.add("SCHEMES", engine::catalog::SCHEME_NAMES.to_vec())?;
    Ok(())
}
