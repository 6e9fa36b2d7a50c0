//! Python bindings: problems, runs, series and error grids.

use std::collections::HashMap;

use picard_bvp::engine::{RunReport, SweepMode};
use picard_bvp::lang::{emit, eval_numeric, parse_problem};
use picard_bvp::problems::{load_builtin, KEYS};
use picard_bvp::report::{convergence_table, error_grid, ErrorGrid as CoreGrid};
use picard_bvp::{parse_expr, run_with, Axis, ProblemSpec, RunOptions, Series2 as CoreSeries2};
use pyo3::exceptions::{PyIOError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn value_err(e: impl ToString) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn runtime_err(e: impl ToString) -> PyErr {
    PyRuntimeError::new_err(e.to_string())
}

fn axis(name: &str) -> PyResult<Axis> {
    name.parse().map_err(value_err)
}

/// A boundary value problem.
#[pyclass(name = "Problem", module = "picard_bvp_py", skip_from_py_object)]
#[derive(Clone)]
pub struct Problem {
    spec: ProblemSpec,
    reference_error: Option<f64>,
}

#[pymethods]
impl Problem {
    /// Parses problem-file text.
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        Ok(Problem {
            spec: parse_problem(text).map_err(value_err)?,
            reference_error: None,
        })
    }

    #[staticmethod]
    fn builtin(key: &str) -> PyResult<Self> {
        let e = load_builtin(key).map_err(value_err)?;
        Ok(Problem {
            spec: e.spec,
            reference_error: e.reference_error,
        })
    }

    #[staticmethod]
    fn from_file(path: &str) -> PyResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| PyIOError::new_err(format!("{path}: {e}")))?;
        Self::new(&text)
    }

    #[getter]
    fn name(&self) -> String {
        self.spec.name.clone()
    }

    #[getter]
    fn evolution(&self) -> String {
        self.spec.evolution.to_string()
    }

    #[getter]
    fn variables(&self) -> Vec<String> {
        self.spec.vars.iter().map(|v| v.name.clone()).collect()
    }

    #[getter]
    fn iterations(&self) -> usize {
        self.spec.iterations
    }

    #[setter]
    fn set_iterations(&mut self, n: usize) {
        self.spec.iterations = n;
    }

    /// `(deg_t, deg_x)`.
    #[getter]
    fn degrees(&self) -> (usize, usize) {
        self.spec.degrees
    }

    #[setter]
    fn set_degrees(&mut self, d: (usize, usize)) {
        self.spec.degrees = d;
    }

    /// `((t_lo, t_hi), (x_lo, x_hi))`.
    #[getter]
    fn domain(&self) -> ((f64, f64), (f64, f64)) {
        let d = &self.spec.domain;
        ((d.t.lo, d.t.hi), (d.x.lo, d.x.hi))
    }

    /// Absolute `(t, x)` about which series are expanded.
    #[getter]
    fn origin(&self) -> (f64, f64) {
        self.spec.origin()
    }

    #[getter]
    fn exact(&self) -> Option<String> {
        self.spec.exact.as_ref().map(|e| e.to_string())
    }

    #[getter]
    fn reference_error(&self) -> Option<f64> {
        self.reference_error
    }

    fn validate(&self) -> PyResult<()> {
        self.spec.validate().map_err(value_err)
    }

    /// Canonical problem-file text.
    fn to_text(&self) -> String {
        emit(&self.spec)
    }

    #[pyo3(signature = (jacobi = false))]
    fn run(&self, jacobi: bool) -> PyResult<Run> {
        run(self, jacobi)
    }

    fn __repr__(&self) -> String {
        format!("Problem({:?}, evolve={}, vars={:?})", self.spec.name, self.spec.evolution, self.variables())
    }
}

/// Truncated power series in `(t, x)`, in local coordinates.
#[pyclass(name = "Series2", module = "picard_bvp_py", skip_from_py_object)]
#[derive(Clone)]
pub struct Series2 {
    inner: CoreSeries2,
}

#[pymethods]
impl Series2 {
    /// Builds a series from rows of coefficients, one row per power of `t`.
    #[new]
    fn new(rows: Vec<Vec<f64>>) -> PyResult<Self> {
        let deg_t = rows.len().checked_sub(1).ok_or_else(|| value_err("need at least one row"))?;
        let width = rows[0].len();
        if width == 0 || rows.iter().any(|r| r.len() != width) {
            return Err(value_err("rows must be non-empty and of equal length"));
        }
        Ok(Series2 {
            inner: CoreSeries2::from_rows(deg_t, width - 1, &rows),
        })
    }

    #[staticmethod]
    fn variable(axis_name: &str, deg_t: usize, deg_x: usize) -> PyResult<Self> {
        Ok(Series2 {
            inner: CoreSeries2::variable(deg_t, deg_x, axis(axis_name)?, 0.0),
        })
    }

    #[getter]
    fn degrees(&self) -> (usize, usize) {
        self.inner.degrees()
    }

    fn rows(&self) -> Vec<Vec<f64>> {
        self.inner.rows()
    }

    fn coeff(&self, i: usize, j: usize) -> f64 {
        self.inner.get(i, j)
    }

    /// Value at local coordinates `(t, x)`.
    fn eval(&self, t: f64, x: f64) -> f64 {
        self.inner.eval_point(t, x)
    }

    /// Coefficients of the series left after fixing `axis` at `value`.
    fn eval_axis(&self, axis_name: &str, value: f64) -> PyResult<Vec<f64>> {
        Ok(self.inner.eval_axis(axis(axis_name)?, value).coeffs().to_vec())
    }

    fn diff(&self, axis_name: &str) -> PyResult<Self> {
        Ok(Series2 {
            inner: self.inner.diff(axis(axis_name)?),
        })
    }

    fn integrate(&self, axis_name: &str) -> PyResult<Self> {
        Ok(Series2 {
            inner: self.inner.integrate(axis(axis_name)?),
        })
    }

    fn recip(&self) -> PyResult<Self> {
        Ok(Series2 {
            inner: self.inner.recip().map_err(value_err)?,
        })
    }

    fn powi(&self, n: i64) -> PyResult<Self> {
        Ok(Series2 {
            inner: self.inner.powi(n).map_err(value_err)?,
        })
    }

    fn __add__(&self, other: &Series2) -> PyResult<Self> {
        Ok(Series2 {
            inner: self.inner.add(&other.inner).map_err(value_err)?,
        })
    }

    fn __sub__(&self, other: &Series2) -> PyResult<Self> {
        Ok(Series2 {
            inner: self.inner.sub(&other.inner).map_err(value_err)?,
        })
    }

    fn __mul__(&self, other: &Series2) -> PyResult<Self> {
        Ok(Series2 {
            inner: self.inner.mul(&other.inner).map_err(value_err)?,
        })
    }

    fn __neg__(&self) -> Self {
        Series2 {
            inner: self.inner.neg(),
        }
    }

    fn scale(&self, c: f64) -> Self {
        Series2 {
            inner: self.inner.scale(c),
        }
    }

    fn __repr__(&self) -> String {
        let (dt, dx) = self.inner.degrees();
        format!("Series2(deg_t={dt}, deg_x={dx})")
    }
}

/// Errors of a final iterate sampled on an `n`×`n` grid.
#[pyclass(name = "ErrorGrid", module = "picard_bvp_py")]
pub struct ErrorGrid {
    inner: CoreGrid,
}

#[pymethods]
impl ErrorGrid {
    #[getter]
    fn n(&self) -> usize {
        self.inner.n
    }

    #[getter]
    fn max_abs(&self) -> f64 {
        self.inner.max_abs
    }

    #[getter]
    fn mean_abs(&self) -> f64 {
        self.inner.mean_abs
    }

    #[getter]
    fn max_rel(&self) -> Option<f64> {
        self.inner.max_rel
    }

    #[getter]
    fn argmax(&self) -> (f64, f64) {
        self.inner.argmax
    }

    /// `(t, x, approx, exact, abs_err, rel_err)` per cell, `t` outer.
    fn points(&self) -> Vec<(f64, f64, f64, f64, f64, Option<f64>)> {
        self.inner
            .points
            .iter()
            .map(|p| (p.t, p.x, p.approx, p.exact, p.abs_err, p.rel_err))
            .collect()
    }

    fn to_csv(&self) -> String {
        self.inner.to_csv()
    }
}

/// The iterates of one run.
#[pyclass(name = "Run", module = "picard_bvp_py")]
pub struct Run {
    spec: ProblemSpec,
    report: RunReport,
}

#[pymethods]
impl Run {
    #[getter]
    fn sweeps(&self) -> usize {
        self.report.sweeps.len()
    }

    #[getter]
    fn truncation_drops(&self) -> u64 {
        self.report.truncation_drops
    }

    /// Final iterate of `name`, or of the first variable.
    #[pyo3(signature = (name = None))]
    fn series(&self, name: Option<&str>) -> PyResult<Series2> {
        let name = name.unwrap_or(&self.report.primary);
        self.report
            .final_series(name)
            .map(|s| Series2 { inner: s.clone() })
            .ok_or_else(|| value_err(format!("no variable `{name}`")))
    }

    /// Value of the final iterate at absolute `(t, x)`.
    #[pyo3(signature = (t, x, name = None))]
    fn value(&self, t: f64, x: f64, name: Option<&str>) -> PyResult<f64> {
        let (t0, x0) = self.spec.origin();
        Ok(self.series(name)?.inner.eval_point(t - t0, x - x0))
    }

    /// Coefficients of the final shooting slope, if any.
    fn gamma(&self) -> Option<Vec<f64>> {
        self.report.final_gamma().map(|g| g.coeffs().to_vec())
    }

    /// Largest boundary residual removed in each sweep.
    fn residuals(&self) -> Vec<f64> {
        self.report.sweeps.iter().map(|s| s.residual_norm()).collect()
    }

    #[pyo3(signature = (n = 50))]
    fn error_grid(&self, n: usize) -> PyResult<ErrorGrid> {
        let exact = self
            .spec
            .exact
            .as_ref()
            .ok_or_else(|| value_err("problem has no exact solution"))?;
        Ok(ErrorGrid {
            inner: error_grid(self.report.primary_final(), exact, &self.spec, n).map_err(value_err)?,
        })
    }

    /// `(iteration, max_abs, residual_norm)` per sweep.
    #[pyo3(signature = (n = 50))]
    fn convergence(&self, n: usize) -> PyResult<Vec<(usize, Option<f64>, f64)>> {
        Ok(convergence_table(&self.report, &self.spec, n)
            .map_err(value_err)?
            .into_iter()
            .map(|r| (r.iteration, r.max_abs, r.residual_norm))
            .collect())
    }
}

/// Runs `problem` for its configured number of sweeps.
#[pyfunction]
#[pyo3(signature = (problem, jacobi = false))]
fn run(problem: &Problem, jacobi: bool) -> PyResult<Run> {
    let mode = if jacobi { SweepMode::Jacobi } else { SweepMode::GaussSeidel };
    let report = run_with(&problem.spec, RunOptions { mode }).map_err(runtime_err)?;
    Ok(Run {
        spec: problem.spec.clone(),
        report,
    })
}

#[pyfunction]
fn builtin_keys() -> Vec<&'static str> {
    KEYS.to_vec()
}

/// Parses an expression and returns its canonical text.
#[pyfunction]
fn canonical(text: &str) -> PyResult<String> {
    parse_expr(text, &HashMap::new()).map(|e| e.to_string()).map_err(value_err)
}

/// Numeric value of a closed-form expression in `t` and `x`.
#[pyfunction]
fn evaluate(text: &str, t: f64, x: f64) -> PyResult<f64> {
    let e = parse_expr(text, &HashMap::new()).map_err(value_err)?;
    eval_numeric(&e, t, x, &HashMap::new()).map_err(value_err)
}

#[pymodule]
fn picard_bvp_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Problem>()?;
    m.add_class::<Series2>()?;
    m.add_class::<ErrorGrid>()?;
    m.add_class::<Run>()?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(builtin_keys, m)?)?;
    m.add_function(wrap_pyfunction!(canonical, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate, m)?)?;
    Ok(())
}
