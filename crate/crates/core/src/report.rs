//! Error grids against a known exact solution, and convergence tables.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::engine::{EngineError, ProblemSpec, RunReport};
use crate::lang::{eval_numeric, Expr};
use crate::series::Series2;

/// Below this magnitude of the exact value the relative error is undefined.
pub const REL_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub t: f64,
    pub x: f64,
    pub approx: f64,
    pub exact: f64,
    pub abs_err: f64,
    pub rel_err: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorGrid {
    /// Samples per axis.
    pub n: usize,
    /// Row-major: `t` outer, `x` inner.
    pub points: Vec<GridPoint>,
    pub max_abs: f64,
    pub mean_abs: f64,
    pub max_rel: Option<f64>,
    /// Absolute `(t, x)` of the largest absolute error.
    pub argmax: (f64, f64),
}

impl ErrorGrid {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,x,approx,exact,abs_err,rel_err\n");
        for p in &self.points {
            let rel = p.rel_err.map(|r| format!("{r:.16e}")).unwrap_or_default();
            let _ = writeln!(
                s,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{rel}",
                p.t, p.x, p.approx, p.exact, p.abs_err
            );
        }
        s
    }
}

/// Samples `series` and `exact` on an `n`×`n` grid spanning the problem
/// domain. Series are evaluated in the problem's local coordinates.
pub fn error_grid(series: &Series2, exact: &Expr, p: &ProblemSpec, n: usize) -> Result<ErrorGrid, EngineError> {
    if n == 0 {
        return Err(EngineError::Invalid("grid needs at least one point per axis".into()));
    }
    let (t0, x0) = p.origin();
    let empty = HashMap::new();
    let mut points = Vec::with_capacity(n * n);
    for &t in &p.domain.t.samples(n) {
        for &x in &p.domain.x.samples(n) {
            let approx = series.eval_point(t - t0, x - x0);
            let ex = eval_numeric(exact, t, x, &empty).map_err(|e| EngineError::Invalid(format!("exact solution at ({t}, {x}): {e}")))?;
            let abs_err = (approx - ex).abs();
            let rel_err = (ex.abs() >= REL_FLOOR).then(|| abs_err / ex.abs());
            points.push(GridPoint {
                t,
                x,
                approx,
                exact: ex,
                abs_err,
                rel_err,
            });
        }
    }
    let mut max_abs = f64::NEG_INFINITY;
    let mut argmax = (points[0].t, points[0].x);
    let mut sum = 0.0;
    let mut max_rel: Option<f64> = None;
    for q in &points {
        // NaN compares false, so propagate it explicitly.
        if q.abs_err > max_abs || q.abs_err.is_nan() && !max_abs.is_nan() {
            max_abs = q.abs_err;
            argmax = (q.t, q.x);
        }
        sum += q.abs_err;
        if let Some(r) = q.rel_err {
            max_rel = Some(max_rel.map_or(r, |m: f64| m.max(r)));
        }
    }
    Ok(ErrorGrid {
        n,
        mean_abs: sum / points.len() as f64,
        points,
        max_abs,
        max_rel,
        argmax,
    })
}

/// Error grid of the primary variable after the final sweep.
pub fn final_error_grid(report: &RunReport, p: &ProblemSpec, n: usize) -> Result<ErrorGrid, EngineError> {
    let exact = p
        .exact
        .as_ref()
        .ok_or_else(|| EngineError::Invalid(format!("problem `{}` has no exact solution", p.name)))?;
    error_grid(report.primary_final(), exact, p, n)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub iteration: usize,
    /// `None` when the problem has no exact solution.
    pub max_abs: Option<f64>,
    pub residual_norm: f64,
}

/// One row per sweep.
pub fn convergence_table(report: &RunReport, p: &ProblemSpec, n: usize) -> Result<Vec<ConvergenceRow>, EngineError> {
    if report.sweeps.is_empty() {
        return Err(EngineError::Invalid("run performed no sweeps".into()));
    }
    let primary = &report.primary;
    report
        .sweeps
        .iter()
        .map(|s| {
            let max_abs = match &p.exact {
                Some(e) => {
                    let series = s
                        .vars
                        .get(primary)
                        .ok_or_else(|| EngineError::Invalid(format!("sweep lacks `{primary}`")))?;
                    Some(error_grid(series, e, p, n)?.max_abs)
                }
                None => None,
            };
            Ok(ConvergenceRow {
                iteration: s.index,
                max_abs,
                residual_norm: s.residual_norm(),
            })
        })
        .collect()
}

pub fn format_convergence(rows: &[ConvergenceRow]) -> String {
    let mut s = String::from("iter  max_abs_err      residual\n");
    for r in rows {
        let err = r.max_abs.map(|e| format!("{e:.6e}")).unwrap_or_else(|| "-".into());
        let _ = writeln!(s, "{:>4}  {err:<15}  {:.6e}", r.iteration, r.residual_norm);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse_expr;
    use crate::series::Axis;

    fn unit() -> ProblemSpec {
        ProblemSpec::new("g", Axis::T)
    }

    #[test]
    fn exact_series_has_zero_error() {
        let s = Series2::from_rows(1, 1, &[vec![1.0, 1.0], vec![1.0, 1.0]]);
        let e = parse_expr("(1 + t)*(1 + x)", &HashMap::new()).unwrap();
        let g = error_grid(&s, &e, &unit(), 5).unwrap();
        assert_eq!(g.points.len(), 25);
        assert!(g.max_abs < 1e-15);
        assert_eq!(g.points[1].t, 0.0);
        assert_eq!(g.points[1].x, 0.25);
    }

    #[test]
    fn relative_error_undefined_near_zero() {
        let s = Series2::constant(2, 2, 0.5);
        let e = parse_expr("x", &HashMap::new()).unwrap();
        let g = error_grid(&s, &e, &unit(), 3).unwrap();
        assert_eq!(g.points[0].rel_err, None);
        assert_eq!(g.points[2].rel_err, Some(0.5));
        assert_eq!(g.max_abs, 0.5);
        assert_eq!(g.argmax, (0.0, 0.0));
        let csv = g.to_csv();
        assert!(csv.starts_with("t,x,approx,exact,abs_err,rel_err\n"));
        assert!(csv.lines().nth(1).unwrap().ends_with(','));
    }

    #[test]
    fn local_coordinates_follow_expansion_point() {
        let mut p = unit();
        p.expand = (None, Some(0.5));
        // series in h = x - 0.5
        let s = Series2::variable(2, 2, Axis::X, 0.5);
        let e = parse_expr("x", &HashMap::new()).unwrap();
        assert!(error_grid(&s, &e, &p, 4).unwrap().max_abs < 1e-15);
    }

    #[test]
    fn empty_grid_rejected() {
        let s = Series2::constant(2, 2, 0.0);
        let e = parse_expr("0", &HashMap::new()).unwrap();
        assert!(error_grid(&s, &e, &unit(), 0).is_err());
    }
}
