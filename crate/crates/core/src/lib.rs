//! Symbolic-numeric Picard iteration for boundary value problems of PDEs.
//!
//! Every function is held as a truncated bivariate power series in `(t, x)`.
//! A problem is a first-order system along one evolution axis; each sweep
//! integrates the right-hand sides, then boundary corrections rewrite the
//! iterate so the boundary conditions hold identically.
//!
//! Module map:
//! - [`series`]: truncated power-series algebra in one and two variables.
//! - [`lang`]: expression language, problem-file format and evaluators.
//! - [`engine`]: problem specification, sweeps, corrections and shooting.
//! - [`problems`]: the built-in problem suite.
//! - [`report`]: error grids, convergence tables and CSV output.
//! - [`cli`]: the command-line driver.

pub mod cli;
pub mod engine;
pub mod lang;
pub mod problems;
pub mod report;
pub mod series;

pub use engine::{
    run, run_with, Correction, CorrectionKind, Domain, EngineError, Interval, ProblemSpec,
    RunOptions, RunReport, ShootingSpec, SweepMode, VarSpec,
};
pub use lang::{parse_expr, Expr};
pub use series::{Axis, Series1, Series2, SeriesError};
