//! Command-line driver.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 solve failure,
//! 3 suite acceptance failure.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::engine::{run_with, ProblemSpec, RunOptions, RunReport, SweepMode};
use crate::lang::parse_problem;
use crate::problems::{all_builtins, load_builtin, BuiltinEntry, Expectation};
use crate::report::{convergence_table, error_grid, format_convergence, ErrorGrid};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_SOLVE: i32 = 2;
pub const EXIT_SUITE: i32 = 3;

pub const DEFAULT_GRID: usize = 50;

#[derive(Debug, Parser)]
#[command(name = "picard-bvp", version, about = "Picard iteration on truncated power series for PDE boundary value problems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one problem and report its error against the exact solution.
    Solve {
        /// Problem file, or `builtin:<key>`.
        problem: String,
        /// Number of sweeps; overrides the problem file.
        #[arg(long)]
        iterations: Option<usize>,
        #[arg(long)]
        degree_t: Option<usize>,
        #[arg(long)]
        degree_x: Option<usize>,
        /// Samples per axis of the error grid.
        #[arg(long, default_value_t = DEFAULT_GRID)]
        grid: usize,
        /// Write the error grid as CSV to this file.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print the error grid as CSV instead of the summary.
        #[arg(long)]
        csv: bool,
        /// Update every variable from the previous sweep's values.
        #[arg(long)]
        jacobi: bool,
    },
    /// Run every builtin and check it against its expected accuracy.
    Suite {
        /// Directory for one error-grid CSV per builtin.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List builtin problem keys.
    List,
    /// Print the canonical problem file for a builtin or a file.
    Emit { problem: String },
}

/// Runs the command line `args` (program name first), writing to the
/// process's standard streams.
pub fn main<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_cli(args, &mut stdout.lock(), &mut stderr.lock())
}

/// [`main`] with explicit output streams.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    let result = match cli.command {
        Command::Solve {
            problem,
            iterations,
            degree_t,
            degree_x,
            grid,
            out: csv_path,
            csv,
            jacobi,
        } => solve(
            &problem,
            SolveOptions {
                iterations,
                degree_t,
                degree_x,
                grid,
                csv_path,
                csv,
                mode: if jacobi { SweepMode::Jacobi } else { SweepMode::GaussSeidel },
            },
            out,
        ),
        Command::Suite { out: dir } => suite(dir.as_deref(), out),
        Command::List => {
            for e in all_builtins() {
                let _ = writeln!(out, "{:<16} {}", e.key, e.notes);
            }
            Ok(())
        }
        Command::Emit { problem } => load(&problem).map(|(spec, entry)| {
            let text = match entry {
                Some(e) => e.file_text(),
                None => crate::lang::emit(&spec),
            };
            let _ = out.write_all(text.as_bytes());
        }),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(Failure { code, message }) => {
            let _ = writeln!(err, "error: {message}");
            code
        }
    }
}

#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

fn solve_failure(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_SOLVE,
        message: message.into(),
    }
}

fn load(problem: &str) -> Result<(ProblemSpec, Option<BuiltinEntry>), Failure> {
    if let Some(key) = problem.strip_prefix("builtin:") {
        let entry = load_builtin(key).map_err(|e| usage(e.to_string()))?;
        return Ok((entry.spec.clone(), Some(entry)));
    }
    let text = std::fs::read_to_string(problem).map_err(|e| usage(format!("cannot read `{problem}`: {e}")))?;
    let spec = parse_problem(&text).map_err(|d| usage(format!("{problem}: {d}")))?;
    Ok((spec, None))
}

struct SolveOptions {
    iterations: Option<usize>,
    degree_t: Option<usize>,
    degree_x: Option<usize>,
    grid: usize,
    csv_path: Option<PathBuf>,
    csv: bool,
    mode: SweepMode,
}

fn solve(problem: &str, o: SolveOptions, out: &mut dyn Write) -> Result<(), Failure> {
    let (mut spec, entry) = load(problem)?;
    if let Some(n) = o.iterations {
        spec.iterations = n;
    }
    if let Some(d) = o.degree_t {
        spec.degrees.0 = d;
    }
    if let Some(d) = o.degree_x {
        spec.degrees.1 = d;
    }
    if o.grid < 2 {
        return Err(usage("--grid must be at least 2"));
    }
    spec.validate().map_err(|e| usage(e.to_string()))?;
    let report = run_with(&spec, RunOptions { mode: o.mode }).map_err(|e| solve_failure(e.to_string()))?;
    let grid = match &spec.exact {
        Some(exact) => Some(
            error_grid(report.primary_final(), exact, &spec, o.grid).map_err(|e| solve_failure(e.to_string()))?,
        ),
        None => None,
    };
    if let (Some(path), Some(g)) = (&o.csv_path, &grid) {
        std::fs::write(path, g.to_csv()).map_err(|e| solve_failure(format!("cannot write `{}`: {e}", path.display())))?;
    }
    let text = if o.csv {
        match &grid {
            Some(g) => g.to_csv(),
            None => return Err(solve_failure("problem has no exact solution; no error grid to print")),
        }
    } else {
        summary(&spec, &report, grid.as_ref(), entry.as_ref(), o.grid)?
    };
    let _ = out.write_all(text.as_bytes());
    Ok(())
}

fn summary(
    spec: &ProblemSpec,
    report: &RunReport,
    grid: Option<&ErrorGrid>,
    entry: Option<&BuiltinEntry>,
    n: usize,
) -> Result<String, Failure> {
    let mut s = String::new();
    let _ = writeln!(s, "problem     {}", spec.name);
    let _ = writeln!(s, "sweeps      {}", spec.iterations);
    let _ = writeln!(s, "degrees     t={} x={}", spec.degrees.0, spec.degrees.1);
    let rows = convergence_table(report, spec, n).map_err(|e| solve_failure(e.to_string()))?;
    s.push_str(&format_convergence(&rows));
    if let Some(g) = report.final_gamma() {
        let terms: Vec<String> = g.coeffs().iter().take(3).map(|c| format!("{c:.6}")).collect();
        let _ = writeln!(s, "gamma       [{}, ...] in {}", terms.join(", "), g.axis());
    }
    if let Some(g) = grid {
        let _ = writeln!(s, "grid        {n}x{n}");
        let _ = writeln!(s, "max_abs     {:.6e} at t={:.4} x={:.4}", g.max_abs, g.argmax.0, g.argmax.1);
        let _ = writeln!(s, "mean_abs    {:.6e}", g.mean_abs);
        match g.max_rel {
            Some(r) => {
                let _ = writeln!(s, "max_rel     {r:.6e}");
            }
            None => s.push_str("max_rel     -\n"),
        }
    }
    if let Some(eps) = entry.and_then(|e| e.reference_error) {
        let _ = writeln!(s, "reference   {eps}");
    }
    if report.truncation_drops > 0 {
        let _ = writeln!(s, "dropped     {} coefficients beyond truncation", report.truncation_drops);
    }
    Ok(s)
}

/// Outcome of one builtin under `suite`.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteRow {
    pub key: &'static str,
    pub sweeps: usize,
    pub max_abs: Option<f64>,
    pub reference: Option<f64>,
    pub passed: bool,
    pub detail: String,
}

/// Runs one builtin on the default grid and checks its expectation.
pub fn check_builtin(entry: &BuiltinEntry, n: usize) -> (SuiteRow, Option<ErrorGrid>) {
    let mut row = SuiteRow {
        key: entry.key,
        sweeps: entry.spec.iterations,
        max_abs: None,
        reference: entry.reference_error,
        passed: false,
        detail: String::new(),
    };
    let spec = &entry.spec;
    let report = match crate::engine::run(spec) {
        Ok(r) => r,
        Err(e) => {
            row.detail = e.to_string();
            return (row, None);
        }
    };
    let rows = match convergence_table(&report, spec, n) {
        Ok(r) => r,
        Err(e) => {
            row.detail = e.to_string();
            return (row, None);
        }
    };
    let at = |k: usize| rows.iter().find(|r| r.iteration == k).and_then(|r| r.max_abs);
    row.max_abs = rows.last().and_then(|r| r.max_abs);
    match (entry.expectation, row.max_abs) {
        (Expectation::MaxAbsWithin(lo, hi), Some(e)) => {
            row.passed = e >= lo && e <= hi;
            row.detail = format!("expected in [{lo:e}, {hi:e}]");
        }
        (Expectation::Decreases { earlier, later }, _) => match (at(earlier), at(later)) {
            (Some(a), Some(b)) => {
                row.passed = b < a;
                row.detail = format!("sweep {earlier}: {a:.3e}, sweep {later}: {b:.3e}");
            }
            _ => row.detail = "missing sweeps".into(),
        },
        (_, None) => row.detail = "no exact solution".into(),
    }
    let grid = spec
        .exact
        .as_ref()
        .and_then(|e| error_grid(report.primary_final(), e, spec, n).ok());
    (row, grid)
}

fn suite(dir: Option<&Path>, out: &mut dyn Write) -> Result<(), Failure> {
    if let Some(d) = dir {
        std::fs::create_dir_all(d).map_err(|e| usage(format!("cannot create `{}`: {e}", d.display())))?;
    }
    let _ = writeln!(out, "{:<16} {:>6}  {:<12}  {:<10}  result", "key", "sweeps", "max_abs", "reference");
    let mut failed = Vec::new();
    for entry in all_builtins() {
        let (row, grid) = check_builtin(&entry, DEFAULT_GRID);
        let max_abs = row.max_abs.map(|e| format!("{e:.4e}")).unwrap_or_else(|| "-".into());
        let reference = row.reference.map(|e| format!("{e}")).unwrap_or_else(|| "-".into());
        let verdict = if row.passed { "pass" } else { "FAIL" };
        let _ = writeln!(
            out,
            "{:<16} {:>6}  {max_abs:<12}  {reference:<10}  {verdict} ({})",
            row.key, row.sweeps, row.detail
        );
        if let (Some(d), Some(g)) = (dir, grid) {
            let path = d.join(format!("{}.csv", row.key));
            std::fs::write(&path, g.to_csv())
                .map_err(|e| solve_failure(format!("cannot write `{}`: {e}", path.display())))?;
        }
        if !row.passed {
            failed.push(row.key);
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure {
            code: EXIT_SUITE,
            message: format!("{} builtin(s) outside expectation: {}", failed.len(), failed.join(", ")),
        })
    }
}
