//! The expression language: AST, parser, evaluators and the problem-file
//! format.

mod ast;
mod eval;
mod parser;
pub mod problem_file;

pub use ast::{DerivAxis, Expr};
pub use eval::{eval_numeric, eval_rhs, expand_seed, EvalError, RhsContext};
pub use parser::{fold_constant, parse_expr, Diagnostic, ParseDiagnostics};
pub use problem_file::{emit, parse_problem};
