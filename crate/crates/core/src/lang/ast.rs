use std::fmt;

use crate::series::{AnalyticFn, Axis};

/// Which partial derivative a `u_t`-style reference or a `D[..](..)` node
/// takes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DerivAxis {
    T,
    X,
    TT,
    XX,
    TX,
}

impl DerivAxis {
    pub fn suffix(self) -> &'static str {
        match self {
            DerivAxis::T => "t",
            DerivAxis::X => "x",
            DerivAxis::TT => "tt",
            DerivAxis::XX => "xx",
            DerivAxis::TX => "tx",
        }
    }

    pub fn from_suffix(s: &str) -> Option<DerivAxis> {
        Some(match s {
            "t" => DerivAxis::T,
            "x" => DerivAxis::X,
            "tt" => DerivAxis::TT,
            "xx" => DerivAxis::XX,
            "tx" | "xt" => DerivAxis::TX,
            _ => return None,
        })
    }

    /// Number of derivatives taken along each axis, `(t, x)`.
    pub fn orders(self) -> (usize, usize) {
        match self {
            DerivAxis::T => (1, 0),
            DerivAxis::X => (0, 1),
            DerivAxis::TT => (2, 0),
            DerivAxis::XX => (0, 2),
            DerivAxis::TX => (1, 1),
        }
    }

    /// The single axis, for first derivatives.
    pub fn single(self) -> Option<Axis> {
        match self {
            DerivAxis::T => Some(Axis::T),
            DerivAxis::X => Some(Axis::X),
            _ => None,
        }
    }
}

/// Expression tree for right-hand sides, seeds, boundary targets and exact
/// solutions.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Number(f64),
    /// A named constant, resolved against the problem's table at parse time.
    Const { name: String, value: f64 },
    Var(Axis),
    StateRef(String),
    /// `u_x`, `u_tt`, ...: a partial derivative of a state variable.
    DerivRef { name: String, axis: DerivAxis },
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    PowInt(Box<Expr>, u32),
    Func(AnalyticFn, Box<Expr>),
    /// `D[x](e)`: derivative of a whole subexpression.
    Deriv(DerivAxis, Box<Expr>),
}

impl Expr {
    /// Calls `f` on every node, parents before children.
    pub fn visit(&self, f: &mut impl FnMut(&Expr)) {
        f(self);
        match self {
            Expr::Neg(a) | Expr::PowInt(a, _) | Expr::Func(_, a) | Expr::Deriv(_, a) => a.visit(f),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.visit(f);
                b.visit(f);
            }
            _ => {}
        }
    }

    pub fn any(&self, pred: impl Fn(&Expr) -> bool) -> bool {
        let mut found = false;
        self.visit(&mut |e| found |= pred(e));
        found
    }

    /// Names of state variables referenced directly or through derivatives.
    pub fn state_names(&self) -> Vec<String> {
        let mut names = Vec::new();
        self.visit(&mut |e| match e {
            Expr::StateRef(n) | Expr::DerivRef { name: n, .. } if !names.contains(n) => {
                names.push(n.clone())
            }
            _ => {}
        });
        names
    }

    pub fn uses_var(&self, axis: Axis) -> bool {
        self.any(|e| matches!(e, Expr::Var(a) if *a == axis))
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(..) => 3,
            Expr::PowInt(..) => 4,
            _ => 5,
        }
    }
}

fn write_operand(f: &mut fmt::Formatter<'_>, e: &Expr, parens: bool) -> fmt::Result {
    if parens {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

/// Prints with the minimum parentheses needed for the parser to rebuild the
/// same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let binary = |f: &mut fmt::Formatter<'_>, a: &Expr, op: &str, b: &Expr| -> fmt::Result {
            let p = self.precedence();
            write_operand(f, a, a.precedence() < p)?;
            f.write_str(op)?;
            write_operand(f, b, b.precedence() <= p)
        };
        match self {
            Expr::Number(v) => write!(f, "{v}"),
            Expr::Const { name, .. } => f.write_str(name),
            Expr::Var(a) => f.write_str(a.name()),
            Expr::StateRef(n) => f.write_str(n),
            Expr::DerivRef { name, axis } => write!(f, "{name}_{}", axis.suffix()),
            Expr::Neg(a) => {
                f.write_str("-")?;
                write_operand(f, a, a.precedence() <= 3)
            }
            Expr::Add(a, b) => binary(f, a, " + ", b),
            Expr::Sub(a, b) => binary(f, a, " - ", b),
            Expr::Mul(a, b) => binary(f, a, "*", b),
            Expr::Div(a, b) => binary(f, a, "/", b),
            Expr::PowInt(a, n) => {
                write_operand(f, a, a.precedence() < 5)?;
                write!(f, "^{n}")
            }
            Expr::Func(func, a) => write!(f, "{func}({a})"),
            Expr::Deriv(axis, a) => write!(f, "D[{}]({a})", axis.suffix()),
        }
    }
}
