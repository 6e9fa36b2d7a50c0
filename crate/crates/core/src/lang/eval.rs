use std::collections::{BTreeMap, HashMap};

use super::ast::{DerivAxis, Expr};
use crate::series::{AnalyticFn, Axis, Series1, Series2, SeriesError, TruncationCounter};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("unbound name `{0}`")]
    Unbound(String),
    #[error("derivative `{0}` cannot be evaluated pointwise")]
    DerivativeNotAllowed(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("non-finite value from `{0}`")]
    NonFinite(String),
    #[error("`{0}` in a right-hand side: introduce an auxiliary variable for it")]
    ForbiddenFunction(AnalyticFn),
    #[error("expression depends on `{found}` but is expanded in `{expected}`")]
    WrongAxis { found: Axis, expected: Axis },
    #[error("state variable `{0}` may not appear here")]
    StateNotAllowed(String),
    #[error("right-hand side substitution `{0}` is nested or cyclic")]
    Substitution(String),
    #[error("{context}: {source}")]
    Series {
        context: String,
        #[source]
        source: SeriesError,
    },
}

fn series_err(context: &Expr) -> impl FnOnce(SeriesError) -> EvalError + '_ {
    move |source| EvalError::Series {
        context: context.to_string(),
        source,
    }
}

/// Pointwise IEEE evaluation at absolute coordinates `(t, x)`.
///
/// State references are looked up in `state`; derivative references and
/// `D[..]` nodes are rejected.
pub fn eval_numeric(e: &Expr, t: f64, x: f64, state: &HashMap<String, f64>) -> Result<f64, EvalError> {
    let rec = |a: &Expr| eval_numeric(a, t, x, state);
    let v = match e {
        Expr::Number(v) => *v,
        Expr::Const { value, .. } => *value,
        Expr::Var(Axis::T) => t,
        Expr::Var(Axis::X) => x,
        Expr::StateRef(n) => *state.get(n).ok_or_else(|| EvalError::Unbound(n.clone()))?,
        Expr::DerivRef { .. } | Expr::Deriv(..) => return Err(EvalError::DerivativeNotAllowed(e.to_string())),
        Expr::Neg(a) => -rec(a)?,
        Expr::Add(a, b) => rec(a)? + rec(b)?,
        Expr::Sub(a, b) => rec(a)? - rec(b)?,
        Expr::Mul(a, b) => rec(a)? * rec(b)?,
        Expr::Div(a, b) => {
            let d = rec(b)?;
            if d == 0.0 {
                return Err(EvalError::DivisionByZero);
            }
            rec(a)? / d
        }
        Expr::PowInt(a, n) => rec(a)?.powi(*n as i32),
        Expr::Func(f, a) => f.apply(rec(a)?),
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(EvalError::NonFinite(e.to_string()))
    }
}

/// Expands an expression of one coordinate into a truncated series about
/// the absolute position `origin` on `axis`.
pub fn expand_seed(e: &Expr, axis: Axis, deg: usize, origin: f64) -> Result<Series1, EvalError> {
    let rec = |a: &Expr| expand_seed(a, axis, deg, origin);
    Ok(match e {
        Expr::Number(v) | Expr::Const { value: v, .. } => Series1::constant(axis, deg, *v),
        Expr::Var(a) if *a == axis => Series1::variable(axis, deg, origin),
        Expr::Var(a) => {
            return Err(EvalError::WrongAxis {
                found: *a,
                expected: axis,
            })
        }
        Expr::StateRef(n) | Expr::DerivRef { name: n, .. } => return Err(EvalError::StateNotAllowed(n.clone())),
        Expr::Neg(a) => rec(a)?.neg(),
        Expr::Add(a, b) => rec(a)?.add(&rec(b)?).map_err(series_err(e))?,
        Expr::Sub(a, b) => rec(a)?.sub(&rec(b)?).map_err(series_err(e))?,
        Expr::Mul(a, b) => rec(a)?.mul(&rec(b)?).map_err(series_err(e))?,
        Expr::Div(a, b) => {
            let den = rec(b)?.recip().map_err(series_err(b))?;
            rec(a)?.mul(&den).map_err(series_err(e))?
        }
        Expr::PowInt(a, n) => rec(a)?.powi(*n as i64).map_err(series_err(e))?,
        Expr::Func(f, a) => rec(a)?.analytic(*f).map_err(series_err(e))?,
        Expr::Deriv(d, a) => {
            let (nt, nx) = d.orders();
            let (along, across) = match axis {
                Axis::T => (nt, nx),
                Axis::X => (nx, nt),
            };
            let inner = rec(a)?;
            if across > 0 {
                // The seed is constant in the other coordinate.
                Series1::zero(axis, deg)
            } else {
                (0..along).fold(inner, |s, _| s.diff())
            }
        }
    })
}

/// Everything a right-hand side needs besides the expression itself.
#[derive(Debug, Clone, Copy)]
pub struct RhsContext<'a> {
    /// Current iterate of every state variable.
    pub env: &'a BTreeMap<String, Series2>,
    pub evolution: Axis,
    /// Right-hand side of every state variable, for evolution derivatives.
    pub rhs_table: &'a HashMap<String, Expr>,
    /// Absolute `(t, x)` of the expansion point.
    pub origin: (f64, f64),
    pub degrees: (usize, usize),
}

/// Evaluates a right-hand side over the current iterates.
///
/// A derivative reference along the evolution axis (`u_t` when evolving in
/// `t`) stands for that variable's own right-hand side, substituted one
/// level deep. Every other derivative reference differentiates the iterate.
/// Transcendental functions are rejected: they must be carried by auxiliary
/// state variables.
pub fn eval_rhs(e: &Expr, ctx: &RhsContext<'_>, counter: &mut TruncationCounter) -> Result<Series2, EvalError> {
    let mut chain = Vec::new();
    rhs_rec(e, ctx, counter, &mut chain)
}

fn rhs_rec(
    e: &Expr,
    ctx: &RhsContext<'_>,
    counter: &mut TruncationCounter,
    chain: &mut Vec<String>,
) -> Result<Series2, EvalError> {
    let (dt, dx) = ctx.degrees;
    let lookup = |n: &String| ctx.env.get(n).ok_or_else(|| EvalError::Unbound(n.clone()));
    Ok(match e {
        Expr::Number(v) | Expr::Const { value: v, .. } => Series2::constant(dt, dx, *v),
        Expr::Var(a) => {
            let offset = match a {
                Axis::T => ctx.origin.0,
                Axis::X => ctx.origin.1,
            };
            Series2::variable(dt, dx, *a, offset)
        }
        Expr::StateRef(n) => lookup(n)?.clone(),
        Expr::DerivRef { name, axis } if axis.single() == Some(ctx.evolution) => {
            if !chain.is_empty() {
                return Err(EvalError::Substitution(format!("{} -> {name}", chain.join(" -> "))));
            }
            let rhs = ctx
                .rhs_table
                .get(name)
                .ok_or_else(|| EvalError::Unbound(name.clone()))?;
            chain.push(name.clone());
            let out = rhs_rec(rhs, ctx, counter, chain);
            chain.pop();
            out?
        }
        Expr::DerivRef { name, axis } => differentiate(lookup(name)?, *axis),
        Expr::Neg(a) => rhs_rec(a, ctx, counter, chain)?.neg(),
        Expr::Add(a, b) => {
            let l = rhs_rec(a, ctx, counter, chain)?;
            l.add(&rhs_rec(b, ctx, counter, chain)?).map_err(series_err(e))?
        }
        Expr::Sub(a, b) => {
            let l = rhs_rec(a, ctx, counter, chain)?;
            l.sub(&rhs_rec(b, ctx, counter, chain)?).map_err(series_err(e))?
        }
        Expr::Mul(a, b) => {
            let l = rhs_rec(a, ctx, counter, chain)?;
            l.mul_counted(&rhs_rec(b, ctx, counter, chain)?, counter).map_err(series_err(e))?
        }
        Expr::Div(a, b) => {
            let l = rhs_rec(a, ctx, counter, chain)?;
            let den = rhs_rec(b, ctx, counter, chain)?.recip().map_err(series_err(b))?;
            l.mul_counted(&den, counter).map_err(series_err(e))?
        }
        Expr::PowInt(a, n) => {
            let base = rhs_rec(a, ctx, counter, chain)?;
            if let Some((st, sx)) = base.support() {
                let n = *n as usize;
                if n >= 2 && (st * n > dt || sx * n > dx) {
                    counter.add(1);
                }
            }
            base.powi(*n as i64).map_err(series_err(e))?
        }
        Expr::Func(f, _) => return Err(EvalError::ForbiddenFunction(*f)),
        Expr::Deriv(d, a) => differentiate(&rhs_rec(a, ctx, counter, chain)?, *d),
    })
}

fn differentiate(s: &Series2, d: DerivAxis) -> Series2 {
    let (nt, nx) = d.orders();
    s.diff_n(Axis::T, nt).diff_n(Axis::X, nx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse_expr;

    fn p(s: &str) -> Expr {
        parse_expr(s, &HashMap::from([("m".to_string(), 0.1)])).unwrap()
    }

    #[test]
    fn numeric_values() {
        let none = HashMap::new();
        assert_eq!(eval_numeric(&p("(2+t)/(1+x)"), 1.0, 1.0, &none).unwrap(), 1.5);
        assert_eq!(eval_numeric(&p("exp(t)*cos(x)"), 0.0, 0.0, &none).unwrap(), 1.0);
        let sg = p("-4*atan((m/sqrt(1-m^2))*sin(sqrt(1-m^2)*t)/cosh(m*x))");
        assert_eq!(eval_numeric(&sg, 0.0, 0.7, &none).unwrap().abs(), 0.0);
    }

    #[test]
    fn numeric_errors() {
        let none = HashMap::new();
        assert_eq!(eval_numeric(&p("u + 1"), 0.0, 0.0, &none), Err(EvalError::Unbound("u".into())));
        assert!(matches!(
            eval_numeric(&p("u_x"), 0.0, 0.0, &none),
            Err(EvalError::DerivativeNotAllowed(_))
        ));
        assert_eq!(eval_numeric(&p("1/x"), 0.0, 0.0, &none), Err(EvalError::DivisionByZero));
        assert!(matches!(
            eval_numeric(&p("sqrt(x)"), 0.0, -1.0, &none),
            Err(EvalError::NonFinite(_))
        ));
        let st = HashMap::from([("u".to_string(), 2.0)]);
        assert_eq!(eval_numeric(&p("u^3 - t"), 1.0, 0.0, &st).unwrap(), 7.0);
    }

    #[test]
    fn cos_seed() {
        let s = expand_seed(&p("cos(x)"), Axis::X, 4, 0.0).unwrap();
        let want = [1.0, 0.0, -0.5, 0.0, 1.0 / 24.0];
        for (a, b) in s.coeffs().iter().zip(want) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn geometric_seed() {
        let s = expand_seed(&p("2/(x+1)"), Axis::X, 3, 0.0).unwrap();
        assert_eq!(s.coeffs(), &[2.0, -2.0, 2.0, -2.0]);
    }

    #[test]
    fn double_exponential_seed_matches_finite_differences() {
        // Oracle: central differences of exp(-exp(x)) at 0.
        let f = |x: f64| (-(x.exp())).exp();
        let h = 1e-3;
        let d1 = (f(h) - f(-h)) / (2.0 * h);
        let d2 = (f(h) - 2.0 * f(0.0) + f(-h)) / (h * h);
        let s = expand_seed(&p("exp(-exp(x))"), Axis::X, 2, 0.0).unwrap();
        assert!((s.coeff(0) - f(0.0)).abs() < 1e-12);
        assert!((s.coeff(1) - d1).abs() < 1e-6);
        assert!((s.coeff(2) - d2 / 2.0).abs() < 1e-6);
    }

    #[test]
    fn seed_about_shifted_origin() {
        let s = expand_seed(&p("x^2"), Axis::X, 2, 1.0).unwrap();
        assert_eq!(s.coeffs(), &[1.0, 2.0, 1.0]);
    }

    #[test]
    fn seed_errors() {
        assert!(matches!(
            expand_seed(&p("t + x"), Axis::X, 3, 0.0),
            Err(EvalError::WrongAxis { .. })
        ));
        assert!(matches!(
            expand_seed(&p("u"), Axis::X, 3, 0.0),
            Err(EvalError::StateNotAllowed(_))
        ));
        assert!(matches!(
            expand_seed(&p("1/x"), Axis::X, 3, 0.0),
            Err(EvalError::Series {
                source: SeriesError::SingularDivision { .. },
                ..
            })
        ));
        assert!(matches!(
            expand_seed(&p("sqrt(x - 1)"), Axis::X, 3, 0.0),
            Err(EvalError::Series {
                source: SeriesError::SqrtDomain { .. },
                ..
            })
        ));
    }

    struct Fixture {
        env: BTreeMap<String, Series2>,
        rhs: HashMap<String, Expr>,
    }

    impl Fixture {
        fn ctx(&self, evolution: Axis, deg: usize) -> RhsContext<'_> {
            RhsContext {
                env: &self.env,
                evolution,
                rhs_table: &self.rhs,
                origin: (0.0, 0.0),
                degrees: (deg, deg),
            }
        }
    }

    #[test]
    fn first_example_seed_integrand() {
        let fx = Fixture {
            env: BTreeMap::from([("u".to_string(), Series2::variable(4, 4, Axis::X, 1.0))]),
            rhs: HashMap::new(),
        };
        let mut c = TruncationCounter::default();
        let got = eval_rhs(&p("-u_x + 2 + t + x"), &fx.ctx(Axis::T, 4), &mut c).unwrap();
        assert_eq!(got, Series2::from_rows(4, 4, &[vec![1.0, 1.0], vec![1.0]]));
    }

    #[test]
    fn cross_derivative_on_shooting_seed() {
        // u = t + 2, v = -(t + 2)/2, evolving in x: -2·u_t·v = t + 2.
        let fx = Fixture {
            env: BTreeMap::from([
                ("u".to_string(), Series2::variable(4, 4, Axis::T, 2.0)),
                ("v".to_string(), Series2::variable(4, 4, Axis::T, 2.0).scale(-0.5)),
            ]),
            rhs: HashMap::new(),
        };
        let mut c = TruncationCounter::default();
        let got = eval_rhs(&p("-2*u_t*v"), &fx.ctx(Axis::X, 4), &mut c).unwrap();
        assert_eq!(got, Series2::variable(4, 4, Axis::T, 2.0));
    }

    #[test]
    fn quotient_of_derivatives() {
        // u = 2/(1+x): -u_xx/(2 u_x) at x = 0 is -(4)/(2·-2) = 1.
        let u = expand_seed(&p("2/(1+x)"), Axis::X, 20, 0.0).unwrap();
        let fx = Fixture {
            env: BTreeMap::from([("u".to_string(), Series2::lift(&u, 2, 20))]),
            rhs: HashMap::new(),
        };
        let mut c = TruncationCounter::default();
        let mut ctx = fx.ctx(Axis::T, 20);
        ctx.degrees = (2, 20);
        let got = eval_rhs(&p("-D[xx](u)/(2*D[x](u))"), &ctx, &mut c).unwrap();
        assert!((got.eval_point(0.0, 0.0) - 1.0).abs() < 1e-8);
        // and it is 1/(1+x) through the lower degrees
        assert!((got.get(0, 3) + 1.0).abs() < 1e-8);
    }

    #[test]
    fn evolution_derivative_substitutes_rhs() {
        let fx = Fixture {
            env: BTreeMap::from([
                ("u".to_string(), Series2::constant(3, 3, 2.0)),
                ("T".to_string(), Series2::constant(3, 3, 3.0)),
            ]),
            rhs: HashMap::from([("u".to_string(), p("5*u")), ("T".to_string(), p("-u_t*T"))]),
        };
        let mut c = TruncationCounter::default();
        let got = eval_rhs(&p("-u_t*T"), &fx.ctx(Axis::T, 3), &mut c).unwrap();
        assert_eq!(got, Series2::constant(3, 3, -30.0));
        // evolving in x, u_t is a genuine derivative of the constant iterate
        let got = eval_rhs(&p("-u_t*T"), &fx.ctx(Axis::X, 3), &mut c).unwrap();
        assert_eq!(got.max_abs_coeff(), 0.0);
    }

    #[test]
    fn substitution_cycles_are_rejected() {
        let fx = Fixture {
            env: BTreeMap::from([
                ("u".to_string(), Series2::constant(2, 2, 1.0)),
                ("w".to_string(), Series2::constant(2, 2, 1.0)),
            ]),
            rhs: HashMap::from([("u".to_string(), p("w_t")), ("w".to_string(), p("u_t"))]),
        };
        let mut c = TruncationCounter::default();
        assert!(matches!(
            eval_rhs(&p("u_t"), &fx.ctx(Axis::T, 2), &mut c),
            Err(EvalError::Substitution(_))
        ));
    }

    #[test]
    fn transcendental_in_rhs_is_rejected() {
        let fx = Fixture {
            env: BTreeMap::from([("u".to_string(), Series2::constant(2, 2, 1.0))]),
            rhs: HashMap::new(),
        };
        let mut c = TruncationCounter::default();
        let err = eval_rhs(&p("sin(u)"), &fx.ctx(Axis::X, 2), &mut c).unwrap_err();
        assert_eq!(err, EvalError::ForbiddenFunction(AnalyticFn::Sin));
        assert!(err.to_string().contains("introduce an auxiliary variable"));
    }

    #[test]
    fn singular_division_in_rhs() {
        let fx = Fixture {
            env: BTreeMap::from([("u".to_string(), Series2::variable(2, 2, Axis::X, 0.0))]),
            rhs: HashMap::new(),
        };
        let mut c = TruncationCounter::default();
        let err = eval_rhs(&p("1/u"), &fx.ctx(Axis::T, 2), &mut c).unwrap_err();
        assert!(matches!(err, EvalError::Series { ref context, .. } if context == "u"));
    }
}
