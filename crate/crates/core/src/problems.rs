//! The built-in problem suite: every worked example, encoded as a problem
//! file and carrying its exact solution.
//!
//! Each entry is also shipped under `problems/<key>.prob` in the repository,
//! byte-identical to [`BuiltinEntry::file_text`].

use crate::engine::ProblemSpec;
use crate::lang::{emit, parse_problem};

/// What `suite` checks for an entry after running it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Expectation {
    /// Final max-abs error on the default grid lies in `[lo, hi]`.
    MaxAbsWithin(f64, f64),
    /// Max-abs error after sweep `later` is below that after sweep `earlier`.
    Decreases { earlier: usize, later: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct BuiltinEntry {
    pub key: &'static str,
    pub spec: ProblemSpec,
    /// Maximum error reported for the worked example, where one is given.
    pub reference_error: Option<f64>,
    pub expectation: Expectation,
    pub notes: &'static str,
}

impl BuiltinEntry {
    /// Text of the shipped problem file: a comment header and the canonical
    /// problem description.
    pub fn file_text(&self) -> String {
        let mut s = format!("# {}: {}\n", self.key, self.notes);
        if let Some(eps) = self.reference_error {
            s.push_str(&format!("# reference max error after the listed sweeps: {eps}\n"));
        }
        s.push_str(&emit(&self.spec));
        s
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("unknown builtin `{key}`; available: {}", available.join(", "))]
pub struct UnknownBuiltin {
    pub key: String,
    pub available: Vec<&'static str>,
}

pub const KEYS: [&str; 14] = [
    "ex1",
    "ex2-case1",
    "ex2-case2",
    "ex2-case3",
    "ex2-case4",
    "ex2-case5",
    "ex2-case6",
    "ex2-case7",
    "wave",
    "sine-gordon-m01",
    "sine-gordon-m05",
    "sine-gordon-m09",
    "ex5-shooting",
    "ex6-division",
];

fn parse(text: &str) -> ProblemSpec {
    parse_problem(text).unwrap_or_else(|e| panic!("builtin problem does not parse: {e}\n{text}"))
}

const EX1: &str = "\
problem \"ex1\"
evolve t
domain t in [0, 1], x in [0, 1]
degree t=16 x=16
var u: seed = 1 + x; rhs = -u_x + 2 + t + x
correct u: pin x=0 to 1 + t
exact = (1 + t)*(1 + x)
iterations 1
";

/// `(j, A3, A4, A5)` for Cases 1–7; `m = b = A1 = A2 = 1` throughout.
const EX2_CASES: [(i32, f64, f64, f64); 7] = [
    (1, 0.0, 0.0, 0.0),
    (1, -1.0, 0.0, 0.0),
    (2, -1.0, 0.0, 0.0),
    (2, 1.0, 0.0, 0.0),
    (1, 1.0, 0.0, 0.0),
    (1, 0.0, 1.0, -1.0),
    (1, 1.0, 1.0, -1.0),
];

fn ex2(case: usize) -> String {
    let (j, a3, a4, a5) = EX2_CASES[case - 1];
    // A6 = -A5 keeps every power of T and R a non-negative integer.
    let a6 = -a5 + 0.0;
    format!(
        "\
problem \"ex2-case{case}\"
evolve t
domain t in [0, 1], x in [0, 1]
degree t=16 x=16
const m = 1
const b = 1
const j = {j}
const A1 = 1
const A2 = 1
const A3 = {a3}
const A4 = {a4}
const A5 = {a5}
const A6 = {a6}
var u: seed = exp(x); rhs = (-A1*D[x](u^2) + A3*u^j + A4*T^A6 + E)/A2
var v: seed = 1; rhs = v
var T: seed = exp(-exp(x)); rhs = -u_t*T
var P: seed = exp(x); rhs = P
var R: seed = exp(-exp(x)); rhs = -P*R
var E: seed = exp(x)*(A2 + A1/b*(m + 1)*exp(m*x)) - A3*exp(j*x) - A4*exp(-A6*exp(x)); rhs = P*(A2 + A1/b*(m + 1)^2*P^m) - A3*j*P^j + A4*A6*P*R^A6
correct u: pin x=0 to exp(t)
exact = exp(t + x)
iterations 4
"
    )
}

const WAVE: &str = "\
problem \"wave\"
evolve t
domain t in [0, 1], x in [0, 1.5707963267948966]
degree t=16 x=16
var u: seed = cos(x); rhs = v
var v: seed = cos(x); rhs = -u_xx
var U: seed = 1; rhs = U
correct u: blend x in [0, 1.5707963267948966] to exp(t), 0
exact = exp(t)*cos(x)
iterations 4
";

fn sine_gordon(m: f64, tag: &str) -> String {
    format!(
        "\
problem \"sine-gordon-{tag}\"
evolve x
domain t in [0, 1], x in [0, 1]
degree t=16 x=16
expand t at 0.5
const m = {m}
var u: seed = -4*atan(m/sqrt(1 - m^2)*sin(sqrt(1 - m^2)*t)); rhs = v
var v: seed = 0; rhs = u_tt + U
var U: seed = sin(-4*atan(m/sqrt(1 - m^2)*sin(sqrt(1 - m^2)*t))); rhs = v*V
var V: seed = cos(-4*atan(m/sqrt(1 - m^2)*sin(sqrt(1 - m^2)*t))); rhs = -v*U
correct u: blend t in [0, 1] to 0, -4*atan(m/sqrt(1 - m^2)*sin(sqrt(1 - m^2))/cosh(m*x))
exact = -4*atan(m/sqrt(1 - m^2)*sin(sqrt(1 - m^2)*t)/cosh(m*x))
iterations 4
"
    )
}

const EX5: &str = "\
problem \"ex5-shooting\"
evolve x
domain t in [0, 1], x in [0, 1]
degree t=16 x=16
expand x at 0.5
var u: seed = t + 2; rhs = v
var v: seed = -(t + 2)/2; rhs = -2*u_t*v
correct u: pin t=0 to 2/(x + 1)
shoot v: slope of u over x in [0, 1] targets t + 2, (2 + t)/2
exact = (2 + t)/(1 + x)
iterations 4
";

const EX6: &str = "\
problem \"ex6-division\"
evolve t
domain t in [0, 1], x in [0, 1]
degree t=16 x=40
expand x at 0.5
var u: seed = 2/(x + 1); rhs = -u_xx/(2*u_x)
correct u: blend x in [0, 1] to t + 2, (2 + t)/2
exact = (2 + t)/(1 + x)
iterations 2
";

/// Looks up a builtin by key.
pub fn load_builtin(key: &str) -> Result<BuiltinEntry, UnknownBuiltin> {
    let entry = |text: &str, reference_error, expectation, notes| BuiltinEntry {
        key: KEYS.iter().find(|k| **k == key).copied().unwrap_or(""),
        spec: parse(text),
        reference_error,
        expectation,
        notes,
    };
    let decreases = Expectation::Decreases { earlier: 2, later: 4 };
    Ok(match key {
        "ex1" => entry(
            EX1,
            None,
            Expectation::MaxAbsWithin(0.0, 1e-12),
            "linear first-order problem, exact after one sweep",
        ),
        "ex2-case1" => entry(
            &ex2(1),
            Some(0.00439),
            Expectation::MaxAbsWithin(0.001, 0.015),
            "nonlinear first-order problem with auxiliary variables v, T, P, R, E; case 1",
        ),
        k if k.starts_with("ex2-case") => {
            let case: usize = k["ex2-case".len()..].parse().ok().filter(|c| (2..=7).contains(c)).ok_or_else(
                || UnknownBuiltin {
                    key: key.to_string(),
                    available: KEYS.to_vec(),
                },
            )?;
            entry(
                &ex2(case),
                None,
                decreases,
                "nonlinear first-order problem with auxiliary variables v, T, P, R, E",
            )
        }
        "wave" => entry(
            WAVE,
            Some(0.0003),
            Expectation::MaxAbsWithin(0.0, 3e-3),
            "u_tt = -u_xx reduced to (u, v), two-point blend in x",
        ),
        "sine-gordon-m01" => entry(
            &sine_gordon(0.1, "m01"),
            Some(0.010),
            Expectation::MaxAbsWithin(0.0, 0.03),
            "sine-Gordon breather, m = 0.1, evolution in x, blend in t",
        ),
        "sine-gordon-m05" => entry(
            &sine_gordon(0.5, "m05"),
            Some(0.05),
            Expectation::MaxAbsWithin(0.0, 0.15),
            "sine-Gordon breather, m = 0.5, evolution in x, blend in t",
        ),
        "sine-gordon-m09" => entry(
            &sine_gordon(0.9, "m09"),
            Some(0.12),
            Expectation::MaxAbsWithin(0.0, 0.36),
            "sine-Gordon breather, m = 0.9, evolution in x, blend in t",
        ),
        "ex5-shooting" => entry(
            EX5,
            Some(0.010),
            Expectation::MaxAbsWithin(0.0, 0.03),
            "u_xx = -2 u_t u_x with unknown initial slope refit each sweep",
        ),
        "ex6-division" => entry(
            EX6,
            None,
            Expectation::MaxAbsWithin(0.0, 1e-9),
            "u_t = -u_xx/(2 u_x), needs series division",
        ),
        _ => {
            return Err(UnknownBuiltin {
                key: key.to_string(),
                available: KEYS.to_vec(),
            })
        }
    })
}

/// Every builtin, in [`KEYS`] order.
pub fn all_builtins() -> Vec<BuiltinEntry> {
    KEYS.iter()
        .map(|k| load_builtin(k).expect("every listed key loads"))
        .collect()
}
