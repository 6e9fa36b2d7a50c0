use std::collections::{HashMap, HashSet};

use super::EngineError;
use crate::lang::Expr;
use crate::series::Axis;

/// Closed interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Interval { lo, hi }
    }

    pub fn contains(&self, v: f64) -> bool {
        v >= self.lo && v <= self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    /// `n` equally spaced points covering the closed interval.
    pub fn samples(&self, n: usize) -> Vec<f64> {
        if n == 1 {
            return vec![self.lo];
        }
        (0..n)
            .map(|k| {
                if k == n - 1 {
                    self.hi
                } else {
                    self.lo + self.width() * k as f64 / (n - 1) as f64
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domain {
    pub t: Interval,
    pub x: Interval,
}

impl Domain {
    pub fn unit() -> Self {
        Domain {
            t: Interval::new(0.0, 1.0),
            x: Interval::new(0.0, 1.0),
        }
    }

    pub fn along(&self, axis: Axis) -> Interval {
        match axis {
            Axis::T => self.t,
            Axis::X => self.x,
        }
    }
}

/// One state variable: its initial data (a function of the non-evolution
/// coordinate) and its right-hand side.
#[derive(Debug, Clone, PartialEq)]
pub struct VarSpec {
    pub name: String,
    pub seed: Expr,
    pub rhs: Expr,
}

impl VarSpec {
    pub fn new(name: impl Into<String>, seed: Expr, rhs: Expr) -> Self {
        VarSpec {
            name: name.into(),
            seed,
            rhs,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CorrectionKind {
    /// `u ← u − (u|_{axis=point} − target)`.
    Pin { point: f64, target: Expr },
    /// `u ← u − ℓ_b·(u|_{b} − β) − ℓ_a·(u|_{a} − α)` with `ℓ_a`, `ℓ_b` the
    /// linear interpolation weights between `a` and `b` along `axis`.
    Blend { a: f64, b: f64, alpha: Expr, beta: Expr },
}

/// A boundary condition enforced after every sweep. Targets are functions
/// of the coordinate other than `axis`.
#[derive(Debug, Clone, PartialEq)]
pub struct Correction {
    pub var: String,
    pub axis: Axis,
    pub kind: CorrectionKind,
}

/// Unknown initial slope of a second-order problem reduced to `(u, v)`.
///
/// `slope_var` (`v = u'`) starts each sweep from `γ`, which is refit after
/// the sweep so that `u` reaches `beta` at `b` given `alpha` at `a`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShootingSpec {
    pub slope_var: String,
    pub primary_var: String,
    pub axis: Axis,
    pub a: f64,
    pub b: f64,
    pub alpha: Expr,
    pub beta: Expr,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    pub name: String,
    pub evolution: Axis,
    pub domain: Domain,
    /// Truncation orders `(deg_t, deg_x)`.
    pub degrees: (usize, usize),
    /// Expansion points `(t, x)`; the lower end of the interval when `None`.
    /// Integrals along the evolution axis always start at its lower end.
    pub expand: (Option<f64>, Option<f64>),
    pub constants: Vec<(String, f64)>,
    pub vars: Vec<VarSpec>,
    pub corrections: Vec<Correction>,
    pub shooting: Option<ShootingSpec>,
    /// Exact solution for the first declared variable, if known.
    pub exact: Option<Expr>,
    pub iterations: usize,
}

impl ProblemSpec {
    /// A problem with no variables on the unit square at degrees 16/16.
    pub fn new(name: impl Into<String>, evolution: Axis) -> Self {
        ProblemSpec {
            name: name.into(),
            evolution,
            domain: Domain::unit(),
            degrees: (16, 16),
            expand: (None, None),
            constants: Vec::new(),
            vars: Vec::new(),
            corrections: Vec::new(),
            shooting: None,
            exact: None,
            iterations: 1,
        }
    }

    pub fn constant_table(&self) -> HashMap<String, f64> {
        self.constants.iter().cloned().collect()
    }

    pub fn deg(&self, axis: Axis) -> usize {
        match axis {
            Axis::T => self.degrees.0,
            Axis::X => self.degrees.1,
        }
    }

    pub fn expand_along(&self, axis: Axis) -> Option<f64> {
        match axis {
            Axis::T => self.expand.0,
            Axis::X => self.expand.1,
        }
    }

    /// Absolute `(t, x)` of the expansion point.
    pub fn origin(&self) -> (f64, f64) {
        (self.origin_along(Axis::T), self.origin_along(Axis::X))
    }

    pub fn origin_along(&self, axis: Axis) -> f64 {
        self.expand_along(axis).unwrap_or(self.domain.along(axis).lo)
    }

    /// Converts an absolute coordinate on `axis` to a local one.
    pub fn local(&self, axis: Axis, value: f64) -> f64 {
        value - self.origin_along(axis)
    }

    /// Name of the variable the exact solution and error grids refer to.
    pub fn primary_var(&self) -> Option<&str> {
        self.vars.first().map(|v| v.name.as_str())
    }

    pub fn var(&self, name: &str) -> Option<&VarSpec> {
        self.vars.iter().find(|v| v.name == name)
    }

    pub fn validate(&self) -> Result<(), EngineError> {
        let bad = |m: String| Err(EngineError::Invalid(m));
        if self.iterations == 0 {
            return bad("iterations must be at least 1".into());
        }
        for axis in [Axis::T, Axis::X] {
            let iv = self.domain.along(axis);
            if !(iv.lo.is_finite() && iv.hi.is_finite() && iv.lo < iv.hi) {
                return bad(format!("domain for {axis} must be a finite interval with lo < hi"));
            }
            if self.deg(axis) == 0 {
                return bad(format!("degree in {axis} must be at least 1"));
            }
        }
        for axis in [Axis::T, Axis::X] {
            if let Some(p) = self.expand_along(axis) {
                if !self.domain.along(axis).contains(p) {
                    return bad(format!("expansion point {axis}={p} lies outside the domain"));
                }
            }
        }
        if self.vars.is_empty() {
            return bad("no variables declared".into());
        }
        let mut names = HashSet::new();
        let consts: HashSet<&str> = self.constants.iter().map(|(n, _)| n.as_str()).collect();
        for (name, value) in &self.constants {
            if !value.is_finite() {
                return bad(format!("constant `{name}` is not finite"));
            }
        }
        if consts.len() != self.constants.len() {
            return bad("constant declared twice".into());
        }
        for v in &self.vars {
            if !names.insert(v.name.as_str()) {
                return bad(format!("variable `{}` declared twice", v.name));
            }
            if matches!(v.name.as_str(), "t" | "x" | "pi") || consts.contains(v.name.as_str()) {
                return bad(format!("variable name `{}` is reserved", v.name));
            }
        }
        for v in &self.vars {
            for n in v.rhs.state_names() {
                if !names.contains(n.as_str()) {
                    return bad(format!("right-hand side of `{}` refers to undeclared `{n}`", v.name));
                }
            }
            check_data(&v.seed, self.evolution, &format!("seed of `{}`", v.name))?;
        }
        for c in &self.corrections {
            if !names.contains(c.var.as_str()) {
                return bad(format!("correction targets undeclared `{}`", c.var));
            }
            let iv = self.domain.along(c.axis);
            let what = format!("correction of `{}`", c.var);
            match &c.kind {
                CorrectionKind::Pin { point, target } => {
                    if !iv.contains(*point) {
                        return bad(format!("{what}: point {point} lies outside the domain"));
                    }
                    check_data(target, c.axis, &what)?;
                }
                CorrectionKind::Blend { a, b, alpha, beta } => {
                    if a == b {
                        return bad(format!("{what}: blend endpoints coincide"));
                    }
                    if !iv.contains(*a) || !iv.contains(*b) {
                        return bad(format!("{what}: blend endpoints lie outside the domain"));
                    }
                    check_data(alpha, c.axis, &what)?;
                    check_data(beta, c.axis, &what)?;
                }
            }
        }
        if let Some(sh) = &self.shooting {
            for n in [&sh.slope_var, &sh.primary_var] {
                if !names.contains(n.as_str()) {
                    return bad(format!("shooting refers to undeclared `{n}`"));
                }
            }
            if sh.slope_var == sh.primary_var {
                return bad("shooting slope and primary variable must differ".into());
            }
            if sh.axis != self.evolution {
                return bad("shooting must run along the evolution axis".into());
            }
            let iv = self.domain.along(sh.axis);
            if sh.a == sh.b || !iv.contains(sh.a) || !iv.contains(sh.b) {
                return bad("shooting interval must be non-degenerate and inside the domain".into());
            }
            check_data(&sh.alpha, sh.axis, "shooting target")?;
            check_data(&sh.beta, sh.axis, "shooting target")?;
        }
        if let Some(exact) = &self.exact {
            if let Some(n) = exact.state_names().first() {
                return bad(format!("exact solution refers to state `{n}`"));
            }
            if exact.any(|e| matches!(e, Expr::Deriv(..))) {
                return bad("exact solution may not contain derivatives".into());
            }
        }
        Ok(())
    }
}

/// Seeds and boundary targets are functions of the coordinate other than
/// `excluded` and may not mention state.
fn check_data(e: &Expr, excluded: Axis, what: &str) -> Result<(), EngineError> {
    if let Some(n) = e.state_names().first() {
        return Err(EngineError::Invalid(format!("{what} refers to state `{n}`")));
    }
    if e.uses_var(excluded) {
        return Err(EngineError::Invalid(format!("{what} may not depend on {excluded}")));
    }
    Ok(())
}
