//! The iteration scheme: seed every variable, then repeatedly integrate the
//! right-hand sides along the evolution axis, rewrite the iterates so the
//! boundary conditions hold, and refit the unknown initial slope if the
//! problem shoots for one.

mod spec;

use std::collections::{BTreeMap, HashMap};

pub use spec::{Correction, CorrectionKind, Domain, Interval, ProblemSpec, ShootingSpec, VarSpec};

use crate::lang::{eval_rhs, expand_seed, EvalError, Expr, RhsContext};
use crate::series::{Axis, Series1, Series2, TruncationCounter};

/// Current iterate of every variable, keyed by name.
pub type State = BTreeMap<String, Series2>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EngineError {
    #[error("invalid problem: {0}")]
    Invalid(String),
    #[error("seed of `{var}`: {source}")]
    Seed { var: String, source: EvalError },
    #[error("right-hand side of `{var}`: {source}")]
    Rhs { var: String, source: EvalError },
    #[error("boundary target for `{var}`: {source}")]
    Target { var: String, source: EvalError },
    #[error("shooting update: {0}")]
    Shooting(EvalError),
    #[error("`{var}` has non-finite coefficients")]
    NonFinite { var: String },
    #[error("sweep {index}: {source}")]
    Sweep {
        index: usize,
        #[source]
        source: Box<EngineError>,
    },
}

/// How a sweep sees the variables it has already updated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SweepMode {
    /// Later variables use the values updated earlier in the same sweep.
    #[default]
    GaussSeidel,
    /// Every right-hand side sees only the previous sweep.
    Jacobi,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    pub mode: SweepMode,
}

/// Iterates plus the shooting slope, if any.
#[derive(Debug, Clone, PartialEq)]
pub struct IterState {
    pub vars: State,
    pub gamma: Option<Series1>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutcome {
    pub state: IterState,
    /// Max-abs coefficient of each correction's residual, before correcting.
    pub residuals: Vec<f64>,
    pub dropped: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    /// 1-based sweep number.
    pub index: usize,
    pub residuals: Vec<f64>,
    pub gamma: Option<Series1>,
    pub dropped: u64,
    pub vars: State,
}

impl SweepRecord {
    /// Largest residual over all corrections, zero if there are none.
    pub fn residual_norm(&self) -> f64 {
        self.residuals.iter().fold(0.0, |m, &r| m.max(r))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub problem: String,
    pub primary: String,
    pub initial: IterState,
    pub sweeps: Vec<SweepRecord>,
    pub truncation_drops: u64,
}

impl RunReport {
    pub fn final_vars(&self) -> &State {
        &self.sweeps.last().expect("a run has at least one sweep").vars
    }

    pub fn final_series(&self, name: &str) -> Option<&Series2> {
        self.final_vars().get(name)
    }

    /// Final iterate of the first declared variable.
    pub fn primary_final(&self) -> &Series2 {
        &self.final_vars()[&self.primary]
    }

    pub fn final_gamma(&self) -> Option<&Series1> {
        self.sweeps.last().and_then(|s| s.gamma.as_ref())
    }
}

fn expand_target(p: &ProblemSpec, e: &Expr, axis: Axis, var: &str) -> Result<Series1, EngineError> {
    expand_seed(e, axis, p.deg(axis), p.origin_along(axis)).map_err(|source| EngineError::Target {
        var: var.to_string(),
        source,
    })
}

fn lift(p: &ProblemSpec, s: &Series1) -> Series2 {
    Series2::lift(s, p.degrees.0, p.degrees.1)
}

fn seed_series(p: &ProblemSpec, v: &VarSpec) -> Result<Series2, EngineError> {
    let across = p.evolution.other();
    let s = expand_seed(&v.seed, across, p.deg(across), p.origin_along(across)).map_err(|source| {
        EngineError::Seed {
            var: v.name.clone(),
            source,
        }
    })?;
    Ok(lift(p, &s))
}

/// Straight-line slope `(β − α)/(b − a)` in the non-evolution axis.
fn secant_slope(p: &ProblemSpec, sh: &ShootingSpec) -> Result<Series1, EngineError> {
    let across = sh.axis.other();
    let alpha = expand_target(p, &sh.alpha, across, &sh.primary_var)?;
    let beta = expand_target(p, &sh.beta, across, &sh.primary_var)?;
    Ok(beta.sub(&alpha).expect("targets share axis and degree").scale(1.0 / (sh.b - sh.a)))
}

/// Initial iterates: every seed expanded and lifted. With shooting, the
/// slope variable starts from the secant slope and `γ⁰` is one shooting
/// update on the seeds.
pub fn seed_state(p: &ProblemSpec) -> Result<IterState, EngineError> {
    p.validate()?;
    let mut vars = State::new();
    for v in &p.vars {
        vars.insert(v.name.clone(), seed_series(p, v)?);
    }
    let gamma = match &p.shooting {
        Some(sh) => {
            vars.insert(sh.slope_var.clone(), lift(p, &secant_slope(p, sh)?));
            Some(shooting_update(sh, &vars, p)?)
        }
        None => None,
    };
    Ok(IterState { vars, gamma })
}

fn rhs_table(p: &ProblemSpec) -> HashMap<String, Expr> {
    p.vars.iter().map(|v| (v.name.clone(), v.rhs.clone())).collect()
}

fn context<'a>(p: &ProblemSpec, env: &'a State, table: &'a HashMap<String, Expr>) -> RhsContext<'a> {
    RhsContext {
        env,
        evolution: p.evolution,
        rhs_table: table,
        origin: p.origin(),
        degrees: p.degrees,
    }
}

/// `∫_a^h` along the evolution axis, where `a` is the lower end of its
/// interval; the plain antiderivative when `a` is the expansion point.
fn integral_from_lower(p: &ProblemSpec, s: &Series2, counter: &mut TruncationCounter) -> Series2 {
    let axis = p.evolution;
    let f = s.integrate_counted(axis, counter);
    let a = p.local(axis, p.domain.along(axis).lo);
    if a == 0.0 {
        return f;
    }
    f.sub(&lift(p, &f.eval_axis(axis, a))).expect("same degrees")
}

/// One Picard sweep followed by every correction and the shooting update.
pub fn picard_sweep(p: &ProblemSpec, state: &IterState) -> Result<SweepOutcome, EngineError> {
    picard_sweep_with(p, state, SweepMode::GaussSeidel)
}

pub fn picard_sweep_with(p: &ProblemSpec, state: &IterState, mode: SweepMode) -> Result<SweepOutcome, EngineError> {
    let table = rhs_table(p);
    let mut counter = TruncationCounter::default();
    let mut next = state.vars.clone();
    for v in &p.vars {
        let env = match mode {
            SweepMode::GaussSeidel => &next,
            SweepMode::Jacobi => &state.vars,
        };
        let integrand = eval_rhs(&v.rhs, &context(p, env, &table), &mut counter).map_err(|source| {
            EngineError::Rhs {
                var: v.name.clone(),
                source,
            }
        })?;
        let start = match (&p.shooting, &state.gamma) {
            (Some(sh), Some(gamma)) if sh.slope_var == v.name => lift(p, gamma),
            _ => seed_series(p, v)?,
        };
        let updated = start
            .add(&integral_from_lower(p, &integrand, &mut counter))
            .expect("iterates share truncation orders");
        next.insert(v.name.clone(), updated);
    }

    let mut residuals = Vec::with_capacity(p.corrections.len());
    for c in &p.corrections {
        let (corrected, residual) = correct(c, &next[&c.var], p)?;
        residuals.push(residual);
        next.insert(c.var.clone(), corrected);
    }

    for (name, s) in &next {
        if !s.is_finite() {
            return Err(EngineError::NonFinite { var: name.clone() });
        }
    }

    let gamma = match &p.shooting {
        Some(sh) => Some(shooting_update(sh, &next, p)?),
        None => None,
    };
    Ok(SweepOutcome {
        state: IterState { vars: next, gamma },
        residuals,
        dropped: counter.dropped,
    })
}

/// Applies one boundary correction to `s`, returning the corrected series
/// and the max-abs coefficient of the residual it removed.
pub fn correct(c: &Correction, s: &Series2, p: &ProblemSpec) -> Result<(Series2, f64), EngineError> {
    let across = c.axis.other();
    let (dt, dx) = p.degrees;
    match &c.kind {
        CorrectionKind::Pin { point, target } => {
            let g = expand_target(p, target, across, &c.var)?;
            let trace = s.eval_axis(c.axis, p.local(c.axis, *point));
            let residual = trace.sub(&g).expect("trace and target share axis and degree");
            let out = s.sub(&lift(p, &residual)).expect("same degrees");
            Ok((out, residual.max_abs_coeff()))
        }
        CorrectionKind::Blend { a, b, alpha, beta } => {
            let ga = expand_target(p, alpha, across, &c.var)?;
            let gb = expand_target(p, beta, across, &c.var)?;
            let (la, lb) = (p.local(c.axis, *a), p.local(c.axis, *b));
            let ra = s.eval_axis(c.axis, la).sub(&ga).expect("same axis and degree");
            let rb = s.eval_axis(c.axis, lb).sub(&gb).expect("same axis and degree");
            let width = lb - la;
            // ℓ_b = (h − a)/(b − a), ℓ_a = (b − h)/(b − a) in local coordinates.
            let weight_b = Series2::variable(dt, dx, c.axis, -la).scale(1.0 / width);
            let weight_a = Series2::variable(dt, dx, c.axis, -lb).scale(-1.0 / width);
            let shift = weight_b
                .mul(&lift(p, &rb))
                .and_then(|x| x.add(&weight_a.mul(&lift(p, &ra))?))
                .expect("same degrees");
            let out = s.sub(&shift).expect("same degrees");
            Ok((out, ra.max_abs_coeff().max(rb.max_abs_coeff())))
        }
    }
}

/// `∫_a^b (b − s)·s^n ds` for every power `n ≤ deg`, in local coordinates.
fn shooting_weights(a: f64, b: f64, deg: usize) -> Vec<f64> {
    (0..=deg)
        .map(|n| {
            let k = n as i32;
            b * (b.powi(k + 1) - a.powi(k + 1)) / (k + 1) as f64 - (b.powi(k + 2) - a.powi(k + 2)) / (k + 2) as f64
        })
        .collect()
}

/// Refits the unknown slope: `γ = (β − α − ∫_a^b (b − s)·G(s) ds)/(b − a)`,
/// where `G` is the slope variable's right-hand side on `vars`.
pub fn shooting_update(sh: &ShootingSpec, vars: &State, p: &ProblemSpec) -> Result<Series1, EngineError> {
    let slope = p
        .var(&sh.slope_var)
        .ok_or_else(|| EngineError::Invalid(format!("undeclared slope variable `{}`", sh.slope_var)))?;
    let table = rhs_table(p);
    let mut counter = TruncationCounter::default();
    let g = eval_rhs(&slope.rhs, &context(p, vars, &table), &mut counter).map_err(EngineError::Shooting)?;

    let along = sh.axis;
    let across = along.other();
    let (la, lb) = (p.local(along, sh.a), p.local(along, sh.b));
    let w = shooting_weights(la, lb, p.deg(along));
    let n = p.deg(across);
    let mut integral = vec![0.0; n + 1];
    for (k, slot) in integral.iter_mut().enumerate() {
        *slot = (0..=p.deg(along))
            .map(|m| {
                let c = match along {
                    Axis::T => g.get(m, k),
                    Axis::X => g.get(k, m),
                };
                c * w[m]
            })
            .sum();
    }
    let integral = Series1::new(across, integral);
    let alpha = expand_target(p, &sh.alpha, across, &sh.primary_var)?;
    let beta = expand_target(p, &sh.beta, across, &sh.primary_var)?;
    Ok(beta
        .sub(&alpha)
        .and_then(|d| d.sub(&integral))
        .expect("same axis and degree")
        .scale(1.0 / (sh.b - sh.a)))
}

/// Seeds the problem and performs `p.iterations` sweeps.
pub fn run(p: &ProblemSpec) -> Result<RunReport, EngineError> {
    run_with(p, RunOptions::default())
}

pub fn run_with(p: &ProblemSpec, opts: RunOptions) -> Result<RunReport, EngineError> {
    let initial = seed_state(p)?;
    let mut state = initial.clone();
    let mut sweeps = Vec::with_capacity(p.iterations);
    let mut total = 0;
    for index in 1..=p.iterations {
        let out = picard_sweep_with(p, &state, opts.mode).map_err(|e| EngineError::Sweep {
            index,
            source: Box::new(e),
        })?;
        total += out.dropped;
        sweeps.push(SweepRecord {
            index,
            residuals: out.residuals,
            gamma: out.state.gamma.clone(),
            dropped: out.dropped,
            vars: out.state.vars.clone(),
        });
        state = out.state;
    }
    Ok(RunReport {
        problem: p.name.clone(),
        primary: p.primary_var().unwrap_or_default().to_string(),
        initial,
        sweeps,
        truncation_drops: total,
    })
}
