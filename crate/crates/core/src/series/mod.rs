//! Truncated power-series algebra.
//!
//! [`Series1`] holds the Taylor coefficients of a function of one variable,
//! [`Series2`] those of a function of `(t, x)`. Both are stored in local
//! coordinates: the expansion point is the origin, and callers convert
//! absolute coordinates before evaluating.
//!
//! Every operation truncates to the operands' degrees. Products and
//! antiderivatives silently drop terms beyond the cap; callers that care
//! (the engine) use the `*_counted` variants to tally what was dropped.

mod analytic;
mod bivariate;
mod univariate;

use std::fmt;
use std::str::FromStr;

pub use analytic::AnalyticFn;
pub use bivariate::Series2;
pub use univariate::Series1;

/// Smallest constant term accepted by [`Series1::recip`] and [`Series2::recip`].
pub const SINGULAR_TOLERANCE: f64 = 1e-12;

/// One of the two independent variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axis {
    T,
    X,
}

impl Axis {
    pub fn other(self) -> Axis {
        match self {
            Axis::T => Axis::X,
            Axis::X => Axis::T,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Axis::T => "t",
            Axis::X => "x",
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Axis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "t" => Ok(Axis::T),
            "x" => Ok(Axis::X),
            other => Err(format!("unknown axis `{other}` (expected t or x)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SeriesError {
    #[error("truncation orders differ: {left:?} vs {right:?} (lift the operand explicitly)")]
    DegreeMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("series live on different axes ({left} vs {right})")]
    AxisMismatch { left: Axis, right: Axis },
    #[error("negative exponent {0}: use recip for division")]
    NegativePower(i64),
    #[error("singular division: constant term {constant:e} is too close to zero")]
    SingularDivision { constant: f64 },
    #[error("sqrt of a series with non-positive constant term {constant}")]
    SqrtDomain { constant: f64 },
    #[error("unknown function `{0}`")]
    UnknownFunction(String),
}

/// Tally of nonzero terms discarded by truncation during a run.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct TruncationCounter {
    pub dropped: u64,
}

impl TruncationCounter {
    pub fn add(&mut self, n: usize) {
        self.dropped += n as u64;
    }
}

/// Truncated Cauchy product of two coefficient slices, keeping `len` terms.
pub(crate) fn mul_slices(a: &[f64], b: &[f64], len: usize) -> Vec<f64> {
    let mut out = vec![0.0; len];
    for (i, &ai) in a.iter().enumerate().take(len) {
        if ai == 0.0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate().take(len - i) {
            out[i + j] += ai * bj;
        }
    }
    out
}

/// Reciprocal of a univariate coefficient slice by the standard recurrence
/// `r_0 = 1/a_0`, `r_n = -(Σ_{k=1..n} a_k r_{n-k}) / a_0`.
pub(crate) fn recip_slice(a: &[f64], len: usize) -> Result<Vec<f64>, SeriesError> {
    let a0 = a.first().copied().unwrap_or(0.0);
    if a0.abs() <= SINGULAR_TOLERANCE {
        return Err(SeriesError::SingularDivision { constant: a0 });
    }
    let mut r = vec![0.0; len];
    if len == 0 {
        return Ok(r);
    }
    r[0] = 1.0 / a0;
    for n in 1..len {
        let mut acc = 0.0;
        for k in 1..=n.min(a.len() - 1) {
            acc += a[k] * r[n - k];
        }
        r[n] = -acc / a0;
    }
    Ok(r)
}
