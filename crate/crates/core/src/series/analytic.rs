use std::fmt;
use std::str::FromStr;

use super::{mul_slices, recip_slice, SeriesError};

/// Elementary functions available for composition with a univariate series.
///
/// Composition uses the ODE each function satisfies, so any constant term is
/// handled uniformly: with `s' = Σ k s_k h^{k-1}`, `f(s)' = s'·f'(s)` gives a
/// recurrence for the coefficients of `f(s)` starting from `f(s_0)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AnalyticFn {
    Exp,
    Sin,
    Cos,
    Sinh,
    Cosh,
    Atan,
    Sqrt,
}

impl AnalyticFn {
    pub const ALL: [AnalyticFn; 7] = [
        AnalyticFn::Exp,
        AnalyticFn::Sin,
        AnalyticFn::Cos,
        AnalyticFn::Sinh,
        AnalyticFn::Cosh,
        AnalyticFn::Atan,
        AnalyticFn::Sqrt,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AnalyticFn::Exp => "exp",
            AnalyticFn::Sin => "sin",
            AnalyticFn::Cos => "cos",
            AnalyticFn::Sinh => "sinh",
            AnalyticFn::Cosh => "cosh",
            AnalyticFn::Atan => "atan",
            AnalyticFn::Sqrt => "sqrt",
        }
    }

    /// Pointwise evaluation.
    pub fn apply(self, v: f64) -> f64 {
        match self {
            AnalyticFn::Exp => v.exp(),
            AnalyticFn::Sin => v.sin(),
            AnalyticFn::Cos => v.cos(),
            AnalyticFn::Sinh => v.sinh(),
            AnalyticFn::Cosh => v.cosh(),
            AnalyticFn::Atan => v.atan(),
            AnalyticFn::Sqrt => v.sqrt(),
        }
    }

    pub(crate) fn compose(self, s: &[f64]) -> Result<Vec<f64>, SeriesError> {
        let len = s.len();
        let s0 = s[0];
        // k·s_k, the derivative weights shared by every recurrence below.
        let ks: Vec<f64> = s.iter().enumerate().map(|(k, &c)| k as f64 * c).collect();
        let conv = |partner: &[f64], n: usize| -> f64 {
            (1..=n).map(|k| ks[k] * partner[n - k]).sum::<f64>() / n as f64
        };

        let out = match self {
            AnalyticFn::Exp => {
                let mut e = vec![0.0; len];
                e[0] = s0.exp();
                for n in 1..len {
                    e[n] = conv(&e, n);
                }
                e
            }
            AnalyticFn::Sin | AnalyticFn::Cos | AnalyticFn::Sinh | AnalyticFn::Cosh => {
                let hyperbolic = matches!(self, AnalyticFn::Sinh | AnalyticFn::Cosh);
                let (mut sn, mut cs) = (vec![0.0; len], vec![0.0; len]);
                if hyperbolic {
                    sn[0] = s0.sinh();
                    cs[0] = s0.cosh();
                } else {
                    sn[0] = s0.sin();
                    cs[0] = s0.cos();
                }
                let sign = if hyperbolic { 1.0 } else { -1.0 };
                for n in 1..len {
                    sn[n] = conv(&cs, n);
                    cs[n] = sign * conv(&sn, n);
                }
                if matches!(self, AnalyticFn::Sin | AnalyticFn::Sinh) {
                    sn
                } else {
                    cs
                }
            }
            AnalyticFn::Atan => {
                // atan(s)' = s' / (1 + s²)
                let mut denom = mul_slices(s, s, len);
                denom[0] += 1.0;
                let q = recip_slice(&denom, len)?;
                let mut a = vec![0.0; len];
                a[0] = s0.atan();
                for n in 1..len {
                    a[n] = conv(&q, n);
                }
                a
            }
            AnalyticFn::Sqrt => {
                if s0 <= 0.0 {
                    return Err(SeriesError::SqrtDomain { constant: s0 });
                }
                let mut r = vec![0.0; len];
                r[0] = s0.sqrt();
                for n in 1..len {
                    let cross: f64 = (1..n).map(|k| r[k] * r[n - k]).sum();
                    r[n] = (s[n] - cross) / (2.0 * r[0]);
                }
                r
            }
        };
        Ok(out)
    }
}

impl fmt::Display for AnalyticFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AnalyticFn {
    type Err = SeriesError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        AnalyticFn::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| SeriesError::UnknownFunction(s.to_string()))
    }
}
