use super::{mul_slices, recip_slice, AnalyticFn, Axis, SeriesError};

/// Truncated power series in a single variable, `Σ c[i]·h^i` with `h` the
/// local coordinate along `axis`.
#[derive(Debug, Clone, PartialEq)]
pub struct Series1 {
    axis: Axis,
    coeffs: Vec<f64>,
}

impl Series1 {
    /// Builds a series from coefficients; the degree is `coeffs.len() - 1`.
    ///
    /// An empty coefficient vector is treated as the degree-0 zero series.
    pub fn new(axis: Axis, mut coeffs: Vec<f64>) -> Self {
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        Series1 { axis, coeffs }
    }

    pub fn zero(axis: Axis, deg: usize) -> Self {
        Series1 {
            axis,
            coeffs: vec![0.0; deg + 1],
        }
    }

    pub fn constant(axis: Axis, deg: usize, value: f64) -> Self {
        let mut s = Self::zero(axis, deg);
        s.coeffs[0] = value;
        s
    }

    /// The coordinate itself, `offset + h`, where `offset` is the absolute
    /// position of the expansion point.
    pub fn variable(axis: Axis, deg: usize, offset: f64) -> Self {
        let mut s = Self::constant(axis, deg, offset);
        if deg >= 1 {
            s.coeffs[1] = 1.0;
        }
        s
    }

    pub fn axis(&self) -> Axis {
        self.axis
    }

    pub fn deg(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> f64 {
        self.coeffs.get(i).copied().unwrap_or(0.0)
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Pads with zeros or truncates to degree `deg`.
    pub fn with_degree(&self, deg: usize) -> Series1 {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(deg + 1, 0.0);
        Series1 {
            axis: self.axis,
            coeffs,
        }
    }

    fn check(&self, other: &Series1) -> Result<(), SeriesError> {
        if self.axis != other.axis {
            return Err(SeriesError::AxisMismatch {
                left: self.axis,
                right: other.axis,
            });
        }
        if self.deg() != other.deg() {
            return Err(SeriesError::DegreeMismatch {
                left: (self.deg(), 0),
                right: (other.deg(), 0),
            });
        }
        Ok(())
    }

    fn zip_with(&self, other: &Series1, f: impl Fn(f64, f64) -> f64) -> Result<Series1, SeriesError> {
        self.check(other)?;
        Ok(Series1 {
            axis: self.axis,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn add(&self, other: &Series1) -> Result<Series1, SeriesError> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Series1) -> Result<Series1, SeriesError> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, c: f64) -> Series1 {
        Series1 {
            axis: self.axis,
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    pub fn neg(&self) -> Series1 {
        self.scale(-1.0)
    }

    pub fn add_constant(&self, c: f64) -> Series1 {
        let mut s = self.clone();
        s.coeffs[0] += c;
        s
    }

    pub fn mul(&self, other: &Series1) -> Result<Series1, SeriesError> {
        self.check(other)?;
        Ok(Series1 {
            axis: self.axis,
            coeffs: mul_slices(&self.coeffs, &other.coeffs, self.coeffs.len()),
        })
    }

    pub fn recip(&self) -> Result<Series1, SeriesError> {
        Ok(Series1 {
            axis: self.axis,
            coeffs: recip_slice(&self.coeffs, self.coeffs.len())?,
        })
    }

    pub fn powi(&self, n: i64) -> Result<Series1, SeriesError> {
        if n < 0 {
            return Err(SeriesError::NegativePower(n));
        }
        let mut result = Series1::constant(self.axis, self.deg(), 1.0);
        let mut base = self.clone();
        let mut e = n as u64;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(result)
    }

    /// Formal derivative; the top coefficient becomes zero.
    pub fn diff(&self) -> Series1 {
        let n = self.coeffs.len();
        let mut coeffs = vec![0.0; n];
        for i in 0..n - 1 {
            coeffs[i] = (i + 1) as f64 * self.coeffs[i + 1];
        }
        Series1 {
            axis: self.axis,
            coeffs,
        }
    }

    /// Antiderivative vanishing at the expansion point; the top input
    /// coefficient is dropped.
    pub fn integrate(&self) -> Series1 {
        let n = self.coeffs.len();
        let mut coeffs = vec![0.0; n];
        for i in 1..n {
            coeffs[i] = self.coeffs[i - 1] / i as f64;
        }
        Series1 {
            axis: self.axis,
            coeffs,
        }
    }

    /// Horner evaluation at local coordinate `h`.
    pub fn eval(&self, h: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * h + c)
    }

    /// Truncated composition `f(self)`.
    pub fn analytic(&self, f: AnalyticFn) -> Result<Series1, SeriesError> {
        Ok(Series1 {
            axis: self.axis,
            coeffs: f.compose(&self.coeffs)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(c: &[f64]) -> Series1 {
        Series1::new(Axis::X, c.to_vec())
    }

    #[test]
    fn geometric_reciprocal() {
        let r = s(&[1.0, 1.0, 0.0, 0.0, 0.0]).recip().unwrap();
        assert_eq!(r.coeffs(), &[1.0, -1.0, 1.0, -1.0, 1.0]);
    }

    #[test]
    fn axis_mismatch_is_an_error() {
        let a = Series1::zero(Axis::T, 2);
        let b = Series1::zero(Axis::X, 2);
        assert!(matches!(a.add(&b), Err(SeriesError::AxisMismatch { .. })));
    }

    #[test]
    fn degree_mismatch_is_an_error() {
        let a = Series1::zero(Axis::X, 2);
        let b = Series1::zero(Axis::X, 3);
        assert!(matches!(a.mul(&b), Err(SeriesError::DegreeMismatch { .. })));
    }

    #[test]
    fn negative_power_is_rejected() {
        assert_eq!(s(&[1.0, 1.0]).powi(-1), Err(SeriesError::NegativePower(-1)));
    }

    #[test]
    fn singular_reciprocal() {
        assert!(matches!(
            s(&[1e-13, 1.0]).recip(),
            Err(SeriesError::SingularDivision { .. })
        ));
    }

    #[test]
    fn horner() {
        assert_eq!(s(&[1.0, 2.0, 3.0]).eval(2.0), 17.0);
    }

    #[test]
    fn with_degree_pads_and_truncates() {
        assert_eq!(s(&[1.0, 2.0]).with_degree(3).coeffs(), &[1.0, 2.0, 0.0, 0.0]);
        assert_eq!(s(&[1.0, 2.0, 3.0]).with_degree(0).coeffs(), &[1.0]);
    }
}
