use super::{mul_slices, recip_slice, Axis, Series1, SeriesError, TruncationCounter};

/// Truncated bivariate power series `Σ c[i][j]·t^i·x^j` in local coordinates.
///
/// Coefficients are stored densely, row-major in `t`: entry `(i, j)` lives at
/// `i * (deg_x + 1) + j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Series2 {
    deg_t: usize,
    deg_x: usize,
    coeffs: Vec<f64>,
}

impl Series2 {
    pub fn zero(deg_t: usize, deg_x: usize) -> Self {
        Series2 {
            deg_t,
            deg_x,
            coeffs: vec![0.0; (deg_t + 1) * (deg_x + 1)],
        }
    }

    pub fn constant(deg_t: usize, deg_x: usize, value: f64) -> Self {
        let mut s = Self::zero(deg_t, deg_x);
        s.coeffs[0] = value;
        s
    }

    /// Builds a series from a row-major coefficient table. Rows index powers
    /// of `t`, columns powers of `x`; missing entries are zero and entries
    /// beyond the degrees are dropped.
    pub fn from_rows(deg_t: usize, deg_x: usize, rows: &[Vec<f64>]) -> Self {
        let mut s = Self::zero(deg_t, deg_x);
        for (i, row) in rows.iter().enumerate().take(deg_t + 1) {
            for (j, &c) in row.iter().enumerate().take(deg_x + 1) {
                s.set(i, j, c);
            }
        }
        s
    }

    /// `offset + h` along `axis`.
    pub fn variable(deg_t: usize, deg_x: usize, axis: Axis, offset: f64) -> Self {
        let mut s = Self::constant(deg_t, deg_x, offset);
        match axis {
            Axis::T if deg_t >= 1 => s.set(1, 0, 1.0),
            Axis::X if deg_x >= 1 => s.set(0, 1, 1.0),
            _ => {}
        }
        s
    }

    /// Embeds a univariate series as a function constant in the other axis.
    /// The univariate series is padded or truncated to fit.
    pub fn lift(s: &Series1, deg_t: usize, deg_x: usize) -> Self {
        let mut out = Self::zero(deg_t, deg_x);
        match s.axis() {
            Axis::T => {
                for i in 0..=deg_t {
                    out.set(i, 0, s.coeff(i));
                }
            }
            Axis::X => {
                for j in 0..=deg_x {
                    out.set(0, j, s.coeff(j));
                }
            }
        }
        out
    }

    pub fn deg_t(&self) -> usize {
        self.deg_t
    }

    pub fn deg_x(&self) -> usize {
        self.deg_x
    }

    pub fn degrees(&self) -> (usize, usize) {
        (self.deg_t, self.deg_x)
    }

    pub fn deg(&self, axis: Axis) -> usize {
        match axis {
            Axis::T => self.deg_t,
            Axis::X => self.deg_x,
        }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Coefficient of `t^i·x^j`; zero outside the stored window.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i > self.deg_t || j > self.deg_x {
            0.0
        } else {
            self.coeffs[i * (self.deg_x + 1) + j]
        }
    }

    fn set(&mut self, i: usize, j: usize, v: f64) {
        self.coeffs[i * (self.deg_x + 1) + j] = v;
    }

    fn row(&self, i: usize) -> &[f64] {
        let w = self.deg_x + 1;
        &self.coeffs[i * w..(i + 1) * w]
    }

    /// Rows of the coefficient table, one per power of `t`.
    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..=self.deg_t).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Pads with zeros or truncates to the given degrees.
    pub fn with_degrees(&self, deg_t: usize, deg_x: usize) -> Series2 {
        Series2::from_rows(deg_t, deg_x, &self.rows())
    }

    fn check(&self, other: &Series2) -> Result<(), SeriesError> {
        if self.degrees() != other.degrees() {
            return Err(SeriesError::DegreeMismatch {
                left: self.degrees(),
                right: other.degrees(),
            });
        }
        Ok(())
    }

    fn zip_with(&self, other: &Series2, f: impl Fn(f64, f64) -> f64) -> Result<Series2, SeriesError> {
        self.check(other)?;
        Ok(Series2 {
            deg_t: self.deg_t,
            deg_x: self.deg_x,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn add(&self, other: &Series2) -> Result<Series2, SeriesError> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Series2) -> Result<Series2, SeriesError> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, c: f64) -> Series2 {
        Series2 {
            deg_t: self.deg_t,
            deg_x: self.deg_x,
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    pub fn neg(&self) -> Series2 {
        self.scale(-1.0)
    }

    pub fn add_constant(&self, c: f64) -> Series2 {
        let mut s = self.clone();
        s.coeffs[0] += c;
        s
    }

    /// Highest power of each axis carrying a nonzero coefficient, or `None`
    /// for the zero series.
    pub fn support(&self) -> Option<(usize, usize)> {
        let mut top: Option<(usize, usize)> = None;
        for i in 0..=self.deg_t {
            for j in 0..=self.deg_x {
                if self.get(i, j) != 0.0 {
                    let (ti, tj) = top.unwrap_or((0, 0));
                    top = Some((ti.max(i), tj.max(j)));
                }
            }
        }
        top
    }

    /// Truncated Cauchy product.
    pub fn mul(&self, other: &Series2) -> Result<Series2, SeriesError> {
        self.check(other)?;
        let (dt, dx) = self.degrees();
        let w = dx + 1;
        let mut coeffs = vec![0.0; (dt + 1) * w];
        for p in 0..=dt {
            let arow = self.row(p);
            if arow.iter().all(|&c| c == 0.0) {
                continue;
            }
            for r in 0..=dt - p {
                let prod = mul_slices(arow, other.row(r), w);
                let out = &mut coeffs[(p + r) * w..(p + r + 1) * w];
                for (o, v) in out.iter_mut().zip(prod) {
                    *o += v;
                }
            }
        }
        Ok(Series2 {
            deg_t: dt,
            deg_x: dx,
            coeffs,
        })
    }

    /// [`Series2::mul`], recording in `counter` when the exact product would
    /// have extended past the truncation window.
    pub fn mul_counted(&self, other: &Series2, counter: &mut TruncationCounter) -> Result<Series2, SeriesError> {
        let out = self.mul(other)?;
        if let (Some((at, ax)), Some((bt, bx))) = (self.support(), other.support()) {
            if at + bt > self.deg_t || ax + bx > self.deg_x {
                counter.add(1);
            }
        }
        Ok(out)
    }

    /// Integer power by square-and-multiply; `n = 0` gives one.
    pub fn powi(&self, n: i64) -> Result<Series2, SeriesError> {
        if n < 0 {
            return Err(SeriesError::NegativePower(n));
        }
        let mut result = Series2::constant(self.deg_t, self.deg_x, 1.0);
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

    /// Reciprocal by recursion on powers of `t`, each coefficient being a
    /// series in `x`: `r_0 = 1/a_0`, `r_i = -r_0·Σ_{k=1..i} a_k·r_{i-k}`.
    pub fn recip(&self) -> Result<Series2, SeriesError> {
        let (dt, dx) = self.degrees();
        let w = dx + 1;
        let r0 = recip_slice(self.row(0), w)?;
        let mut rows: Vec<Vec<f64>> = vec![r0.clone()];
        for i in 1..=dt {
            let mut acc = vec![0.0; w];
            for k in 1..=i {
                let p = mul_slices(self.row(k), &rows[i - k], w);
                for (a, v) in acc.iter_mut().zip(p) {
                    *a += v;
                }
            }
            let mut ri = mul_slices(&r0, &acc, w);
            ri.iter_mut().for_each(|c| *c = -*c);
            rows.push(ri);
        }
        Ok(Series2::from_rows(dt, dx, &rows))
    }

    /// Formal partial derivative. The top row (or column) of the result is
    /// zero because the information needed for it was truncated away.
    pub fn diff(&self, axis: Axis) -> Series2 {
        let (dt, dx) = self.degrees();
        let mut out = Series2::zero(dt, dx);
        match axis {
            Axis::T => {
                for i in 0..dt {
                    for j in 0..=dx {
                        out.set(i, j, (i + 1) as f64 * self.get(i + 1, j));
                    }
                }
            }
            Axis::X => {
                for i in 0..=dt {
                    for j in 0..dx {
                        out.set(i, j, (j + 1) as f64 * self.get(i, j + 1));
                    }
                }
            }
        }
        out
    }

    /// Repeated [`Series2::diff`].
    pub fn diff_n(&self, axis: Axis, order: usize) -> Series2 {
        (0..order).fold(self.clone(), |s, _| s.diff(axis))
    }

    /// Antiderivative vanishing on the line `axis = 0`. Coefficients in the
    /// top row (column) of the input have nowhere to go and are dropped.
    pub fn integrate(&self, axis: Axis) -> Series2 {
        let (dt, dx) = self.degrees();
        let mut out = Series2::zero(dt, dx);
        match axis {
            Axis::T => {
                for i in 1..=dt {
                    for j in 0..=dx {
                        out.set(i, j, self.get(i - 1, j) / i as f64);
                    }
                }
            }
            Axis::X => {
                for i in 0..=dt {
                    for j in 1..=dx {
                        out.set(i, j, self.get(i, j - 1) / j as f64);
                    }
                }
            }
        }
        out
    }

    /// [`Series2::integrate`], adding the number of dropped nonzero
    /// coefficients to `counter`.
    pub fn integrate_counted(&self, axis: Axis, counter: &mut TruncationCounter) -> Series2 {
        let dropped = match axis {
            Axis::T => (0..=self.deg_x).filter(|&j| self.get(self.deg_t, j) != 0.0).count(),
            Axis::X => (0..=self.deg_t).filter(|&i| self.get(i, self.deg_x) != 0.0).count(),
        };
        counter.add(dropped);
        self.integrate(axis)
    }

    /// Substitutes the local coordinate `value` for `axis`, leaving a series
    /// in the other axis.
    pub fn eval_axis(&self, axis: Axis, value: f64) -> Series1 {
        let (dt, dx) = self.degrees();
        match axis {
            Axis::T => {
                let mut acc = vec![0.0; dx + 1];
                for i in (0..=dt).rev() {
                    for (j, a) in acc.iter_mut().enumerate() {
                        *a = *a * value + self.get(i, j);
                    }
                }
                Series1::new(Axis::X, acc)
            }
            Axis::X => {
                let coeffs = (0..=dt)
                    .map(|i| self.row(i).iter().rev().fold(0.0, |acc, &c| acc * value + c))
                    .collect();
                Series1::new(Axis::T, coeffs)
            }
        }
    }

    /// Nested Horner evaluation at local coordinates `(t, x)`.
    pub fn eval_point(&self, t: f64, x: f64) -> f64 {
        (0..=self.deg_t).rev().fold(0.0, |acc, i| {
            acc * t + self.row(i).iter().rev().fold(0.0, |a, &c| a * x + c)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_plus(axis: Axis) -> Series2 {
        Series2::variable(2, 2, axis, 1.0)
    }

    #[test]
    fn sum_of_linear_terms() {
        let s = one_plus(Axis::X).add(&Series2::variable(2, 2, Axis::T, 0.0)).unwrap();
        assert_eq!(s.get(0, 0), 1.0);
        assert_eq!(s.get(1, 0), 1.0);
        assert_eq!(s.get(0, 1), 1.0);
        assert_eq!(s.max_abs_coeff(), 1.0);
        assert_eq!(s.coeffs().iter().filter(|&&c| c != 0.0).count(), 3);
    }

    #[test]
    fn product_below_truncation() {
        let p = one_plus(Axis::T).mul(&one_plus(Axis::X)).unwrap();
        let want = Series2::from_rows(2, 2, &[vec![1.0, 1.0], vec![1.0, 1.0]]);
        assert_eq!(p, want);
    }

    #[test]
    fn lift_embeds_along_axis() {
        let s = Series1::new(Axis::X, vec![1.0, 1.0]);
        let l = Series2::lift(&s, 2, 2);
        assert_eq!(l, Series2::from_rows(2, 2, &[vec![1.0, 1.0]]));
    }

    #[test]
    fn mismatched_degrees() {
        let a = Series2::zero(2, 2);
        let b = Series2::zero(2, 3);
        assert!(matches!(a.add(&b), Err(SeriesError::DegreeMismatch { .. })));
        assert!(matches!(a.mul(&b), Err(SeriesError::DegreeMismatch { .. })));
    }

    #[test]
    fn square_of_one_plus_x() {
        let sq = one_plus(Axis::X).powi(2).unwrap();
        assert_eq!(sq, Series2::from_rows(2, 2, &[vec![1.0, 2.0, 1.0]]));
    }

    #[test]
    fn zeroth_power_and_negative_power() {
        let s = Series2::from_rows(2, 2, &[vec![3.0, 1.0], vec![2.0]]);
        assert_eq!(s.powi(0).unwrap(), Series2::constant(2, 2, 1.0));
        assert_eq!(s.powi(-2), Err(SeriesError::NegativePower(-2)));
    }

    #[test]
    fn reciprocal_of_one_plus_x() {
        let r = Series2::variable(0, 4, Axis::X, 1.0).recip().unwrap();
        assert_eq!(r.rows(), vec![vec![1.0, -1.0, 1.0, -1.0, 1.0]]);
    }

    #[test]
    fn reciprocal_of_two_plus_two_x_at_half() {
        // Oracle: 1/(2(1+x)) at x = 0.5 is 1/3.
        let s = Series2::variable(0, 20, Axis::X, 1.0).scale(2.0);
        let v = s.recip().unwrap().eval_point(0.0, 0.5);
        assert!((v - 1.0 / 3.0).abs() < 1e-6);
    }

    #[test]
    fn singular_reciprocal() {
        let s = Series2::variable(2, 2, Axis::X, 0.0);
        assert!(matches!(s.recip(), Err(SeriesError::SingularDivision { .. })));
    }

    #[test]
    fn derivatives() {
        assert_eq!(one_plus(Axis::X).diff(Axis::X), Series2::constant(2, 2, 1.0));
        let t2x = Series2::from_rows(3, 3, &[vec![], vec![], vec![0.0, 1.0]]);
        let want = Series2::from_rows(3, 3, &[vec![], vec![0.0, 2.0]]);
        assert_eq!(t2x.diff(Axis::T), want);
    }

    #[test]
    fn integrate_seed_sweep_of_first_example() {
        // -1 + 2 + t + x integrated in t gives t + t²/2 + x·t.
        let integrand = Series2::from_rows(4, 4, &[vec![1.0, 1.0], vec![1.0]]);
        let got = integrand.integrate(Axis::T);
        let want = Series2::from_rows(4, 4, &[vec![], vec![1.0, 1.0], vec![0.5]]);
        assert_eq!(got, want);
        assert_eq!(Series2::zero(3, 3).integrate(Axis::X), Series2::zero(3, 3));
    }

    #[test]
    fn integrate_counts_dropped_terms() {
        let s = Series2::from_rows(1, 1, &[vec![1.0, 0.0], vec![2.0, 3.0]]);
        let mut c = TruncationCounter::default();
        s.integrate_counted(Axis::T, &mut c);
        assert_eq!(c.dropped, 2);
        s.mul_counted(&s, &mut c).unwrap();
        assert_eq!(c.dropped, 3);
    }

    #[test]
    fn traces() {
        let s = one_plus(Axis::T).mul(&one_plus(Axis::X)).unwrap();
        assert_eq!(s.eval_axis(Axis::X, 0.0), Series1::new(Axis::T, vec![1.0, 1.0, 0.0]));
        assert_eq!(s.eval_axis(Axis::X, 1.0), Series1::new(Axis::T, vec![2.0, 2.0, 0.0]));
        assert_eq!(s.eval_point(0.5, 0.5), 2.25);
        assert_eq!(s.eval_point(0.0, 0.0), s.get(0, 0));
    }

    #[test]
    fn cos_seed_trace_at_quarter_turn() {
        let c = Series1::variable(Axis::X, 20, 0.0)
            .analytic(crate::series::AnalyticFn::Cos)
            .unwrap();
        let tr = Series2::lift(&c, 4, 20).eval_axis(Axis::X, std::f64::consts::FRAC_PI_2);
        assert!(tr.coeff(0).abs() < 1e-10);
        assert!(tr.coeffs()[1..].iter().all(|&v| v == 0.0));
    }

    #[test]
    fn exp_seed_at_one() {
        let e = Series1::variable(Axis::T, 16, 0.0)
            .analytic(crate::series::AnalyticFn::Exp)
            .unwrap();
        let s = Series2::lift(&e, 16, 16);
        assert!((s.eval_point(1.0, 0.3) - 1f64.exp()).abs() < 1e-12);
    }
}
