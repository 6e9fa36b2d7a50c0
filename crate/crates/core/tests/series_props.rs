use picard_bvp::series::{AnalyticFn, Axis, Series1, Series2};
use proptest::prelude::*;

const DT: usize = 4;
const DX: usize = 5;

fn close(a: &Series2, b: &Series2, tol: f64) -> bool {
    a.coeffs().iter().zip(b.coeffs()).all(|(x, y)| (x - y).abs() <= tol)
}

fn series2() -> impl Strategy<Value = Series2> {
    prop::collection::vec(-2.0f64..2.0, (DT + 1) * (DX + 1)).prop_map(|c| {
        let rows: Vec<Vec<f64>> = c.chunks(DX + 1).map(|r| r.to_vec()).collect();
        Series2::from_rows(DT, DX, &rows)
    })
}

fn axis() -> impl Strategy<Value = Axis> {
    prop_oneof![Just(Axis::T), Just(Axis::X)]
}

/// Zeroes the coefficients of the highest power along `axis`.
fn drop_top(s: &Series2, axis: Axis) -> Series2 {
    let rows: Vec<Vec<f64>> = (0..=DT)
        .map(|i| {
            (0..=DX)
                .map(|j| {
                    let top = match axis {
                        Axis::T => i == DT,
                        Axis::X => j == DX,
                    };
                    if top {
                        0.0
                    } else {
                        s.get(i, j)
                    }
                })
                .collect()
        })
        .collect();
    Series2::from_rows(DT, DX, &rows)
}

proptest! {
    #[test]
    fn product_commutes(a in series2(), b in series2()) {
        prop_assert!(close(&a.mul(&b).unwrap(), &b.mul(&a).unwrap(), 1e-12));
    }

    #[test]
    fn product_associates(a in series2(), b in series2(), c in series2()) {
        let l = a.mul(&b).unwrap().mul(&c).unwrap();
        let r = a.mul(&b.mul(&c).unwrap()).unwrap();
        prop_assert!(close(&l, &r, 1e-10));
    }

    #[test]
    fn product_distributes(a in series2(), b in series2(), c in series2()) {
        let l = a.mul(&b.add(&c).unwrap()).unwrap();
        let r = a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap();
        prop_assert!(close(&l, &r, 1e-11));
    }

    #[test]
    fn diff_undoes_integrate(s in series2(), ax in axis()) {
        prop_assert!(close(&s.integrate(ax).diff(ax), &drop_top(&s, ax), 1e-13));
    }

    #[test]
    fn integrate_undoes_diff_up_to_trace(s in series2(), ax in axis()) {
        let trace = Series2::lift(&s.eval_axis(ax, 0.0), DT, DX);
        prop_assert!(close(&s.diff(ax).integrate(ax), &s.sub(&trace).unwrap(), 1e-13));
    }

    #[test]
    fn axis_then_point_matches_point(s in series2(), t in -1.0f64..1.0, x in -1.0f64..1.0) {
        let direct = s.eval_point(t, x);
        let via_t = s.eval_axis(Axis::T, t).eval(x);
        let via_x = s.eval_axis(Axis::X, x).eval(t);
        prop_assert!((direct - via_t).abs() <= 1e-11);
        prop_assert!((direct - via_x).abs() <= 1e-11);
    }

    #[test]
    fn reciprocal_is_inverse(s in series2(), c in prop_oneof![1.0f64..4.0, -4.0f64..-1.0]) {
        let shifted = s.scale(0.2).add_constant(c);
        let one = shifted.mul(&shifted.recip().unwrap()).unwrap();
        prop_assert!(close(&one, &Series2::constant(DT, DX, 1.0), 1e-10));
    }

    #[test]
    fn integer_power_is_repeated_product(s in series2(), n in 0i64..5) {
        let mut expected = Series2::constant(DT, DX, 1.0);
        for _ in 0..n {
            expected = expected.mul(&s).unwrap();
        }
        let tol = 1e-9 * expected.max_abs_coeff().max(1.0);
        prop_assert!(close(&s.powi(n).unwrap(), &expected, tol));
    }

    #[test]
    fn exp_satisfies_its_ode(c in prop::collection::vec(-1.0f64..1.0, 9)) {
        // f = exp(g) ⇒ f' = g'·f, exact below the top degree.
        let g = Series1::new(Axis::X, c);
        let f = g.analytic(AnalyticFn::Exp).unwrap();
        let lhs = f.diff();
        let rhs = g.diff().mul(&f).unwrap();
        for k in 0..g.deg() {
            prop_assert!((lhs.coeff(k) - rhs.coeff(k)).abs() <= 1e-10 * (1.0 + lhs.coeff(k).abs()));
        }
        prop_assert!((f.coeff(0) - g.coeff(0).exp()).abs() <= 1e-14);
    }

    #[test]
    fn sin_cos_pythagorean(c in prop::collection::vec(-1.0f64..1.0, 9)) {
        let g = Series1::new(Axis::T, c);
        let s = g.analytic(AnalyticFn::Sin).unwrap();
        let co = g.analytic(AnalyticFn::Cos).unwrap();
        let one = s.mul(&s).unwrap().add(&co.mul(&co).unwrap()).unwrap();
        prop_assert!((one.coeff(0) - 1.0).abs() <= 1e-12);
        for k in 1..=one.deg() {
            prop_assert!(one.coeff(k).abs() <= 1e-9);
        }
    }
}

#[test]
fn lift_is_constant_along_the_other_axis() {
    let s = Series1::new(Axis::X, vec![1.0, 2.0, 3.0]);
    let l = Series2::lift(&s, 3, 2);
    assert_eq!(l.diff(Axis::T).max_abs_coeff(), 0.0);
    assert_eq!(l.eval_point(0.7, 0.5), s.eval(0.5));
}
