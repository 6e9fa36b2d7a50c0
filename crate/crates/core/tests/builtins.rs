use std::collections::HashMap;
use std::path::PathBuf;

use picard_bvp::engine::CorrectionKind;
use picard_bvp::lang::{emit, eval_numeric, expand_seed, parse_expr, parse_problem};
use picard_bvp::problems::{all_builtins, load_builtin, KEYS};
use picard_bvp::{Axis, Expr, ProblemSpec};

fn at(e: &Expr, axis: Axis, on_axis: f64, other: f64) -> f64 {
    let (t, x) = match axis {
        Axis::T => (on_axis, other),
        Axis::X => (other, on_axis),
    };
    eval_numeric(e, t, x, &HashMap::new()).unwrap()
}

fn twenty(p: &ProblemSpec, axis: Axis) -> Vec<f64> {
    p.domain.along(axis).samples(20)
}

#[test]
fn fourteen_distinct_keys() {
    let all = all_builtins();
    assert_eq!(all.len(), 14);
    let mut keys: Vec<_> = all.iter().map(|e| e.key).collect();
    keys.dedup();
    assert_eq!(keys, KEYS);
}

#[test]
fn unknown_key_lists_available() {
    let err = load_builtin("ex9").unwrap_err().to_string();
    assert!(err.contains("ex9"));
    for k in KEYS {
        assert!(err.contains(k), "{k} missing from `{err}`");
    }
    assert!(load_builtin("ex2-case8").is_err());
    assert!(load_builtin("ex2-case1x").is_err());
}

#[test]
fn reference_errors() {
    let eps = |k| load_builtin(k).unwrap().reference_error;
    assert_eq!(eps("ex2-case1"), Some(0.00439));
    assert_eq!(eps("wave"), Some(0.0003));
    assert_eq!(eps("sine-gordon-m01"), Some(0.010));
    assert_eq!(eps("sine-gordon-m05"), Some(0.05));
    assert_eq!(eps("sine-gordon-m09"), Some(0.12));
    assert_eq!(eps("ex5-shooting"), Some(0.010));
    assert_eq!(eps("ex1"), None);
    assert_eq!(load_builtin("ex1").unwrap().spec.iterations, 1);
    for e in all_builtins() {
        if let Some(r) = e.reference_error {
            assert!(r > 0.0);
        }
    }
}

#[test]
fn every_builtin_validates_and_round_trips() {
    for e in all_builtins() {
        e.spec.validate().unwrap_or_else(|err| panic!("{}: {err}", e.key));
        let text = emit(&e.spec);
        let back = parse_problem(&text).unwrap_or_else(|d| panic!("{}: {d}\n{text}", e.key));
        assert_eq!(back, e.spec, "{}", e.key);
        assert_eq!(parse_problem(&e.file_text()).unwrap(), e.spec, "{}", e.key);
    }
}

#[test]
fn shipped_problem_files_match() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../problems");
    for e in all_builtins() {
        let path = dir.join(format!("{}.prob", e.key));
        let on_disk = std::fs::read_to_string(&path).unwrap_or_else(|err| panic!("{}: {err}", path.display()));
        assert_eq!(on_disk, e.file_text(), "{} differs from its builtin", path.display());
    }
}

#[test]
fn printed_expressions_reparse_identically() {
    for e in all_builtins() {
        let consts = e.spec.constant_table();
        let mut exprs: Vec<&Expr> = Vec::new();
        for v in &e.spec.vars {
            exprs.push(&v.seed);
            exprs.push(&v.rhs);
        }
        exprs.extend(e.spec.exact.as_ref());
        for ex in exprs {
            let printed = ex.to_string();
            let again = parse_expr(&printed, &consts).unwrap();
            assert_eq!(&again, ex, "{}: `{printed}`", e.key);
        }
    }
}

#[test]
fn exact_solutions_meet_their_boundary_data() {
    for e in all_builtins() {
        let p = &e.spec;
        let exact = p.exact.as_ref().unwrap();
        for c in &p.corrections {
            let across = c.axis.other();
            let check = |point: f64, target: &Expr| {
                for s in twenty(p, across) {
                    let want = at(target, c.axis, point, s);
                    let got = at(exact, c.axis, point, s);
                    assert!((want - got).abs() <= 1e-10, "{}: {c:?} at {s}: {got} vs {want}", e.key);
                }
            };
            match &c.kind {
                CorrectionKind::Pin { point, target } => check(*point, target),
                CorrectionKind::Blend { a, b, alpha, beta } => {
                    check(*a, alpha);
                    check(*b, beta);
                }
            }
        }
        if let Some(sh) = &p.shooting {
            for s in twenty(p, sh.axis.other()) {
                assert!((at(exact, sh.axis, sh.a, s) - at(&sh.alpha, sh.axis, sh.a, s)).abs() <= 1e-10);
                assert!((at(exact, sh.axis, sh.b, s) - at(&sh.beta, sh.axis, sh.b, s)).abs() <= 1e-10);
            }
        }
    }
}

#[test]
fn exact_seeds_match_exact_solution() {
    // The first variable's seed is the exact solution on the starting edge.
    for e in all_builtins() {
        let p = &e.spec;
        let exact = p.exact.as_ref().unwrap();
        let lo = p.domain.along(p.evolution).lo;
        let seed = &p.vars[0].seed;
        for s in twenty(p, p.evolution.other()) {
            let want = at(exact, p.evolution, lo, s);
            let got = at(seed, p.evolution, lo, s);
            assert!((want - got).abs() <= 1e-10, "{}: {got} vs {want}", e.key);
        }
    }
}

#[test]
fn seed_expansions_agree_with_numeric_values() {
    for e in all_builtins() {
        let p = &e.spec;
        let across = p.evolution.other();
        let iv = p.domain.along(across);
        let origin = p.origin_along(across);
        let inner = picard_bvp::Interval::new(iv.lo + iv.width() / 4.0, iv.hi - iv.width() / 4.0);
        for v in &p.vars {
            let series = expand_seed(&v.seed, across, p.deg(across), origin).unwrap();
            for s in inner.samples(20) {
                let want = at(&v.seed, p.evolution, 0.0, s);
                let got = series.eval(s - origin);
                assert!(
                    (want - got).abs() <= 1e-8 * want.abs().max(1.0),
                    "{}: seed of {} at {s}: {got} vs {want}",
                    e.key,
                    v.name
                );
            }
        }
    }
}

#[test]
fn aux_seed_r_has_constant_e_inverse() {
    let p = load_builtin("ex2-case1").unwrap().spec;
    let r = &p.var("R").unwrap().seed;
    let s = expand_seed(r, Axis::X, 16, 0.0).unwrap();
    assert!((s.coeff(0) - (-1.0f64).exp()).abs() <= 1e-12);
}
