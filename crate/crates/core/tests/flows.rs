use std::collections::BTreeMap;

use hessian_sym::expr::{Expr, FnBindings};
use hessian_sym::flows::*;
use hessian_sym::lie::{BaseSpace, VectorField};
use proptest::prelude::*;

const SEED: u64 = 20240229;

fn first_binding(spec: &CaseSpec) -> BTreeMap<String, Expr> {
    spec.bindings().remove(0)
}

#[test]
fn all_cases_pass() {
    let reports = verify_all_cases(30, 1e-7, SEED).unwrap();
    assert_eq!(reports.len(), 15);
    for r in &reports {
        assert!(r.pass, "{r:?}");
        assert!(r.group_law_residual <= 1e-12);
        assert!(r.generator_residual <= 1e-8);
        assert!(r.equivariance_max_residual <= 1e-7);
        assert!(r.printed_group_match.spatial, "case {}", r.case);
        if r.case >= 5 {
            assert_eq!(r.row_consistent, Some(true), "case {}", r.case);
        }
    }
}

#[test]
fn printed_solutions_are_pullbacks() {
    let reports = verify_all_cases(10, 1e-7, SEED).unwrap();
    for r in &reports {
        let m = r.printed_formula_match.as_ref().unwrap();
        assert_eq!(m.verdict, "match (pull-back)", "case {}", r.case);
        let literal = m.readings.iter().find(|x| x.amplitude == "1 + t");
        if (5..=13).contains(&r.case) {
            assert!(m.reparametrization.starts_with("t -> e^t - 1"));
            assert!(literal.unwrap().max_residual > 1e-3);
            assert!(!r.printed_group_match.u_row_literal && r.printed_group_match.u_row_reparametrized);
        } else {
            assert_eq!(m.reparametrization, "none");
            assert!(literal.is_none());
            assert!(r.printed_group_match.u_row_literal);
        }
    }
}

#[test]
fn case_one_sign_is_the_pullback_orientation() {
    let spec = &CASES[0];
    let sols = standard_solutions(SEED);
    let r = verify_case(spec, &first_binding(spec), &sols, &[0.4, -0.8], 10, 1e-7, SEED).unwrap();
    let m = r.printed_formula_match.unwrap();
    let push = m.readings.iter().find(|x| x.orientation == "push-forward").unwrap();
    let pull = m.readings.iter().find(|x| x.orientation == "pull-back").unwrap();
    assert!(pull.max_residual < 1e-12);
    assert!(push.max_residual > 0.1);
}

#[test]
fn weights_come_from_the_generator() {
    assert_eq!(CASES[0].weight_rate(&BTreeMap::new()).unwrap(), 0.0);
    assert_eq!(CASES[4].weight_rate(&first_binding(&CASES[4])).unwrap(), 2.0);
    assert_eq!(CASES[13].weight_rate(&BTreeMap::new()).unwrap(), -4.0);
}

#[test]
fn dilation_scales_s2_by_e_minus_4t() {
    let v = VectorField::parse(BaseSpace::E4, &[("x", "x"), ("y", "y"), ("z", "z")]).unwrap();
    let u = random_polynomial(11);
    for t in [-0.9, 0.3, 1.0] {
        let g = flow_of(&v, t).unwrap();
        let pushed = pushforward(&g, &u).unwrap();
        let p = [0.4, -0.7, 0.2];
        let q = g.apply([p[0], p[1], p[2], 0.0]);
        let lhs = pushed.s2_at([q[0], q[1], q[2]]).unwrap();
        let rhs = (-4.0 * t).exp() * u.s2_at(p).unwrap();
        assert!((lhs - rhs).abs() <= 1e-10 * rhs.abs().max(1.0));
    }
}

fn fd_s2(u: &ScalarFunctionHandle, p: [f64; 3], h: f64) -> f64 {
    let f = |d: [f64; 3]| u.value([p[0] + d[0], p[1] + d[1], p[2] + d[2]]).unwrap();
    let e = |i: usize, s: f64| {
        let mut d = [0.0; 3];
        d[i] = s;
        d
    };
    let second = |i: usize, j: usize| {
        if i == j {
            (f(e(i, h)) - 2.0 * f([0.0; 3]) + f(e(i, -h))) / (h * h)
        } else {
            let pp = [e(i, h), e(j, h)];
            let add = |a: [f64; 3], b: [f64; 3]| [a[0] + b[0], a[1] + b[1], a[2] + b[2]];
            let neg = |a: [f64; 3]| a.map(|x| -x);
            (f(add(pp[0], pp[1])) - f(add(pp[0], neg(pp[1]))) - f(add(neg(pp[0]), pp[1]))
                + f(add(neg(pp[0]), neg(pp[1]))))
                / (4.0 * h * h)
        }
    };
    let m = |i, j| second(i, j);
    m(0, 0) * m(1, 1) + m(0, 0) * m(2, 2) + m(1, 1) * m(2, 2)
        - m(0, 1).powi(2)
        - m(1, 2).powi(2)
        - m(0, 2).powi(2)
}

#[test]
fn fixture_matches_finite_differences() {
    let u = tian_fixture([1.0, 2.0, -0.5], 0.5, sin_product_omega()).unwrap();
    for p in [[0.1, 0.2, 0.3], [-0.4, 0.05, 0.6], [0.9, -0.8, -0.2]] {
        let exact = u.s2_at(p).unwrap();
        let fd = fd_s2(&u, p, 1e-4);
        assert!((exact - fd).abs() <= 1e-6 * exact.abs().max(1.0), "{exact} {fd}");
    }
}

#[test]
fn flat_fixture_has_constant_s2() {
    let zero = FnBindings::new().with("ω", |_: &[f64], _: &[usize]| Some(0.0));
    let u = tian_fixture([2.0, 3.0, 5.0], 0.3, zero).unwrap();
    assert_eq!(u.s2_at([0.5, -0.5, 0.1]).unwrap(), 31.0);
}

proptest! {
    #[test]
    fn group_law_and_identity(case in 0usize..15, t in -1.0f64..1.0, s in -1.0f64..1.0) {
        let spec = &CASES[case];
        for b in spec.bindings() {
            let v = spec.generator(&b);
            let g = |x| flow_of(&v, x).unwrap();
            prop_assert!(g(t).compose(&g(s)).distance(&g(t + s)) <= 1e-12);
            let id = AffineFlow { t: 0.0, matrix: nalgebra::Matrix5::identity() };
            prop_assert_eq!(g(0.0).distance(&id), 0.0);
        }
    }
}
