use hessian_sym::classify::*;
use hessian_sym::expr::{rat, Expr, FnBindings};
use hessian_sym::jet::{check_symmetry, CheckOptions, JetError};
use hessian_sym::lie::algebras::g8;
use hessian_sym::lie::{decompose, BaseSpace, Pattern, PatternId};
use proptest::prelude::*;

const SEED: u64 = 20240229;

#[test]
fn every_row_passes_with_expected_flags() {
    let reports = verify_table(100, 1e-8, SEED).unwrap();
    assert_eq!(reports.len(), 15);
    for r in &reports {
        assert!(r.pass, "{r:?}");
        assert!(r.symmetry_check.max_residual <= 1e-8);
        assert!(r.symmetry_check.n_points >= 100);
        assert!(r.ansatz_check.verdict == "ProvedZero" || r.ansatz_check.residual <= 1e-9);
    }
    let flagged: Vec<&str> = reports
        .iter()
        .filter(|r| !r.flags.is_empty())
        .map(|r| r.row_id.as_str())
        .collect();
    assert_eq!(flagged, ["A10(a6=0,b2!=0)", "A11(a7=b3=0,g5!=0)", "A12(a8=b4=0,g6!=0)"]);
    let lifted: Vec<&str> = reports
        .iter()
        .filter(|r| r.symmetry_check.used_lifted_v5)
        .map(|r| r.row_id.as_str())
        .collect();
    assert_eq!(lifted, ["A11(a7=b3=0,g5!=0)", "A12(a8=b4=0,g6!=0)"]);
}

#[test]
fn lifted_operator_is_a_symmetry_for_every_row() {
    let opts = CheckOptions { points: 40, ..CheckOptions::default() };
    for row in TABLE3.iter() {
        for b in row.bindings() {
            let inst = row.instantiate(&b);
            let v = lift_to_symmetry(&inst.rep);
            for fns in h_instances() {
                let r = check_symmetry(&v, &inst.ansatz, &fns, &opts).unwrap();
                assert!(r.pass, "{} {:?}", row.id, b);
            }
        }
    }
}

#[test]
fn exponent_must_match_gamma() {
    let row = TABLE3.iter().find(|r| r.id == "A11(a7=b3=0,g5!=0)").unwrap();
    let mut b = row.bindings().remove(0);
    let z = g8().combine(&row.instantiate(&b).rep);
    b.insert("c".into(), Expr::int(3));
    let off = row.instantiate(&b);
    let r = hessian_sym::expr::is_zero(
        &ansatz_residual(&z, &off.ansatz),
        &hessian_sym::expr::ZeroOptions::default().fns(h_instances().remove(0)),
    )
    .unwrap();
    assert!(!r.is_zero());
}

#[test]
fn printed_operator_fails_where_flagged() {
    let row = TABLE3.iter().find(|r| r.id == "A11(a7=b3=0,g5!=0)").unwrap();
    let inst = row.instantiate(&row.bindings()[0]);
    let fns = &h_instances()[0];
    let r = check_symmetry(&inst.printed_v5, &inst.ansatz, fns, &CheckOptions::default()).unwrap();
    assert!(!r.pass);
    assert!(r.witness.is_some());
}

#[test]
fn missing_slot_derivative_is_an_error() {
    let row = &TABLE3[1];
    let inst = row.instantiate(&row.bindings()[0]);
    let only_values = FnBindings::new().with("H", |a: &[f64], d: &[usize]| {
        d.is_empty().then(|| a[0] + a[1])
    });
    let err = check_symmetry(&inst.printed_v5, &inst.ansatz, &only_values, &CheckOptions::default());
    assert!(matches!(err, Err(JetError::Sampling { .. }) | Err(JetError::Eval(_))), "{err:?}");
}

#[test]
fn canonical_patterns_survive_the_lift() {
    for id in PatternId::ALL {
        let p = Pattern {
            id,
            sign: id.signed_index().map(|_| -1),
            alpha: Some(2.0),
            beta: Some(-1.0),
            gamma: Some(3.0),
        };
        let e: Vec<Expr> = p.vector().iter().map(|&x| Expr::int(x as i64)).collect();
        let back = decompose(&lift_to_equivalence(&e).project(BaseSpace::P4), &g8()).unwrap();
        let want: Vec<_> = p.vector().iter().map(|&x| rat(x as i64, 1)).collect();
        assert_eq!(back, want, "{id}");
    }
}

proptest! {
    #[test]
    fn lift_then_project_recovers_coefficients(v in prop::collection::vec(-20i64..20, 8)) {
        let e: Vec<Expr> = v.iter().map(|&x| Expr::int(x)).collect();
        let back = decompose(&lift_to_equivalence(&e).project(BaseSpace::P4), &g8()).unwrap();
        let want: Vec<_> = v.iter().map(|&x| rat(x, 1)).collect();
        prop_assert_eq!(back, want);
    }
}
