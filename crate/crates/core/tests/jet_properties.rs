use std::collections::BTreeMap;

use hessian_sym::expr::{eval_numeric, normalize, parse, Expr, FnBindings, SampleDomain};
use hessian_sym::jet::{
    auxiliary_residual, check_symmetry, condition_expr, delta_expr, determining_residual,
    determining_system, emitted_generators, equivalence_ansatz,
    equivalence_determining_residual, hessian2_expr, invariance_expr, opaque_f, prolong2,
    restrict_to_variety, sigma2_of_matrix, symmetry_ansatz, CheckOptions, JetPoint,
    EQUIVALENCE_CONSTANT_TO_Y, U_JETS,
};
use hessian_sym::lie::algebras::{g12, principal, G12_FIELDS};
use hessian_sym::lie::{commutator, BaseSpace, VectorField};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn p(s: &str) -> Expr {
    parse(s).unwrap()
}

/// Eigenvalues of a symmetric 3×3 matrix by cyclic Jacobi rotations.
fn jacobi_eigenvalues(mut a: [[f64; 3]; 3]) -> [f64; 3] {
    for _ in 0..50 {
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            if a[i][j].abs() < 1e-300 {
                continue;
            }
            let theta = (a[j][j] - a[i][i]) / (2.0 * a[i][j]);
            let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
            let t = if theta == 0.0 { 1.0 } else { t };
            let c = 1.0 / (t * t + 1.0).sqrt();
            let s = t * c;
            let mut r = [[0.0; 3]; 3];
            for (k, row) in r.iter_mut().enumerate() {
                row[k] = 1.0;
            }
            r[i][i] = c;
            r[j][j] = c;
            r[i][j] = s;
            r[j][i] = -s;
            a = mat_mul(&transpose(&r), &mat_mul(&a, &r));
        }
    }
    [a[0][0], a[1][1], a[2][2]]
}

fn transpose(a: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let mut t = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            t[i][j] = a[j][i];
        }
    }
    t
}

fn mat_mul(a: &[[f64; 3]; 3], b: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let mut c = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            c[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    c
}

fn random_symmetric(rng: &mut ChaCha8Rng) -> [[f64; 3]; 3] {
    let mut h = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in i..3 {
            h[i][j] = rng.gen_range(-3.0..3.0);
            h[j][i] = h[i][j];
        }
    }
    h
}

fn rotation(rng: &mut ChaCha8Rng) -> [[f64; 3]; 3] {
    let mut axis = [0.0f64; 3];
    for a in &mut axis {
        *a = rng.gen_range(-1.0..1.0);
    }
    let n = axis.iter().map(|a| a * a).sum::<f64>().sqrt();
    let [x, y, z] = axis.map(|a| a / n);
    let th: f64 = rng.gen_range(-3.0..3.0);
    let (s, c) = th.sin_cos();
    let k = 1.0 - c;
    [
        [c + x * x * k, x * y * k - z * s, x * z * k + y * s],
        [y * x * k + z * s, c + y * y * k, y * z * k - x * s],
        [z * x * k - y * s, z * y * k + x * s, c + z * z * k],
    ]
}

#[test]
fn sigma2_matches_eigenvalue_oracle_and_is_rotation_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..500 {
        let h = random_symmetric(&mut rng);
        let [a, b, c] = jacobi_eigenvalues(h);
        let oracle = a * b + a * c + b * c;
        let s = sigma2_of_matrix(&h);
        assert!((s - oracle).abs() <= 1e-10 * (1.0 + oracle.abs()), "{s} vs {oracle}");
        let r = rotation(&mut rng);
        let rot = mat_mul(&transpose(&r), &mat_mul(&h, &r));
        assert!((sigma2_of_matrix(&rot) - s).abs() <= 1e-10 * (1.0 + s.abs()));
        let point: BTreeMap<String, f64> = [
            ("u_xx", h[0][0]),
            ("u_yy", h[1][1]),
            ("u_zz", h[2][2]),
            ("u_xy", h[0][1]),
            ("u_xz", h[0][2]),
            ("u_yz", h[1][2]),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect();
        let e = eval_numeric(&hessian2_expr(), &point, &FnBindings::new()).unwrap();
        assert!((e - s).abs() < 1e-12 * (1.0 + s.abs()));
    }
}

#[test]
fn variety_points_satisfy_the_equation() {
    let f = p("exp(x/2)*(y^2 + 1) - z");
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let fns = FnBindings::new();
    let delta = delta_expr(&f);
    let mut done = 0;
    while done < 1000 {
        let Ok(pt) = JetPoint::sample_on_variety(&f, &fns, &SampleDomain::default(), &mut rng) else {
            continue;
        };
        let d = eval_numeric(&delta, &pt.0, &fns).unwrap();
        assert!(d.abs() <= 1e-12 * (1.0 + pt.get("f").abs()), "{d}");
        done += 1;
    }
}

#[test]
fn invariance_examples() {
    let fns = FnBindings::new();
    let opts = CheckOptions::default();
    let f = p("exp(2*x)*(y^2 + z^2 + 1)");
    let v = VectorField::parse(BaseSpace::E4, &[("x", "1"), ("u", "u")]).unwrap();
    assert!(check_symmetry(&v, &f, &fns, &opts).unwrap().pass);
    let dx = VectorField::parse(BaseSpace::E4, &[("x", "1")]).unwrap();
    let r = check_symmetry(&dx, &f, &fns, &opts).unwrap();
    assert!(!r.pass);
    // the residual at the witness is -f_x
    let w = r.witness.unwrap();
    let res = eval_numeric(&invariance_expr(&dx, &f).unwrap(), &w.0, &fns).unwrap();
    let fx = eval_numeric(&f.diff("x"), &w.0, &fns).unwrap();
    assert!((res + fx).abs() < 1e-9 * (1.0 + fx.abs()));

    let v3 = VectorField::parse(BaseSpace::E4, &[("u", "y")]).unwrap();
    let poly = p("3*x^2*y - y*z^3 + 2*x*z + 7");
    assert!(check_symmetry(&v3, &poly, &fns, &opts).unwrap().pass);
}

#[test]
fn principal_generators_hold_for_any_f() {
    let fns = FnBindings::new();
    for f in ["1", "exp(x)*sin(y) + z^2", "x*y*z - 3"] {
        for v in principal().fields() {
            let r = check_symmetry(v, &p(f), &fns, &CheckOptions::default()).unwrap();
            assert!(r.pass, "{v} with f = {f}");
        }
    }
}

/// `f(x, y, z) = exp(x/3) (2 + sin y) + z^2 + x z` with its gradient.
fn bound_f() -> FnBindings {
    FnBindings::new().with("f", |v: &[f64], d: &[usize]| {
        let (x, y, z) = (v[0], v[1], v[2]);
        let e = (x / 3.0).exp();
        Some(match d {
            [] => e * (2.0 + y.sin()) + z * z + x * z,
            [0] => e * (2.0 + y.sin()) / 3.0 + z,
            [1] => e * y.cos(),
            [2] => 2.0 * z + x,
            _ => return None,
        })
    })
}

/// Independent evaluation of `pr^(2) V (S2 - f)` for affine `V`: with
/// `ξ = A x + b` and `φ = k u + (linear in x)`, the second-order
/// coefficients are `k U - (A^T U + U A)`, and `dσ2/dU = tr(U) I - U`.
fn affine_oracle(c: &[f64; 12], pt: &JetPoint, fns: &FnBindings) -> f64 {
    let a = [
        [c[5], c[6], c[7]],
        [-c[6], c[5], c[9]],
        [-c[7], -c[9], c[5]],
    ];
    let u = pt.hessian();
    let k = c[1];
    let mut phi2 = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let mut s = k * u[i][j];
            for l in 0..3 {
                s -= a[l][i] * u[l][j] + a[l][j] * u[i][l];
            }
            phi2[i][j] = s;
        }
    }
    let tr = u[0][0] + u[1][1] + u[2][2];
    let mut acc = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            let g = if i == j { tr - u[i][j] } else { -u[i][j] };
            acc += g * phi2[i][j];
        }
    }
    let (x, y, z) = (pt.get("x"), pt.get("y"), pt.get("z"));
    let xi = [
        c[5] * x + c[6] * y + c[7] * z + c[8],
        c[9] * z + c[5] * y - c[6] * x + c[10],
        -c[9] * y + c[5] * z - c[7] * x + c[11],
    ];
    let f = fns.get("f").unwrap();
    let args = [x, y, z];
    let grad: f64 = (0..3).map(|i| xi[i] * f.eval(&args, &[i]).unwrap()).sum();
    acc - grad
}

#[test]
fn determining_identity_agrees_with_numeric_oracle() {
    let ansatz = symmetry_ansatz();
    assert!(determining_residual(&ansatz).unwrap().is_zero());
    let fns = bound_f();
    let inv = invariance_expr(&ansatz, &opaque_f()).unwrap();
    let cond = condition_expr(&ansatz, &opaque_f());
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut draws = 0;
    while draws < 200 {
        let Ok(mut pt) =
            JetPoint::sample_on_variety(&opaque_f(), &fns, &SampleDomain::default(), &mut rng)
        else {
            continue;
        };
        let mut c = [0.0; 12];
        for (i, ci) in c.iter_mut().enumerate() {
            *ci = rng.gen_range(-2.0..2.0);
            pt.set(&format!("c{}", i + 1), *ci);
        }
        let symbolic = eval_numeric(&inv, &pt.0, &fns).unwrap();
        let condition = -eval_numeric(&cond, &pt.0, &fns).unwrap();
        let oracle = affine_oracle(&c, &pt, &fns);
        let scale = 1.0 + oracle.abs();
        assert!((symbolic - oracle).abs() <= 1e-8 * scale, "{symbolic} vs {oracle}");
        assert!((condition - oracle).abs() <= 1e-8 * scale, "{condition} vs {oracle}");
        draws += 1;
    }
}

#[test]
fn free_constants_do_not_enter_the_condition() {
    let f = opaque_f();
    let restricted = restrict_to_variety(&invariance_expr(&symmetry_ansatz(), &f).unwrap(), &f);
    for c in ["c1", "c3", "c4", "c5"] {
        assert!(normalize(&restricted.diff(c)).is_zero(), "{c}");
    }
    for c in ["c2", "c6", "c7"] {
        assert!(!normalize(&restricted.diff(c)).is_zero(), "{c}");
    }
    let free = VectorField::parse(BaseSpace::E4, &[("u", "c1*x + c3*y + c4*z + c5")]).unwrap();
    let e = restrict_to_variety(&invariance_expr(&free, &f).unwrap(), &f);
    assert!(e.is_zero());
}

#[test]
fn generated_system_matches_the_ansatz() {
    let generic = determining_system(None).unwrap();
    assert!(generic.len() > 10);
    let instantiated = determining_system(Some(&symmetry_ansatz())).unwrap();
    // What survives is exactly -(u_xx + u_zz) times the scalar condition.
    let cond = condition_expr(&symmetry_ansatz(), &opaque_f());
    let mut monos: Vec<&str> = instantiated.iter().map(|e| e.monomial.as_str()).collect();
    monos.sort();
    assert_eq!(monos, vec!["u_xx", "u_zz"]);
    for eq in &instantiated {
        assert_eq!(normalize(&(&eq.expr + &cond)), Expr::zero(), "{}", eq.monomial);
    }
}

#[test]
fn equivalence_generators() {
    let ansatz = equivalence_ansatz();
    assert!(equivalence_determining_residual(&ansatz).unwrap().is_zero());
    assert!(auxiliary_residual(&ansatz).is_zero());
    for y in g12().fields() {
        assert!(equivalence_determining_residual(y).unwrap().is_zero(), "{y}");
        assert!(auxiliary_residual(y).is_zero());
    }
    let emitted = emitted_generators(&ansatz);
    for (yi, &c) in EQUIVALENCE_CONSTANT_TO_Y.iter().enumerate() {
        let want = VectorField::parse(BaseSpace::E5, G12_FIELDS[yi]).unwrap();
        assert_eq!(emitted[c - 1].1, want, "Y{}", yi + 1);
    }
    let no_psi = ansatz
        .substitute(&[("c3", Expr::one()), ("c6", Expr::zero())].into_iter().map(|(k, v)| (k.to_string(), v)).collect());
    let no_psi = VectorField::new(
        BaseSpace::E5,
        ["x", "y", "z", "u"].iter().map(|v| (*v, no_psi.coeff(v))).collect(),
    )
    .unwrap();
    assert!(!equivalence_determining_residual(&no_psi).unwrap().is_zero());
}

fn random_jet_point(rng: &mut ChaCha8Rng, extra: &[&str]) -> BTreeMap<String, f64> {
    let mut m = BTreeMap::new();
    for v in ["x", "y", "z", "u", "f", "f_x", "f_y", "f_z"]
        .iter()
        .chain(U_JETS.iter())
        .chain(extra.iter())
    {
        m.insert(v.to_string(), rng.gen_range(-1.5..1.5));
    }
    for v in ["f_xx", "f_xy", "f_xz", "f_yy", "f_yz", "f_zz"] {
        m.insert(v.to_string(), rng.gen_range(-1.5..1.5));
    }
    m
}

fn e4_fields() -> Vec<VectorField> {
    let mut out: Vec<VectorField> = principal().fields().to_vec();
    out.extend(g12().fields().iter().map(|y| y.project(BaseSpace::E4)));
    out.push(VectorField::parse(BaseSpace::E4, &[("x", "x*u"), ("y", "y^2"), ("u", "u^2 + z")]).unwrap());
    out
}

#[test]
fn prolongation_commutes_with_brackets() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let fields = e4_fields();
    let fns = FnBindings::new();
    let prolonged: Vec<_> = fields.iter().map(|v| prolong2(v).unwrap()).collect();
    for _ in 0..60 {
        let (i, j) = (rng.gen_range(0..fields.len()), rng.gen_range(0..fields.len()));
        let b = prolong2(&commutator(&fields[i], &fields[j]).unwrap()).unwrap();
        let (pv, pw) = (&prolonged[i], &prolonged[j]);
        for name in U_JETS {
            let lhs = b.coeff(name);
            let rhs = pv.apply(&pw.coeff(name)) - pw.apply(&pv.coeff(name));
            for _ in 0..3 {
                let pt = random_jet_point(&mut rng, &[]);
                let (l, r) = (
                    eval_numeric(&lhs, &pt, &fns).unwrap(),
                    eval_numeric(&rhs, &pt, &fns).unwrap(),
                );
                assert!((l - r).abs() < 1e-9 * (1.0 + l.abs()), "{name}: {l} vs {r}");
            }
        }
    }
}

fn poly_coeff() -> impl Strategy<Value = Expr> {
    prop::collection::vec((-3i64..4, 0u32..2, 0u32..2, 0u32..2, 0u32..3), 1..4).prop_map(|terms| {
        Expr::add(
            terms
                .into_iter()
                .map(|(c, i, j, k, l)| {
                    Expr::int(c)
                        * Expr::var("x").powi(i.into())
                        * Expr::var("y").powi(j.into())
                        * Expr::var("z").powi(k.into())
                        * Expr::var("u").powi(l.into())
                })
                .collect(),
        )
    })
}

fn field() -> impl Strategy<Value = VectorField> {
    prop::collection::vec(poly_coeff(), 4).prop_map(|cs| {
        VectorField::new(BaseSpace::E4, ["x", "y", "z", "u"].into_iter().zip(cs).collect()).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn prolongation_is_linear(v in field(), w in field(), a in -3i64..4, b in -3i64..4) {
        let (a, b) = (Expr::int(a), Expr::int(b));
        let combo = v.scale(&a).add(&w.scale(&b)).unwrap();
        let (pc, pv, pw) = (prolong2(&combo).unwrap(), prolong2(&v).unwrap(), prolong2(&w).unwrap());
        for name in U_JETS {
            let diff = pc.coeff(name) - &a * pv.coeff(name) - &b * pw.coeff(name);
            prop_assert!(normalize(&diff).is_zero(), "{}", name);
        }
    }

    #[test]
    fn prolonged_bracket_on_random_fields(v in field(), w in field(), seed in 0u64..1000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = prolong2(&commutator(&v, &w).unwrap()).unwrap();
        let (pv, pw) = (prolong2(&v).unwrap(), prolong2(&w).unwrap());
        let fns = FnBindings::new();
        for name in ["u_x", "u_yz", "u_zz"] {
            let rhs = pv.apply(&pw.coeff(name)) - pw.apply(&pv.coeff(name));
            let pt = random_jet_point(&mut rng, &[]);
            let l = eval_numeric(&b.coeff(name), &pt, &fns).unwrap();
            let r = eval_numeric(&rhs, &pt, &fns).unwrap();
            prop_assert!((l - r).abs() < 1e-9 * (1.0 + l.abs()));
        }
    }
}
