use std::collections::BTreeMap;

use hessian_sym::expr::{eval_numeric, normalize, parse, Expr, FnBindings};
use hessian_sym::lie::algebras::{g12, g8, TABLE1, TABLE2};
use hessian_sym::lie::{
    adjoint, commutator, decompose, reduce_to_optimal, structure_table, BaseSpace, PatternId,
    Reducer, StructureTable, VectorField,
};
use num_traits::ToPrimitive;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SAMPLE_EPS: [f64; 5] = [0.1, 0.7, 1.3, -0.9, 2.0];

fn table() -> StructureTable {
    structure_table(&g8()).unwrap()
}

/// `exp(-eps ad_i)` by a long Taylor sum straight from the structure constants.
fn taylor_adjoint(t: &StructureTable, i: usize, eps: f64) -> Vec<Vec<f64>> {
    let n = t.len();
    let m: Vec<Vec<f64>> = t
        .ad_matrix(i)
        .iter()
        .map(|row| row.iter().map(|q| -q.to_f64().unwrap() * eps).collect())
        .collect();
    let mut sum = vec![vec![0.0; n]; n];
    let mut term: Vec<Vec<f64>> = (0..n)
        .map(|r| (0..n).map(|c| if r == c { 1.0 } else { 0.0 }).collect())
        .collect();
    for k in 1..80 {
        for r in 0..n {
            for c in 0..n {
                sum[r][c] += term[r][c];
            }
        }
        term = (0..n)
            .map(|r| {
                (0..n)
                    .map(|c| (0..n).map(|l| m[r][l] * term[l][c]).sum::<f64>() / k as f64)
                    .collect()
            })
            .collect();
    }
    sum
}

fn coeff_of(e: &Expr, label: &str, eps: f64) -> f64 {
    let point = BTreeMap::from([("eps".to_string(), eps)]);
    eval_numeric(&e.diff(label), &point, &FnBindings::new()).unwrap()
}

#[test]
fn commutator_table_matches_printed_table() {
    let t = table();
    let mut checked = 0;
    for i in 0..8 {
        for j in 0..8 {
            let want = normalize(&parse(TABLE1[i][j]).unwrap());
            assert_eq!(normalize(&t.entry_expr(i, j)), want, "[Z{}, Z{}]", i + 1, j + 1);
            checked += 1;
        }
    }
    assert_eq!(checked, 64);
    assert!(t.is_antisymmetric());
    assert_eq!(t.jacobi_violation(), None);
}

#[test]
fn g12_is_closed_and_y1_y12_bracket() {
    let g = g12();
    let t = structure_table(&g).unwrap();
    assert_eq!(t.jacobi_violation(), None);
    // [Y1, Y12] = Y1
    let mut want = vec![0.0; 12];
    want[0] = 1.0;
    let got: Vec<f64> = t.bracket(0, 11).iter().map(|q| q.to_f64().unwrap()).collect();
    assert_eq!(got, want);
}

#[test]
fn adjoint_table_matches_printed_table() {
    let t = table();
    let labels: Vec<String> = (1..=8).map(|k| format!("Z{k}")).collect();
    for i in 0..8 {
        let ad = adjoint(i, &t);
        assert!(ad.unclassified().is_empty());
        for j in 0..8 {
            let printed = parse(TABLE2[i][j]).unwrap();
            let ours = ad.image_expr(j);
            for eps in [0.1, 0.7, 1.3] {
                for l in &labels {
                    let (a, b) = (coeff_of(&ours, l, eps), coeff_of(&printed, l, eps));
                    assert!((a - b).abs() < 1e-10, "Ad(Z{}) Z{} at {eps}: {l}", i + 1, j + 1);
                }
            }
            if ad.entries.iter().all(|row| row[j].class_name() == "polynomial") {
                assert_eq!(normalize(&ours), normalize(&printed));
            }
        }
    }
}

#[test]
fn closed_forms_agree_with_taylor_oracle() {
    let t = table();
    for i in 0..8 {
        let ad = adjoint(i, &t);
        for eps in SAMPLE_EPS {
            let closed = ad.eval(eps);
            let series = taylor_adjoint(&t, i, eps);
            for k in 0..8 {
                for j in 0..8 {
                    assert!((closed[k][j] - series[k][j]).abs() < 1e-10);
                }
            }
        }
    }
}

#[test]
fn adjoint_inverse_and_identity() {
    let t = table();
    for i in 0..8 {
        let ad = adjoint(i, &t);
        for eps in SAMPLE_EPS {
            let (p, m) = (ad.eval(eps), ad.eval(-eps));
            for r in 0..8 {
                for c in 0..8 {
                    let v: f64 = (0..8).map(|k| p[r][k] * m[k][c]).sum();
                    let want = if r == c { 1.0 } else { 0.0 };
                    assert!((v - want).abs() < 1e-10);
                }
            }
        }
    }
}

/// `Ad [Z_i, Z_j] = [Ad Z_i, Ad Z_j]` in coordinates.
#[test]
fn adjoint_is_an_automorphism() {
    let t = table();
    let c: Vec<Vec<Vec<f64>>> = t
        .c
        .iter()
        .map(|r| r.iter().map(|v| v.iter().map(|q| q.to_f64().unwrap()).collect()).collect())
        .collect();
    for g in 0..8 {
        let ad = adjoint(g, &t);
        for eps in SAMPLE_EPS {
            let a = ad.eval(eps);
            for i in 0..8 {
                for j in 0..8 {
                    let lhs = ad.apply(eps, &c[i][j]);
                    let mut rhs = [0.0; 8];
                    for k in 0..8 {
                        for l in 0..8 {
                            let w = a[k][i] * a[l][j];
                            if w != 0.0 {
                                for (m, r) in rhs.iter_mut().enumerate() {
                                    *r += w * c[k][l][m];
                                }
                            }
                        }
                    }
                    for m in 0..8 {
                        assert!((lhs[m] - rhs[m]).abs() < 1e-9);
                    }
                }
            }
        }
    }
}

#[test]
fn brackets_of_g8_fields_decompose_back() {
    let g = g8();
    let t = table();
    for i in 0..8 {
        for j in 0..8 {
            let b = commutator(g.field(i), g.field(j)).unwrap();
            assert_eq!(decompose(&b, &g).unwrap(), t.bracket(i, j).to_vec());
        }
    }
}

/// Random 8-vectors with random zero patterns so every branch is exercised.
fn random_vector(rng: &mut ChaCha8Rng) -> [f64; 8] {
    let mut a = [0.0; 8];
    for x in a.iter_mut() {
        if rng.gen_bool(0.6) {
            *x = rng.gen_range(-2.0..2.0);
        }
    }
    if a[7] == 0.0 && a[6] == 0.0 {
        a[6] = rng.gen_range(0.5..2.0);
    }
    a
}

#[test]
fn reducer_is_total_on_random_vectors() {
    let reducer = Reducer::global();
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut seen = BTreeMap::new();
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let a = random_vector(&mut rng);
        let trace = reduce_to_optimal(&a, 1e-12).unwrap();
        let r = trace.replay_residual(reducer);
        assert!(r < 1e-9, "{a:?}: residual {r}");
        worst = worst.max(r);
        *seen.entry(trace.pattern.id).or_insert(0) += 1;
    }
    assert_eq!(seen.len(), 12, "{seen:?}");
    assert!(PatternId::ALL.iter().all(|p| seen.contains_key(p)));
}

#[test]
fn dense_case_two_vectors_land_on_a11_or_a12() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..200 {
        let mut a = [0.0; 8];
        for x in a.iter_mut() {
            *x = rng.gen_range(-1.0..1.0);
        }
        a[7] = rng.gen_range(0.5..1.5);
        let t = reduce_to_optimal(&a, 1e-12).unwrap();
        assert!(matches!(t.pattern.id, PatternId::A11 | PatternId::A12));
    }
}

fn poly_coeff() -> impl Strategy<Value = Expr> {
    prop::collection::vec((-3i64..4, 0u32..3, 0u32..2, 0u32..2), 1..4).prop_map(|terms| {
        Expr::add(
            terms
                .into_iter()
                .map(|(c, i, j, k)| {
                    Expr::int(c)
                        * Expr::var("x").powi(i.into())
                        * Expr::var("y").powi(j.into())
                        * Expr::var("u").powi(k.into())
                })
                .collect(),
        )
    })
}

fn field() -> impl Strategy<Value = VectorField> {
    prop::collection::vec(poly_coeff(), 4).prop_map(|cs| {
        let pairs = ["x", "y", "z", "u"].into_iter().zip(cs).collect();
        VectorField::new(BaseSpace::E4, pairs).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bracket_is_antisymmetric(v in field(), w in field()) {
        let s = commutator(&v, &w).unwrap().add(&commutator(&w, &v).unwrap()).unwrap();
        prop_assert!(s.is_zero());
    }

    #[test]
    fn jacobi_on_random_fields(v in field(), w in field(), x in field()) {
        let a = commutator(&v, &commutator(&w, &x).unwrap()).unwrap();
        let b = commutator(&w, &commutator(&x, &v).unwrap()).unwrap();
        let c = commutator(&x, &commutator(&v, &w).unwrap()).unwrap();
        prop_assert!(a.add(&b).unwrap().add(&c).unwrap().is_zero());
    }

    #[test]
    fn jacobi_on_g8_triples(i in 0usize..8, j in 0usize..8, k in 0usize..8) {
        let g = g8();
        let (a, b, c) = (g.field(i), g.field(j), g.field(k));
        let s = commutator(a, &commutator(b, c).unwrap()).unwrap()
            .add(&commutator(b, &commutator(c, a).unwrap()).unwrap()).unwrap()
            .add(&commutator(c, &commutator(a, b).unwrap()).unwrap()).unwrap();
        prop_assert!(s.is_zero());
    }
}
