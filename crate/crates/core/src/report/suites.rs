//! The individual suites. Each returns its check records unsorted.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{CheckRecord, SuiteOptions};
use crate::classify::{
    characteristic_invariants_verify, lift_to_equivalence, principal_check, verify_bila_procedure,
    verify_reflection, verify_table,
};
use crate::expr::{eval_numeric, normalize, parse, Expr, FnBindings, SampleDomain, ZeroVerdict};
use crate::flows::{tian_fixture, verify_all_cases};
use crate::jet::{
    check_symmetry, condition_expr, determining_residual, symmetry_ansatz, CheckOptions, JetPoint,
    SymmetryCheck, ANSATZ_CONSTANTS,
};
use crate::lie::algebras::{g12, g8, TABLE1, TABLE2};
use crate::lie::{
    adjoint, decompose, structure_table, BaseSpace, Pattern, PatternId, Reducer, VectorField,
};

const ADJOINT_EPS: [f64; 3] = [0.1, 0.7, 1.3];

fn zt(i: usize) -> String {
    format!("Z{}", i + 1)
}

pub fn commutators_suite() -> Vec<CheckRecord> {
    let t = structure_table(&g8()).expect("g8 is closed");
    let mut out = Vec::new();
    for i in 0..8 {
        for j in 0..8 {
            let ours = normalize(&t.entry_expr(i, j));
            let printed = normalize(&parse(TABLE1[i][j]).expect("table text"));
            let ok = ours == printed;
            let mut rec = CheckRecord::new(format!("[{},{}]", zt(i), zt(j)), "commutator table", ok);
            if !ok {
                rec = rec.details(format!("computed {ours}, printed {printed}"));
            }
            out.push(rec);
        }
    }
    out.push(CheckRecord::new("antisymmetry", "commutator table", t.is_antisymmetric()));
    out.push(CheckRecord::new("jacobi", "commutator table", t.jacobi_violation().is_none()));
    let t12 = structure_table(&g12()).expect("g12 is closed");
    out.push(CheckRecord::new("g12 jacobi", "equivalence algebra", t12.jacobi_violation().is_none()));
    out
}

fn label_coeff(e: &Expr, label: &str, eps: f64) -> f64 {
    let point = BTreeMap::from([("eps".to_string(), eps)]);
    eval_numeric(&e.diff(label), &point, &FnBindings::new()).unwrap_or(f64::NAN)
}

pub fn adjoint_suite() -> Vec<CheckRecord> {
    let t = structure_table(&g8()).expect("g8 is closed");
    let labels: Vec<String> = (0..8).map(zt).collect();
    let mut out = Vec::new();
    for i in 0..8 {
        let ad = adjoint(i, &t);
        out.push(
            CheckRecord::new(format!("Ad({}) classified", zt(i)), "adjoint table", ad.unclassified().is_empty())
                .details(format!("{} entries fell back to series", ad.unclassified().len())),
        );
        for j in 0..8 {
            let printed = parse(TABLE2[i][j]).expect("table text");
            let ours = ad.image_expr(j);
            let mut worst: f64 = 0.0;
            for eps in ADJOINT_EPS {
                for l in &labels {
                    let d = (label_coeff(&ours, l, eps) - label_coeff(&printed, l, eps)).abs();
                    worst = if d.is_nan() { f64::INFINITY } else { worst.max(d) };
                }
            }
            let polynomial = ad.entries.iter().all(|row| row[j].class_name() == "polynomial");
            let symbolic = !polynomial || normalize(&ours) == normalize(&printed);
            let ok = worst <= 1e-10 && symbolic;
            let mut rec = CheckRecord::new(format!("Ad({}) {}", zt(i), zt(j)), "adjoint table", ok)
                .residual(worst)
                .details(if polynomial { "exact" } else { "numeric" });
            if !ok {
                rec = rec.details(format!("recomputed {ours}, printed {printed}"));
            }
            out.push(rec);
        }
    }
    out
}

/// Sparse random vectors, so every branch of the reduction is reached.
pub(crate) fn sparse_vector(rng: &mut ChaCha8Rng) -> [f64; 8] {
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

pub fn optimal_suite(opts: &SuiteOptions) -> Vec<CheckRecord> {
    let reducer = Reducer::global();
    let tol = opts.tol.unwrap_or(1e-9);
    let n = opts.points.unwrap_or(10_000);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut reached = BTreeMap::new();
    let (mut reduced, mut worst): (usize, f64) = (0, 0.0);
    for _ in 0..n {
        let a = sparse_vector(&mut rng);
        if let Ok(trace) = reducer.reduce(&a, 1e-12) {
            let r = trace.replay_residual(reducer);
            worst = worst.max(r);
            if r < tol {
                reduced += 1;
            }
            *reached.entry(trace.pattern.id).or_insert(0usize) += 1;
        }
    }
    let mut out = vec![
        CheckRecord::new("random reduction", "optimal system", reduced == n)
            .residual(worst)
            .details(format!("{reduced}/{n} reduced with replay residual < {tol:e}")),
        CheckRecord::new("patterns reached", "optimal system", reached.len() == 12 || n < 1000)
            .details(format!("{} of 12 patterns", reached.len())),
    ];
    let hand: [([f64; 8], PatternId); 3] = [
        ([0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0], PatternId::A1),
        ([1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0], PatternId::A2),
        ([0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0], PatternId::A11),
    ];
    for (a, want) in hand {
        let got = reducer.reduce(&a, 1e-12);
        let ok = got.as_ref().is_ok_and(|t| t.pattern.id == want);
        out.push(
            CheckRecord::new(format!("hand-picked {want}"), "optimal system", ok).details(match got {
                Ok(t) => format!("{} in {} steps", t.pattern, t.steps.len()),
                Err(e) => e.to_string(),
            }),
        );
    }
    out.push(CheckRecord::new(
        "zero vector rejected",
        "optimal system",
        reducer.reduce(&[0.0; 8], 1e-12).is_err(),
    ));
    out
}

fn generic_f() -> Expr {
    parse("exp(x/3)*(2 + sin(y)) + z^2 + x*z").expect("fixed text")
}

/// `pr V (S2 - f)` on the variety against `-condition`, for random constants.
fn determining_numeric(seed: u64, draws: usize) -> (usize, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ansatz = symmetry_ansatz();
    let f = generic_f();
    let fns = FnBindings::new();
    let domain = SampleDomain::default();
    let (mut done, mut worst): (usize, f64) = (0, 0.0);
    let mut attempts = 0;
    while done < draws && attempts < 10 * draws {
        attempts += 1;
        let consts: BTreeMap<String, Expr> = ANSATZ_CONSTANTS
            .iter()
            .map(|c| (c.to_string(), Expr::rational(rng.gen_range(-100..=100), 50)))
            .collect();
        let v = ansatz.substitute(&consts);
        let Ok(p) = JetPoint::sample_on_variety(&f, &fns, &domain, &mut rng) else {
            continue;
        };
        let Ok(check) = SymmetryCheck::new(&v, &f) else {
            continue;
        };
        let (Ok((r, _)), Ok(cond)) = (check.residual(&p, &fns), eval_numeric(&condition_expr(&v, &f), &p.0, &fns))
        else {
            continue;
        };
        worst = worst.max((r + cond).abs() / (1.0 + cond.abs()));
        done += 1;
    }
    (done, worst)
}

pub fn determining_suite(opts: &SuiteOptions) -> Vec<CheckRecord> {
    let ansatz = symmetry_ansatz();
    let mut out = Vec::new();
    let identity = determining_residual(&ansatz).map(|e| e.is_zero());
    out.push(
        CheckRecord::new("symbolic identity", "determining equations", identity == Ok(true))
            .details("restricted invariance condition plus scalar condition normalizes to zero"),
    );
    let draws = opts.points.unwrap_or(200);
    let tol = opts.tol.unwrap_or(1e-8);
    let (done, worst) = determining_numeric(opts.seed, draws);
    out.push(
        CheckRecord::new("numeric oracle", "determining equations", done == draws && worst <= tol)
            .residual(worst)
            .details(format!("{done} draws")),
    );
    let cond = condition_expr(&ansatz, &crate::jet::opaque_f());
    let absent: Vec<&str> = ["c1", "c3", "c4", "c5"]
        .into_iter()
        .filter(|c| !normalize(&cond).contains_var(c))
        .collect();
    out.push(
        CheckRecord::new("free constants", "determining equations", absent.len() == 4)
            .details(format!("absent from the condition: {}", absent.join(", "))),
    );
    let fs = [Expr::one(), parse("exp(x)*sin(y) + z^2").expect("fixed text"), generic_f()];
    let copts = CheckOptions {
        seed: opts.seed,
        ..CheckOptions::default()
    };
    let principal = principal_check(&fs, &FnBindings::new(), &copts);
    let (ok, worst) = match &principal {
        Ok(r) => (r.iter().all(|s| s.pass), r.iter().map(|s| s.max_residual).fold(0.0, f64::max)),
        Err(_) => (false, f64::INFINITY),
    };
    out.push(CheckRecord::new("principal generators", "principal algebra", ok).residual(worst));
    let dil = VectorField::parse(BaseSpace::E4, &[("x", "x")]).expect("fixed field");
    let control = check_symmetry(&dil, &Expr::one(), &FnBindings::new(), &copts);
    out.push(CheckRecord::new(
        "dilation control rejected",
        "principal algebra",
        control.is_ok_and(|r| !r.pass),
    ));
    out
}

pub fn equivalence_suite() -> Vec<CheckRecord> {
    let mut out = Vec::new();
    match verify_bila_procedure() {
        Ok(b) => {
            let a = "equivalence algebra";
            out.push(CheckRecord::new("determining identity", a, b.determining_ok));
            out.push(CheckRecord::new("auxiliary condition", a, b.auxiliary_ok));
            out.push(CheckRecord::new("step 2", a, b.step2_ok));
            out.push(CheckRecord::new("step 3", a, b.step3_ok));
            out.push(
                CheckRecord::new("step 3 as stated", a, true)
                    .flag_if(!b.step3_literal_ok, b.flags.join("; ")),
            );
            out.push(
                CheckRecord::new("emitted generators", a, b.emitted_match)
                    .details(format!("{} generators", b.emitted.len())),
            );
        }
        Err(e) => out.push(CheckRecord::new("procedure", "equivalence algebra", false).details(e.to_string())),
    }
    match verify_reflection() {
        Ok(r) => {
            let a = "reflections";
            let fixed = &r.readings[0];
            let negated = &r.readings[1];
            out.push(CheckRecord::new("reflection with f fixed", a, fixed.preserves));
            out.push(
                CheckRecord::new("reflection with f negated", a, true).flag_if(
                    !(negated.preserves || negated.negates),
                    "mapping f to -f turns S2 - f into S2 + f; only the reading with f fixed is a symmetry of the class",
                ),
            );
            out.push(CheckRecord::new("identity map", a, r.identity_ok));
            out.push(CheckRecord::new(
                "single flip",
                a,
                r.single_flip_s2_invariant && r.single_flip_generic_f_mismatch,
            ));
        }
        Err(e) => out.push(CheckRecord::new("reflection", "reflections", false).details(e.to_string())),
    }
    out
}

pub fn classification_suite(opts: &SuiteOptions) -> Vec<CheckRecord> {
    let points = opts.points.unwrap_or(100);
    let tol = opts.tol.unwrap_or(1e-8);
    let mut out = Vec::new();
    match verify_table(points, tol, opts.seed) {
        Ok(rows) => {
            for r in rows {
                out.push(
                    CheckRecord::new(r.row_id.clone(), "classification table", r.pass)
                        .residual(r.symmetry_check.max_residual)
                        .details(format!(
                            "ansatz {} ({:.1e}), {} instances",
                            r.ansatz_check.verdict, r.ansatz_check.residual, r.instances
                        ))
                        .flag_if(!r.flags.is_empty(), r.flags.join("; ")),
                );
            }
        }
        Err(e) => out.push(CheckRecord::new("table", "classification table", false).details(e.to_string())),
    }
    let g = g8();
    let lift_ok = PatternId::ALL.iter().all(|&id| {
        let p = Pattern {
            id,
            sign: id.signed_index().map(|_| 1),
            alpha: Some(2.0),
            beta: Some(-3.0),
            gamma: Some(5.0),
        };
        let e: Vec<Expr> = p.vector().iter().map(|&x| Expr::int(x as i64)).collect();
        let back = decompose(&lift_to_equivalence(&e).project(BaseSpace::P4), &g);
        back.is_ok_and(|b| b.iter().zip(&e).all(|(q, x)| Expr::num(q.clone()) == *x))
    });
    out.push(CheckRecord::new("lift consistency", "lifting", lift_ok));
    out
}

pub fn invariants_suite() -> Vec<CheckRecord> {
    let g = g8();
    let mut rep = vec![Expr::zero(); 8];
    rep[5] = Expr::var("g");
    rep[6] = Expr::one();
    let a3 = g.combine(&rep);
    let inv: Vec<Expr> = ["x", "y^2 + z^2", "f*exp(-2/g*atan(y/z))"]
        .iter()
        .map(|s| parse(s).expect("fixed text"))
        .collect();
    let mut out = Vec::new();
    let a = "invariants";
    match characteristic_invariants_verify(&a3, &inv) {
        Ok(r) => out.push(
            CheckRecord::new(
                "A3 invariants",
                a,
                r.verdicts.iter().all(|(_, v)| *v == ZeroVerdict::ProvedZero) && r.f_solvable,
            )
            .details("x, y^2 + z^2, f exp(-(2/g) atan(y/z))"),
        ),
        Err(e) => out.push(CheckRecord::new("A3 invariants", a, false).details(e.to_string())),
    }
    let neg = characteristic_invariants_verify(&a3, &[Expr::var("f")]);
    out.push(CheckRecord::new("A3 control", a, neg.is_ok_and(|r| !r.all_zero)));
    let mut rep = vec![Expr::zero(); 8];
    rep[6] = Expr::one();
    let a1 = g.combine(&rep);
    let r = characteristic_invariants_verify(&a1, &["x", "y", "z"].map(Expr::var));
    out.push(
        CheckRecord::new("A1 has no invariant f", a, r.is_ok_and(|r| r.all_zero && !r.f_solvable))
            .details("invariants x, y, z do not involve f"),
    );
    out
}

pub fn flows_suite(opts: &SuiteOptions) -> Vec<CheckRecord> {
    let points = opts.points.unwrap_or(30);
    let tol = opts.tol.unwrap_or(1e-7);
    let mut out = Vec::new();
    match verify_all_cases(points, tol, opts.seed) {
        Ok(cases) => {
            for c in cases {
                let printed = c
                    .printed_formula_match
                    .as_ref()
                    .map_or(String::from("-"), |m| format!("{} / {}", m.verdict, m.reparametrization));
                out.push(
                    CheckRecord::new(format!("case {:02}", c.case), "transformed solutions", c.pass)
                        .residual(c.equivariance_max_residual)
                        .details(format!(
                            "group law {:.1e}, generator {:.1e}, printed solution {printed}",
                            c.group_law_residual, c.generator_residual
                        ))
                        .flag_if(!c.flags.is_empty(), c.flags.join("; ")),
                );
            }
        }
        Err(e) => out.push(CheckRecord::new("cases", "transformed solutions", false).details(e.to_string())),
    }
    let zero = FnBindings::new().with("ω", |_: &[f64], _: &[usize]| Some(0.0));
    let flat = tian_fixture([1.5, -0.5, 2.0], 0.5, zero).and_then(|u| u.s2_at([0.3, -0.2, 0.7]));
    let want = 1.5 * -0.5 + 1.5 * 2.0 + -0.5 * 2.0;
    out.push(
        CheckRecord::new("flat fixture", "transformed solutions", flat == Ok(want))
            .details(format!("S2 = {want}")),
    );
    out
}
