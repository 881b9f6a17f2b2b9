//! The fifteen transformed-solution cases and their verification.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{
    bind_flow, generator_matrix, pushforward_template, random_polynomial, sin_product_omega,
    tian_expr, tian_fixture, AffineFlow, FlowError, ScalarFunctionHandle,
};
use crate::classify::{lift_to_symmetry, PARAM_VALUES, TABLE3};
use crate::expr::{eval_numeric, parse, Expr};
use crate::lie::{BaseSpace, VectorField};

/// A printed transformed solution `amplitude · u0(args) + additive`, `u0`
/// being the fixture. Texts may use `t`, `k` (the printed `1 + t`
/// factor), `s` for `±` and the parameters `a`, `b`, `g`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrintedSolution {
    pub args: [&'static str; 3],
    pub amplitude: &'static str,
    pub additive: &'static str,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CaseSpec {
    pub number: u8,
    pub generator: &'static [(&'static str, &'static str)],
    /// The classification row whose lifted operator this is.
    pub row_id: Option<&'static str>,
    pub signed: bool,
    pub params: &'static [&'static str],
    /// Printed group action on `(x, y, z, u)`.
    pub printed_group: [&'static str; 4],
    pub printed: PrintedSolution,
    pub notes: &'static [&'static str],
}

const IDENTITY: [&str; 3] = ["x", "y", "z"];
const ROT_YZ: [&str; 3] = ["x", "z*sin(g*t) + y*cos(g*t)", "z*cos(g*t) - y*sin(g*t)"];
const ROT_XZ: [&str; 3] = ["z*sin(a*t) + x*cos(a*t)", "y", "z*cos(a*t) - x*sin(a*t)"];
const ROT_XY: [&str; 3] = ["y*sin(b*t) + x*cos(b*t)", "y*cos(b*t) - x*sin(b*t)", "z"];
const SCALED_U: &str = "t*u + u";
const DILATION_NOTE: &str =
    "the operator has no u∂u term, so it is a symmetry of x^(2c-4)H only for c = 0";

const fn translation(add: &'static str, u_row: &'static str, gen: &'static [(&'static str, &'static str)], n: u8) -> CaseSpec {
    CaseSpec {
        number: n,
        generator: gen,
        row_id: None,
        signed: false,
        params: &[],
        printed_group: ["x", "y", "z", u_row],
        printed: PrintedSolution {
            args: IDENTITY,
            amplitude: "1",
            additive: add,
        },
        notes: &[],
    }
}

const fn scaled(
    n: u8,
    gen: &'static [(&'static str, &'static str)],
    row: &'static str,
    signed: bool,
    params: &'static [&'static str],
    args: [&'static str; 3],
) -> CaseSpec {
    CaseSpec {
        number: n,
        generator: gen,
        row_id: Some(row),
        signed,
        params,
        printed_group: [args[0], args[1], args[2], SCALED_U],
        printed: PrintedSolution {
            args,
            amplitude: "1/k",
            additive: "0",
        },
        notes: &[],
    }
}

pub const CASES: [CaseSpec; 15] = [
    translation("-t", "t + u", &[("u", "1")], 1),
    translation("-t*x", "t*x + u", &[("u", "x")], 2),
    translation("-t*y", "t*y + u", &[("u", "y")], 3),
    translation("-t*z", "t*z + u", &[("u", "z")], 4),
    scaled(5, &[("x", "s"), ("u", "u")], "A2", true, &[], ["x + s*t", "y", "z"]),
    scaled(6, &[("y", "g*z"), ("z", "-g*y"), ("u", "u")], "A3(g1!=0)", false, &["g"], ROT_YZ),
    scaled(
        7,
        &[("x", "s"), ("y", "g*z"), ("z", "-g*y"), ("u", "u")],
        "A4(g2!=0)",
        true,
        &["g"],
        ["x + s*t", ROT_YZ[1], ROT_YZ[2]],
    ),
    scaled(8, &[("x", "a*z"), ("z", "-a*x"), ("u", "u")], "A5(a1!=0)", false, &["a"], ROT_XZ),
    scaled(9, &[("y", "s"), ("u", "u")], "A6(a2=0)", true, &[], ["x", "y + s*t", "z"]),
    scaled(
        10,
        &[("x", "a*z"), ("y", "s"), ("z", "-a*x"), ("u", "u")],
        "A6(a2!=0)",
        true,
        &["a"],
        [ROT_XZ[0], "y + s*t", ROT_XZ[2]],
    ),
    scaled(11, &[("x", "b*y"), ("y", "-b*x"), ("u", "u")], "A9(a5=0,b1!=0)", false, &["b"], ROT_XY),
    scaled(12, &[("z", "s"), ("u", "u")], "A10(a6=b2=0)", true, &[], ["x", "y", "z + s*t"]),
    scaled(
        13,
        &[("x", "b*y"), ("y", "-b*x"), ("z", "s"), ("u", "u")],
        "A10(a6=0,b2!=0)",
        true,
        &["b"],
        [ROT_XY[0], ROT_XY[1], "z + s*t"],
    ),
    CaseSpec {
        number: 14,
        generator: &[("x", "x"), ("y", "y"), ("z", "z")],
        row_id: Some("A11(a7=b3=g5=0)"),
        signed: false,
        params: &[],
        printed_group: ["exp(t)*x", "exp(t)*y", "exp(t)*z", "u"],
        printed: PrintedSolution {
            args: ["exp(t)*x", "exp(t)*y", "exp(t)*z"],
            amplitude: "1",
            additive: "0",
        },
        notes: &[DILATION_NOTE],
    },
    CaseSpec {
        number: 15,
        generator: &[("x", "x"), ("y", "y + s"), ("z", "z")],
        row_id: Some("A12(a8=b4=g6=0)"),
        signed: true,
        params: &[],
        printed_group: ["exp(t)*x", "exp(t)*y + s*exp(t) - s", "exp(t)*z", "u"],
        printed: PrintedSolution {
            args: ["exp(t)*x", "exp(t)*y + s*exp(t) - s", "exp(t)*z"],
            amplitude: "1",
            additive: "0",
        },
        notes: &[DILATION_NOTE],
    },
];

impl CaseSpec {
    /// Sign and parameter combinations to test.
    pub fn bindings(&self) -> Vec<BTreeMap<String, Expr>> {
        let mut out = vec![BTreeMap::new()];
        let mut extend = |name: &str, values: Vec<Expr>| {
            out = out
                .iter()
                .flat_map(|m| {
                    values.iter().map(move |v| {
                        let mut m = m.clone();
                        m.insert(name.to_string(), v.clone());
                        m
                    })
                })
                .collect();
        };
        if self.signed {
            extend("s", vec![Expr::int(1), Expr::int(-1)]);
        }
        for p in self.params {
            extend(p, PARAM_VALUES.iter().map(|&(n, d)| Expr::rational(n, d)).collect());
        }
        out
    }

    pub fn generator(&self, b: &BTreeMap<String, Expr>) -> VectorField {
        VectorField::new(
            BaseSpace::E4,
            self.generator
                .iter()
                .map(|(v, s)| (*v, parse(s).expect("case text parses").substitute(b)))
                .collect(),
        )
        .expect("case generators live on (x, y, z, u)")
    }

    /// `2 c_u - 4 c_d`, the rate of the weight `w(t)`.
    pub fn weight_rate(&self, b: &BTreeMap<String, Expr>) -> Result<f64, FlowError> {
        let a = generator_matrix(&self.generator(b))?;
        let dilation = (a[(0, 0)] + a[(1, 1)] + a[(2, 2)]) / 3.0;
        Ok(2.0 * a[(3, 3)] - 4.0 * dilation)
    }

    /// Whether the generator equals the lift of the matching classification row.
    pub fn consistent_with_row(&self, b: &BTreeMap<String, Expr>) -> Option<bool> {
        let row = TABLE3.iter().find(|r| Some(r.id) == self.row_id)?;
        let rep: Vec<Expr> = row.rep.iter().map(|s| parse(s).expect("table text").substitute(b)).collect();
        Some(lift_to_symmetry(&rep) == self.generator(b))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrientationMatch {
    /// `push-forward` uses `G_t`, `pull-back` uses `G_{-t}`.
    pub orientation: &'static str,
    /// How the printed `1 + t` factor is read.
    pub amplitude: &'static str,
    pub max_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrintedFormulaMatch {
    pub verdict: String,
    pub reparametrization: String,
    pub readings: Vec<OrientationMatch>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrintedGroupMatch {
    pub spatial: bool,
    pub u_row_literal: bool,
    pub u_row_reparametrized: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CaseReport {
    pub case: u8,
    pub variants: usize,
    pub group_law_residual: f64,
    pub generator_residual: f64,
    pub equivariance_max_residual: f64,
    pub printed_formula_match: Option<PrintedFormulaMatch>,
    pub printed_group_match: PrintedGroupMatch,
    pub row_consistent: Option<bool>,
    pub flags: Vec<String>,
    pub pass: bool,
}

const GROUP_LAW_TOL: f64 = 1e-12;
const GENERATOR_TOL: f64 = 1e-8;
const MATCH_TOL: f64 = 1e-9;

fn sample_box(rng: &mut ChaCha8Rng) -> [f64; 3] {
    [0, 1, 2].map(|_| rng.gen_range(-1.0..1.0))
}

struct Residuals {
    group_law: f64,
    generator: f64,
    equivariance: f64,
}

fn residuals(
    a: &nalgebra::Matrix5<f64>,
    v: &VectorField,
    rate: f64,
    u: &ScalarFunctionHandle,
    t_samples: &[f64],
    points: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Residuals, FlowError> {
    let mut group_law: f64 = 0.0;
    for &t in t_samples {
        for &s in t_samples {
            let lhs = AffineFlow::from_generator(a, t).compose(&AffineFlow::from_generator(a, s));
            group_law = group_law.max(lhs.distance(&AffineFlow::from_generator(a, t + s)));
        }
    }
    let h = 1e-5;
    let (fwd, bwd) = (AffineFlow::from_generator(a, h), AffineFlow::from_generator(a, -h));
    let mut generator: f64 = 0.0;
    for _ in 0..points.min(20) {
        let p = sample_box(rng);
        let p4 = [p[0], p[1], p[2], rng.gen_range(-1.0..1.0)];
        let pt: BTreeMap<String, f64> = ["x", "y", "z", "u"].iter().map(|k| k.to_string()).zip(p4).collect();
        let (qf, qb) = (fwd.apply(p4), bwd.apply(p4));
        for (i, var) in ["x", "y", "z", "u"].iter().enumerate() {
            let exact = eval_numeric(&v.coeff(var), &pt, &Default::default())?;
            generator = generator.max(((qf[i] - qb[i]) / (2.0 * h) - exact).abs());
        }
    }
    let s2 = u.s2_expr();
    let mut pushed = u.clone();
    pushed.expr = pushforward_template(&u.expr);
    let pushed_s2 = pushed.s2_expr();
    let mut equivariance: f64 = 0.0;
    for &t in t_samples {
        let g = AffineFlow::from_generator(a, t);
        bind_flow(&mut pushed.params, &g)?;
        for _ in 0..points {
            let p = sample_box(rng);
            let q = g.apply([p[0], p[1], p[2], 0.0]);
            let mut at_q = pushed.params.clone();
            for (k, x) in ["x", "y", "z"].iter().zip(q) {
                at_q.insert(k.to_string(), x);
            }
            let lhs = eval_numeric(&pushed_s2, &at_q, &u.fns)?;
            let rhs = (rate * t).exp() * eval_numeric(&s2, &u.point(p), &u.fns)?;
            equivariance = equivariance.max((lhs - rhs).abs() / rhs.abs().max(1.0));
        }
    }
    Ok(Residuals {
        group_law,
        generator,
        equivariance,
    })
}

fn printed_formula(
    spec: &CaseSpec,
    b: &BTreeMap<String, Expr>,
    a: &nalgebra::Matrix5<f64>,
    u: &ScalarFunctionHandle,
    t_samples: &[f64],
    points: usize,
    rng: &mut ChaCha8Rng,
) -> Result<PrintedFormulaMatch, FlowError> {
    let text = |s: &str| parse(s).expect("case text parses").substitute(b);
    let args: Vec<Expr> = spec.printed.args.iter().map(|s| text(s)).collect();
    let printed = text(spec.printed.amplitude)
        * u.expr.subs(&[("x", args[0].clone()), ("y", args[1].clone()), ("z", args[2].clone())])
        + text(spec.printed.additive);
    let uses_k = printed.contains_var("k");
    let amplitudes: &[(&str, fn(f64) -> f64)] = if uses_k {
        &[("1 + t", |t| 1.0 + t), ("e^t", f64::exp)]
    } else {
        &[("none", |_| 1.0)]
    };
    let mut pushed = u.clone();
    pushed.expr = pushforward_template(&u.expr);
    let pts: Vec<[f64; 3]> = (0..points).map(|_| sample_box(rng)).collect();
    let mut readings = Vec::new();
    for (orientation, sign) in [("push-forward", 1.0), ("pull-back", -1.0)] {
        for (amp, k_of) in amplitudes {
            let mut worst: f64 = 0.0;
            for &t in t_samples {
                bind_flow(&mut pushed.params, &AffineFlow::from_generator(a, sign * t))?;
                for p in &pts {
                    let mut pt = u.point(*p);
                    pt.insert("t".into(), t);
                    pt.insert("k".into(), k_of(t));
                    let want = pushed.value(*p)?;
                    let got = eval_numeric(&printed, &pt, &u.fns)?;
                    worst = worst.max((want - got).abs() / want.abs().max(1.0));
                }
            }
            readings.push(OrientationMatch {
                orientation,
                amplitude: amp,
                max_residual: worst,
            });
        }
    }
    let hit = readings.iter().find(|r| r.max_residual <= MATCH_TOL);
    let (verdict, reparametrization) = match hit {
        Some(r) => (
            format!("match ({})", r.orientation),
            match r.amplitude {
                "e^t" => "t -> e^t - 1 in the amplitude 1 + t".to_string(),
                "1 + t" => "literal".to_string(),
                _ => "none".to_string(),
            },
        ),
        None => ("mismatch".to_string(), "none".to_string()),
    };
    Ok(PrintedFormulaMatch {
        verdict,
        reparametrization,
        readings,
    })
}

fn printed_group(
    spec: &CaseSpec,
    b: &BTreeMap<String, Expr>,
    a: &nalgebra::Matrix5<f64>,
    t_samples: &[f64],
    rng: &mut ChaCha8Rng,
) -> Result<PrintedGroupMatch, FlowError> {
    let rows: Vec<Expr> = spec
        .printed_group
        .iter()
        .map(|s| parse(s).expect("case text parses").substitute(b))
        .collect();
    let reparam = rows[3].subs(&[("t", Expr::exp(Expr::var("t")) - Expr::one())]);
    let (mut spatial, mut literal, mut re) = (true, true, true);
    for &t in t_samples {
        let g = AffineFlow::from_generator(a, t);
        for _ in 0..10 {
            let p = sample_box(rng);
            let p4 = [p[0], p[1], p[2], rng.gen_range(-1.0..1.0)];
            let q = g.apply(p4);
            let mut pt: BTreeMap<String, f64> =
                ["x", "y", "z", "u"].iter().map(|k| k.to_string()).zip(p4).collect();
            pt.insert("t".into(), t);
            let close = |e: &Expr, want: f64| -> Result<bool, FlowError> {
                Ok((eval_numeric(e, &pt, &Default::default())? - want).abs() <= MATCH_TOL * (1.0 + want.abs()))
            };
            for i in 0..3 {
                spatial &= close(&rows[i], q[i])?;
            }
            literal &= close(&rows[3], q[3])?;
            re &= close(&reparam, q[3])?;
        }
    }
    Ok(PrintedGroupMatch {
        spatial,
        u_row_literal: literal,
        u_row_reparametrized: re,
    })
}

/// Verify one case for one set of bindings against the given solutions.
/// The printed formula is compared whenever a solution is the fixture.
pub fn verify_case(
    spec: &CaseSpec,
    b: &BTreeMap<String, Expr>,
    solutions: &[ScalarFunctionHandle],
    t_samples: &[f64],
    points: usize,
    tol: f64,
    seed: u64,
) -> Result<CaseReport, FlowError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let v = spec.generator(b);
    let a = generator_matrix(&v)?;
    let rate = spec.weight_rate(b)?;
    let mut report = CaseReport {
        case: spec.number,
        variants: 1,
        group_law_residual: 0.0,
        generator_residual: 0.0,
        equivariance_max_residual: 0.0,
        printed_formula_match: None,
        printed_group_match: printed_group(spec, b, &a, t_samples, &mut rng)?,
        row_consistent: spec.consistent_with_row(b),
        flags: spec.notes.iter().map(|s| s.to_string()).collect(),
        pass: true,
    };
    for u in solutions {
        let r = residuals(&a, &v, rate, u, t_samples, points, &mut rng)?;
        report.group_law_residual = report.group_law_residual.max(r.group_law);
        report.generator_residual = report.generator_residual.max(r.generator);
        report.equivariance_max_residual = report.equivariance_max_residual.max(r.equivariance);
        if u.expr == tian_expr() && report.printed_formula_match.is_none() {
            report.printed_formula_match =
                Some(printed_formula(spec, b, &a, u, t_samples, points.min(20), &mut rng)?);
        }
    }
    if let Some(m) = &report.printed_formula_match {
        if !m.verdict.starts_with("match") || m.reparametrization != "none" {
            report.flags.push(format!(
                "printed solution: {} with amplitude reading {}",
                m.verdict, m.reparametrization
            ));
        }
    }
    if !report.printed_group_match.u_row_literal {
        report.flags.push(format!(
            "printed group u-row `{}` is not the exact flow{}",
            spec.printed_group[3],
            if report.printed_group_match.u_row_reparametrized {
                " (matches after t -> e^t - 1)"
            } else {
                ""
            }
        ));
    }
    report.pass = report.group_law_residual <= GROUP_LAW_TOL
        && report.generator_residual <= GENERATOR_TOL
        && report.equivariance_max_residual <= tol
        && report.printed_group_match.spatial
        && report.row_consistent != Some(false);
    Ok(report)
}

/// The standard solutions: two random polynomials and two fixtures.
pub fn standard_solutions(seed: u64) -> Vec<ScalarFunctionHandle> {
    vec![
        random_polynomial(seed),
        random_polynomial(seed.wrapping_add(1)),
        tian_fixture([1.5, -0.5, 2.0], 0.5, sin_product_omega()).expect("nonzero epsilon"),
        tian_fixture([1.0, 1.0, 1.0], 1.25, sin_product_omega()).expect("nonzero epsilon"),
    ]
}

/// Verify every case over all its variants, merging the variants of each case.
pub fn verify_all_cases(points: usize, tol: f64, seed: u64) -> Result<Vec<CaseReport>, FlowError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let t_samples: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let solutions = standard_solutions(seed);
    let mut out = Vec::new();
    for spec in &CASES {
        let mut merged: Option<CaseReport> = None;
        for b in spec.bindings() {
            let r = verify_case(spec, &b, &solutions, &t_samples, points, tol, seed)?;
            merged = Some(match merged {
                None => r,
                Some(mut m) => {
                    m.variants += 1;
                    m.group_law_residual = m.group_law_residual.max(r.group_law_residual);
                    m.generator_residual = m.generator_residual.max(r.generator_residual);
                    m.equivariance_max_residual =
                        m.equivariance_max_residual.max(r.equivariance_max_residual);
                    if m.printed_formula_match.as_ref().map(|p| &p.verdict)
                        != r.printed_formula_match.as_ref().map(|p| &p.verdict)
                    {
                        m.flags.push("printed-formula verdict differs between variants".into());
                    }
                    m.printed_group_match.spatial &= r.printed_group_match.spatial;
                    m.printed_group_match.u_row_literal &= r.printed_group_match.u_row_literal;
                    m.printed_group_match.u_row_reparametrized &=
                        r.printed_group_match.u_row_reparametrized;
                    m.row_consistent = match (m.row_consistent, r.row_consistent) {
                        (Some(x), Some(y)) => Some(x && y),
                        (x, y) => x.or(y),
                    };
                    m.pass &= r.pass;
                    m
                }
            });
        }
        out.push(merged.expect("every case has a binding"));
    }
    Ok(out)
}
