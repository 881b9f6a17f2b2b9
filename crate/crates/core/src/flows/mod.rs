//! One-parameter groups of affine vector fields on `(x, y, z, u)` and the
//! transformation of solutions they induce.

mod cases;

use std::collections::BTreeMap;

use nalgebra::{Matrix5, Vector5};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::expr::{collect_monomials, eval_numeric, normalize, EvalError, Expr, FnBindings};
use crate::jet::hessian2_expr;
use crate::lie::{BaseSpace, VectorField};

pub use cases::{
    standard_solutions, verify_all_cases, verify_case, CaseReport, CaseSpec, OrientationMatch, PrintedFormulaMatch,
    PrintedGroupMatch, PrintedSolution, CASES,
};

const VARS: [&str; 4] = ["x", "y", "z", "u"];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FlowError {
    #[error("coefficient of ∂{var} is not affine with numeric coefficients: {coeff}")]
    NonAffine { var: String, coeff: String },
    #[error("only fields on (x, y, z, u) have affine flows here")]
    UnsupportedBase,
    #[error("epsilon must be nonzero")]
    ZeroEpsilon,
    #[error("spatial rows of the flow depend on u")]
    SpatialDependsOnU,
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// The generator of `V` as a matrix on homogeneous coordinates `(x, y, z, u, 1)`.
pub fn generator_matrix(v: &VectorField) -> Result<Matrix5<f64>, FlowError> {
    if v.base() != BaseSpace::E4 {
        return Err(FlowError::UnsupportedBase);
    }
    let mut a = Matrix5::zeros();
    for (row, var) in VARS.iter().enumerate() {
        let c = normalize(&v.coeff(var));
        let bad = || FlowError::NonAffine {
            var: var.to_string(),
            coeff: c.to_string(),
        };
        let monos = collect_monomials(&c, &VARS).map_err(|_| bad())?;
        for (k, coeff) in monos {
            let value = coeff.to_f64().filter(|_| coeff.as_num().is_some()).ok_or_else(bad)?;
            match k.iter().sum::<u32>() {
                0 => a[(row, 4)] = value,
                1 => a[(row, k.iter().position(|&e| e == 1).expect("degree one"))] = value,
                _ => return Err(bad()),
            }
        }
    }
    Ok(a)
}

/// `exp(t A)` for an affine generator `A`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineFlow {
    pub t: f64,
    pub matrix: Matrix5<f64>,
}

impl AffineFlow {
    pub fn from_generator(a: &Matrix5<f64>, t: f64) -> AffineFlow {
        AffineFlow {
            t,
            matrix: (a * t).exp(),
        }
    }

    pub fn apply(&self, p: [f64; 4]) -> [f64; 4] {
        let q = self.matrix * Vector5::new(p[0], p[1], p[2], p[3], 1.0);
        [q[0], q[1], q[2], q[3]]
    }

    pub fn compose(&self, other: &AffineFlow) -> AffineFlow {
        AffineFlow {
            t: self.t + other.t,
            matrix: self.matrix * other.matrix,
        }
    }

    /// Largest entry of `self - other`.
    pub fn distance(&self, other: &AffineFlow) -> f64 {
        (self.matrix - other.matrix).amax()
    }

    /// `u ↦ a u + m·(x, y, z) + b` as `(a, m, b)`, if the spatial rows do not involve `u`.
    pub fn u_row(&self) -> Result<(f64, [f64; 3], f64), FlowError> {
        if (0..3).any(|r| self.matrix[(r, 3)].abs() > 1e-14) {
            return Err(FlowError::SpatialDependsOnU);
        }
        let m = &self.matrix;
        Ok((m[(3, 3)], [m[(3, 0)], m[(3, 1)], m[(3, 2)]], m[(3, 4)]))
    }
}

/// The flow of `V` at time `t`.
pub fn flow_of(v: &VectorField, t: f64) -> Result<AffineFlow, FlowError> {
    Ok(AffineFlow::from_generator(&generator_matrix(v)?, t))
}

/// `u(x, y, z)` as an expression, with numeric parameters and bound opaque
/// functions.
#[derive(Debug, Clone)]
pub struct ScalarFunctionHandle {
    pub expr: Expr,
    pub params: BTreeMap<String, f64>,
    pub fns: FnBindings,
}

impl ScalarFunctionHandle {
    pub fn new(expr: Expr) -> ScalarFunctionHandle {
        ScalarFunctionHandle {
            expr,
            params: BTreeMap::new(),
            fns: FnBindings::new(),
        }
    }

    fn point(&self, p: [f64; 3]) -> BTreeMap<String, f64> {
        let mut pt = self.params.clone();
        for (v, x) in VARS.iter().zip(p) {
            pt.insert(v.to_string(), x);
        }
        pt
    }

    pub fn value(&self, p: [f64; 3]) -> Result<f64, FlowError> {
        Ok(eval_numeric(&self.expr, &self.point(p), &self.fns)?)
    }

    /// `S2[u]` from symbolic second derivatives.
    pub fn s2_expr(&self) -> Expr {
        let d = |a: &str, b: &str| self.expr.diff(a).diff(b);
        hessian2_expr().subs(&[
            ("u_xx", d("x", "x")),
            ("u_xy", d("x", "y")),
            ("u_xz", d("x", "z")),
            ("u_yy", d("y", "y")),
            ("u_yz", d("y", "z")),
            ("u_zz", d("z", "z")),
        ])
    }

    pub fn s2_at(&self, p: [f64; 3]) -> Result<f64, FlowError> {
        Ok(eval_numeric(&self.s2_expr(), &self.point(p), &self.fns)?)
    }
}

const FLOW_PARAM: [[&str; 4]; 3] = [
    ["g00", "g01", "g02", "g04"],
    ["g10", "g11", "g12", "g14"],
    ["g20", "g21", "g22", "g24"],
];

/// `ũ` with `ũ(G p) = a u(p) + m·p + b`, the entries of `G⁻¹` and of the
/// `u`-row left as parameters.
pub(crate) fn pushforward_template(u: &Expr) -> Expr {
    let q = ["x", "y", "z"].map(Expr::var);
    let back: Vec<Expr> = (0..3)
        .map(|r| {
            let mut terms: Vec<Expr> = (0..3).map(|c| Expr::var(FLOW_PARAM[r][c]) * &q[c]).collect();
            terms.push(Expr::var(FLOW_PARAM[r][3]));
            Expr::add(terms)
        })
        .collect();
    let pulled = u.subs(&[("x", back[0].clone()), ("y", back[1].clone()), ("z", back[2].clone())]);
    let linear = Expr::var("m_x") * &back[0] + Expr::var("m_y") * &back[1] + Expr::var("m_z") * &back[2];
    Expr::var("a_u") * pulled + linear + Expr::var("b_u")
}

pub(crate) fn bind_flow(params: &mut BTreeMap<String, f64>, g: &AffineFlow) -> Result<(), FlowError> {
    let (a, m, b) = g.u_row()?;
    let inv = g.matrix.try_inverse().expect("flows are invertible");
    for r in 0..3 {
        for (c, col) in [0, 1, 2, 4].iter().enumerate() {
            params.insert(FLOW_PARAM[r][c].to_string(), inv[(r, *col)]);
        }
    }
    params.insert("a_u".into(), a);
    params.insert("m_x".into(), m[0]);
    params.insert("m_y".into(), m[1]);
    params.insert("m_z".into(), m[2]);
    params.insert("b_u".into(), b);
    Ok(())
}

/// The image of the graph of `u` under `G`, as a function.
pub fn pushforward(g: &AffineFlow, u: &ScalarFunctionHandle) -> Result<ScalarFunctionHandle, FlowError> {
    let mut out = u.clone();
    out.expr = pushforward_template(&u.expr);
    bind_flow(&mut out.params, g)?;
    Ok(out)
}

/// `½(τ1 x² + τ2 y² + τ3 z²) + ε⁵ ω(x/ε², y/ε², z/ε²)`, with `ω` bound in `omega`
/// under the name `ω`.
pub fn tian_fixture(
    tau: [f64; 3],
    eps: f64,
    omega: FnBindings,
) -> Result<ScalarFunctionHandle, FlowError> {
    if eps == 0.0 {
        return Err(FlowError::ZeroEpsilon);
    }
    let mut params = BTreeMap::new();
    for (i, t) in tau.iter().enumerate() {
        params.insert(format!("tau{}", i + 1), *t);
    }
    params.insert("eps".into(), eps);
    Ok(ScalarFunctionHandle {
        expr: tian_expr(),
        params,
        fns: omega,
    })
}

/// The fixture as an expression in `x, y, z, tau1..tau3, eps`.
pub fn tian_expr() -> Expr {
    crate::expr::parse("(tau1*x^2 + tau2*y^2 + tau3*z^2)/2 + eps^5*ω(x/eps^2, y/eps^2, z/eps^2)")
        .expect("fixed text")
}

/// `ω(a, b, c) = sin a sin b sin c` with its derivatives.
pub fn sin_product_omega() -> FnBindings {
    FnBindings::new().with("ω", |a: &[f64], d: &[usize]| {
        if d.len() > 3 {
            return None;
        }
        let mut counts = [0usize; 3];
        for &i in d {
            counts[i] += 1;
        }
        let f = |x: f64, k: usize| match k % 4 {
            0 => x.sin(),
            1 => x.cos(),
            2 => -x.sin(),
            _ => -x.cos(),
        };
        Some((0..3).map(|i| f(a[i], counts[i])).product())
    })
}

/// A random polynomial in `x, y, z` of total degree at most four with small
/// integer coefficients.
pub fn random_polynomial(seed: u64) -> ScalarFunctionHandle {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut terms = Vec::new();
    for i in 0..=4u32 {
        for j in 0..=4 - i {
            for k in 0..=4 - i - j {
                if rng.gen_bool(0.5) {
                    let c = rng.gen_range(-3i64..=3);
                    let mono = Expr::var("x").powi(i as i64) * Expr::var("y").powi(j as i64)
                        * Expr::var("z").powi(k as i64);
                    terms.push(Expr::int(c) * mono);
                }
            }
        }
    }
    ScalarFunctionHandle::new(Expr::add(terms))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field(pairs: &[(&str, &str)]) -> VectorField {
        VectorField::parse(BaseSpace::E4, pairs).unwrap()
    }

    #[test]
    fn translation_in_u() {
        let g = flow_of(&field(&[("u", "1")]), 0.7).unwrap();
        let q = g.apply([1.0, 2.0, 3.0, 4.0]);
        assert!((q[3] - 4.7).abs() < 1e-15 && q[0] == 1.0);
    }

    #[test]
    fn rotation_with_scaling() {
        let g = flow_of(&field(&[("y", "2*z"), ("z", "-2*y"), ("u", "u")]), 0.3).unwrap();
        let q = g.apply([1.0, 1.0, 0.5, 2.0]);
        let (c, s) = (0.6f64.cos(), 0.6f64.sin());
        assert!((q[1] - (c + 0.5 * s)).abs() < 1e-14);
        assert!((q[2] - (0.5 * c - s)).abs() < 1e-14);
        assert!((q[3] - 2.0 * 0.3f64.exp()).abs() < 1e-14);
    }

    #[test]
    fn non_affine_is_rejected() {
        assert!(matches!(flow_of(&field(&[("x", "x^2")]), 1.0), Err(FlowError::NonAffine { .. })));
        assert!(matches!(flow_of(&field(&[("x", "a*x")]), 1.0), Err(FlowError::NonAffine { .. })));
    }

    #[test]
    fn pushforward_examples() {
        let u = random_polynomial(3);
        let shift = pushforward(&flow_of(&field(&[("u", "x")]), 0.5).unwrap(), &u).unwrap();
        let p = [0.3, -0.2, 0.9];
        assert!((shift.value(p).unwrap() - u.value(p).unwrap() - 0.5 * 0.3).abs() < 1e-12);
        let dil = pushforward(&flow_of(&field(&[("x", "x"), ("y", "y"), ("z", "z")]), 0.4).unwrap(), &u).unwrap();
        let back = p.map(|c| c * (-0.4f64).exp());
        assert!((dil.value(p).unwrap() - u.value(back).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn flat_fixture() {
        let u = tian_fixture([1.0, 1.0, 1.0], 0.5, FnBindings::new().with("ω", |_: &[f64], _: &[usize]| Some(0.0))).unwrap();
        assert!((u.s2_at([0.2, 0.3, -0.4]).unwrap() - 3.0).abs() < 1e-14);
        assert!(tian_fixture([1.0; 3], 0.0, FnBindings::new()).is_err());
    }
}
