//! The operator `S2`, the solution variety `S2[u] = f`, and numeric
//! invariance checks on it.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{prolong2, JetError, COORDS};
use crate::expr::{eval_numeric, eval_scaled, parse, Expr, FnBindings, SampleDomain, DEFAULT_SEED};
use crate::lie::VectorField;

/// `u_xx u_yy + u_xx u_zz + u_yy u_zz - u_xy^2 - u_yz^2 - u_xz^2`.
pub fn hessian2_expr() -> Expr {
    parse("u_xx*u_yy + u_xx*u_zz + u_yy*u_zz - u_xy^2 - u_yz^2 - u_xz^2").expect("fixed text")
}

/// `S2[u] - f`.
pub fn delta_expr(f: &Expr) -> Expr {
    hessian2_expr() - f
}

/// `u_yy` on the variety `S2[u] = f`.
pub fn uyy_expr(f: &Expr) -> Expr {
    let num = f - parse("u_xx*u_zz - u_xy^2 - u_yz^2 - u_xz^2").expect("fixed text");
    num / parse("u_xx + u_zz").expect("fixed text")
}

/// σ2 of a symmetric 3×3 matrix: the sum of its principal 2×2 minors.
pub fn sigma2_of_matrix(h: &[[f64; 3]; 3]) -> f64 {
    h[0][0] * h[1][1] + h[0][0] * h[2][2] + h[1][1] * h[2][2]
        - h[0][1] * h[1][0]
        - h[1][2] * h[2][1]
        - h[0][2] * h[2][0]
}

/// Numeric values for jet coordinates (and any parameters).
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct JetPoint(pub BTreeMap<String, f64>);

impl JetPoint {
    pub fn get(&self, name: &str) -> f64 {
        self.0.get(name).copied().unwrap_or(0.0)
    }

    pub fn set(&mut self, name: &str, v: f64) {
        self.0.insert(name.to_string(), v);
    }

    pub fn hessian(&self) -> [[f64; 3]; 3] {
        let g = |a: &str| self.get(a);
        [
            [g("u_xx"), g("u_xy"), g("u_xz")],
            [g("u_xy"), g("u_yy"), g("u_yz")],
            [g("u_xz"), g("u_yz"), g("u_zz")],
        ]
    }

    /// Sample `x, y, z` from `domain`, the remaining `u`-jets uniformly in
    /// `[-2, 2]`, and complete `u_yy` so that the point lies on `S2[u] = f`.
    pub fn sample_on_variety(
        f: &Expr,
        fns: &FnBindings,
        domain: &SampleDomain,
        rng: &mut impl Rng,
    ) -> Result<JetPoint, JetError> {
        let mut p = JetPoint::default();
        for c in COORDS {
            p.set(c, domain.sample(c, rng));
        }
        for v in ["u", "u_x", "u_y", "u_z", "u_xx", "u_xy", "u_xz", "u_yz", "u_zz"] {
            p.set(v, rng.gen_range(-2.0..2.0));
        }
        let fv = eval_numeric(f, &p.0, fns)?;
        p.set("f", fv);
        let uyy = solve_uyy(&p, fv)?;
        p.set("u_yy", uyy);
        Ok(p)
    }
}

/// Solve `S2[u] = f` for `u_yy` at a point carrying the other second derivatives.
pub fn solve_uyy(p: &JetPoint, f_value: f64) -> Result<f64, JetError> {
    let den = p.get("u_xx") + p.get("u_zz");
    if den.abs() <= 1e-8 {
        return Err(JetError::DegenerateDenominator(den));
    }
    let (xy, yz, xz) = (p.get("u_xy"), p.get("u_yz"), p.get("u_xz"));
    Ok((f_value - p.get("u_xx") * p.get("u_zz") + xy * xy + yz * yz + xz * xz) / den)
}

/// `pr^(2) V (S2[u] - f)` with `f` an expression in `x, y, z`.
pub fn invariance_expr(v: &VectorField, f: &Expr) -> Result<Expr, JetError> {
    Ok(prolong2(v)?.apply(&delta_expr(f)))
}

/// Precompiled invariance check of one `(V, f)` pair.
#[derive(Debug, Clone)]
pub struct SymmetryCheck {
    f: Expr,
    delta: Expr,
    residual: Expr,
}

impl SymmetryCheck {
    pub fn new(v: &VectorField, f: &Expr) -> Result<SymmetryCheck, JetError> {
        Ok(SymmetryCheck {
            f: f.clone(),
            delta: delta_expr(f),
            residual: invariance_expr(v, f)?,
        })
    }

    pub fn residual_expr(&self) -> &Expr {
        &self.residual
    }

    /// `(value, scale)` of the residual at an on-variety point.
    pub fn residual(&self, p: &JetPoint, fns: &FnBindings) -> Result<(f64, f64), JetError> {
        let mut dscale = 0.0;
        let d = eval_scaled(&self.delta, &p.0, fns, &mut dscale)?;
        if d.abs() > 1e-12 * (1.0 + dscale) {
            return Err(JetError::OffVariety(d));
        }
        let mut scale = 0.0;
        let r = eval_scaled(&self.residual, &p.0, fns, &mut scale)?;
        Ok((r, scale))
    }

    pub fn run(&self, fns: &FnBindings, opts: &CheckOptions) -> Result<SymmetryReport, JetError> {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        let mut report = SymmetryReport {
            pass: true,
            max_residual: 0.0,
            points: 0,
            witness: None,
        };
        let mut attempts = 0;
        let mut last = String::new();
        while report.points < opts.points {
            if attempts >= 10 * opts.points.max(1) {
                return Err(JetError::Sampling {
                    wanted: opts.points,
                    attempts,
                    last,
                });
            }
            attempts += 1;
            let p = match JetPoint::sample_on_variety(&self.f, fns, &opts.domain, &mut rng) {
                Ok(p) => p,
                Err(e @ JetError::Eval(crate::expr::EvalError::UnboundVariable(_))) => return Err(e),
                Err(e) => {
                    last = e.to_string();
                    continue;
                }
            };
            let (r, scale) = match self.residual(&p, fns) {
                Ok(v) => v,
                Err(e @ JetError::Eval(crate::expr::EvalError::UnboundVariable(_))) => return Err(e),
                Err(e) => {
                    last = e.to_string();
                    continue;
                }
            };
            if !r.is_finite() {
                last = "non-finite residual".into();
                continue;
            }
            let rel = r.abs() / (1.0 + scale);
            report.points += 1;
            if rel > report.max_residual {
                report.max_residual = rel;
            }
            if rel > opts.tol && report.pass {
                report.pass = false;
                report.witness = Some(p);
            }
        }
        Ok(report)
    }
}

/// Residual of `pr^(2) V (S2[u] - f)` at an on-variety point.
pub fn invariance_residual(
    v: &VectorField,
    f: &Expr,
    p: &JetPoint,
    fns: &FnBindings,
) -> Result<f64, JetError> {
    Ok(SymmetryCheck::new(v, f)?.residual(p, fns)?.0)
}

#[derive(Debug, Clone)]
pub struct CheckOptions {
    pub points: usize,
    /// Bound on `|residual| / (1 + scale)`, `scale` being the largest
    /// magnitude of any subterm of the residual at the point.
    pub tol: f64,
    pub seed: u64,
    pub domain: SampleDomain,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            points: 100,
            tol: 1e-8,
            seed: DEFAULT_SEED,
            domain: SampleDomain::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymmetryReport {
    pub pass: bool,
    pub max_residual: f64,
    pub points: usize,
    pub witness: Option<JetPoint>,
}

/// Sample on-variety points and test whether `V` leaves `S2[u] = f` invariant.
pub fn check_symmetry(
    v: &VectorField,
    f: &Expr,
    fns: &FnBindings,
    opts: &CheckOptions,
) -> Result<SymmetryReport, JetError> {
    SymmetryCheck::new(v, f)?.run(fns, opts)
}
