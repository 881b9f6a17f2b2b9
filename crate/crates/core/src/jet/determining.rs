//! Determining identities for point symmetries and equivalence generators.

use std::collections::BTreeMap;

use super::{invariance_expr, prolong2, uyy_expr, JetError, U_JETS};
use crate::expr::{collect_monomials, normalize, parse, Expr};
use crate::lie::{BaseSpace, VectorField};

pub const ANSATZ_CONSTANTS: [&str; 12] = [
    "c1", "c2", "c3", "c4", "c5", "c6", "c7", "c8", "c9", "c10", "c11", "c12",
];

/// For `Y1..Y12`, the (1-based) constant of the equivalence ansatz that
/// generates it.
pub const EQUIVALENCE_CONSTANT_TO_Y: [usize; 12] = [8, 11, 12, 4, 1, 2, 5, 7, 9, 10, 3, 6];

/// `f(x, y, z)` as an opaque function.
pub fn opaque_f() -> Expr {
    Expr::apply("f", vec![Expr::var("x"), Expr::var("y"), Expr::var("z")])
}

/// The general point symmetry of `S2[u] = f` before the condition on `f`.
pub fn symmetry_ansatz() -> VectorField {
    VectorField::parse(
        BaseSpace::E4,
        &[
            ("x", "c6*x + c7*y + c8*z + c9"),
            ("y", "c10*z + c6*y - c7*x + c11"),
            ("z", "-c10*y + c6*z - c8*x + c12"),
            ("u", "c1*x + c2*u + c3*y + c4*z + c5"),
        ],
    )
    .expect("fixed ansatz")
}

/// The general equivalence generator on `(x, y, z, u, f)`.
pub fn equivalence_ansatz() -> VectorField {
    VectorField::parse(
        BaseSpace::E5,
        &[
            ("x", "c6*x + c9*y + c7*z + c8"),
            ("y", "c10*z + c6*y - c9*x + c11"),
            ("z", "-c10*y + c6*z - c7*x + c12"),
            ("u", "c1*x + c3*u + c2*y + c5*z + c4"),
            ("f", "2*f*(-2*c6 + c3)"),
        ],
    )
    .expect("fixed ansatz")
}

/// `ξ f_x + ζ f_y + η f_z + (4 η_z - 2 φ_u) f`, which must vanish for `V`
/// to be a symmetry.
pub fn condition_expr(v: &VectorField, f: &Expr) -> Expr {
    let weight = Expr::int(4) * v.coeff("z").diff("z") - Expr::int(2) * v.coeff("u").diff("u");
    v.coeff("x") * f.diff("x") + v.coeff("y") * f.diff("y") + v.coeff("z") * f.diff("z") + weight * f
}

/// Substitute `u_yy` from `S2[u] = f` and clear the denominator `u_xx + u_zz`.
pub fn restrict_to_variety(e: &Expr, f: &Expr) -> Expr {
    let den = parse("u_xx + u_zz").expect("fixed text");
    normalize(&(den * e.subs(&[("u_yy", uyy_expr(f))])))
}

/// `(u_xx + u_zz) (pr^(2) V (S2 - f) + condition)` on the variety, with `f`
/// opaque. Zero exactly when the scalar condition captures the whole
/// invariance requirement for `V`.
pub fn determining_residual(v: &VectorField) -> Result<Expr, JetError> {
    let f = opaque_f();
    let restricted = restrict_to_variety(&invariance_expr(v, &f)?, &f);
    let cond = parse("u_xx + u_zz").expect("fixed text") * condition_expr(v, &f);
    Ok(normalize(&(restricted + cond)))
}

/// `(u_xx + u_zz) pr^(2) Y (S2[u] - f)` on the variety, `f` a dependent variable.
pub fn equivalence_determining_residual(v: &VectorField) -> Result<Expr, JetError> {
    let f = Expr::var("f");
    let e = prolong2(v)?.apply(&(super::hessian2_expr() - &f));
    Ok(restrict_to_variety(&e, &f))
}

/// Prolongation of `Y` applied to the side condition `f_u = 0`, restricted to it.
pub fn auxiliary_residual(v: &VectorField) -> Expr {
    let du = |e: &Expr| e.diff("u") + Expr::var("f_u") * e.diff("f");
    let mut e = du(&v.coeff("f")) - Expr::var("f_u") * du(&v.coeff("u"));
    for c in super::COORDS {
        e = e - Expr::var(&format!("f_{c}")) * du(&v.coeff(c));
    }
    normalize(&e.subs(&[("f_u", Expr::zero())]))
}

/// The field obtained from an ansatz by setting one constant to one and
/// the rest to zero, for every constant.
pub fn emitted_generators(ansatz: &VectorField) -> Vec<(String, VectorField)> {
    ANSATZ_CONSTANTS
        .iter()
        .map(|c| {
            let bindings: BTreeMap<String, Expr> = ANSATZ_CONSTANTS
                .iter()
                .map(|k| (k.to_string(), if k == c { Expr::one() } else { Expr::zero() }))
                .collect();
            (c.to_string(), ansatz.substitute(&bindings))
        })
        .collect()
}

/// One coefficient equation of the determining system.
#[derive(Debug, Clone, PartialEq)]
pub struct DeterminingEquation {
    /// The jet monomial it multiplies, e.g. `u_x*u_xz`.
    pub monomial: String,
    pub expr: Expr,
}

const SYSTEM_JETS: [&str; 8] = ["u_x", "u_y", "u_z", "u_xx", "u_xy", "u_xz", "u_yz", "u_zz"];

/// Determining equations for unknown `ξ, ζ, η, φ` of `(x, y, z, u)`: the
/// coefficients of the jet monomials of the restricted invariance condition.
/// With `functions` given, those bodies are substituted for the unknowns.
pub fn determining_system(
    functions: Option<&VectorField>,
) -> Result<Vec<DeterminingEquation>, JetError> {
    let args = || ["x", "y", "z", "u"].map(Expr::var).to_vec();
    let names = [("x", "xi"), ("y", "zeta"), ("z", "eta"), ("u", "phi")];
    let generic = VectorField::new(
        BaseSpace::E4,
        names.iter().map(|(v, n)| (*v, Expr::apply(n, args()))).collect(),
    )?;
    let f = opaque_f();
    let mut e = restrict_to_variety(&invariance_expr(&generic, &f)?, &f);
    if let Some(body) = functions {
        for (v, n) in names {
            e = e.instantiate(n, &["x", "y", "z", "u"], &body.coeff(v));
        }
        e = normalize(&e);
    }
    debug_assert!(U_JETS.iter().all(|j| *j == "u_yy" || SYSTEM_JETS.contains(j)));
    let monos = collect_monomials(&e, &SYSTEM_JETS).map_err(|err| {
        JetError::OrderOverflow(format!("{}: {}", err.var, err.reason))
    })?;
    Ok(monos
        .into_iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|(k, c)| {
            let parts: Vec<String> = k
                .iter()
                .zip(SYSTEM_JETS)
                .filter(|(p, _)| **p > 0)
                .map(|(p, v)| if *p == 1 { v.to_string() } else { format!("{v}^{p}") })
                .collect();
            let monomial = if parts.is_empty() { "1".to_string() } else { parts.join("*") };
            DeterminingEquation { monomial, expr: c }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetry_ansatz_satisfies_the_identity() {
        assert!(determining_residual(&symmetry_ansatz()).unwrap().is_zero());
    }

    #[test]
    fn violating_the_ansatz_is_detected() {
        let v = VectorField::parse(BaseSpace::E4, &[("x", "y")]).unwrap();
        assert!(!determining_residual(&v).unwrap().is_zero());
    }

    #[test]
    fn equivalence_ansatz_is_admitted() {
        let y = equivalence_ansatz();
        assert!(equivalence_determining_residual(&y).unwrap().is_zero());
        assert!(auxiliary_residual(&y).is_zero());
        let bad = VectorField::parse(BaseSpace::E5, &[("u", "u")]).unwrap();
        assert!(!equivalence_determining_residual(&bad).unwrap().is_zero());
    }
}
