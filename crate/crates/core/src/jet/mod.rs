//! Second-order jet calculus for `S2[u] = f(x, y, z)`.
//!
//! Jet coordinates are plain variables named `u`, `u_x`, ..., `u_zz` (and
//! `f`, `f_x`, ... on the extended space), with the derivative letters sorted.

mod determining;
mod hessian;

use std::collections::BTreeMap;

use thiserror::Error;

use crate::expr::{normalize, EvalError, Expr};
use crate::lie::{BaseSpace, LieError, VectorField};

pub use determining::{
    auxiliary_residual, condition_expr, determining_residual, determining_system,
    emitted_generators, equivalence_ansatz, equivalence_determining_residual, opaque_f,
    restrict_to_variety, symmetry_ansatz, DeterminingEquation, ANSATZ_CONSTANTS,
    EQUIVALENCE_CONSTANT_TO_Y,
};
pub use hessian::{
    check_symmetry, delta_expr, hessian2_expr, invariance_expr, invariance_residual,
    sigma2_of_matrix, solve_uyy, uyy_expr, CheckOptions, JetPoint, SymmetryCheck,
    SymmetryReport,
};

/// The independent variables.
pub const COORDS: [&str; 3] = ["x", "y", "z"];

/// First- and second-order jet coordinates of `u`, excluding `u` itself.
pub const U_JETS: [&str; 9] = [
    "u_x", "u_y", "u_z", "u_xx", "u_xy", "u_xz", "u_yy", "u_yz", "u_zz",
];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum JetError {
    #[error("total derivative of `{0}` exceeds the jet order")]
    OrderOverflow(String),
    #[error("u_xx + u_zz = {0} is too close to zero to solve for u_yy")]
    DegenerateDenominator(f64),
    #[error("point is off the solution variety: residual {0}")]
    OffVariety(f64),
    #[error("only fields on (x, y, z, u) or (x, y, z, u, f) can be prolonged")]
    UnsupportedBase,
    #[error("could not sample {wanted} usable points in {attempts} attempts: {last}")]
    Sampling {
        wanted: usize,
        attempts: usize,
        last: String,
    },
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Lie(#[from] LieError),
}

/// Name of the jet coordinate `dep_J`, e.g. `("u", [0, 1])` is `u_xy`.
pub fn jet_name(dep: &str, j: &[usize]) -> String {
    if j.is_empty() {
        return dep.to_string();
    }
    let mut idx = j.to_vec();
    idx.sort_unstable();
    let letters: String = idx.iter().map(|&i| COORDS[i]).collect();
    format!("{dep}_{letters}")
}

/// Inverse of [`jet_name`]; `None` for anything that is not a well-formed
/// jet coordinate of `dep`.
pub fn parse_jet_name<'a>(name: &'a str, dep: &str) -> Option<Vec<usize>> {
    if name == dep {
        return Some(Vec::new());
    }
    let rest: &'a str = name.strip_prefix(dep)?.strip_prefix('_')?;
    let idx: Option<Vec<usize>> = rest
        .chars()
        .map(|c| COORDS.iter().position(|v| v.starts_with(c)))
        .collect();
    let idx = idx?;
    (!idx.is_empty() && idx.windows(2).all(|w| w[0] <= w[1])).then_some(idx)
}

/// Sorted multi-indices of exactly the given order.
pub fn multi_indices(order: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for i in start..3 {
            cur.push(i);
            rec(i, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, order, &mut Vec::new(), &mut out);
    out
}

/// `D_i e`, treating every `dep_J` in `e` as an independent coordinate.
///
/// Jet coordinates of order `max_order` or higher cannot be differentiated.
pub fn total_derivative(
    e: &Expr,
    i: usize,
    deps: &[&str],
    max_order: usize,
) -> Result<Expr, JetError> {
    let mut terms = vec![e.diff(COORDS[i])];
    for v in e.free_vars() {
        for dep in deps {
            let Some(mut j) = parse_jet_name(&v, dep) else {
                continue;
            };
            if j.len() >= max_order {
                return Err(JetError::OrderOverflow(v));
            }
            j.push(i);
            terms.push(Expr::var(&jet_name(dep, &j)) * e.diff(&v));
        }
    }
    Ok(Expr::add(terms))
}

fn dependents(base: BaseSpace) -> Result<&'static [&'static str], JetError> {
    match base {
        BaseSpace::E4 => Ok(&["u"]),
        BaseSpace::E5 => Ok(&["u", "f"]),
        BaseSpace::P4 => Err(JetError::UnsupportedBase),
    }
}

/// A vector field together with its second prolongation coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct ProlongedField {
    pub field: VectorField,
    /// Coefficient of `∂_{dep_J}` keyed by jet name, for `|J| ≤ 2`.
    pub coeffs: BTreeMap<String, Expr>,
}

/// Second prolongation: `φ^J = D_J(φ - Σ ξ^i dep_i) + Σ ξ^i dep_{J,i}`.
pub fn prolong2(v: &VectorField) -> Result<ProlongedField, JetError> {
    let deps = dependents(v.base())?;
    let xi: Vec<Expr> = COORDS.iter().map(|c| v.coeff(c)).collect();
    let mut coeffs = BTreeMap::new();
    for dep in deps {
        let q = v.coeff(dep)
            - Expr::add(
                (0..3)
                    .map(|i| &xi[i] * Expr::var(&jet_name(dep, &[i])))
                    .collect(),
            );
        coeffs.insert(dep.to_string(), v.coeff(dep));
        let mut layer = vec![(Vec::new(), q)];
        for _order in 1..=2 {
            let mut next = Vec::new();
            for (j, dq) in &layer {
                for i in 0..3 {
                    if j.last().is_some_and(|&l| l > i) {
                        continue;
                    }
                    let mut k = j.clone();
                    k.push(i);
                    let d = normalize(&total_derivative(dq, i, deps, 4)?);
                    let shift = Expr::add(
                        (0..3)
                            .map(|m| {
                                let mut km = k.clone();
                                km.push(m);
                                &xi[m] * Expr::var(&jet_name(dep, &km))
                            })
                            .collect(),
                    );
                    coeffs.insert(jet_name(dep, &k), normalize(&(&d + shift)));
                    next.push((k, d));
                }
            }
            layer = next;
        }
    }
    Ok(ProlongedField {
        field: v.clone(),
        coeffs,
    })
}

impl ProlongedField {
    /// Coefficient of `∂_name`; zero for names it does not carry.
    pub fn coeff(&self, name: &str) -> Expr {
        if let Some(c) = self.coeffs.get(name) {
            return c.clone();
        }
        self.field.coeff(name)
    }

    /// Apply `pr^(2) V` as a derivation.
    pub fn apply(&self, e: &Expr) -> Expr {
        let mut terms = Vec::new();
        for v in e.free_vars() {
            let c = if COORDS.contains(&v.as_str()) {
                self.field.coeff(&v)
            } else {
                match self.coeffs.get(&v) {
                    Some(c) => c.clone(),
                    None => continue,
                }
            };
            if !c.is_zero() {
                terms.push(c * e.diff(&v));
            }
        }
        Expr::add(terms)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn p(s: &str) -> Expr {
        parse(s).unwrap()
    }

    #[test]
    fn names_round_trip() {
        assert_eq!(jet_name("u", &[1, 0]), "u_xy");
        assert_eq!(parse_jet_name("u_xy", "u"), Some(vec![0, 1]));
        assert_eq!(parse_jet_name("u_yx", "u"), None);
        assert_eq!(parse_jet_name("u", "u"), Some(vec![]));
        assert_eq!(parse_jet_name("ux", "u"), None);
        assert_eq!(multi_indices(2).len(), 6);
    }

    #[test]
    fn total_derivatives() {
        let dx = |e: &Expr| normalize(&total_derivative(e, 0, &["u"], 3).unwrap());
        assert_eq!(dx(&p("u")), p("u_x"));
        assert_eq!(dx(&p("u_y*x")), normalize(&p("u_y + x*u_xy")));
        let dy = |e: &Expr| normalize(&total_derivative(e, 1, &["u"], 3).unwrap());
        assert_eq!(dy(&dx(&p("u^2*y"))), dx(&dy(&p("u^2*y"))));
        assert!(total_derivative(&p("u_xx"), 0, &["u"], 2).is_err());
    }

    #[test]
    fn prolongation_examples() {
        let field = |pairs: &[(&str, &str)]| VectorField::parse(BaseSpace::E4, pairs).unwrap();
        let pr = prolong2(&field(&[("u", "u")])).unwrap();
        assert_eq!(pr.coeff("u_xx"), p("u_xx"));
        assert_eq!(pr.coeff("u_y"), p("u_y"));
        let pr = prolong2(&field(&[("x", "x")])).unwrap();
        assert_eq!(pr.coeff("u_xx"), normalize(&p("-2*u_xx")));
        assert_eq!(pr.coeff("u_xy"), normalize(&p("-u_xy")));
        assert!(pr.coeff("u_yy").is_zero());
        let pr = prolong2(&field(&[("u", "x")])).unwrap();
        assert_eq!(pr.coeff("u_x"), Expr::one());
        for j in multi_indices(2) {
            assert!(pr.coeff(&jet_name("u", &j)).is_zero());
        }
        assert_eq!(pr.coeffs.len(), 10);
    }

    #[test]
    fn extended_fields_prolong_both_dependents() {
        let y11 = VectorField::parse(BaseSpace::E5, &[("u", "u"), ("f", "2*f")]).unwrap();
        let pr = prolong2(&y11).unwrap();
        assert_eq!(pr.coeffs.len(), 20);
        assert_eq!(pr.coeff("f_x"), normalize(&p("2*f_x")));
    }
}
