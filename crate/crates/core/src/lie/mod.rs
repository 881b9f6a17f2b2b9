//! Vector fields, Lie brackets, structure constants, adjoint actions and the
//! optimal-system reducer.

mod adjoint;
pub mod algebras;
mod basis;
mod reduce;

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::expr::{normalize, parse, Expr, ParseError, Rational};

pub use adjoint::{adjoint, AdjointMatrix, EntryForm};
pub use basis::{decompose, structure_table, LieBasis, StructureTable};
pub use reduce::{
    reduce_to_optimal, Pattern, PatternId, ReduceError, ReductionStep, ReductionTrace, Reducer,
    StepKind,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LieError {
    #[error("base spaces differ: {0:?} vs {1:?}")]
    BaseMismatch(BaseSpace, BaseSpace),
    #[error("variable `{var}` is not a coordinate of {base:?}")]
    ForeignVariable { var: String, base: BaseSpace },
    #[error("field is not in the span of {basis}; residual {residual}")]
    NotInSpan { basis: String, residual: String },
    #[error("coefficient of {var} is not a polynomial with rational coefficients: {expr}")]
    NonRational { var: String, expr: String },
    #[error("fields of {0} are linearly dependent")]
    Dependent(String),
    #[error("bracket [{i}, {j}] leaves the span of {basis}")]
    NotClosed { basis: String, i: usize, j: usize },
    #[error("bad coefficient text: {0}")]
    Parse(#[from] ParseError),
}

/// The three coordinate spaces the toolkit works on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum BaseSpace {
    /// (x, y, z, u)
    E4,
    /// (x, y, z, u, f)
    E5,
    /// (x, y, z, f)
    P4,
}

/// Every coordinate name used by any base space.
const ALL_COORDS: [&str; 5] = ["x", "y", "z", "u", "f"];

impl BaseSpace {
    pub fn vars(self) -> &'static [&'static str] {
        match self {
            BaseSpace::E4 => &["x", "y", "z", "u"],
            BaseSpace::E5 => &["x", "y", "z", "u", "f"],
            BaseSpace::P4 => &["x", "y", "z", "f"],
        }
    }

    pub fn contains(self, v: &str) -> bool {
        self.vars().contains(&v)
    }
}

fn is_jet_name(v: &str) -> bool {
    matches!(v.split_once('_'), Some(("u" | "f", rest)) if !rest.is_empty())
}

/// A vector field `Σ coeff_k ∂_k` with normalized coefficients.
///
/// Coefficients may use the coordinates of the base space plus free
/// parameters; coordinates of other spaces and jet variables are rejected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VectorField {
    base: BaseSpace,
    coeffs: BTreeMap<String, Expr>,
}

impl VectorField {
    pub fn zero(base: BaseSpace) -> VectorField {
        VectorField {
            base,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn new(base: BaseSpace, pairs: Vec<(&str, Expr)>) -> Result<VectorField, LieError> {
        let mut coeffs = BTreeMap::new();
        for (v, c) in pairs {
            if !base.contains(v) {
                return Err(LieError::ForeignVariable {
                    var: v.to_string(),
                    base,
                });
            }
            for w in c.free_vars() {
                let foreign = ALL_COORDS.contains(&w.as_str()) && !base.contains(&w);
                if foreign || is_jet_name(&w) {
                    return Err(LieError::ForeignVariable { var: w, base });
                }
            }
            let c = normalize(&c);
            if !c.is_zero() {
                coeffs.insert(v.to_string(), c);
            }
        }
        Ok(VectorField { base, coeffs })
    }

    /// Build from textual coefficients, e.g. `[("x", "z"), ("z", "-x")]`.
    pub fn parse(base: BaseSpace, pairs: &[(&str, &str)]) -> Result<VectorField, LieError> {
        let mut out = Vec::with_capacity(pairs.len());
        for (v, text) in pairs {
            out.push((*v, parse(text)?));
        }
        VectorField::new(base, out)
    }

    pub fn base(&self) -> BaseSpace {
        self.base
    }

    /// Coefficient of `∂_v` (zero when absent).
    pub fn coeff(&self, v: &str) -> Expr {
        self.coeffs.get(v).cloned().unwrap_or_else(Expr::zero)
    }

    pub fn coeffs(&self) -> &BTreeMap<String, Expr> {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Apply the field as a derivation.
    pub fn apply(&self, e: &Expr) -> Expr {
        Expr::add(
            self.coeffs
                .iter()
                .map(|(v, c)| c * e.diff(v))
                .collect(),
        )
    }

    fn combine(&self, other: &VectorField, f: impl Fn(&Expr, &Expr) -> Expr) -> VectorField {
        let mut coeffs = BTreeMap::new();
        for v in self.base.vars() {
            let c = normalize(&f(&self.coeff(v), &other.coeff(v)));
            if !c.is_zero() {
                coeffs.insert(v.to_string(), c);
            }
        }
        VectorField {
            base: self.base,
            coeffs,
        }
    }

    pub fn add(&self, other: &VectorField) -> Result<VectorField, LieError> {
        self.check_base(other)?;
        Ok(self.combine(other, |a, b| a + b))
    }

    pub fn sub(&self, other: &VectorField) -> Result<VectorField, LieError> {
        self.check_base(other)?;
        Ok(self.combine(other, |a, b| a - b))
    }

    pub fn scale(&self, k: &Expr) -> VectorField {
        self.combine(&VectorField::zero(self.base), |a, _| k * a)
    }

    fn check_base(&self, other: &VectorField) -> Result<(), LieError> {
        if self.base != other.base {
            return Err(LieError::BaseMismatch(self.base, other.base));
        }
        Ok(())
    }

    /// Drop coefficients of coordinates missing from `target`.
    ///
    /// Projection is only meaningful onto a subspace of coordinates; the
    /// coefficients are kept as they are.
    pub fn project(&self, target: BaseSpace) -> VectorField {
        VectorField {
            base: target,
            coeffs: self
                .coeffs
                .iter()
                .filter(|(v, _)| target.contains(v))
                .map(|(v, c)| (v.clone(), c.clone()))
                .collect(),
        }
    }

    /// Substitute parameters in every coefficient.
    pub fn substitute(&self, bindings: &BTreeMap<String, Expr>) -> VectorField {
        VectorField {
            base: self.base,
            coeffs: self
                .coeffs
                .iter()
                .map(|(v, c)| (v.clone(), normalize(&c.substitute(bindings))))
                .filter(|(_, c)| !c.is_zero())
                .collect(),
        }
    }

    /// Rational coefficient of each `(∂_v, monomial)` pair.
    pub(crate) fn monomial_coeffs(&self) -> Result<BTreeMap<(String, Vec<u32>), Rational>, LieError> {
        let vars = self.base.vars();
        let mut out = BTreeMap::new();
        for (v, c) in &self.coeffs {
            let err = || LieError::NonRational {
                var: v.clone(),
                expr: c.to_string(),
            };
            let monos = crate::expr::collect_monomials(c, vars).map_err(|_| err())?;
            for (k, coef) in monos {
                let q = coef.as_num().ok_or_else(err)?.clone();
                out.insert((v.clone(), k), q);
            }
        }
        Ok(out)
    }
}

/// The Lie bracket `[V, W]^k = V(W^k) - W(V^k)`.
pub fn commutator(v: &VectorField, w: &VectorField) -> Result<VectorField, LieError> {
    v.check_base(w)?;
    let mut coeffs = BTreeMap::new();
    for k in v.base.vars() {
        let c = normalize(&(v.apply(&w.coeff(k)) - w.apply(&v.coeff(k))));
        if !c.is_zero() {
            coeffs.insert(k.to_string(), c);
        }
    }
    Ok(VectorField {
        base: v.base,
        coeffs,
    })
}

impl fmt::Display for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for v in self.base.vars() {
            let Some(c) = self.coeffs.get(*v) else {
                continue;
            };
            let text = c.to_string();
            let (neg, body) = match text.strip_prefix('-') {
                Some(rest) if !matches!(c.node(), crate::expr::Node::Add(_)) => (true, rest.to_string()),
                _ => (false, text),
            };
            let body = if matches!(c.node(), crate::expr::Node::Add(_)) {
                format!("({body})")
            } else if body == "1" {
                String::new()
            } else {
                body
            };
            match (first, neg) {
                (true, true) => f.write_str("-")?,
                (true, false) => {}
                (false, true) => f.write_str(" - ")?,
                (false, false) => f.write_str(" + ")?,
            }
            write!(f, "{body}∂{v}")?;
            first = false;
        }
        Ok(())
    }
}
