//! Floating-point evaluation.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use num_integer::Integer;
use num_traits::ToPrimitive;
use thiserror::Error;

use super::{Expr, Func, Node};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("unbound function `{0}`")]
    UnboundFunction(String),
    #[error("domain error: {0}")]
    Domain(String),
}

/// Concrete evaluator for an opaque symbol and its formal derivatives.
///
/// `derivs` is the sorted multi-index of slot derivatives; return `None` when
/// the requested derivative is not available.
pub trait OpaqueFn: Send + Sync {
    fn eval(&self, args: &[f64], derivs: &[usize]) -> Option<f64>;
}

impl<F> OpaqueFn for F
where
    F: Fn(&[f64], &[usize]) -> Option<f64> + Send + Sync,
{
    fn eval(&self, args: &[f64], derivs: &[usize]) -> Option<f64> {
        self(args, derivs)
    }
}

/// Bindings from opaque symbol names to evaluators.
#[derive(Clone, Default)]
pub struct FnBindings {
    fns: HashMap<String, Arc<dyn OpaqueFn>>,
}

impl fmt::Debug for FnBindings {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut names: Vec<&String> = self.fns.keys().collect();
        names.sort();
        f.debug_struct("FnBindings").field("names", &names).finish()
    }
}

impl FnBindings {
    pub fn new() -> FnBindings {
        FnBindings::default()
    }

    pub fn with(mut self, name: &str, f: impl OpaqueFn + 'static) -> FnBindings {
        self.insert(name, f);
        self
    }

    pub fn insert(&mut self, name: &str, f: impl OpaqueFn + 'static) {
        self.fns.insert(name.to_string(), Arc::new(f));
    }

    pub fn insert_arc(&mut self, name: &str, f: Arc<dyn OpaqueFn>) {
        self.fns.insert(name.to_string(), f);
    }

    pub fn get(&self, name: &str) -> Option<&Arc<dyn OpaqueFn>> {
        self.fns.get(name)
    }

    /// Merge, with entries of `other` taking precedence.
    pub fn merged(&self, other: &FnBindings) -> FnBindings {
        let mut out = self.clone();
        for (k, v) in &other.fns {
            out.fns.insert(k.clone(), v.clone());
        }
        out
    }

    pub fn contains(&self, name: &str) -> bool {
        self.fns.contains_key(name)
    }
}

/// Evaluate `e` at `point`.
pub fn eval_numeric(
    e: &Expr,
    point: &BTreeMap<String, f64>,
    fns: &FnBindings,
) -> Result<f64, EvalError> {
    let mut scale = 0.0;
    eval_scaled(e, point, fns, &mut scale)
}

/// Evaluate and record the largest magnitude of any subterm in `scale`.
pub(crate) fn eval_scaled(
    e: &Expr,
    point: &BTreeMap<String, f64>,
    fns: &FnBindings,
    scale: &mut f64,
) -> Result<f64, EvalError> {
    let v = match e.node() {
        Node::Num(q) => q.to_f64().unwrap_or(f64::NAN),
        Node::Var(name) => *point
            .get(&**name)
            .ok_or_else(|| EvalError::UnboundVariable(name.to_string()))?,
        Node::Add(ts) => {
            let mut s = 0.0;
            for t in ts {
                s += eval_scaled(t, point, fns, scale)?;
            }
            s
        }
        Node::Mul(fs) => {
            let mut p = 1.0;
            for f in fs {
                p *= eval_scaled(f, point, fns, scale)?;
            }
            p
        }
        Node::Pow(b, x) => {
            let bv = eval_scaled(b, point, fns, scale)?;
            match x.as_num() {
                Some(q) if q.is_integer() => {
                    let n = q
                        .to_integer()
                        .to_i32()
                        .ok_or_else(|| EvalError::Domain("exponent too large".into()))?;
                    if bv == 0.0 && n < 0 {
                        return Err(EvalError::Domain("division by zero".into()));
                    }
                    bv.powi(n)
                }
                Some(q) => {
                    let xv = q.to_f64().unwrap_or(f64::NAN);
                    if bv < 0.0 && q.denom().is_odd() {
                        let mag = (-bv).powf(xv);
                        if q.numer().is_odd() {
                            -mag
                        } else {
                            mag
                        }
                    } else if bv == 0.0 && xv < 0.0 {
                        return Err(EvalError::Domain("division by zero".into()));
                    } else {
                        bv.powf(xv)
                    }
                }
                None => {
                    let xv = eval_scaled(x, point, fns, scale)?;
                    bv.powf(xv)
                }
            }
        }
        Node::Func(f, a) => {
            let av = eval_scaled(a, point, fns, scale)?;
            match f {
                Func::Exp => av.exp(),
                Func::Ln => {
                    if av <= 0.0 {
                        return Err(EvalError::Domain(format!("ln of {av}")));
                    }
                    av.ln()
                }
                Func::Sin => av.sin(),
                Func::Cos => av.cos(),
                Func::Tan => av.tan(),
                Func::Atan => av.atan(),
                Func::Sqrt => {
                    if av < 0.0 {
                        return Err(EvalError::Domain(format!("sqrt of {av}")));
                    }
                    av.sqrt()
                }
            }
        }
        Node::Apply { name, args, derivs } => {
            let f = fns
                .get(name)
                .ok_or_else(|| EvalError::UnboundFunction(name.to_string()))?;
            let mut vals = Vec::with_capacity(args.len());
            for a in args {
                vals.push(eval_scaled(a, point, fns, scale)?);
            }
            f.eval(&vals, derivs).ok_or_else(|| {
                EvalError::UnboundFunction(format!("{name} with derivative {derivs:?}"))
            })?
        }
    };
    if !v.is_finite() {
        return Err(EvalError::Domain(format!("non-finite value at {e}")));
    }
    *scale = scale.max(v.abs());
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn at(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn polynomial_value() {
        let e = parse("x^2 + y^2").unwrap();
        let v = eval_numeric(&e, &at(&[("x", 3.0), ("y", 4.0)]), &FnBindings::new()).unwrap();
        assert_eq!(v, 25.0);
    }

    #[test]
    fn exponential() {
        let e = parse("exp(2*0.5)").unwrap();
        let v = eval_numeric(&e, &at(&[]), &FnBindings::new()).unwrap();
        assert!((v - std::f64::consts::E).abs() < 1e-15);
    }

    #[test]
    fn opaque_binding() {
        let fns = FnBindings::new().with("H", |a: &[f64], d: &[usize]| match d {
            [] => Some(a[0] * a[1]),
            _ => None,
        });
        let e = parse("H(1, 2)").unwrap();
        assert_eq!(eval_numeric(&e, &at(&[]), &fns).unwrap(), 2.0);
        let d = parse("H_1(1, 2)").unwrap();
        assert!(matches!(
            eval_numeric(&d, &at(&[]), &fns),
            Err(EvalError::UnboundFunction(_))
        ));
    }

    #[test]
    fn errors() {
        let none = FnBindings::new();
        assert!(matches!(
            eval_numeric(&parse("x").unwrap(), &at(&[]), &none),
            Err(EvalError::UnboundVariable(_))
        ));
        assert!(matches!(
            eval_numeric(&parse("ln(x)").unwrap(), &at(&[("x", -1.0)]), &none),
            Err(EvalError::Domain(_))
        ));
        assert!(matches!(
            eval_numeric(&parse("1/x").unwrap(), &at(&[("x", 0.0)]), &none),
            Err(EvalError::Domain(_))
        ));
        assert!(matches!(
            eval_numeric(&parse("G(x)").unwrap(), &at(&[("x", 0.0)]), &none),
            Err(EvalError::UnboundFunction(_))
        ));
    }

    #[test]
    fn odd_roots_of_negatives() {
        let v = eval_numeric(&parse("x^(1/3)").unwrap(), &at(&[("x", -8.0)]), &FnBindings::new())
            .unwrap();
        assert!((v + 2.0).abs() < 1e-12);
    }
}
