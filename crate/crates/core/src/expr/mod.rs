//! Immutable symbolic expressions over exact rationals.
//!
//! Every [`Expr`] is built through the smart constructors in this module, which
//! flatten nested sums and products, fold numeric constants, and keep children
//! in a deterministic order. Heavier canonicalization (rational-function
//! normal form) lives in [`normalize`].

mod diff;
mod eval;
mod normalize;
mod parse;
mod poly;
mod print;
mod vars;
mod zero;

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub use eval::{eval_numeric, EvalError, FnBindings, OpaqueFn};
pub(crate) use eval::eval_scaled;
pub use normalize::{collect_monomials, normalize, numerator_denominator, NotPolynomial};
pub use parse::{parse, ParseError};
pub use print::{print, print_canonical, print_decimal};
pub use vars::{VarRole, VarTable, VarTableError};
pub use zero::{is_zero, SampleDomain, DEFAULT_SEED, ZeroMode, ZeroOptions, ZeroTestError, ZeroVerdict};

pub type Rational = BigRational;

/// Build a rational from a numerator and denominator.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Elementary functions understood by the kernel.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Func {
    Exp,
    Ln,
    Sin,
    Cos,
    Tan,
    Atan,
    Sqrt,
}

impl Func {
    pub const ALL: [Func; 7] = [
        Func::Exp,
        Func::Ln,
        Func::Sin,
        Func::Cos,
        Func::Tan,
        Func::Atan,
        Func::Sqrt,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Atan => "atan",
            Func::Sqrt => "sqrt",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Node {
    Num(Rational),
    Var(Arc<str>),
    Add(Vec<Expr>),
    Mul(Vec<Expr>),
    Pow(Expr, Expr),
    Func(Func, Expr),
    /// Opaque function symbol applied to arguments; `derivs` is the sorted
    /// multi-index of formal slot derivatives (0-based).
    Apply {
        name: Arc<str>,
        args: Vec<Expr>,
        derivs: Vec<usize>,
    },
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Expr(Arc<Node>);

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expr({})", print::print(self))
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print::print(self))
    }
}

impl Node {
    fn rank(&self) -> u8 {
        match self {
            Node::Num(_) => 0,
            Node::Var(_) => 1,
            Node::Apply { .. } => 2,
            Node::Func(..) => 3,
            Node::Pow(..) => 4,
            Node::Mul(_) => 5,
            Node::Add(_) => 6,
        }
    }
}

impl Ord for Node {
    fn cmp(&self, other: &Self) -> Ordering {
        let by_rank = self.rank().cmp(&other.rank());
        if by_rank != Ordering::Equal {
            return by_rank;
        }
        match (self, other) {
            (Node::Num(a), Node::Num(b)) => a.cmp(b),
            (Node::Var(a), Node::Var(b)) => a.cmp(b),
            (Node::Add(a), Node::Add(b)) | (Node::Mul(a), Node::Mul(b)) => a.cmp(b),
            (Node::Pow(a, e), Node::Pow(b, f)) => a.cmp(b).then_with(|| e.cmp(f)),
            (Node::Func(f, a), Node::Func(g, b)) => f.cmp(g).then_with(|| a.cmp(b)),
            (
                Node::Apply {
                    name: n1,
                    args: a1,
                    derivs: d1,
                },
                Node::Apply {
                    name: n2,
                    args: a2,
                    derivs: d2,
                },
            ) => n1.cmp(n2).then_with(|| a1.cmp(a2)).then_with(|| d1.cmp(d2)),
            _ => unreachable!("equal ranks imply equal variants"),
        }
    }
}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Expr {
    fn cmp(&self, other: &Self) -> Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            return Ordering::Equal;
        }
        self.0.cmp(&other.0)
    }
}

impl PartialOrd for Expr {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Split a product factor into (base, exponent).
fn base_exp(e: &Expr) -> (&Expr, Option<&Expr>) {
    match e.node() {
        Node::Pow(b, x) => (b, Some(x)),
        _ => (e, None),
    }
}

fn cmp_exp(a: Option<&Expr>, b: Option<&Expr>) -> Ordering {
    let one = Expr::one();
    a.unwrap_or(&one).cmp(b.unwrap_or(&one))
}

/// Order of factors inside a product: base first, then exponent.
fn factor_cmp(a: &Expr, b: &Expr) -> Ordering {
    let (ba, ea) = base_exp(a);
    let (bb, eb) = base_exp(b);
    ba.cmp(bb)
        .then_with(|| cmp_exp(ea, eb))
        .then_with(|| a.cmp(b))
}

/// Order of terms inside a sum: lexicographic on (base, degree) pairs with
/// the numeric coefficient ignored, constants last.
fn term_cmp(a: &Expr, b: &Expr) -> Ordering {
    let (ca, fa) = a.split_coefficient();
    let (cb, fb) = b.split_coefficient();
    match (fa.is_empty(), fb.is_empty()) {
        (true, false) => return Ordering::Greater,
        (false, true) => return Ordering::Less,
        _ => {}
    }
    for (x, y) in fa.iter().zip(fb.iter()) {
        let (bx, ex) = base_exp(x);
        let (by, ey) = base_exp(y);
        let o = bx.cmp(by).then_with(|| cmp_exp(ex, ey));
        if o != Ordering::Equal {
            return o;
        }
    }
    fa.len()
        .cmp(&fb.len())
        .then_with(|| ca.cmp(&cb))
        .then_with(|| a.cmp(b))
}

impl Expr {
    fn from_node(n: Node) -> Expr {
        Expr(Arc::new(n))
    }

    pub fn node(&self) -> &Node {
        &self.0
    }

    pub fn num(q: Rational) -> Expr {
        Expr::from_node(Node::Num(q))
    }

    pub fn int(n: i64) -> Expr {
        Expr::num(Rational::from_integer(BigInt::from(n)))
    }

    pub fn rational(n: i64, d: i64) -> Expr {
        Expr::num(rat(n, d))
    }

    pub fn zero() -> Expr {
        Expr::int(0)
    }

    pub fn one() -> Expr {
        Expr::int(1)
    }

    pub fn var(name: &str) -> Expr {
        Expr::from_node(Node::Var(Arc::from(name)))
    }

    pub fn as_num(&self) -> Option<&Rational> {
        match self.node() {
            Node::Num(q) => Some(q),
            _ => None,
        }
    }

    pub fn as_var(&self) -> Option<&str> {
        match self.node() {
            Node::Var(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_num().is_some_and(|q| q.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.as_num().is_some_and(|q| q.is_one())
    }

    /// The `0^(-1)` marker left behind by a division by zero.
    pub fn is_undefined(&self) -> bool {
        matches!(self.node(), Node::Pow(b, x) if b.is_zero() && x.as_num().is_some_and(|q| q.is_negative()))
    }

    /// Numeric value when the expression is a constant that fits an f64.
    pub fn to_f64(&self) -> Option<f64> {
        self.as_num().and_then(|q| q.to_f64())
    }

    /// Numeric coefficient and remaining factors of a product-like term.
    fn split_coefficient(&self) -> (Rational, Vec<Expr>) {
        match self.node() {
            Node::Num(q) => (q.clone(), Vec::new()),
            Node::Mul(fs) => match fs[0].node() {
                Node::Num(q) => (q.clone(), fs[1..].to_vec()),
                _ => (Rational::one(), fs.clone()),
            },
            _ => (Rational::one(), vec![self.clone()]),
        }
    }

    pub fn add(terms: Vec<Expr>) -> Expr {
        let mut constant = Rational::zero();
        let mut out = Vec::with_capacity(terms.len());
        for t in terms {
            match t.node() {
                Node::Num(q) => constant += q,
                Node::Add(children) => {
                    for c in children {
                        match c.node() {
                            Node::Num(q) => constant += q,
                            _ => out.push(c.clone()),
                        }
                    }
                }
                _ => out.push(t),
            }
        }
        if !constant.is_zero() {
            out.push(Expr::num(constant));
        }
        match out.len() {
            0 => Expr::zero(),
            1 => out.pop().unwrap(),
            _ => {
                out.sort_by(term_cmp);
                Expr::from_node(Node::Add(out))
            }
        }
    }

    pub fn mul(factors: Vec<Expr>) -> Expr {
        let mut coeff = Rational::one();
        let mut flat: Vec<Expr> = Vec::with_capacity(factors.len());
        let mut stack: Vec<Expr> = factors;
        stack.reverse();
        while let Some(f) = stack.pop() {
            match f.node() {
                Node::Num(q) => {
                    if q.is_zero() {
                        return Expr::zero();
                    }
                    coeff *= q;
                }
                Node::Mul(children) => {
                    for c in children.iter().rev() {
                        stack.push(c.clone());
                    }
                }
                _ => flat.push(f),
            }
        }
        // 1/0 absorbs the whole product.
        if let Some(u) = flat.iter().find(|f| f.is_undefined()) {
            return u.clone();
        }
        // Merge identical bases carrying numeric exponents.
        let mut merged: BTreeMap<Expr, Rational> = BTreeMap::new();
        let mut rest = Vec::new();
        for f in flat {
            let (b, e) = base_exp(&f);
            let exponent = match e {
                None => Some(Rational::one()),
                Some(x) => x.as_num().cloned(),
            };
            match exponent {
                Some(q) if !matches!(b.node(), Node::Num(_)) => {
                    *merged.entry(b.clone()).or_insert_with(Rational::zero) += q;
                }
                _ => rest.push(f),
            }
        }
        let mut out: Vec<Expr> = Vec::new();
        for (b, q) in merged {
            if q.is_zero() {
                continue;
            }
            let p = Expr::pow(b, Expr::num(q));
            match p.node() {
                Node::Num(c) => coeff *= c,
                Node::Mul(children) => {
                    for c in children {
                        match c.node() {
                            Node::Num(k) => coeff *= k,
                            _ => out.push(c.clone()),
                        }
                    }
                }
                _ => out.push(p),
            }
        }
        out.extend(rest);
        if coeff.is_zero() {
            return Expr::zero();
        }
        out.sort_by(factor_cmp);
        if !coeff.is_one() || out.is_empty() {
            out.insert(0, Expr::num(coeff));
        }
        match out.len() {
            1 => out.pop().unwrap(),
            _ => Expr::from_node(Node::Mul(out)),
        }
    }

    pub fn pow(base: Expr, exponent: Expr) -> Expr {
        if exponent.is_zero() {
            return Expr::one();
        }
        if exponent.is_one() {
            return base;
        }
        let int_exp = exponent
            .as_num()
            .filter(|q| q.is_integer())
            .map(|q| q.to_integer());
        if let (Node::Num(b), Some(n)) = (base.node(), int_exp.as_ref()) {
            if b.is_zero() && n.is_negative() {
                // Undefined; keep a single representative so printing round-trips.
                return Expr::from_node(Node::Pow(base, Expr::int(-1)));
            }
            if let Some(k) = n.to_i32() {
                return Expr::num(num_traits::pow::Pow::pow(b, k));
            }
        }
        if base.is_one() {
            return Expr::one();
        }
        if let Some(n) = int_exp {
            match base.node() {
                Node::Pow(b0, e0) => {
                    if let Some(q) = e0.as_num() {
                        let prod = q * Rational::from_integer(n);
                        return Expr::pow(b0.clone(), Expr::num(prod));
                    }
                }
                Node::Mul(children) => {
                    let factors = children
                        .iter()
                        .map(|c| Expr::pow(c.clone(), exponent.clone()))
                        .collect();
                    return Expr::mul(factors);
                }
                _ => {}
            }
        }
        Expr::from_node(Node::Pow(base, exponent))
    }

    pub fn func(f: Func, arg: Expr) -> Expr {
        if let Some(q) = arg.as_num() {
            let folded = match f {
                Func::Exp if q.is_zero() => Some(Expr::one()),
                Func::Ln if q.is_one() => Some(Expr::zero()),
                Func::Sin | Func::Tan | Func::Atan | Func::Sqrt if q.is_zero() => {
                    Some(Expr::zero())
                }
                Func::Cos if q.is_zero() => Some(Expr::one()),
                Func::Sqrt if q.is_one() => Some(Expr::one()),
                _ => None,
            };
            if let Some(e) = folded {
                return e;
            }
        }
        Expr::from_node(Node::Func(f, arg))
    }

    pub fn apply(name: &str, args: Vec<Expr>) -> Expr {
        Expr::apply_deriv(name, args, Vec::new())
    }

    /// Formal slot derivative of an opaque application; the multi-index is
    /// stored sorted so mixed partials commute.
    pub fn apply_deriv(name: &str, args: Vec<Expr>, mut derivs: Vec<usize>) -> Expr {
        derivs.sort_unstable();
        Expr::from_node(Node::Apply {
            name: Arc::from(name),
            args,
            derivs,
        })
    }

    pub fn exp(arg: Expr) -> Expr {
        Expr::func(Func::Exp, arg)
    }

    pub fn powi(self, n: i64) -> Expr {
        Expr::pow(self, Expr::int(n))
    }

    pub fn recip(self) -> Expr {
        self.powi(-1)
    }

    /// Rebuild a node from new children through the smart constructors.
    pub fn map_children(&self, mut f: impl FnMut(&Expr) -> Expr) -> Expr {
        match self.node() {
            Node::Num(_) | Node::Var(_) => self.clone(),
            Node::Add(ts) => Expr::add(ts.iter().map(&mut f).collect()),
            Node::Mul(fs) => Expr::mul(fs.iter().map(&mut f).collect()),
            Node::Pow(b, e) => Expr::pow(f(b), f(e)),
            Node::Func(g, a) => Expr::func(*g, f(a)),
            Node::Apply { name, args, derivs } => {
                Expr::apply_deriv(name, args.iter().map(&mut f).collect(), derivs.clone())
            }
        }
    }

    /// Simultaneous substitution of variables.
    pub fn substitute(&self, bindings: &BTreeMap<String, Expr>) -> Expr {
        if bindings.is_empty() {
            return self.clone();
        }
        match self.node() {
            Node::Var(v) => bindings.get(&**v).cloned().unwrap_or_else(|| self.clone()),
            Node::Num(_) => self.clone(),
            _ => self.map_children(|c| c.substitute(bindings)),
        }
    }

    /// Substitute with `(name, value)` pairs.
    pub fn subs(&self, pairs: &[(&str, Expr)]) -> Expr {
        let map = pairs
            .iter()
            .map(|(k, v)| (k.to_string(), v.clone()))
            .collect();
        self.substitute(&map)
    }

    /// Replace every occurrence of the subtree `pattern` by `replacement`.
    pub fn replace_subtree(&self, pattern: &Expr, replacement: &Expr) -> Expr {
        if self == pattern {
            return replacement.clone();
        }
        match self.node() {
            Node::Num(_) | Node::Var(_) => self.clone(),
            _ => self.map_children(|c| c.replace_subtree(pattern, replacement)),
        }
    }

    /// Replace applications of the opaque symbol `name` by a concrete body in
    /// the formal parameters `params`; formal slot derivatives become actual
    /// derivatives of the body.
    pub fn instantiate(&self, name: &str, params: &[&str], body: &Expr) -> Expr {
        match self.node() {
            Node::Apply {
                name: n,
                args,
                derivs,
            } if &**n == name => {
                let args: Vec<Expr> = args
                    .iter()
                    .map(|a| a.instantiate(name, params, body))
                    .collect();
                let mut d = body.clone();
                for &slot in derivs {
                    d = d.diff(params[slot]);
                }
                let map = params
                    .iter()
                    .zip(args)
                    .map(|(p, a)| (p.to_string(), a))
                    .collect();
                d.substitute(&map)
            }
            Node::Num(_) | Node::Var(_) => self.clone(),
            _ => self.map_children(|c| c.instantiate(name, params, body)),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self.node() {
            Node::Num(_) => {}
            Node::Var(v) => {
                out.insert(v.to_string());
            }
            Node::Add(cs) | Node::Mul(cs) => cs.iter().for_each(|c| c.collect_vars(out)),
            Node::Pow(b, e) => {
                b.collect_vars(out);
                e.collect_vars(out);
            }
            Node::Func(_, a) => a.collect_vars(out),
            Node::Apply { args, .. } => args.iter().for_each(|c| c.collect_vars(out)),
        }
    }

    /// Names of opaque function symbols, with their arities.
    pub fn opaque_symbols(&self) -> BTreeMap<String, usize> {
        let mut out = BTreeMap::new();
        self.collect_opaque(&mut out);
        out
    }

    fn collect_opaque(&self, out: &mut BTreeMap<String, usize>) {
        match self.node() {
            Node::Num(_) | Node::Var(_) => {}
            Node::Add(cs) | Node::Mul(cs) => cs.iter().for_each(|c| c.collect_opaque(out)),
            Node::Pow(b, e) => {
                b.collect_opaque(out);
                e.collect_opaque(out);
            }
            Node::Func(_, a) => a.collect_opaque(out),
            Node::Apply { name, args, .. } => {
                out.insert(name.to_string(), args.len());
                args.iter().for_each(|c| c.collect_opaque(out));
            }
        }
    }

    pub fn contains_var(&self, v: &str) -> bool {
        match self.node() {
            Node::Num(_) => false,
            Node::Var(w) => &**w == v,
            Node::Add(cs) | Node::Mul(cs) => cs.iter().any(|c| c.contains_var(v)),
            Node::Pow(b, e) => b.contains_var(v) || e.contains_var(v),
            Node::Func(_, a) => a.contains_var(v),
            Node::Apply { args, .. } => args.iter().any(|c| c.contains_var(v)),
        }
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        1 + match self.node() {
            Node::Num(_) | Node::Var(_) => 0,
            Node::Add(cs) | Node::Mul(cs) => cs.iter().map(Expr::size).sum(),
            Node::Pow(b, e) => b.size() + e.size(),
            Node::Func(_, a) => a.size(),
            Node::Apply { args, .. } => args.iter().map(Expr::size).sum(),
        }
    }
}

impl From<i64> for Expr {
    fn from(n: i64) -> Expr {
        Expr::int(n)
    }
}

impl From<Rational> for Expr {
    fn from(q: Rational) -> Expr {
        Expr::num(q)
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $body:expr) => {
        impl ops::$tr<Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                let f: fn(Expr, Expr) -> Expr = $body;
                f(self, rhs)
            }
        }
        impl ops::$tr<&Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                let f: fn(Expr, Expr) -> Expr = $body;
                f(self.clone(), rhs.clone())
            }
        }
        impl ops::$tr<&Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                let f: fn(Expr, Expr) -> Expr = $body;
                f(self, rhs.clone())
            }
        }
        impl ops::$tr<Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                let f: fn(Expr, Expr) -> Expr = $body;
                f(self.clone(), rhs)
            }
        }
    };
}

binop!(Add, add, |a, b| Expr::add(vec![a, b]));
binop!(Sub, sub, |a, b| Expr::add(vec![a, Expr::mul(vec![Expr::int(-1), b])]));
binop!(Mul, mul, |a, b| Expr::mul(vec![a, b]));
binop!(Div, div, |a, b| Expr::mul(vec![a, Expr::pow(b, Expr::int(-1))]));

impl ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::mul(vec![Expr::int(-1), self])
    }
}

impl ops::Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        -self.clone()
    }
}

impl std::iter::Sum for Expr {
    fn sum<I: Iterator<Item = Expr>>(iter: I) -> Expr {
        Expr::add(iter.collect())
    }
}

impl std::iter::Product for Expr {
    fn product<I: Iterator<Item = Expr>>(iter: I) -> Expr {
        Expr::mul(iter.collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Expr {
        Expr::var("x")
    }

    #[test]
    fn sums_flatten_and_fold_constants() {
        let e = Expr::add(vec![x() + Expr::int(2), Expr::int(3), Expr::var("y")]);
        match e.node() {
            Node::Add(cs) => {
                assert_eq!(cs.len(), 3);
                assert!(cs.iter().all(|c| !matches!(c.node(), Node::Add(_))));
            }
            _ => panic!("expected sum"),
        }
    }

    #[test]
    fn products_merge_bases_and_drop_units() {
        assert_eq!(&x() * &x(), x().powi(2));
        assert_eq!(&x() / &x(), Expr::one());
        assert_eq!(Expr::int(0) * x(), Expr::zero());
        assert_eq!(Expr::int(4) / Expr::int(-2), Expr::int(-2));
    }

    #[test]
    fn integer_powers_distribute_over_products() {
        let e = Expr::pow(Expr::int(2) * x(), Expr::int(-1));
        assert_eq!(e, Expr::rational(1, 2) * x().recip());
        assert_eq!(Expr::pow(x().powi(3), Expr::int(-1)), x().powi(-3));
    }

    #[test]
    fn formal_derivatives_commute() {
        let a = Expr::apply_deriv("H", vec![x(), Expr::var("y")], vec![1, 0]);
        let b = Expr::apply_deriv("H", vec![x(), Expr::var("y")], vec![0, 1]);
        assert_eq!(a, b);
    }

    #[test]
    fn substitution_is_simultaneous() {
        let e = x() + Expr::var("y");
        let swapped = e.subs(&[("x", Expr::var("y")), ("y", x())]);
        assert_eq!(swapped, e);
    }
}
