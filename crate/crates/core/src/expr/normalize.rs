//! Rational-function normal form.
//!
//! Non-polynomial subterms (variables, function applications, symbolic or
//! fractional powers) are interned as atoms. The expression is then a quotient
//! of polynomials in those atoms, reduced so numerator and denominator share no
//! common factor. The denominator is primitive over Z with a positive leading
//! coefficient in an atom order derived from the expression order, so the
//! result does not depend on traversal order.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use super::poly::{gcd, Mono, Poly};
use super::{Expr, Node, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("expression is not polynomial in {var}: {reason}")]
pub struct NotPolynomial {
    pub var: String,
    pub reason: String,
}

#[derive(Clone, Debug)]
struct Factor {
    p: Poly,
    mult: u32,
    irreducible: bool,
}

#[derive(Clone, Debug)]
struct RatFunc {
    num: Poly,
    den: Vec<Factor>,
}

/// A factor is certified irreducible when it is a single atom or has degree
/// one in some atom with coprime coefficients.
fn certify(p: &Poly) -> bool {
    if p.terms.len() == 1 {
        let m = p.terms.keys().next().unwrap();
        return m.0.len() == 1 && m.0[0].1 == 1;
    }
    for a in p.atoms() {
        if p.degree_in(a) == 1 {
            let cs = p.coeffs_in(a);
            if gcd(&cs[0], &cs[1]).is_constant() {
                return true;
            }
        }
    }
    false
}

fn push_factor(den: &mut Vec<Factor>, p: Poly, mult: u32) {
    if mult == 0 || p.is_constant() {
        return;
    }
    if let Some(f) = den.iter_mut().find(|f| f.p == p) {
        f.mult += mult;
        return;
    }
    let irreducible = certify(&p);
    den.push(Factor { p, mult, irreducible });
}

impl RatFunc {
    fn constant(q: Rational) -> RatFunc {
        RatFunc {
            num: Poly::constant(q),
            den: Vec::new(),
        }
    }

    fn poly(p: Poly) -> RatFunc {
        RatFunc {
            num: p,
            den: Vec::new(),
        }
    }

    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    fn reduce(mut self) -> RatFunc {
        if self.num.is_zero() {
            self.den.clear();
            return self;
        }
        let mut i = 0;
        while i < self.den.len() {
            loop {
                if self.den[i].mult == 0 || self.num.is_constant() {
                    break;
                }
                if let Some(q) = self.num.div_exact(&self.den[i].p) {
                    self.num = q;
                    self.den[i].mult -= 1;
                    continue;
                }
                if self.den[i].irreducible {
                    break;
                }
                let g = gcd(&self.num, &self.den[i].p);
                if g.is_constant() {
                    break;
                }
                self.num = self.num.div_exact(&g).expect("gcd divides");
                let m = self.den[i].mult;
                let (k, rest) = self.den[i].p.div_exact(&g).expect("gcd divides").primitive();
                // p = g * k * rest; the scalar k moves to the numerator.
                self.num = self.num.scale(&k.recip().pow(m as i32));
                self.den[i] = Factor {
                    irreducible: certify(&rest),
                    p: rest,
                    mult: m,
                };
                if self.den[i].p.is_constant() {
                    self.den[i].mult = 0;
                }
                push_factor(&mut self.den, g, m - 1);
            }
            i += 1;
        }
        self.den.retain(|f| f.mult > 0 && !f.p.is_constant());
        self
    }

    fn mul(&self, other: &RatFunc) -> RatFunc {
        if self.is_zero() || other.is_zero() {
            return RatFunc::constant(Rational::zero());
        }
        let mut den = self.den.clone();
        for f in &other.den {
            push_factor(&mut den, f.p.clone(), f.mult);
        }
        RatFunc {
            num: self.num.mul(&other.num),
            den,
        }
        .reduce()
    }

    fn add(&self, other: &RatFunc) -> RatFunc {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        if self.den.is_empty() && other.den.is_empty() {
            return RatFunc::poly(self.num.add(&other.num));
        }
        let mut den: Vec<Factor> = self.den.clone();
        for f in &other.den {
            match den.iter_mut().find(|g| g.p == f.p) {
                Some(g) => g.mult = g.mult.max(f.mult),
                None => den.push(f.clone()),
            }
        }
        let lift = |r: &RatFunc| -> Poly {
            let mut out = r.num.clone();
            for f in &den {
                let have = r.den.iter().find(|g| g.p == f.p).map_or(0, |g| g.mult);
                if f.mult > have {
                    out = out.mul(&f.p.pow(f.mult - have));
                }
            }
            out
        };
        let num = lift(self).add(&lift(other));
        RatFunc { num, den }.reduce()
    }

    fn inv(&self) -> Option<RatFunc> {
        if self.num.is_zero() {
            return None;
        }
        let mut new_num = Poly::one();
        for f in &self.den {
            new_num = new_num.mul(&f.p.pow(f.mult));
        }
        let mc = self.num.monomial_content();
        let rest = self
            .num
            .div_exact(&Poly::monomial(mc.clone(), Rational::one()))
            .unwrap();
        let mut den = Vec::new();
        for &(a, e) in &mc.0 {
            push_factor(&mut den, Poly::atom(a), e);
        }
        let (c, prim) = rest.primitive();
        push_factor(&mut den, prim, 1);
        Some(RatFunc {
            num: new_num.scale(&c.recip()),
            den,
        })
    }

    fn pow(&self, n: i64) -> Option<RatFunc> {
        if n < 0 {
            return self.inv()?.pow(-n);
        }
        let n = n as u32;
        Some(RatFunc {
            num: self.num.pow(n),
            den: self
                .den
                .iter()
                .map(|f| Factor {
                    p: f.p.clone(),
                    mult: f.mult * n,
                    irreducible: f.irreducible,
                })
                .filter(|f| f.mult > 0)
                .collect(),
        })
    }

    fn den_poly(&self) -> Poly {
        let mut d = Poly::one();
        for f in &self.den {
            d = d.mul(&f.p.pow(f.mult));
        }
        d
    }
}

#[derive(Default)]
struct Ctx {
    atoms: Vec<Expr>,
    index: HashMap<Expr, u32>,
    /// Base of a fractional power mapped to the lcm of exponent denominators.
    roots: HashMap<Expr, u32>,
    base_cache: HashMap<Expr, Expr>,
}

impl Ctx {
    fn intern(&mut self, e: Expr) -> u32 {
        if let Some(&i) = self.index.get(&e) {
            return i;
        }
        let i = self.atoms.len() as u32;
        self.atoms.push(e.clone());
        self.index.insert(e, i);
        i
    }

    /// Polynomial for an atom, written through its root atom when the same
    /// base also appears under a fractional exponent.
    fn atom_poly(&mut self, e: Expr) -> Poly {
        if let Some(&l) = self.roots.get(&e) {
            let r = Expr::pow(e, Expr::rational(1, l as i64));
            let id = self.intern(r);
            return Poly::monomial(Mono::atom(id, l), Rational::one());
        }
        Poly::atom(self.intern(e))
    }

    fn norm_base(&mut self, b: &Expr) -> Expr {
        if let Some(n) = self.base_cache.get(b) {
            return n.clone();
        }
        let n = normalize(b);
        self.base_cache.insert(b.clone(), n.clone());
        n
    }

    fn scan_roots(&mut self, e: &Expr) {
        match e.node() {
            Node::Num(_) | Node::Var(_) | Node::Func(..) | Node::Apply { .. } => {}
            Node::Add(cs) | Node::Mul(cs) => cs.iter().for_each(|c| self.scan_roots(c)),
            Node::Pow(b, x) => {
                self.scan_roots(b);
                if let Some(q) = x.as_num() {
                    if !q.is_integer() {
                        if let Some(d) = q.denom().to_u32() {
                            let nb = self.norm_base(b);
                            let entry = self.roots.entry(nb).or_insert(1);
                            *entry = entry.lcm(&d);
                        }
                    }
                }
            }
        }
    }

    fn to_rf(&mut self, e: &Expr) -> RatFunc {
        match e.node() {
            Node::Num(q) => RatFunc::constant(q.clone()),
            Node::Var(_) => RatFunc::poly(self.atom_poly(e.clone())),
            Node::Add(ts) => {
                let mut acc = RatFunc::constant(Rational::zero());
                for t in ts {
                    let r = self.to_rf(t);
                    acc = acc.add(&r);
                }
                acc
            }
            Node::Mul(fs) => {
                let mut acc = RatFunc::constant(Rational::one());
                for f in fs {
                    let r = self.to_rf(f);
                    acc = acc.mul(&r);
                    if acc.is_zero() {
                        break;
                    }
                }
                acc
            }
            Node::Pow(b, x) => {
                let xn = normalize(x);
                if let Some(q) = xn.as_num() {
                    if q.is_integer() {
                        if let Some(n) = q.to_integer().to_i64() {
                            let rb = self.to_rf(b);
                            if let Some(r) = rb.pow(n) {
                                return r;
                            }
                        }
                        let nb = self.norm_base(b);
                        return RatFunc::poly(self.atom_poly(Expr::pow(nb, xn)));
                    }
                    let nb = self.norm_base(b);
                    if let (Some(&l), Some(p)) = (self.roots.get(&nb), q.numer().to_i64()) {
                        let k = (BigInt::from(l) / q.denom()).to_i64().unwrap_or(1);
                        let r = Expr::pow(nb, Expr::rational(1, l as i64));
                        let id = self.intern(r);
                        let base = RatFunc::poly(Poly::atom(id));
                        if let Some(rf) = base.pow(p * k) {
                            return rf;
                        }
                    }
                    let nb = self.norm_base(b);
                    return RatFunc::poly(self.atom_poly(Expr::pow(nb, xn)));
                }
                let nb = self.norm_base(b);
                RatFunc::poly(self.atom_poly(Expr::pow(nb, xn)))
            }
            Node::Func(f, a) => {
                let atom = Expr::func(*f, normalize(a));
                match atom.as_num() {
                    Some(q) => RatFunc::constant(q.clone()),
                    None => RatFunc::poly(self.atom_poly(atom)),
                }
            }
            Node::Apply { name, args, derivs } => {
                let atom = Expr::apply_deriv(
                    name,
                    args.iter().map(normalize).collect(),
                    derivs.clone(),
                );
                RatFunc::poly(self.atom_poly(atom))
            }
        }
    }

    fn ranks(&self) -> Vec<u32> {
        let mut order: Vec<u32> = (0..self.atoms.len() as u32).collect();
        order.sort_by(|&a, &b| self.atoms[a as usize].cmp(&self.atoms[b as usize]));
        let mut rank = vec![0; self.atoms.len()];
        for (r, &id) in order.iter().enumerate() {
            rank[id as usize] = r as u32;
        }
        rank
    }

    fn mono_expr(&self, m: &Mono) -> Expr {
        Expr::mul(
            m.0.iter()
                .map(|&(a, e)| Expr::pow(self.atoms[a as usize].clone(), Expr::int(e as i64)))
                .collect(),
        )
    }

    fn poly_expr(&self, p: &Poly) -> Expr {
        Expr::add(
            p.terms
                .iter()
                .map(|(m, c)| Expr::mul(vec![Expr::num(c.clone()), self.mono_expr(m)]))
                .collect(),
        )
    }

    /// Leading coefficient sign of `p` in the rank order.
    fn rank_leading_negative(&self, p: &Poly, rank: &[u32]) -> bool {
        let key = |m: &Mono| -> Vec<(u32, u32)> {
            let mut v: Vec<(u32, u32)> = m.0.iter().map(|&(a, e)| (rank[a as usize], e)).collect();
            v.sort_unstable();
            v
        };
        let best = p
            .terms
            .iter()
            .map(|(m, c)| (Mono(key(m)), c))
            .max_by(|a, b| a.0.cmp(&b.0));
        best.is_some_and(|(_, c)| c.is_negative())
    }

    /// Canonical (numerator, monomial denominator, remaining denominator).
    fn parts(&self, rf: &RatFunc) -> (Poly, Mono, Poly) {
        let mut n = rf.num.clone();
        let mut d = rf.den_poly();
        if !d.is_constant() {
            let rank = self.ranks();
            if self.rank_leading_negative(&d, &rank) {
                n = n.neg();
                d = d.neg();
            }
        }
        if let Some(c) = d.constant_value() {
            return (n.scale(&c.recip()), Mono::one(), Poly::one());
        }
        let mc = d.monomial_content();
        let r = d
            .div_exact(&Poly::monomial(mc.clone(), Rational::one()))
            .unwrap();
        (n, mc, r)
    }

    fn to_expr(&self, rf: &RatFunc) -> Expr {
        let (n, mc, r) = self.parts(rf);
        let mut factors = vec![self.poly_expr(&n)];
        if !mc.is_one() {
            factors.push(self.mono_expr(&mc).recip());
        }
        if !r.is_constant() {
            factors.push(self.poly_expr(&r).recip());
        } else if let Some(c) = r.constant_value() {
            factors.push(Expr::num(c.recip()));
        }
        Expr::mul(factors)
    }
}

fn build(e: &Expr) -> (Ctx, RatFunc) {
    let mut ctx = Ctx::default();
    ctx.scan_roots(e);
    let rf = ctx.to_rf(e);
    (ctx, rf)
}

/// Canonical rational-function form of `e`.
///
/// Two expressions that are equal as rational functions of the same atoms
/// normalize to the same tree; applying `normalize` twice changes nothing.
pub fn normalize(e: &Expr) -> Expr {
    match e.node() {
        Node::Num(_) | Node::Var(_) => return e.clone(),
        _ => {}
    }
    let (ctx, rf) = build(e);
    ctx.to_expr(&rf)
}

/// Numerator and denominator of the normal form.
pub fn numerator_denominator(e: &Expr) -> (Expr, Expr) {
    let (ctx, rf) = build(e);
    let (n, mc, r) = ctx.parts(&rf);
    let den = Expr::mul(vec![ctx.mono_expr(&mc), ctx.poly_expr(&r)]);
    (ctx.poly_expr(&n), den)
}

/// Coefficients of `e` as a polynomial in `vars`, keyed by exponent vector.
///
/// Fails when some variable occurs in a denominator or inside a
/// non-polynomial subterm.
pub fn collect_monomials(
    e: &Expr,
    vars: &[&str],
) -> Result<BTreeMap<Vec<u32>, Expr>, NotPolynomial> {
    let (mut ctx, rf) = build(e);
    let ids: Vec<u32> = vars.iter().map(|v| ctx.intern(Expr::var(v))).collect();
    for (i, atom) in ctx.atoms.iter().enumerate() {
        if ids.contains(&(i as u32)) {
            continue;
        }
        if let Some(v) = vars.iter().find(|v| atom.contains_var(v)) {
            return Err(NotPolynomial {
                var: v.to_string(),
                reason: format!("occurs inside {atom}"),
            });
        }
    }
    for f in &rf.den {
        if let Some(&a) = f.p.atoms().iter().find(|a| ids.contains(a)) {
            return Err(NotPolynomial {
                var: ctx.atoms[a as usize].to_string(),
                reason: "occurs in a denominator".into(),
            });
        }
    }
    let mut groups: BTreeMap<Vec<u32>, Poly> = BTreeMap::new();
    for (m, c) in &rf.num.terms {
        let mut key = vec![0u32; ids.len()];
        let mut rest = m.clone();
        for (k, &id) in ids.iter().enumerate() {
            let (r, e) = rest.without(id);
            key[k] = e;
            rest = r;
        }
        let entry = groups.entry(key).or_default();
        *entry = entry.add(&Poly::monomial(rest, c.clone()));
    }
    Ok(groups
        .into_iter()
        .map(|(k, p)| {
            let coef = RatFunc {
                num: p,
                den: rf.den.clone(),
            }
            .reduce();
            (k, ctx.to_expr(&coef))
        })
        .collect())
}
