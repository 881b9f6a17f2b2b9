//! Sparse multivariate polynomials over Q in interned atoms.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::Rational;

/// Monomial: sorted `(atom, exponent)` pairs with positive exponents.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub(crate) struct Mono(pub(crate) Vec<(u32, u32)>);

impl Mono {
    pub(crate) fn one() -> Mono {
        Mono(Vec::new())
    }

    pub(crate) fn atom(a: u32, e: u32) -> Mono {
        if e == 0 {
            Mono::one()
        } else {
            Mono(vec![(a, e)])
        }
    }

    pub(crate) fn degree_of(&self, a: u32) -> u32 {
        self.0
            .iter()
            .find(|(v, _)| *v == a)
            .map(|(_, e)| *e)
            .unwrap_or(0)
    }

    pub(crate) fn mul(&self, other: &Mono) -> Mono {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a[i].0, a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Mono(out)
    }

    /// `self / other` if it is a monomial.
    pub(crate) fn div(&self, other: &Mono) -> Option<Mono> {
        let mut out = Vec::with_capacity(self.0.len());
        let mut j = 0;
        for &(v, e) in &self.0 {
            if j < other.0.len() && other.0[j].0 < v {
                return None;
            }
            if j < other.0.len() && other.0[j].0 == v {
                let f = other.0[j].1;
                j += 1;
                match e.cmp(&f) {
                    Ordering::Less => return None,
                    Ordering::Equal => {}
                    Ordering::Greater => out.push((v, e - f)),
                }
            } else {
                out.push((v, e));
            }
        }
        if j < other.0.len() {
            return None;
        }
        Some(Mono(out))
    }

    /// Drop atom `a`, returning its exponent.
    pub(crate) fn without(&self, a: u32) -> (Mono, u32) {
        let mut e = 0;
        let rest = self
            .0
            .iter()
            .filter(|(v, k)| {
                if *v == a {
                    e = *k;
                    false
                } else {
                    true
                }
            })
            .copied()
            .collect();
        (Mono(rest), e)
    }

    /// Componentwise minimum.
    pub(crate) fn gcd(&self, other: &Mono) -> Mono {
        let mut out = Vec::new();
        for &(v, e) in &self.0 {
            let f = other.degree_of(v);
            if f > 0 {
                out.push((v, e.min(f)));
            }
        }
        Mono(out)
    }

    pub(crate) fn is_one(&self) -> bool {
        self.0.is_empty()
    }
}

/// Lexicographic order with lower atom ids ranking higher.
impl Ord for Mono {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b) = (&self.0, &other.0);
        let mut i = 0;
        loop {
            match (a.get(i), b.get(i)) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some(&(va, ea)), Some(&(vb, eb))) => {
                    if va != vb {
                        return vb.cmp(&va);
                    }
                    if ea != eb {
                        return ea.cmp(&eb);
                    }
                }
            }
            i += 1;
        }
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub(crate) struct Poly {
    pub(crate) terms: BTreeMap<Mono, Rational>,
}

impl Poly {
    pub(crate) fn zero() -> Poly {
        Poly::default()
    }

    pub(crate) fn constant(q: Rational) -> Poly {
        let mut p = Poly::zero();
        if !q.is_zero() {
            p.terms.insert(Mono::one(), q);
        }
        p
    }

    pub(crate) fn one() -> Poly {
        Poly::constant(Rational::one())
    }

    pub(crate) fn atom(a: u32) -> Poly {
        Poly::monomial(Mono::atom(a, 1), Rational::one())
    }

    pub(crate) fn monomial(m: Mono, c: Rational) -> Poly {
        let mut p = Poly::zero();
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    pub(crate) fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub(crate) fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms.contains_key(&Mono::one()))
    }

    pub(crate) fn constant_value(&self) -> Option<Rational> {
        if self.is_zero() {
            return Some(Rational::zero());
        }
        if self.is_constant() {
            return self.terms.values().next().cloned();
        }
        None
    }

    pub(crate) fn leading(&self) -> Option<(&Mono, &Rational)> {
        self.terms.iter().next_back()
    }

    fn add_term(&mut self, m: Mono, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub(crate) fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub(crate) fn sub(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }

    pub(crate) fn neg(&self) -> Poly {
        self.scale(&-Rational::one())
    }

    pub(crate) fn scale(&self, q: &Rational) -> Poly {
        if q.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c * q))
                .collect(),
        }
    }

    pub(crate) fn mul_mono(&self, m: &Mono, q: &Rational) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (k.mul(m), c * q))
                .collect(),
        }
    }

    pub(crate) fn mul(&self, other: &Poly) -> Poly {
        let (small, big) = if self.terms.len() <= other.terms.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut out = Poly::zero();
        for (m, c) in &small.terms {
            for (k, d) in &big.terms {
                out.add_term(m.mul(k), c * d);
            }
        }
        out
    }

    pub(crate) fn pow(&self, n: u32) -> Poly {
        let mut result = Poly::one();
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                result = result.mul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Exact division; `None` when `d` does not divide `self`.
    pub(crate) fn div_exact(&self, d: &Poly) -> Option<Poly> {
        if d.is_zero() {
            return None;
        }
        if let Some(c) = d.constant_value() {
            return Some(self.scale(&c.recip()));
        }
        let (lm, lc) = d.leading().map(|(m, c)| (m.clone(), c.clone()))?;
        let lc_inv = lc.recip();
        let mut r = self.clone();
        let mut q = Poly::zero();
        while let Some((m, c)) = r.leading().map(|(m, c)| (m.clone(), c.clone())) {
            let t = m.div(&lm)?;
            let coef = c * &lc_inv;
            r = r.sub(&d.mul_mono(&t, &coef));
            q.add_term(t, coef);
        }
        Some(q)
    }

    pub(crate) fn atoms(&self) -> Vec<u32> {
        let mut out: Vec<u32> = self
            .terms
            .keys()
            .flat_map(|m| m.0.iter().map(|(v, _)| *v))
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    pub(crate) fn degree_in(&self, a: u32) -> u32 {
        self.terms.keys().map(|m| m.degree_of(a)).max().unwrap_or(0)
    }

    /// Coefficients with respect to atom `a`, indexed by degree.
    pub(crate) fn coeffs_in(&self, a: u32) -> Vec<Poly> {
        let mut out = vec![Poly::zero(); self.degree_in(a) as usize + 1];
        for (m, c) in &self.terms {
            let (rest, e) = m.without(a);
            out[e as usize].add_term(rest, c.clone());
        }
        out
    }

    fn leading_coeff_in(&self, a: u32) -> Poly {
        self.coeffs_in(a).pop().unwrap_or_default()
    }

    /// Common monomial factor of all terms.
    pub(crate) fn monomial_content(&self) -> Mono {
        let mut it = self.terms.keys();
        let Some(first) = it.next() else {
            return Mono::one();
        };
        let mut g = first.clone();
        for m in it {
            if g.is_one() {
                break;
            }
            g = g.gcd(m);
        }
        g
    }

    /// Rational content: positive gcd of numerators over lcm of denominators.
    pub(crate) fn rational_content(&self) -> Rational {
        let mut num = BigInt::zero();
        let mut den = BigInt::one();
        for c in self.terms.values() {
            num = num.gcd(c.numer());
            den = den.lcm(c.denom());
        }
        if num.is_zero() {
            return Rational::one();
        }
        Rational::new(num, den)
    }

    /// Split as `c * p` with integer coprime coefficients and positive
    /// leading coefficient in `p`.
    pub(crate) fn primitive(&self) -> (Rational, Poly) {
        if self.is_zero() {
            return (Rational::one(), Poly::zero());
        }
        let mut c = self.rational_content();
        if self.leading().is_some_and(|(_, lc)| lc.is_negative()) {
            c = -c;
        }
        (c.clone(), self.scale(&c.recip()))
    }

    fn pseudo_rem(&self, q: &Poly, a: u32) -> Poly {
        let n = q.degree_in(a);
        let lc = q.leading_coeff_in(a);
        let mut r = self.clone();
        loop {
            if r.is_zero() {
                return r;
            }
            let d = r.degree_in(a);
            if d < n {
                return r;
            }
            let lr = r.leading_coeff_in(a);
            let shift = Poly::monomial(Mono::atom(a, d - n), Rational::one());
            r = r.mul(&lc).sub(&lr.mul(q).mul(&shift));
        }
    }

    fn content_in(&self, a: u32) -> Poly {
        let mut g = Poly::zero();
        for c in self.coeffs_in(a) {
            if c.is_zero() {
                continue;
            }
            g = gcd(&g, &c);
            if g.is_constant() {
                return Poly::one();
            }
        }
        g
    }

    fn primitive_part_in(&self, a: u32) -> Poly {
        let c = self.content_in(a);
        self.div_exact(&c).expect("content divides").primitive().1
    }
}

/// Greatest common divisor, primitive with positive leading coefficient.
pub(crate) fn gcd(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return b.primitive().1;
    }
    if b.is_zero() {
        return a.primitive().1;
    }
    if a.is_constant() || b.is_constant() {
        return Poly::one();
    }
    // Peel off the monomial content first; it is cheap and common.
    let ma = a.monomial_content();
    let mb = b.monomial_content();
    let mg = ma.gcd(&mb);
    let a = a.div_exact(&Poly::monomial(ma, Rational::one())).unwrap();
    let b = b.div_exact(&Poly::monomial(mb, Rational::one())).unwrap();
    let mono = Poly::monomial(mg, Rational::one());
    if a.is_constant() || b.is_constant() {
        return mono;
    }
    if a == b {
        return mono.mul(&a).primitive().1;
    }

    let atoms_a = a.atoms();
    let atoms_b = b.atoms();
    let shared: Vec<u32> = atoms_a
        .iter()
        .filter(|v| atoms_b.contains(v))
        .copied()
        .collect();
    if shared.is_empty() {
        return mono;
    }
    let v = *atoms_a
        .iter()
        .chain(atoms_b.iter())
        .max()
        .expect("non-constant");
    if a.degree_in(v) == 0 {
        return mono.mul(&gcd(&a, &b.content_in(v))).primitive().1;
    }
    if b.degree_in(v) == 0 {
        return mono.mul(&gcd(&a.content_in(v), &b)).primitive().1;
    }
    let ca = a.content_in(v);
    let cb = b.content_in(v);
    let c = gcd(&ca, &cb);
    let mut p = a.div_exact(&ca).unwrap();
    let mut q = b.div_exact(&cb).unwrap();
    if p.degree_in(v) < q.degree_in(v) {
        std::mem::swap(&mut p, &mut q);
    }
    let g = loop {
        if q.is_zero() {
            break p.primitive_part_in(v);
        }
        if q.degree_in(v) == 0 {
            break Poly::one();
        }
        let r = p.pseudo_rem(&q, v);
        p = q;
        q = if r.is_zero() {
            Poly::zero()
        } else {
            r.primitive_part_in(v)
        };
    };
    mono.mul(&c).mul(&g).primitive().1
}
