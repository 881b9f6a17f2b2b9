use super::{Expr, Func, Node};

impl Expr {
    /// Partial derivative with respect to the variable `v`.
    ///
    /// Opaque applications are differentiated by the chain rule through
    /// formal slot derivatives, so `d/dx H(x*y, z)` becomes `y*H_1(x*y, z)`.
    pub fn diff(&self, v: &str) -> Expr {
        if !self.contains_var(v) {
            return Expr::zero();
        }
        match self.node() {
            Node::Num(_) => Expr::zero(),
            Node::Var(w) => {
                if &**w == v {
                    Expr::one()
                } else {
                    Expr::zero()
                }
            }
            Node::Add(ts) => Expr::add(ts.iter().map(|t| t.diff(v)).collect()),
            Node::Mul(fs) => {
                let mut terms = Vec::with_capacity(fs.len());
                for (i, f) in fs.iter().enumerate() {
                    let df = f.diff(v);
                    if df.is_zero() {
                        continue;
                    }
                    let mut factors: Vec<Expr> = fs.to_vec();
                    factors[i] = df;
                    terms.push(Expr::mul(factors));
                }
                Expr::add(terms)
            }
            Node::Pow(b, e) => {
                let db = b.diff(v);
                let de = e.diff(v);
                let mut terms = Vec::new();
                if !db.is_zero() {
                    let lowered = Expr::pow(b.clone(), e - &Expr::one());
                    terms.push(Expr::mul(vec![e.clone(), lowered, db]));
                }
                if !de.is_zero() {
                    terms.push(Expr::mul(vec![
                        self.clone(),
                        Expr::func(Func::Ln, b.clone()),
                        de,
                    ]));
                }
                Expr::add(terms)
            }
            Node::Func(f, a) => {
                let da = a.diff(v);
                let outer = match f {
                    Func::Exp => self.clone(),
                    Func::Ln => a.clone().recip(),
                    Func::Sin => Expr::func(Func::Cos, a.clone()),
                    Func::Cos => -Expr::func(Func::Sin, a.clone()),
                    Func::Tan => Expr::one() + self.clone().powi(2),
                    Func::Atan => (Expr::one() + a.clone().powi(2)).recip(),
                    Func::Sqrt => (Expr::int(2) * self.clone()).recip(),
                };
                outer * da
            }
            Node::Apply { name, args, derivs } => {
                let mut terms = Vec::new();
                for (slot, a) in args.iter().enumerate() {
                    let da = a.diff(v);
                    if da.is_zero() {
                        continue;
                    }
                    let mut d = derivs.clone();
                    d.push(slot);
                    terms.push(Expr::apply_deriv(name, args.clone(), d) * da);
                }
                Expr::add(terms)
            }
        }
    }

    /// Repeated partial derivative along the listed variables.
    pub fn diff_many(&self, vars: &[&str]) -> Expr {
        vars.iter().fold(self.clone(), |acc, v| acc.diff(v))
    }
}

#[cfg(test)]
mod tests {
    use crate::expr::{normalize, parse, Expr};

    fn d(s: &str, v: &str) -> Expr {
        normalize(&parse(s).unwrap().diff(v))
    }

    fn n(s: &str) -> Expr {
        normalize(&parse(s).unwrap())
    }

    #[test]
    fn elementary_rules() {
        assert_eq!(d("x^3 + 2*x*y", "x"), n("3*x^2 + 2*y"));
        assert_eq!(d("1/x", "x"), n("-1/x^2"));
        assert_eq!(d("exp(2*x)", "x"), n("2*exp(2*x)"));
        assert_eq!(d("ln(x^2)", "x"), n("2/x"));
        assert_eq!(d("atan(x)", "x"), n("1/(1 + x^2)"));
        assert_eq!(d("sin(x)*cos(x)", "x"), n("cos(x)^2 - sin(x)^2"));
    }

    #[test]
    fn opaque_chain_rule() {
        assert_eq!(d("H(x*y, z)", "x"), n("y*H_1(x*y, z)"));
        assert_eq!(
            normalize(&parse("H(x, y)").unwrap().diff_many(&["x", "y"])),
            n("H_12(x, y)")
        );
        assert_eq!(
            normalize(&parse("H(x, y)").unwrap().diff_many(&["y", "x"])),
            n("H_12(x, y)")
        );
    }

    #[test]
    fn symbolic_exponent() {
        assert_eq!(d("x^a", "x"), n("a*x^(a - 1)"));
        assert_eq!(d("a^x", "x"), n("a^x*ln(a)"));
    }
}
