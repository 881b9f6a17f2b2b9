//! Text output. The structural printer round-trips through [`parse`].
//!
//! [`parse`]: super::parse

use num_traits::{One, Signed};

use super::{normalize, Expr, Node, Rational};

/// Print the normal form of `e`; equal rational functions print identically.
pub fn print_canonical(e: &Expr) -> String {
    print(&normalize(e))
}

/// Print the tree as is.
pub fn print(e: &Expr) -> String {
    let mut out = String::new();
    write_expr(e, &mut out, Style::Exact);
    out
}

/// Print the normal form with non-integer rationals as decimals rounded to
/// `digits` significant digits. For display only; does not round-trip.
pub fn print_decimal(e: &Expr, digits: usize) -> String {
    let mut out = String::new();
    write_expr(&normalize(e), &mut out, Style::Decimal(digits));
    out
}

#[derive(Clone, Copy)]
enum Style {
    Exact,
    Decimal(usize),
}

fn decimal(q: &Rational, digits: usize) -> String {
    let x = q.numer().to_string().parse::<f64>().unwrap_or(f64::NAN)
        / q.denom().to_string().parse::<f64>().unwrap_or(f64::NAN);
    let s = format!("{:.*e}", digits.saturating_sub(1), x);
    let (m, e) = s.split_once('e').expect("exponent form");
    let exp: i32 = e.parse().expect("integer exponent");
    if (-4..=6).contains(&exp) {
        let places = (digits as i32 - 1 - exp).max(0) as usize;
        let t = format!("{x:.places$}");
        if t.contains('.') {
            t.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            t
        }
    } else {
        let m = m.trim_end_matches('0').trim_end_matches('.');
        format!("{m}e{exp}")
    }
}

fn write_rational(q: &Rational, out: &mut String, st: Style) {
    if let (Style::Decimal(d), false) = (st, q.is_integer()) {
        out.push_str(&decimal(q, d));
    } else if q.denom().is_one() {
        out.push_str(&q.numer().to_string());
    } else {
        out.push_str(&format!("{}/{}", q.numer(), q.denom()));
    }
}

/// True when the term prints with a leading minus.
fn is_negative_term(e: &Expr) -> bool {
    match e.node() {
        Node::Num(q) => q.is_negative(),
        Node::Mul(fs) => fs[0].as_num().is_some_and(|q| q.is_negative()),
        _ => false,
    }
}

fn write_expr(e: &Expr, out: &mut String, st: Style) {
    match e.node() {
        Node::Add(ts) => {
            for (i, t) in ts.iter().enumerate() {
                if i == 0 {
                    write_term(t, out, st);
                } else if is_negative_term(t) {
                    out.push_str(" - ");
                    write_term(&-t, out, st);
                } else {
                    out.push_str(" + ");
                    write_term(t, out, st);
                }
            }
        }
        _ => write_term(e, out, st),
    }
}

fn write_term(e: &Expr, out: &mut String, st: Style) {
    match e.node() {
        Node::Num(q) => write_rational(q, out, st),
        Node::Mul(fs) => write_product(fs, out, st),
        _ => write_atomic(e, out, st),
    }
}

fn write_product(fs: &[Expr], out: &mut String, st: Style) {
    let (coeff, rest) = match fs[0].node() {
        Node::Num(q) => (q.clone(), &fs[1..]),
        _ => (Rational::one(), fs),
    };
    let mut num: Vec<Expr> = Vec::new();
    let mut den: Vec<String> = Vec::new();
    for f in rest {
        match f.node() {
            Node::Pow(b, x) if x.as_num().is_some_and(|q| q.is_negative()) => {
                let q = -x.as_num().unwrap();
                den.push(power_string(b, &Expr::num(q), st));
            }
            _ => num.push(f.clone()),
        }
    }
    if coeff.is_negative() {
        out.push('-');
    }
    let mut c = coeff.abs();
    let mut num_parts: Vec<String> = Vec::new();
    if let (Style::Decimal(d), false) = (st, c.is_integer()) {
        num_parts.push(decimal(&c, d));
        c = Rational::one();
    } else if !c.numer().is_one() || num.is_empty() {
        num_parts.push(c.numer().to_string());
    }
    for f in &num {
        num_parts.push(factor_string(f, st));
    }
    out.push_str(&num_parts.join("*"));
    let mut den_parts: Vec<String> = Vec::new();
    if !c.denom().is_one() {
        den_parts.push(c.denom().to_string());
    }
    den_parts.extend(den);
    match den_parts.len() {
        0 => {}
        1 => {
            out.push('/');
            out.push_str(&den_parts[0]);
        }
        _ => {
            out.push_str("/(");
            out.push_str(&den_parts.join("*"));
            out.push(')');
        }
    }
}

fn factor_string(e: &Expr, st: Style) -> String {
    let mut s = String::new();
    match e.node() {
        Node::Add(_) | Node::Mul(_) => {
            s.push('(');
            write_expr(e, &mut s, st);
            s.push(')');
        }
        Node::Num(q) if q.is_negative() || !q.denom().is_one() => {
            s.push('(');
            write_rational(q, &mut s, st);
            s.push(')');
        }
        _ => write_atomic(e, &mut s, st),
    }
    s
}

/// `b^x` with the base parenthesized as needed; `b` alone when `x` is one.
fn power_string(b: &Expr, x: &Expr, st: Style) -> String {
    let mut out = if matches!(b.node(), Node::Pow(..)) {
        let mut s = String::from("(");
        write_atomic(b, &mut s, st);
        s.push(')');
        s
    } else {
        factor_string(b, st)
    };
    if x.is_one() {
        return out;
    }
    out.push('^');
    match x.as_num() {
        Some(q) if q.is_integer() && q.is_positive() => write_rational(q, &mut out, st),
        _ => {
            out.push('(');
            write_expr(x, &mut out, st);
            out.push(')');
        }
    }
    out
}

fn write_args(args: &[Expr], out: &mut String, st: Style) {
    out.push('(');
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        write_expr(a, out, st);
    }
    out.push(')');
}

fn write_atomic(e: &Expr, out: &mut String, st: Style) {
    match e.node() {
        Node::Num(q) => write_rational(q, out, st),
        Node::Var(v) => out.push_str(v),
        Node::Func(f, a) => {
            out.push_str(f.name());
            write_args(std::slice::from_ref(a), out, st);
        }
        Node::Apply { name, args, derivs } => {
            out.push_str(name);
            if !derivs.is_empty() {
                out.push('_');
                for d in derivs {
                    out.push_str(&(d + 1).to_string());
                }
            }
            write_args(args, out, st);
        }
        Node::Pow(b, x) => out.push_str(&power_string(b, x, st)),
        Node::Add(_) | Node::Mul(_) => {
            out.push('(');
            write_expr(e, out, st);
            out.push(')');
        }
    }
}
