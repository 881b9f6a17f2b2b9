//! Recursive-descent parser for the text form of expressions.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use super::{Expr, Func, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown function `{name}` at {pos}")]
    UnknownFunction { pos: usize, name: String },
    #[error("bad jet variable `{name}` at {pos}: derivative indices must be sorted")]
    UnsortedJet { pos: usize, name: String },
}

impl ParseError {
    pub fn pos(&self) -> usize {
        match self {
            ParseError::Syntax { pos, .. }
            | ParseError::UnknownFunction { pos, .. }
            | ParseError::UnsortedJet { pos, .. } => *pos,
        }
    }
}

/// Parse an expression.
///
/// Identifiers applied to arguments are elementary functions when reserved,
/// otherwise opaque symbols. Opaque symbol names must be a single letter,
/// start with an uppercase letter, or start with a non-ASCII letter (`ω`);
/// other lowercase names such as `log` are rejected as unknown functions.
/// `H_12(a, b)` denotes the formal derivative of `H` in slots 1 and 2.
pub fn parse(text: &str) -> Result<Expr, ParseError> {
    let mut p = Parser {
        chars: text.chars().collect(),
        pos: 0,
    };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.chars.len() {
        return Err(p.err(format!("unexpected `{}`", p.chars[p.pos])));
    }
    Ok(e)
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

fn is_opaque_name(name: &str) -> bool {
    let mut cs = name.chars();
    let first = cs.next().unwrap_or('a');
    name.chars().count() == 1 || first.is_uppercase() || !first.is_ascii()
}

/// Split `H_12` into `("H", [0, 1])`.
fn split_formal(name: &str) -> (&str, Vec<usize>) {
    if let Some((base, digits)) = name.rsplit_once('_') {
        if !base.is_empty() && !digits.is_empty() && digits.chars().all(|c| c.is_ascii_digit()) {
            let slots = digits
                .chars()
                .map(|c| c.to_digit(10).unwrap() as usize)
                .collect();
            return (base, slots);
        }
    }
    (name, Vec::new())
}

fn check_jet_name(name: &str) -> bool {
    let Some((head, idx)) = name.split_once('_') else {
        return true;
    };
    if !(head == "u" || head == "f") || idx.is_empty() {
        return true;
    }
    if !idx.chars().all(|c| matches!(c, 'u' | 'x' | 'y' | 'z')) {
        return true;
    }
    idx.chars().zip(idx.chars().skip(1)).all(|(a, b)| a <= b)
}

impl Parser {
    fn err(&self, msg: impl Into<String>) -> ParseError {
        ParseError::Syntax {
            pos: self.pos,
            msg: msg.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(format!("expected `{c}`")))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut terms = vec![self.term()?];
        loop {
            if self.eat('+') {
                terms.push(self.term()?);
            } else if self.eat('-') {
                terms.push(-self.term()?);
            } else {
                break;
            }
        }
        Ok(Expr::add(terms))
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut factors = vec![self.factor()?];
        loop {
            if self.eat('*') {
                factors.push(self.factor()?);
            } else if self.eat('/') {
                factors.push(self.factor()?.recip());
            } else {
                break;
            }
        }
        Ok(Expr::mul(factors))
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        if self.eat('-') {
            return Ok(-self.factor()?);
        }
        let base = self.base()?;
        if self.eat('^') {
            let exponent = self.factor()?;
            return Ok(Expr::pow(base, exponent));
        }
        Ok(base)
    }

    fn base(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            None => Err(self.err("unexpected end of input")),
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => self.number(),
            Some(c) if c.is_alphabetic() => self.ident(),
            Some(c) => Err(self.err(format!("unexpected `{c}`"))),
        }
    }

    fn number(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        let mut int_part = String::new();
        while let Some(&c) = self.chars.get(self.pos) {
            if c.is_ascii_digit() {
                int_part.push(c);
                self.pos += 1;
            } else {
                break;
            }
        }
        let mut frac_part = String::new();
        if self.chars.get(self.pos) == Some(&'.') {
            self.pos += 1;
            while let Some(&c) = self.chars.get(self.pos) {
                if c.is_ascii_digit() {
                    frac_part.push(c);
                    self.pos += 1;
                } else {
                    break;
                }
            }
            if frac_part.is_empty() && int_part.is_empty() {
                self.pos = start;
                return Err(self.err("malformed number"));
            }
        }
        let digits = format!("{int_part}{frac_part}");
        let n: BigInt = if digits.is_empty() {
            BigInt::zero()
        } else {
            digits.parse().map_err(|_| self.err("malformed number"))?
        };
        let d = num_traits::pow(BigInt::from(10), frac_part.len());
        let q = if d.is_one() {
            Rational::from_integer(n)
        } else {
            Rational::new(n, d)
        };
        Ok(Expr::num(q))
    }

    fn ident(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        let mut name = String::new();
        while let Some(&c) = self.chars.get(self.pos) {
            if c.is_alphanumeric() || c == '_' {
                name.push(c);
                self.pos += 1;
            } else {
                break;
            }
        }
        let save = self.pos;
        if self.eat('(') {
            let mut args = vec![self.expr()?];
            while self.eat(',') {
                args.push(self.expr()?);
            }
            self.expect(')')?;
            if let Some(f) = Func::from_name(&name) {
                if args.len() != 1 {
                    return Err(ParseError::Syntax {
                        pos: start,
                        msg: format!("`{name}` takes one argument"),
                    });
                }
                return Ok(Expr::func(f, args.pop().unwrap()));
            }
            let (base, slots) = split_formal(&name);
            if !is_opaque_name(base) {
                return Err(ParseError::UnknownFunction { pos: start, name });
            }
            let mut derivs = Vec::with_capacity(slots.len());
            for s in slots {
                if s == 0 || s > args.len() {
                    return Err(ParseError::Syntax {
                        pos: start,
                        msg: format!("slot {s} out of range for `{base}`"),
                    });
                }
                derivs.push(s - 1);
            }
            return Ok(Expr::apply_deriv(base, args, derivs));
        }
        self.pos = save;
        if Func::from_name(&name).is_some() {
            return Err(ParseError::Syntax {
                pos: start,
                msg: format!("`{name}` needs an argument"),
            });
        }
        if !check_jet_name(&name) {
            return Err(ParseError::UnsortedJet { pos: start, name });
        }
        Ok(Expr::var(&name))
    }
}
