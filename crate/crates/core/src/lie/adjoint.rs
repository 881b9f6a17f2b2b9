//! `Ad(exp(eps B_i)) = exp(-eps ad(B_i))` in closed form.
//!
//! Each matrix entry is a power series whose coefficients come from powers of
//! `M = -ad(B_i)`. The series is classified as terminating, pure exponential
//! or oscillatory by inspecting the exact coefficient sequence.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use super::basis::identity;
use super::StructureTable;
use crate::expr::{Expr, Func, Rational};

/// Number of exact series terms inspected during classification.
const TERMS: usize = 24;

/// Closed form of one entry as a function of `eps`.
#[derive(Debug, Clone, PartialEq)]
pub enum EntryForm {
    /// `Σ c_n eps^n`.
    Polynomial(Vec<Rational>),
    /// `s0 + (s1 / c) (e^{c eps} - 1)`.
    Exponential { s0: Rational, s1: Rational, c: Rational },
    /// `s0 + s1 sin(w eps)/w + s2 (1 - cos(w eps))/w^2` with `w^2 = omega_sq`.
    Oscillatory {
        s0: Rational,
        s1: Rational,
        s2: Rational,
        omega_sq: Rational,
    },
    /// Unclassified; Taylor coefficients of `eps^n`, usable only for small `eps`.
    Series(Vec<Rational>),
}

fn f(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// Exact square root of a positive rational, when it exists.
fn rational_sqrt(q: &Rational) -> Option<Rational> {
    let (n, d) = (q.numer(), q.denom());
    let (rn, rd) = (n.sqrt(), d.sqrt());
    (&rn * &rn == *n && &rd * &rd == *d).then(|| Rational::new(rn, rd))
}

fn classify(s: &[Rational]) -> EntryForm {
    let last_nonzero = s.iter().rposition(|q| !q.is_zero());
    match last_nonzero {
        None => return EntryForm::Polynomial(vec![Rational::zero()]),
        Some(d) if d + 9 <= s.len() => {
            let coeffs = (0..=d)
                .map(|n| &s[n] / Rational::from_integer(factorial(n)))
                .collect();
            return EntryForm::Polynomial(coeffs);
        }
        _ => {}
    }
    if !s[1].is_zero() {
        let c = &s[2] / &s[1];
        let mut pow = Rational::one();
        let geometric = (1..s.len()).all(|n| {
            let ok = s[n] == &s[1] * &pow;
            pow *= &c;
            ok
        });
        if geometric {
            return EntryForm::Exponential {
                s0: s[0].clone(),
                s1: s[1].clone(),
                c,
            };
        }
    }
    let omega_sq = if !s[1].is_zero() {
        -(&s[3] / &s[1])
    } else if !s[2].is_zero() {
        -(&s[4] / &s[2])
    } else {
        Rational::zero()
    };
    if omega_sq.is_positive() && (1..s.len() - 2).all(|n| s[n + 2] == -(&omega_sq * &s[n])) {
        return EntryForm::Oscillatory {
            s0: s[0].clone(),
            s1: s[1].clone(),
            s2: s[2].clone(),
            omega_sq,
        };
    }
    EntryForm::Series(
        s.iter()
            .enumerate()
            .map(|(n, q)| q / Rational::from_integer(factorial(n)))
            .collect(),
    )
}

impl EntryForm {
    pub fn eval(&self, eps: f64) -> f64 {
        match self {
            EntryForm::Polynomial(c) | EntryForm::Series(c) => {
                c.iter().rev().fold(0.0, |acc, q| acc * eps + f(q))
            }
            EntryForm::Exponential { s0, s1, c } => {
                let c = f(c);
                f(s0) + f(s1) / c * (c * eps).exp_m1()
            }
            EntryForm::Oscillatory {
                s0,
                s1,
                s2,
                omega_sq,
            } => {
                let w2 = f(omega_sq);
                let w = w2.sqrt();
                f(s0) + f(s1) * (w * eps).sin() / w + f(s2) * (1.0 - (w * eps).cos()) / w2
            }
        }
    }

    /// The closed form as an expression in the variable `eps`.
    pub fn to_expr(&self) -> Expr {
        let eps = Expr::var("eps");
        let num = |q: &Rational| Expr::num(q.clone());
        match self {
            EntryForm::Polynomial(c) | EntryForm::Series(c) => Expr::add(
                c.iter()
                    .enumerate()
                    .map(|(n, q)| num(q) * eps.clone().powi(n as i64))
                    .collect(),
            ),
            EntryForm::Exponential { s0, s1, c } => {
                num(s0) + num(&(s1 / c)) * (Expr::exp(num(c) * eps) - Expr::one())
            }
            EntryForm::Oscillatory {
                s0,
                s1,
                s2,
                omega_sq,
            } => {
                let w = rational_sqrt(omega_sq)
                    .map(Expr::num)
                    .unwrap_or_else(|| Expr::func(Func::Sqrt, num(omega_sq)));
                let arg = &w * &eps;
                num(s0)
                    + num(s1) * Expr::func(Func::Sin, arg.clone()) / &w
                    + num(s2) * (Expr::one() - Expr::func(Func::Cos, arg)) / num(omega_sq)
            }
        }
    }

    pub fn class_name(&self) -> &'static str {
        match self {
            EntryForm::Polynomial(_) => "polynomial",
            EntryForm::Exponential { .. } => "exponential",
            EntryForm::Oscillatory { .. } => "oscillatory",
            EntryForm::Series(_) => "unclassified",
        }
    }
}

/// Matrix of `Ad(exp(eps B_i))`: `entries[k][j]` is the coefficient of
/// `B_k` in the image of `B_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct AdjointMatrix {
    pub generator: usize,
    pub labels: Vec<String>,
    pub entries: Vec<Vec<EntryForm>>,
}

/// Closed-form adjoint action of basis element `i`.
pub fn adjoint(i: usize, table: &StructureTable) -> AdjointMatrix {
    let n = table.len();
    let m: Vec<Vec<Rational>> = table
        .ad_matrix(i)
        .into_iter()
        .map(|row| row.into_iter().map(|q| -q).collect())
        .collect();
    let mut powers = vec![identity(n)];
    for _ in 1..TERMS {
        let prev = powers.last().unwrap();
        let next: Vec<Vec<Rational>> = (0..n)
            .map(|r| {
                (0..n)
                    .map(|c| {
                        (0..n)
                            .filter(|&k| !m[r][k].is_zero() && !prev[k][c].is_zero())
                            .map(|k| &m[r][k] * &prev[k][c])
                            .fold(Rational::zero(), |a, b| a + b)
                    })
                    .collect()
            })
            .collect();
        powers.push(next);
    }
    let entries = (0..n)
        .map(|k| {
            (0..n)
                .map(|j| {
                    let seq: Vec<Rational> = powers.iter().map(|p| p[k][j].clone()).collect();
                    classify(&seq)
                })
                .collect()
        })
        .collect();
    AdjointMatrix {
        generator: i,
        labels: table.labels.clone(),
        entries,
    }
}

impl AdjointMatrix {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn eval(&self, eps: f64) -> Vec<Vec<f64>> {
        self.entries
            .iter()
            .map(|row| row.iter().map(|e| e.eval(eps)).collect())
            .collect()
    }

    /// Coordinates of `Ad(exp(eps B_i)) (Σ a_j B_j)`.
    pub fn apply(&self, eps: f64, a: &[f64]) -> Vec<f64> {
        self.entries
            .iter()
            .map(|row| row.iter().zip(a).map(|(e, aj)| e.eval(eps) * aj).sum())
            .collect()
    }

    /// `Ad(exp(eps B_i)) B_j` as a combination of the labels.
    pub fn image_expr(&self, j: usize) -> Expr {
        Expr::add(
            (0..self.len())
                .map(|k| self.entries[k][j].to_expr() * Expr::var(&self.labels[k]))
                .collect(),
        )
    }

    /// Entries that fell back to a truncated series.
    pub fn unclassified(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (k, row) in self.entries.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                if matches!(e, EntryForm::Series(_)) {
                    out.push((k, j));
                }
            }
        }
        out
    }

    /// Markdown table: one row per generator, one column per basis element.
    pub fn table_markdown(mats: &[AdjointMatrix]) -> String {
        let Some(first) = mats.first() else {
            return String::new();
        };
        let mut s = String::from("| Ad |");
        for l in &first.labels {
            s.push_str(&format!(" {l} |"));
        }
        s.push_str("\n|---|");
        s.push_str(&"---|".repeat(first.len()));
        s.push('\n');
        for m in mats {
            s.push_str(&format!("| {} |", m.labels[m.generator]));
            for j in 0..m.len() {
                let text = crate::expr::print_canonical(&m.image_expr(j));
                s.push_str(&format!(" {text} |"));
            }
            s.push('\n');
        }
        s
    }

    pub fn to_json(&self) -> Value {
        let columns: Vec<Value> = (0..self.len())
            .map(|j| {
                let terms: serde_json::Map<String, Value> = (0..self.len())
                    .filter(|&k| self.entries[k][j] != EntryForm::Polynomial(vec![Rational::zero()]))
                    .map(|k| {
                        (
                            self.labels[k].clone(),
                            json!({
                                "closed_form": crate::expr::print_canonical(&self.entries[k][j].to_expr()),
                                "class": self.entries[k][j].class_name(),
                            }),
                        )
                    })
                    .collect();
                json!({ "image_of": self.labels[j], "terms": terms })
            })
            .collect();
        json!({ "generator": self.labels[self.generator], "columns": columns })
    }
}
