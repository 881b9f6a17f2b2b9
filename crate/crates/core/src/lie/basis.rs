use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};
use serde_json::{json, Value};

use super::{commutator, BaseSpace, LieError, VectorField};
use crate::expr::{Expr, Rational};

/// An ordered, linearly independent list of vector fields.
#[derive(Debug, Clone)]
pub struct LieBasis {
    name: String,
    base: BaseSpace,
    labels: Vec<String>,
    fields: Vec<VectorField>,
}

type MonoKey = (String, Vec<u32>);

/// Row-reduce `cols` (each a sparse column) against `rhs`; returns the
/// solution for pivot columns and whether the system was consistent.
fn solve(cols: &[BTreeMap<MonoKey, Rational>], rhs: &BTreeMap<MonoKey, Rational>) -> (Vec<Rational>, bool, usize) {
    let keys: BTreeSet<&MonoKey> = cols
        .iter()
        .flat_map(|c| c.keys())
        .chain(rhs.keys())
        .collect();
    let n = cols.len();
    let mut rows: Vec<Vec<Rational>> = keys
        .iter()
        .map(|k| {
            let mut row: Vec<Rational> = cols
                .iter()
                .map(|c| c.get(*k).cloned().unwrap_or_else(Rational::zero))
                .collect();
            row.push(rhs.get(*k).cloned().unwrap_or_else(Rational::zero));
            row
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..n {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][col].clone().recip();
        for v in rows[r].iter_mut() {
            *v *= &inv;
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][col].is_zero() {
                let factor = rows[i][col].clone();
                for j in 0..=n {
                    let delta = &factor * &rows[r][j];
                    rows[i][j] -= delta;
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    let consistent = rows[r..].iter().all(|row| row[n].is_zero());
    let mut sol = vec![Rational::zero(); n];
    for (i, &col) in pivots.iter().enumerate() {
        sol[col] = rows[i][n].clone();
    }
    (sol, consistent, pivots.len())
}

impl LieBasis {
    pub fn new(
        name: &str,
        labels: Vec<String>,
        fields: Vec<VectorField>,
    ) -> Result<LieBasis, LieError> {
        let base = fields.first().map_or(BaseSpace::E4, VectorField::base);
        if let Some(f) = fields.iter().find(|f| f.base() != base) {
            return Err(LieError::BaseMismatch(base, f.base()));
        }
        let cols = fields
            .iter()
            .map(VectorField::monomial_coeffs)
            .collect::<Result<Vec<_>, _>>()?;
        let (_, _, rank) = solve(&cols, &BTreeMap::new());
        if rank < fields.len() {
            return Err(LieError::Dependent(name.to_string()));
        }
        Ok(LieBasis {
            name: name.to_string(),
            base,
            labels,
            fields,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn base(&self) -> BaseSpace {
        self.base
    }

    pub fn len(&self) -> usize {
        self.fields.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fields.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn fields(&self) -> &[VectorField] {
        &self.fields
    }

    pub fn field(&self, i: usize) -> &VectorField {
        &self.fields[i]
    }

    /// `Σ c_i B_i` with expression coefficients.
    pub fn combine(&self, coeffs: &[Expr]) -> VectorField {
        let mut acc = VectorField::zero(self.base);
        for (c, f) in coeffs.iter().zip(&self.fields) {
            acc = acc.add(&f.scale(c)).expect("same base");
        }
        acc
    }

    pub fn combine_rational(&self, coeffs: &[Rational]) -> VectorField {
        let exprs: Vec<Expr> = coeffs.iter().cloned().map(Expr::num).collect();
        self.combine(&exprs)
    }
}

/// Exact coordinates of `v` in the basis.
pub fn decompose(v: &VectorField, basis: &LieBasis) -> Result<Vec<Rational>, LieError> {
    if v.base() != basis.base {
        return Err(LieError::BaseMismatch(v.base(), basis.base));
    }
    let cols = basis
        .fields
        .iter()
        .map(VectorField::monomial_coeffs)
        .collect::<Result<Vec<_>, _>>()?;
    let rhs = v.monomial_coeffs()?;
    let (sol, consistent, _) = solve(&cols, &rhs);
    if !consistent {
        let residual = v.sub(&basis.combine_rational(&sol))?;
        return Err(LieError::NotInSpan {
            basis: basis.name.clone(),
            residual: residual.to_string(),
        });
    }
    Ok(sol)
}

/// Structure constants `[B_i, B_j] = Σ_k c[i][j][k] B_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureTable {
    pub labels: Vec<String>,
    pub c: Vec<Vec<Vec<Rational>>>,
}

pub fn structure_table(basis: &LieBasis) -> Result<StructureTable, LieError> {
    let n = basis.len();
    let mut c = vec![vec![vec![Rational::zero(); n]; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let b = commutator(&basis.fields[i], &basis.fields[j])?;
            let coords = decompose(&b, basis).map_err(|e| match e {
                LieError::NotInSpan { basis, .. } => LieError::NotClosed { basis, i, j },
                other => other,
            })?;
            c[j][i] = coords.iter().map(|q| -q.clone()).collect();
            c[i][j] = coords;
        }
    }
    Ok(StructureTable {
        labels: basis.labels.clone(),
        c,
    })
}

impl StructureTable {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn bracket(&self, i: usize, j: usize) -> &[Rational] {
        &self.c[i][j]
    }

    /// Matrix of `ad(B_i)`: column `j` holds the coordinates of `[B_i, B_j]`.
    pub fn ad_matrix(&self, i: usize) -> Vec<Vec<Rational>> {
        let n = self.len();
        (0..n)
            .map(|k| (0..n).map(|j| self.c[i][j][k].clone()).collect())
            .collect()
    }

    pub fn is_antisymmetric(&self) -> bool {
        let n = self.len();
        (0..n).all(|i| {
            (0..n).all(|j| {
                self.c[i][j]
                    .iter()
                    .zip(&self.c[j][i])
                    .all(|(a, b)| (a + b).is_zero())
            })
        })
    }

    /// First triple violating the Jacobi identity, if any.
    pub fn jacobi_violation(&self) -> Option<(usize, usize, usize)> {
        let n = self.len();
        let nested = |i: usize, j: usize, k: usize| -> Vec<Rational> {
            let mut out = vec![Rational::zero(); n];
            for m in 0..n {
                let cjk = &self.c[j][k][m];
                if cjk.is_zero() {
                    continue;
                }
                for (l, o) in out.iter_mut().enumerate() {
                    *o += cjk * &self.c[i][m][l];
                }
            }
            out
        };
        for i in 0..n {
            for j in (i + 1)..n {
                for k in (j + 1)..n {
                    let a = nested(i, j, k);
                    let b = nested(j, k, i);
                    let c = nested(k, i, j);
                    if (0..n).any(|l| !(&a[l] + &b[l] + &c[l]).is_zero()) {
                        return Some((i, j, k));
                    }
                }
            }
        }
        None
    }

    /// Entry as a linear combination of the basis labels.
    pub fn entry_expr(&self, i: usize, j: usize) -> Expr {
        Expr::add(
            self.c[i][j]
                .iter()
                .zip(&self.labels)
                .filter(|(q, _)| !q.is_zero())
                .map(|(q, l)| Expr::num(q.clone()) * Expr::var(l))
                .collect(),
        )
    }

    pub fn to_markdown(&self) -> String {
        let mut s = String::from("| [·,·] |");
        for l in &self.labels {
            s.push_str(&format!(" {l} |"));
        }
        s.push_str("\n|---|");
        s.push_str(&"---|".repeat(self.len()));
        s.push('\n');
        for i in 0..self.len() {
            s.push_str(&format!("| {} |", self.labels[i]));
            for j in 0..self.len() {
                s.push_str(&format!(" {} |", self.entry_expr(i, j)));
            }
            s.push('\n');
        }
        s
    }

    pub fn to_json(&self) -> Value {
        let entries: Vec<Vec<Value>> = (0..self.len())
            .map(|i| {
                (0..self.len())
                    .map(|j| {
                        let m: BTreeMap<&str, String> = self.c[i][j]
                            .iter()
                            .zip(&self.labels)
                            .filter(|(q, _)| !q.is_zero())
                            .map(|(q, l)| (l.as_str(), q.to_string()))
                            .collect();
                        json!(m)
                    })
                    .collect()
            })
            .collect();
        json!({ "labels": self.labels, "brackets": entries })
    }

    /// Coordinates of `Σ_k a_k B_k` under `ad(B_i)`, as floats.
    pub fn ad_apply(&self, i: usize, a: &[f64]) -> Vec<f64> {
        let n = self.len();
        let mut out = vec![0.0; n];
        for (j, aj) in a.iter().enumerate() {
            if *aj == 0.0 {
                continue;
            }
            for (k, o) in out.iter_mut().enumerate() {
                let q = &self.c[i][j][k];
                if !q.is_zero() {
                    *o += aj * num_traits::ToPrimitive::to_f64(q).unwrap_or(f64::NAN);
                }
            }
        }
        out
    }
}

pub(crate) fn identity(n: usize) -> Vec<Vec<Rational>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { Rational::one() } else { Rational::zero() })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::algebras::{g8, principal};

    #[test]
    fn decompose_examples() {
        let g = g8();
        let z7 = VectorField::parse(BaseSpace::P4, &[("f", "2*f")]).unwrap();
        let c = decompose(&z7, &g).unwrap();
        let mut want = vec![Rational::zero(); 8];
        want[6] = Rational::one();
        assert_eq!(c, want);

        let v = g.field(3).add(&g.field(7).scale(&Expr::int(3))).unwrap();
        let c = decompose(&v, &g).unwrap();
        assert_eq!(c[3], Rational::one());
        assert_eq!(c[7], Rational::from_integer(3.into()));
        assert_eq!(g.combine_rational(&c), v);
    }

    #[test]
    fn out_of_span_reports_residual() {
        let g = g8();
        let v = VectorField::parse(BaseSpace::P4, &[("x", "x^2")]).unwrap();
        match decompose(&v, &g) {
            Err(LieError::NotInSpan { residual, .. }) => assert!(residual.contains("x^2")),
            other => panic!("unexpected {other:?}"),
        }
        let udu = VectorField::parse(BaseSpace::E4, &[("u", "u")]).unwrap();
        assert!(decompose(&udu, &g).is_err());
    }

    #[test]
    fn principal_algebra_is_abelian() {
        let t = structure_table(&principal()).unwrap();
        assert!(t.c.iter().flatten().flatten().all(|q| q.is_zero()));
    }

    #[test]
    fn dependent_fields_are_rejected() {
        let a = VectorField::parse(BaseSpace::E4, &[("x", "1")]).unwrap();
        let b = a.scale(&Expr::int(2));
        assert!(matches!(
            LieBasis::new("bad", vec!["a".into(), "b".into()], vec![a, b]),
            Err(LieError::Dependent(_))
        ));
    }
}
