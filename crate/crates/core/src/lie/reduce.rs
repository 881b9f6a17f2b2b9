//! Reduction of an element `Σ a_i Z_i` of `g8` to its representative in the
//! optimal system `A1..A12`, following the case analysis step by step.

use std::fmt;
use std::sync::OnceLock;

use serde::Serialize;
use thiserror::Error;

use super::algebras::g8;
use super::{adjoint, structure_table, AdjointMatrix, StructureTable};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReduceError {
    #[error("expected 8 coefficients, got {0}")]
    Length(usize),
    #[error("coefficient vector is zero")]
    ZeroVector,
    #[error("coefficient vector has a non-finite entry")]
    NonFinite,
    #[error("a7 = a8 = 0 lies outside the case analysis of the optimal system")]
    Uncovered,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum PatternId {
    A1,
    A2,
    A3,
    A4,
    A5,
    A6,
    A7,
    A8,
    A9,
    A10,
    A11,
    A12,
}

impl PatternId {
    pub const ALL: [PatternId; 12] = [
        PatternId::A1,
        PatternId::A2,
        PatternId::A3,
        PatternId::A4,
        PatternId::A5,
        PatternId::A6,
        PatternId::A7,
        PatternId::A8,
        PatternId::A9,
        PatternId::A10,
        PatternId::A11,
        PatternId::A12,
    ];

    /// 1-based number of the pattern.
    pub fn number(self) -> usize {
        self as usize + 1
    }

    pub fn from_number(n: usize) -> Option<PatternId> {
        PatternId::ALL.get(n.checked_sub(1)?).copied()
    }

    /// Index (0-based) of the `Z` carrying the `±1`, if the pattern has one.
    pub fn signed_index(self) -> Option<usize> {
        match self {
            PatternId::A2 | PatternId::A4 | PatternId::A8 => Some(0),
            PatternId::A6 | PatternId::A12 => Some(1),
            PatternId::A10 => Some(2),
            _ => None,
        }
    }
}

impl fmt::Display for PatternId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "A{}", self.number())
    }
}

/// A representative with its surviving parameters.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Pattern {
    pub id: PatternId,
    pub sign: Option<i8>,
    /// Coefficient of `Z4`.
    pub alpha: Option<f64>,
    /// Coefficient of `Z5`.
    pub beta: Option<f64>,
    /// Coefficient of `Z6` (Case 1) or `Z7` (Case 2).
    pub gamma: Option<f64>,
}

impl Pattern {
    /// Coefficient vector of the representative.
    pub fn vector(&self) -> [f64; 8] {
        let mut v = [0.0; 8];
        if let (Some(i), Some(s)) = (self.id.signed_index(), self.sign) {
            v[i] = f64::from(s);
        }
        if let Some(a) = self.alpha {
            v[3] = a;
        }
        if let Some(b) = self.beta {
            v[4] = b;
        }
        if self.id >= PatternId::A11 {
            v[6] = self.gamma.unwrap_or(0.0);
            v[7] = 1.0;
        } else {
            if let Some(g) = self.gamma {
                v[5] = g;
            }
            v[6] = 1.0;
        }
        v
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} =", self.id)?;
        let mut first = true;
        for (i, c) in self.vector().iter().enumerate() {
            if *c == 0.0 {
                continue;
            }
            let sep = match (first, c.is_sign_negative()) {
                (true, true) => " -",
                (true, false) => "",
                (false, true) => " -",
                (false, false) => " +",
            };
            let mag = c.abs();
            if mag == 1.0 {
                write!(f, "{sep} Z{}", i + 1)?;
            } else {
                write!(f, "{sep} {mag}*Z{}", i + 1)?;
            }
            first = false;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StepKind {
    /// Multiply the whole element by `factor`.
    Rescale { factor: f64 },
    /// Apply `Ad(exp(eps Z_{generator+1}))`.
    Adjoint { generator: usize, eps: f64 },
    /// Record the discrete sign left on `Z_{index+1}` after scaling its
    /// magnitude to one; the vector is unchanged.
    SignNormalization { index: usize, sign: i8 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReductionStep {
    #[serde(flatten)]
    pub kind: StepKind,
    pub case: &'static str,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReductionTrace {
    pub input: Vec<f64>,
    pub steps: Vec<ReductionStep>,
    pub pattern: Pattern,
}

/// The reducer with precomputed adjoint matrices of `g8`.
#[derive(Debug, Clone)]
pub struct Reducer {
    table: StructureTable,
    adjoints: Vec<AdjointMatrix>,
}

impl Default for Reducer {
    fn default() -> Self {
        Reducer::new()
    }
}

fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}

struct Run<'r> {
    reducer: &'r Reducer,
    a: [f64; 8],
    steps: Vec<ReductionStep>,
    tol: f64,
}

impl Run<'_> {
    fn zero(&self, i: usize) -> bool {
        self.a[i].abs() <= self.tol * norm_inf(&self.a)
    }

    fn rescale(&mut self, factor: f64, case: &'static str) {
        if factor == 1.0 {
            return;
        }
        for x in &mut self.a {
            *x *= factor;
        }
        self.steps.push(ReductionStep {
            kind: StepKind::Rescale { factor },
            case,
        });
    }

    fn adjoint(&mut self, generator: usize, eps: f64, case: &'static str) {
        let next = self.reducer.adjoints[generator].apply(eps, &self.a);
        self.a.copy_from_slice(&next);
        self.steps.push(ReductionStep {
            kind: StepKind::Adjoint { generator, eps },
            case,
        });
    }

    /// Clear `a[target]` by `Ad(exp(eps Z_generator))` unless already zero.
    fn eliminate(&mut self, target: usize, generator: usize, eps: impl Fn(&[f64; 8]) -> f64, case: &'static str) {
        if !self.zero(target) {
            let e = eps(&self.a);
            self.adjoint(generator, e, case);
        }
        self.a[target] = 0.0;
    }

    /// Bring `a[i]` to `±1` with `Z8`; returns the sign, or `None` if `a[i]` is zero.
    fn normalize_sign(&mut self, i: usize, case: &'static str) -> Option<i8> {
        if self.zero(i) {
            self.a[i] = 0.0;
            return None;
        }
        let v = self.a[i];
        let eps = (1.0 / v.abs()).ln();
        if eps != 0.0 {
            self.adjoint(7, eps, case);
        }
        let sign = if v < 0.0 { -1 } else { 1 };
        self.a[i] = f64::from(sign);
        self.steps.push(ReductionStep {
            kind: StepKind::SignNormalization { index: i, sign },
            case,
        });
        Some(sign)
    }

    fn pattern(&self, id: PatternId, sign: Option<i8>, alpha: bool, beta: bool, gamma: Option<usize>) -> Pattern {
        Pattern {
            id,
            sign,
            alpha: alpha.then_some(self.a[3]),
            beta: beta.then_some(self.a[4]),
            gamma: gamma.map(|i| self.a[i]),
        }
    }
}

fn arccot(x: f64) -> f64 {
    1.0f64.atan2(x)
}

impl Reducer {
    pub fn new() -> Reducer {
        let table = structure_table(&g8()).expect("g8 is closed");
        let adjoints = (0..8).map(|i| adjoint(i, &table)).collect();
        Reducer { table, adjoints }
    }

    /// Shared instance.
    pub fn global() -> &'static Reducer {
        static R: OnceLock<Reducer> = OnceLock::new();
        R.get_or_init(Reducer::new)
    }

    pub fn table(&self) -> &StructureTable {
        &self.table
    }

    pub fn adjoints(&self) -> &[AdjointMatrix] {
        &self.adjoints
    }

    pub fn reduce(&self, input: &[f64], tol: f64) -> Result<ReductionTrace, ReduceError> {
        let a: [f64; 8] = input.try_into().map_err(|_| ReduceError::Length(input.len()))?;
        if a.iter().any(|x| !x.is_finite()) {
            return Err(ReduceError::NonFinite);
        }
        if a.iter().all(|x| *x == 0.0) {
            return Err(ReduceError::ZeroVector);
        }
        let mut r = Run {
            reducer: self,
            a,
            steps: Vec::new(),
            tol,
        };
        let pattern = if !r.zero(7) {
            r.case2()
        } else if !r.zero(6) {
            r.a[7] = 0.0;
            r.case1()
        } else {
            return Err(ReduceError::Uncovered);
        };
        Ok(ReductionTrace {
            input: input.to_vec(),
            steps: r.steps,
            pattern,
        })
    }

    /// Apply the recorded steps to the input vector.
    pub fn replay(&self, trace: &ReductionTrace) -> Vec<f64> {
        let mut a = trace.input.clone();
        for step in &trace.steps {
            match step.kind {
                StepKind::Rescale { factor } => a.iter_mut().for_each(|x| *x *= factor),
                StepKind::Adjoint { generator, eps } => a = self.adjoints[generator].apply(eps, &a),
                StepKind::SignNormalization { .. } => {}
            }
        }
        a
    }
}

impl Run<'_> {
    fn case1(&mut self) -> Pattern {
        self.rescale(1.0 / self.a[6], "Case 1");
        self.a[6] = 1.0;
        if !self.zero(4) {
            return self.case1_2();
        }
        self.a[4] = 0.0;
        if !self.zero(3) {
            return self.case1_1_b();
        }
        self.a[3] = 0.0;
        if !self.zero(5) {
            return self.case1_1_a2();
        }
        self.a[5] = 0.0;
        let c = "Case 1.1.a1";
        self.eliminate(2, 3, |a| arccot(a[0] / a[2]), c);
        self.eliminate(1, 4, |a| arccot(a[0] / a[1]), c);
        match self.normalize_sign(0, c) {
            None => self.pattern(PatternId::A1, None, false, false, None),
            s => self.pattern(PatternId::A2, s, false, false, None),
        }
    }

    fn case1_1_a2(&mut self) -> Pattern {
        let c = "Case 1.1.a2";
        self.eliminate(2, 1, |a| -a[2] / a[5], c);
        self.eliminate(1, 2, |a| a[1] / a[5], c);
        match self.normalize_sign(0, c) {
            None => self.pattern(PatternId::A3, None, false, false, Some(5)),
            s => self.pattern(PatternId::A4, s, false, false, Some(5)),
        }
    }

    fn case1_1_b(&mut self) -> Pattern {
        self.eliminate(2, 0, |a| -a[2] / a[3], "Case 1.1.b");
        if self.zero(5) {
            self.a[5] = 0.0;
            let c = "Case 1.1.b1";
            self.eliminate(0, 2, |a| a[0] / a[3], c);
            match self.normalize_sign(1, c) {
                None => self.pattern(PatternId::A5, None, true, false, None),
                s => self.pattern(PatternId::A6, s, true, false, None),
            }
        } else {
            let c = "Case 1.1.b2";
            self.eliminate(1, 2, |a| a[1] / a[5], c);
            match self.normalize_sign(0, c) {
                None => self.pattern(PatternId::A7, None, true, false, Some(5)),
                s => self.pattern(PatternId::A8, s, true, false, Some(5)),
            }
        }
    }

    fn case1_2(&mut self) -> Pattern {
        let c = "Case 1.2";
        self.eliminate(1, 0, |a| -a[1] / a[4], c);
        self.eliminate(0, 1, |a| a[0] / a[4], c);
        self.eliminate(5, 4, |a| arccot(a[3] / a[5]), c);
        match self.normalize_sign(2, c) {
            None => self.pattern(PatternId::A9, None, true, true, None),
            s => self.pattern(PatternId::A10, s, true, true, None),
        }
    }

    fn case2(&mut self) -> Pattern {
        let c = "Case 2";
        self.rescale(1.0 / self.a[7], c);
        self.a[7] = 1.0;
        self.eliminate(0, 0, |a| a[0], c);
        self.eliminate(2, 5, |a| arccot(a[1] / a[2]), c);
        self.eliminate(5, 3, |a| -arccot(a[4] / a[5]), c);
        match self.normalize_sign(1, c) {
            None => self.pattern(PatternId::A11, None, true, true, Some(6)),
            s => self.pattern(PatternId::A12, s, true, true, Some(6)),
        }
    }
}

impl ReductionTrace {
    /// `‖replay(input) - pattern‖∞ / max(1, ‖pattern‖∞)`.
    pub fn replay_residual(&self, reducer: &Reducer) -> f64 {
        let got = reducer.replay(self);
        let want = self.pattern.vector();
        let diff = got
            .iter()
            .zip(&want)
            .fold(0.0, |m: f64, (g, w)| m.max((g - w).abs()));
        diff / norm_inf(&want).max(1.0)
    }
}

/// Reduce with the shared reducer.
pub fn reduce_to_optimal(a: &[f64], tol: f64) -> Result<ReductionTrace, ReduceError> {
    Reducer::global().reduce(a, tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reduce(a: [f64; 8]) -> ReductionTrace {
        reduce_to_optimal(&a, 1e-12).unwrap()
    }

    #[test]
    fn z7_is_a1_without_steps() {
        let t = reduce([0., 0., 0., 0., 0., 0., 1., 0.]);
        assert_eq!(t.pattern.id, PatternId::A1);
        assert!(t.steps.is_empty());
    }

    #[test]
    fn z1_plus_z7_is_a2() {
        let t = reduce([1., 0., 0., 0., 0., 0., 1., 0.]);
        assert_eq!(t.pattern.id, PatternId::A2);
        assert_eq!(t.pattern.sign, Some(1));
        let t = reduce([-3., 0., 0., 0., 0., 0., 1., 0.]);
        assert_eq!(t.pattern.sign, Some(-1));
        assert!(t.replay_residual(Reducer::global()) < 1e-12);
    }

    #[test]
    fn case_two_keeps_parameters() {
        let t = reduce([0., 0., 0., 0.5, 0.25, 0., 0.3, 1.]);
        assert_eq!(t.pattern.id, PatternId::A11);
        assert_eq!(t.pattern.alpha, Some(0.5));
        assert_eq!(t.pattern.gamma, Some(0.3));
    }

    #[test]
    fn every_branch_replays() {
        let cases: [([f64; 8], PatternId); 12] = [
            ([0., 2., 3., 0., 0., 0., 1., 0.], PatternId::A2),
            ([0., 0., 0., 0., 0., 0., 2., 0.], PatternId::A1),
            ([0., 1., 1., 0., 0., 2., 1., 0.], PatternId::A3),
            ([1., 1., 1., 0., 0., 2., 1., 0.], PatternId::A4),
            ([1., 0., 1., 2., 0., 0., 1., 0.], PatternId::A5),
            ([1., 1., 1., 2., 0., 0., 1., 0.], PatternId::A6),
            ([2., 1., 1., 2., 0., 1., 1., 0.], PatternId::A7),
            ([1., 1., 1., 2., 0., 1., 1., 0.], PatternId::A8),
            ([1., 1., 0., 1., 2., 1., 1., 0.], PatternId::A9),
            ([1., 1., 1., 1., 2., 1., 1., 0.], PatternId::A10),
            ([1., -2., -1., 1., 2., 1., 1., 1.], PatternId::A11),
            ([1., 1., 1., 1., 2., 1., 1., 1.], PatternId::A12),
        ];
        for (a, want) in cases {
            let t = reduce(a);
            assert_eq!(t.pattern.id, want, "{a:?}");
            assert!(t.replay_residual(Reducer::global()) < 1e-12, "{a:?}");
        }
    }

    #[test]
    fn rejects_degenerate_input() {
        assert_eq!(reduce_to_optimal(&[0.0; 8], 1e-12), Err(ReduceError::ZeroVector));
        assert_eq!(
            reduce_to_optimal(&[1., 0., 0., 0., 0., 0., 0., 0.], 1e-12),
            Err(ReduceError::Uncovered)
        );
        assert_eq!(reduce_to_optimal(&[1.0; 3], 1e-12), Err(ReduceError::Length(3)));
    }
}
