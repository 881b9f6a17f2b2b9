//! Zero testing: exact normalization backed by seeded random sampling.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use super::eval::eval_scaled;
use super::{normalize, EvalError, Expr, FnBindings};

/// Default seed for every sampling routine in the crate.
pub const DEFAULT_SEED: u64 = 20240229;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ZeroMode {
    Symbolic,
    Numeric,
    Both,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum ZeroVerdict {
    ProvedZero,
    NumericallyZero { max_residual: f64 },
    NonZero { witness: BTreeMap<String, f64>, value: f64 },
    /// Symbolic mode could not prove zero and no sampling was requested.
    Undecided,
}

impl ZeroVerdict {
    pub fn is_zero(&self) -> bool {
        matches!(
            self,
            ZeroVerdict::ProvedZero | ZeroVerdict::NumericallyZero { .. }
        )
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ZeroTestError {
    #[error("evaluation failed at {attempts} sample points; last error: {last}")]
    TooManyFailures { attempts: usize, last: EvalError },
    #[error(transparent)]
    Eval(EvalError),
}

/// Sampling intervals: a default union of intervals plus per-variable
/// overrides. Each sample is uniform over the union.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleDomain {
    pub default: Vec<(f64, f64)>,
    pub overrides: BTreeMap<String, Vec<(f64, f64)>>,
}

impl Default for SampleDomain {
    fn default() -> Self {
        SampleDomain {
            default: vec![(-2.0, -0.1), (0.1, 2.0)],
            overrides: BTreeMap::new(),
        }
    }
}

impl SampleDomain {
    pub fn with(mut self, var: &str, intervals: Vec<(f64, f64)>) -> Self {
        self.overrides.insert(var.to_string(), intervals);
        self
    }

    pub fn sample(&self, var: &str, rng: &mut impl Rng) -> f64 {
        let ivs = self.overrides.get(var).unwrap_or(&self.default);
        sample_union(ivs, rng)
    }

    pub fn sample_point(&self, vars: &[String], rng: &mut impl Rng) -> BTreeMap<String, f64> {
        vars.iter()
            .map(|v| (v.clone(), self.sample(v, rng)))
            .collect()
    }
}

pub(crate) fn sample_union(ivs: &[(f64, f64)], rng: &mut impl Rng) -> f64 {
    let total: f64 = ivs.iter().map(|(a, b)| b - a).sum();
    let mut t = rng.gen::<f64>() * total;
    for &(a, b) in ivs {
        let w = b - a;
        if t <= w {
            return a + t;
        }
        t -= w;
    }
    ivs.last().map_or(0.0, |&(_, b)| b)
}

#[derive(Debug, Clone)]
pub struct ZeroOptions {
    pub mode: ZeroMode,
    pub points: usize,
    pub tol: f64,
    pub seed: u64,
    pub domain: SampleDomain,
    pub fns: FnBindings,
}

impl Default for ZeroOptions {
    fn default() -> Self {
        ZeroOptions {
            mode: ZeroMode::Both,
            points: 50,
            tol: 1e-9,
            seed: DEFAULT_SEED,
            domain: SampleDomain::default(),
            fns: FnBindings::new(),
        }
    }
}

impl ZeroOptions {
    pub fn mode(mut self, mode: ZeroMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn fns(mut self, fns: FnBindings) -> Self {
        self.fns = fns;
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// Decide whether `e` vanishes identically.
///
/// Numeric sampling compares `|e|` against `tol * (1 + scale)` where `scale`
/// is the largest magnitude of any subterm at the sample. Points where
/// evaluation fails are resampled, up to ten times the requested count.
pub fn is_zero(e: &Expr, opts: &ZeroOptions) -> Result<ZeroVerdict, ZeroTestError> {
    if opts.mode != ZeroMode::Numeric && normalize(e).is_zero() {
        return Ok(ZeroVerdict::ProvedZero);
    }
    if opts.mode == ZeroMode::Symbolic {
        return Ok(ZeroVerdict::Undecided);
    }
    numeric_zero(e, opts)
}

fn numeric_zero(e: &Expr, opts: &ZeroOptions) -> Result<ZeroVerdict, ZeroTestError> {
    let vars: Vec<String> = e.free_vars().into_iter().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut accepted = 0;
    let mut attempts = 0;
    let mut max_residual: f64 = 0.0;
    let mut last_err = None;
    while accepted < opts.points {
        if attempts >= 10 * opts.points.max(1) {
            return Err(ZeroTestError::TooManyFailures {
                attempts,
                last: last_err.unwrap_or(EvalError::Domain("no samples".into())),
            });
        }
        attempts += 1;
        let point = opts.domain.sample_point(&vars, &mut rng);
        let mut scale = 0.0;
        match eval_scaled(e, &point, &opts.fns, &mut scale) {
            Ok(v) => {
                let rel = v.abs() / (1.0 + scale);
                if rel > opts.tol {
                    return Ok(ZeroVerdict::NonZero {
                        witness: point,
                        value: v,
                    });
                }
                max_residual = max_residual.max(rel);
                accepted += 1;
            }
            Err(err @ (EvalError::UnboundVariable(_) | EvalError::UnboundFunction(_))) => {
                return Err(ZeroTestError::Eval(err));
            }
            Err(err) => last_err = Some(err),
        }
    }
    Ok(ZeroVerdict::NumericallyZero { max_residual })
}
