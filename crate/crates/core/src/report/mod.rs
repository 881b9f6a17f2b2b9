//! Verification suites and their reports.

mod suites;

use std::fmt::Write as _;
use std::time::Instant;

use serde::Serialize;

use crate::expr::DEFAULT_SEED;

pub use suites::{
    adjoint_suite, classification_suite, commutators_suite, determining_suite,
    equivalence_suite, flows_suite, invariants_suite, optimal_suite,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    /// A documented inconsistency: reported, never fatal.
    Flagged,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRecord {
    pub id: String,
    pub status: Status,
    pub residual: Option<f64>,
    pub details: String,
    pub anchor: String,
}

impl CheckRecord {
    pub fn new(id: impl Into<String>, anchor: &str, ok: bool) -> CheckRecord {
        CheckRecord {
            id: id.into(),
            status: if ok { Status::Pass } else { Status::Fail },
            residual: None,
            details: String::new(),
            anchor: anchor.to_string(),
        }
    }

    pub fn residual(mut self, r: f64) -> CheckRecord {
        self.residual = Some(r);
        self
    }

    pub fn details(mut self, d: impl Into<String>) -> CheckRecord {
        self.details = d.into();
        self
    }

    /// Downgrade a pass to flagged when there is something to report.
    pub fn flag_if(mut self, cond: bool, note: impl Into<String>) -> CheckRecord {
        if cond && self.status == Status::Pass {
            self.status = Status::Flagged;
            let note = note.into();
            self.details = if self.details.is_empty() {
                note
            } else {
                format!("{}; {note}", self.details)
            };
        }
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub status: Status,
    pub checks: Vec<CheckRecord>,
    /// Seconds; left out unless requested so reports are reproducible.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time: Option<f64>,
    pub seed: u64,
}

impl SuiteReport {
    pub fn new(suite: &str, mut checks: Vec<CheckRecord>, seed: u64) -> SuiteReport {
        checks.sort_by(|a, b| a.id.cmp(&b.id));
        let status = if checks.iter().any(|c| c.status == Status::Fail) {
            Status::Fail
        } else if checks.iter().any(|c| c.status == Status::Flagged) {
            Status::Flagged
        } else {
            Status::Pass
        };
        SuiteReport {
            suite: suite.to_string(),
            status,
            checks,
            wall_time: None,
            seed,
        }
    }

    pub fn failed(&self) -> bool {
        self.status == Status::Fail
    }

    pub fn count(&self, status: Status) -> usize {
        self.checks.iter().filter(|c| c.status == status).count()
    }

    pub fn to_markdown(&self) -> String {
        let mut s = format!(
            "## {}: {:?} ({} pass, {} flagged, {} fail)\n\n| id | status | residual | details |\n|---|---|---|---|\n",
            self.suite,
            self.status,
            self.count(Status::Pass),
            self.count(Status::Flagged),
            self.count(Status::Fail)
        );
        for c in &self.checks {
            let r = c.residual.map_or(String::from("-"), |r| format!("{r:.3e}"));
            let _ = writeln!(
                s,
                "| {} | {:?} | {} | {} |",
                c.id,
                c.status,
                r,
                c.details.replace('|', "\\|")
            );
        }
        if let Some(t) = self.wall_time {
            let _ = writeln!(s, "\nwall time: {t:.2} s");
        }
        s
    }
}

/// Tolerance and sample-count overrides shared by the suites.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteOptions {
    pub seed: u64,
    pub tol: Option<f64>,
    pub points: Option<usize>,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            seed: DEFAULT_SEED,
            tol: None,
            points: None,
        }
    }
}

pub const SUITES: [&str; 8] = [
    "commutators",
    "adjoint",
    "optimal",
    "determining",
    "equivalence",
    "classification",
    "invariants",
    "flows",
];

/// Run one named suite; `None` for an unknown name.
pub fn run_suite(name: &str, opts: &SuiteOptions) -> Option<SuiteReport> {
    let start = Instant::now();
    let checks = match name {
        "commutators" => commutators_suite(),
        "adjoint" => adjoint_suite(),
        "optimal" => optimal_suite(opts),
        "determining" => determining_suite(opts),
        "equivalence" => equivalence_suite(),
        "classification" => classification_suite(opts),
        "invariants" => invariants_suite(),
        "flows" => flows_suite(opts),
        _ => return None,
    };
    let mut r = SuiteReport::new(name, checks, opts.seed);
    r.wall_time = Some(start.elapsed().as_secs_f64());
    Some(r)
}

/// Every suite, in a fixed order.
pub fn run_all(opts: &SuiteOptions) -> Vec<SuiteReport> {
    SUITES
        .iter()
        .map(|s| run_suite(s, opts).expect("known suite"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_rules() {
        let ok = CheckRecord::new("a", "", true);
        let flagged = CheckRecord::new("b", "", true).flag_if(true, "note");
        let bad = CheckRecord::new("c", "", false).flag_if(true, "ignored");
        assert_eq!(SuiteReport::new("s", vec![ok.clone()], 0).status, Status::Pass);
        assert_eq!(SuiteReport::new("s", vec![ok.clone(), flagged.clone()], 0).status, Status::Flagged);
        assert_eq!(SuiteReport::new("s", vec![ok, flagged, bad.clone()], 0).status, Status::Fail);
        assert_eq!(bad.status, Status::Fail);
    }

    #[test]
    fn checks_are_sorted_and_json_is_stable() {
        let r = SuiteReport::new(
            "s",
            vec![CheckRecord::new("b", "", true), CheckRecord::new("a", "", true).residual(0.5)],
            7,
        );
        assert_eq!(r.checks[0].id, "a");
        let json = serde_json::to_string(&r).unwrap();
        assert!(!json.contains("wall_time"));
        assert!(json.contains("\"status\":\"pass\""));
    }

    #[test]
    fn unknown_suite() {
        assert!(run_suite("nope", &SuiteOptions::default()).is_none());
    }
}
