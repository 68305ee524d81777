//! Shared report model for every verification suite.

use serde::{Deserialize, Serialize};

use crate::symkernel::{ZeroStatus, ZeroTestPolicy};

/// How a check was certified.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tier {
    /// Exact normal-form reduction.
    Symbolic,
    /// Seeded random-point evaluation or floating-point computation.
    Numeric,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

/// One line of a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub entry: String,
    pub integral: Option<String>,
    pub check: String,
    pub tier: Tier,
    pub status: Status,
    pub max_residual: Option<f64>,
    pub points: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub detail: Option<String>,
}

impl CheckRecord {
    pub fn new(entry: impl Into<String>, check: impl Into<String>, tier: Tier, status: Status) -> Self {
        CheckRecord {
            entry: entry.into(),
            integral: None,
            check: check.into(),
            tier,
            status,
            max_residual: None,
            points: None,
            detail: None,
        }
    }

    pub fn with_integral(mut self, name: impl Into<String>) -> Self {
        self.integral = Some(name.into());
        self
    }

    pub fn with_detail(mut self, d: impl Into<String>) -> Self {
        self.detail = Some(d.into());
        self
    }

    pub fn with_residual(mut self, r: f64) -> Self {
        self.max_residual = Some(r);
        self
    }

    /// A pass/fail numeric comparison.
    pub fn numeric(entry: impl Into<String>, check: impl Into<String>, residual: f64, tol: f64) -> Self {
        let status = if residual.is_finite() && residual <= tol { Status::Pass } else { Status::Fail };
        CheckRecord::new(entry, check, Tier::Numeric, status).with_residual(residual)
    }

    /// Combines the zero statuses of several coefficient slots into one record.
    pub fn from_zero_statuses<'a>(
        entry: impl Into<String>,
        check: impl Into<String>,
        statuses: impl IntoIterator<Item = &'a ZeroStatus>,
    ) -> Self {
        let mut tier = Tier::Symbolic;
        let mut status = Status::Pass;
        let mut worst: f64 = 0.0;
        let mut points: Option<usize> = None;
        let mut detail = None;
        for s in statuses {
            match s {
                ZeroStatus::ProvedZero => {}
                ZeroStatus::NumericZero {
                    points_tested,
                    max_residual,
                } => {
                    tier = Tier::Numeric;
                    worst = worst.max(*max_residual);
                    points = Some(points.map_or(*points_tested, |p| p.min(*points_tested)));
                }
                ZeroStatus::NonZero { point, value, .. } => {
                    tier = Tier::Numeric;
                    status = Status::Fail;
                    worst = worst.max(value.abs());
                    if detail.is_none() {
                        detail = Some(format!("nonzero value {value:.6e} at {point:?}"));
                    }
                }
                ZeroStatus::Inconclusive { reason } => {
                    tier = Tier::Numeric;
                    if status == Status::Pass {
                        status = Status::Inconclusive;
                    }
                    if detail.is_none() {
                        detail = Some(reason.clone());
                    }
                }
            }
        }
        CheckRecord {
            entry: entry.into(),
            integral: None,
            check: check.into(),
            tier,
            status,
            max_residual: Some(worst),
            points,
            detail,
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

/// A documented discrepancy or remark; never counts as a failure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Annotation {
    pub entry: String,
    pub topic: String,
    pub text: String,
}

impl Annotation {
    pub fn new(entry: impl Into<String>, topic: impl Into<String>, text: impl Into<String>) -> Self {
        Annotation {
            entry: entry.into(),
            topic: topic.into(),
            text: text.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct VerificationReport {
    pub title: String,
    pub checks: Vec<CheckRecord>,
    pub annotations: Vec<Annotation>,
}

impl VerificationReport {
    pub fn new(title: impl Into<String>) -> Self {
        VerificationReport {
            title: title.into(),
            ..Default::default()
        }
    }

    pub fn push(&mut self, c: CheckRecord) {
        self.checks.push(c);
    }

    pub fn annotate(&mut self, a: Annotation) {
        self.annotations.push(a);
    }

    pub fn extend(&mut self, other: VerificationReport) {
        self.checks.extend(other.checks);
        self.annotations.extend(other.annotations);
    }

    /// True when no check failed or was inconclusive.
    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckRecord::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.checks.iter().filter(|c| !c.passed())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Summary {
    pub proved: usize,
    pub numeric: usize,
    pub failed: usize,
    pub annotated: usize,
}

/// Top-level document written by the command-line tool.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub tool_version: String,
    pub seed: u64,
    pub policy: ZeroTestPolicy,
    pub sections: Vec<VerificationReport>,
    pub summary: Summary,
}

impl ReportDocument {
    pub fn new(policy: &ZeroTestPolicy, sections: Vec<VerificationReport>) -> Self {
        let mut summary = Summary::default();
        for s in &sections {
            for c in &s.checks {
                match (c.status, c.tier) {
                    (Status::Pass, Tier::Symbolic) => summary.proved += 1,
                    (Status::Pass, Tier::Numeric) => summary.numeric += 1,
                    _ => summary.failed += 1,
                }
            }
            summary.annotated += s.annotations.len();
        }
        ReportDocument {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            seed: policy.seed,
            policy: policy.clone(),
            sections,
            summary,
        }
    }

    pub fn passed(&self) -> bool {
        self.summary.failed == 0
    }
}
