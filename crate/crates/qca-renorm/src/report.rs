//! Machine-readable reports for the command-line front end.
//!
//! Every report is a plain serde struct with a fixed field order so JSON
//! output is deterministic and round-trips bit-identically; matrices are
//! encoded as `{re: [[..]], im: [[..]]}` (see `linalg::ComplexMatrix`).

use serde::{Deserialize, Serialize};

use crate::algebra::IndexResult;
use crate::flow::FlowTrajectory;
use crate::renorm::{Classification, RenormResult};
use crate::scan::ScanOutcome;

/// Version tag stamped on every JSON payload.
pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckReport {
    pub schema_version: String,
    pub phi: f64,
    pub theta: f64,
    pub axis: [f64; 3],
    pub n_cells: usize,
    pub tolerance: f64,
    pub predicate: bool,
    pub numeric: bool,
    pub agreement: bool,
    pub witnesses: Vec<String>,
    pub residuals: Vec<(String, f64)>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RenormReport {
    pub schema_version: String,
    pub generator: String,
    pub tile: String,
    pub n_tiles: usize,
    pub result: RenormResult,
    /// Closed-form coarse angles of the matching flow column, with the
    /// fitted theta aligned into the same gauge branch.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub closed_form: Option<ClosedFormComparison>,
    pub fixed_point: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClosedFormComparison {
    pub projection: String,
    pub phi_prime: f64,
    pub theta_prime: f64,
    pub fitted_phi_prime: f64,
    /// Fitted theta', reported on the branch closest to the closed form.
    pub fitted_theta_prime_aligned: f64,
    pub distance: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScanReport {
    pub schema_version: String,
    pub outcome: ScanOutcome,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FlowReport {
    pub schema_version: String,
    pub trajectory: FlowTrajectory,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cross_validation: Option<Vec<f64>>,
}

impl FlowReport {
    /// CSV with one row per state: step,phi,theta,case,projection.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("step,phi,theta,case,projection\n");
        for (i, s) in self.trajectory.states.iter().enumerate() {
            out.push_str(&format!(
                "{},{},{},{:?},{}\n",
                i,
                s.phi.to_radians(),
                s.theta.to_radians(),
                s.case,
                s.projection.name()
            ));
        }
        out
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IndexReport {
    pub schema_version: String,
    pub generator: String,
    pub index: IndexResult,
    /// Unit index is equivalent to a two-layer circuit realization.
    pub margolus_realizable: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReproduceReport {
    pub schema_version: String,
    pub criteria: Vec<CriterionSummary>,
    pub all_passed: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CriterionSummary {
    pub id: usize,
    pub name: String,
    pub passed: bool,
    pub checks: Vec<CheckLine>,
}

/// One measured-vs-expected line of the reproduction suite.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckLine {
    pub check: String,
    pub measured: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl CheckLine {
    pub fn new(check: impl Into<String>, measured: f64, expected: f64, tolerance: f64) -> Self {
        let passed = (measured - expected).abs() <= tolerance;
        Self {
            check: check.into(),
            measured,
            expected,
            tolerance,
            passed,
        }
    }

    /// A check that only needs `measured <= tolerance`.
    pub fn residual(check: impl Into<String>, measured: f64, tolerance: f64) -> Self {
        Self {
            check: check.into(),
            measured,
            expected: 0.0,
            tolerance,
            passed: measured <= tolerance,
        }
    }

    /// A boolean check recorded as 0/1.
    pub fn flag(check: impl Into<String>, ok: bool) -> Self {
        Self {
            check: check.into(),
            measured: if ok { 1.0 } else { 0.0 },
            expected: 1.0,
            tolerance: 0.0,
            passed: ok,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduce_report_round_trips() {
        let report = ReproduceReport {
            schema_version: SCHEMA_VERSION.into(),
            criteria: vec![CriterionSummary {
                id: 1,
                name: "sample".into(),
                passed: true,
                checks: vec![
                    CheckLine::residual("residual check", 3.25e-12, 1e-9),
                    CheckLine::new("value check", 2.0, 2.0, 0.0),
                    CheckLine::flag("flag check", true),
                ],
            }],
            all_passed: true,
        };
        let s = serde_json::to_string_pretty(&report).unwrap();
        let back: ReproduceReport = serde_json::from_str(&s).unwrap();
        assert_eq!(s, serde_json::to_string_pretty(&back).unwrap());
        assert!(back.criteria[0].checks.iter().all(|c| c.passed));
    }
}

pub fn classification_name(c: &Option<Classification>) -> String {
    match c {
        None => "none".into(),
        Some(Classification::LocalUnitary) => "local-unitary".into(),
        Some(Classification::DiagonalRule) => "diagonal-rule".into(),
        Some(Classification::Shift { offset }) => format!("shift{offset:+}"),
        Some(Classification::NonDiagonalUnclassified) => "non-diagonal-unclassified".into(),
    }
}
