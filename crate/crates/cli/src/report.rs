//! Per-check records and the JSON report. Reports are deterministic given
//! the configuration apart from the runtime fields.

use serde::Serialize;
use std::time::Instant;

#[derive(Clone, Debug, Serialize)]
pub struct CheckRecord {
    pub name: String,
    /// Stable identifier for the identity or proposition being checked.
    pub anchor: String,
    pub status: String,
    /// Measured deviation (0 for exact passes, 1 for a boolean miss).
    pub measured: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub runtime_ms: f64,
}

impl CheckRecord {
    pub fn passed(&self) -> bool {
        self.status == "pass"
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub checks: Vec<CheckRecord>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckRecord::passed)
    }
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub config: serde_json::Value,
    pub suites: Vec<SuiteReport>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(SuiteReport::passed)
    }
}

/// Time a deviation measurement and turn it into a record. The check
/// passes when the measured deviation is within tolerance.
pub fn check(name: &str, anchor: &str, tolerance: f64, body: impl FnOnce() -> f64) -> CheckRecord {
    let start = Instant::now();
    let measured = body();
    let runtime_ms = start.elapsed().as_secs_f64() * 1e3;
    CheckRecord {
        name: name.to_string(),
        anchor: anchor.to_string(),
        status: if measured <= tolerance { "pass" } else { "fail" }.to_string(),
        measured,
        expected: 0.0,
        tolerance,
        runtime_ms,
    }
}

/// Boolean check: `ok` must come out true; measured is 0/1.
pub fn check_bool(name: &str, anchor: &str, body: impl FnOnce() -> bool) -> CheckRecord {
    check(name, anchor, 0.0, || if body() { 0.0 } else { 1.0 })
}
