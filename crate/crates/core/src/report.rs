//! Scenario runner and machine-readable reports.
//!
//! A report is canonical JSON: keys sorted, two-space indentation, trailing
//! newline. Everything except `wall_clock_ms` is a function of the scenario.

pub mod run;
pub mod scenario;
pub mod svg;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

pub use run::run_scenario;
pub use scenario::{Scenario, Target};
pub use svg::emit_svg;

pub const SCHEMA_VERSION: u32 = 1;
pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Where a claimed value comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    /// Stated in the source example being reproduced.
    Paper,
    /// Computed here and cross-checked by an independent oracle.
    Derived,
    Trivial,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Verdict {
    pub claim: String,
    pub value: Value,
    pub provenance: Provenance,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Verdict {
    pub fn new(claim: impl Into<String>, value: impl Serialize, provenance: Provenance) -> Self {
        Verdict {
            claim: claim.into(),
            value: serde_json::to_value(value).expect("verdict values serialize"),
            provenance,
            witness: None,
            note: None,
        }
    }

    pub fn with_witness(mut self, witness: impl Serialize) -> Self {
        self.witness = Some(serde_json::to_value(witness).expect("witnesses serialize"));
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expectation {
    pub claim: String,
    pub expected: Value,
    pub actual: Option<Value>,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Report {
    pub schema_version: u32,
    pub artifact_version: String,
    pub scenario: Scenario,
    pub verdicts: Vec<Verdict>,
    /// Residual, margin and count statistics.
    pub statistics: BTreeMap<String, Value>,
    pub expectations: Vec<Expectation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_clock_ms: Option<f64>,
}

/// Relative tolerance for numeric expectations.
pub const EXPECT_RTOL: f64 = 1e-9;

fn matches(expected: &Value, actual: &Value) -> bool {
    match (expected, actual) {
        (Value::Number(e), Value::Number(a)) => {
            let (e, a) = (e.as_f64().unwrap_or(f64::NAN), a.as_f64().unwrap_or(f64::NAN));
            (e - a).abs() <= EXPECT_RTOL * e.abs().max(1.0)
        }
        (Value::Array(e), Value::Array(a)) => e.len() == a.len() && e.iter().zip(a).all(|(x, y)| matches(x, y)),
        _ => expected == actual,
    }
}

impl Report {
    pub fn new(scenario: Scenario, verdicts: Vec<Verdict>, statistics: BTreeMap<String, Value>) -> Self {
        let expectations = scenario
            .expect
            .iter()
            .map(|(claim, expected)| {
                let actual = verdicts.iter().find(|v| &v.claim == claim).map(|v| v.value.clone());
                let ok = actual.as_ref().is_some_and(|a| matches(expected, a));
                Expectation { claim: claim.clone(), expected: expected.clone(), actual, ok }
            })
            .collect();
        Report {
            schema_version: SCHEMA_VERSION,
            artifact_version: ARTIFACT_VERSION.into(),
            scenario,
            verdicts,
            statistics,
            expectations,
            wall_clock_ms: None,
        }
    }

    pub fn verdict(&self, claim: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.claim == claim)
    }

    pub fn value(&self, claim: &str) -> Option<&Value> {
        self.verdict(claim).map(|v| &v.value)
    }

    /// All expectations met (vacuously true without expectations).
    pub fn passed(&self) -> bool {
        self.expectations.iter().all(|e| e.ok)
    }

    /// Canonical JSON without the wall-clock field.
    pub fn payload(&self) -> String {
        let mut clean = self.clone();
        clean.wall_clock_ms = None;
        canonical_json(&clean)
    }

    /// Canonical JSON including the wall-clock field.
    pub fn to_json(&self) -> String {
        canonical_json(self)
    }

    /// Parse and validate a report: unknown fields and other schema versions are rejected.
    pub fn from_json(text: &str) -> Result<Report> {
        let r: Report = serde_json::from_str(text).map_err(|e| Error::Scenario(format!("invalid report: {e}")))?;
        if r.schema_version != SCHEMA_VERSION {
            return Err(Error::Scenario(format!("unsupported report schema version {}", r.schema_version)));
        }
        Ok(r)
    }
}

fn sort_keys(v: Value) -> Value {
    match v {
        Value::Object(map) => {
            let sorted: BTreeMap<String, Value> = map.into_iter().map(|(k, v)| (k, sort_keys(v))).collect();
            Value::Object(sorted.into_iter().collect())
        }
        Value::Array(xs) => Value::Array(xs.into_iter().map(sort_keys).collect()),
        other => other,
    }
}

/// Sorted keys, pretty-printed, newline-terminated.
pub fn canonical_json(value: &impl Serialize) -> String {
    let v = sort_keys(serde_json::to_value(value).expect("report values serialize"));
    let mut s = serde_json::to_string_pretty(&v).expect("values print");
    s.push('\n');
    s
}
