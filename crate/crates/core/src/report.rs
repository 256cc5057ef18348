//! Validation reports: one record per checked identity, with residuals kept
//! even when the check passes, plus an echo of every tolerance and grid size
//! that was used.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

impl Status {
    pub fn from_bool(passed: bool) -> Self {
        if passed {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Error => "error",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub id: String,
    pub description: String,
    pub status: Status,
    #[serde(default)]
    pub residual: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub payload: Option<Value>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ValidationReport {
    pub suite: String,
    pub checks: Vec<CheckRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<f64>,
    #[serde(default)]
    pub config: BTreeMap<String, Value>,
}

impl ValidationReport {
    pub fn new(suite: impl Into<String>) -> Self {
        Self {
            suite: suite.into(),
            ..Self::default()
        }
    }

    /// Overall status: pass iff every record passes. An empty report passes.
    pub fn status(&self) -> Status {
        if self.checks.iter().any(|c| c.status == Status::Error) {
            Status::Error
        } else if self.checks.iter().all(|c| c.status == Status::Pass) {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn passed(&self) -> bool {
        self.status() == Status::Pass
    }

    /// Appends a check. Non-finite residuals are stored as absent.
    pub fn push(
        &mut self,
        id: impl Into<String>,
        description: impl Into<String>,
        status: Status,
        residual: Option<f64>,
        payload: Option<Value>,
    ) -> &mut Self {
        self.checks.push(CheckRecord {
            id: id.into(),
            description: description.into(),
            status,
            residual: residual.filter(|r| r.is_finite()),
            payload,
        });
        self
    }

    /// Records a residual against a tolerance: passes iff `residual <= tol`.
    pub fn check_residual(
        &mut self,
        id: impl Into<String>,
        description: impl Into<String>,
        residual: f64,
        tol: f64,
    ) -> &mut Self {
        let ok = residual <= tol;
        self.push(id, description, Status::from_bool(ok), Some(residual), None)
    }

    pub fn check_bool(&mut self, id: impl Into<String>, description: impl Into<String>, passed: bool) -> &mut Self {
        self.push(id, description, Status::from_bool(passed), None, None)
    }

    /// Records an operation that failed to produce a value.
    pub fn error(&mut self, id: impl Into<String>, description: impl Into<String>, err: &Error) -> &mut Self {
        self.push(
            id,
            description,
            Status::Error,
            None,
            Some(Value::String(err.to_string())),
        )
    }

    /// Attaches a payload to the most recently pushed check.
    pub fn with_payload(&mut self, payload: Value) -> &mut Self {
        if let Some(last) = self.checks.last_mut() {
            last.payload = Some(payload);
        }
        self
    }

    pub fn set_config(&mut self, key: impl Into<String>, value: impl Into<Value>) -> &mut Self {
        self.config.insert(key.into(), value.into());
        self
    }

    pub fn max_residual(&self) -> Option<f64> {
        self.checks.iter().filter_map(|c| c.residual).reduce(f64::max)
    }

    pub fn get(&self, id: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.id == id)
    }

    /// Serializes with the derived overall status included as a top-level
    /// `status` field.
    pub fn to_json_value(&self) -> Value {
        let mut v = serde_json::to_value(self).expect("report is serializable");
        if let Value::Object(map) = &mut v {
            map.insert("status".into(), Value::String(self.status().label().into()));
        }
        v
    }

    pub fn to_json_pretty(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json_value()).expect("serializable");
        s.push('\n');
        s
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "suite {}: {} ({} checks)",
            if self.suite.is_empty() { "<empty>" } else { &self.suite },
            self.status().label().to_uppercase(),
            self.checks.len()
        );
        for c in &self.checks {
            let residual = c.residual.map(|r| format!("{r:.3e}")).unwrap_or_else(|| "-".into());
            let _ = writeln!(
                out,
                "  [{:5}] {:<48} residual={:<10} {}",
                c.status.label(),
                c.id,
                residual,
                c.description
            );
        }
        if !self.config.is_empty() {
            let _ = writeln!(out, "config:");
            for (k, v) in &self.config {
                let _ = writeln!(out, "  {k} = {v}");
            }
        }
        out
    }

    /// Appends the checks of `other` to this report under this report's
    /// suite name, with the same uniqueness and configuration rules as
    /// [`merge`].
    pub fn absorb(&mut self, other: ValidationReport) -> Result<&mut Self> {
        for c in &other.checks {
            if self.get(&c.id).is_some() {
                return Err(Error::DuplicateId(c.id.clone()));
            }
        }
        for (k, v) in &other.config {
            if matches!(self.config.get(k), Some(existing) if existing != v) {
                return Err(Error::ConfigConflict(k.clone()));
            }
        }
        self.checks.extend(other.checks);
        self.config.extend(other.config);
        if let Some(t) = other.timing_ms {
            self.timing_ms = Some(self.timing_ms.unwrap_or(0.0) + t);
        }
        Ok(self)
    }

    fn suite_names(&self) -> impl Iterator<Item = &str> {
        self.suite.split('+').filter(|s| !s.is_empty())
    }
}

/// Order-preserving concatenation of reports.
///
/// Suite names are joined with `+`; check ids and suite names must be unique
/// across the inputs. Configuration maps are unioned; a key present in two
/// inputs must carry the same value. Timings are summed when any input has
/// one.
pub fn merge(reports: &[ValidationReport]) -> Result<ValidationReport> {
    let mut out = ValidationReport::default();
    let mut suites = BTreeSet::new();
    let mut ids = BTreeSet::new();
    let mut names = Vec::new();
    for r in reports {
        for name in r.suite_names() {
            if !suites.insert(name.to_string()) {
                return Err(Error::DuplicateId(name.to_string()));
            }
            names.push(name.to_string());
        }
        for c in &r.checks {
            if !ids.insert(c.id.clone()) {
                return Err(Error::DuplicateId(c.id.clone()));
            }
            out.checks.push(c.clone());
        }
        for (k, v) in &r.config {
            match out.config.get(k) {
                Some(existing) if existing != v => return Err(Error::ConfigConflict(k.clone())),
                _ => {
                    out.config.insert(k.clone(), v.clone());
                }
            }
        }
        if let Some(t) = r.timing_ms {
            out.timing_ms = Some(out.timing_ms.unwrap_or(0.0) + t);
        }
    }
    out.suite = names.join("+");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(suite: &str, statuses: &[Status]) -> ValidationReport {
        let mut r = ValidationReport::new(suite);
        for (i, s) in statuses.iter().enumerate() {
            r.push(format!("{suite}.c{i}"), "sample", *s, Some(i as f64), None);
        }
        r.set_config(format!("{suite}.tol"), 1e-10);
        r
    }

    #[test]
    fn merge_of_nothing_passes() {
        let m = merge(&[]).unwrap();
        assert!(m.checks.is_empty());
        assert!(m.passed());
    }

    #[test]
    fn one_failure_fails_the_merge() {
        let m = merge(&[sample("a", &[Status::Pass]), sample("b", &[Status::Fail])]).unwrap();
        assert_eq!(m.status(), Status::Fail);
        assert_eq!(m.suite, "a+b");
    }

    #[test]
    fn merge_is_associative() {
        let a = sample("a", &[Status::Pass, Status::Pass]);
        let b = sample("b", &[Status::Fail]);
        let c = sample("c", &[Status::Pass]);
        let left = merge(&[merge(&[a.clone(), b.clone()]).unwrap(), c.clone()]).unwrap();
        let right = merge(&[a, merge(&[b, c]).unwrap()]).unwrap();
        assert_eq!(left, right);
    }

    #[test]
    fn duplicate_ids_are_rejected() {
        let a = sample("a", &[Status::Pass]);
        assert!(matches!(merge(&[a.clone(), a]), Err(Error::DuplicateId(_))));
        let mut b = ValidationReport::new("b");
        b.check_bool("a.c0", "clash", true);
        assert!(matches!(
            merge(&[sample("a", &[Status::Pass]), b]),
            Err(Error::DuplicateId(id)) if id == "a.c0"
        ));
    }

    #[test]
    fn conflicting_config_is_rejected() {
        let mut a = ValidationReport::new("a");
        a.set_config("seed", 1);
        let mut b = ValidationReport::new("b");
        b.set_config("seed", 2);
        assert!(matches!(merge(&[a, b]), Err(Error::ConfigConflict(_))));
    }

    #[test]
    fn absorb_keeps_suite_name_and_rejects_clashes() {
        let mut a = sample("a", &[Status::Pass]);
        a.absorb(sample("b", &[Status::Fail])).unwrap();
        assert_eq!(a.suite, "a");
        assert_eq!(a.checks.len(), 2);
        assert_eq!(a.status(), Status::Fail);
        assert!(matches!(
            a.absorb(sample("b", &[Status::Pass])),
            Err(Error::DuplicateId(_))
        ));
    }

    #[test]
    fn error_status_dominates() {
        let r = sample("a", &[Status::Pass, Status::Error, Status::Fail]);
        assert_eq!(r.status(), Status::Error);
        assert!(!r.passed());
    }

    #[test]
    fn json_carries_overall_status() {
        let r = sample("a", &[Status::Pass]);
        let v = r.to_json_value();
        assert_eq!(v["status"], "pass");
        assert_eq!(v["checks"][0]["id"], "a.c0");
        let back = ValidationReport::from_json(&r.to_json_pretty()).unwrap();
        assert_eq!(back, r);
    }
}
