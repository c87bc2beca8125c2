use std::collections::BTreeMap;
use std::str::FromStr;

use serde::{Serialize, Serializer};
use serde_json::Value;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Serializes with 17 significant digits; non-finite values become `null`.
pub fn serialize_f64<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    if x.is_finite() {
        let n = serde_json::Number::from_str(&format!("{x:.16e}")).map_err(serde::ser::Error::custom)?;
        n.serialize(s)
    } else {
        s.serialize_none()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub params: BTreeMap<String, Value>,
    #[serde(serialize_with = "serialize_f64")]
    pub residual: f64,
    #[serde(serialize_with = "serialize_f64")]
    pub tolerance: f64,
    pub pass: bool,
    pub millis: u64,
}

impl CheckRecord {
    pub fn new(name: impl Into<String>, params: BTreeMap<String, Value>, residual: f64, tolerance: f64, millis: u64) -> Self {
        // NaN never passes
        let pass = residual <= tolerance;
        CheckRecord { name: name.into(), params, residual, tolerance, pass, millis }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub passed: usize,
    pub failed: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub version: String,
    pub seed: u64,
    pub checks: Vec<CheckRecord>,
    pub summary: Summary,
}

impl Report {
    pub fn new(seed: u64, checks: Vec<CheckRecord>) -> Self {
        let passed = checks.iter().filter(|c| c.pass).count();
        let summary = Summary { passed, failed: checks.len() - passed };
        Report { version: VERSION.to_string(), seed, checks, summary }
    }

    pub fn all_passed(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// The report with every wall-time field zeroed, for reproducibility checks.
pub fn without_timing(json: &str) -> Result<Value, serde_json::Error> {
    let mut v: Value = serde_json::from_str(json)?;
    if let Some(checks) = v.get_mut("checks").and_then(Value::as_array_mut) {
        for c in checks {
            if let Some(m) = c.get_mut("millis") {
                *m = Value::from(0);
            }
        }
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits() {
        let r = CheckRecord::new("x", BTreeMap::new(), 0.1, 1e-9, 3);
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.contains("\"residual\":1.0000000000000001e-1"), "{json}");
        assert!(json.contains("\"tolerance\":1.0000000000000001e-9"), "{json}");
    }

    #[test]
    fn nan_fails_and_serializes_as_null() {
        let r = CheckRecord::new("x", BTreeMap::new(), f64::NAN, 1.0, 0);
        assert!(!r.pass);
        assert!(serde_json::to_string(&r).unwrap().contains("\"residual\":null"));
    }

    #[test]
    fn timing_is_stripped() {
        let rep = Report::new(1, vec![CheckRecord::new("a", BTreeMap::new(), 0.0, 1.0, 17)]);
        let v = without_timing(&rep.to_json()).unwrap();
        assert_eq!(v["checks"][0]["millis"], 0);
        assert_eq!(v["summary"]["passed"], 1);
    }
}
