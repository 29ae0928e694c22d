//! Result record for one checked inequality or rate regression.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

/// What a report's pass flag means.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportKind {
    /// pass iff lhs <= rhs + slack_sigmas * stderr
    Inequality,
    /// pass iff fitted slope <= target + tolerance (or |slope - target| <= tolerance for two-sided claims)
    Rate,
    /// informational; never asserted
    Exploratory,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub bound_id: String,
    /// Distinguishes rows of one entry (e.g. "r=2", "side=upper").
    pub variant: String,
    pub kind: ReportKind,
    pub asserted: bool,
    pub n: usize,
    pub lhs_estimate: f64,
    pub lhs_stderr: f64,
    /// `None` for rate entries.
    pub rhs_value: Option<f64>,
    pub slack_sigmas: f64,
    pub pass: bool,
    pub metadata: BTreeMap<String, Value>,
}

impl BoundReport {
    pub fn inequality(id: &str, variant: impl Into<String>, n: usize, lhs: f64, stderr: f64, rhs: f64, slack: f64) -> Self {
        let pass = lhs <= rhs + slack * stderr;
        Self {
            bound_id: id.to_string(),
            variant: variant.into(),
            kind: ReportKind::Inequality,
            asserted: true,
            n,
            lhs_estimate: lhs,
            lhs_stderr: stderr,
            rhs_value: Some(rhs),
            slack_sigmas: slack,
            pass,
            metadata: BTreeMap::new(),
        }
    }

    pub fn with_meta(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.metadata.insert(key.to_string(), value.into());
        self
    }

    pub fn insert_meta(&mut self, key: &str, value: impl Into<Value>) {
        self.metadata.insert(key.to_string(), value.into());
    }

    /// Marks the report informational.
    pub fn not_asserted(mut self) -> Self {
        self.asserted = false;
        if self.kind == ReportKind::Inequality {
            self.kind = ReportKind::Exploratory;
        }
        self
    }

    /// True unless the report is asserted and failed.
    pub fn acceptable(&self) -> bool {
        !self.asserted || self.pass
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_rule_uses_slack() {
        assert!(BoundReport::inequality("X", "", 1, 1.02, 0.01, 1.0, 3.0).pass);
        assert!(!BoundReport::inequality("X", "", 1, 1.05, 0.01, 1.0, 3.0).pass);
        assert!(!BoundReport::inequality("X", "", 1, 1.0 + 1e-15, 0.0, 1.0, 3.0).pass);
    }

    #[test]
    fn json_field_names() {
        let r = BoundReport::inequality("COR_6_2", "a=-1,b=1", 100, 0.1, 0.01, 0.5, 3.0).with_meta("sigma", 1.0);
        let v = serde_json::to_value(&r).unwrap();
        for key in ["bound_id", "variant", "kind", "asserted", "n", "lhs_estimate", "lhs_stderr", "rhs_value", "slack_sigmas", "pass", "metadata"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert_eq!(v["kind"], "inequality");
    }
}
