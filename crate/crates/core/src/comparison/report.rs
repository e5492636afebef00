use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

/// One verified relation. The check passes when `residual ≤ tol`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    /// The relation being checked, written out.
    pub anchor: String,
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    pub tol: f64,
    pub pass: bool,
}

impl CheckRecord {
    pub fn new(name: impl Into<String>, anchor: impl Into<String>, lhs: f64, rhs: f64, residual: f64, tol: f64) -> Self {
        CheckRecord {
            name: name.into(),
            anchor: anchor.into(),
            lhs,
            rhs,
            residual,
            tol,
            // NaN residuals fail
            pass: residual <= tol,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMeta {
    pub domain: String,
    pub beta: f64,
    pub h: f64,
    pub area: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub meta: ReportMeta,
    pub checks: Vec<CheckRecord>,
}

impl ComparisonReport {
    pub fn new(meta: ReportMeta) -> Self {
        ComparisonReport { meta, checks: Vec::new() }
    }

    pub fn push(&mut self, check: CheckRecord) {
        self.checks.push(check);
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is always serializable")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    /// One row per check: `name,anchor,lhs,rhs,residual,tol,pass`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("name,anchor,lhs,rhs,residual,tol,pass\n");
        for c in &self.checks {
            let _ = writeln!(
                s,
                "{},\"{}\",{:.16e},{:.16e},{:.16e},{:.16e},{}",
                c.name,
                c.anchor.replace('"', "\"\""),
                c.lhs,
                c.rhs,
                c.residual,
                c.tol,
                c.pass
            );
        }
        s
    }
}
