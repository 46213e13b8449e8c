//! The JSON report shared by every suite.

use std::collections::BTreeMap;

use amalgam_core::balg::Element;
use amalgam_core::FixedPointReport;
use serde::Serialize;

use crate::config::RunConfig;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Tool {
    pub name: &'static str,
    pub version: &'static str,
}

impl Default for Tool {
    fn default() -> Self {
        Tool { name: "amalgam", version: env!("CARGO_PKG_VERSION") }
    }
}

/// The parts of a `FixedPointReport` worth keeping per trial.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FixedPointSummary {
    pub transform: &'static str,
    pub converged: bool,
    pub certified: bool,
    pub iterations: usize,
    pub final_residual: f64,
    pub max_contraction: f64,
    pub contraction_bound: f64,
    pub input_norm: f64,
    pub preimage_norm: f64,
    pub radius_onto: f64,
    pub radius_preimage: f64,
}

impl FixedPointSummary {
    pub fn new(transform: &'static str, r: &FixedPointReport) -> Self {
        FixedPointSummary {
            transform,
            converged: r.converged,
            certified: r.certified,
            iterations: r.iterations,
            final_residual: r.final_residual,
            max_contraction: r.max_contraction(),
            contraction_bound: r.certificate.contraction_bound(),
            input_norm: r.input_norm,
            preimage_norm: r.preimage_norm,
            radius_onto: r.certificate.radius_onto,
            radius_preimage: r.certificate.radius_preimage,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRecord {
    pub suite: &'static str,
    pub trial: usize,
    pub instance_digest: String,
    pub passed: bool,
    /// The quantity compared against the pass threshold.
    pub residual: f64,
    pub residuals: BTreeMap<String, f64>,
    pub fixed_point: Vec<FixedPointSummary>,
    /// Sample point in `B`, row-major, entries as `[re, im]`.
    pub point: Vec<Vec<[f64; 2]>>,
    pub control: bool,
    pub error: Option<String>,
}

impl TrialRecord {
    pub fn new(suite: &'static str, trial: usize, instance_digest: String) -> Self {
        TrialRecord {
            suite,
            trial,
            instance_digest,
            passed: false,
            residual: 0.0,
            residuals: BTreeMap::new(),
            fixed_point: Vec::new(),
            point: Vec::new(),
            control: false,
            error: None,
        }
    }

    /// Records a named residual; non-finite values are dropped because JSON
    /// cannot carry them.
    pub fn put(&mut self, name: &str, value: f64) {
        if value.is_finite() {
            self.residuals.insert(name.to_owned(), value);
        }
    }

    pub fn set_point(&mut self, p: &Element) {
        let m = p.dim();
        self.point = (0..m).map(|i| (0..m).map(|j| p.get(i, j)).map(|z| [z.re, z.im]).collect()).collect();
    }

    pub fn fail(&mut self, err: impl std::fmt::Display) {
        self.passed = false;
        self.error = Some(err.to_string());
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Aggregate {
    pub trials: usize,
    pub passed: usize,
    pub pass_rate: f64,
    pub max_residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
}

impl Aggregate {
    pub fn of<'a>(records: impl IntoIterator<Item = &'a TrialRecord>) -> Self {
        let (mut trials, mut passed, mut max_residual) = (0, 0, 0.0f64);
        for r in records {
            trials += 1;
            passed += r.passed as usize;
            if r.residual.is_finite() {
                max_residual = max_residual.max(r.residual);
            }
        }
        let pass_rate = if trials == 0 { 0.0 } else { passed as f64 / trials as f64 };
        Aggregate { trials, passed, pass_rate, max_residual, wall_time_s: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub tool: Tool,
    pub config: RunConfig,
    pub trials: Vec<TrialRecord>,
    pub aggregate: Aggregate,
}

impl Report {
    pub fn new(config: RunConfig, trials: Vec<TrialRecord>) -> Self {
        let aggregate = Aggregate::of(&trials);
        Report { tool: Tool::default(), config, trials, aggregate }
    }

    pub fn all_passed(&self) -> bool {
        self.aggregate.passed == self.aggregate.trials
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Per-suite aggregates, in the order suites appear.
    pub fn by_suite(&self) -> Vec<(&'static str, Aggregate)> {
        let mut names: Vec<&'static str> = Vec::new();
        for r in &self.trials {
            if !names.contains(&r.suite) {
                names.push(r.suite);
            }
        }
        names.into_iter().map(|n| (n, Aggregate::of(self.trials.iter().filter(|r| r.suite == n)))).collect()
    }

    /// One line per suite plus a total.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        for (name, a) in self.by_suite() {
            out.push_str(&format!(
                "{name:<17} {:>4}/{:<4} passed  max residual {:.3e}\n",
                a.passed, a.trials, a.max_residual
            ));
        }
        out.push_str(&format!(
            "{:<17} {:>4}/{:<4} passed  pass rate {:.3}",
            "total", self.aggregate.passed, self.aggregate.trials, self.aggregate.pass_rate
        ));
        if let Some(t) = self.aggregate.wall_time_s {
            out.push_str(&format!("  wall time {t:.3}s"));
        }
        out.push('\n');
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Suite;

    #[test]
    fn aggregate_counts() {
        let mut a = TrialRecord::new("rs", 0, String::new());
        a.passed = true;
        a.residual = 1e-12;
        let mut b = TrialRecord::new("rs", 1, String::new());
        b.residual = 3e-3;
        let rep = Report::new(RunConfig::new(Suite::Rs), vec![a, b]);
        assert_eq!(rep.aggregate.trials, 2);
        assert_eq!(rep.aggregate.passed, 1);
        assert_eq!(rep.aggregate.pass_rate, 0.5);
        assert_eq!(rep.aggregate.max_residual, 3e-3);
        assert!(!rep.all_passed());
    }

    #[test]
    fn json_is_snake_case_and_skips_non_finite() {
        let mut r = TrialRecord::new("additivity", 0, "ab".into());
        r.put("ratio", f64::INFINITY);
        r.put("residual_half", 1.0);
        r.set_point(&Element::from_real_diag(&[0.5, -0.25]));
        let rep = Report::new(RunConfig::new(Suite::Additivity), vec![r]);
        let v: serde_json::Value = serde_json::from_str(&rep.to_json()).unwrap();
        assert!(v["trials"][0]["residuals"].get("ratio").is_none());
        assert_eq!(v["trials"][0]["point"][1][1], serde_json::json!([-0.25, 0.0]));
        assert_eq!(v["config"]["suite"], "additivity");
        assert_eq!(v["config"]["context"]["kind"], "block_tensor");
        assert!(v["aggregate"].get("wall_time_s").is_none());
    }
}
