//! Versioned experiment reports.

use std::time::Instant;

use serde::Serialize;

pub const SCHEMA: &str = "chui-lab/report";
pub const SCHEMA_VERSION: u32 = 1;

/// A named `(x, y)` sequence, e.g. a quantity against `N`.
#[derive(Clone, Debug, Serialize)]
pub struct Series {
    pub name: String,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

/// A reference value and where it comes from (`"closed form"`, `"measured"`, ...).
#[derive(Clone, Debug, Serialize)]
pub struct Reference {
    pub name: String,
    pub value: f64,
    pub provenance: String,
}

/// One asserted comparison `observed <op> threshold` with its tolerance.
#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    pub assertion: String,
    pub observed: f64,
    pub threshold: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExperimentReport {
    pub schema: &'static str,
    pub schema_version: u32,
    pub name: String,
    pub inputs: serde_json::Value,
    pub series: Vec<Series>,
    pub references: Vec<Reference>,
    pub verdicts: Vec<Verdict>,
    pub notes: Vec<String>,
    pub runtime_seconds: f64,
    #[serde(skip)]
    started: Option<Instant>,
}

impl ExperimentReport {
    pub fn new(name: impl Into<String>, inputs: serde_json::Value) -> ExperimentReport {
        ExperimentReport {
            schema: SCHEMA,
            schema_version: SCHEMA_VERSION,
            name: name.into(),
            inputs,
            series: Vec::new(),
            references: Vec::new(),
            verdicts: Vec::new(),
            notes: Vec::new(),
            runtime_seconds: 0.0,
            started: Some(Instant::now()),
        }
    }

    pub fn series(&mut self, name: impl Into<String>, x: Vec<f64>, y: Vec<f64>) {
        assert_eq!(x.len(), y.len());
        self.series.push(Series {
            name: name.into(),
            x,
            y,
        });
    }

    pub fn reference(&mut self, name: impl Into<String>, value: f64, provenance: impl Into<String>) {
        self.references.push(Reference {
            name: name.into(),
            value,
            provenance: provenance.into(),
        });
    }

    /// Records `observed ≤ threshold + tolerance`.
    pub fn at_most(&mut self, assertion: impl Into<String>, observed: f64, threshold: f64, tolerance: f64) -> bool {
        let passed = observed <= threshold + tolerance;
        self.push(assertion, observed, threshold, tolerance, passed)
    }

    /// Records `observed ≥ threshold - tolerance`.
    pub fn at_least(&mut self, assertion: impl Into<String>, observed: f64, threshold: f64, tolerance: f64) -> bool {
        let passed = observed >= threshold - tolerance;
        self.push(assertion, observed, threshold, tolerance, passed)
    }

    /// Records a boolean outcome (`observed` is 1 or 0).
    pub fn holds(&mut self, assertion: impl Into<String>, ok: bool) -> bool {
        self.push(assertion, if ok { 1.0 } else { 0.0 }, 1.0, 0.0, ok)
    }

    fn push(
        &mut self,
        assertion: impl Into<String>,
        observed: f64,
        threshold: f64,
        tolerance: f64,
        passed: bool,
    ) -> bool {
        self.verdicts.push(Verdict {
            assertion: assertion.into(),
            observed,
            threshold,
            tolerance,
            passed,
        });
        passed
    }

    /// Copies the series, references, verdicts and notes of `other`, prefixing names with `label`.
    pub fn absorb(&mut self, label: &str, other: &ExperimentReport) {
        for s in &other.series {
            self.series(format!("{label}: {}", s.name), s.x.clone(), s.y.clone());
        }
        for r in &other.references {
            self.reference(format!("{label}: {}", r.name), r.value, r.provenance.clone());
        }
        for v in &other.verdicts {
            self.push(
                format!("{label}: {}", v.assertion),
                v.observed,
                v.threshold,
                v.tolerance,
                v.passed,
            );
        }
        for n in &other.notes {
            self.note(format!("{label}: {n}"));
        }
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }

    /// Stamps the runtime; call once the report is complete.
    pub fn finish(mut self) -> ExperimentReport {
        if let Some(t) = self.started.take() {
            self.runtime_seconds = t.elapsed().as_secs_f64();
        }
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdicts_and_serialization() {
        let mut r = ExperimentReport::new("demo", serde_json::json!({"N": 3}));
        assert!(r.at_most("x ≤ 1", 1.0 + 1e-12, 1.0, 1e-9));
        assert!(!r.at_least("y ≥ 2", 1.0, 2.0, 0.0));
        r.series("s", vec![1.0], vec![2.0]);
        let r = r.finish();
        assert!(!r.passed());
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(v["schema"], SCHEMA);
        assert_eq!(v["verdicts"][1]["passed"], false);
    }
}
