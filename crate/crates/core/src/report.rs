//! Check records, error accumulation and tolerances shared by all suites.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::ambient::EmbeddingConfig;
use crate::error::{Error, Result};

/// Named tolerances; every record carries the one it was judged against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Identity residuals of the operator algebra.
    pub algebra: f64,
    /// Finite-difference flow oracle for the Lie derivative.
    pub flow: f64,
    /// Frame formulas against the compositional operator (relative).
    pub frame_formula: f64,
    /// Line-by-line audit of the normal-index terms.
    pub audit: f64,
    /// Anholonomy ground-truth values.
    pub anholonomy: f64,
    /// `δ(e^a)` against the trace formula.
    pub coframe_delta: f64,
    /// Frame invariants (orthonormality, duality, adaptation).
    pub frame: f64,
    /// Restriction theorems, flat route against intrinsic route (relative).
    pub restriction: f64,
    /// Agreement between algebraically equivalent right-hand sides (relative).
    pub routes: f64,
    /// Homogeneous-field reductions and eigenvalues (relative).
    pub homogeneous: f64,
    /// One-form Weitzenböck residual.
    pub weitzenboeck: f64,
    /// Scalar `□ = Δ`.
    pub weitzenboeck_scalar: f64,
    /// Constant-curvature fit residual and `|K| - H^2`.
    pub curvature: f64,
    /// Section property `restriction ∘ section = Id`.
    pub section: f64,
    /// Realized additional term against `χ` (relative).
    pub additional_term: f64,
    /// Metricity, torsion, Bianchi and the connection forms of `d` and `δ`.
    pub connection: f64,
    /// Frame jets against finite differences (relative).
    pub smoothness: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            algebra: 1e-11,
            flow: 1e-6,
            frame_formula: 1e-8,
            audit: 1e-10,
            anholonomy: 1e-8,
            coframe_delta: 1e-9,
            frame: 1e-10,
            restriction: 1e-8,
            routes: 1e-10,
            homogeneous: 1e-8,
            weitzenboeck: 1e-8,
            weitzenboeck_scalar: 1e-10,
            curvature: 1e-7,
            section: 1e-10,
            additional_term: 1e-7,
            connection: 1e-9,
            smoothness: 1e-5,
        }
    }
}

impl Tolerances {
    /// Overrides one tolerance by name.
    pub fn set(&mut self, key: &str, value: f64) -> Result<()> {
        if !(value > 0.0 && value.is_finite()) {
            return Err(Error::Config(format!("tolerance {key} must be positive, got {value}")));
        }
        let slot = match key {
            "algebra" => &mut self.algebra,
            "flow" => &mut self.flow,
            "frame_formula" => &mut self.frame_formula,
            "audit" => &mut self.audit,
            "anholonomy" => &mut self.anholonomy,
            "coframe_delta" => &mut self.coframe_delta,
            "frame" => &mut self.frame,
            "restriction" => &mut self.restriction,
            "routes" => &mut self.routes,
            "homogeneous" => &mut self.homogeneous,
            "weitzenboeck" => &mut self.weitzenboeck,
            "weitzenboeck_scalar" => &mut self.weitzenboeck_scalar,
            "curvature" => &mut self.curvature,
            "section" => &mut self.section,
            "additional_term" => &mut self.additional_term,
            "connection" => &mut self.connection,
            "smoothness" => &mut self.smoothness,
            _ => return Err(Error::Config(format!("unknown tolerance key {key:?}"))),
        };
        *slot = value;
        Ok(())
    }
}

/// Which error a record is judged on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Abs,
    /// `|lhs - rhs|_∞ / max(1, |lhs|_∞)`, or `max(1, |lhs|_∞, scale)` when the
    /// right-hand side is a sum whose summands are much larger than the total.
    Rel,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckRecord {
    pub suite: String,
    pub check: String,
    pub label: String,
    pub geometry: Option<String>,
    pub config: Option<EmbeddingConfig>,
    pub metric: Metric,
    pub tolerance: f64,
    pub samples: usize,
    pub max_abs: f64,
    pub max_rel: f64,
    pub pass: bool,
    /// Whether the record counts toward the overall verdict.
    pub gating: bool,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub info: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    /// Inputs and outputs at the worst sample, for replay.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub worst: Option<serde_json::Value>,
}

impl CheckRecord {
    pub fn key(&self) -> (String, String, String) {
        (self.suite.clone(), self.geometry.clone().unwrap_or_default(), self.check.clone())
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn with_info(mut self, key: &str, value: f64) -> Self {
        self.info.insert(key.to_string(), value);
        self
    }

    /// Marks the record as informational: reported, never fails the run.
    pub fn informational(mut self) -> Self {
        self.gating = false;
        self
    }
}

/// Running maximum of errors over samples.
#[derive(Debug, Clone)]
pub struct Comparison {
    metric: Metric,
    tolerance: f64,
    samples: usize,
    max_abs: f64,
    max_rel: f64,
    worst_score: f64,
    worst: Option<serde_json::Value>,
}

impl Comparison {
    pub fn new(metric: Metric, tolerance: f64) -> Self {
        Self { metric, tolerance, samples: 0, max_abs: 0.0, max_rel: 0.0, worst_score: -1.0, worst: None }
    }

    fn score(&self, abs: f64, rel: f64) -> f64 {
        match self.metric {
            Metric::Abs => abs,
            Metric::Rel => rel,
        }
    }

    fn note(&mut self, abs: f64, rel: f64, detail: impl FnOnce() -> serde_json::Value) {
        self.samples += 1;
        let abs = if abs.is_nan() { f64::INFINITY } else { abs };
        let rel = if rel.is_nan() { f64::INFINITY } else { rel };
        self.max_abs = self.max_abs.max(abs);
        self.max_rel = self.max_rel.max(rel);
        let s = self.score(abs, rel);
        if s > self.worst_score {
            self.worst_score = s;
            self.worst = Some(detail());
        }
    }

    /// Compares two component vectors.
    pub fn push(&mut self, lhs: &[f64], rhs: &[f64], detail: impl FnOnce() -> serde_json::Value) {
        let (abs, rel) = errors(lhs, rhs);
        self.note(abs, rel, detail);
    }

    /// Like [`push`](Self::push), with the relative denominator raised to at
    /// least `scale`, the size of the largest summand on the right.
    pub fn push_scaled(&mut self, lhs: &[f64], rhs: &[f64], scale: f64, detail: impl FnOnce() -> serde_json::Value) {
        let (abs, _) = errors(lhs, rhs);
        let denom = lhs.iter().fold(1.0f64, |m, l| m.max(l.abs())).max(scale);
        self.note(abs, abs / denom, detail);
    }

    /// Records a residual that should vanish.
    pub fn push_residual(&mut self, residual: f64, detail: impl FnOnce() -> serde_json::Value) {
        let r = residual.abs();
        self.note(r, r, detail);
    }

    /// Records a sample that could not be evaluated.
    pub fn push_failure(&mut self, message: String) {
        self.note(f64::INFINITY, f64::INFINITY, || serde_json::json!({ "error": message }));
    }

    pub fn max_abs(&self) -> f64 {
        self.max_abs
    }

    pub fn max_rel(&self) -> f64 {
        self.max_rel
    }

    pub fn passes(&self) -> bool {
        self.samples > 0 && self.score(self.max_abs, self.max_rel) <= self.tolerance
    }

    pub fn finish(self, suite: &str, check: &str, label: &str, cfg: Option<&EmbeddingConfig>) -> CheckRecord {
        let pass = self.passes();
        CheckRecord {
            suite: suite.to_string(),
            check: check.to_string(),
            label: label.to_string(),
            geometry: cfg.map(EmbeddingConfig::label),
            config: cfg.cloned(),
            metric: self.metric,
            tolerance: self.tolerance,
            samples: self.samples,
            max_abs: self.max_abs,
            max_rel: self.max_rel,
            pass,
            gating: true,
            info: BTreeMap::new(),
            note: None,
            worst: self.worst,
        }
    }
}

/// Static description of one check.
#[derive(Debug, Clone, Copy)]
pub struct CheckDef {
    pub id: &'static str,
    pub label: &'static str,
    pub metric: Metric,
    pub tolerance: f64,
    pub gating: bool,
}

impl CheckDef {
    pub const fn new(id: &'static str, label: &'static str, metric: Metric, tolerance: f64) -> Self {
        Self { id, label, metric, tolerance, gating: true }
    }

    pub const fn informational(mut self) -> Self {
        self.gating = false;
        self
    }
}

/// One measurement destined for the check named `id`.
#[derive(Debug, Clone)]
pub enum Sample {
    Pair {
        id: &'static str,
        lhs: Vec<f64>,
        rhs: Vec<f64>,
        detail: serde_json::Value,
    },
    Residual {
        id: &'static str,
        value: f64,
        detail: serde_json::Value,
    },
    /// A pair whose right side is a sum of terms of size up to `scale`.
    Scaled {
        id: &'static str,
        lhs: Vec<f64>,
        rhs: Vec<f64>,
        scale: f64,
        detail: serde_json::Value,
    },
    /// The sample could not be evaluated; counts against every check.
    Failure(String),
}

/// Folds per-point samples into one record per definition, in definition
/// order. Definitions without samples are dropped.
pub fn aggregate(
    suite: &str,
    cfg: Option<&EmbeddingConfig>,
    defs: &[CheckDef],
    samples: &[Vec<Sample>],
) -> Vec<CheckRecord> {
    let mut cmps: Vec<Comparison> = defs.iter().map(|d| Comparison::new(d.metric, d.tolerance)).collect();
    let slot = |id: &str| defs.iter().position(|d| d.id == id);
    for point in samples {
        for s in point {
            match s {
                Sample::Pair { id, lhs, rhs, detail } => {
                    let i = slot(id).unwrap_or_else(|| panic!("undeclared check {id}"));
                    cmps[i].push(lhs, rhs, || detail.clone());
                }
                Sample::Scaled { id, lhs, rhs, scale, detail } => {
                    let i = slot(id).unwrap_or_else(|| panic!("undeclared check {id}"));
                    cmps[i].push_scaled(lhs, rhs, *scale, || detail.clone());
                }
                Sample::Residual { id, value, detail } => {
                    let i = slot(id).unwrap_or_else(|| panic!("undeclared check {id}"));
                    cmps[i].push_residual(*value, || detail.clone());
                }
                Sample::Failure(msg) => cmps.iter_mut().for_each(|c| c.push_failure(msg.clone())),
            }
        }
    }
    defs.iter()
        .zip(cmps)
        .filter(|(_, c)| c.samples > 0)
        .map(|(d, c)| {
            let rec = c.finish(suite, d.id, d.label, cfg);
            if d.gating {
                rec
            } else {
                rec.informational()
            }
        })
        .collect()
}

/// `(max |lhs - rhs|, max |lhs - rhs| / max(1, |lhs|_∞))`
pub fn errors(lhs: &[f64], rhs: &[f64]) -> (f64, f64) {
    if lhs.len() != rhs.len() {
        return (f64::INFINITY, f64::INFINITY);
    }
    let mut abs = 0.0f64;
    let mut scale = 1.0f64;
    for (l, r) in lhs.iter().zip(rhs) {
        let e = (l - r).abs();
        abs = if e.is_nan() { f64::INFINITY } else { abs.max(e) };
        scale = scale.max(l.abs());
    }
    (abs, abs / scale)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relative_error_floor() {
        let (a, r) = errors(&[1e-3, 0.0], &[2e-3, 0.0]);
        assert_eq!(a, 1e-3);
        assert_eq!(r, 1e-3);
        let (a, r) = errors(&[100.0], &[101.0]);
        assert_eq!((a, r), (1.0, 0.01));
    }

    #[test]
    fn scaled_denominator() {
        let mut c = Comparison::new(Metric::Rel, 1e-3);
        c.push_scaled(&[1.0], &[1.5], 1e3, || serde_json::Value::Null);
        assert_eq!(c.max_rel(), 5e-4);
        assert!(c.passes());
        c.push_scaled(&[1.0], &[1.5], 0.1, || serde_json::Value::Null);
        assert_eq!(c.max_rel(), 0.5);
    }

    #[test]
    fn nan_fails() {
        let mut c = Comparison::new(Metric::Abs, 1.0);
        c.push(&[f64::NAN], &[0.0], || serde_json::Value::Null);
        assert!(!c.passes());
        let empty = Comparison::new(Metric::Abs, 1.0);
        assert!(!empty.passes());
    }

    #[test]
    fn worst_sample_kept() {
        let mut c = Comparison::new(Metric::Rel, 1e-3);
        c.push(&[1.0], &[1.0], || serde_json::json!(0));
        c.push(&[1.0], &[1.5], || serde_json::json!(1));
        c.push(&[1.0], &[1.1], || serde_json::json!(2));
        let r = c.finish("s", "c", "l", None);
        assert_eq!(r.worst, Some(serde_json::json!(1)));
        assert!(!r.pass);
    }

    #[test]
    fn tolerance_overrides() {
        let mut t = Tolerances::default();
        t.set("restriction", 1e-6).unwrap();
        assert_eq!(t.restriction, 1e-6);
        assert!(t.set("nope", 1.0).is_err());
        assert!(t.set("flow", -1.0).is_err());
    }
}
