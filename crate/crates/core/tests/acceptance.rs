//! Acceptance criteria. Each test prints one `PASS`/`FAIL` line and then
//! asserts it. Limits are pinned here, independently of the library defaults,
//! and are also installed into the run configuration.

use std::collections::BTreeSet;
use std::sync::OnceLock;

use pseudoform::ambient::{sample_sigma, AmbientKind, EmbeddingConfig};
use pseudoform::exec::Execution;
use pseudoform::report::{CheckRecord, Metric, Tolerances};
use pseudoform::suite::{derive_seed, render_json, run, table_eigen, SuiteConfig, SuiteKind, SuiteReport};

const ALGEBRA: f64 = 1e-11;
const FLOW: f64 = 1e-6;
const FRAME_FORMULA: f64 = 1e-8;
const AUDIT: f64 = 1e-10;
const ANHOLONOMY: f64 = 1e-8;
const COFRAME_DELTA: f64 = 1e-9;
const RESTRICTION: f64 = 1e-8;
const ROUTES: f64 = 1e-10;
const HOMOGENEOUS: f64 = 1e-8;
const WEITZENBOECK: f64 = 1e-8;
const WEITZENBOECK_SCALAR: f64 = 1e-10;
const CURVATURE: f64 = 1e-7;
const SECTION: f64 = 1e-10;
const ADDITIONAL_TERM: f64 = 1e-7;

const RESTRICTION_POINTS: usize = 50;
const FIELDS: usize = 10;
const WEITZENBOECK_FIELDS: usize = 50;

/// Three dimensions, both signs, the round sphere: 9 geometries in `R^{n+1}`,
/// 6 in `R^{n+2}`.
const RN1_GEOMETRIES: usize = 9;
const RN2_GEOMETRIES: usize = 6;

fn pinned() -> Tolerances {
    let mut t = Tolerances::default();
    for (k, v) in [
        ("algebra", ALGEBRA),
        ("flow", FLOW),
        ("frame_formula", FRAME_FORMULA),
        ("audit", AUDIT),
        ("anholonomy", ANHOLONOMY),
        ("coframe_delta", COFRAME_DELTA),
        ("restriction", RESTRICTION),
        ("routes", ROUTES),
        ("homogeneous", HOMOGENEOUS),
        ("weitzenboeck", WEITZENBOECK),
        ("weitzenboeck_scalar", WEITZENBOECK_SCALAR),
        ("curvature", CURVATURE),
        ("section", SECTION),
        ("additional_term", ADDITIONAL_TERM),
    ] {
        t.set(k, v).unwrap();
    }
    t
}

fn config(suite: SuiteKind) -> SuiteConfig {
    SuiteConfig { suite, fields: FIELDS, tolerances: pinned(), ..SuiteConfig::default() }
}

fn cached(cell: &'static OnceLock<SuiteReport>, make: impl FnOnce() -> SuiteConfig) -> &'static SuiteReport {
    cell.get_or_init(|| run(&make()).expect("suite runs"))
}

fn algebra() -> &'static SuiteReport {
    static R: OnceLock<SuiteReport> = OnceLock::new();
    cached(&R, || config(SuiteKind::Algebra))
}

fn restriction() -> &'static SuiteReport {
    static R: OnceLock<SuiteReport> = OnceLock::new();
    cached(&R, || SuiteConfig { samples: RESTRICTION_POINTS, ..config(SuiteKind::Restriction) })
}

fn weitzenboeck() -> &'static SuiteReport {
    static R: OnceLock<SuiteReport> = OnceLock::new();
    cached(&R, || SuiteConfig { fields: WEITZENBOECK_FIELDS, ..config(SuiteKind::Weitzenboeck) })
}

fn sections() -> &'static SuiteReport {
    static R: OnceLock<SuiteReport> = OnceLock::new();
    cached(&R, || config(SuiteKind::Sections))
}

fn ambient(r: &CheckRecord) -> Option<AmbientKind> {
    r.config.as_ref().map(|c| c.ambient)
}

/// Which error a criterion reads off a record.
#[derive(Clone, Copy)]
enum Read {
    Abs,
    Rel,
    /// The record's own metric.
    Native,
}

fn error_of(r: &CheckRecord, read: Read) -> f64 {
    match (read, r.metric) {
        (Read::Abs, _) | (Read::Native, Metric::Abs) => r.max_abs,
        (Read::Rel, _) | (Read::Native, Metric::Rel) => r.max_rel,
    }
}

struct Gate {
    criterion: u8,
    title: &'static str,
    checked: usize,
    worst_ratio: f64,
    problems: Vec<String>,
}

impl Gate {
    fn new(criterion: u8, title: &'static str) -> Self {
        Self { criterion, title, checked: 0, worst_ratio: 0.0, problems: Vec::new() }
    }

    fn judge(&mut self, r: &CheckRecord, read: Read, limit: f64) {
        let e = error_of(r, read);
        self.checked += 1;
        let ratio = if e.is_nan() { f64::INFINITY } else { e / limit };
        self.worst_ratio = self.worst_ratio.max(ratio);
        if e.is_nan() || e > limit || r.samples == 0 {
            self.problems.push(format!(
                "{} on {}: {e:.3e} > {limit:.0e}",
                r.check,
                r.geometry.as_deref().unwrap_or("flat")
            ));
        }
    }

    /// Judges every record called `check`, and requires it on `geometries`
    /// distinct geometries (`None`: at least one).
    fn judge_all(&mut self, report: &SuiteReport, check: &str, read: Read, limit: f64, geometries: Option<usize>) {
        let recs: Vec<&CheckRecord> = report.records.iter().filter(|r| r.check == check).collect();
        let seen: BTreeSet<Option<&str>> = recs.iter().map(|r| r.geometry.as_deref()).collect();
        match geometries {
            Some(g) if seen.len() != g => {
                self.problems.push(format!("{check}: {} geometries, expected {g}", seen.len()))
            }
            None if recs.is_empty() => self.problems.push(format!("{check}: no records")),
            _ => {}
        }
        for r in recs {
            self.judge(r, read, limit);
        }
    }

    fn problem(&mut self, msg: String) {
        self.problems.push(msg);
    }

    fn finish(self) {
        let pass = self.problems.is_empty() && self.checked > 0;
        println!(
            "{} criterion {} ({}): {} records, worst error/limit {:.3e}{}",
            if pass { "PASS" } else { "FAIL" },
            self.criterion,
            self.title,
            self.checked,
            self.worst_ratio,
            if pass { String::new() } else { format!("; {} problem(s)", self.problems.len()) }
        );
        for p in &self.problems {
            println!("    {p}");
        }
        assert!(pass, "criterion {} failed", self.criterion);
    }
}

fn per_basis(stem: &str) -> [String; 3] {
    ["coordinate", "frame", "sigma"].map(|b| format!("{stem}_{b}"))
}

#[test]
fn criterion_1_operator_algebra() {
    let r = algebra();
    let mut g = Gate::new(1, "operator algebra");
    for stem in ["d_squared", "codifferential_squared", "ij_anticommutator", "star_inverse", "star_inverse_sign"] {
        for id in per_basis(stem) {
            g.judge_all(r, &id, Read::Abs, ALGEBRA, Some(RN1_GEOMETRIES + RN2_GEOMETRIES));
        }
    }
    g.judge_all(r, "cartan_flow", Read::Abs, FLOW, None);
    g.finish();
}

#[test]
fn criterion_2_frame_formulas() {
    let mut g = Gate::new(2, "frame-formula equivalence");
    for stem in ["frame_formula_oneform", "frame_formula_scalar"] {
        for id in per_basis(stem) {
            g.judge_all(algebra(), &id, Read::Rel, FRAME_FORMULA, Some(RN1_GEOMETRIES + RN2_GEOMETRIES));
        }
    }
    g.judge_all(restriction(), "rn1_normal_terms_audit", Read::Rel, AUDIT, Some(RN1_GEOMETRIES));
    g.finish();
}

#[test]
fn criterion_3_anholonomy() {
    let r = algebra();
    let mut g = Gate::new(3, "anholonomy ground truth");
    let all = Some(RN1_GEOMETRIES + RN2_GEOMETRIES);
    for id in
        ["anholonomy_tangent_normal", "anholonomy_normal_component", "anholonomy_trace", "anholonomy_normal_derivative"]
    {
        g.judge_all(r, id, Read::Abs, ANHOLONOMY, all);
    }
    for id in ["coframe_codifferential_frame", "coframe_codifferential_sigma"] {
        g.judge_all(r, id, Read::Abs, COFRAME_DELTA, all);
    }
    g.finish();
}

#[test]
fn criterion_4_restriction_theorems() {
    let r = restriction();
    let mut g = Gate::new(4, "restriction theorems");
    let theorems_rn1 = ["rn1_form_frame", "rn1_form_intrinsic", "rn1_form_beltrami", "rn1_scalar"];
    let theorems_rn2 = [
        "rn2_form_extended",
        "rn2_form_intrinsic",
        "rn2_form_intrinsic_swapped",
        "rn2_form_beltrami",
        "rn2_scalar",
        "rn2_scalar_swapped",
    ];
    let routes_rn1 = ["rn1_form_routes"];
    let routes_rn2 = ["rn2_form_routes_extended_intrinsic", "rn2_form_routes_swapped", "rn2_scalar_routes_swapped"];
    for id in theorems_rn1 {
        g.judge_all(r, id, Read::Rel, RESTRICTION, Some(RN1_GEOMETRIES));
    }
    for id in theorems_rn2 {
        g.judge_all(r, id, Read::Rel, RESTRICTION, Some(RN2_GEOMETRIES));
    }
    for id in routes_rn1 {
        g.judge_all(r, id, Read::Rel, ROUTES, Some(RN1_GEOMETRIES));
    }
    for id in routes_rn2 {
        g.judge_all(r, id, Read::Rel, ROUTES, Some(RN2_GEOMETRIES));
    }
    for rec in &r.records {
        if rec.samples == 0 {
            g.problem(format!("{} has no samples", rec.check));
        }
        let per_field = rec.samples / RESTRICTION_POINTS;
        if theorems_rn1.contains(&rec.check.as_str()) && per_field < FIELDS {
            g.problem(format!("{}: {} samples, expected {RESTRICTION_POINTS} x {FIELDS}", rec.check, rec.samples));
        }
    }
    let spheres = r.records.iter().filter(|x| x.geometry.as_deref().is_some_and(|s| s.contains("sphere"))).count();
    if spheres == 0 {
        g.problem("no round-sphere records".into());
    }
    g.finish();
}

#[test]
fn criterion_5_homogeneous_fields() {
    let r = restriction();
    let mut g = Gate::new(5, "homogeneous-field reductions and eigenvalues");
    g.judge_all(r, "rn1_form_homogeneous", Read::Rel, HOMOGENEOUS, Some(RN1_GEOMETRIES));
    g.judge_all(r, "rn1_scalar_homogeneous", Read::Rel, HOMOGENEOUS, Some(RN1_GEOMETRIES));
    g.judge_all(r, "rn2_scalar_homogeneous", Read::Rel, HOMOGENEOUS, Some(RN2_GEOMETRIES));
    for l in 0..=4 {
        g.judge_all(r, &format!("sphere_eigenvalue_l{l}"), Read::Rel, HOMOGENEOUS, Some(3));
    }
    // the ratio table itself
    for n in [2, 3, 4] {
        let cfg = EmbeddingConfig::sphere(n, 1.0).unwrap();
        let pts = sample_sigma(&cfg, derive_seed(7, "acceptance/eigen"), 25).unwrap();
        for row in table_eigen(&cfg, &pts, 4).unwrap() {
            let err = (row.measured - row.expected).abs() / row.expected.abs().max(1.0);
            g.checked += 1;
            if err.is_nan() || err > HOMOGENEOUS || row.samples == 0 {
                g.problem(format!("S^{n} l={}: ratio {} vs {}", row.l, row.measured, row.expected));
            }
        }
    }
    g.finish();
}

#[test]
fn criterion_6_weitzenboeck() {
    let r = weitzenboeck();
    let mut g = Gate::new(6, "Weitzenböck identities and constant curvature");
    let all = Some(RN1_GEOMETRIES + RN2_GEOMETRIES);
    g.judge_all(r, "oneform_residual", Read::Native, WEITZENBOECK, all);
    g.judge_all(r, "scalar", Read::Native, WEITZENBOECK_SCALAR, all);
    g.judge_all(r, "constant_curvature_modulus", Read::Abs, CURVATURE, all);
    g.judge_all(r, "constant_curvature_residual", Read::Abs, CURVATURE, all);
    g.finish();
}

#[test]
fn criterion_7_sections() {
    let r = sections();
    let mut g = Gate::new(7, "sections and realized additional terms");
    let registry = ["scale(0)", "scale(1)", "scale(-2.5)", "multiply_by_restricted_scalar", "add_fixed"];
    for kind in ["oneform", "scalar"] {
        g.judge_all(r, &format!("{kind}_section_identity"), Read::Abs, SECTION, Some(RN1_GEOMETRIES + RN2_GEOMETRIES));
        for chi in registry {
            let id = format!("{kind}_additional_term_{chi}");
            g.judge_all(r, &id, Read::Rel, ADDITIONAL_TERM, Some(RN1_GEOMETRIES + RN2_GEOMETRIES));
            for amb in [AmbientKind::Rn1, AmbientKind::Rn2] {
                if !r.records.iter().any(|x| x.check == id && ambient(x) == Some(amb)) {
                    g.problem(format!("{id}: nothing in {amb:?}"));
                }
            }
        }
        let negative: Vec<&CheckRecord> =
            r.records.iter().filter(|x| x.check.starts_with(kind) && x.check.ends_with("_negative_root")).collect();
        if negative.is_empty() {
            g.problem(format!("{kind}: no negative-root spot check"));
        }
        for rec in negative {
            let limit = if rec.check.contains("section_identity") { SECTION } else { ADDITIONAL_TERM };
            g.judge(rec, Read::Native, limit);
        }
    }
    g.finish();
}

fn strip_timing(json: &str) -> String {
    json.lines().filter(|l| !l.trim_start().starts_with("\"timing\"")).collect::<Vec<_>>().join("\n")
}

#[test]
fn criterion_8_determinism() {
    let mut g = Gate::new(8, "determinism");
    let sc = SuiteConfig { ns: vec![2, 3], samples: 6, fields: 3, ..config(SuiteKind::All) };
    let a = render_json(&run(&sc).unwrap());
    let b = render_json(&run(&sc).unwrap());
    let c = render_json(&run(&SuiteConfig { execution: Execution::Sequential, ..sc.clone() }).unwrap());
    for (name, other) in [("second run", &b), ("sequential run", &c)] {
        g.checked += 1;
        if strip_timing(&a) != strip_timing(other) {
            g.problem(format!("{name} differs outside the timing line"));
        }
    }
    // exactly one line is excluded
    g.checked += 1;
    if a.lines().count() != strip_timing(&a).lines().count() + 1 {
        g.problem("timing is not confined to one line".into());
    }
    g.finish();
}
