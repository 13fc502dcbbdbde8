//! Verification suites over a grid of geometries, and the report they
//! produce.

mod algebra;
mod curvature;
mod eigen;
mod output;

use std::fmt;
use std::str::FromStr;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::ambient::{sample_sigma, AmbientKind, AmbientPoint, EmbeddingConfig};
use crate::error::{Error, Result};
use crate::exec::{map_collect, Execution};
use crate::expr::{random_homogeneous, random_polynomial, OneFormField};
use crate::extension::{self, chi_registry, ChiOperator, FieldKind, Root, SigmaField};
use crate::report::{CheckRecord, Tolerances};
use crate::restriction::{self, RestrictionFields};

pub use eigen::{eigen_records, table_eigen, EigenRow, MAX_EIGEN_DEGREE};
pub use output::{render_json, render_markdown, write_json_value};

pub const SCHEMA_VERSION: u32 = 1;
/// Monomials per random polynomial.
pub const TERMS: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SuiteKind {
    Algebra,
    Restriction,
    Weitzenboeck,
    Sections,
    All,
}

impl SuiteKind {
    pub const EACH: [SuiteKind; 4] =
        [SuiteKind::Algebra, SuiteKind::Restriction, SuiteKind::Weitzenboeck, SuiteKind::Sections];

    pub fn name(self) -> &'static str {
        match self {
            SuiteKind::Algebra => "algebra",
            SuiteKind::Restriction => "restriction",
            SuiteKind::Weitzenboeck => "weitzenboeck",
            SuiteKind::Sections => "sections",
            SuiteKind::All => "all",
        }
    }

    fn selected(self) -> Vec<SuiteKind> {
        match self {
            SuiteKind::All => Self::EACH.to_vec(),
            s => vec![s],
        }
    }
}

impl fmt::Display for SuiteKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SuiteKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "algebra" => SuiteKind::Algebra,
            "restriction" => SuiteKind::Restriction,
            "weitzenboeck" | "weitzenbock" => SuiteKind::Weitzenboeck,
            "sections" => SuiteKind::Sections,
            "all" => SuiteKind::All,
            _ => return Err(Error::Config(format!("unknown suite {s:?}"))),
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteConfig {
    pub suite: SuiteKind,
    pub ns: Vec<usize>,
    pub eps: Vec<i8>,
    /// Round spheres only.
    pub euclidean: bool,
    pub ambients: Vec<AmbientKind>,
    #[serde(rename = "H")]
    pub h: f64,
    pub samples: usize,
    pub fields: usize,
    pub field_degree: u32,
    pub seed: u64,
    pub tolerances: Tolerances,
    #[serde(skip)]
    pub execution: Execution,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            suite: SuiteKind::All,
            ns: vec![2, 3, 4],
            eps: vec![1, -1],
            euclidean: false,
            ambients: vec![AmbientKind::Rn1, AmbientKind::Rn2],
            h: 1.0,
            samples: 25,
            fields: 10,
            field_degree: 3,
            seed: 7,
            tolerances: Tolerances::default(),
            execution: Execution::Parallel,
        }
    }
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.ns.is_empty() || self.eps.is_empty() || self.ambients.is_empty() {
            return bad("n, eps and geometry lists must be non-empty".into());
        }
        if let Some(n) = self.ns.iter().find(|&&n| !(2..=6).contains(&n)) {
            return bad(format!("n must lie in [2, 6], got {n}"));
        }
        if let Some(e) = self.eps.iter().find(|&&e| e != 1 && e != -1) {
            return bad(format!("eps must be +1 or -1, got {e}"));
        }
        if !(self.h > 0.0 && self.h.is_finite()) {
            return bad(format!("H must be positive, got {}", self.h));
        }
        if self.samples < 1 {
            return bad("samples must be at least 1".into());
        }
        if self.fields < 1 {
            return bad("fields must be at least 1".into());
        }
        if !(1..=4).contains(&self.field_degree) {
            return bad(format!("field degree must lie in [1, 4], got {}", self.field_degree));
        }
        Ok(())
    }

    /// The geometry grid, in a fixed order.
    pub fn geometries(&self) -> Result<Vec<EmbeddingConfig>> {
        let mut out = Vec::new();
        for &n in &self.ns {
            if self.euclidean {
                out.push(EmbeddingConfig::sphere(n, self.h)?);
                continue;
            }
            for &eps in &self.eps {
                for &kind in &self.ambients {
                    out.push(match kind {
                        AmbientKind::Rn1 => EmbeddingConfig::rn1(n, eps, self.h)?,
                        AmbientKind::Rn2 => EmbeddingConfig::rn2(n, eps, self.h)?,
                    });
                }
            }
            if self.ambients.contains(&AmbientKind::Rn1) {
                out.push(EmbeddingConfig::sphere(n, self.h)?);
            }
        }
        Ok(out)
    }
}

/// Stable per-purpose seed: FNV-1a over the tag, mixed with the base seed.
pub fn derive_seed(base: u64, tag: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in tag.bytes().chain(base.to_le_bytes()) {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

pub fn rng_for(base: u64, tag: &str) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(base, tag))
}

pub fn points_for(cfg: &EmbeddingConfig, sc: &SuiteConfig, suite: &str) -> Result<Vec<AmbientPoint>> {
    sample_sigma(cfg, derive_seed(sc.seed, &format!("{suite}/{}/points", cfg.label())), sc.samples)
}

#[derive(Debug, Clone, Serialize)]
pub struct Engine {
    pub name: &'static str,
    pub version: &'static str,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Summary {
    pub records: usize,
    pub gating: usize,
    pub passed: usize,
    pub failed: usize,
    pub informational: usize,
}

/// Excluded from the determinism contract.
#[derive(Debug, Clone, Serialize)]
pub struct Timing {
    pub started_unix: u64,
    pub wall_clock_seconds: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub schema_version: u32,
    pub engine: Engine,
    pub seed: u64,
    pub config: SuiteConfig,
    pub pass: bool,
    pub summary: Summary,
    pub records: Vec<CheckRecord>,
    pub timing: Timing,
}

impl SuiteReport {
    pub fn from_records(config: SuiteConfig, mut records: Vec<CheckRecord>, timing: Timing) -> Self {
        records.sort_by_key(CheckRecord::key);
        let mut summary = Summary { records: records.len(), ..Summary::default() };
        for r in &records {
            if r.gating {
                summary.gating += 1;
                if r.pass {
                    summary.passed += 1;
                } else {
                    summary.failed += 1;
                }
            } else {
                summary.informational += 1;
            }
        }
        Self {
            schema_version: SCHEMA_VERSION,
            engine: Engine { name: env!("CARGO_PKG_NAME"), version: env!("CARGO_PKG_VERSION") },
            seed: config.seed,
            config,
            pass: summary.failed == 0 && summary.gating > 0,
            summary,
            records,
            timing,
        }
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.records.iter().filter(|r| r.gating && !r.pass)
    }

    pub fn find(&self, suite: &str, geometry: Option<&str>, check: &str) -> Option<&CheckRecord> {
        self.records
            .iter()
            .find(|r| r.suite == suite && r.check == check && geometry.is_none_or(|g| r.geometry.as_deref() == Some(g)))
    }
}

/// Runs every selected suite over the geometry grid.
pub fn run(config: &SuiteConfig) -> Result<SuiteReport> {
    config.validate()?;
    let started = Instant::now();
    let started_unix = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let geometries = config.geometries()?;
    let mut records = Vec::new();
    for suite in config.suite.selected() {
        records.extend(run_suite(suite, config, &geometries)?);
    }
    let timing = Timing { started_unix, wall_clock_seconds: started.elapsed().as_secs_f64() };
    Ok(SuiteReport::from_records(config.clone(), records, timing))
}

fn run_suite(suite: SuiteKind, sc: &SuiteConfig, geometries: &[EmbeddingConfig]) -> Result<Vec<CheckRecord>> {
    let per_geometry = map_collect(sc.execution, geometries, |cfg| -> Result<Vec<CheckRecord>> {
        let points = points_for(cfg, sc, suite.name())?;
        Ok(match suite {
            SuiteKind::Algebra => algebra::run_geometry(cfg, &points, sc),
            SuiteKind::Restriction => restriction_records(cfg, &points, sc)?,
            SuiteKind::Weitzenboeck => curvature::run_geometry(cfg, &points, sc),
            SuiteKind::Sections => section_records(cfg, &points, sc, Root::Positive),
            SuiteKind::All => unreachable!("expanded by selected()"),
        })
    });
    let mut out = Vec::new();
    for r in per_geometry {
        out.extend(r?);
    }
    match suite {
        SuiteKind::Algebra => out.extend(algebra::run_flat(sc)),
        SuiteKind::Sections => {
            // one spot check with the other root of the quadratic
            if let Some(cfg) = geometries.first() {
                let points = points_for(cfg, sc, "sections-negative-root")?;
                out.extend(section_records(cfg, &points, sc, Root::Negative));
            }
        }
        _ => {}
    }
    Ok(out)
}

/// Random fields for the restriction suite in one geometry.
pub fn restriction_fields(cfg: &EmbeddingConfig, sc: &SuiteConfig) -> RestrictionFields {
    let mut rng = rng_for(sc.seed, &format!("restriction/{}/fields", cfg.label()));
    let d = cfg.dim();
    let deg = sc.field_degree;
    let mut f = RestrictionFields::default();
    for _ in 0..sc.fields {
        f.oneforms.push(OneFormField::random(&mut rng, d, deg, TERMS));
    }
    for _ in 0..sc.fields {
        f.scalars.push(random_polynomial(&mut rng, d, deg, TERMS).to_expr());
    }
    for i in 0..sc.fields {
        let r = 1 + (i as u32 % deg);
        f.transverse.push((OneFormField::random_transverse(&mut rng, d, r, TERMS), r));
    }
    for i in 0..sc.fields {
        let r = i as u32 % (deg + 1);
        f.homogeneous.push((random_homogeneous(&mut rng, d, r, TERMS).to_expr(), r));
    }
    f
}

fn restriction_records(cfg: &EmbeddingConfig, points: &[AmbientPoint], sc: &SuiteConfig) -> Result<Vec<CheckRecord>> {
    let fields = restriction_fields(cfg, sc);
    let mut out = restriction::verify(cfg, points, &fields, &sc.tolerances, sc.execution);
    if cfg.euclidean {
        out.extend(eigen_records(cfg, points, MAX_EIGEN_DEGREE, &sc.tolerances)?);
    }
    Ok(out)
}

fn section_records(cfg: &EmbeddingConfig, points: &[AmbientPoint], sc: &SuiteConfig, root: Root) -> Vec<CheckRecord> {
    let tag = match root {
        Root::Positive => "sections",
        Root::Negative => "sections-negative-root",
    };
    let mut out = Vec::new();
    for kind in [FieldKind::Scalar, FieldKind::OneForm] {
        let mut rng = rng_for(sc.seed, &format!("{tag}/{}/{kind:?}", cfg.label()));
        let betas: Vec<SigmaField> = (0..sc.fields)
            .map(|_| match kind {
                FieldKind::Scalar => SigmaField::random_scalar(&mut rng, cfg.n, sc.field_degree, TERMS),
                FieldKind::OneForm => SigmaField::random_oneform(&mut rng, cfg.n, sc.field_degree, TERMS),
            })
            .collect();
        let mut chis = chi_registry(&mut rng, cfg.n, kind, sc.field_degree.min(2));
        if root == Root::Negative {
            chis.retain(|c| matches!(c, ChiOperator::Scale { factor } if *factor == -2.5));
        }
        out.extend(extension::verify(cfg, points, &betas, &chis, root, &sc.tolerances, sc.execution));
    }
    out
}
