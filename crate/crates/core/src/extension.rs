//! Homogeneous extensions off `Σ_n` and sections that realize a prescribed
//! additional term.
//!
//! A field on `Σ_n` is an expression in the first `n+1` ambient coordinates
//! whose values matter only on `Σ_n`. One-forms are given by components
//! against the adapted co-frame, `h = h_μ e^μ`, so they are transverse by
//! construction. In `R^{n+2}` every extension depends on `y^0..y^n` only,
//! which is the pullback along the orthogonal projection onto the plane.

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::ambient::{quadratic_form_jet, AffineField, AmbientKind, AmbientPoint, EmbeddingConfig};
use crate::error::{Error, Result};
use crate::exec::{map_collect, Execution};
use crate::expr::{random_polynomial, FieldExpr, OneFormSource, ScalarSource};
use crate::frames::adapted_frame;
use crate::jets::{seed_coordinates, Jet};
use crate::report::{CheckRecord, Comparison, Metric, Tolerances};
use crate::restriction::{measured_additional_term_oneform, measured_additional_term_scalar, SigmaPoint};

/// Radius below which non-integer powers are refused.
pub const MIN_RADIUS_NONINTEGER: f64 = 0.3;
const MIN_RADIUS: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldKind {
    Scalar,
    OneForm,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SigmaField {
    Scalar {
        expr: FieldExpr,
    },
    /// Components `h_μ` against the adapted co-frame.
    OneForm {
        comps: Vec<FieldExpr>,
    },
}

impl SigmaField {
    pub fn kind(&self) -> FieldKind {
        match self {
            SigmaField::Scalar { .. } => FieldKind::Scalar,
            SigmaField::OneForm { .. } => FieldKind::OneForm,
        }
    }

    pub fn random_scalar<R: rand::Rng + ?Sized>(rng: &mut R, n: usize, degree: u32, terms: usize) -> Self {
        SigmaField::Scalar { expr: random_polynomial(rng, n + 1, degree, terms).to_expr() }
    }

    pub fn random_oneform<R: rand::Rng + ?Sized>(rng: &mut R, n: usize, degree: u32, terms: usize) -> Self {
        SigmaField::OneForm { comps: (0..n).map(|_| random_polynomial(rng, n + 1, degree, terms).to_expr()).collect() }
    }

    fn map(&self, f: impl Fn(&FieldExpr) -> FieldExpr) -> Self {
        match self {
            SigmaField::Scalar { expr } => SigmaField::Scalar { expr: f(expr) },
            SigmaField::OneForm { comps } => SigmaField::OneForm { comps: comps.iter().map(f).collect() },
        }
    }

    /// Values at a point of `Σ_n` given in plane coordinates: one entry for a
    /// scalar, `n` frame components for a one-form.
    pub fn values_at(&self, y_plane: &[f64]) -> Result<Vec<f64>> {
        match self {
            SigmaField::Scalar { expr } => Ok(vec![expr.eval_value(y_plane)?]),
            SigmaField::OneForm { comps } => comps.iter().map(|c| c.eval_value(y_plane)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum ChiOperator {
    Scale {
        factor: f64,
    },
    MultiplyByRestrictedScalar {
        g: FieldExpr,
    },
    /// `β ↦ β + form`
    AddFixed {
        form: SigmaField,
    },
}

impl ChiOperator {
    pub fn name(&self) -> String {
        match self {
            ChiOperator::Scale { factor } => format!("scale({factor})"),
            ChiOperator::MultiplyByRestrictedScalar { .. } => "multiply_by_restricted_scalar".into(),
            ChiOperator::AddFixed { .. } => "add_fixed".into(),
        }
    }

    pub fn apply(&self, beta: &SigmaField) -> Result<SigmaField> {
        Ok(match self {
            ChiOperator::Scale { factor } => beta.map(|e| e.scale(*factor)),
            ChiOperator::MultiplyByRestrictedScalar { g } => beta.map(|e| e.mul(g)),
            ChiOperator::AddFixed { form } => match (beta, form) {
                (SigmaField::Scalar { expr }, SigmaField::Scalar { expr: k }) => {
                    SigmaField::Scalar { expr: expr.add(k) }
                }
                (SigmaField::OneForm { comps }, SigmaField::OneForm { comps: k }) if comps.len() == k.len() => {
                    SigmaField::OneForm { comps: comps.iter().zip(k).map(|(c, k)| c.add(k)).collect() }
                }
                _ => return Err(Error::Config("add_fixed form does not match the field it acts on".into())),
            },
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Root {
    Positive,
    Negative,
}

/// Root of `s^2 + b s = 1` with `b = n - 3` for one-forms and `b = n - 1`
/// for scalars.
pub fn section_degree(kind: FieldKind, n: usize, root: Root) -> f64 {
    let b = match kind {
        FieldKind::OneForm => n as f64 - 3.0,
        FieldKind::Scalar => n as f64 - 1.0,
    };
    let disc = (b * b + 4.0).sqrt();
    match root {
        // stable forms of (-b ± disc) / 2
        Root::Positive if b >= 0.0 => 2.0 / (b + disc),
        Root::Positive => (disc - b) / 2.0,
        Root::Negative if b > 0.0 => -(b + disc) / 2.0,
        Root::Negative => -2.0 / (disc - b),
    }
}

/// `R = H sqrt|y_P^2|` as a jet, with `y_P` the first `n+1` seeds.
fn radius(cfg: &EmbeddingConfig, seeds: &[Jet], degree: f64) -> Result<Jet> {
    let plane = cfg.plane();
    let q = quadratic_form_jet(&plane, &seeds[..cfg.n + 1]);
    let scaled = q.scale(-cfg.eps_f() * cfg.h * cfg.h);
    if scaled.value() <= MIN_RADIUS * MIN_RADIUS {
        return Err(Error::Domain(format!(
            "point is on the wrong side of or too close to the cone (H^2 |y^2| sign-adjusted = {})",
            scaled.value()
        )));
    }
    let r = scaled.sqrt()?;
    if degree.fract() != 0.0 && r.value() <= MIN_RADIUS_NONINTEGER {
        return Err(Error::Domain(format!("radius {} too small for non-integer degree {degree}", r.value())));
    }
    Ok(r)
}

fn check_seeds(cfg: &EmbeddingConfig, seeds: &[Jet]) -> Result<()> {
    if seeds.len() != cfg.dim() {
        return Err(Error::DimMismatch { left: seeds.len(), right: cfg.dim() });
    }
    Ok(())
}

/// Extension by homogeneity of a scalar (`ρ^{(r)}`) or a one-form
/// (`h^{(s)} = h_μ^{(s-1)} e^μ`).
#[derive(Debug, Clone, Serialize)]
pub struct HomogeneousExtension {
    pub cfg: EmbeddingConfig,
    pub field: SigmaField,
    pub degree: f64,
}

pub fn extend_scalar(rho: &FieldExpr, r: f64, cfg: &EmbeddingConfig) -> HomogeneousExtension {
    HomogeneousExtension { cfg: cfg.clone(), field: SigmaField::Scalar { expr: rho.clone() }, degree: r }
}

pub fn extend_oneform(h: &[FieldExpr], s: f64, cfg: &EmbeddingConfig) -> Result<HomogeneousExtension> {
    if h.len() != cfg.n {
        return Err(Error::DimMismatch { left: h.len(), right: cfg.n });
    }
    Ok(HomogeneousExtension { cfg: cfg.clone(), field: SigmaField::OneForm { comps: h.to_vec() }, degree: s })
}

impl HomogeneousExtension {
    /// `ρ(y_P / R) R^r` for one expression.
    fn extend_expr(&self, expr: &FieldExpr, r: f64, seeds: &[Jet]) -> Result<Jet> {
        let rad = radius(&self.cfg, seeds, r)?;
        let inv = rad.recip()?;
        let projected: Vec<Jet> = seeds[..self.cfg.n + 1].iter().map(|s| s * &inv).collect();
        let value = expr.eval(&projected)?;
        if r == 0.0 {
            return Ok(value);
        }
        Ok(&value * &rad.powf(r)?)
    }
}

impl ScalarSource for HomogeneousExtension {
    fn eval_jet(&self, seeds: &[Jet]) -> Result<Jet> {
        check_seeds(&self.cfg, seeds)?;
        match &self.field {
            SigmaField::Scalar { expr } => self.extend_expr(expr, self.degree, seeds),
            SigmaField::OneForm { .. } => Err(Error::Config("one-form extension evaluated as a scalar".into())),
        }
    }

    fn describe(&self) -> serde_json::Value {
        serde_json::to_value(self).unwrap_or(serde_json::Value::Null)
    }
}

impl OneFormSource for HomogeneousExtension {
    fn dim(&self) -> usize {
        self.cfg.dim()
    }

    /// `seeds` must be the coordinate seeds: the co-frame is rebuilt at
    /// their base point.
    fn eval_components(&self, seeds: &[Jet]) -> Result<Vec<Jet>> {
        check_seeds(&self.cfg, seeds)?;
        let SigmaField::OneForm { comps } = &self.field else {
            return Err(Error::Config("scalar extension evaluated as a one-form".into()));
        };
        let y: Vec<f64> = seeds.iter().map(Jet::value).collect();
        let frame = adapted_frame(&self.cfg, &y)?;
        let d = self.cfg.dim();
        let mut out = vec![Jet::zero(d); d];
        for (mu, h) in comps.iter().enumerate() {
            let hm = self.extend_expr(h, self.degree - 1.0, seeds)?;
            for (o, th) in out.iter_mut().zip(&frame.theta[mu]) {
                o.add_product(1.0, &hm, th);
            }
        }
        Ok(out)
    }

    fn describe(&self) -> serde_json::Value {
        serde_json::to_value(self).unwrap_or(serde_json::Value::Null)
    }
}

/// `β^{(0)} - eps H^{-2} (χ(β)^{(s)} - χ(β)^{(0)})` with `s` a root of the
/// quadratic for the field kind.
#[derive(Debug, Clone, Serialize)]
pub struct Section {
    pub beta: SigmaField,
    pub chi: ChiOperator,
    pub root: Root,
    pub degree: f64,
    #[serde(skip)]
    parts: Vec<(f64, HomogeneousExtension)>,
}

fn build_section(beta: &SigmaField, chi: &ChiOperator, cfg: &EmbeddingConfig, root: Root) -> Result<Section> {
    if cfg.n < 2 {
        return Err(Error::Config(format!("sections need n >= 2, got {}", cfg.n)));
    }
    let kind = beta.kind();
    let s = section_degree(kind, cfg.n, root);
    let image = chi.apply(beta)?;
    let ext = |f: &SigmaField, deg: f64| HomogeneousExtension { cfg: cfg.clone(), field: f.clone(), degree: deg };
    if let SigmaField::OneForm { comps } = beta {
        if comps.len() != cfg.n {
            return Err(Error::DimMismatch { left: comps.len(), right: cfg.n });
        }
    }
    let k = -cfg.eps_f() / (cfg.h * cfg.h);
    Ok(Section {
        beta: beta.clone(),
        chi: chi.clone(),
        root,
        degree: s,
        parts: vec![(1.0, ext(beta, 0.0)), (k, ext(&image, s)), (-k, ext(&image, 0.0))],
    })
}

/// Section of the restriction to `Σ_n ⊂ R^{n+1}`.
pub fn section_rn1(beta: &SigmaField, chi: &ChiOperator, cfg: &EmbeddingConfig, root: Root) -> Result<Section> {
    if cfg.ambient != AmbientKind::Rn1 {
        return Err(Error::WrongAmbient("section_rn1 needs an R^{n+1} configuration"));
    }
    build_section(beta, chi, cfg, root)
}

/// Section of the restriction to `Σ_n ⊂ R^{n+2}`: the `R^{n+1}` section
/// made independent of `y^{n+1}`.
pub fn section_rn2(beta: &SigmaField, chi: &ChiOperator, cfg: &EmbeddingConfig, root: Root) -> Result<Section> {
    if cfg.ambient != AmbientKind::Rn2 {
        return Err(Error::WrongAmbient("section_rn2 needs an R^{n+2} configuration"));
    }
    build_section(beta, chi, cfg, root)
}

pub fn section(beta: &SigmaField, chi: &ChiOperator, cfg: &EmbeddingConfig, root: Root) -> Result<Section> {
    match cfg.ambient {
        AmbientKind::Rn1 => section_rn1(beta, chi, cfg, root),
        AmbientKind::Rn2 => section_rn2(beta, chi, cfg, root),
    }
}

impl ScalarSource for Section {
    fn eval_jet(&self, seeds: &[Jet]) -> Result<Jet> {
        let mut acc = Jet::zero(seeds.len());
        for (c, part) in &self.parts {
            acc.add_scaled(*c, &part.eval_jet(seeds)?);
        }
        Ok(acc)
    }

    fn describe(&self) -> serde_json::Value {
        serde_json::to_value(self).unwrap_or(serde_json::Value::Null)
    }
}

impl OneFormSource for Section {
    fn dim(&self) -> usize {
        self.parts[0].1.cfg.dim()
    }

    fn eval_components(&self, seeds: &[Jet]) -> Result<Vec<Jet>> {
        let mut acc = vec![Jet::zero(seeds.len()); seeds.len()];
        for (c, part) in &self.parts {
            for (a, p) in acc.iter_mut().zip(part.eval_components(seeds)?) {
                a.add_scaled(*c, &p);
            }
        }
        Ok(acc)
    }

    fn describe(&self) -> serde_json::Value {
        serde_json::to_value(self).unwrap_or(serde_json::Value::Null)
    }
}

/// Scales off `Σ_n` used for the homogeneity checks.
pub const OFF_SIGMA_SCALES: [f64; 2] = [0.6, 1.7];

/// Everything measured for one `(β, χ)` pair at one point.
struct SectionSample {
    /// Restriction of the section against `β`.
    restricted: Vec<f64>,
    beta: Vec<f64>,
    /// Measured additional term against `χ(β)`.
    at: Vec<f64>,
    /// Size of the operators `at` is the difference of.
    at_scale: f64,
    chi: Vec<f64>,
    /// Largest `|∂_{n+1}|` entry of the section's jets (`R^{n+2}` only).
    vertical: f64,
}

fn plane_point(cfg: &EmbeddingConfig, y: &[f64]) -> Vec<f64> {
    y[..cfg.n + 1].to_vec()
}

fn vertical_entries(cfg: &EmbeddingConfig, jets: &[Jet]) -> f64 {
    if cfg.ambient != AmbientKind::Rn2 {
        return 0.0;
    }
    let v = cfg.n + 1;
    jets.iter().flat_map(|j| (0..j.dim()).map(move |k| j.grad(v).abs().max(j.hess(v, k).abs()))).fold(0.0, f64::max)
}

fn section_sample(p: &SigmaPoint, sec: &Section) -> Result<SectionSample> {
    let yp = plane_point(&p.cfg, &p.y);
    let beta = sec.beta.values_at(&yp)?;
    let chi = sec.chi.apply(&sec.beta)?.values_at(&yp)?;
    match sec.beta.kind() {
        FieldKind::Scalar => {
            let phi = sec.eval_jet(&p.seeds)?;
            let (at, at_scale) = measured_additional_term_scalar(p, &phi)?;
            Ok(SectionSample {
                restricted: vec![phi.value()],
                beta,
                at: vec![at],
                at_scale,
                chi,
                vertical: vertical_entries(&p.cfg, std::slice::from_ref(&phi)),
            })
        }
        FieldKind::OneForm => {
            let a = sec.eval_components(&p.seeds)?;
            let vals: Vec<f64> = a.iter().map(Jet::value).collect();
            let (at, at_scale) = measured_additional_term_oneform(p, &a)?;
            Ok(SectionSample {
                restricted: p.pullback(&vals),
                beta,
                at,
                at_scale,
                chi,
                vertical: vertical_entries(&p.cfg, &a),
            })
        }
    }
}

/// Values of the extension at `λ y` against `λ^r` times its value at `y`,
/// plus the Euler-type defect off `Σ_n`: `D ρ^{(r)} - r ρ^{(r)}` for scalars,
/// `L_D h^{(s)} - s h^{(s)}` and `i_D h^{(s)}` for one-forms.
pub struct ExtensionDefects {
    pub scaling: (Vec<f64>, Vec<f64>),
    pub euler: f64,
    pub transversality: f64,
}

pub fn extension_defects(ext: &HomogeneousExtension, y: &[f64], lambda: f64) -> Result<ExtensionDefects> {
    let ly: Vec<f64> = y.iter().map(|v| lambda * v).collect();
    let (s0, s1) = (seed_coordinates(y), seed_coordinates(&ly));
    let scale = lambda.powf(ext.degree);
    let dil = AffineField::dilation(ext.cfg.dim());
    match ext.field.kind() {
        FieldKind::Scalar => {
            let f0 = ext.eval_jet(&s0)?;
            let f1 = ext.eval_jet(&s1)?;
            let euler = f1.directional(&s1)?.value() - ext.degree * f1.value();
            Ok(ExtensionDefects { scaling: (vec![f1.value()], vec![scale * f0.value()]), euler, transversality: 0.0 })
        }
        FieldKind::OneForm => {
            let a0 = ext.eval_components(&s0)?;
            let a1 = ext.eval_components(&s1)?;
            // components of a homogeneous one-form scale with degree - 1
            let scale = lambda.powf(ext.degree - 1.0);
            let la = dil.lie_oneform(&a1, &s1)?;
            let euler = la.iter().zip(&a1).map(|(l, a)| (l.value() - ext.degree * a.value()).abs()).fold(0.0, f64::max);
            let transversality = a1.iter().zip(&ly).map(|(a, y)| a.value() * y).sum::<f64>();
            Ok(ExtensionDefects {
                scaling: (a1.iter().map(Jet::value).collect(), a0.iter().map(|a| scale * a.value()).collect()),
                euler,
                transversality,
            })
        }
    }
}

fn kind_prefix(betas: &[SigmaField]) -> &'static str {
    match betas.first().map(SigmaField::kind) {
        Some(FieldKind::Scalar) => "scalar_",
        Some(FieldKind::OneForm) => "oneform_",
        None => "",
    }
}

/// Section and extension checks for one geometry and one root choice. All
/// `betas` are expected to be of one kind.
pub fn verify(
    cfg: &EmbeddingConfig,
    points: &[AmbientPoint],
    betas: &[SigmaField],
    chis: &[ChiOperator],
    root: Root,
    tol: &Tolerances,
    exec: Execution,
) -> Vec<CheckRecord> {
    let suffix = match root {
        Root::Positive => "",
        Root::Negative => "_negative_root",
    };
    let prefix = kind_prefix(betas);
    let sections: Vec<Result<Section>> =
        chis.iter().flat_map(|chi| betas.iter().map(move |b| section(b, chi, cfg, root))).collect();
    let samples = map_collect(exec, points, |pt| {
        let p = SigmaPoint::new(cfg, &pt.coords)?;
        Ok::<_, Error>(
            sections
                .iter()
                .map(|s| s.as_ref().map_err(Clone::clone).and_then(|s| section_sample(&p, s)))
                .collect::<Vec<_>>(),
        )
    });

    let mut identity = Comparison::new(Metric::Abs, tol.section);
    let mut vertical = Comparison::new(Metric::Abs, tol.section);
    let mut per_chi: Vec<Comparison> = chis.iter().map(|_| Comparison::new(Metric::Rel, tol.additional_term)).collect();
    for (pt, per_point) in points.iter().zip(&samples) {
        let per_point = match per_point {
            Ok(v) => v,
            Err(e) => {
                identity.push_failure(e.to_string());
                per_chi.iter_mut().for_each(|c| c.push_failure(e.to_string()));
                continue;
            }
        };
        for (idx, sample) in per_point.iter().enumerate() {
            let ci = idx / betas.len().max(1);
            let bi = idx % betas.len().max(1);
            match sample {
                Ok(s) => {
                    let info = || json!({ "point": pt.coords, "beta": betas[bi], "chi": chis[ci] });
                    identity.push(&s.beta, &s.restricted, info);
                    per_chi[ci].push_scaled(&s.chi, &s.at, s.at_scale, info);
                    if cfg.ambient == AmbientKind::Rn2 {
                        vertical.push_residual(s.vertical, info);
                    }
                }
                Err(e) => {
                    identity.push_failure(e.to_string());
                    per_chi[ci].push_failure(e.to_string());
                }
            }
        }
    }

    let s_pos = |kind| section_degree(kind, cfg.n, root);
    let mut out = vec![identity
        .finish(
            "sections",
            &format!("{prefix}section_identity{suffix}"),
            "restriction of the section returns the field",
            Some(cfg),
        )
        .with_info("degree_oneform", s_pos(FieldKind::OneForm))
        .with_info("degree_scalar", s_pos(FieldKind::Scalar))];
    for (chi, cmp) in chis.iter().zip(per_chi) {
        out.push(cmp.finish(
            "sections",
            &format!("{prefix}additional_term_{}{suffix}", chi.name()),
            "measured additional term of the section equals chi",
            Some(cfg),
        ));
    }
    if cfg.ambient == AmbientKind::Rn2 {
        out.push(vertical.finish(
            "sections",
            &format!("{prefix}section_cylindrical{suffix}"),
            "section does not depend on the vertical coordinate",
            Some(cfg),
        ));
    }
    if root == Root::Positive {
        out.extend(verify_extensions(cfg, points, betas, tol, exec));
    }
    out
}

fn verify_extensions(
    cfg: &EmbeddingConfig,
    points: &[AmbientPoint],
    betas: &[SigmaField],
    tol: &Tolerances,
    exec: Execution,
) -> Vec<CheckRecord> {
    let prefix = kind_prefix(betas);
    let degrees = [0.0, 1.0, 2.5, -1.5];
    let mut scaling = Comparison::new(Metric::Rel, tol.section);
    let mut euler = Comparison::new(Metric::Rel, tol.homogeneous);
    let mut transverse = Comparison::new(Metric::Abs, tol.section);
    let results = map_collect(exec, points, |pt| {
        let mut out = Vec::new();
        for beta in betas {
            for &deg in &degrees {
                let ext = HomogeneousExtension { cfg: cfg.clone(), field: beta.clone(), degree: deg };
                for &lambda in &OFF_SIGMA_SCALES {
                    out.push((beta.kind(), deg, lambda, extension_defects(&ext, &pt.coords, lambda)));
                }
            }
        }
        out
    });
    for (pt, rows) in points.iter().zip(results) {
        for (kind, deg, lambda, r) in rows {
            let info = || json!({ "point": pt.coords, "degree": deg, "lambda": lambda, "kind": kind });
            match r {
                Ok(d) => {
                    scaling.push(&d.scaling.0, &d.scaling.1, info);
                    let mag = d.scaling.0.iter().fold(1.0f64, |m, v| m.max(v.abs()));
                    euler.push_residual(d.euler / mag, info);
                    if kind == FieldKind::OneForm {
                        transverse.push_residual(d.transversality, info);
                    }
                }
                Err(e) => {
                    scaling.push_failure(e.to_string());
                    euler.push_failure(e.to_string());
                }
            }
        }
    }
    let mut out = vec![
        scaling.finish(
            "sections",
            &format!("{prefix}extension_scaling"),
            "extension is homogeneous under y -> lambda y",
            Some(cfg),
        ),
        euler.finish(
            "sections",
            &format!("{prefix}extension_euler"),
            "Euler relation of the extension off the surface",
            Some(cfg),
        ),
    ];
    if betas.iter().any(|b| b.kind() == FieldKind::OneForm) {
        out.push(transverse.finish(
            "sections",
            &format!("{prefix}extension_transverse"),
            "extended one-form annihilates D",
            Some(cfg),
        ));
    }
    out
}

/// The operator registry exercised by the section suite.
pub fn chi_registry<R: rand::Rng + ?Sized>(rng: &mut R, n: usize, kind: FieldKind, degree: u32) -> Vec<ChiOperator> {
    let g = random_polynomial(rng, n + 1, degree, 4).to_expr();
    let form = match kind {
        FieldKind::Scalar => SigmaField::random_scalar(rng, n, degree, 4),
        FieldKind::OneForm => SigmaField::random_oneform(rng, n, degree, 4),
    };
    vec![
        ChiOperator::Scale { factor: 0.0 },
        ChiOperator::Scale { factor: 1.0 },
        ChiOperator::Scale { factor: -2.5 },
        ChiOperator::MultiplyByRestrictedScalar { g },
        ChiOperator::AddFixed { form },
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ambient::sample_sigma;

    #[test]
    fn quadratic_roots() {
        let s = section_degree(FieldKind::OneForm, 4, Root::Positive);
        assert!((s - (5f64.sqrt() - 1.0) / 2.0).abs() < 1e-15);
        for n in 2..=6 {
            for kind in [FieldKind::Scalar, FieldKind::OneForm] {
                let b = match kind {
                    FieldKind::OneForm => n as f64 - 3.0,
                    FieldKind::Scalar => n as f64 - 1.0,
                };
                for root in [Root::Positive, Root::Negative] {
                    let s = section_degree(kind, n, root);
                    assert!((s * s + b * s - 1.0).abs() < 1e-14);
                    assert_eq!(s > 0.0, root == Root::Positive);
                }
            }
        }
    }

    #[test]
    fn unit_scalar_extension() {
        let cfg = EmbeddingConfig::rn1(2, 1, 1.0).unwrap();
        let ext = extend_scalar(&FieldExpr::constant(1.0), 3.0, &cfg);
        // de Sitter needs y^2 < 0
        let err = ext.eval_jet(&seed_coordinates(&[2.0, 0.3, 0.1])).unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
        let q: f64 = 0.09 - 4.0 - 0.01;
        let v = ext.eval_jet(&seed_coordinates(&[0.3, 2.0, 0.1])).unwrap().value();
        assert!((v - (-q).sqrt().powi(3)).abs() < 1e-12);
        let p = &sample_sigma(&cfg, 1, 1).unwrap()[0].coords;
        assert!((ext.eval_jet(&seed_coordinates(p)).unwrap().value() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn degree_zero_is_dilation_invariant() {
        let cfg = EmbeddingConfig::rn1(3, -1, 0.8).unwrap();
        let rho = FieldExpr::coord(0).mul(&FieldExpr::coord(2)).add(&FieldExpr::coord(1));
        let ext = extend_scalar(&rho, 0.0, &cfg);
        for pt in sample_sigma(&cfg, 3, 3).unwrap() {
            let d = extension_defects(&ext, &pt.coords, 1.7).unwrap();
            assert!(d.euler.abs() < 1e-10);
            assert!((d.scaling.0[0] - d.scaling.1[0]).abs() < 1e-10);
        }
    }

    #[test]
    fn noninteger_power_near_cone_is_refused() {
        let cfg = EmbeddingConfig::sphere(2, 1.0).unwrap();
        let ext = extend_scalar(&FieldExpr::constant(1.0), 0.5, &cfg);
        assert!(ext.eval_jet(&seed_coordinates(&[0.1, 0.1, 0.1])).is_err());
        assert!(ext.eval_jet(&seed_coordinates(&[0.0, 0.0, 0.0])).is_err());
        let int = extend_scalar(&FieldExpr::constant(1.0), 2.0, &cfg);
        assert!(int.eval_jet(&seed_coordinates(&[0.1, 0.1, 0.1])).is_ok());
    }

    #[test]
    fn chi_kinds_must_match() {
        let chi = ChiOperator::AddFixed { form: SigmaField::Scalar { expr: FieldExpr::constant(1.0) } };
        let beta = SigmaField::OneForm { comps: vec![FieldExpr::constant(1.0); 2] };
        assert!(chi.apply(&beta).is_err());
        let cfg = EmbeddingConfig::rn1(2, 1, 1.0).unwrap();
        assert!(section_rn2(&beta, &ChiOperator::Scale { factor: 1.0 }, &cfg, Root::Positive).is_err());
    }
}
