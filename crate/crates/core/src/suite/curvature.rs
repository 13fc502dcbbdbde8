//! Connection, curvature and Weitzenböck checks on `Σ_n`, plus flatness of
//! the ambient frame.

use serde_json::json;

use super::{rng_for, SuiteConfig, TERMS};
use crate::ambient::{AmbientPoint, EmbeddingConfig};
use crate::calculus::{box_compositional, codifferential, exterior_d, wedge, FormValue};
use crate::connection::{
    codifferential_via_connection, curvature, exterior_d_via_connection, laplace_beltrami, laplace_beltrami_scaled,
    levi_civita, ricci_oneform, weitzenboeck_term,
};
use crate::error::Result;
use crate::exec::map_collect;
use crate::expr::{random_polynomial, FieldExpr, OneFormField};
use crate::jets::Jet;
use crate::report::{aggregate, CheckDef, CheckRecord, Metric, Sample};
use crate::restriction::SigmaPoint;

const SUITE: &str = "weitzenboeck";

fn defs(sc: &SuiteConfig) -> Vec<CheckDef> {
    use Metric::{Abs, Rel};
    let t = &sc.tolerances;
    vec![
        CheckDef::new("oneform_residual", "□a − Δa − j^a i^b R(e_a,e_b) a = 0", Rel, t.weitzenboeck),
        CheckDef::new("oneform_ricci", "□a = Δa − r(♯a, ·)", Rel, t.weitzenboeck),
        CheckDef::new("twoform_residual", "□ω − Δω − j^a i^b R(e_a,e_b) ω = 0 on two-forms", Rel, t.weitzenboeck),
        CheckDef::new("scalar", "□φ = Δφ", Rel, t.weitzenboeck_scalar),
        CheckDef::new("constant_curvature_modulus", "|K| = H²", Abs, t.curvature),
        CheckDef::new("constant_curvature_residual", "R_{abcd} − K (g_ac g_bd − g_ad g_bc)", Abs, t.curvature),
        CheckDef::new("bianchi", "first Bianchi identity", Abs, t.curvature),
        CheckDef::new("ricci_symmetry", "r_{ab} = r_{ba}", Abs, t.curvature),
        CheckDef::new("metricity", "ω_{abc} + ω_{bac} = 0", Abs, t.connection),
        CheckDef::new("torsion", "vanishing torsion", Abs, t.connection),
        CheckDef::new("codifferential_connection", "δα = −i^a ∇_a α", Rel, t.connection),
        CheckDef::new("exterior_d_connection", "dα = j^a ∇_a α", Rel, t.connection),
        CheckDef::new("ambient_flat", "ambient frame curvature vanishes", Abs, t.curvature),
        CheckDef::new("ambient_oneform", "□a = Δa in the ambient frame", Rel, t.weitzenboeck),
    ]
}

fn pair(id: &'static str, lhs: Vec<f64>, rhs: Vec<f64>, detail: serde_json::Value) -> Sample {
    Sample::Pair { id, lhs, rhs, detail }
}

fn residual(id: &'static str, value: f64, detail: serde_json::Value) -> Sample {
    Sample::Residual { id, value, detail }
}

fn sum(a: &FormValue, b: &FormValue, s: f64) -> Result<Vec<f64>> {
    Ok(a.values().iter().zip(b.values()).map(|(x, y)| x + s * y).collect())
}

struct Fields {
    oneforms: Vec<OneFormField>,
    scalars: Vec<FieldExpr>,
}

fn point_samples(cfg: &EmbeddingConfig, y: &[f64], fields: &Fields) -> Result<(Vec<Sample>, f64)> {
    let p = SigmaPoint::new(cfg, y)?;
    let sb = &p.sigma;
    let conn = levi_civita(sb);
    let curv = curvature(sb, &conn)?;
    let h2 = cfg.h * cfg.h;
    let mut out = Vec::new();
    let at = json!({ "point": y });

    let (k, fit) = curv.constant_curvature_fit(sb);
    out.push(residual("constant_curvature_modulus", (k.abs() - h2).abs(), at.clone()));
    out.push(residual("constant_curvature_residual", fit, at.clone()));
    out.push(residual("bianchi", curv.bianchi_defect(), at.clone()));
    out.push(residual("ricci_symmetry", curv.ricci_asymmetry(), at.clone()));
    out.push(residual("metricity", conn.metricity_defect(sb), at.clone()));
    out.push(residual("torsion", conn.torsion_defect(sb), at.clone()));

    let fconn = levi_civita(&p.full);
    let fcurv = curvature(&p.full, &fconn)?;
    let kf = p.full.rank();
    let mut flat = 0.0f64;
    for a in 0..kf {
        for b in 0..kf {
            for c in 0..kf {
                for d in 0..kf {
                    flat = flat.max(fcurv.riemann(a, b, c, d).abs());
                }
            }
        }
    }
    out.push(residual("ambient_flat", flat, at.clone()));

    let cart = |a: &OneFormField| -> Result<Vec<Jet>> { a.comps.iter().map(|c| c.eval(&p.seeds)).collect() };
    for (fi, a) in fields.oneforms.iter().enumerate() {
        let detail = json!({ "point": y, "field": fi, "expr": a });
        let comps = cart(a)?;
        let alpha = p.sigma_form(&comps)?;
        let boxed = box_compositional(sb, &alpha)?;
        let lb = laplace_beltrami(sb, &conn, &alpha)?;
        let w = weitzenboeck_term(sb, &curv, &alpha)?;
        out.push(pair("oneform_residual", boxed.values(), sum(&lb, &w, 1.0)?, detail.clone()));
        let ric = ricci_oneform(sb, &curv, &alpha)?;
        out.push(pair("oneform_ricci", boxed.values(), sum(&lb, &ric, -1.0)?, detail.clone()));
        out.push(pair(
            "codifferential_connection",
            codifferential(sb, &alpha)?.values(),
            codifferential_via_connection(sb, &conn, &alpha)?.values(),
            detail.clone(),
        ));
        out.push(pair(
            "exterior_d_connection",
            exterior_d(sb, &alpha)?.values(),
            exterior_d_via_connection(sb, &conn, &alpha)?.values(),
            detail.clone(),
        ));

        let full = FormValue::one_form(&p.full, p.full.components_of(&comps))?;
        let boxed = box_compositional(&p.full, &full)?;
        let (lb, scale) = laplace_beltrami_scaled(&p.full, &fconn, &full)?;
        out.push(Sample::Scaled {
            id: "ambient_oneform",
            lhs: boxed.values(),
            rhs: lb.values(),
            scale,
            detail: detail.clone(),
        });

        // two-form built from this field and the next one
        let b = &fields.oneforms[(fi + 1) % fields.oneforms.len()];
        let omega = wedge(sb, &alpha, &p.sigma_form(&cart(b)?)?)?;
        let boxed = box_compositional(sb, &omega)?;
        let lb = laplace_beltrami(sb, &conn, &omega)?;
        let w = weitzenboeck_term(sb, &curv, &omega)?;
        out.push(pair("twoform_residual", boxed.values(), sum(&lb, &w, 1.0)?, detail));
    }
    for (fi, s) in fields.scalars.iter().enumerate() {
        let phi = FormValue::scalar(sb, s.eval(&p.seeds)?);
        let boxed = box_compositional(sb, &phi)?;
        let lb = laplace_beltrami(sb, &conn, &phi)?;
        out.push(pair("scalar", boxed.values(), lb.values(), json!({ "point": y, "field": fi, "expr": s })));
    }
    Ok((out, k))
}

pub(super) fn run_geometry(cfg: &EmbeddingConfig, points: &[AmbientPoint], sc: &SuiteConfig) -> Vec<CheckRecord> {
    let mut rng = rng_for(sc.seed, &format!("{SUITE}/{}/fields", cfg.label()));
    let d = cfg.dim();
    let fields = Fields {
        oneforms: (0..sc.fields).map(|_| OneFormField::random(&mut rng, d, sc.field_degree, TERMS)).collect(),
        scalars: (0..sc.fields).map(|_| random_polynomial(&mut rng, d, sc.field_degree, TERMS).to_expr()).collect(),
    };
    let results = map_collect(sc.execution, points, |pt| point_samples(cfg, &pt.coords, &fields));
    let mut samples = Vec::with_capacity(results.len());
    let mut fitted = Vec::new();
    for (r, pt) in results.into_iter().zip(points) {
        match r {
            Ok((s, k)) => {
                samples.push(s);
                fitted.push(k);
            }
            Err(e) => samples.push(vec![Sample::Failure(format!("at {:?}: {e}", pt.coords))]),
        }
    }
    let mean_k = if fitted.is_empty() { f64::NAN } else { fitted.iter().sum::<f64>() / fitted.len() as f64 };
    aggregate(SUITE, Some(cfg), &defs(sc), &samples)
        .into_iter()
        .map(|r| if r.check.starts_with("constant_curvature") { r.with_info("K", mean_k) } else { r })
        .collect()
}
