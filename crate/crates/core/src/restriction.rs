//! Restriction of ambient Laplace–de Rham operators to `Σ_n`.
//!
//! The left-hand side is always the flat operator in Cartesian coordinates,
//! `(□a)_B = η^{CC} ∂_C ∂_C a_B`, pulled back with the tangent frame
//! vectors. Right-hand sides go through the intrinsic operator of `Σ_n`
//! (frame formula on the tangent sub-basis) plus an additional term built
//! from Lie derivatives along `D`, `D_P` and `F`.

use serde_json::json;

use crate::ambient::{AffineField, AmbientKind, AmbientPoint, EmbeddingConfig};
use crate::calculus::{
    box_compositional, box_frame_oneform, box_frame_oneform_terms, box_frame_scalar, Basis, FormValue,
};
use crate::connection::{curvature, laplace_beltrami, levi_civita, ricci_oneform};
use crate::error::{Error, Result};
use crate::exec::{map_collect, Execution};
use crate::expr::{FieldExpr, OneFormField, OneFormSource, ScalarSource};
use crate::frames::{adapted_frame, anholonomy, Anholonomy, FrameField};
use crate::jets::{seed_coordinates, Jet};
use crate::report::{CheckRecord, Comparison, Metric, Tolerances};

pub type RestrictionReport = CheckRecord;

/// Everything needed at one point of `Σ_n`: frame, structure coefficients
/// and the ambient and intrinsic bases.
#[derive(Debug, Clone)]
pub struct SigmaPoint {
    pub cfg: EmbeddingConfig,
    pub y: Vec<f64>,
    pub seeds: Vec<Jet>,
    pub frame: FrameField,
    pub anholonomy: Anholonomy,
    pub full: Basis,
    pub sigma: Basis,
}

impl SigmaPoint {
    pub fn new(cfg: &EmbeddingConfig, y: &[f64]) -> Result<Self> {
        let frame = adapted_frame(cfg, y)?;
        let c = anholonomy(&frame)?;
        let full = Basis::frame(&frame, &c);
        let sigma = full.leading(cfg.n);
        Ok(Self { cfg: cfg.clone(), y: y.to_vec(), seeds: seed_coordinates(y), frame, anholonomy: c, full, sigma })
    }

    /// `(a_Σ)_μ = a_B e_μ^B` for Cartesian component values.
    pub fn pullback(&self, cartesian: &[f64]) -> Vec<f64> {
        (0..self.cfg.n).map(|mu| self.frame.e[mu].iter().zip(cartesian).map(|(e, a)| e.value() * a).sum()).collect()
    }

    /// The pulled-back one-form as a form on `Σ_n`, with jet components.
    pub fn sigma_form(&self, cartesian: &[Jet]) -> Result<FormValue> {
        FormValue::one_form(&self.sigma, self.sigma.components_of(cartesian))
    }

    /// `D(f) = y^A ∂_A f`
    pub fn dilation(&self, f: &Jet) -> Result<Jet> {
        f.directional(&self.seeds)
    }

    /// `F(f) = eps H ∂_{n+1} f` (`R^{n+2}` only).
    pub fn f_derivative(&self, f: &Jet) -> Result<Jet> {
        if self.cfg.ambient != AmbientKind::Rn2 {
            return Err(Error::WrongAmbient("F exists only in R^{n+2}"));
        }
        Ok(f.partial(self.cfg.n + 1)?.scale(self.cfg.eps_f() * self.cfg.h))
    }

    /// `-eps H^2`, the prefactor of the additional terms.
    fn k(&self) -> f64 {
        -self.cfg.eps_f() * self.cfg.h * self.cfg.h
    }
}

/// Flat `□` on Cartesian one-form components, `η^{CC} ∂_C ∂_C a_B`.
pub fn flat_box_oneform(cfg: &EmbeddingConfig, a: &[Jet]) -> Vec<f64> {
    a.iter().map(|ab| flat_box_scalar(cfg, ab)).collect()
}

pub fn flat_box_scalar(cfg: &EmbeddingConfig, phi: &Jet) -> f64 {
    (0..cfg.dim()).map(|c| cfg.metric.sign(c) * phi.hess(c, c)).sum()
}

/// `(□a)_Σ - □_Σ a_Σ`, the additional term actually produced by `a`, with the
/// magnitude of the larger of the two operators it is the difference of.
pub fn measured_additional_term_oneform(p: &SigmaPoint, a: &[Jet]) -> Result<(Vec<f64>, f64)> {
    let lhs = p.pullback(&flat_box_oneform(&p.cfg, a));
    let boxed = box_frame_oneform(&p.sigma, &p.sigma_form(a)?)?.values();
    let at = lhs.iter().zip(&boxed).map(|(l, b)| l - b).collect();
    Ok((at, magnitude(&[&lhs, &boxed])))
}

pub fn measured_additional_term_scalar(p: &SigmaPoint, phi: &Jet) -> Result<(f64, f64)> {
    let (lhs, boxed) = (flat_box_scalar(&p.cfg, phi), box_frame_scalar(&p.sigma, phi)?);
    Ok((lhs - boxed, lhs.abs().max(boxed.abs())))
}

/// Cartesian components of `d f`.
fn gradient_form(f: &Jet) -> Result<Vec<Jet>> {
    (0..f.dim()).map(|k| f.partial(k)).collect()
}

/// `i_v a` for an affine field `v` and Cartesian components.
fn contract(v: &AffineField, a: &[Jet], seeds: &[Jet]) -> Jet {
    let vj = v.jets(seeds);
    let mut acc = Jet::zero(seeds[0].dim());
    for (vi, ai) in vj.iter().zip(a) {
        acc.add_product(1.0, vi, ai);
    }
    acc
}

fn values(js: &[Jet]) -> Vec<f64> {
    js.iter().map(Jet::value).collect()
}

fn combine(terms: &[(f64, &[f64])]) -> Vec<f64> {
    let len = terms[0].1.len();
    (0..len).map(|i| terms.iter().map(|(s, v)| s * v[i]).sum()).collect()
}

/// Largest magnitude over several component vectors.
fn magnitude(parts: &[&[f64]]) -> f64 {
    parts.iter().flat_map(|v| v.iter()).fold(0.0, |m, x| m.max(x.abs()))
}

fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// `-eps H^2 [L_v^2 + (n-3) L_v + 2 d i_v] a` in Cartesian components.
fn lie_bracket_term(p: &SigmaPoint, v: &AffineField, a: &[Jet]) -> Result<Vec<f64>> {
    let n = p.cfg.n as f64;
    let la = v.lie_oneform(a, &p.seeds)?;
    let lla = v.lie_oneform(&la, &p.seeds)?;
    let di = gradient_form(&contract(v, a, &p.seeds))?;
    let cart = combine(&[(1.0, &values(&lla)), (n - 3.0, &values(&la)), (2.0, &values(&di))]);
    Ok(cart.into_iter().map(|x| p.k() * x).collect())
}

/// All routes for a one-form restricted from `R^{n+1}` at one point.
#[derive(Debug, Clone)]
pub struct Rn1FormEval {
    pub lhs: Vec<f64>,
    /// `□_Σ a_Σ` by the nine-term frame formula on the tangent sub-basis.
    pub box_sigma: Vec<f64>,
    pub box_sigma_compositional: Vec<f64>,
    /// Additional term with frame-component derivatives.
    pub at_frame: Vec<f64>,
    /// Additional term with Lie derivatives along `D`.
    pub at_intrinsic: Vec<f64>,
    /// Normal-index parts of the nine terms of the ambient frame formula.
    pub normal_terms: [Vec<f64>; 9],
    /// Closed forms of the nine normal-index parts after using the frame
    /// structure on `Σ_n`.
    pub normal_terms_expected: [Vec<f64>; 9],
    pub normal_expected: Vec<f64>,
    pub beltrami_sigma: Vec<f64>,
    pub ricci_sigma: Vec<f64>,
    pub a_sigma: Vec<f64>,
    /// `e_μ(i_D a)`
    pub grad_contraction: Vec<f64>,
}

impl Rn1FormEval {
    pub fn normal_sum(&self) -> Vec<f64> {
        let k = self.normal_terms[0].len();
        (0..k).map(|a| self.normal_terms.iter().map(|t| t[a]).sum()).collect()
    }

    /// Reduced additional term for `a` with components homogeneous of degree
    /// `r`: `-eps H^2 [(r+1)(r+n-2) a_Σ + 2 d_Σ(i_D a)]`.
    pub fn homogeneous_at(&self, cfg: &EmbeddingConfig, r: f64) -> Vec<f64> {
        let n = cfg.n as f64;
        let k = -cfg.eps_f() * cfg.h * cfg.h;
        self.a_sigma
            .iter()
            .zip(&self.grad_contraction)
            .map(|(a, g)| k * ((r + 1.0) * (r + n - 2.0) * a + 2.0 * g))
            .collect()
    }
}

pub fn rn1_oneform(p: &SigmaPoint, a: &[Jet]) -> Result<Rn1FormEval> {
    let cfg = &p.cfg;
    let n = cfg.n;
    let nf = n as f64;
    let lhs = p.pullback(&flat_box_oneform(cfg, a));
    let a_sig = p.sigma_form(a)?;
    let box_sigma = box_frame_oneform(&p.sigma, &a_sig)?.values();
    let box_sigma_compositional = box_compositional(&p.sigma, &a_sig)?.values();

    let dil = AffineField::dilation(cfg.dim());
    let i_d = contract(&dil, a, &p.seeds);
    let mut at_frame = Vec::with_capacity(n);
    let mut grad_contraction = Vec::with_capacity(n);
    let mut d1 = Vec::with_capacity(n);
    let mut d2 = Vec::with_capacity(n);
    for (mu, a_mu) in a_sig.components().iter().enumerate() {
        let da = p.dilation(a_mu)?;
        let dda = p.dilation(&da)?;
        let g = p.full.derive(mu, &i_d)?.value();
        at_frame.push(p.k() * (dda.value() + (nf - 1.0) * da.value() + 2.0 * g + (nf - 2.0) * a_mu.value()));
        grad_contraction.push(g);
        d1.push(da.value());
        d2.push(dda.value());
    }
    let at_intrinsic = p.pullback(&lie_bracket_term(p, &dil, a)?);

    let a_full = FormValue::one_form(&p.full, p.full.components_of(a))?;
    let terms = box_frame_oneform_terms(&p.full, &a_full, n)?;
    let normal_terms: [Vec<f64>; 9] = std::array::from_fn(|m| terms.remainder(m)[..n].to_vec());
    // closed forms with K = eps / |y^2|
    let kk = -p.k();
    let a_vals = values(a_sig.components());
    let per = |f: &dyn Fn(usize) -> f64| (0..n).map(f).collect::<Vec<f64>>();
    let normal_terms_expected: [Vec<f64>; 9] = [
        per(&|m| -kk * (d2[m] - d1[m])),
        per(&|m| -kk * grad_contraction[m]),
        per(&|m| -kk * d1[m]),
        per(&|m| kk * (d1[m] - grad_contraction[m])),
        per(&|m| -kk * nf * d1[m]),
        per(&|m| kk * a_vals[m]),
        per(&|m| -kk * nf * a_vals[m]),
        per(&|_| 0.0),
        per(&|m| kk * a_vals[m]),
    ];
    let normal_expected = at_frame.clone();

    let conn = levi_civita(&p.sigma);
    let curv = curvature(&p.sigma, &conn)?;
    let beltrami_sigma = laplace_beltrami(&p.sigma, &conn, &a_sig)?.values();
    let ricci_sigma = ricci_oneform(&p.sigma, &curv, &a_sig)?.values();

    Ok(Rn1FormEval {
        lhs,
        box_sigma,
        box_sigma_compositional,
        at_frame,
        at_intrinsic,
        normal_terms,
        normal_terms_expected,
        normal_expected,
        beltrami_sigma,
        ricci_sigma,
        a_sigma: a_vals,
        grad_contraction,
    })
}

#[derive(Debug, Clone)]
pub struct ScalarEval {
    pub lhs: f64,
    pub box_sigma: f64,
    pub box_sigma_compositional: f64,
    pub phi: f64,
    /// `D φ`, `D^2 φ`
    pub d1: f64,
    pub d2: f64,
    /// `F φ`, `F D φ`, `D F φ` (zero in `R^{n+1}`)
    pub f1: f64,
    pub fd: f64,
    pub df: f64,
}

pub fn scalar_eval(p: &SigmaPoint, phi: &Jet) -> Result<ScalarEval> {
    let lhs = flat_box_scalar(&p.cfg, phi);
    let box_sigma = box_frame_scalar(&p.sigma, phi)?;
    let box_sigma_compositional = box_compositional(&p.sigma, &FormValue::scalar(&p.sigma, phi.clone()))?.values()[0];
    let d1j = p.dilation(phi)?;
    let d2 = p.dilation(&d1j)?.value();
    let (f1, fd, df) = if p.cfg.ambient == AmbientKind::Rn2 {
        let fj = p.f_derivative(phi)?;
        (fj.value(), p.f_derivative(&d1j)?.value(), p.dilation(&fj)?.value())
    } else {
        (0.0, 0.0, 0.0)
    };
    Ok(ScalarEval { lhs, box_sigma, box_sigma_compositional, phi: phi.value(), d1: d1j.value(), d2, f1, fd, df })
}

impl ScalarEval {
    /// `-eps H^2 [D^2 φ + (n-1) D φ]`
    pub fn at_dilation(&self, cfg: &EmbeddingConfig) -> f64 {
        -cfg.eps_f() * cfg.h * cfg.h * (self.d2 + (cfg.n as f64 - 1.0) * self.d1)
    }

    /// `2 F D φ + (n-2) F φ`
    pub fn at_fd(&self, cfg: &EmbeddingConfig) -> f64 {
        2.0 * self.fd + (cfg.n as f64 - 2.0) * self.f1
    }

    /// `2 D F φ + (n+2) F φ`, the swapped form obtained with `[F, D] = 2F`.
    pub fn at_df_literal(&self, cfg: &EmbeddingConfig) -> f64 {
        2.0 * self.df + (cfg.n as f64 + 2.0) * self.f1
    }

    /// `2 D F φ + n F φ`, the swapped form obtained with `[F, D] = F`.
    pub fn at_df_commutator(&self, cfg: &EmbeddingConfig) -> f64 {
        2.0 * self.df + cfg.n as f64 * self.f1
    }

    /// `-eps H^2 r (r+n-1) φ`, plus `(2r+n-2) F φ` in `R^{n+2}`.
    pub fn homogeneous_at(&self, cfg: &EmbeddingConfig, r: f64) -> f64 {
        let n = cfg.n as f64;
        -cfg.eps_f() * cfg.h * cfg.h * r * (r + n - 1.0) * self.phi + (2.0 * r + n - 2.0) * self.f1
    }
}

/// All routes for a one-form restricted from `R^{n+2}` at one point.
#[derive(Debug, Clone)]
pub struct Rn2FormEval {
    pub lhs: Vec<f64>,
    pub box_sigma: Vec<f64>,
    pub at_extended: Vec<f64>,
    pub at_intrinsic: Vec<f64>,
    pub at_swapped_literal: Vec<f64>,
    pub at_swapped_commutator: Vec<f64>,
    pub beltrami_sigma: Vec<f64>,
    pub ricci_sigma: Vec<f64>,
}

pub fn rn2_oneform(p: &SigmaPoint, a: &[Jet]) -> Result<Rn2FormEval> {
    let cfg = &p.cfg;
    if cfg.ambient != AmbientKind::Rn2 {
        return Err(Error::WrongAmbient("R^{n+2} restriction on an R^{n+1} geometry"));
    }
    let n = cfg.n as f64;
    let v = cfg.n + 1;
    let lhs = p.pullback(&flat_box_oneform(cfg, a));
    let a_sig = p.sigma_form(a)?;
    let box_sigma = box_frame_oneform(&p.sigma, &a_sig)?.values();

    // extended frame: eps ∂²_{n+1} a_μ e^μ - eps H² (L²_{D_P} + (n-3) L_{D_P} + 2 d i_{D_P}) a
    let dp = AffineField::plane_dilation(cfg);
    let vertical: Vec<f64> = a.iter().map(|ab| cfg.eps_f() * ab.hess(v, v)).collect();
    let at_extended = p.pullback(&add(&vertical, &lie_bracket_term(p, &dp, a)?));

    let dil = AffineField::dilation(cfg.dim());
    let f = AffineField::f_field(cfg)?;
    let base = lie_bracket_term(p, &dil, a)?;
    let ld = dil.lie_oneform(a, &p.seeds)?;
    let lf = f.lie_oneform(a, &p.seeds)?;
    let lf_ld = values(&f.lie_oneform(&ld, &p.seeds)?);
    let ld_lf = values(&dil.lie_oneform(&lf, &p.seeds)?);
    let di_f = values(&gradient_form(&contract(&f, a, &p.seeds))?);
    let lf = values(&lf);
    let at_intrinsic = p.pullback(&combine(&[(1.0, &base), (2.0, &lf_ld), (n - 4.0, &lf), (2.0, &di_f)]));
    let at_swapped_literal = p.pullback(&combine(&[(1.0, &base), (2.0, &ld_lf), (n, &lf), (2.0, &di_f)]));
    let at_swapped_commutator = p.pullback(&combine(&[(1.0, &base), (2.0, &ld_lf), (n - 2.0, &lf), (2.0, &di_f)]));

    let conn = levi_civita(&p.sigma);
    let curv = curvature(&p.sigma, &conn)?;
    let beltrami_sigma = laplace_beltrami(&p.sigma, &conn, &a_sig)?.values();
    let ricci_sigma = ricci_oneform(&p.sigma, &curv, &a_sig)?.values();
    Ok(Rn2FormEval {
        lhs,
        box_sigma,
        at_extended,
        at_intrinsic,
        at_swapped_literal,
        at_swapped_commutator,
        beltrami_sigma,
        ricci_sigma,
    })
}

/// Fields exercised by the restriction checks in one geometry.
#[derive(Debug, Clone, Default)]
pub struct RestrictionFields {
    pub oneforms: Vec<OneFormField>,
    pub scalars: Vec<FieldExpr>,
    /// Transverse one-forms with components homogeneous of the given degree.
    pub transverse: Vec<(OneFormField, u32)>,
    /// Scalars homogeneous of the given degree.
    pub homogeneous: Vec<(FieldExpr, u32)>,
}

struct PointEvals {
    y: Vec<f64>,
    rn1_forms: Vec<Rn1FormEval>,
    rn2_forms: Vec<Rn2FormEval>,
    scalars: Vec<ScalarEval>,
    transverse: Vec<Rn1FormEval>,
    homogeneous: Vec<ScalarEval>,
}

fn evaluate_point(cfg: &EmbeddingConfig, y: &[f64], fields: &RestrictionFields) -> Result<PointEvals> {
    let p = SigmaPoint::new(cfg, y)?;
    let rn2 = cfg.ambient == AmbientKind::Rn2;
    let mut out = PointEvals {
        y: y.to_vec(),
        rn1_forms: Vec::new(),
        rn2_forms: Vec::new(),
        scalars: Vec::new(),
        transverse: Vec::new(),
        homogeneous: Vec::new(),
    };
    for field in &fields.oneforms {
        let a = field.eval_components(&p.seeds)?;
        if rn2 {
            out.rn2_forms.push(rn2_oneform(&p, &a)?);
        } else {
            out.rn1_forms.push(rn1_oneform(&p, &a)?);
        }
    }
    for phi in &fields.scalars {
        out.scalars.push(scalar_eval(&p, &phi.eval_jet(&p.seeds)?)?);
    }
    if !rn2 {
        for (field, _) in &fields.transverse {
            out.transverse.push(rn1_oneform(&p, &field.eval_components(&p.seeds)?)?);
        }
    }
    for (phi, _) in &fields.homogeneous {
        out.homogeneous.push(scalar_eval(&p, &phi.eval_jet(&p.seeds)?)?);
    }
    Ok(out)
}

struct Check {
    id: &'static str,
    label: &'static str,
    cmp: Comparison,
    note: Option<&'static str>,
    gating: bool,
}

impl Check {
    fn new(id: &'static str, label: &'static str, metric: Metric, tol: f64) -> Self {
        Self { id, label, cmp: Comparison::new(metric, tol), note: None, gating: true }
    }
}

fn detail(y: &[f64], field: usize, expr: &impl serde::Serialize, lhs: &[f64], rhs: &[f64]) -> serde_json::Value {
    json!({ "point": y, "field": field, "expr": expr, "lhs": lhs, "rhs": rhs })
}

/// Runs every restriction check for one geometry over the given points.
pub fn verify(
    cfg: &EmbeddingConfig,
    points: &[AmbientPoint],
    fields: &RestrictionFields,
    tol: &Tolerances,
    exec: Execution,
) -> Vec<RestrictionReport> {
    let evals = map_collect(exec, points, |p| evaluate_point(cfg, &p.coords, fields));
    let rn2 = cfg.ambient == AmbientKind::Rn2;
    let rel = Metric::Rel;
    let mut checks: Vec<Check> = if rn2 {
        vec![
            Check::new("rn2_form_extended", "R^{n+2} one-form, extended-frame form", rel, tol.restriction),
            Check::new("rn2_form_intrinsic", "R^{n+2} one-form, intrinsic form with L_F L_D", rel, tol.restriction),
            Check::new(
                "rn2_form_intrinsic_swapped",
                "R^{n+2} one-form, intrinsic form with L_D L_F and n L_F",
                rel,
                tol.restriction,
            ),
            Check::new(
                "rn2_form_intrinsic_swapped_commutator",
                "R^{n+2} one-form, intrinsic form with L_D L_F and (n-2) L_F",
                rel,
                tol.restriction,
            ),
            Check::new(
                "rn2_form_routes_extended_intrinsic",
                "extended-frame vs intrinsic additional term",
                rel,
                tol.routes,
            ),
            Check::new("rn2_form_routes_swapped", "intrinsic vs swapped additional term (n L_F)", rel, tol.routes),
            Check::new("rn2_form_beltrami", "R^{n+2} one-form, Laplace-Beltrami version", rel, tol.restriction),
            Check::new("rn2_scalar", "R^{n+2} scalar, 2FD + (n-2)F form", rel, tol.restriction),
            Check::new("rn2_scalar_swapped", "R^{n+2} scalar, 2DF + (n+2)F form", rel, tol.restriction),
            Check::new("rn2_scalar_swapped_commutator", "R^{n+2} scalar, 2DF + nF form", rel, tol.restriction),
            Check::new("rn2_scalar_routes_swapped", "FD vs swapped (n+2) scalar additional term", rel, tol.routes),
            Check::new("rn2_scalar_homogeneous", "R^{n+2} homogeneous scalar reduction", rel, tol.homogeneous),
        ]
    } else {
        vec![
            Check::new("rn1_form_frame", "R^{n+1} one-form, frame-derivative form", rel, tol.restriction),
            Check::new("rn1_form_intrinsic", "R^{n+1} one-form, Lie-derivative form", rel, tol.restriction),
            Check::new("rn1_form_routes", "frame-derivative vs Lie-derivative additional term", rel, tol.routes),
            Check::new("rn1_form_beltrami", "R^{n+1} one-form, Laplace-Beltrami version", rel, tol.restriction),
            Check::new("rn1_normal_terms_audit", "normal-index terms of the frame formula, summed", rel, tol.audit),
            Check::new("rn1_scalar", "R^{n+1} scalar", rel, tol.restriction),
            Check::new(
                "rn1_form_homogeneous",
                "R^{n+1} transverse homogeneous one-form reduction",
                rel,
                tol.homogeneous,
            ),
            Check::new("rn1_scalar_homogeneous", "R^{n+1} homogeneous scalar reduction", rel, tol.homogeneous),
        ]
    };
    const TERM_IDS: [&str; 9] = [
        "rn1_normal_term_1",
        "rn1_normal_term_2",
        "rn1_normal_term_3",
        "rn1_normal_term_4",
        "rn1_normal_term_5",
        "rn1_normal_term_6",
        "rn1_normal_term_7",
        "rn1_normal_term_8",
        "rn1_normal_term_9",
    ];
    let mut term_checks: Vec<Check> = if rn2 {
        Vec::new()
    } else {
        TERM_IDS
            .iter()
            .map(|id| {
                let mut c = Check::new(id, "single normal-index term against its closed form", rel, tol.audit);
                c.gating = false;
                c
            })
            .collect()
    };
    let find = |checks: &[Check], id: &str| checks.iter().position(|c| c.id == id).expect("known check id");

    for e in &evals {
        let e = match e {
            Ok(e) => e,
            Err(err) => {
                for c in checks.iter_mut() {
                    c.cmp.push_failure(err.to_string());
                }
                continue;
            }
        };
        let y = &e.y;
        if rn2 {
            for (fi, f) in e.rn2_forms.iter().enumerate() {
                let sum = |at: &[f64]| (add(&f.box_sigma, at), magnitude(&[&f.box_sigma, at]));
                let (ext, ext_s) = sum(&f.at_extended);
                let (int, int_s) = sum(&f.at_intrinsic);
                let (swl, swl_s) = sum(&f.at_swapped_literal);
                let (swc, swc_s) = sum(&f.at_swapped_commutator);
                let bel = combine(&[(1.0, &f.beltrami_sigma), (1.0, &f.at_intrinsic), (-1.0, &f.ricci_sigma)]);
                let bel_s = magnitude(&[&f.beltrami_sigma, &f.at_intrinsic, &f.ricci_sigma]);
                // (id, lhs, rhs, largest summand on the right)
                let pairs: [(&str, &[f64], Vec<f64>, f64); 7] = [
                    ("rn2_form_extended", &f.lhs, ext, ext_s),
                    ("rn2_form_intrinsic", &f.lhs, int, int_s),
                    ("rn2_form_intrinsic_swapped", &f.lhs, swl, swl_s),
                    ("rn2_form_intrinsic_swapped_commutator", &f.lhs, swc, swc_s),
                    ("rn2_form_routes_extended_intrinsic", &f.at_extended, f.at_intrinsic.clone(), 0.0),
                    ("rn2_form_routes_swapped", &f.at_intrinsic, f.at_swapped_literal.clone(), 0.0),
                    ("rn2_form_beltrami", &f.lhs, bel, bel_s),
                ];
                for (id, l, r, scale) in pairs {
                    let i = find(&checks, id);
                    checks[i].cmp.push_scaled(l, &r, scale, || detail(y, fi, &fields.oneforms[fi], l, &r));
                }
            }
            for (fi, s) in e.scalars.iter().enumerate() {
                let (bx, dil) = (s.box_sigma, s.at_dilation(cfg));
                let (fd, dfl, dfc) = (s.at_fd(cfg), s.at_df_literal(cfg), s.at_df_commutator(cfg));
                let scale = |t: f64| magnitude(&[&[bx, dil, t]]);
                let pairs = [
                    ("rn2_scalar", s.lhs, bx + dil + fd, scale(fd)),
                    ("rn2_scalar_swapped", s.lhs, bx + dil + dfl, scale(dfl)),
                    ("rn2_scalar_swapped_commutator", s.lhs, bx + dil + dfc, scale(dfc)),
                    ("rn2_scalar_routes_swapped", fd, dfl, 0.0),
                ];
                for (id, l, r, scale) in pairs {
                    let i = find(&checks, id);
                    checks[i].cmp.push_scaled(&[l], &[r], scale, || detail(y, fi, &fields.scalars[fi], &[l], &[r]));
                }
            }
        } else {
            for (fi, f) in e.rn1_forms.iter().enumerate() {
                let (frm, frm_s) = (add(&f.box_sigma, &f.at_frame), magnitude(&[&f.box_sigma, &f.at_frame]));
                let (int, int_s) = (add(&f.box_sigma, &f.at_intrinsic), magnitude(&[&f.box_sigma, &f.at_intrinsic]));
                let bel = combine(&[(1.0, &f.beltrami_sigma), (1.0, &f.at_intrinsic), (-1.0, &f.ricci_sigma)]);
                let bel_s = magnitude(&[&f.beltrami_sigma, &f.at_intrinsic, &f.ricci_sigma]);
                let terms: Vec<&[f64]> = f.normal_terms.iter().map(Vec::as_slice).collect();
                let pairs: [(&str, &[f64], Vec<f64>, f64); 5] = [
                    ("rn1_form_frame", &f.lhs, frm, frm_s),
                    ("rn1_form_intrinsic", &f.lhs, int, int_s),
                    ("rn1_form_routes", &f.at_frame, f.at_intrinsic.clone(), 0.0),
                    ("rn1_form_beltrami", &f.lhs, bel, bel_s),
                    ("rn1_normal_terms_audit", &f.normal_expected, f.normal_sum(), magnitude(&terms)),
                ];
                for (id, l, r, scale) in pairs {
                    let i = find(&checks, id);
                    checks[i].cmp.push_scaled(l, &r, scale, || detail(y, fi, &fields.oneforms[fi], l, &r));
                }
                for (m, tc) in term_checks.iter_mut().enumerate() {
                    let (l, r) = (&f.normal_terms_expected[m], &f.normal_terms[m]);
                    tc.cmp.push(l, r, || detail(y, fi, &fields.oneforms[fi], l, r));
                }
            }
            for (fi, s) in e.scalars.iter().enumerate() {
                let (bx, dil) = (s.box_sigma, s.at_dilation(cfg));
                let (l, r) = (s.lhs, bx + dil);
                let i = find(&checks, "rn1_scalar");
                checks[i].cmp.push_scaled(&[l], &[r], magnitude(&[&[bx, dil]]), || {
                    detail(y, fi, &fields.scalars[fi], &[l], &[r])
                });
            }
            for (fi, (f, (_, r))) in e.transverse.iter().zip(&fields.transverse).enumerate() {
                let at = f.homogeneous_at(cfg, *r as f64);
                let rhs = add(&f.box_sigma, &at);
                let i = find(&checks, "rn1_form_homogeneous");
                let scale = magnitude(&[&f.box_sigma, &at]);
                checks[i]
                    .cmp
                    .push_scaled(&f.lhs, &rhs, scale, || detail(y, fi, &fields.transverse[fi].0, &f.lhs, &rhs));
            }
        }
        let id = if rn2 { "rn2_scalar_homogeneous" } else { "rn1_scalar_homogeneous" };
        for (fi, (s, (_, r))) in e.homogeneous.iter().zip(&fields.homogeneous).enumerate() {
            let (bx, at) = (s.box_sigma, s.homogeneous_at(cfg, *r as f64));
            let (l, rr) = (s.lhs, bx + at);
            let i = find(&checks, id);
            checks[i].cmp.push_scaled(&[l], &[rr], magnitude(&[&[bx, at]]), || {
                detail(y, fi, &fields.homogeneous[fi].0, &[l], &[rr])
            });
        }
    }

    let notes: [(&str, &str); 4] = [
        ("rn2_form_intrinsic_swapped", "swap derived with [F,D] = 2F"),
        ("rn2_scalar_swapped", "swap derived with [F,D] = 2F"),
        ("rn2_form_intrinsic_swapped_commutator", "swap derived with [F,D] = F"),
        ("rn2_scalar_swapped_commutator", "swap derived with [F,D] = F"),
    ];
    for (id, note) in notes {
        if let Some(c) = checks.iter_mut().find(|c| c.id == id) {
            c.note = Some(note);
        }
    }
    checks
        .into_iter()
        .chain(term_checks)
        .filter(|c| c.cmp.max_abs().is_finite() || !c.cmp.passes())
        .map(|c| {
            let mut rec = c.cmp.finish("restriction", c.id, c.label, Some(cfg));
            rec.note = c.note.map(str::to_string);
            if !c.gating {
                rec = rec.informational();
            }
            rec
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ambient::sample_sigma;
    use crate::calculus::BasisTag;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn conormal_is_killed_by_pullback() {
        let cfg = EmbeddingConfig::rn1(3, -1, 1.0).unwrap();
        let y = &sample_sigma(&cfg, 4, 1).unwrap()[0].coords;
        let p = SigmaPoint::new(&cfg, y).unwrap();
        // ỹ_B = η_BB y^B
        let lowered = cfg.metric.lower(y);
        assert!(p.pullback(&lowered).iter().all(|v| v.abs() < 1e-12));
        // e^0 in Cartesian components is θ^0_B
        let theta0: Vec<f64> = p.frame.theta[0].iter().map(Jet::value).collect();
        let pb = p.pullback(&theta0);
        assert!((pb[0] - 1.0).abs() < 1e-12 && pb[1].abs() < 1e-12 && pb[2].abs() < 1e-12);
    }

    #[test]
    fn flat_lhs_matches_compositional_box() {
        let cfg = EmbeddingConfig::rn2(2, 1, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let field = OneFormField::random(&mut rng, 4, 3, 5);
        let y = &sample_sigma(&cfg, 1, 1).unwrap()[0].coords;
        let a = field.eval_components(&seed_coordinates(y)).unwrap();
        let basis = Basis::coordinate(&cfg.metric);
        assert_eq!(basis.tag(), BasisTag::Coordinate);
        let comp = box_compositional(&basis, &FormValue::one_form(&basis, a.clone()).unwrap()).unwrap();
        let flat = flat_box_oneform(&cfg, &a);
        for (x, y) in comp.values().iter().zip(&flat) {
            assert!((x - y).abs() < 1e-11);
        }
    }

    #[test]
    fn constant_field_on_round_sphere() {
        let cfg = EmbeddingConfig::sphere(2, 1.0).unwrap();
        let field =
            OneFormField::new(vec![FieldExpr::constant(0.3), FieldExpr::constant(-1.2), FieldExpr::constant(0.5)]);
        for pt in sample_sigma(&cfg, 2, 4).unwrap() {
            let p = SigmaPoint::new(&cfg, &pt.coords).unwrap();
            let e = rn1_oneform(&p, &field.eval_components(&p.seeds).unwrap()).unwrap();
            assert!(e.lhs.iter().all(|v| *v == 0.0));
            let rhs = add(&e.box_sigma, &e.at_intrinsic);
            assert!(rhs.iter().all(|v| v.abs() < 1e-9), "{rhs:?}");
        }
    }

    #[test]
    fn unit_scalar_and_quadratic() {
        let cfg = EmbeddingConfig::rn1(2, 1, 1.0).unwrap();
        let y = &sample_sigma(&cfg, 3, 1).unwrap()[0].coords;
        let p = SigmaPoint::new(&cfg, y).unwrap();
        let one = scalar_eval(&p, &Jet::constant(3, 1.0)).unwrap();
        assert_eq!(one.lhs, 0.0);
        assert_eq!(one.box_sigma + one.at_dilation(&cfg), 0.0);
        let q = crate::ambient::quadratic_form_jet(&cfg, &p.seeds);
        let s = scalar_eval(&p, &q).unwrap();
        assert!((s.d1 - 2.0 * q.value()).abs() < 1e-12);
        assert!((s.d2 - 4.0 * q.value()).abs() < 1e-12);
        assert!((s.lhs - (s.box_sigma + s.at_dilation(&cfg))).abs() < 1e-10);
    }
}
