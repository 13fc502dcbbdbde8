//! Operator algebra, frame formulas and anholonomy ground truth.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use super::{rng_for, SuiteConfig, TERMS};
use crate::ambient::{AmbientKind, AmbientPoint, EmbeddingConfig, MetricDiag};
use crate::calculus::{
    box_compositional, box_frame_oneform, box_frame_scalar, codifferential, creator, eta_hat, exterior_d, hodge_star,
    hodge_star_inv, interior, lie, Basis, FormValue,
};
use crate::error::Result;
use crate::exec::map_collect;
use crate::expr::{random_polynomial, FieldExpr, OneFormField};
use crate::frames::{adapted_frame_with_pivots, anholonomy, anholonomy_residual};
use crate::jets::{seed_coordinates, Jet};
use crate::report::{aggregate, CheckDef, CheckRecord, Metric, Sample, Tolerances};
use crate::restriction::SigmaPoint;

const SUITE: &str = "algebra";
/// Step for first derivatives in the finite-difference smoothness check.
const FD_STEP: f64 = 1e-5;
/// Second differences lose two more digits, so they use a larger step.
const FD_STEP_SECOND: f64 = 1e-4;
const FLOW_STEP: f64 = 1e-4;

struct Ids {
    tag: &'static str,
    d_squared: &'static str,
    delta_squared: &'static str,
    ij: &'static str,
    star_inverse: &'static str,
    star_sign: &'static str,
    formula_oneform: &'static str,
    formula_scalar: &'static str,
    coframe_delta: &'static str,
    delta_expansion: &'static str,
    structure: &'static str,
    jacobi: &'static str,
}

macro_rules! ids {
    ($b:literal) => {
        Ids {
            tag: $b,
            d_squared: concat!("d_squared_", $b),
            delta_squared: concat!("codifferential_squared_", $b),
            ij: concat!("ij_anticommutator_", $b),
            star_inverse: concat!("star_inverse_", $b),
            star_sign: concat!("star_inverse_sign_", $b),
            formula_oneform: concat!("frame_formula_oneform_", $b),
            formula_scalar: concat!("frame_formula_scalar_", $b),
            coframe_delta: concat!("coframe_codifferential_", $b),
            delta_expansion: concat!("codifferential_expansion_", $b),
            structure: concat!("structure_equation_", $b),
            jacobi: concat!("jacobi_", $b),
        }
    };
}

const COORDINATE: Ids = ids!("coordinate");
const FRAME: Ids = ids!("frame");
const SIGMA: Ids = ids!("sigma");

fn basis_defs(ids: &Ids, tol: &Tolerances, framed: bool) -> Vec<CheckDef> {
    use Metric::{Abs, Rel};
    let mut defs = vec![
        CheckDef::new(ids.d_squared, "d∘d = 0", Abs, tol.algebra),
        CheckDef::new(ids.delta_squared, "δ∘δ = 0", Abs, tol.algebra),
        CheckDef::new(ids.ij, "i_u j_v + j_v i_u = g(u,v)", Abs, tol.algebra),
        CheckDef::new(ids.star_inverse, "*⁻¹∘* = Id", Abs, tol.algebra),
        CheckDef::new(ids.star_sign, "*⁻¹ = sgn(g) *∘η̂^(d+1)", Abs, tol.algebra),
        CheckDef::new(ids.formula_oneform, "frame formula vs −(dδ+δd), one-forms", Rel, tol.frame_formula),
        CheckDef::new(ids.formula_scalar, "frame formula vs −(dδ+δd), scalars", Rel, tol.frame_formula),
    ];
    if framed {
        defs.extend([
            CheckDef::new(ids.coframe_delta, "δ(e^a) = −η^{ab} c^p_{pb}", Abs, tol.coframe_delta),
            CheckDef::new(ids.delta_expansion, "δα = −η^{ab} e_a(α_b) + α_a δ(e^a)", Rel, tol.coframe_delta),
            CheckDef::new(ids.structure, "coordinate dθ^a vs −½ c^a_{bc} e^b∧e^c", Abs, tol.anholonomy),
            CheckDef::new(ids.jacobi, "cyclic e_a(c^d_{bc}) + c^e_{bc} c^d_{ae} = 0", Abs, tol.anholonomy),
        ]);
    }
    defs
}

fn geometry_defs(cfg: &EmbeddingConfig, tol: &Tolerances) -> Vec<CheckDef> {
    use Metric::{Abs, Rel};
    let mut defs = basis_defs(&COORDINATE, tol, false);
    defs.extend(basis_defs(&FRAME, tol, true));
    defs.extend(basis_defs(&SIGMA, tol, true));
    defs.extend([
        CheckDef::new("anholonomy_tangent_normal", "c^ν_{μn} = H δ^ν_μ", Abs, tol.anholonomy),
        CheckDef::new("anholonomy_normal_component", "c^n_{AB} = 0", Abs, tol.anholonomy),
        CheckDef::new("anholonomy_trace", "c^A_{An} = n H", Abs, tol.anholonomy),
        CheckDef::new("anholonomy_normal_derivative", "e_n(c) = −H c", Abs, tol.anholonomy),
        CheckDef::new("anholonomy_commutator", "[e_b, e_c] = c^a_{bc} e_a", Abs, tol.anholonomy),
        CheckDef::new("frame_diagnostics", "adapted frame orthonormal, dual, adapted, homogeneous", Abs, tol.frame),
        CheckDef::new("frame_smoothness", "frame and structure jets vs finite differences", Rel, tol.smoothness),
    ]);
    if cfg.ambient == AmbientKind::Rn2 {
        defs.push(CheckDef::new("anholonomy_vertical", "c with an index along ∂_{n+1} vanishes", Abs, tol.anholonomy));
    }
    defs
}

/// A random jet whose value and first and second derivatives along the
/// frame dual to `coframe` (`coframe[a][B] = θ^a_B`) are O(1).
fn random_jet(rng: &mut ChaCha8Rng, coframe: &[Vec<f64>]) -> Jet {
    let dim = coframe.len();
    let r: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let mut s = vec![vec![0.0; dim]; dim];
    for a in 0..dim {
        for b in a..dim {
            s[a][b] = rng.gen_range(-1.0..1.0);
            s[b][a] = s[a][b];
        }
    }
    let grad: Vec<f64> = (0..dim).map(|c| (0..dim).map(|a| r[a] * coframe[a][c]).sum()).collect();
    let hess: Vec<Vec<f64>> = (0..dim)
        .map(|b| {
            (0..dim)
                .map(|c| {
                    let mut h = 0.0;
                    for (a, sa) in s.iter().enumerate() {
                        for (e, sae) in sa.iter().enumerate() {
                            h += coframe[a][b] * coframe[e][c] * sae;
                        }
                    }
                    h
                })
                .collect()
        })
        .collect();
    Jet::from_parts(rng.gen_range(-1.0..1.0), &grad, &hess)
}

fn random_form(rng: &mut ChaCha8Rng, basis: &Basis, coframe: &[Vec<f64>], p: usize) -> Result<FormValue> {
    let mut w = FormValue::zero(basis, p)?;
    let idx: Vec<Vec<usize>> = w.iter().map(|(i, _)| i).collect();
    for i in idx {
        w.set_component(&i, random_jet(rng, coframe))?;
    }
    Ok(w)
}

fn constant_vector(rng: &mut ChaCha8Rng, basis: &Basis) -> (Vec<Jet>, Vec<f64>) {
    let v: Vec<f64> = (0..basis.rank()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    (v.iter().map(|&x| Jet::constant(basis.jet_dim(), x)).collect(), v)
}

fn max_abs(w: &FormValue) -> f64 {
    w.values().iter().fold(0.0, |m, v| m.max(v.abs()))
}

fn residual(id: &'static str, value: f64, detail: serde_json::Value) -> Sample {
    Sample::Residual { id, value, detail }
}

fn pair(id: &'static str, lhs: Vec<f64>, rhs: Vec<f64>, detail: serde_json::Value) -> Sample {
    Sample::Pair { id, lhs, rhs, detail }
}

/// Identities of d, δ, i, j and * on random forms of every degree.
fn form_algebra(
    rng: &mut ChaCha8Rng,
    basis: &Basis,
    coframe: &[Vec<f64>],
    ids: &Ids,
    y: &[f64],
    out: &mut Vec<Sample>,
) -> Result<()> {
    let k = basis.rank();
    let sgn = basis.det_sign();
    for p in 0..=k {
        let w = random_form(rng, basis, coframe, p)?;
        let detail = json!({ "point": y, "basis": ids.tag, "degree": p });
        if p + 2 <= k {
            let dd = exterior_d(basis, &exterior_d(basis, &w)?)?;
            out.push(residual(ids.d_squared, max_abs(&dd), detail.clone()));
        }
        if p >= 2 {
            let dd = codifferential(basis, &codifferential(basis, &w)?)?;
            out.push(residual(ids.delta_squared, max_abs(&dd), detail.clone()));
        }
        let (u, uv) = constant_vector(rng, basis);
        let (v, vv) = constant_vector(rng, basis);
        let g: f64 = (0..k).map(|a| basis.sign(a) * uv[a] * vv[a]).sum();
        // j_v vanishes on top-degree forms
        let mut anti = if p < k { interior(basis, &u, &creator(basis, &v, &w)?)? } else { FormValue::zero(basis, p)? };
        if p > 0 {
            anti = anti.try_add(&creator(basis, &v, &interior(basis, &u, &w)?)?)?;
        }
        out.push(residual(ids.ij, max_abs(&anti.try_sub(&w.scale(g))?), detail.clone()));

        let back = hodge_star_inv(basis, &hodge_star(basis, &w)?)?;
        out.push(residual(ids.star_inverse, max_abs(&back.try_sub(&w)?), detail.clone()));
        let mut hat = w.clone();
        for _ in 0..=k {
            hat = eta_hat(&hat);
        }
        let via_star = hodge_star(basis, &hat)?.scale(sgn);
        out.push(residual(ids.star_sign, max_abs(&hodge_star_inv(basis, &w)?.try_sub(&via_star)?), detail));
    }
    Ok(())
}

/// Frame formulas against the compositional Laplace–de Rham operator on
/// polynomial fields.
fn frame_formulas(
    basis: &Basis,
    ids: &Ids,
    seeds: &[Jet],
    oneforms: &[OneFormField],
    scalars: &[FieldExpr],
    y: &[f64],
    out: &mut Vec<Sample>,
) -> Result<()> {
    for (fi, a) in oneforms.iter().enumerate() {
        let cart: Vec<Jet> = a.comps.iter().map(|c| c.eval(seeds)).collect::<Result<_>>()?;
        let w = FormValue::one_form(basis, basis.components_of(&cart))?;
        let lhs = box_compositional(basis, &w)?.values();
        let rhs = box_frame_oneform(basis, &w)?.values();
        out.push(pair(ids.formula_oneform, lhs, rhs, json!({ "point": y, "field": fi, "expr": a })));
    }
    for (fi, s) in scalars.iter().enumerate() {
        let phi = s.eval(seeds)?;
        let lhs = box_compositional(basis, &FormValue::scalar(basis, phi.clone()))?.values();
        let rhs = vec![box_frame_scalar(basis, &phi)?];
        out.push(pair(ids.formula_scalar, lhs, rhs, json!({ "point": y, "field": fi, "expr": s })));
    }
    Ok(())
}

/// Codifferential of the co-frame and its Leibniz expansion.
fn coframe_checks(
    rng: &mut ChaCha8Rng,
    basis: &Basis,
    coframe: &[Vec<f64>],
    ids: &Ids,
    y: &[f64],
    out: &mut Vec<Sample>,
) -> Result<()> {
    let k = basis.rank();
    let c = basis.structure();
    let mut worst = 0.0f64;
    for a in 0..k {
        let de = codifferential(basis, &FormValue::basis_covector(basis, a)?)?.values()[0];
        worst = worst.max((de + basis.sign(a) * c.trace(a).value()).abs());
    }
    out.push(residual(ids.coframe_delta, worst, json!({ "point": y, "basis": ids.tag })));

    let alpha = random_form(rng, basis, coframe, 1)?;
    let lhs = codifferential(basis, &alpha)?.values();
    let mut rhs = 0.0;
    for a in 0..k {
        let comp = &alpha.components()[a];
        rhs -= basis.sign(a) * basis.derive(a, comp)?.value();
        rhs -= comp.value() * basis.sign(a) * c.trace(a).value();
    }
    out.push(pair(ids.delta_expansion, lhs, vec![rhs], json!({ "point": y, "basis": ids.tag })));
    Ok(())
}

/// `(dθ^a)(e_b, e_c)` through the Cartesian exterior derivative, against
/// `-c^a_{bc}`; plus the Jacobi identity of the structure coefficients.
fn structure_checks(p: &SigmaPoint, basis: &Basis, ids: &Ids, k: usize, out: &mut Vec<Sample>) -> Result<()> {
    let coord = Basis::coordinate(&p.cfg.metric);
    let d = p.cfg.dim();
    let c = basis.structure();
    let mut worst = 0.0f64;
    for a in 0..k {
        let dtheta = exterior_d(&coord, &FormValue::one_form(&coord, p.frame.theta[a].clone())?)?;
        for b in 0..k {
            for cc in b + 1..k {
                let mut acc = 0.0;
                for bb in 0..d {
                    for cb in bb + 1..d {
                        let comp = dtheta.component(&[bb, cb])?.value();
                        let eb = &p.frame.e[b];
                        let ec = &p.frame.e[cc];
                        acc += comp * (eb[bb].value() * ec[cb].value() - eb[cb].value() * ec[bb].value());
                    }
                }
                worst = worst.max((acc + c.get(a, b, cc).value()).abs());
            }
        }
    }
    out.push(residual(ids.structure, worst, json!({ "point": p.y, "basis": ids.tag })));

    let mut worst = 0.0f64;
    for dd in 0..k {
        for a in 0..k {
            for b in 0..k {
                for cc in 0..k {
                    let mut sum = 0.0;
                    for (x, y, z) in [(a, b, cc), (b, cc, a), (cc, a, b)] {
                        sum += basis.derive(x, c.get(dd, y, z))?.value();
                        for e in 0..k {
                            sum += c.get(e, y, z).value() * c.get(dd, x, e).value();
                        }
                    }
                    worst = worst.max(sum.abs());
                }
            }
        }
    }
    out.push(residual(ids.jacobi, worst, json!({ "point": p.y, "basis": ids.tag })));
    Ok(())
}

/// Closed-form structure coefficients of the adapted frame on `Σ_n`.
fn ground_truth(p: &SigmaPoint, out: &mut Vec<Sample>) -> Result<()> {
    let n = p.cfg.n;
    let h = p.cfg.h;
    let c = &p.anholonomy;
    let dim = c.dim();
    let detail = json!({ "point": p.y });
    let mut tn = 0.0f64;
    for nu in 0..n {
        for mu in 0..n {
            let want = if mu == nu { h } else { 0.0 };
            tn = tn.max((c.get(nu, mu, n).value() - want).abs());
        }
    }
    out.push(residual("anholonomy_tangent_normal", tn, detail.clone()));
    let mut normal = 0.0f64;
    for a in 0..=n {
        for b in 0..=n {
            normal = normal.max(c.get(n, a, b).value().abs());
        }
    }
    out.push(residual("anholonomy_normal_component", normal, detail.clone()));
    let trace: f64 = (0..=n).map(|a| c.get(a, a, n).value()).sum();
    out.push(residual("anholonomy_trace", (trace - n as f64 * h).abs(), detail.clone()));
    let mut deriv = 0.0f64;
    for a in 0..dim {
        for b in 0..dim {
            for cc in 0..dim {
                let j = c.get(a, b, cc);
                deriv = deriv.max((p.full.derive(n, j)?.value() + h * j.value()).abs());
            }
        }
    }
    out.push(residual("anholonomy_normal_derivative", deriv, detail.clone()));
    out.push(residual("anholonomy_commutator", anholonomy_residual(&p.frame, c)?, detail.clone()));
    out.push(residual("frame_diagnostics", p.frame.diagnostics(&p.cfg).worst(), detail.clone()));
    if p.cfg.ambient == AmbientKind::Rn2 {
        let v = n + 1;
        let mut vert = 0.0f64;
        for a in 0..dim {
            for b in 0..dim {
                for cc in 0..dim {
                    if a == v || b == v || cc == v {
                        vert = vert.max(c.get(a, b, cc).value().abs());
                    }
                }
            }
        }
        out.push(residual("anholonomy_vertical", vert, detail));
    }
    Ok(())
}

/// Jet derivatives of frame vectors and structure coefficients against
/// central differences, holding the Gram–Schmidt pivots fixed.
fn smoothness(p: &SigmaPoint, out: &mut Vec<Sample>) -> Result<()> {
    let d = p.cfg.dim();
    let sample = |y: &[f64]| -> Result<Vec<f64>> {
        let f = adapted_frame_with_pivots(&p.cfg, y, Some(&p.frame.pivots))?;
        let c = anholonomy(&f)?;
        let mut v: Vec<f64> = f.e.iter().flatten().map(Jet::value).collect();
        for a in 0..d {
            for b in 0..d {
                for cc in 0..d {
                    v.push(c.get(a, b, cc).value());
                }
            }
        }
        Ok(v)
    };
    let jets: Vec<&Jet> = p.frame.e.iter().flatten().collect();
    let cjets: Vec<&Jet> = (0..d * d * d).map(|i| p.anholonomy.get(i / (d * d), (i / d) % d, i % d)).collect();
    let shifted = |k: usize, s: f64| {
        let mut y = p.y.clone();
        y[k] += s;
        y
    };
    let mut lhs = Vec::new();
    let mut rhs = Vec::new();
    let centre = sample(&p.y)?;
    for k in 0..d {
        let plus = sample(&shifted(k, FD_STEP))?;
        let minus = sample(&shifted(k, -FD_STEP))?;
        for (i, j) in jets.iter().chain(&cjets).enumerate() {
            lhs.push(j.grad(k));
            rhs.push((plus[i] - minus[i]) / (2.0 * FD_STEP));
        }
        let plus = sample(&shifted(k, FD_STEP_SECOND))?;
        let minus = sample(&shifted(k, -FD_STEP_SECOND))?;
        for (i, j) in jets.iter().enumerate() {
            lhs.push(j.hess(k, k));
            rhs.push((plus[i] - 2.0 * centre[i] + minus[i]) / (FD_STEP_SECOND * FD_STEP_SECOND));
        }
    }
    out.push(pair("frame_smoothness", lhs, rhs, json!({ "point": p.y })));
    Ok(())
}

fn point_samples(
    cfg: &EmbeddingConfig,
    y: &[f64],
    mut rng: ChaCha8Rng,
    oneforms: &[OneFormField],
    scalars: &[FieldExpr],
) -> Result<Vec<Sample>> {
    let mut out = Vec::new();
    let p = SigmaPoint::new(cfg, y)?;
    let coord = Basis::coordinate(&cfg.metric);
    let n = cfg.n;
    let d = cfg.dim();
    let identity: Vec<Vec<f64>> = (0..d).map(|a| (0..d).map(|b| f64::from(u8::from(a == b))).collect()).collect();
    let theta: Vec<Vec<f64>> = p.frame.theta.iter().map(|row| row.iter().map(Jet::value).collect()).collect();
    for (basis, ids, coframe) in
        [(&coord, &COORDINATE, &identity), (&p.full, &FRAME, &theta), (&p.sigma, &SIGMA, &theta)]
    {
        form_algebra(&mut rng, basis, coframe, ids, y, &mut out)?;
        frame_formulas(basis, ids, &p.seeds, oneforms, scalars, y, &mut out)?;
        if ids.tag != COORDINATE.tag {
            coframe_checks(&mut rng, basis, coframe, ids, y, &mut out)?;
            let k = if ids.tag == SIGMA.tag { n } else { cfg.dim() };
            structure_checks(&p, basis, ids, k, &mut out)?;
        }
    }
    ground_truth(&p, &mut out)?;
    smoothness(&p, &mut out)?;
    Ok(out)
}

pub(super) fn run_geometry(cfg: &EmbeddingConfig, points: &[AmbientPoint], sc: &SuiteConfig) -> Vec<CheckRecord> {
    let label = cfg.label();
    let mut frng = rng_for(sc.seed, &format!("{SUITE}/{label}/fields"));
    let d = cfg.dim();
    let oneforms: Vec<OneFormField> =
        (0..sc.fields).map(|_| OneFormField::random(&mut frng, d, sc.field_degree, TERMS)).collect();
    let scalars: Vec<FieldExpr> =
        (0..sc.fields).map(|_| random_polynomial(&mut frng, d, sc.field_degree, TERMS).to_expr()).collect();
    let indexed: Vec<(usize, &AmbientPoint)> = points.iter().enumerate().collect();
    let samples = map_collect(sc.execution, &indexed, |(i, pt)| {
        let rng = rng_for(sc.seed, &format!("{SUITE}/{label}/point{i}"));
        point_samples(cfg, &pt.coords, rng, &oneforms, &scalars)
            .unwrap_or_else(|e| vec![Sample::Failure(format!("at {:?}: {e}", pt.coords))])
    });
    aggregate(SUITE, Some(cfg), &geometry_defs(cfg, &sc.tolerances), &samples)
}

/// `exp(tM)` by its Taylor series.
fn expm(m: &[Vec<f64>], t: f64) -> Vec<Vec<f64>> {
    let d = m.len();
    let mut out: Vec<Vec<f64>> = (0..d).map(|i| (0..d).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    let mut term = out.clone();
    for k in 1..30 {
        term = (0..d)
            .map(|i| (0..d).map(|j| (0..d).map(|l| term[i][l] * m[l][j]).sum::<f64>() * t / k as f64).collect())
            .collect();
        for i in 0..d {
            for j in 0..d {
                out[i][j] += term[i][j];
            }
        }
    }
    out
}

fn det(m: &[Vec<f64>]) -> f64 {
    match m.len() {
        0 => 1.0,
        1 => m[0][0],
        k => (0..k)
            .map(|j| {
                let minor: Vec<Vec<f64>> = m[1..]
                    .iter()
                    .map(|row| row.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, v)| *v).collect())
                    .collect();
                let s = if j % 2 == 0 { 1.0 } else { -1.0 };
                s * m[0][j] * det(&minor)
            })
            .sum(),
    }
}

/// Components of `φ_t^* ω` at `y`, for the linear flow `φ_t = exp(tM)`.
fn pulled_back(form: &[(Vec<usize>, FieldExpr)], phi: &[Vec<f64>], y: &[f64]) -> Result<Vec<f64>> {
    let moved: Vec<f64> = phi.iter().map(|row| row.iter().zip(y).map(|(a, b)| a * b).sum()).collect();
    let values: Vec<f64> = form.iter().map(|(_, e)| e.eval_value(&moved)).collect::<Result<_>>()?;
    Ok(form
        .iter()
        .map(|(i, _)| {
            form.iter()
                .zip(&values)
                .map(|((j, _), w)| {
                    w * det(&j.iter().map(|&r| i.iter().map(|&c| phi[r][c]).collect()).collect::<Vec<_>>())
                })
                .sum()
        })
        .collect())
}

/// Cartan formula against the flow derivative of linear vector fields in
/// flat three-dimensional space.
pub(super) fn run_flat(sc: &SuiteConfig) -> Vec<CheckRecord> {
    let defs =
        [CheckDef::new("cartan_flow", "(i_v d + d i_v)ω vs d/dt φ_t^*ω, n = 2", Metric::Abs, sc.tolerances.flow)];
    let mut rng = rng_for(sc.seed, "algebra/flat/cartan");
    let mut samples = Vec::new();
    for signs in [vec![1, 1, 1], vec![-1, 1, 1]] {
        let basis = Basis::coordinate(&MetricDiag::new(signs.clone()).expect("valid signs"));
        for _ in 0..sc.samples {
            let y: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let m: Vec<Vec<f64>> = (0..3).map(|_| (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
            let p = rng.gen_range(0..=3usize);
            let mut form = FormValue::zero(&basis, p).expect("degree within rank");
            let exprs: Vec<(Vec<usize>, FieldExpr)> = form
                .iter()
                .map(|(i, _)| (i, random_polynomial(&mut rng, 3, sc.field_degree, TERMS).to_expr()))
                .collect();
            let sample = (|| -> Result<Sample> {
                let seeds = seed_coordinates(&y);
                for (i, e) in &exprs {
                    form.set_component(i, e.eval(&seeds)?)?;
                }
                let v: Vec<Jet> = (0..3)
                    .map(|a| {
                        let mut acc = Jet::zero(3);
                        for (b, s) in seeds.iter().enumerate() {
                            acc.add_scaled(m[a][b], s);
                        }
                        acc
                    })
                    .collect();
                let lhs = lie(&basis, &v, &form)?.values();
                let plus = pulled_back(&exprs, &expm(&m, FLOW_STEP), &y)?;
                let minus = pulled_back(&exprs, &expm(&m, -FLOW_STEP), &y)?;
                let rhs = plus.iter().zip(&minus).map(|(a, b)| (a - b) / (2.0 * FLOW_STEP)).collect();
                Ok(pair("cartan_flow", lhs, rhs, json!({ "point": y, "signs": signs, "degree": p, "matrix": m })))
            })();
            samples.push(vec![sample.unwrap_or_else(|e| Sample::Failure(e.to_string()))]);
        }
    }
    aggregate(SUITE, None, &defs, &samples).into_iter().map(|r| r.with_info("n", 2.0)).collect()
}
