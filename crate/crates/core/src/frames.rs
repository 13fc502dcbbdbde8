//! Adapted orthonormal frames on `Σ_n` and their anholonomy coefficients.
//!
//! The frame in `R^{n+1}` is built entirely from the radial projection
//! `x = y / (H sqrt|y^2|)`: the outer normal is `e_n = H x`, and the tangent
//! vectors come from a pseudo-Gram–Schmidt pass over the tangent projections
//! of the coordinate basis at `x`. Every component is therefore homogeneous of
//! degree zero by construction. In `R^{n+2}` the same frame is built in the
//! plane coordinates `y^0..y^n` (so it does not depend on `y^{n+1}`) and
//! completed by `e_{n+1} = ∂_{n+1}`.
//!
//! Frame rows are `e_0 .. e_{n-1}` (tangent, in pivot order), then `e_n`,
//! then `e_{n+1}` for the `R^{n+2}` case.

use crate::ambient::{quadratic_form_jet, AmbientKind, EmbeddingConfig, MetricDiag};
use crate::error::{Error, Result};
use crate::jets::{seed_coordinates, Jet};

/// Gram–Schmidt pivots with `|η(w, w)|` below this are rejected.
pub const DEGENERATE_PIVOT: f64 = 1e-6;
/// Frames whose matrix has a 1-norm condition number above this are rejected.
pub const MAX_CONDITION: f64 = 1e8;

#[derive(Debug, Clone)]
pub struct FrameField {
    /// `e[a][B] = e_a^B`
    pub e: Vec<Vec<Jet>>,
    /// `theta[a][B] = θ^a_B`, with `θ^a_B e_b^B = δ^a_b`
    pub theta: Vec<Vec<Jet>>,
    pub frame_metric: MetricDiag,
    pub coord_metric: MetricDiag,
    /// Coordinate indices used as Gram–Schmidt sources, in order.
    pub pivots: Vec<usize>,
    pub point: Vec<f64>,
}

impl FrameField {
    pub fn dim(&self) -> usize {
        self.e.len()
    }

    /// `e_a(f) = e_a^B ∂_B f`
    pub fn derivative(&self, a: usize, f: &Jet) -> Result<Jet> {
        f.directional(&self.e[a])
    }

    /// Value matrix `e_a^B` at the base point.
    pub fn values(&self) -> Vec<Vec<f64>> {
        self.e.iter().map(|row| row.iter().map(Jet::value).collect()).collect()
    }

    /// Frame components `ω_a = ω_B e_a^B` of a Cartesian one-form.
    pub fn frame_components(&self, coords: &[Jet]) -> Vec<Jet> {
        self.e
            .iter()
            .map(|row| {
                let mut acc = Jet::zero(coords[0].dim());
                for (eb, ab) in row.iter().zip(coords) {
                    acc.add_product(1.0, eb, ab);
                }
                acc
            })
            .collect()
    }

    /// Cartesian components `ω_B = ω_a θ^a_B` of a frame one-form.
    pub fn coordinate_components(&self, frame_comps: &[Jet]) -> Vec<Jet> {
        let d = self.dim();
        (0..d)
            .map(|b| {
                let mut acc = Jet::zero(frame_comps[0].dim());
                for (a, wa) in frame_comps.iter().enumerate() {
                    acc.add_product(1.0, wa, &self.theta[a][b]);
                }
                acc
            })
            .collect()
    }

    /// Co-frame from the metric, `θ^a_B = η_aa η_BB e_a^B`; equal to the
    /// inverse-matrix co-frame when the frame is orthonormal.
    pub fn metric_coframe(&self) -> Vec<Vec<Jet>> {
        self.e
            .iter()
            .enumerate()
            .map(|(a, row)| {
                row.iter()
                    .enumerate()
                    .map(|(b, j)| j.scale(self.frame_metric.sign(a) * self.coord_metric.sign(b)))
                    .collect()
            })
            .collect()
    }

    /// Invariant diagnostics at the base point.
    pub fn diagnostics(&self, cfg: &EmbeddingConfig) -> FrameDiagnostics {
        let d = self.dim();
        let vals = self.values();
        let mut orthonormality = 0.0f64;
        let mut duality = 0.0f64;
        for a in 0..d {
            for b in 0..d {
                let target = if a == b { self.frame_metric.sign(a) } else { 0.0 };
                orthonormality = orthonormality.max((self.coord_metric.dot(&vals[a], &vals[b]) - target).abs());
                let pair: f64 = (0..d).map(|k| self.theta[a][k].value() * vals[b][k]).sum();
                duality = duality.max((pair - if a == b { 1.0 } else { 0.0 }).abs());
            }
        }
        let n = cfg.n;
        let p = n + 1;
        let y = &self.point;
        let pm = cfg.plane_metric();
        let q = pm.dot(&y[..p], &y[..p]);
        let root = q.abs().sqrt();
        let normal_alignment = (0..p).map(|k| (vals[n][k] - y[k] / root).abs()).fold(0.0, f64::max);
        let tangency = (0..n)
            .map(|mu| {
                // e_mu(y_P^2) = 2 η(e_mu, y_P)
                (2.0 * pm.dot(&vals[mu][..p], &y[..p])).abs()
            })
            .fold(0.0, f64::max);
        // D(e_a^B) = y^A ∂_A e_a^B
        let mut homogeneity = 0.0f64;
        let mut translation = 0.0f64;
        for row in &self.e {
            for comp in row {
                let dv: f64 = (0..d).map(|k| y[k] * comp.grad(k)).sum();
                homogeneity = homogeneity.max(dv.abs());
                if cfg.ambient == AmbientKind::Rn2 {
                    translation = translation.max(comp.grad(n + 1).abs());
                }
            }
        }
        FrameDiagnostics { orthonormality, duality, normal_alignment, tangency, homogeneity, translation }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameDiagnostics {
    pub orthonormality: f64,
    pub duality: f64,
    pub normal_alignment: f64,
    pub tangency: f64,
    pub homogeneity: f64,
    /// Largest `∂_{n+1} e_a^B` (only meaningful in `R^{n+2}`).
    pub translation: f64,
}

impl FrameDiagnostics {
    pub fn worst(&self) -> f64 {
        [self.orthonormality, self.duality, self.normal_alignment, self.tangency, self.homogeneity, self.translation]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

/// Structure coefficients `c^a_{bc}` with `[e_b, e_c] = c^a_{bc} e_a`, as
/// order-1 jets.
#[derive(Debug, Clone)]
pub struct Anholonomy {
    dim: usize,
    c: Vec<Jet>,
}

impl Anholonomy {
    /// All coefficients zero (holonomic frame) in `k` frame indices over
    /// `jet_dim` variables.
    pub fn zero(k: usize, jet_dim: usize) -> Self {
        Self { dim: k, c: vec![Jet::zero(jet_dim); k * k * k] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize, c: usize) -> &Jet {
        &self.c[(a * self.dim + b) * self.dim + c]
    }

    fn set_antisymmetric(&mut self, a: usize, b: usize, c: usize, value: Jet) {
        let k = self.dim;
        self.c[(a * k + c) * k + b] = -&value;
        self.c[(a * k + b) * k + c] = value;
    }

    /// Coefficients restricted to the leading `k` frame indices.
    pub fn leading(&self, k: usize) -> Self {
        let mut out = Vec::with_capacity(k * k * k);
        for a in 0..k {
            for b in 0..k {
                for c in 0..k {
                    out.push(self.get(a, b, c).clone());
                }
            }
        }
        Self { dim: k, c: out }
    }

    /// Trace `c^p_{p b}`.
    pub fn trace(&self, b: usize) -> Jet {
        Jet::sum(self.c[0].dim(), (0..self.dim).map(|p| self.get(p, p, b)))
    }
}

/// `c^a_{bc} = θ^a_B (e_b(e_c^B) - e_c(e_b^B))`.
pub fn anholonomy(frame: &FrameField) -> Result<Anholonomy> {
    let d = frame.dim();
    let jd = frame.e[0][0].dim();
    let mut out = Anholonomy::zero(d, jd);
    for b in 0..d {
        for c in b + 1..d {
            let bracket: Vec<Jet> = (0..d)
                .map(|k| Ok(frame.derivative(b, &frame.e[c][k])? - frame.derivative(c, &frame.e[b][k])?))
                .collect::<Result<_>>()?;
            for a in 0..d {
                let mut acc = Jet::zero(jd);
                for k in 0..d {
                    acc.add_product(1.0, &frame.theta[a][k], &bracket[k]);
                }
                out.set_antisymmetric(a, b, c, acc);
            }
        }
    }
    Ok(out)
}

/// Largest violation of `[e_b, e_c]^B = c^a_{bc} e_a^B` at the base point.
pub fn anholonomy_residual(frame: &FrameField, c: &Anholonomy) -> Result<f64> {
    let d = frame.dim();
    let mut worst = 0.0f64;
    for b in 0..d {
        for cc in 0..d {
            for k in 0..d {
                let lhs = frame.derivative(b, &frame.e[cc][k])?.value() - frame.derivative(cc, &frame.e[b][k])?.value();
                let rhs: f64 = (0..d).map(|a| c.get(a, b, cc).value() * frame.e[a][k].value()).sum();
                worst = worst.max((lhs - rhs).abs());
            }
        }
    }
    Ok(worst)
}

fn one_norm(m: &[Vec<f64>]) -> f64 {
    let d = m.len();
    (0..d).map(|j| (0..d).map(|i| m[i][j].abs()).sum::<f64>()).fold(0.0, f64::max)
}

/// Inverse of a square jet matrix by Gauss–Jordan elimination with partial
/// pivoting on the values.
pub fn invert_jet_matrix(m: &[Vec<Jet>]) -> Result<Vec<Vec<Jet>>> {
    let d = m.len();
    let jd = m[0][0].dim();
    let mut a: Vec<Vec<Jet>> = m.to_vec();
    let mut inv: Vec<Vec<Jet>> =
        (0..d).map(|i| (0..d).map(|j| Jet::constant(jd, if i == j { 1.0 } else { 0.0 })).collect()).collect();
    for col in 0..d {
        let pivot = (col..d)
            .max_by(|&i, &j| a[i][col].value().abs().total_cmp(&a[j][col].value().abs()))
            .expect("non-empty range");
        if a[pivot][col].value() == 0.0 {
            return Err(Error::SingularCoframe { condition: f64::INFINITY });
        }
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let r = a[col][col].recip()?;
        for j in 0..d {
            a[col][j] = &a[col][j] * &r;
            inv[col][j] = &inv[col][j] * &r;
        }
        for i in 0..d {
            if i == col {
                continue;
            }
            let f = a[i][col].clone();
            for j in 0..d {
                let (top_a, top_inv) = (a[col][j].clone(), inv[col][j].clone());
                a[i][j].add_product(-1.0, &f, &top_a);
                inv[i][j].add_product(-1.0, &f, &top_inv);
            }
        }
    }
    Ok(inv)
}

fn coframe(e: &[Vec<Jet>]) -> Result<Vec<Vec<Jet>>> {
    let inv = invert_jet_matrix(e)?;
    let d = e.len();
    let values: Vec<Vec<f64>> = e.iter().map(|r| r.iter().map(Jet::value).collect()).collect();
    let inv_values: Vec<Vec<f64>> = inv.iter().map(|r| r.iter().map(Jet::value).collect()).collect();
    let condition = one_norm(&values) * one_norm(&inv_values);
    if condition.is_nan() || condition > MAX_CONDITION {
        return Err(Error::SingularCoframe { condition });
    }
    // theta[a][B] = inv[B][a]
    Ok((0..d).map(|a| (0..d).map(|b| inv[b][a].clone()).collect()).collect())
}

fn determinant(m: &[Vec<f64>]) -> f64 {
    let d = m.len();
    let mut a = m.to_vec();
    let mut det = 1.0;
    for col in 0..d {
        let pivot = (col..d).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap();
        if a[pivot][col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            a.swap(col, pivot);
            det = -det;
        }
        det *= a[col][col];
        for i in col + 1..d {
            let f = a[i][col] / a[col][col];
            for j in col..d {
                a[i][j] -= f * a[col][j];
            }
        }
    }
    det
}

/// Greedy pivot order for the tangent Gram–Schmidt pass, decided on values.
fn choose_pivots(metric: &MetricDiag, normal: &[f64], normal_sign: f64, n: usize) -> Result<Vec<usize>> {
    let p = metric.dim();
    let project = |k: usize| -> Vec<f64> {
        let coeff = normal_sign * metric.sign(k) * normal[k];
        (0..p).map(|b| if b == k { 1.0 } else { 0.0 } - coeff * normal[b]).collect()
    };
    let mut built: Vec<(Vec<f64>, f64)> = Vec::new();
    let mut remaining: Vec<usize> = (0..p).collect();
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let mut best: Option<(usize, Vec<f64>, f64)> = None;
        for (slot, &k) in remaining.iter().enumerate() {
            let mut w = project(k);
            for (u, su) in &built {
                let c = metric.dot(&w, u) / su;
                for (wb, ub) in w.iter_mut().zip(u) {
                    *wb -= c * ub;
                }
            }
            let nn = metric.dot(&w, &w);
            if best.as_ref().is_none_or(|(_, _, b)| nn.abs() > b.abs()) {
                best = Some((slot, w, nn));
            }
        }
        let (slot, w, nn) = best.expect("candidates remain");
        if nn.abs() < DEGENERATE_PIVOT {
            return Err(Error::DegenerateFrame { norm: nn.abs() });
        }
        let scale = nn.abs().sqrt();
        built.push((w.iter().map(|x| x / scale).collect(), nn.signum()));
        order.push(remaining.remove(slot));
    }
    Ok(order)
}

/// Frame rows for `Σ_n` in the pseudo-Euclidean space with metric `pm`
/// (dimension `n+1`), as jets over `seeds` (which may carry extra variables).
/// Frame vectors, their signs and the pivot order.
type PlaneFrame = (Vec<Vec<Jet>>, Vec<i8>, Vec<usize>);

fn plane_frame(pc: &EmbeddingConfig, seeds: &[Jet], pivots: Option<&[usize]>) -> Result<PlaneFrame> {
    let n = pc.n;
    let p = n + 1;
    let pm = &pc.metric;
    let jd = seeds[0].dim();
    let normal_sign = -pc.eps_f();
    let q = quadratic_form_jet(pc, &seeds[..p]);
    if q.value().signum() != -pc.eps_f() || q.value() == 0.0 {
        return Err(Error::Domain(format!(
            "point with y^2 = {} does not project onto Σ_n (need sign {})",
            q.value(),
            -pc.eps
        )));
    }
    // R = H sqrt|y^2|, x = y / R, e_n = H x
    let radius = q.scale(normal_sign * pc.h * pc.h).powf(0.5)?;
    let inv_radius = radius.recip()?;
    let x: Vec<Jet> = seeds[..p].iter().map(|s| s * &inv_radius).collect();
    let normal: Vec<Jet> = x.iter().map(|xk| xk.scale(pc.h)).collect();
    let normal_vals: Vec<f64> = normal.iter().map(Jet::value).collect();

    let order = match pivots {
        Some(p) => p.to_vec(),
        None => choose_pivots(pm, &normal_vals, normal_sign, n)?,
    };

    let mut rows: Vec<Vec<Jet>> = Vec::with_capacity(p);
    let mut signs: Vec<i8> = Vec::with_capacity(p);
    for &k in &order {
        // tangent projection of ∂_k: ∂_k - η(∂_k, e_n)/η(e_n, e_n) e_n
        let coeff = normal[k].scale(normal_sign * pm.sign(k));
        let mut w: Vec<Jet> = (0..p)
            .map(|b| {
                let mut c = Jet::constant(jd, if b == k { 1.0 } else { 0.0 });
                c.add_product(-1.0, &coeff, &normal[b]);
                c
            })
            .collect();
        for (u, &su) in rows.iter().zip(&signs) {
            let c = pm.dot_jets(&w, u).scale(su as f64);
            for (wb, ub) in w.iter_mut().zip(u) {
                wb.add_product(-1.0, &c, ub);
            }
        }
        // Second pass: the projections are zero analytically, but removing
        // their rounded remainder keeps large boosts accurate.
        for (u, su) in rows.iter().zip(signs.iter().map(|&s| s as f64)).chain([(&normal, normal_sign)]) {
            let c = pm.dot_jets(&w, u).scale(su);
            for (wb, ub) in w.iter_mut().zip(u) {
                wb.add_product(-1.0, &c, ub);
            }
        }
        let nn = pm.dot_jets(&w, &w);
        if nn.value().abs() < DEGENERATE_PIVOT {
            return Err(Error::DegenerateFrame { norm: nn.value().abs() });
        }
        let s = nn.value().signum();
        let inv_norm = nn.scale(s).powf(-0.5)?;
        rows.push(w.iter().map(|wb| wb * &inv_norm).collect());
        signs.push(s as i8);
    }
    rows.push(normal);
    signs.push(normal_sign as i8);

    let vals: Vec<Vec<f64>> = rows.iter().map(|r| r.iter().map(Jet::value).collect()).collect();
    if determinant(&vals) < 0.0 {
        let flip = n - 1;
        rows[flip] = rows[flip].iter().map(|j| -j).collect();
    }
    Ok((rows, signs, order))
}

/// Adapted frame of `Σ_n ⊂ R^{n+1}` at `y` (any point with `sgn(y^2) = -eps`).
pub fn adapted_frame_rn1(cfg: &EmbeddingConfig, y: &[f64]) -> Result<FrameField> {
    adapted_frame_with_pivots(cfg, y, None)
}

/// Adapted frame of `Σ_n ⊂ R^{n+2}` at `y`; depends only on `y^0..y^n`.
pub fn adapted_frame_rn2(cfg: &EmbeddingConfig, y: &[f64]) -> Result<FrameField> {
    if cfg.ambient != AmbientKind::Rn2 {
        return Err(Error::WrongAmbient("adapted_frame_rn2 needs an R^{n+2} configuration"));
    }
    adapted_frame_with_pivots(cfg, y, None)
}

/// Adapted frame for either ambient kind.
pub fn adapted_frame(cfg: &EmbeddingConfig, y: &[f64]) -> Result<FrameField> {
    adapted_frame_with_pivots(cfg, y, None)
}

/// Adapted frame with an explicit Gram–Schmidt pivot order (`None` picks
/// the greedy order at `y`).
pub fn adapted_frame_with_pivots(cfg: &EmbeddingConfig, y: &[f64], pivots: Option<&[usize]>) -> Result<FrameField> {
    let d = cfg.dim();
    if y.len() != d {
        return Err(Error::DimMismatch { left: y.len(), right: d });
    }
    let seeds = seed_coordinates(y);
    let pc = cfg.plane();
    let (mut rows, mut signs, order) = plane_frame(&pc, &seeds, pivots)?;
    if cfg.ambient == AmbientKind::Rn2 {
        for row in &mut rows {
            row.push(Jet::zero(d));
        }
        let mut last: Vec<Jet> = (0..d).map(|_| Jet::zero(d)).collect();
        last[d - 1] = Jet::constant(d, 1.0);
        rows.push(last);
        signs.push(cfg.eps);
    }
    let theta = coframe(&rows)?;
    Ok(FrameField {
        e: rows,
        theta,
        frame_metric: MetricDiag::new(signs)?,
        coord_metric: cfg.metric.clone(),
        pivots: order,
        point: y.to_vec(),
    })
}

/// The Cartesian frame `e_a = ∂_a` (all anholonomy coefficients zero).
pub fn cartesian_frame(metric: &MetricDiag, y: &[f64]) -> FrameField {
    let d = metric.dim();
    let rows: Vec<Vec<Jet>> =
        (0..d).map(|a| (0..d).map(|b| Jet::constant(d, if a == b { 1.0 } else { 0.0 })).collect()).collect();
    FrameField {
        theta: rows.clone(),
        e: rows,
        frame_metric: metric.clone(),
        coord_metric: metric.clone(),
        pivots: (0..d).collect(),
        point: y.to_vec(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ambient::sample_sigma;

    #[test]
    fn sphere_pole() {
        let cfg = EmbeddingConfig::sphere(2, 1.0).unwrap();
        let f = adapted_frame_rn1(&cfg, &[0.0, 0.0, 1.0]).unwrap();
        let v = f.values();
        assert_eq!(v[2], vec![0.0, 0.0, 1.0]);
        for a in 0..3 {
            for b in 0..3 {
                let dot: f64 = (0..3).map(|k| v[a][k] * v[b][k]).sum();
                assert!((dot - if a == b { 1.0 } else { 0.0 }).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn de_sitter_normal_is_spacelike() {
        let cfg = EmbeddingConfig::rn1(2, 1, 1.0).unwrap();
        let f = adapted_frame_rn1(&cfg, &[0.0, 1.0, 0.0]).unwrap();
        assert_eq!(f.values()[2], vec![0.0, 1.0, 0.0]);
        assert_eq!(f.frame_metric.sign(2), -1.0);
        let v = &f.values()[2];
        assert_eq!(cfg.metric.dot(v, v), -1.0);
    }

    #[test]
    fn sampled_frames_satisfy_invariants() {
        for cfg in [
            EmbeddingConfig::sphere(3, 1.0).unwrap(),
            EmbeddingConfig::rn1(3, 1, 1.0).unwrap(),
            EmbeddingConfig::rn1(4, -1, 0.8).unwrap(),
            EmbeddingConfig::rn2(3, -1, 1.2).unwrap(),
            EmbeddingConfig::rn2(2, 1, 1.0).unwrap(),
        ] {
            for p in sample_sigma(&cfg, 5, 10).unwrap() {
                let f = adapted_frame(&cfg, &p.coords).unwrap();
                let diag = f.diagnostics(&cfg);
                assert!(diag.worst() < 1e-10, "{cfg}: {diag:?}");
                assert_eq!(f.frame_metric.sign(cfg.n), -cfg.eps_f());
                // off-Σ (radially scaled) too
                let f2 = adapted_frame(&cfg, &p.scaled(1.7).coords).unwrap();
                assert!(f2.diagnostics(&cfg).homogeneity < 1e-10);
            }
        }
    }

    #[test]
    fn rn2_last_row_is_exact() {
        let cfg = EmbeddingConfig::rn2(3, 1, 1.0).unwrap();
        let p = &sample_sigma(&cfg, 2, 1).unwrap()[0];
        let f = adapted_frame_rn2(&cfg, &p.coords).unwrap();
        let last = &f.e[4];
        for (k, j) in last.iter().enumerate() {
            assert_eq!(j.value(), if k == 4 { 1.0 } else { 0.0 });
            assert!(j.gradient().iter().all(|&g| g == 0.0));
        }
        assert_eq!(f.frame_metric.sign(4), 1.0);
        assert!(adapted_frame_rn2(&cfg.plane(), &p.coords[..4]).is_err());
    }

    #[test]
    fn coframe_routes_agree() {
        let cfg = EmbeddingConfig::rn1(3, -1, 1.0).unwrap();
        let p = &sample_sigma(&cfg, 11, 1).unwrap()[0];
        let f = adapted_frame(&cfg, &p.coords).unwrap();
        let alt = f.metric_coframe();
        for a in 0..4 {
            for b in 0..4 {
                assert!(f.theta[a][b].max_abs_diff(&alt[a][b]) < 1e-11);
            }
        }
    }

    #[test]
    fn rejects_wrong_side_of_cone() {
        let cfg = EmbeddingConfig::rn1(2, 1, 1.0).unwrap();
        // timelike point: y^2 > 0 but dS needs y^2 < 0
        assert!(matches!(adapted_frame(&cfg, &[2.0, 0.1, 0.1]), Err(Error::Domain(_))));
    }

    #[test]
    fn singular_matrix_detected() {
        let one = Jet::constant(2, 1.0);
        let m = vec![vec![one.clone(), one.clone()], vec![one.clone(), one]];
        assert!(matches!(invert_jet_matrix(&m), Err(Error::SingularCoframe { .. })));
    }

    #[test]
    fn anholonomy_defining_relation() {
        let cfg = EmbeddingConfig::rn1(3, 1, 1.0).unwrap();
        for p in sample_sigma(&cfg, 8, 5).unwrap() {
            let f = adapted_frame(&cfg, &p.coords).unwrap();
            let c = anholonomy(&f).unwrap();
            assert!(anholonomy_residual(&f, &c).unwrap() < 1e-9);
            for a in 0..4 {
                for b in 0..4 {
                    assert_eq!(c.get(a, b, b).value(), 0.0);
                    for cc in 0..4 {
                        assert_eq!(c.get(a, b, cc).value(), -c.get(a, cc, b).value());
                    }
                }
            }
        }
    }

    #[test]
    fn cartesian_frame_is_holonomic() {
        let m = MetricDiag::new(vec![1, -1, -1]).unwrap();
        let f = cartesian_frame(&m, &[0.1, 0.2, 0.3]);
        let c = anholonomy(&f).unwrap();
        for a in 0..3 {
            for b in 0..3 {
                for cc in 0..3 {
                    assert_eq!(c.get(a, b, cc).value(), 0.0);
                }
            }
        }
    }
}
