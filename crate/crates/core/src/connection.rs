//! Levi-Civita connection, curvature and the Laplace–Beltrami operator in an
//! orthonormal basis with structure coefficients.
//!
//! Conventions: `∇_{e_c} e_b = ω^a_{bc} e_a`,
//! `R(e_c, e_d) e_b = R^a_{bcd} e_a` and `r_{bd} = R^a_{bad}`.

use crate::calculus::{Basis, FormValue};
use crate::error::{Error, Result};
use crate::jets::Jet;

use crate::calculus::index_table;

#[derive(Debug, Clone)]
pub struct ConnectionCoeffs {
    k: usize,
    omega: Vec<Jet>,
}

impl ConnectionCoeffs {
    pub fn rank(&self) -> usize {
        self.k
    }

    /// `ω^a_{bc}`
    #[inline]
    pub fn get(&self, a: usize, b: usize, c: usize) -> &Jet {
        &self.omega[(a * self.k + b) * self.k + c]
    }

    /// Largest `|ω_{abc} + ω_{bac}|` with the first index lowered.
    pub fn metricity_defect(&self, basis: &Basis) -> f64 {
        let k = self.k;
        let mut worst = 0.0f64;
        for a in 0..k {
            for b in 0..k {
                for c in 0..k {
                    let lo = basis.sign(a) * self.get(a, b, c).value() + basis.sign(b) * self.get(b, a, c).value();
                    worst = worst.max(lo.abs());
                }
            }
        }
        worst
    }

    /// Largest violation of vanishing torsion,
    /// `ω^a_{cb} - ω^a_{bc} - c^a_{bc}` (from `∇_b e_c - ∇_c e_b = [e_b, e_c]`).
    pub fn torsion_defect(&self, basis: &Basis) -> f64 {
        let k = self.k;
        let c = basis.structure();
        let mut worst = 0.0f64;
        for a in 0..k {
            for b in 0..k {
                for cc in 0..k {
                    let t = self.get(a, cc, b).value() - self.get(a, b, cc).value() - c.get(a, b, cc).value();
                    worst = worst.max(t.abs());
                }
            }
        }
        worst
    }
}

/// Koszul formula for constant frame metric:
/// `ω_{abc} = ½ (c_{a,cb} - c_{c,ba} + c_{b,ac})` with `c_{a,bc} = η_aa c^a_{bc}`.
pub fn levi_civita(basis: &Basis) -> ConnectionCoeffs {
    let k = basis.rank();
    let c = basis.structure();
    let jd = basis.jet_dim();
    let low = |a: usize, b: usize, cc: usize| c.get(a, b, cc).scale(basis.sign(a));
    let mut omega = Vec::with_capacity(k * k * k);
    for a in 0..k {
        for b in 0..k {
            for cc in 0..k {
                let mut acc = Jet::zero(jd).truncated(1);
                acc += &low(a, cc, b);
                acc -= &low(cc, b, a);
                acc += &low(b, a, cc);
                // raise the first index back
                omega.push(acc.scale(0.5 * basis.sign(a)));
            }
        }
    }
    ConnectionCoeffs { k, omega }
}

#[derive(Debug, Clone)]
pub struct CurvatureAtPoint {
    k: usize,
    riemann: Vec<f64>,
    ricci: Vec<f64>,
    lowered: Vec<f64>,
}

impl CurvatureAtPoint {
    pub fn rank(&self) -> usize {
        self.k
    }

    #[inline]
    fn idx(&self, a: usize, b: usize, c: usize, d: usize) -> usize {
        ((a * self.k + b) * self.k + c) * self.k + d
    }

    /// `R^a_{bcd}`
    pub fn riemann(&self, a: usize, b: usize, c: usize, d: usize) -> f64 {
        self.riemann[self.idx(a, b, c, d)]
    }

    /// `R_{abcd} = η_aa R^a_{bcd}`
    pub fn lowered(&self, a: usize, b: usize, c: usize, d: usize) -> f64 {
        self.lowered[self.idx(a, b, c, d)]
    }

    /// `r_{bd} = R^a_{bad}`
    pub fn ricci(&self, b: usize, d: usize) -> f64 {
        self.ricci[b * self.k + d]
    }

    /// Largest first-Bianchi cyclic sum `R^a_{bcd} + R^a_{cdb} + R^a_{dbc}`.
    pub fn bianchi_defect(&self) -> f64 {
        let k = self.k;
        let mut worst = 0.0f64;
        for a in 0..k {
            for b in 0..k {
                for c in 0..k {
                    for d in 0..k {
                        let s = self.riemann(a, b, c, d) + self.riemann(a, c, d, b) + self.riemann(a, d, b, c);
                        worst = worst.max(s.abs());
                    }
                }
            }
        }
        worst
    }

    pub fn ricci_asymmetry(&self) -> f64 {
        let k = self.k;
        let mut worst = 0.0f64;
        for b in 0..k {
            for d in 0..k {
                worst = worst.max((self.ricci(b, d) - self.ricci(d, b)).abs());
            }
        }
        worst
    }

    /// Least-squares fit of `R_{abcd} = K (g_ac g_bd - g_ad g_bc)`;
    /// returns `(K, max |R - K G|)`.
    pub fn constant_curvature_fit(&self, basis: &Basis) -> (f64, f64) {
        let k = self.k;
        let g = |a: usize, b: usize| if a == b { basis.sign(a) } else { 0.0 };
        let mut num = 0.0;
        let mut den = 0.0;
        let mut pairs = Vec::with_capacity(self.lowered.len());
        for a in 0..k {
            for b in 0..k {
                for c in 0..k {
                    for d in 0..k {
                        let gg = g(a, c) * g(b, d) - g(a, d) * g(b, c);
                        let r = self.lowered(a, b, c, d);
                        num += r * gg;
                        den += gg * gg;
                        pairs.push((r, gg));
                    }
                }
            }
        }
        let kappa = if den > 0.0 { num / den } else { 0.0 };
        let residual = pairs.iter().map(|(r, gg)| (r - kappa * gg).abs()).fold(0.0, f64::max);
        (kappa, residual)
    }
}

/// `R^a_{bcd} = e_c(ω^a_{bd}) - e_d(ω^a_{bc}) + ω^e_{bd} ω^a_{ec} - ω^e_{bc} ω^a_{ed} - c^e_{cd} ω^a_{be}`
pub fn curvature(basis: &Basis, conn: &ConnectionCoeffs) -> Result<CurvatureAtPoint> {
    let k = basis.rank();
    let c = basis.structure();
    let w = |a: usize, b: usize, cc: usize| conn.get(a, b, cc).value();
    // dw[x][a,b,c] = e_x(ω^a_{bc})
    let mut dw = vec![vec![0.0; k * k * k]; k];
    for (x, slot) in dw.iter_mut().enumerate() {
        for (i, om) in conn.omega.iter().enumerate() {
            slot[i] = basis.derive(x, om)?.value();
        }
    }
    let i3 = |a: usize, b: usize, cc: usize| (a * k + b) * k + cc;
    let mut riemann = vec![0.0; k * k * k * k];
    for a in 0..k {
        for b in 0..k {
            for cc in 0..k {
                for d in 0..k {
                    let mut r = dw[cc][i3(a, b, d)] - dw[d][i3(a, b, cc)];
                    for e in 0..k {
                        r += w(e, b, d) * w(a, e, cc) - w(e, b, cc) * w(a, e, d) - c.get(e, cc, d).value() * w(a, b, e);
                    }
                    riemann[((a * k + b) * k + cc) * k + d] = r;
                }
            }
        }
    }
    let mut lowered = riemann.clone();
    for a in 0..k {
        let s = basis.sign(a);
        for v in &mut lowered[a * k * k * k..(a + 1) * k * k * k] {
            *v *= s;
        }
    }
    let mut ricci = vec![0.0; k * k];
    for b in 0..k {
        for d in 0..k {
            ricci[b * k + d] = (0..k).map(|a| riemann[((a * k + b) * k + a) * k + d]).sum();
        }
    }
    Ok(CurvatureAtPoint { k, riemann, ricci, lowered })
}

/// Mask and sign of the index set obtained by replacing `i ∈ I` with `d`.
fn replace_index(mask: u32, i: usize, d: usize) -> Option<(u32, f64)> {
    if d == i {
        return Some((mask, 1.0));
    }
    let rest = mask & !(1 << i);
    if rest & (1 << d) != 0 {
        return None;
    }
    let (lo, hi) = if i < d { (i, d) } else { (d, i) };
    let between = rest & (((1u32 << hi) - 1) & !((1u32 << (lo + 1)) - 1));
    let sign = if between.count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
    Some((rest | (1 << d), sign))
}

/// Components of the first covariant derivative: `t[b]` is the p-form
/// `∇_{e_b} α`, as order-1 jets.
pub fn covariant_derivative(basis: &Basis, conn: &ConnectionCoeffs, alpha: &FormValue) -> Result<Vec<FormValue>> {
    let k = basis.rank();
    let p = alpha.degree();
    let masks = &index_table(k).masks[p];
    (0..k)
        .map(|b| {
            let mut out = FormValue::zero(basis, p)?;
            for (pos, &m) in masks.iter().enumerate() {
                let mut acc = basis.derive(b, &alpha.components()[pos])?;
                for i in (0..k).filter(|i| m & (1 << i) != 0) {
                    for d in 0..k {
                        if let Some((m2, s)) = replace_index(m, i, d) {
                            acc.add_product(-s, conn.get(d, i, b), alpha_at(alpha, m2));
                        }
                    }
                }
                out.set_mask(m, acc);
            }
            Ok(out)
        })
        .collect()
}

fn alpha_at(alpha: &FormValue, mask: u32) -> &Jet {
    let pos = index_table(alpha.rank()).position[mask as usize];
    &alpha.components()[pos]
}

/// `Δα = η^{ab} (∇_a ∇_b α - ∇_{∇_a e_b} α)`
pub fn laplace_beltrami(basis: &Basis, conn: &ConnectionCoeffs, alpha: &FormValue) -> Result<FormValue> {
    Ok(laplace_beltrami_scaled(basis, conn, alpha)?.0)
}

/// [`laplace_beltrami`] together with the largest single-direction term
/// `|(∇_a ∇_a α)_I|` of the trace, which bounds the cancellation in the sum.
pub fn laplace_beltrami_scaled(basis: &Basis, conn: &ConnectionCoeffs, alpha: &FormValue) -> Result<(FormValue, f64)> {
    let k = basis.rank();
    let p = alpha.degree();
    let t = covariant_derivative(basis, conn, alpha)?;
    let masks = &index_table(k).masks[p];
    let jd = basis.jet_dim();
    let mut out = FormValue::zero(basis, p)?;
    let mut scale = 0.0f64;
    for (pos, &m) in masks.iter().enumerate() {
        let mut acc = 0.0;
        for a in 0..k {
            // (∇_a T)_{a, I} = e_a(T_{a,I}) - ω^d_{aa} T_{d,I} - Σ_i ω^d_{ia} T_{a, I:i→d}
            let mut v = basis.derive(a, &t[a].components()[pos])?.value();
            for d in 0..k {
                v -= conn.get(d, a, a).value() * t[d].components()[pos].value();
            }
            for i in (0..k).filter(|i| m & (1 << i) != 0) {
                for d in 0..k {
                    if let Some((m2, s)) = replace_index(m, i, d) {
                        v -= s * conn.get(d, i, a).value() * alpha_at(&t[a], m2).value();
                    }
                }
            }
            acc += basis.sign(a) * v;
            scale = scale.max(v.abs());
        }
        out.set_mask(m, Jet::constant(jd, acc).truncated(0));
    }
    Ok((out, scale))
}

/// Curvature endomorphism `j^a i^b R(e_a, e_b)` acting on a p-form, where
/// `R(u, v)` acts as a derivation: `(R(u,v)α)(X..) = -Σ α(.., R(u,v)X_i, ..)`.
pub fn weitzenboeck_term(basis: &Basis, curv: &CurvatureAtPoint, alpha: &FormValue) -> Result<FormValue> {
    let k = basis.rank();
    let p = alpha.degree();
    let jd = basis.jet_dim();
    let mut out = FormValue::zero(basis, p)?;
    if p == 0 {
        return Ok(out);
    }
    let masks = &index_table(k).masks[p];
    let lower = &index_table(k).masks[p - 1];
    let mut acc = vec![0.0; masks.len()];
    for a in 0..k {
        for b in 0..k {
            // β = R(e_a, e_b) α
            let beta: Vec<f64> = masks
                .iter()
                .map(|&m| {
                    let mut v = 0.0;
                    for i in (0..k).filter(|i| m & (1 << i) != 0) {
                        for d in 0..k {
                            if let Some((m2, s)) = replace_index(m, i, d) {
                                v -= s * curv.riemann(d, i, a, b) * alpha_at(alpha, m2).value();
                            }
                        }
                    }
                    v
                })
                .collect();
            // i^b β = η^{bb} i_{e_b} β, then e^a ∧
            for &j in lower {
                if j & (1 << b) != 0 || j & (1 << a) != 0 {
                    continue;
                }
                let pos_b = index_table(k).position[(j | (1 << b)) as usize];
                let ib = basis.sign(b) * insertion(j, b) * beta[pos_b];
                let target = index_table(k).position[(j | (1 << a)) as usize];
                acc[target] += insertion(j, a) * ib;
            }
        }
    }
    for (pos, &m) in masks.iter().enumerate() {
        out.set_mask(m, Jet::constant(jd, acc[pos]).truncated(0));
    }
    Ok(out)
}

fn insertion(mask: u32, b: usize) -> f64 {
    if (mask & ((1u32 << b) - 1)).count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// One-form Ricci term `r(♯α, ·)`, components `α^b r_{ba}`.
pub fn ricci_oneform(basis: &Basis, curv: &CurvatureAtPoint, alpha: &FormValue) -> Result<FormValue> {
    if alpha.degree() != 1 {
        return Err(Error::InvalidDegree { degree: alpha.degree(), dim: basis.rank() });
    }
    let k = basis.rank();
    let jd = basis.jet_dim();
    let comps = (0..k)
        .map(|a| {
            let v: f64 = (0..k).map(|b| basis.sign(b) * alpha.components()[b].value() * curv.ricci(b, a)).sum();
            Jet::constant(jd, v).truncated(0)
        })
        .collect();
    FormValue::one_form(basis, comps)
}

/// Max-abs components of `□α - Δα - j^a i^b R(e_a, e_b) α`.
pub fn weitzenboeck_residual(basis: &Basis, alpha: &FormValue) -> Result<f64> {
    let conn = levi_civita(basis);
    let curv = curvature(basis, &conn)?;
    let boxed = crate::calculus::box_compositional(basis, alpha)?;
    let lb = laplace_beltrami(basis, &conn, alpha)?;
    let w = weitzenboeck_term(basis, &curv, alpha)?;
    boxed.try_sub(&lb)?.max_abs_diff(&w)
}

/// `δα = -i^a ∇_a α`
pub fn codifferential_via_connection(basis: &Basis, conn: &ConnectionCoeffs, alpha: &FormValue) -> Result<FormValue> {
    let k = basis.rank();
    let p = alpha.degree();
    if p == 0 {
        return Err(Error::InvalidDegree { degree: 0, dim: k });
    }
    let t = covariant_derivative(basis, conn, alpha)?;
    let mut out = FormValue::zero(basis, p - 1)?;
    for &j in &index_table(k).masks[p - 1] {
        let mut acc = Jet::zero(basis.jet_dim()).truncated(1);
        for (a, ta) in t.iter().enumerate() {
            if j & (1 << a) == 0 {
                acc.add_scaled(-basis.sign(a) * insertion(j, a), alpha_at(ta, j | (1 << a)));
            }
        }
        out.set_mask(j, acc);
    }
    Ok(out)
}

/// `dα = j^a ∇_a α`
pub fn exterior_d_via_connection(basis: &Basis, conn: &ConnectionCoeffs, alpha: &FormValue) -> Result<FormValue> {
    let k = basis.rank();
    let p = alpha.degree();
    if p >= k {
        return Err(Error::InvalidDegree { degree: p + 1, dim: k });
    }
    let t = covariant_derivative(basis, conn, alpha)?;
    let mut out = FormValue::zero(basis, p + 1)?;
    for &m in &index_table(k).masks[p + 1] {
        let mut acc = Jet::zero(basis.jet_dim()).truncated(1);
        for a in (0..k).filter(|a| m & (1 << a) != 0) {
            let rest = m & !(1 << a);
            acc.add_scaled(insertion(rest, a), alpha_at(&t[a], rest));
        }
        out.set_mask(m, acc);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ambient::MetricDiag;
    use crate::jets::seed_coordinates;

    #[test]
    fn flat_connection_vanishes() {
        let b = Basis::coordinate(&MetricDiag::new(vec![1, -1, -1]).unwrap());
        let conn = levi_civita(&b);
        for a in 0..3 {
            for x in 0..3 {
                for y in 0..3 {
                    assert_eq!(conn.get(a, x, y).value(), 0.0);
                }
            }
        }
        let curv = curvature(&b, &conn).unwrap();
        assert_eq!(curv.constant_curvature_fit(&b), (0.0, 0.0));
    }

    #[test]
    fn replace_index_signs() {
        // I = {0, 2}, replace 0 by 3: (3, 2) → -(2, 3)
        assert_eq!(replace_index(0b0101, 0, 3), Some((0b1100, -1.0)));
        // replace 2 by 1: (0, 1) sorted already
        assert_eq!(replace_index(0b0101, 2, 1), Some((0b0011, 1.0)));
        assert_eq!(replace_index(0b0101, 2, 0), None);
    }

    #[test]
    fn flat_weitzenboeck() {
        let b = Basis::coordinate(&MetricDiag::new(vec![1, -1, 1]).unwrap());
        let y = seed_coordinates(&[0.5, -0.4, 0.9]);
        let a = FormValue::one_form(&b, vec![&y[0] * &y[1], &y[2] * &y[2], &y[0] * &y[2]]).unwrap();
        assert!(weitzenboeck_residual(&b, &a).unwrap() < 1e-13);
    }
}
