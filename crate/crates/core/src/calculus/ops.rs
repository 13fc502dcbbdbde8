use super::{index_table, insertion_sign, mask_indices, shuffle_sign, Basis, FormValue};
use crate::error::{Error, Result};
use crate::jets::Jet;

/// Exterior derivative via the invariant formula
/// `dω(e_0..e_p) = Σ (-1)^i e_i(ω(..ê_i..)) + Σ_{i<j} (-1)^{i+j} ω([e_i,e_j], ..ê_i..ê_j..)`.
pub fn exterior_d(basis: &Basis, w: &FormValue) -> Result<FormValue> {
    basis.check(w)?;
    let k = basis.rank();
    let p = w.degree();
    if p >= k {
        return Err(Error::InvalidDegree { degree: p + 1, dim: k });
    }
    let c = basis.structure();
    let jd = basis.jet_dim();
    let masks = &index_table(k).masks[p + 1];
    let mut comps = Vec::with_capacity(masks.len());
    for &big in masks {
        let idx: Vec<usize> = mask_indices(big).collect();
        let mut acc = Jet::zero(jd);
        for (i, &ai) in idx.iter().enumerate() {
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            acc.add_scaled(sign, &basis.derive(ai, w.at_mask(big & !(1 << ai)))?);
        }
        for (i, &ai) in idx.iter().enumerate() {
            for (j, &aj) in idx.iter().enumerate().skip(i + 1) {
                let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
                let rest = big & !(1 << ai) & !(1 << aj);
                for b in 0..k {
                    if rest & (1 << b) != 0 {
                        continue;
                    }
                    let cb = c.get(b, ai, aj);
                    if cb.value() == 0.0 && cb.gradient().iter().all(|&g| g == 0.0) {
                        continue;
                    }
                    acc.add_product(sign * insertion_sign(rest, b), cb, w.at_mask(rest | (1 << b)));
                }
            }
        }
        comps.push(acc);
    }
    Ok(FormValue::from_comps(w, p + 1, comps))
}

/// `η̂ ω = (-1)^p ω`
pub fn eta_hat(w: &FormValue) -> FormValue {
    if w.degree().is_multiple_of(2) {
        w.clone()
    } else {
        w.scale(-1.0)
    }
}

fn sign_product(basis: &Basis, mask: u32) -> f64 {
    mask_indices(mask).map(|i| basis.sign(i)).product()
}

/// Hodge star in an orthonormal basis: `*e^I = η^{II} σ(I, I^c) e^{I^c}`.
pub fn hodge_star(basis: &Basis, w: &FormValue) -> Result<FormValue> {
    basis.check(w)?;
    let k = basis.rank();
    let full = (1u32 << k) - 1;
    let mut out = FormValue::zero(basis, k - w.degree())?;
    for (&m, comp) in w.masks().iter().zip(w.components()) {
        let co = full & !m;
        *out.at_mask_mut(co) = comp.scale(sign_product(basis, m) * shuffle_sign(m, co));
    }
    Ok(out)
}

/// Inverse Hodge star: `*^{-1} e^J = η^{II} σ(I, J) e^I` with `I = J^c`.
pub fn hodge_star_inv(basis: &Basis, w: &FormValue) -> Result<FormValue> {
    basis.check(w)?;
    let k = basis.rank();
    let full = (1u32 << k) - 1;
    let mut out = FormValue::zero(basis, k - w.degree())?;
    for (&m, comp) in w.masks().iter().zip(w.components()) {
        let co = full & !m;
        *out.at_mask_mut(co) = comp.scale(sign_product(basis, co) * shuffle_sign(co, m));
    }
    Ok(out)
}

/// `δ = *^{-1} d * η̂`
pub fn codifferential(basis: &Basis, w: &FormValue) -> Result<FormValue> {
    if w.degree() == 0 {
        return Err(Error::InvalidDegree { degree: 0, dim: basis.rank() });
    }
    let starred = hodge_star(basis, &eta_hat(w))?;
    hodge_star_inv(basis, &exterior_d(basis, &starred)?)
}

/// Interior product `i_v ω`, with `v` given by basis components `v^b`.
pub fn interior(basis: &Basis, v: &[Jet], w: &FormValue) -> Result<FormValue> {
    basis.check(w)?;
    let k = basis.rank();
    if v.len() != k {
        return Err(Error::DimMismatch { left: v.len(), right: k });
    }
    let p = w.degree();
    if p == 0 {
        return Err(Error::InvalidDegree { degree: 0, dim: k });
    }
    let mut out = FormValue::zero(basis, p - 1)?;
    for &m in &index_table(k).masks[p - 1] {
        let mut acc = Jet::zero(basis.jet_dim());
        for (b, vb) in v.iter().enumerate() {
            if m & (1 << b) == 0 {
                acc.add_product(insertion_sign(m, b), vb, w.at_mask(m | (1 << b)));
            }
        }
        *out.at_mask_mut(m) = acc;
    }
    Ok(out)
}

/// Exterior product `α ∧ β`.
pub fn wedge(basis: &Basis, a: &FormValue, b: &FormValue) -> Result<FormValue> {
    basis.check(a)?;
    basis.check(b)?;
    let degree = a.degree() + b.degree();
    let mut out = FormValue::zero(basis, degree)?;
    for (&ma, ca) in a.masks().iter().zip(a.components()) {
        for (&mb, cb) in b.masks().iter().zip(b.components()) {
            if ma & mb != 0 {
                continue;
            }
            out.at_mask_mut(ma | mb).add_product(shuffle_sign(ma, mb), ca, cb);
        }
    }
    Ok(out)
}

/// Creation operator `j_v ω = ṽ ∧ ω`, with `ṽ` the metric dual of `v`.
pub fn creator(basis: &Basis, v: &[Jet], w: &FormValue) -> Result<FormValue> {
    let lowered: Vec<Jet> = v.iter().enumerate().map(|(a, va)| va.scale(basis.sign(a))).collect();
    wedge(basis, &FormValue::one_form(basis, lowered)?, w)
}

/// Lie derivative by the Cartan formula `L_v = i_v d + d i_v`.
pub fn lie(basis: &Basis, v: &[Jet], w: &FormValue) -> Result<FormValue> {
    let mut out = if w.degree() < basis.rank() {
        interior(basis, v, &exterior_d(basis, w)?)?
    } else {
        FormValue::zero(basis, w.degree())?
    };
    if w.degree() > 0 {
        out = out.try_add(&exterior_d(basis, &interior(basis, v, w)?)?)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ambient::MetricDiag;
    use crate::jets::seed_coordinates;

    fn euclid3() -> Basis {
        Basis::coordinate(&MetricDiag::euclidean(3))
    }

    #[test]
    fn d_of_simple_one_form() {
        // d(y^0 dy^1) = dy^0 ∧ dy^1
        let b = euclid3();
        let y = seed_coordinates(&[0.3, -0.2, 0.5]);
        let mut w = FormValue::zero(&b, 1).unwrap();
        w.set_component(&[1], y[0].clone()).unwrap();
        let dw = exterior_d(&b, &w).unwrap();
        assert_eq!(dw.component(&[0, 1]).unwrap().value(), 1.0);
        assert_eq!(dw.component(&[0, 2]).unwrap().value(), 0.0);
        assert_eq!(dw.component(&[1, 2]).unwrap().value(), 0.0);
    }

    #[test]
    fn star_in_euclidean_space() {
        let b = euclid3();
        let dy0 = FormValue::basis_covector(&b, 0).unwrap();
        let s = hodge_star(&b, &dy0).unwrap();
        assert_eq!(s.component(&[1, 2]).unwrap().value(), 1.0);
        let mut vol = FormValue::zero(&b, 3).unwrap();
        vol.set_component(&[0, 1, 2], Jet::constant(3, 1.0)).unwrap();
        assert_eq!(hodge_star(&b, &vol).unwrap().component(&[]).unwrap().value(), 1.0);
        let one = FormValue::scalar(&b, Jet::constant(3, 1.0));
        assert_eq!(hodge_star(&b, &one).unwrap().component(&[0, 1, 2]).unwrap().value(), 1.0);
    }

    #[test]
    fn star_pairing_in_lorentzian_signature() {
        // β ∧ *α = (β, α) vol with (e^I, e^I) = η^{II}
        let b = Basis::coordinate(&MetricDiag::new(vec![1, -1, -1, 1]).unwrap());
        for p in 0..=4 {
            for &m in &index_table(4).masks[p] {
                let mut a = FormValue::zero(&b, p).unwrap();
                *a.at_mask_mut(m) = Jet::constant(4, 1.0);
                let w = wedge(&b, &a, &hodge_star(&b, &a).unwrap()).unwrap();
                let expected = sign_product(&b, m);
                assert_eq!(w.component(&[0, 1, 2, 3]).unwrap().value(), expected);
            }
        }
    }

    #[test]
    fn codifferential_is_minus_divergence() {
        let b = euclid3();
        let y = seed_coordinates(&[0.4, 1.1, -0.7]);
        // α = (y0^2, y0 y1, y2) → div = 2 y0 + y0 + 1
        let a = FormValue::one_form(&b, vec![&y[0] * &y[0], &y[0] * &y[1], y[2].clone()]).unwrap();
        let da = codifferential(&b, &a).unwrap();
        assert!((da.component(&[]).unwrap().value() + (3.0 * 0.4 + 1.0)).abs() < 1e-14);
    }

    #[test]
    fn degree_errors() {
        let b = euclid3();
        let one = FormValue::scalar(&b, Jet::constant(3, 1.0));
        assert!(matches!(codifferential(&b, &one), Err(Error::InvalidDegree { .. })));
        let mut vol = FormValue::zero(&b, 3).unwrap();
        vol.set_component(&[0, 1, 2], Jet::constant(3, 1.0)).unwrap();
        assert!(matches!(exterior_d(&b, &vol), Err(Error::InvalidDegree { .. })));
    }
}
