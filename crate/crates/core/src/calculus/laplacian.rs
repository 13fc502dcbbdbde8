use super::ops::{codifferential, exterior_d};
use super::{Basis, FormValue};
use crate::error::{Error, Result};
use crate::jets::Jet;

/// `□ = -(dδ + δd)`
pub fn box_compositional(basis: &Basis, w: &FormValue) -> Result<FormValue> {
    let p = w.degree();
    let k = basis.rank();
    let mut total: Option<FormValue> = None;
    if p > 0 {
        total = Some(exterior_d(basis, &codifferential(basis, w)?)?);
    }
    if p < k {
        let dd = codifferential(basis, &exterior_d(basis, w)?)?;
        total = Some(match total {
            Some(t) => t.try_add(&dd)?,
            None => dd,
        });
    }
    Ok(total.expect("basis rank is at least one").scale(-1.0))
}

/// Frame expression of `□` on scalars:
/// `□φ = η^{ab} [e_a e_b φ + e_a(φ) c^p_{pb}]`.
pub fn box_frame_scalar(basis: &Basis, phi: &Jet) -> Result<f64> {
    let c = basis.structure();
    let mut acc = 0.0;
    for b in 0..basis.rank() {
        let db = basis.derive(b, phi)?;
        let ddb = basis.derive(b, &db)?;
        acc += basis.sign(b) * (ddb.value() + db.value() * c.trace(b).value());
    }
    Ok(acc)
}

/// Term-by-term value of the nine-term frame expression of `□` on a
/// one-form. `restricted[m][a]` collects the contributions to term `m` whose
/// indices all lie below the cut, i.e. the part expressible in the sub-basis
/// of the first `cut` vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct OneFormTerms {
    pub cut: usize,
    pub total: [Vec<f64>; 9],
    pub restricted: [Vec<f64>; 9],
}

impl OneFormTerms {
    /// `Σ_m total[m][a]`
    pub fn sum(&self) -> Vec<f64> {
        let k = self.total[0].len();
        (0..k).map(|a| self.total.iter().map(|t| t[a]).sum()).collect()
    }

    /// `total[m][a] - restricted[m][a]`: the part carrying an index at or
    /// above the cut.
    pub fn remainder(&self, m: usize) -> Vec<f64> {
        self.total[m].iter().zip(&self.restricted[m]).map(|(t, r)| t - r).collect()
    }

    pub fn remainder_sum(&self) -> Vec<f64> {
        let k = self.total[0].len();
        (0..k).map(|a| (0..9).map(|m| self.total[m][a] - self.restricted[m][a]).sum()).collect()
    }
}

pub fn box_frame_oneform_terms(basis: &Basis, a: &FormValue, cut: usize) -> Result<OneFormTerms> {
    if a.degree() != 1 {
        return Err(Error::InvalidDegree { degree: a.degree(), dim: basis.rank() });
    }
    basis.check(a)?;
    let k = basis.rank();
    let c = basis.structure();
    let s: Vec<f64> = (0..k).map(|i| basis.sign(i)).collect();
    let comps = a.components();
    let av: Vec<f64> = comps.iter().map(Jet::value).collect();

    // da[b][x] = e_b(a_x), dda[b][x] = e_b(e_b(a_x))
    let mut da = vec![vec![0.0; k]; k];
    let mut dda = vec![vec![0.0; k]; k];
    for b in 0..k {
        for x in 0..k {
            let d1 = basis.derive(b, &comps[x])?;
            dda[b][x] = basis.derive(b, &d1)?.value();
            da[b][x] = d1.value();
        }
    }
    let idx3 = |x: usize, y: usize, z: usize| (x * k + y) * k + z;
    let mut cv = vec![0.0; k * k * k];
    // dc[b][x,y,z] = e_b(c^x_{yz})
    let mut dc = vec![vec![0.0; k * k * k]; k];
    for x in 0..k {
        for y in 0..k {
            for z in 0..k {
                let cj = c.get(x, y, z);
                cv[idx3(x, y, z)] = cj.value();
                for b in 0..k {
                    dc[b][idx3(x, y, z)] = basis.derive(b, cj)?.value();
                }
            }
        }
    }
    let cc = |x: usize, y: usize, z: usize| cv[idx3(x, y, z)];
    // trace t_b = c^p_{pb} and dt[x][b] = e_x(t_b)
    // with `_in` the trace only runs below the cut
    let t: Vec<f64> = (0..k).map(|b| (0..k).map(|p| cc(p, p, b)).sum()).collect();
    let t_in: Vec<f64> = (0..k).map(|b| (0..cut).map(|p| cc(p, p, b)).sum()).collect();
    let dt: Vec<Vec<f64>> =
        (0..k).map(|x| (0..k).map(|b| (0..k).map(|p| dc[x][idx3(p, p, b)]).sum()).collect()).collect();
    let dt_in: Vec<Vec<f64>> =
        (0..k).map(|x| (0..k).map(|b| (0..cut).map(|p| dc[x][idx3(p, p, b)]).sum()).collect()).collect();

    let mut total: [Vec<f64>; 9] = std::array::from_fn(|_| vec![0.0; k]);
    let mut restricted: [Vec<f64>; 9] = std::array::from_fn(|_| vec![0.0; k]);
    // `v_in` is the contribution with every summed index below the cut
    let mut add = |m: usize, fa: usize, inside: bool, v: f64, v_in: f64| {
        total[m][fa] += v;
        if inside {
            restricted[m][fa] += v_in;
        }
    };
    let ins = |ix: &[usize]| ix.iter().all(|&i| i < cut);

    for fa in 0..k {
        for b in 0..k {
            let inside = ins(&[fa, b]);
            let v = s[b] * dda[b][fa];
            add(0, fa, inside, v, v);
            add(4, fa, inside, s[b] * t[b] * da[b][fa], s[b] * t_in[b] * da[b][fa]);
            add(7, fa, inside, s[b] * av[b] * dt[fa][b], s[b] * av[b] * dt_in[fa][b]);
            for x in 0..k {
                // x is the remaining summed index of terms 2, 3, 4, 6 and 7
                let inside = ins(&[fa, b, x]);
                let v = cc(x, fa, b) * s[b] * da[x][b];
                add(1, fa, inside, v, v);
                let v = s[b] * cc(x, fa, b) * da[b][x];
                add(2, fa, inside, v, v);
                let v = -s[b] * s[fa] * cc(fa, x, b) * s[x] * da[b][x];
                add(3, fa, inside, v, v);
                let v = -s[b] * av[x] * dc[b][idx3(x, b, fa)];
                add(5, fa, inside, v, v);
                let w = -s[b] * av[x] * cc(x, b, fa);
                add(6, fa, inside, w * t[b], w * t_in[b]);
                for m in 0..k {
                    let v = -0.5 * av[x] * s[m] * s[b] * s[fa] * cc(x, m, b) * cc(fa, m, b);
                    add(8, fa, ins(&[fa, b, x, m]), v, v);
                }
            }
        }
    }
    Ok(OneFormTerms { cut, total, restricted })
}

/// Nine-term frame expression of `□` on a one-form, summed. Components are
/// value-only jets.
pub fn box_frame_oneform(basis: &Basis, a: &FormValue) -> Result<FormValue> {
    let terms = box_frame_oneform_terms(basis, a, basis.rank())?;
    let jd = basis.jet_dim();
    FormValue::one_form(basis, terms.sum().into_iter().map(|v| Jet::constant(jd, v).truncated(0)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ambient::MetricDiag;
    use crate::jets::seed_coordinates;

    #[test]
    fn flat_box_of_simple_fields() {
        let b = Basis::coordinate(&MetricDiag::euclidean(3));
        let y = seed_coordinates(&[0.7, -0.3, 1.2]);
        let zero = Jet::zero(3);
        // a = (y^0)^2 dy^1 → 2 dy^1
        let a = FormValue::one_form(&b, vec![zero.clone(), &y[0] * &y[0], zero.clone()]).unwrap();
        let boxed = box_compositional(&b, &a).unwrap();
        assert!((boxed.values()[1] - 2.0).abs() < 1e-14);
        assert!(boxed.values()[0].abs() < 1e-14 && boxed.values()[2].abs() < 1e-14);
        let framed = box_frame_oneform(&b, &a).unwrap();
        assert!(framed.max_abs_diff(&boxed).unwrap() < 1e-14);
        // a = dy^0 → 0
        let a = FormValue::basis_covector(&b, 0).unwrap();
        assert_eq!(box_compositional(&b, &a).unwrap().max_abs(), 0.0);
        // y^0 y^1 is harmonic
        let phi = FormValue::scalar(&b, &y[0] * &y[1]);
        assert!(box_compositional(&b, &phi).unwrap().max_abs() < 1e-14);
        assert!(box_frame_scalar(&b, &(&y[0] * &y[1])).unwrap().abs() < 1e-14);
    }

    #[test]
    fn signature_weighted_trace() {
        let b = Basis::coordinate(&MetricDiag::new(vec![1, -1, -1]).unwrap());
        let y = seed_coordinates(&[0.7, -0.3, 1.2]);
        // φ = (y^0)^2 + 3 (y^1)^2 → 2 - 6
        let phi = &(&y[0] * &y[0]) + &(&y[1] * &y[1]).scale(3.0);
        assert!((box_frame_scalar(&b, &phi).unwrap() + 4.0).abs() < 1e-14);
        let boxed = box_compositional(&b, &FormValue::scalar(&b, phi)).unwrap();
        assert!((boxed.values()[0] + 4.0).abs() < 1e-14);
    }
}
