//! Differential forms at a point, in an orthonormal basis with structure
//! coefficients, and the operators acting on them.
//!
//! A [`Basis`] bundles the basis vector fields (as jets over the ambient
//! coordinates), their metric signs and their anholonomy coefficients. The
//! Cartesian basis of a flat space is the special case with vanishing
//! coefficients; the leading `n` vectors of an adapted frame give the
//! intrinsic calculus of `Σ_n` at points of `Σ_n`.

mod laplacian;
mod ops;

pub use laplacian::{box_compositional, box_frame_oneform, box_frame_oneform_terms, box_frame_scalar, OneFormTerms};
pub use ops::{codifferential, creator, eta_hat, exterior_d, hodge_star, hodge_star_inv, interior, lie, wedge};

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::ambient::MetricDiag;
use crate::error::{Error, Result};
use crate::frames::{Anholonomy, FrameField};
use crate::jets::Jet;

/// Largest basis rank supported by the index tables.
pub const MAX_RANK: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisTag {
    Coordinate,
    Frame,
}

#[derive(Debug, Clone)]
pub struct Basis {
    tag: BasisTag,
    /// `vectors[a][B]`: Cartesian components of `e_a`. Unused for the
    /// coordinate basis, where `e_a = ∂_a`.
    vectors: Vec<Vec<Jet>>,
    signs: MetricDiag,
    c: Anholonomy,
    jet_dim: usize,
}

impl Basis {
    /// Cartesian basis `∂_a` of a flat space.
    pub fn coordinate(metric: &MetricDiag) -> Self {
        let d = metric.dim();
        Self {
            tag: BasisTag::Coordinate,
            vectors: Vec::new(),
            signs: metric.clone(),
            c: Anholonomy::zero(d, d),
            jet_dim: d,
        }
    }

    pub fn frame(frame: &FrameField, c: &Anholonomy) -> Self {
        Self {
            tag: BasisTag::Frame,
            vectors: frame.e.clone(),
            signs: frame.frame_metric.clone(),
            c: c.clone(),
            jet_dim: frame.e[0][0].dim(),
        }
    }

    /// The sub-basis spanned by the first `k` vectors, with the structure
    /// coefficients truncated accordingly.
    pub fn leading(&self, k: usize) -> Self {
        let vectors = if self.tag == BasisTag::Coordinate { Vec::new() } else { self.vectors[..k].to_vec() };
        Self { tag: self.tag, vectors, signs: self.signs.truncated(k), c: self.c.leading(k), jet_dim: self.jet_dim }
    }

    pub fn tag(&self) -> BasisTag {
        self.tag
    }

    pub fn rank(&self) -> usize {
        self.signs.dim()
    }

    pub fn jet_dim(&self) -> usize {
        self.jet_dim
    }

    pub fn signs(&self) -> &MetricDiag {
        &self.signs
    }

    #[inline]
    pub fn sign(&self, a: usize) -> f64 {
        self.signs.sign(a)
    }

    /// Product of the signs, `sgn(g)`.
    pub fn det_sign(&self) -> f64 {
        self.signs.det_sign()
    }

    pub fn structure(&self) -> &Anholonomy {
        &self.c
    }

    /// `e_a(f)`
    pub fn derive(&self, a: usize, f: &Jet) -> Result<Jet> {
        match self.tag {
            BasisTag::Coordinate => f.partial(a),
            BasisTag::Frame => f.directional(&self.vectors[a]),
        }
    }

    /// Basis components `ω_a = ω(e_a)` of a one-form given by Cartesian
    /// components.
    pub fn components_of(&self, cartesian: &[Jet]) -> Vec<Jet> {
        match self.tag {
            BasisTag::Coordinate => cartesian[..self.rank()].to_vec(),
            BasisTag::Frame => self
                .vectors
                .iter()
                .map(|row| {
                    let mut acc = Jet::zero(self.jet_dim);
                    for (eb, ab) in row.iter().zip(cartesian) {
                        acc.add_product(1.0, eb, ab);
                    }
                    acc
                })
                .collect(),
        }
    }

    fn check(&self, form: &FormValue) -> Result<()> {
        if form.tag != self.tag {
            return Err(Error::BasisMismatch("form and basis kinds differ"));
        }
        if form.rank != self.rank() {
            return Err(Error::BasisMismatch("form and basis ranks differ"));
        }
        Ok(())
    }
}

/// Index tables for strictly increasing index sets, stored as bitmasks.
pub(crate) struct IndexTable {
    pub masks: Vec<Vec<u32>>,
    pub position: Vec<usize>,
}

pub(crate) fn index_table(rank: usize) -> &'static IndexTable {
    static TABLES: OnceLock<Vec<IndexTable>> = OnceLock::new();
    let tables = TABLES.get_or_init(|| {
        (0..=MAX_RANK)
            .map(|k| {
                let mut masks = vec![Vec::new(); k + 1];
                let mut position = vec![0; 1 << k];
                for m in 0u32..(1 << k) {
                    let p = m.count_ones() as usize;
                    position[m as usize] = masks[p].len();
                    masks[p].push(m);
                }
                IndexTable { masks, position }
            })
            .collect()
    });
    &tables[rank]
}

pub(crate) fn mask_indices(mask: u32) -> impl Iterator<Item = usize> {
    (0..32).filter(move |i| mask & (1 << i) != 0)
}

/// Sign of `e^b ∧ e^I` relative to `e^{I ∪ {b}}`, for `b ∉ I`.
#[inline]
pub(crate) fn insertion_sign(mask: u32, b: usize) -> f64 {
    if (mask & ((1u32 << b) - 1)).count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Sign of the permutation sorting the concatenation `(I, J)` of disjoint sets.
pub(crate) fn shuffle_sign(i: u32, j: u32) -> f64 {
    let mut inversions = 0;
    for b in mask_indices(j) {
        inversions += (i >> (b + 1)).count_ones();
    }
    if inversions % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn mask_of(indices: &[usize], rank: usize) -> Result<u32> {
    let mut mask = 0u32;
    let mut prev: Option<usize> = None;
    for &i in indices {
        if i >= rank || prev.is_some_and(|p| p >= i) {
            return Err(Error::Domain(format!("index tuple {indices:?} is not strictly increasing below {rank}")));
        }
        mask |= 1 << i;
        prev = Some(i);
    }
    Ok(mask)
}

/// Components of a p-form at a point; absent index sets are implicit zeros.
#[derive(Debug, Clone)]
pub struct FormValue {
    degree: usize,
    rank: usize,
    tag: BasisTag,
    comps: Vec<Jet>,
}

impl FormValue {
    pub fn zero(basis: &Basis, degree: usize) -> Result<Self> {
        let rank = basis.rank();
        if degree > rank {
            return Err(Error::InvalidDegree { degree, dim: rank });
        }
        let count = index_table(rank).masks[degree].len();
        Ok(Self { degree, rank, tag: basis.tag, comps: vec![Jet::zero(basis.jet_dim); count] })
    }

    pub fn scalar(basis: &Basis, value: Jet) -> Self {
        Self { degree: 0, rank: basis.rank(), tag: basis.tag, comps: vec![value] }
    }

    /// One-form from basis components `ω_a`.
    pub fn one_form(basis: &Basis, comps: Vec<Jet>) -> Result<Self> {
        if comps.len() != basis.rank() {
            return Err(Error::DimMismatch { left: comps.len(), right: basis.rank() });
        }
        Ok(Self { degree: 1, rank: basis.rank(), tag: basis.tag, comps })
    }

    /// The co-basis element `e^a`.
    pub fn basis_covector(basis: &Basis, a: usize) -> Result<Self> {
        let mut out = Self::zero(basis, 1)?;
        out.comps[a] = Jet::constant(basis.jet_dim, 1.0);
        Ok(out)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn tag(&self) -> BasisTag {
        self.tag
    }

    pub(crate) fn masks(&self) -> &'static [u32] {
        &index_table(self.rank).masks[self.degree]
    }

    pub(crate) fn from_comps(template: &FormValue, degree: usize, comps: Vec<Jet>) -> Self {
        Self { degree, rank: template.rank, tag: template.tag, comps }
    }

    #[inline]
    pub(crate) fn at_mask(&self, mask: u32) -> &Jet {
        &self.comps[index_table(self.rank).position[mask as usize]]
    }

    pub(crate) fn at_mask_mut(&mut self, mask: u32) -> &mut Jet {
        let pos = index_table(self.rank).position[mask as usize];
        &mut self.comps[pos]
    }

    pub(crate) fn set_mask(&mut self, mask: u32, value: Jet) {
        *self.at_mask_mut(mask) = value;
    }

    /// Component for a strictly increasing index tuple.
    pub fn component(&self, indices: &[usize]) -> Result<&Jet> {
        if indices.len() != self.degree {
            return Err(Error::InvalidDegree { degree: indices.len(), dim: self.rank });
        }
        Ok(self.at_mask(mask_of(indices, self.rank)?))
    }

    pub fn set_component(&mut self, indices: &[usize], value: Jet) -> Result<()> {
        if indices.len() != self.degree {
            return Err(Error::InvalidDegree { degree: indices.len(), dim: self.rank });
        }
        *self.at_mask_mut(mask_of(indices, self.rank)?) = value;
        Ok(())
    }

    /// `(indices, component)` pairs in a fixed order.
    pub fn iter(&self) -> impl Iterator<Item = (Vec<usize>, &Jet)> {
        self.masks().iter().zip(&self.comps).map(|(&m, j)| (mask_indices(m).collect(), j))
    }

    pub fn components(&self) -> &[Jet] {
        &self.comps
    }

    pub fn values(&self) -> Vec<f64> {
        self.comps.iter().map(Jet::value).collect()
    }

    fn check_compatible(&self, other: &FormValue) -> Result<()> {
        if self.tag != other.tag || self.rank != other.rank {
            return Err(Error::BasisMismatch("forms live in different bases"));
        }
        if self.degree != other.degree {
            return Err(Error::InvalidDegree { degree: other.degree, dim: self.rank });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &FormValue) -> Result<FormValue> {
        self.check_compatible(other)?;
        let comps = self.comps.iter().zip(&other.comps).map(|(a, b)| a + b).collect();
        Ok(Self::from_comps(self, self.degree, comps))
    }

    pub fn try_sub(&self, other: &FormValue) -> Result<FormValue> {
        self.check_compatible(other)?;
        let comps = self.comps.iter().zip(&other.comps).map(|(a, b)| a - b).collect();
        Ok(Self::from_comps(self, self.degree, comps))
    }

    pub fn scale(&self, s: f64) -> FormValue {
        Self::from_comps(self, self.degree, self.comps.iter().map(|c| c.scale(s)).collect())
    }

    /// Largest absolute component value.
    pub fn max_abs(&self) -> f64 {
        self.comps.iter().map(|c| c.value().abs()).fold(0.0, f64::max)
    }

    /// Largest absolute difference of component values.
    pub fn max_abs_diff(&self, other: &FormValue) -> Result<f64> {
        self.check_compatible(other)?;
        Ok(self.comps.iter().zip(&other.comps).map(|(a, b)| (a.value() - b.value()).abs()).fold(0.0, f64::max))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tables_enumerate_subsets() {
        let t = index_table(4);
        assert_eq!(t.masks[2].len(), 6);
        for (p, list) in t.masks.iter().enumerate() {
            for (i, &m) in list.iter().enumerate() {
                assert_eq!(m.count_ones() as usize, p);
                assert_eq!(t.position[m as usize], i);
            }
        }
    }

    #[test]
    fn permutation_signs() {
        // e^1 ∧ e^{0,2} = -e^{0,1,2}
        assert_eq!(insertion_sign(0b101, 1), -1.0);
        assert_eq!(insertion_sign(0b110, 0), 1.0);
        // (e^{1,2}, e^{0}) → one pair out of order per element: 2 inversions
        assert_eq!(shuffle_sign(0b110, 0b001), 1.0);
        assert_eq!(shuffle_sign(0b010, 0b001), -1.0);
        assert_eq!(shuffle_sign(0b001, 0b110), 1.0);
    }

    #[test]
    fn component_access() {
        let basis = Basis::coordinate(&MetricDiag::euclidean(3));
        let mut w = FormValue::zero(&basis, 2).unwrap();
        w.set_component(&[0, 2], Jet::constant(3, 4.0)).unwrap();
        assert_eq!(w.component(&[0, 2]).unwrap().value(), 4.0);
        assert_eq!(w.component(&[0, 1]).unwrap().value(), 0.0);
        assert!(w.component(&[2, 0]).is_err());
        assert!(w.component(&[0]).is_err());
        assert!(FormValue::zero(&basis, 4).is_err());
    }

    #[test]
    fn mixed_bases_rejected() {
        let coord = Basis::coordinate(&MetricDiag::euclidean(3));
        let small = coord.leading(2);
        let a = FormValue::basis_covector(&coord, 0).unwrap();
        let b = FormValue::basis_covector(&small, 0).unwrap();
        assert!(matches!(a.try_add(&b), Err(Error::BasisMismatch(_))));
    }
}
