//! Second-order truncated Taylor jets in `d` variables.
//!
//! A [`Jet`] carries the value, gradient and Hessian of a smooth quantity at a
//! fixed base point. Arithmetic follows the Leibniz and chain rules truncated
//! at order two, so every composite quantity built from seeded coordinates
//! carries exact first and second partial derivatives.
//!
//! Each jet also records how many derivative orders are still meaningful.
//! Seeds start at [`JET_ORDER`]; differentiating a jet (see [`Jet::partial`])
//! lowers the order by one, and combining jets keeps the minimum. Asking for a
//! derivative of an order-0 jet is an [`Error::OrderExhausted`].
//!
//! The Hessian is stored packed (upper triangle), so it is symmetric by
//! construction.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use smallvec::SmallVec;

use crate::error::{Error, Result};

/// Highest derivative order carried by a jet.
pub const JET_ORDER: u8 = 2;

type Storage = SmallVec<[f64; 28]>;

#[derive(Clone, PartialEq)]
pub struct Jet {
    dim: usize,
    order: u8,
    // [value, grad_0..grad_{d-1}, packed upper Hessian]
    data: Storage,
}

#[inline]
fn storage_len(dim: usize) -> usize {
    1 + dim + dim * (dim + 1) / 2
}

#[inline]
fn hess_index(dim: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    // row i of the packed upper triangle starts at i*dim - i*(i-1)/2
    1 + dim + i * dim - (i * i - i) / 2 + (j - i)
}

impl Jet {
    /// The constant `value` in `dim` variables, with full order.
    pub fn constant(dim: usize, value: f64) -> Self {
        let mut data: Storage = SmallVec::from_elem(0.0, storage_len(dim));
        data[0] = value;
        Self { dim, order: JET_ORDER, data }
    }

    pub fn zero(dim: usize) -> Self {
        Self::constant(dim, 0.0)
    }

    /// The coordinate function `y^k` at a point where it equals `value`.
    pub fn variable(dim: usize, k: usize, value: f64) -> Self {
        assert!(k < dim, "coordinate index {k} out of range for dim {dim}");
        let mut jet = Self::constant(dim, value);
        jet.data[1 + k] = 1.0;
        jet
    }

    /// Build a jet from explicit value, gradient and (symmetric) Hessian.
    /// The Hessian is symmetrized on write.
    pub fn from_parts(value: f64, grad: &[f64], hess: &[Vec<f64>]) -> Self {
        let dim = grad.len();
        let mut jet = Self::constant(dim, value);
        jet.data[1..=dim].copy_from_slice(grad);
        for i in 0..dim {
            for j in i..dim {
                jet.data[hess_index(dim, i, j)] = 0.5 * (hess[i][j] + hess[j][i]);
            }
        }
        jet
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn order(&self) -> u8 {
        self.order
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.data[0]
    }

    #[inline]
    pub fn grad(&self, i: usize) -> f64 {
        self.data[1 + i]
    }

    pub fn gradient(&self) -> Vec<f64> {
        self.data[1..=self.dim].to_vec()
    }

    #[inline]
    pub fn hess(&self, i: usize, j: usize) -> f64 {
        self.data[hess_index(self.dim, i, j)]
    }

    pub fn hessian(&self) -> Vec<Vec<f64>> {
        (0..self.dim).map(|i| (0..self.dim).map(|j| self.hess(i, j)).collect()).collect()
    }

    /// Copy of this jet with the order lowered to `order` (never raised).
    pub fn truncated(&self, order: u8) -> Self {
        let mut out = self.clone();
        out.order = out.order.min(order);
        out.clear_invalid();
        out
    }

    fn clear_invalid(&mut self) {
        let d = self.dim;
        if self.order < 2 {
            for x in &mut self.data[1 + d..] {
                *x = 0.0;
            }
        }
        if self.order < 1 {
            for x in &mut self.data[1..=d] {
                *x = 0.0;
            }
        }
    }

    fn check_dim(&self, other: &Jet) -> Result<()> {
        if self.dim == other.dim {
            Ok(())
        } else {
            Err(Error::DimMismatch { left: self.dim, right: other.dim })
        }
    }

    pub fn try_add(&self, other: &Jet) -> Result<Jet> {
        self.check_dim(other)?;
        Ok(self + other)
    }

    pub fn try_mul(&self, other: &Jet) -> Result<Jet> {
        self.check_dim(other)?;
        Ok(self * other)
    }

    pub fn scale(&self, s: f64) -> Jet {
        let mut out = self.clone();
        for x in out.data.iter_mut() {
            *x *= s;
        }
        out
    }

    /// `self += s * other`
    pub fn add_scaled(&mut self, s: f64, other: &Jet) {
        assert_eq!(self.dim, other.dim, "jet dimension mismatch");
        for (x, y) in self.data.iter_mut().zip(other.data.iter()) {
            *x += s * y;
        }
        self.order = self.order.min(other.order);
        self.clear_invalid();
    }

    /// `self += s * a * b` without allocating the product.
    pub fn add_product(&mut self, s: f64, a: &Jet, b: &Jet) {
        assert_eq!(a.dim, b.dim, "jet dimension mismatch");
        assert_eq!(self.dim, a.dim, "jet dimension mismatch");
        let d = self.dim;
        let order = self.order.min(a.order).min(b.order);
        let (av, bv) = (a.data[0], b.data[0]);
        self.data[0] += s * av * bv;
        if order >= 1 {
            for i in 0..d {
                self.data[1 + i] += s * (av * b.data[1 + i] + bv * a.data[1 + i]);
            }
        }
        if order >= 2 {
            for i in 0..d {
                let (ai, bi) = (a.data[1 + i], b.data[1 + i]);
                for j in i..d {
                    let k = hess_index(d, i, j);
                    self.data[k] += s * (av * b.data[k] + bv * a.data[k] + ai * b.data[1 + j] + bi * a.data[1 + j]);
                }
            }
        }
        self.order = order;
        self.clear_invalid();
    }

    /// Compose with a univariate function given its value and first two
    /// derivatives at `self.value()`.
    fn compose(&self, f0: f64, f1: f64, f2: f64) -> Jet {
        let d = self.dim;
        let mut out = Jet::constant(d, f0);
        out.order = self.order;
        if self.order >= 1 {
            for i in 0..d {
                out.data[1 + i] = f1 * self.data[1 + i];
            }
        }
        if self.order >= 2 {
            for i in 0..d {
                for j in i..d {
                    let k = hess_index(d, i, j);
                    out.data[k] = f1 * self.data[k] + f2 * self.data[1 + i] * self.data[1 + j];
                }
            }
        }
        out
    }

    /// Real power `self^e`. Non-integer exponents require a strictly positive
    /// base; negative integer exponents require a non-zero base.
    pub fn powf(&self, e: f64) -> Result<Jet> {
        let x = self.value();
        let integral = e.fract() == 0.0 && e.abs() < i32::MAX as f64;
        if integral {
            if e == 0.0 {
                return Ok(Jet::constant(self.dim, 1.0).truncated(self.order));
            }
            if e < 0.0 && x == 0.0 {
                return Err(Error::Domain(format!("zero base with exponent {e}")));
            }
            let k = e as i32;
            let f0 = x.powi(k);
            let f1 = e * x.powi(k - 1);
            let f2 = e * (e - 1.0) * if !(0..2).contains(&k) { x.powi(k - 2) } else { 0.0 };
            // k == 1 gives f2 = 0 without evaluating x^-1.
            return Ok(self.compose(f0, f1, f2));
        }
        if x.is_nan() || x <= 0.0 {
            return Err(Error::Domain(format!("base {x} must be positive for non-integer exponent {e}")));
        }
        let f0 = x.powf(e);
        let f1 = e * f0 / x;
        let f2 = (e - 1.0) * f1 / x;
        Ok(self.compose(f0, f1, f2))
    }

    pub fn recip(&self) -> Result<Jet> {
        self.powf(-1.0)
    }

    pub fn sqrt(&self) -> Result<Jet> {
        self.powf(0.5)
    }

    /// First partial derivative with respect to coordinate `k`.
    pub fn partial(&self, k: usize) -> Result<Jet> {
        if self.order == 0 {
            return Err(Error::OrderExhausted { needed: 1, available: 0 });
        }
        let d = self.dim;
        let mut out = Jet::constant(d, self.data[1 + k]);
        out.order = self.order - 1;
        if out.order >= 1 {
            for i in 0..d {
                out.data[1 + i] = self.data[hess_index(d, k, i)];
            }
        }
        Ok(out)
    }

    /// Directional derivative `v^k ∂_k self` along a jet-valued vector field.
    pub fn directional(&self, v: &[Jet]) -> Result<Jet> {
        if self.order == 0 {
            return Err(Error::OrderExhausted { needed: 1, available: 0 });
        }
        let mut out = Jet::zero(self.dim);
        for (k, vk) in v.iter().enumerate() {
            self.check_dim(vk)?;
            out.add_product(1.0, vk, &self.partial(k)?);
        }
        Ok(out)
    }

    /// Directional derivative along a constant vector (no order is consumed in `v`).
    pub fn directional_const(&self, v: &[f64]) -> Result<Jet> {
        let mut out = Jet::zero(self.dim);
        for (k, &vk) in v.iter().enumerate() {
            if vk != 0.0 {
                out.add_scaled(vk, &self.partial(k)?);
            }
        }
        if self.order == 0 {
            return Err(Error::OrderExhausted { needed: 1, available: 0 });
        }
        out.order = out.order.min(self.order - 1);
        out.clear_invalid();
        Ok(out)
    }

    /// Sum of jets; `dim` is used when the iterator is empty.
    pub fn sum<'a>(dim: usize, items: impl IntoIterator<Item = &'a Jet>) -> Jet {
        let mut acc = Jet::zero(dim);
        for j in items {
            acc += j;
        }
        acc
    }

    /// Largest absolute difference over all valid entries of two jets.
    pub fn max_abs_diff(&self, other: &Jet) -> f64 {
        let order = self.order.min(other.order);
        let d = self.dim;
        let len = match order {
            0 => 1,
            1 => 1 + d,
            _ => storage_len(d),
        };
        self.data[..len].iter().zip(other.data[..len].iter()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

/// Seeds the `d` coordinate functions at `point`: jet `k` has value
/// `point[k]`, unit gradient along `k` and zero Hessian.
pub fn seed_coordinates(point: &[f64]) -> Vec<Jet> {
    let d = point.len();
    point.iter().enumerate().map(|(k, &x)| Jet::variable(d, k, x)).collect()
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Jet")
            .field("order", &self.order)
            .field("value", &self.value())
            .field("grad", &self.gradient())
            .field("hess", &self.hessian())
            .finish()
    }
}

impl AddAssign<&Jet> for Jet {
    fn add_assign(&mut self, rhs: &Jet) {
        self.add_scaled(1.0, rhs);
    }
}

impl SubAssign<&Jet> for Jet {
    fn sub_assign(&mut self, rhs: &Jet) {
        self.add_scaled(-1.0, rhs);
    }
}

impl Add<&Jet> for &Jet {
    type Output = Jet;
    fn add(self, rhs: &Jet) -> Jet {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub<&Jet> for &Jet {
    type Output = Jet;
    fn sub(self, rhs: &Jet) -> Jet {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Mul<&Jet> for &Jet {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        let mut out = Jet::zero(self.dim);
        out.add_product(1.0, self, rhs);
        out
    }
}

impl Mul<f64> for &Jet {
    type Output = Jet;
    fn mul(self, rhs: f64) -> Jet {
        self.scale(rhs)
    }
}

impl Add<f64> for &Jet {
    type Output = Jet;
    fn add(self, rhs: f64) -> Jet {
        let mut out = self.clone();
        out.data[0] += rhs;
        out
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Jet> for Jet {
            type Output = Jet;
            fn $m(self, rhs: Jet) -> Jet {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Jet> for Jet {
            type Output = Jet;
            fn $m(self, rhs: &Jet) -> Jet {
                (&self).$m(rhs)
            }
        }
        impl $tr<Jet> for &Jet {
            type Output = Jet;
            fn $m(self, rhs: Jet) -> Jet {
                self.$m(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn packed_layout_is_dense() {
        for d in 1..8 {
            let mut seen = vec![false; storage_len(d)];
            seen[0] = true;
            for i in 0..=d - 1 {
                seen[1 + i] = true;
                for j in i..d {
                    let k = hess_index(d, i, j);
                    assert!(!seen[k], "collision at d={d} ({i},{j})");
                    seen[k] = true;
                }
            }
            assert!(seen.iter().all(|&s| s));
        }
    }

    #[test]
    fn seeds_are_unit_gradients() {
        let s = seed_coordinates(&[1.0, 2.0]);
        assert_eq!(s[0].value(), 1.0);
        assert_eq!(s[0].gradient(), vec![1.0, 0.0]);
        assert_eq!(s[1].gradient(), vec![0.0, 1.0]);
        assert_eq!(s[1].hessian(), vec![vec![0.0; 2]; 2]);
        let z = seed_coordinates(&[0.0, 0.0, 0.0]);
        assert_eq!(z.len(), 3);
        for (k, j) in z.iter().enumerate() {
            assert_eq!(j.value(), 0.0);
            assert_eq!(j.grad(k), 1.0);
        }
    }

    #[test]
    fn product_rule() {
        let s = seed_coordinates(&[3.0, 5.0]);
        let p = &s[0] * &s[1];
        assert_eq!(p.value(), 15.0);
        assert_eq!(p.gradient(), vec![5.0, 3.0]);
        assert_eq!(p.hess(0, 1), 1.0);
        assert_eq!(p.hess(1, 0), 1.0);
        assert_eq!(p.hess(0, 0), 0.0);
    }

    #[test]
    fn square_root_derivatives() {
        let s = seed_coordinates(&[4.0]);
        let r = s[0].powf(0.5).unwrap();
        assert_eq!(r.value(), 2.0);
        assert_eq!(r.grad(0), 0.25);
        assert!((r.hess(0, 0) + 1.0 / 32.0).abs() < 1e-16);
    }

    #[test]
    fn square_two_routes() {
        let s = seed_coordinates(&[1.7, -0.3]);
        let a = &s[0] * &s[0];
        let b = s[0].powf(2.0).unwrap();
        assert!(a.max_abs_diff(&b) <= 1e-15);
    }

    #[test]
    fn negative_base_integer_power() {
        let s = seed_coordinates(&[-2.0]);
        let c = s[0].powf(3.0).unwrap();
        assert_eq!(c.value(), -8.0);
        assert_eq!(c.grad(0), 12.0);
        assert_eq!(c.hess(0, 0), -12.0);
        let inv = s[0].recip().unwrap();
        assert_eq!(inv.value(), -0.5);
        assert_eq!(inv.grad(0), -0.25);
        assert_eq!(inv.hess(0, 0), -0.25);
    }

    #[test]
    fn domain_errors() {
        let s = seed_coordinates(&[-1.0]);
        assert!(matches!(s[0].powf(0.5), Err(Error::Domain(_))));
        let z = seed_coordinates(&[0.0]);
        assert!(matches!(z[0].powf(-1.0), Err(Error::Domain(_))));
        assert!(matches!(z[0].powf(0.5), Err(Error::Domain(_))));
    }

    #[test]
    fn dim_mismatch_is_reported() {
        let a = Jet::constant(2, 1.0);
        let b = Jet::constant(3, 1.0);
        assert_eq!(a.try_mul(&b), Err(Error::DimMismatch { left: 2, right: 3 }));
        assert!(a.try_add(&b).is_err());
    }

    #[test]
    fn partial_lowers_order() {
        let s = seed_coordinates(&[1.0, 2.0]);
        let f = &(&s[0] * &s[0]) * &s[1];
        let fx = f.partial(0).unwrap();
        assert_eq!(fx.order(), 1);
        assert_eq!(fx.value(), 4.0);
        assert_eq!(fx.gradient(), vec![4.0, 2.0]);
        let fxy = fx.partial(1).unwrap();
        assert_eq!(fxy.order(), 0);
        assert_eq!(fxy.value(), 2.0);
        assert_eq!(fxy.partial(0), Err(Error::OrderExhausted { needed: 1, available: 0 }));
    }

    #[test]
    fn mixed_order_keeps_minimum() {
        let s = seed_coordinates(&[1.0, 2.0]);
        let low = s[0].partial(0).unwrap(); // constant 1 at order 1
        let p = &low * &s[1];
        assert_eq!(p.order(), 1);
        assert_eq!(p.hessian(), vec![vec![0.0; 2]; 2]);
    }
}
