//! Closed expression trees over ambient coordinates.
//!
//! [`FieldExpr`] is the representation of every scalar test field and every
//! coordinate component of a one-form. Trees are immutable and share
//! subtrees through `Arc`, so substitution (used by homogeneous extensions)
//! stays cheap. Evaluation happens in jet arithmetic.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jets::Jet;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Node {
    Const { value: f64 },
    Coord { index: usize },
    Add { lhs: Arc<Node>, rhs: Arc<Node> },
    Mul { lhs: Arc<Node>, rhs: Arc<Node> },
    Neg { arg: Arc<Node> },
    Pow { base: Arc<Node>, exponent: f64 },
}

/// A scalar field given as an expression tree, with optional metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldExpr {
    pub root: Arc<Node>,
    /// Declared degree of homogeneity, if the field is homogeneous.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub homogeneity: Option<f64>,
    /// Declared transversality (only meaningful for one-form components).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub transverse: Option<bool>,
}

impl From<Node> for FieldExpr {
    fn from(node: Node) -> Self {
        FieldExpr { root: Arc::new(node), homogeneity: None, transverse: None }
    }
}

impl FieldExpr {
    pub fn constant(value: f64) -> Self {
        Node::Const { value }.into()
    }

    pub fn coord(index: usize) -> Self {
        Node::Coord { index }.into()
    }

    pub fn add(&self, other: &FieldExpr) -> Self {
        Node::Add { lhs: self.root.clone(), rhs: other.root.clone() }.into()
    }

    pub fn mul(&self, other: &FieldExpr) -> Self {
        Node::Mul { lhs: self.root.clone(), rhs: other.root.clone() }.into()
    }

    pub fn neg(&self) -> Self {
        Node::Neg { arg: self.root.clone() }.into()
    }

    pub fn sub(&self, other: &FieldExpr) -> Self {
        self.add(&other.neg())
    }

    pub fn pow(&self, exponent: f64) -> Self {
        Node::Pow { base: self.root.clone(), exponent }.into()
    }

    pub fn scale(&self, s: f64) -> Self {
        FieldExpr::constant(s).mul(self)
    }

    pub fn with_homogeneity(mut self, degree: f64) -> Self {
        self.homogeneity = Some(degree);
        self
    }

    pub fn with_transverse(mut self, transverse: bool) -> Self {
        self.transverse = Some(transverse);
        self
    }

    /// Sum of a list of expressions (zero when empty).
    pub fn sum(items: impl IntoIterator<Item = FieldExpr>) -> Self {
        items.into_iter().reduce(|a, b| a.add(&b)).unwrap_or_else(|| FieldExpr::constant(0.0))
    }

    /// Highest coordinate index referenced, plus one.
    pub fn arity(&self) -> usize {
        fn walk(n: &Node) -> usize {
            match n {
                Node::Const { .. } => 0,
                Node::Coord { index } => index + 1,
                Node::Add { lhs, rhs } | Node::Mul { lhs, rhs } => walk(lhs).max(walk(rhs)),
                Node::Neg { arg } => walk(arg),
                Node::Pow { base, .. } => walk(base),
            }
        }
        walk(&self.root)
    }

    /// Replace every `Coord(k)` by `subs[k]`.
    pub fn substitute(&self, subs: &[FieldExpr]) -> FieldExpr {
        fn walk(n: &Arc<Node>, subs: &[FieldExpr]) -> Arc<Node> {
            match n.as_ref() {
                Node::Const { .. } => n.clone(),
                Node::Coord { index } => subs[*index].root.clone(),
                Node::Add { lhs, rhs } => Arc::new(Node::Add { lhs: walk(lhs, subs), rhs: walk(rhs, subs) }),
                Node::Mul { lhs, rhs } => Arc::new(Node::Mul { lhs: walk(lhs, subs), rhs: walk(rhs, subs) }),
                Node::Neg { arg } => Arc::new(Node::Neg { arg: walk(arg, subs) }),
                Node::Pow { base, exponent } => Arc::new(Node::Pow { base: walk(base, subs), exponent: *exponent }),
            }
        }
        FieldExpr { root: walk(&self.root, subs), homogeneity: None, transverse: None }
    }

    /// Evaluate in jet arithmetic at the base point of `seeds`.
    pub fn eval(&self, seeds: &[Jet]) -> Result<Jet> {
        let dim = seeds.first().map(Jet::dim).unwrap_or(0);
        eval_node(&self.root, seeds, dim)
    }

    /// Plain floating-point evaluation (no derivatives).
    pub fn eval_value(&self, point: &[f64]) -> Result<f64> {
        eval_value(&self.root, point)
    }
}

/// Jet of `expr` at the seeds' base point.
pub fn eval_expr(expr: &FieldExpr, seeds: &[Jet]) -> Result<Jet> {
    expr.eval(seeds)
}

fn eval_node(node: &Node, seeds: &[Jet], dim: usize) -> Result<Jet> {
    Ok(match node {
        Node::Const { value } => Jet::constant(dim, *value),
        Node::Coord { index } => {
            seeds.get(*index).cloned().ok_or_else(|| Error::Domain(format!("coordinate {index} not seeded")))?
        }
        Node::Add { lhs, rhs } => eval_node(lhs, seeds, dim)? + eval_node(rhs, seeds, dim)?,
        Node::Mul { lhs, rhs } => eval_node(lhs, seeds, dim)? * eval_node(rhs, seeds, dim)?,
        Node::Neg { arg } => -eval_node(arg, seeds, dim)?,
        Node::Pow { base, exponent } => eval_node(base, seeds, dim)?.powf(*exponent)?,
    })
}

fn eval_value(node: &Node, point: &[f64]) -> Result<f64> {
    Ok(match node {
        Node::Const { value } => *value,
        Node::Coord { index } => {
            *point.get(*index).ok_or_else(|| Error::Domain(format!("coordinate {index} out of range")))?
        }
        Node::Add { lhs, rhs } => eval_value(lhs, point)? + eval_value(rhs, point)?,
        Node::Mul { lhs, rhs } => eval_value(lhs, point)? * eval_value(rhs, point)?,
        Node::Neg { arg } => -eval_value(arg, point)?,
        Node::Pow { base, exponent } => {
            let b = eval_value(base, point)?;
            if exponent.fract() == 0.0 {
                if b == 0.0 && *exponent < 0.0 {
                    return Err(Error::Domain("zero base with negative exponent".into()));
                }
                b.powi(*exponent as i32)
            } else if b > 0.0 {
                b.powf(*exponent)
            } else {
                return Err(Error::Domain(format!("base {b} must be positive for exponent {exponent}")));
            }
        }
    })
}

/// Sparse polynomial with real coefficients, keyed by exponent vectors.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Polynomial {
    pub nvars: usize,
    pub terms: BTreeMap<Vec<u32>, f64>,
}

impl Polynomial {
    pub fn new(nvars: usize) -> Self {
        Self { nvars, terms: BTreeMap::new() }
    }

    pub fn add_term(&mut self, exponents: Vec<u32>, coeff: f64) {
        assert_eq!(exponents.len(), self.nvars);
        let entry = self.terms.entry(exponents).or_insert(0.0);
        *entry += coeff;
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    /// Set when every monomial has the same total degree.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut degrees = self.terms.keys().map(|e| e.iter().sum::<u32>());
        let first = degrees.next()?;
        degrees.all(|d| d == first).then_some(first)
    }

    pub fn to_expr(&self) -> FieldExpr {
        let monomials = self.terms.iter().filter(|(_, c)| **c != 0.0).map(|(exps, &c)| {
            let mut m = FieldExpr::constant(c);
            for (k, &e) in exps.iter().enumerate() {
                match e {
                    0 => {}
                    1 => m = m.mul(&FieldExpr::coord(k)),
                    _ => m = m.mul(&FieldExpr::coord(k).pow(e as f64)),
                }
            }
            m
        });
        let e = FieldExpr::sum(monomials.collect::<Vec<_>>());
        match self.homogeneous_degree() {
            Some(deg) => e.with_homogeneity(deg as f64),
            None => e,
        }
    }
}

fn random_exponents<R: Rng + ?Sized>(rng: &mut R, nvars: usize, total: u32) -> Vec<u32> {
    let mut exps = vec![0u32; nvars];
    for _ in 0..total {
        exps[rng.gen_range(0..nvars)] += 1;
    }
    exps
}

/// Random polynomial of total degree at most `degree` with `terms` monomials
/// and coefficients uniform in [-1, 1]. Always includes one monomial of full
/// degree.
pub fn random_polynomial<R: Rng + ?Sized>(rng: &mut R, nvars: usize, degree: u32, terms: usize) -> Polynomial {
    let mut p = Polynomial::new(nvars);
    for t in 0..terms.max(1) {
        let total = if t == 0 { degree } else { rng.gen_range(0..=degree) };
        p.add_term(random_exponents(rng, nvars, total), rng.gen_range(-1.0..1.0));
    }
    p
}

/// Random homogeneous polynomial of exactly `degree`.
pub fn random_homogeneous<R: Rng + ?Sized>(rng: &mut R, nvars: usize, degree: u32, terms: usize) -> Polynomial {
    let mut p = Polynomial::new(nvars);
    for _ in 0..terms.max(1) {
        p.add_term(random_exponents(rng, nvars, degree), rng.gen_range(-1.0..1.0));
    }
    p
}

/// Real part (or imaginary part when `imag`) of `(y^i + sqrt(-1) y^j)^l`,
/// a harmonic homogeneous polynomial of degree `l` for the Euclidean metric.
pub fn harmonic_polynomial(nvars: usize, i: usize, j: usize, l: u32, imag: bool) -> Polynomial {
    let mut p = Polynomial::new(nvars);
    if l == 0 {
        p.add_term(vec![0; nvars], if imag { 0.0 } else { 1.0 });
        return p;
    }
    let mut binom = 1.0f64;
    for k in 0..=l {
        // term C(l,k) y_i^{l-k} (sqrt(-1) y_j)^k
        let want_odd = imag;
        if (k % 2 == 1) == want_odd {
            let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
            let mut exps = vec![0u32; nvars];
            exps[i] += l - k;
            exps[j] += k;
            p.add_term(exps, sign * binom);
        }
        binom = binom * (l - k) as f64 / (k + 1) as f64;
    }
    p
}

/// A scalar field that can be evaluated in jet arithmetic.
pub trait ScalarSource: Sync {
    fn eval_jet(&self, seeds: &[Jet]) -> Result<Jet>;
    /// Serializable description, sufficient to rebuild the field.
    fn describe(&self) -> serde_json::Value;
}

/// A one-form field given by Cartesian components.
pub trait OneFormSource: Sync {
    fn dim(&self) -> usize;
    fn eval_components(&self, seeds: &[Jet]) -> Result<Vec<Jet>>;
    fn describe(&self) -> serde_json::Value;
}

impl ScalarSource for FieldExpr {
    fn eval_jet(&self, seeds: &[Jet]) -> Result<Jet> {
        self.eval(seeds)
    }

    fn describe(&self) -> serde_json::Value {
        serde_json::to_value(self).unwrap_or(serde_json::Value::Null)
    }
}

/// One-form with Cartesian components `a_B` given by expressions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OneFormField {
    pub comps: Vec<FieldExpr>,
}

impl OneFormField {
    pub fn new(comps: Vec<FieldExpr>) -> Self {
        Self { comps }
    }

    /// Random polynomial components of total degree at most `degree`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, dim: usize, degree: u32, terms: usize) -> Self {
        Self { comps: (0..dim).map(|_| random_polynomial(rng, dim, degree, terms).to_expr()).collect() }
    }

    /// Transverse field `a_B = y^A ω_{AB}` with `ω` antisymmetric and
    /// homogeneous of degree `degree - 1`, so `y^B a_B = 0` identically and
    /// every component is homogeneous of degree `degree`.
    pub fn random_transverse<R: Rng + ?Sized>(rng: &mut R, dim: usize, degree: u32, terms: usize) -> Self {
        assert!(degree >= 1, "transverse polynomial fields need degree >= 1");
        let mut omega = vec![vec![FieldExpr::constant(0.0); dim]; dim];
        for a in 0..dim {
            for b in a + 1..dim {
                let p = random_homogeneous(rng, dim, degree - 1, terms).to_expr();
                omega[b][a] = p.neg();
                omega[a][b] = p;
            }
        }
        let comps = (0..dim)
            .map(|b| {
                FieldExpr::sum((0..dim).filter(|&a| a != b).map(|a| FieldExpr::coord(a).mul(&omega[a][b])))
                    .with_homogeneity(degree as f64)
                    .with_transverse(true)
            })
            .collect();
        Self { comps }
    }
}

impl OneFormSource for OneFormField {
    fn dim(&self) -> usize {
        self.comps.len()
    }

    fn eval_components(&self, seeds: &[Jet]) -> Result<Vec<Jet>> {
        self.comps.iter().map(|c| c.eval(seeds)).collect()
    }

    fn describe(&self) -> serde_json::Value {
        serde_json::to_value(self).unwrap_or(serde_json::Value::Null)
    }
}
