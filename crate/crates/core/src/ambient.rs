//! Flat pseudo-Euclidean ambient spaces and the pseudo-spheres embedded in them.
//!
//! Coordinates are laid out timelike-first. In `R^{n+2}` the metric is
//! `diag(+, -, ..., -, -eps, eps)`, coordinate `n` carries `-eps` and
//! coordinate `n+1` carries `eps`; the plane `P` is `H y^{n+1} = 1`.
//! In `R^{n+1}` the metric is the `P` metric `diag(+, -, ..., -, -eps)`,
//! except in Euclidean-sphere mode where every sign is `+` and `eps = -1`.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jets::Jet;

/// Diagonal metric with entries `±1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetricDiag {
    signs: Vec<i8>,
}

impl MetricDiag {
    pub fn new(signs: Vec<i8>) -> Result<Self> {
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::Config(format!("metric signs must be ±1, got {signs:?}")));
        }
        Ok(Self { signs })
    }

    pub fn euclidean(dim: usize) -> Self {
        Self { signs: vec![1; dim] }
    }

    pub fn dim(&self) -> usize {
        self.signs.len()
    }

    #[inline]
    pub fn sign(&self, k: usize) -> f64 {
        self.signs[k] as f64
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    /// Sign of the determinant, `sgn(g)`.
    pub fn det_sign(&self) -> f64 {
        self.signs.iter().map(|&s| s as f64).product()
    }

    /// Raising and lowering coincide for a diagonal `±1` metric.
    pub fn lower(&self, v: &[f64]) -> Vec<f64> {
        v.iter().zip(&self.signs).map(|(x, &s)| x * s as f64).collect()
    }

    pub fn raise(&self, v: &[f64]) -> Vec<f64> {
        self.lower(v)
    }

    pub fn dot(&self, u: &[f64], v: &[f64]) -> f64 {
        u.iter().zip(v).zip(&self.signs).map(|((a, b), &s)| s as f64 * a * b).sum()
    }

    pub fn dot_jets(&self, u: &[Jet], v: &[Jet]) -> Jet {
        let dim = u[0].dim();
        let mut acc = Jet::zero(dim);
        for (k, (a, b)) in u.iter().zip(v).enumerate() {
            acc.add_product(self.sign(k), a, b);
        }
        acc
    }

    /// First `k` entries as a metric of its own.
    pub fn truncated(&self, k: usize) -> Self {
        Self { signs: self.signs[..k].to_vec() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AmbientKind {
    Rn1,
    Rn2,
}

/// Geometry of one embedding: `Σ_n` inside `R^{n+1}` or `R^{n+2}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingConfig {
    pub n: usize,
    pub eps: i8,
    pub h: f64,
    pub ambient: AmbientKind,
    pub euclidean: bool,
    pub metric: MetricDiag,
}

impl EmbeddingConfig {
    /// `Σ_n` in `R^{n+1}` with metric `diag(+, -, ..., -, -eps)`;
    /// `eps = 1` is de Sitter, `eps = -1` Anti-de Sitter.
    pub fn rn1(n: usize, eps: i8, h: f64) -> Result<Self> {
        Self::check(n, eps, h)?;
        let mut signs = vec![-1i8; n + 1];
        signs[0] = 1;
        signs[n] = -eps;
        Ok(Self { n, eps, h, ambient: AmbientKind::Rn1, euclidean: false, metric: MetricDiag { signs } })
    }

    /// `Σ_n` as the intersection of the null cone of `R^{n+2}` with the plane
    /// `H y^{n+1} = 1`; metric `diag(+, -, ..., -, -eps, eps)`.
    pub fn rn2(n: usize, eps: i8, h: f64) -> Result<Self> {
        Self::check(n, eps, h)?;
        let mut signs = vec![-1i8; n + 2];
        signs[0] = 1;
        signs[n] = -eps;
        signs[n + 1] = eps;
        Ok(Self { n, eps, h, ambient: AmbientKind::Rn2, euclidean: false, metric: MetricDiag { signs } })
    }

    /// Round sphere of radius `1/H` in Euclidean `R^{n+1}` (`eps = -1`).
    pub fn sphere(n: usize, h: f64) -> Result<Self> {
        Self::check(n, -1, h)?;
        Ok(Self { n, eps: -1, h, ambient: AmbientKind::Rn1, euclidean: true, metric: MetricDiag::euclidean(n + 1) })
    }

    fn check(n: usize, eps: i8, h: f64) -> Result<()> {
        if n < 2 {
            return Err(Error::Config(format!("n must be at least 2, got {n}")));
        }
        if eps != 1 && eps != -1 {
            return Err(Error::Config(format!("eps must be ±1, got {eps}")));
        }
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::Config(format!("H must be positive, got {h}")));
        }
        Ok(())
    }

    /// Ambient dimension `d`.
    pub fn dim(&self) -> usize {
        self.metric.dim()
    }

    pub fn eps_f(&self) -> f64 {
        self.eps as f64
    }

    /// The value `-eps H^{-2}` of `y^2` (or `y_P^2`) on `Σ_n`.
    pub fn sigma_square(&self) -> f64 {
        -self.eps_f() / (self.h * self.h)
    }

    /// The `R^{n+1}` geometry of the plane `P` (identity for `Rn1`).
    pub fn plane(&self) -> EmbeddingConfig {
        match self.ambient {
            AmbientKind::Rn1 => self.clone(),
            AmbientKind::Rn2 => {
                EmbeddingConfig::rn1(self.n, self.eps, self.h).expect("plane of a valid configuration is valid")
            }
        }
    }

    /// Metric of `P` (first `n+1` coordinates).
    pub fn plane_metric(&self) -> MetricDiag {
        self.metric.truncated(self.n + 1)
    }

    pub fn label(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for EmbeddingConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let family = if self.euclidean {
            "sphere"
        } else if self.eps == 1 {
            "dS"
        } else {
            "AdS"
        };
        let amb = match self.ambient {
            AmbientKind::Rn1 => "rn1",
            AmbientKind::Rn2 => "rn2",
        };
        write!(f, "{amb}/{family}/n={}/H={}", self.n, self.h)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AmbientPoint {
    pub coords: Vec<f64>,
}

impl AmbientPoint {
    pub fn new(coords: Vec<f64>) -> Self {
        Self { coords }
    }

    pub fn scaled(&self, lambda: f64) -> Self {
        Self { coords: self.coords.iter().map(|x| x * lambda).collect() }
    }
}

/// `y^A y_A`: over all coordinates in `R^{n+1}`; over the `P` coordinates
/// (`y_P^2`) in `R^{n+2}`.
pub fn quadratic_form(cfg: &EmbeddingConfig, y: &[f64]) -> f64 {
    let m = cfg.plane_metric();
    m.dot(&y[..m.dim()], &y[..m.dim()])
}

/// Jet version of [`quadratic_form`].
pub fn quadratic_form_jet(cfg: &EmbeddingConfig, y: &[Jet]) -> Jet {
    let m = cfg.plane_metric();
    m.dot_jets(&y[..m.dim()], &y[..m.dim()])
}

/// Full ambient square `y^α y_α`; in `R^{n+2}` this is the cone function `C(y)`.
pub fn full_quadratic_form(cfg: &EmbeddingConfig, y: &[f64]) -> f64 {
    cfg.metric.dot(y, y)
}

/// Largest violation of the `Σ_n` defining equations at `y`.
pub fn sigma_residual(cfg: &EmbeddingConfig, y: &[f64]) -> f64 {
    let q = (quadratic_form(cfg, y) - cfg.sigma_square()).abs();
    match cfg.ambient {
        AmbientKind::Rn1 => q,
        AmbientKind::Rn2 => {
            let plane = (cfg.h * y[cfg.n + 1] - 1.0).abs();
            let cone = full_quadratic_form(cfg, y).abs();
            q.max(plane).max(cone)
        }
    }
}

const SAMPLE_BOX: f64 = 3.0;
const MIN_RELATIVE_SQUARE: f64 = 0.1;

/// Deterministic sample of `count` points of `Σ_n`.
pub fn sample_sigma(cfg: &EmbeddingConfig, seed: u64, count: usize) -> Result<Vec<AmbientPoint>> {
    if count == 0 {
        return Err(Error::Config("sample count must be at least 1".into()));
    }
    let plane = cfg.plane();
    let pm = plane.metric.clone();
    let target = cfg.sigma_square();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let mut rejected = 0usize;
    let budget = 1000 * count;
    while out.len() < count {
        let mut y: Vec<f64> = (0..pm.dim()).map(|_| rng.gen_range(-SAMPLE_BOX..SAMPLE_BOX)).collect();
        let q = pm.dot(&y, &y);
        if q.signum() != target.signum() || q.abs() < MIN_RELATIVE_SQUARE * target.abs() {
            rejected += 1;
            if rejected >= budget {
                return Err(Error::SamplingExhausted { attempts: rejected });
            }
            continue;
        }
        let scale = (target / q).sqrt();
        for x in &mut y {
            *x *= scale;
        }
        // one correction step against rounding in the rescale
        let q = pm.dot(&y, &y);
        let fix = (target / q).sqrt();
        for x in &mut y {
            *x *= fix;
        }
        if cfg.ambient == AmbientKind::Rn2 {
            y.push(1.0 / cfg.h);
        }
        out.push(AmbientPoint::new(y));
    }
    Ok(out)
}

/// Components of the dilation vector `D = y^α ∂_α`.
pub fn dilation_vector(y: &[f64]) -> Vec<f64> {
    y.to_vec()
}

/// Components of `F = ♯df = eps H ∂_{n+1}` (only in `R^{n+2}`).
pub fn f_vector(cfg: &EmbeddingConfig) -> Result<Vec<f64>> {
    match cfg.ambient {
        AmbientKind::Rn1 => Err(Error::WrongAmbient("F is only defined in R^{n+2}")),
        AmbientKind::Rn2 => {
            let mut f = vec![0.0; cfg.dim()];
            f[cfg.n + 1] = cfg.eps_f() * cfg.h;
            Ok(f)
        }
    }
}

/// Affine vector field `v^i(y) = M^i_j y^j + b^i` in Cartesian coordinates.
///
/// Covers `D`, `D_P` and `F`; Lie derivatives along these act on
/// coordinate one-forms by `(L_v a)_j = v(a_j) + a_i M^i_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineField {
    pub matrix: Vec<Vec<f64>>,
    pub offset: Vec<f64>,
}

impl AffineField {
    pub fn dim(&self) -> usize {
        self.offset.len()
    }

    pub fn dilation(dim: usize) -> Self {
        let matrix = (0..dim).map(|i| (0..dim).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
        Self { matrix, offset: vec![0.0; dim] }
    }

    /// `D_P = y^A ∂_A`, `A <= n`.
    pub fn plane_dilation(cfg: &EmbeddingConfig) -> Self {
        let d = cfg.dim();
        let mut f = Self::dilation(d);
        for k in cfg.n + 1..d {
            f.matrix[k][k] = 0.0;
        }
        f
    }

    pub fn constant(offset: Vec<f64>) -> Self {
        let d = offset.len();
        Self { matrix: vec![vec![0.0; d]; d], offset }
    }

    pub fn f_field(cfg: &EmbeddingConfig) -> Result<Self> {
        Ok(Self::constant(f_vector(cfg)?))
    }

    pub fn at(&self, y: &[f64]) -> Vec<f64> {
        (0..self.dim())
            .map(|i| self.offset[i] + self.matrix[i].iter().zip(y).map(|(m, x)| m * x).sum::<f64>())
            .collect()
    }

    /// Components as jets over the given coordinate seeds.
    pub fn jets(&self, seeds: &[Jet]) -> Vec<Jet> {
        let dim = seeds[0].dim();
        (0..self.dim())
            .map(|i| {
                let mut c = Jet::constant(dim, self.offset[i]);
                for (j, s) in seeds.iter().enumerate() {
                    if self.matrix[i][j] != 0.0 {
                        c.add_scaled(self.matrix[i][j], s);
                    }
                }
                c
            })
            .collect()
    }

    /// Action on a scalar jet: `v^i ∂_i f`.
    pub fn apply(&self, f: &Jet, seeds: &[Jet]) -> Result<Jet> {
        f.directional(&self.jets(seeds))
    }

    /// Lie derivative of a one-form given by Cartesian component jets.
    pub fn lie_oneform(&self, a: &[Jet], seeds: &[Jet]) -> Result<Vec<Jet>> {
        let v = self.jets(seeds);
        (0..a.len())
            .map(|j| {
                let mut out = a[j].directional(&v)?;
                for (i, ai) in a.iter().enumerate() {
                    if self.matrix[i][j] != 0.0 {
                        out.add_scaled(self.matrix[i][j], ai);
                    }
                }
                Ok(out)
            })
            .collect()
    }

    /// Commutator `[self, other]` of two affine fields (again affine).
    pub fn bracket(&self, other: &AffineField) -> AffineField {
        // [u, v]^i = u^j ∂_j v^i - v^j ∂_j u^i
        let d = self.dim();
        let mut matrix = vec![vec![0.0; d]; d];
        let mut offset = vec![0.0; d];
        for i in 0..d {
            for k in 0..d {
                let mut s = 0.0;
                for j in 0..d {
                    s += other.matrix[i][j] * self.matrix[j][k] - self.matrix[i][j] * other.matrix[j][k];
                }
                matrix[i][k] = s;
            }
            for j in 0..d {
                offset[i] += other.matrix[i][j] * self.offset[j] - self.matrix[i][j] * other.offset[j];
            }
        }
        AffineField { matrix, offset }
    }
}
