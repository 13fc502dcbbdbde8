//! Spherical-harmonic eigenvalues of the intrinsic Laplacian on round spheres.

use serde::Serialize;
use serde_json::json;

use crate::ambient::{AmbientPoint, EmbeddingConfig};
use crate::calculus::{box_compositional, FormValue};
use crate::error::{Error, Result};
use crate::expr::{harmonic_polynomial, FieldExpr};
use crate::report::{CheckRecord, Comparison, Metric, Tolerances};
use crate::restriction::SigmaPoint;

pub const MAX_EIGEN_DEGREE: u32 = 4;

/// Points where `|φ|` falls below this fraction of its largest sampled value
/// are left out of the ratio.
const RATIO_FLOOR: f64 = 1e-3;

#[derive(Debug, Clone, Serialize)]
pub struct EigenRow {
    pub l: u32,
    pub expected: f64,
    /// `□φ/φ` at the sample where `|φ|` is largest.
    pub measured: f64,
    /// Largest `|□φ/φ - expected|` over samples above the ratio floor.
    pub max_ratio_error: f64,
    pub samples: usize,
}

/// Harmonic homogeneous polynomials of degree `l`: real and imaginary parts
/// of `(y^i + sqrt(-1) y^j)^l` for consecutive coordinate pairs.
fn harmonics(cfg: &EmbeddingConfig, l: u32) -> Vec<(String, FieldExpr)> {
    let d = cfg.dim();
    let mut out = Vec::new();
    for i in 0..d - 1 {
        for imag in [false, true] {
            if l == 0 && imag {
                continue;
            }
            let name = format!("{}((y{i} + i y{})^{l})", if imag { "Im" } else { "Re" }, i + 1);
            out.push((name, harmonic_polynomial(d, i, i + 1, l, imag).to_expr()));
        }
    }
    out
}

pub fn expected_eigenvalue(cfg: &EmbeddingConfig, l: u32) -> f64 {
    let (l, n) = (l as f64, cfg.n as f64);
    0.0 - l * (l + n - 1.0) * cfg.h * cfg.h
}

fn require_sphere(cfg: &EmbeddingConfig) -> Result<()> {
    if cfg.euclidean {
        Ok(())
    } else {
        Err(Error::Config(format!("eigenvalue table needs a round sphere, got {cfg}")))
    }
}

/// `(φ, □_Σ φ)` at every point for one harmonic.
fn evaluate(cfg: &EmbeddingConfig, points: &[AmbientPoint], phi: &FieldExpr) -> Result<Vec<(Vec<f64>, f64, f64)>> {
    points
        .iter()
        .map(|pt| {
            let p = SigmaPoint::new(cfg, &pt.coords)?;
            let v = phi.eval(&p.seeds)?;
            let boxed = box_compositional(&p.sigma, &FormValue::scalar(&p.sigma, v.clone()))?.values()[0];
            Ok((pt.coords.clone(), v.value(), boxed))
        })
        .collect()
}

pub fn table_eigen(cfg: &EmbeddingConfig, points: &[AmbientPoint], max_l: u32) -> Result<Vec<EigenRow>> {
    require_sphere(cfg)?;
    (0..=max_l)
        .map(|l| {
            let expected = expected_eigenvalue(cfg, l);
            let mut values = Vec::new();
            for (_, phi) in harmonics(cfg, l) {
                values.extend(evaluate(cfg, points, &phi)?);
            }
            let top = values.iter().map(|v| v.1.abs()).fold(0.0, f64::max);
            let kept: Vec<_> = values.iter().filter(|v| v.1.abs() >= RATIO_FLOOR * top && v.1 != 0.0).collect();
            let best = kept.iter().max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()));
            let measured = best.map_or(f64::NAN, |v| v.2 / v.1);
            let max_ratio_error = kept.iter().map(|v| (v.2 / v.1 - expected).abs()).fold(0.0, f64::max);
            Ok(EigenRow { l, expected, measured, max_ratio_error, samples: kept.len() })
        })
        .collect()
}

/// One restriction record per degree: `□_Σ φ = -l(l+n-1)H² φ` on harmonic
/// polynomials, compared without dividing by `φ`.
pub fn eigen_records(
    cfg: &EmbeddingConfig,
    points: &[AmbientPoint],
    max_l: u32,
    tol: &Tolerances,
) -> Result<Vec<CheckRecord>> {
    require_sphere(cfg)?;
    let mut out = Vec::new();
    for l in 0..=max_l {
        let expected = expected_eigenvalue(cfg, l);
        let mut cmp = Comparison::new(Metric::Rel, tol.homogeneous);
        for (name, phi) in harmonics(cfg, l) {
            match evaluate(cfg, points, &phi) {
                Ok(vals) => {
                    for (y, v, boxed) in vals {
                        cmp.push(&[boxed], &[expected * v], || json!({ "point": y, "harmonic": name, "phi": v }));
                    }
                }
                Err(e) => cmp.push_failure(e.to_string()),
            }
        }
        let check = format!("sphere_eigenvalue_l{l}");
        out.push(
            cmp.finish("restriction", &check, "□_Σ φ = −l(l+n−1)H² φ, harmonic φ", Some(cfg))
                .with_info("l", l as f64)
                .with_info("eigenvalue", expected),
        );
    }
    Ok(out)
}
