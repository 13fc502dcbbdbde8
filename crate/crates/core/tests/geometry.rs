//! Embeddings, sampling and adapted frames on every geometry family.

use proptest::prelude::*;

use pseudoform::ambient::{
    full_quadratic_form, quadratic_form, quadratic_form_jet, sample_sigma, sigma_residual, AmbientKind,
    EmbeddingConfig, MetricDiag,
};
use pseudoform::frames::{adapted_frame, anholonomy, anholonomy_residual, Anholonomy, FrameField};
use pseudoform::{seed_coordinates, Error, Jet};

fn geometries() -> Vec<EmbeddingConfig> {
    let mut out = Vec::new();
    for n in 2..=4 {
        for h in [1.0, 0.7] {
            out.push(EmbeddingConfig::sphere(n, h).unwrap());
            for eps in [1, -1] {
                out.push(EmbeddingConfig::rn1(n, eps, h).unwrap());
                out.push(EmbeddingConfig::rn2(n, eps, h).unwrap());
            }
        }
    }
    out
}

fn geometry() -> impl Strategy<Value = EmbeddingConfig> {
    let all = geometries();
    (0..all.len()).prop_map(move |i| all[i].clone())
}

fn frame_at(cfg: &EmbeddingConfig, seed: u64) -> (Vec<f64>, FrameField, Anholonomy) {
    let y = sample_sigma(cfg, seed, 1).unwrap().remove(0).coords;
    let frame = adapted_frame(cfg, &y).unwrap();
    let c = anholonomy(&frame).unwrap();
    (y, frame, c)
}

/// Relative size for comparisons at far sample points.
fn size(y: &[f64]) -> f64 {
    y.iter().fold(1.0f64, |m, v| m.max(v.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn samples_satisfy_the_defining_equations(cfg in geometry(), seed in any::<u64>()) {
        let pts = sample_sigma(&cfg, seed, 8).unwrap();
        prop_assert_eq!(&pts, &sample_sigma(&cfg, seed, 8).unwrap());
        for p in &pts {
            prop_assert_eq!(p.coords.len(), cfg.dim());
            prop_assert!(sigma_residual(&cfg, &p.coords) <= 1e-12 * size(&p.coords).powi(2));
            prop_assert!((quadratic_form(&cfg, &p.coords) + cfg.eps_f() / (cfg.h * cfg.h)).abs() <= 1e-12 * size(&p.coords).powi(2));
            if cfg.ambient == AmbientKind::Rn2 {
                prop_assert!((cfg.h * p.coords[cfg.n + 1] - 1.0).abs() <= 1e-14);
                prop_assert!(full_quadratic_form(&cfg, &p.coords).abs() <= 1e-12 * size(&p.coords).powi(2));
            }
        }
    }

    #[test]
    fn dilation_doubles_the_square(cfg in geometry(), y in prop::collection::vec(-3.0f64..3.0, 6)) {
        let y = &y[..cfg.dim()];
        let seeds = seed_coordinates(y);
        let q = quadratic_form_jet(&cfg, &seeds);
        let dq = q.directional(&seeds).unwrap();
        prop_assert!((dq.value() - 2.0 * q.value()).abs() <= 1e-12 * size(y).powi(2));
    }

    #[test]
    fn raise_and_lower_are_inverse(signs in prop::collection::vec(prop::bool::ANY, 1..7), v in prop::collection::vec(-5.0f64..5.0, 7)) {
        let m = MetricDiag::new(signs.iter().map(|&s| if s { 1 } else { -1 }).collect()).unwrap();
        let v = &v[..m.dim()];
        prop_assert_eq!(m.raise(&m.lower(v)), v.to_vec());
        prop_assert_eq!(m.dot(v, v), m.lower(v).iter().zip(v).map(|(a, b)| a * b).sum::<f64>());
    }

    #[test]
    fn adapted_frames_are_orthonormal_and_dual(cfg in geometry(), seed in any::<u64>()) {
        let (y, frame, c) = frame_at(&cfg, seed);
        let diag = frame.diagnostics(&cfg);
        prop_assert!(diag.worst() <= 1e-10, "{cfg}: {diag:?}");
        prop_assert_eq!(frame.frame_metric.sign(cfg.n), -cfg.eps_f());
        prop_assert!(anholonomy_residual(&frame, &c).unwrap() <= 1e-9 * size(&y));
        let again = adapted_frame(&cfg, &y).unwrap();
        prop_assert_eq!(frame.values(), again.values());
    }

    /// `[e_μ, e_n] = H e_μ` on Σ, so `c^ν_{μn} = H δ^ν_μ` and `c^n_{μn} = 0`.
    #[test]
    fn normal_brackets(cfg in geometry(), seed in any::<u64>()) {
        let (_, _, c) = frame_at(&cfg, seed);
        let n = cfg.n;
        let mut trace = 0.0;
        for mu in 0..n {
            for nu in 0..=n {
                let want = if nu == mu { cfg.h } else { 0.0 };
                prop_assert!((c.get(nu, mu, n).value() - want).abs() <= 1e-10, "c^{nu}_({mu}{n})");
            }
            trace += c.get(mu, mu, n).value();
        }
        prop_assert!((trace - n as f64 * cfg.h).abs() <= 1e-10);
        prop_assert!((c.trace(n).value() - n as f64 * cfg.h).abs() <= 1e-10);
    }

    /// The coefficients are homogeneous of degree −1 and `e_n = H D` on Σ.
    #[test]
    fn normal_derivative_of_coefficients(cfg in geometry(), seed in any::<u64>()) {
        let (y, frame, c) = frame_at(&cfg, seed);
        let d = frame.dim();
        for a in 0..d {
            for b in 0..d {
                for cc in 0..d {
                    let j = c.get(a, b, cc);
                    let en = frame.derivative(cfg.n, j).unwrap().value();
                    prop_assert!((en + cfg.h * j.value()).abs() <= 1e-9 * size(&y));
                }
            }
        }
    }

    /// Cyclic sum of `e_a(c^d_{bc}) + c^e_{bc} c^d_{ae}` vanishes.
    #[test]
    fn jacobi_identity(cfg in geometry(), seed in any::<u64>()) {
        let (y, frame, c) = frame_at(&cfg, seed);
        let k = frame.dim();
        let term = |a: usize, b: usize, cc: usize, dd: usize| -> f64 {
            frame.derivative(a, c.get(dd, b, cc)).unwrap().value()
                + (0..k).map(|e| c.get(e, b, cc).value() * c.get(dd, a, e).value()).sum::<f64>()
        };
        for a in 0..k {
            for b in 0..k {
                for cc in 0..k {
                    for dd in 0..k {
                        let s = term(a, b, cc, dd) + term(b, cc, a, dd) + term(cc, a, b, dd);
                        prop_assert!(s.abs() <= 1e-8 * size(&y).powi(2), "({a}{b}{cc}) d={dd}: {s}");
                    }
                }
            }
        }
    }
}

#[test]
fn de_sitter_reference_point() {
    let cfg = EmbeddingConfig::rn1(2, 1, 1.0).unwrap();
    let y = [0.0, 1.0, 0.0];
    assert_eq!(quadratic_form(&cfg, &y), -1.0);
    assert_eq!(sigma_residual(&cfg, &y), 0.0);
    let f = adapted_frame(&cfg, &y).unwrap();
    assert_eq!(f.values()[2], vec![0.0, 1.0, 0.0]);
}

#[test]
fn sphere_pole_frame() {
    let cfg = EmbeddingConfig::sphere(2, 2.0).unwrap();
    let f = adapted_frame(&cfg, &[0.0, 0.0, 0.5]).unwrap();
    assert_eq!(f.values()[2], vec![0.0, 0.0, 1.0]);
    let c = anholonomy(&f).unwrap();
    assert!((c.get(0, 0, 2).value() - 2.0).abs() < 1e-12);
    assert!((c.get(1, 1, 2).value() - 2.0).abs() < 1e-12);
}

#[test]
fn rn2_frame_is_independent_of_the_plane_coordinate() {
    let cfg = EmbeddingConfig::rn2(3, -1, 1.0).unwrap();
    let (_, frame, _) = frame_at(&cfg, 3);
    assert!(frame.diagnostics(&cfg).translation == 0.0);
    let last: Vec<f64> = frame.e[4].iter().map(Jet::value).collect();
    assert_eq!(last, vec![0.0, 0.0, 0.0, 0.0, 1.0]);
}

#[test]
fn invalid_configurations() {
    assert!(matches!(EmbeddingConfig::rn1(1, 1, 1.0), Err(Error::Config(_))));
    assert!(matches!(EmbeddingConfig::rn2(3, 0, 1.0), Err(Error::Config(_))));
    assert!(matches!(EmbeddingConfig::sphere(3, -1.0), Err(Error::Config(_))));
    assert!(matches!(sample_sigma(&EmbeddingConfig::sphere(2, 1.0).unwrap(), 0, 0), Err(Error::Config(_))));
    assert!(MetricDiag::new(vec![1, 0]).is_err());
}
