//! Homogeneous extensions and sections of the restriction map.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use pseudoform::ambient::{sample_sigma, EmbeddingConfig};
use pseudoform::expr::{random_polynomial, FieldExpr, OneFormSource, ScalarSource};
use pseudoform::extension::{
    chi_registry, extend_oneform, extend_scalar, extension_defects, section, section_degree, ChiOperator, FieldKind,
    Root, SigmaField,
};
use pseudoform::restriction::{measured_additional_term_oneform, measured_additional_term_scalar, SigmaPoint};
use pseudoform::Error;

fn geometries() -> Vec<EmbeddingConfig> {
    let mut out = Vec::new();
    for n in 2..=4 {
        out.push(EmbeddingConfig::sphere(n, 1.0).unwrap());
        for eps in [1, -1] {
            out.push(EmbeddingConfig::rn1(n, eps, 1.0).unwrap());
            out.push(EmbeddingConfig::rn2(n, eps, 1.0).unwrap());
        }
    }
    out
}

fn geometry() -> impl Strategy<Value = EmbeddingConfig> {
    let all = geometries();
    (0..all.len()).prop_map(move |i| all[i].clone())
}

fn plane(cfg: &EmbeddingConfig, y: &[f64]) -> Vec<f64> {
    y[..=cfg.n].to_vec()
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn random_field(rng: &mut ChaCha8Rng, kind: FieldKind, n: usize) -> SigmaField {
    match kind {
        FieldKind::Scalar => SigmaField::random_scalar(rng, n, 2, 3),
        FieldKind::OneForm => SigmaField::random_oneform(rng, n, 2, 3),
    }
}

/// `(□ sec)_Σ - □_Σ sec_Σ` at `y`, with the magnitude of the operators.
fn additional_term(p: &SigmaPoint, kind: FieldKind, sec: &pseudoform::extension::Section) -> (Vec<f64>, f64) {
    match kind {
        FieldKind::Scalar => {
            let (at, scale) = measured_additional_term_scalar(p, &sec.eval_jet(&p.seeds).unwrap()).unwrap();
            (vec![at], scale)
        }
        FieldKind::OneForm => measured_additional_term_oneform(p, &sec.eval_components(&p.seeds).unwrap()).unwrap(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn section_degrees_solve_their_quadratic(n in 2usize..12, scalar in any::<bool>()) {
        let (kind, b) = if scalar { (FieldKind::Scalar, n as f64 - 1.0) } else { (FieldKind::OneForm, n as f64 - 3.0) };
        let pos = section_degree(kind, n, Root::Positive);
        let neg = section_degree(kind, n, Root::Negative);
        for s in [pos, neg] {
            prop_assert!((s * s + b * s - 1.0).abs() <= 1e-13 * (1.0 + b * b));
        }
        prop_assert!(pos > 0.0 && neg < 0.0);
        prop_assert!((pos * neg + 1.0).abs() <= 1e-13);
    }

    #[test]
    fn extensions_are_homogeneous(cfg in geometry(), seed in any::<u64>(), lambda in prop::sample::select(vec![0.6, 1.7, 2.5])) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let y = sample_sigma(&cfg, seed, 1).unwrap().remove(0).coords;
        let rho = random_polynomial(&mut rng, cfg.n + 1, 3, 4).to_expr();
        let r = 1.5;
        let d = extension_defects(&extend_scalar(&rho, r, &cfg), &y, lambda).unwrap();
        let scale = d.scaling.0.iter().chain(&d.scaling.1).fold(1.0f64, |m, v| m.max(v.abs()));
        prop_assert!(max_diff(&d.scaling.0, &d.scaling.1) <= 1e-11 * scale);
        prop_assert!(d.euler.abs() <= 1e-10 * scale);

        let h: Vec<FieldExpr> = (0..cfg.n).map(|_| random_polynomial(&mut rng, cfg.n + 1, 2, 3).to_expr()).collect();
        let ext = extend_oneform(&h, section_degree(FieldKind::OneForm, cfg.n, Root::Positive), &cfg).unwrap();
        let d = extension_defects(&ext, &y, lambda).unwrap();
        let size = y.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        let scale = d.scaling.0.iter().chain(&d.scaling.1).fold(1.0f64, |m, v| m.max(v.abs())) * size;
        prop_assert!(max_diff(&d.scaling.0, &d.scaling.1) <= 1e-10 * scale);
        prop_assert!(d.euler <= 1e-9 * scale);
        prop_assert!(d.transversality.abs() <= 1e-10 * scale);
    }

    /// Each section restricts to `β`, and its additional term is `χ(β)`.
    #[test]
    fn sections_realize_their_operator(cfg in geometry(), seed in any::<u64>(), scalar in any::<bool>(), root_neg in any::<bool>()) {
        let kind = if scalar { FieldKind::Scalar } else { FieldKind::OneForm };
        let root = if root_neg { Root::Negative } else { Root::Positive };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let beta = random_field(&mut rng, kind, cfg.n);
        let chis = chi_registry(&mut rng, cfg.n, kind, 2);
        prop_assert_eq!(chis.len(), 5);
        let y = sample_sigma(&cfg, seed, 1).unwrap().remove(0).coords;
        let p = SigmaPoint::new(&cfg, &y).unwrap();
        let want_beta = beta.values_at(&plane(&cfg, &y)).unwrap();
        for chi in &chis {
            let sec = section(&beta, chi, &cfg, root).unwrap();
            let restricted = match kind {
                FieldKind::Scalar => vec![sec.eval_jet(&p.seeds).unwrap().value()],
                FieldKind::OneForm => {
                    let vals: Vec<f64> = sec.eval_components(&p.seeds).unwrap().iter().map(|j| j.value()).collect();
                    p.pullback(&vals)
                }
            };
            let bscale = want_beta.iter().fold(1.0f64, |m, v| m.max(v.abs()));
            prop_assert!(max_diff(&restricted, &want_beta) <= 1e-10 * bscale, "{}: {}", cfg, chi.name());
            let (at, scale) = additional_term(&p, kind, &sec);
            let want = chi.apply(&beta).unwrap().values_at(&plane(&cfg, &y)).unwrap();
            let tol = 1e-7 * scale.max(1.0);
            prop_assert!(max_diff(&at, &want) <= tol, "{}: {}: {:?} vs {:?}", cfg, chi.name(), at, want);
        }
    }
}

#[test]
fn positive_one_form_degree_for_n4() {
    let s = section_degree(FieldKind::OneForm, 4, Root::Positive);
    assert!((s - (5f64.sqrt() - 1.0) / 2.0).abs() < 1e-15);
    // the scalar quadratic for n = 2 is the same one
    assert_eq!(section_degree(FieldKind::Scalar, 2, Root::Positive), s);
}

#[test]
fn unit_density_cubed() {
    let cfg = EmbeddingConfig::rn1(3, -1, 1.0).unwrap();
    let ext = extend_scalar(&FieldExpr::constant(1.0), 3.0, &cfg);
    for y in sample_sigma(&cfg, 1, 5).unwrap() {
        let seeds = pseudoform::seed_coordinates(&y.coords);
        assert!((ext.eval_jet(&seeds).unwrap().value() - 1.0).abs() < 1e-12);
        let d = extension_defects(&ext, &y.coords, 1.7).unwrap();
        assert!((d.scaling.0[0] - 1.7f64.powi(3)).abs() < 1e-12);
        assert!(d.euler.abs() < 1e-11);
    }
}

#[test]
fn rescaling_section_in_anti_de_sitter_null_cone() {
    let cfg = EmbeddingConfig::rn2(3, -1, 1.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let beta = SigmaField::random_oneform(&mut rng, 3, 3, 4);
    let chi = ChiOperator::Scale { factor: -2.5 };
    let sec = section(&beta, &chi, &cfg, Root::Positive).unwrap();
    for y in sample_sigma(&cfg, 8, 10).unwrap() {
        let p = SigmaPoint::new(&cfg, &y.coords).unwrap();
        let a = sec.eval_components(&p.seeds).unwrap();
        // the section does not depend on the plane coordinate
        assert!(a.iter().all(|j| j.grad(cfg.n + 1).abs() < 1e-12));
        let (at, scale) = measured_additional_term_oneform(&p, &a).unwrap();
        let want: Vec<f64> = beta.values_at(&plane(&cfg, &y.coords)).unwrap().iter().map(|v| -2.5 * v).collect();
        assert!(max_diff(&at, &want) <= 1e-7 * scale.max(1.0), "{at:?} vs {want:?}");
    }
}

#[test]
fn mismatched_inputs() {
    let cfg = EmbeddingConfig::rn1(3, 1, 1.0).unwrap();
    let scalar = SigmaField::Scalar { expr: FieldExpr::constant(1.0) };
    let form = SigmaField::OneForm { comps: vec![FieldExpr::constant(1.0); 3] };
    let add = ChiOperator::AddFixed { form: scalar.clone() };
    assert!(matches!(add.apply(&form), Err(Error::Config(_))));
    assert!(matches!(extend_oneform(&[FieldExpr::constant(1.0)], 0.5, &cfg), Err(Error::DimMismatch { .. })));
    let short = SigmaField::OneForm { comps: vec![FieldExpr::constant(1.0); 2] };
    assert!(section(&short, &ChiOperator::Scale { factor: 1.0 }, &cfg, Root::Positive).is_err());
}
