use proptest::prelude::*;
use rug::Float;
use tplab::function::EvaluableFunction;
use tplab::numerics::{real, PrecisionConfig};
use tplab::pff_catalog::{catalog_list, CatalogEntry};
use tplab::transforms::quad::panel_enclosures;
use tplab::transforms::{bilateral_laplace, LambdaConfig, LambdaXi, QuadratureConfig, Scheme};

fn strip_points(e: &CatalogEntry) -> Vec<f64> {
    let strip = e.strip().unwrap();
    let a = strip.lo.unwrap_or(-3.0).max(-3.0);
    let b = strip.hi.unwrap_or(6.0).min(6.0);
    (0..20).map(|k| a + (b - a) * (k as f64 + 0.5) / 20.0).collect()
}

#[test]
fn laplace_matches_reciprocal_psi_to_target() {
    let prec = PrecisionConfig::new(30).unwrap();
    let qc = QuadratureConfig::default();
    let target = qc.target(&prec);
    for e in catalog_list() {
        for s in strip_points(&e) {
            let l = bilateral_laplace(&e, &real(s), &qc, &prec).unwrap().value;
            let want = e.psi(&real(s), &prec).unwrap().recip().unwrap();
            assert!(*l.rad() <= target, "{e} at {s}: radius {}", l.rad_string());
            assert!(l.overlaps(&want), "{e} at {s}: {} vs {}", l.mid_string(), want.mid_string());
        }
    }
}

#[test]
fn transform_outside_strip_is_rejected() {
    let prec = PrecisionConfig::new(20).unwrap();
    let qc = QuadratureConfig::default();
    let e = CatalogEntry::Logistic;
    assert!(bilateral_laplace(&e, &real(1.5), &qc, &prec).is_err());
    assert!(bilateral_laplace(&e, &real(-0.5), &qc, &prec).is_err());
}

#[test]
fn lambda_is_certified_positive_up_to_ten() {
    let prec = PrecisionConfig::new(50).unwrap();
    let lambda = LambdaXi::new(LambdaConfig::default(), &prec).unwrap();
    for k in -2..=20 {
        let x = k as f64 * 0.5;
        let v = lambda.value(&real(x)).unwrap();
        assert!(v.is_positive(), "Lambda({x}) = {} ± {}", v.mid_string(), v.rad_string());
    }
    assert!(lambda.value(&real(10.5)).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 32, ..ProptestConfig::default() })]

    #[test]
    fn refinement_never_widens(a in -3.0f64..3.0, w in 0.1f64..4.0, gl in any::<bool>()) {
        let bits = 128;
        let f = |x: &Float| CatalogEntry::Gumbel.eval(x, bits);
        let scheme = if gl { Scheme::GaussLegendrePanels } else { Scheme::DoubleExponential };
        let encs = panel_enclosures(&f, &real(a), &real(a + w), scheme, 6, None, bits).unwrap();
        for pair in encs.windows(2) {
            prop_assert!(pair[1].rad() <= pair[0].rad());
        }
    }
}
