use proptest::prelude::*;
use rug::Float;
use tplab::numerics::{gamma_real, real, xi_real, zeta_real, PrecisionConfig};

fn p(d: u32) -> PrecisionConfig {
    PrecisionConfig::new(d).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 1000, ..ProptestConfig::default() })]

    #[test]
    fn xi_is_symmetric(sigma in -10.0f64..11.0) {
        let prec = p(30);
        let s = real(sigma);
        // 1 − σ exactly; an f64 subtraction may round
        let t = Float::with_val(128, 1 - &s);
        let a = xi_real(&s, &prec).unwrap();
        let b = xi_real(&t, &prec).unwrap();
        prop_assert!(a.overlaps(&b), "sigma = {sigma}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn higher_precision_is_contained(sigma in -9.5f64..30.0) {
        prop_assume!((sigma - sigma.round()).abs() > 1e-6 || sigma > 1.5);
        prop_assume!((sigma - 1.0).abs() > 1e-6);
        let (lo, hi) = (p(25), p(60));
        let s = real(sigma);
        let pairs = [
            (xi_real(&s, &lo).unwrap(), xi_real(&s, &hi).unwrap()),
            (zeta_real(&s, &lo).unwrap(), zeta_real(&s, &hi).unwrap()),
            (gamma_real(&s, &lo).unwrap(), gamma_real(&s, &hi).unwrap()),
        ];
        for (a, b) in pairs {
            prop_assert!(a.contains_ball(&b), "sigma = {sigma}: {} ± {} vs {} ± {}", a.mid_string(), a.rad_string(), b.mid_string(), b.rad_string());
        }
    }
}

#[test]
fn xi_is_positive_on_the_real_line() {
    let prec = p(30);
    for k in 0..=600 {
        let sigma = -30.0 + 0.1 * k as f64;
        let v = xi_real(&real(sigma), &prec).unwrap();
        assert!(v.is_positive(), "xi({sigma}) = {} ± {}", v.mid_string(), v.rad_string());
    }
}

/// ln ξ(σ) / (σ ln σ) tends to ½ from below: Stirling gives
/// ½(1 − (1 + ln 2π)/ln σ) + O(ln σ / σ).
#[test]
fn xi_growth_rate() {
    let prec = p(30);
    let ratio = |sigma: f64| {
        let v = xi_real(&real(sigma), &prec).unwrap();
        v.ln().unwrap().to_f64() / (sigma * sigma.ln())
    };
    let mut last = 0.0;
    for sigma in [50.0, 100.0, 200.0, 1e3, 1e4, 1e5, 1e6, 1e7, 5e7] {
        let r = ratio(sigma);
        let stirling = 0.5 * (1.0 - (1.0 + (2.0 * std::f64::consts::PI).ln()) / sigma.ln());
        assert!((r - stirling).abs() < 2.0 * sigma.ln() / sigma, "sigma = {sigma}: {r} vs {stirling}");
        assert!(r > last);
        last = r;
    }
    for sigma in [1e7, 2e7, 5e7] {
        let r = ratio(sigma);
        assert!((0.4..=0.6).contains(&r), "sigma = {sigma}: {r}");
    }
}
