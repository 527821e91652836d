use proptest::prelude::*;
use rug::Float;
use tplab::lp_class::{lp_eval, lp_series, series_reciprocal, turan_deltas, LPFactorization};
use tplab::numerics::PrecisionConfig;
use tplab::Ball;

const BITS: u32 = 160;

fn factorization(c: f64, gamma: f64, delta: f64, zeros: &[f64]) -> LPFactorization {
    LPFactorization::new(
        Ball::from_f64(c, BITS),
        0,
        Ball::from_f64(gamma, BITS),
        Ball::from_f64(delta, BITS),
        zeros.iter().map(|&d| Ball::from_f64(d, BITS)).collect(),
        Float::new(64),
    )
    .unwrap()
}

fn data() -> impl Strategy<Value = (f64, f64, f64, Vec<f64>)> {
    (0.5f64..2.0, 0.0f64..0.5, -1.0f64..1.0, prop::collection::vec(prop_oneof![0.1f64..1.0, -1.0f64..-0.1], 0..5))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 100, ..ProptestConfig::default() })]

    /// Ψ(s) · (1/Ψ)(s) = 1 for |s| below an eighth of the smallest zero
    /// modulus; the series is cut after 60 terms, leaving a tail of order 8^-60.
    #[test]
    fn product_with_reciprocal_series_is_one((c, gamma, delta, zeros) in data(), u in -1.0f64..1.0) {
        let prec = PrecisionConfig::new(30).unwrap();
        let fac = factorization(c, gamma, delta, &zeros);
        let r = zeros.iter().fold(1.0f64, |m, d| m.min(1.0 / d.abs()));
        let s = Ball::from_f64(u * r / 8.0, BITS);
        let recip = series_reciprocal(&lp_series(&fac, 60, &prec).unwrap()).unwrap();
        let prod = lp_eval(&fac, &s, &prec).unwrap().mul(&recip.eval(&s));
        let err = prod.sub(&Ball::one(BITS));
        prop_assert!(err.mag() < 1e-25, "{} ± {}", err.mid_string(), err.rad_string());
    }

    #[test]
    fn turan_inequalities_hold_for_finite_products((c, gamma, delta, zeros) in data()) {
        let prec = PrecisionConfig::new(30).unwrap();
        let fac = factorization(c, gamma, delta, &zeros);
        for (n, d) in turan_deltas(&lp_series(&fac, 12, &prec).unwrap()).unwrap().iter().enumerate() {
            prop_assert!(!d.is_negative(), "Delta_{} = {} ± {}", n + 1, d.mid_string(), d.rad_string());
        }
    }
}
