use proptest::prelude::*;
use tplab::function::EvaluableFunction;
use tplab::lp_class::lp_eval;
use tplab::numerics::{real, PrecisionConfig};
use tplab::pff_catalog::{catalog_list, CatalogEntry};
use tplab::tp_tester::{tp_det, Grid};
use tplab::transforms::{bilateral_laplace, QuadratureConfig};
use tplab::Ball;

const DIGITS: u32 = 30;

/// 20 interior points of the strip, clipped to [-3, 6].
fn strip_points(e: &CatalogEntry) -> Vec<f64> {
    let strip = e.strip().unwrap();
    let a = strip.lo.unwrap_or(-3.0).max(-3.0);
    let b = strip.hi.unwrap_or(6.0).min(6.0);
    (0..20).map(|k| a + (b - a) * (k as f64 + 0.5) / 20.0).collect()
}

/// L(s)·Ψ(s) = 1 with Ψ from the factorization data. Entries with finitely
/// many zeros meet 10^-(digits-12); for infinite products the generic tail
/// bound of the truncated product dominates, so only consistency (the
/// enclosure of L·Ψ − 1 contains 0) is checked.
#[test]
fn laplace_times_factorized_psi_is_one() {
    let prec = PrecisionConfig::new(DIGITS).unwrap();
    let qc = QuadratureConfig::default();
    let tol = prec.rel_tolerance(12).to_f64();
    for e in catalog_list() {
        let fac = e.factorization(2000, prec.work_bits()).unwrap().unwrap().to_lp().unwrap();
        let finite = matches!(e, CatalogEntry::Gaussian { .. } | CatalogEntry::OneSidedExp { .. });
        for s in strip_points(&e) {
            let l = bilateral_laplace(&e, &real(s), &qc, &prec).unwrap().value;
            let psi = lp_eval(&fac, &Ball::from_f64(s, prec.work_bits()), &prec).unwrap();
            let err = l.mul(&psi).sub(&Ball::one(prec.work_bits()));
            if finite {
                assert!(err.mag() < tol, "{e} at s = {s}: {} ± {}", err.mid_string(), err.rad_string());
            } else {
                assert!(err.contains_zero(), "{e} at s = {s}: {} ± {}", err.mid_string(), err.rad_string());
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    /// det = e^{-π[(x₁-y₁)² + (x₂-y₂)²]} (1 − e^{-2π(x₂-x₁)(y₂-y₁)}) ≥ 0.
    #[test]
    fn gaussian_order_two_closed_form(x1 in -2.0f64..2.0, dx in 0.01f64..2.0, y1 in -2.0f64..2.0, dy in 0.01f64..2.0) {
        let prec = PrecisionConfig::new(DIGITS).unwrap();
        let (x2, y2) = (x1 + dx, y1 + dy);
        let g = Grid::new(vec![x1, x2], vec![y1, y2]).unwrap();
        let d = tp_det(&CatalogEntry::Gaussian { gamma: 1.0 }, &g, &prec).unwrap();
        prop_assert!(!d.is_negative());
        let bits = 192;
        let pi = Ball::pi(bits);
        let f = |v: f64| Ball::from_f64(v, bits);
        let (a, b) = (f(x1).sub(&f(y1)), f(x2).sub(&f(y2)));
        let lead = pi.mul(&a.sqr().add(&b.sqr())).neg().exp();
        let cross = pi.mul_2exp(1).mul(&f(x2).sub(&f(x1))).mul(&f(y2).sub(&f(y1)));
        let want = lead.mul(&cross.neg().exp_m1().neg());
        prop_assert!(d.overlaps(&want), "{} vs {}", d.mid_string(), want.mid_string());
    }

    #[test]
    fn normalized_gumbel_is_tilted_gumbel(x in -4.0f64..8.0) {
        let bits = 160;
        let xf = real(x);
        let a = CatalogEntry::GumbelNormalized.eval(&xf, bits).unwrap();
        let b = CatalogEntry::Gumbel.eval(&xf, bits).unwrap().mul(&Ball::from_f64(-x, bits).exp());
        prop_assert!(a.overlaps(&b));
    }
}
