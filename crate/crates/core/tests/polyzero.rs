use proptest::prelude::*;
use rug::{Float, Rational};
use tplab::moments::{jensen_report, schoenberg_pipeline, MomentSequence};
use tplab::numerics::PrecisionConfig;
use tplab::pff_catalog::CatalogEntry;
use tplab::polyzero::{
    cauchy_bound, convolve_with, isolate_real_roots, random_polynomial, real_root_count, sign_changes, Polynomial,
    SignSampling, SturmChain,
};
use tplab::series::PowerSeries;
use tplab::transforms::QuadratureConfig;
use tplab::{Ball, Verdict};

const BITS: u32 = 256;

fn ints(n: usize) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-9i64..=9, n)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 50, ..ProptestConfig::default() })]

    #[test]
    fn root_count_is_additive_over_products(seed in any::<u64>(), a in 0usize..1000, b in 0usize..1000) {
        let p = random_polynomial(6, seed, a);
        let q = random_polynomial(6, seed, b);
        let n = |r: &Polynomial| real_root_count(r).value().unwrap();
        prop_assert_eq!(n(&p.mul(&q)), n(&p) + n(&q));
    }

    /// Sampling between isolating intervals sees exactly the distinct zeros
    /// of odd multiplicity.
    #[test]
    fn sign_changes_count_odd_multiplicity_zeros(seed in any::<u64>(), t in 0usize..1000, sq in 0usize..1000) {
        let p = random_polynomial(5, seed, t).mul(&random_polynomial(2, seed, sq).mul(&random_polynomial(2, seed, sq)));
        let odd: usize = p
            .square_free_decomposition()
            .iter()
            .filter(|(m, _)| m % 2 == 1)
            .map(|(_, f)| SturmChain::new(f).distinct_real_roots())
            .sum();
        let width = Rational::from((1, 64));
        let iv = isolate_real_roots(&p, Some(&width));
        let b = cauchy_bound(&p) + Rational::from(1);
        let mut grid = vec![Rational::from(-&b)];
        grid.extend(iv.windows(2).map(|w| Rational::from(&w[0].1 + &w[1].0) / 2));
        grid.push(b);
        grid.dedup();
        for x in &grid {
            prop_assume!(p.eval(x) != 0);
        }
        let pb = p.to_ball(BITS);
        let xs: Vec<Float> = grid.iter().map(|x| Float::with_val(BITS, x)).collect();
        let s = SignSampling::from_fn(xs, |x| pb.eval(&Ball::exact(x.clone()))).unwrap();
        let c = sign_changes(&s);
        prop_assert!(!c.skipped);
        prop_assert_eq!(c.count, odd);
    }

    #[test]
    fn convolution_is_linear(p in ints(6), q in ints(6), mu in ints(6), a in -5i64..5, b in -5i64..5) {
        let r = |v: &[i64]| Polynomial::from_i64(v);
        let mu: Vec<Rational> = mu.into_iter().map(Rational::from).collect();
        let (p, q) = (r(&p), r(&q));
        let (a, b) = (Rational::from(a), Rational::from(b));
        let lhs = convolve_with(&mu, &p.scale(&a).add(&q.scale(&b))).unwrap();
        let rhs = convolve_with(&mu, &p).unwrap().scale(&a).add(&convolve_with(&mu, &q).unwrap().scale(&b));
        prop_assert_eq!(lhs, rhs);
    }
}

/// Ψ(s) = 1 + s: q_n = x^{n-1}(x + n) has n real zeros, both from the
/// series directly and through the moment pipeline of e^{-x} on [0, ∞).
#[test]
fn jensen_bridge_for_one_sided_exponential() {
    let psi = PowerSeries::new((0..=10).map(|j| Rational::from(u32::from(j <= 1))).collect::<Vec<_>>());
    let direct = jensen_report(&psi, 10).unwrap();
    let prec = PrecisionConfig::new(30).unwrap();
    let rep = schoenberg_pipeline(&CatalogEntry::OneSidedExp { delta: 1.0 }, Some(12), 10, &QuadratureConfig::default(), &prec)
        .unwrap();
    assert_eq!(rep.verdict, Verdict::Holds);
    for (d, p) in direct.iter().zip(&rep.jensen) {
        assert_eq!(d.real_roots.value().unwrap(), d.n);
        assert_eq!(p.real_roots, d.real_roots);
    }
    assert_eq!(rep.jensen.len(), 10);
}

#[test]
fn one_sided_moments_decrease_zeros() {
    let mu: Vec<Rational> = (0..8u32).map(|j| Rational::from(rug::Integer::factorial(j))).collect();
    let ms = MomentSequence::from_exact(mu, 128).unwrap();
    let rep = tplab::polyzero::vd_battery(&ms, 7, 100, 5).unwrap();
    assert_eq!(rep.verdict, Verdict::Holds);
}
