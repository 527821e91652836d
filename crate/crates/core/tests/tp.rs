use proptest::prelude::*;
use tplab::numerics::PrecisionConfig;
use tplab::pff_catalog::CatalogEntry;
use tplab::tp_tester::{bochner_battery, tp_battery, tp_det, Grid, GridStrategy, TpVerdict};

/// Points on the 2^-10 lattice so that shifts stay exact.
fn lattice(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::btree_set(-2048i32..2048, n).prop_map(|s| s.into_iter().map(|k| k as f64 / 1024.0).collect())
}

fn prec() -> PrecisionConfig {
    PrecisionConfig::new(30).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn sorting_unordered_points_gives_same_minor(n in 1usize..5, seed in any::<u64>()) {
        let g = tplab::tp_tester::random_grid(&CatalogEntry::Logistic, n, seed, 0, GridStrategy::UniformWindow);
        let (mut xs, mut ys) = (g.xs.clone(), g.ys.clone());
        xs.reverse();
        ys.rotate_left(1);
        let h = Grid::sorted(xs, ys).unwrap();
        prop_assert_eq!(&h, &g);
        let e = CatalogEntry::Logistic;
        let (a, b) = (tp_det(&e, &g, &prec()).unwrap(), tp_det(&e, &h, &prec()).unwrap());
        prop_assert_eq!(a.mid(), b.mid());
        prop_assert_eq!(a.rad(), b.rad());
    }

    #[test]
    fn minors_are_translation_invariant(xs in lattice(3), ys in lattice(3), t in -512i32..512) {
        let t = t as f64 / 1024.0;
        let e = CatalogEntry::Gaussian { gamma: 1.0 };
        let g = Grid::new(xs.clone(), ys.clone()).unwrap();
        let h = Grid::new(xs.iter().map(|x| x + t).collect(), ys.iter().map(|y| y + t).collect()).unwrap();
        let (a, b) = (tp_det(&e, &g, &prec()).unwrap(), tp_det(&e, &h, &prec()).unwrap());
        prop_assert!(a.overlaps(&b));
    }

    /// With x₁ below every y the first row vanishes: det is exactly 0.
    #[test]
    fn one_sided_row_below_support_is_zero(xs in lattice(3), ys in lattice(3)) {
        prop_assume!(xs[0] < ys[0]);
        let e = CatalogEntry::OneSidedExp { delta: 1.0 };
        let d = tp_det(&e, &Grid::new(xs, ys).unwrap(), &prec()).unwrap();
        prop_assert!(d.is_exact() && d.mid().is_zero());
    }
}

#[test]
fn batteries_do_not_depend_on_thread_count() {
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            let tp = tp_battery(&CatalogEntry::Logistic, 4, 40, 11, GridStrategy::Clustered, &prec()).unwrap();
            let bo = bochner_battery(4, 5.0, 20, 11, &prec()).unwrap();
            (serde_json::to_string(&tp).unwrap(), serde_json::to_string(&bo).unwrap())
        })
    };
    assert_eq!(run(1), run(4));
}

#[test]
fn indicator_is_caught_and_pff_entries_are_not() {
    let p = prec();
    let bad = tp_battery(&CatalogEntry::Indicator, 4, 100, 3, GridStrategy::AdversarialSupportEdges, &p).unwrap();
    assert_eq!(bad.verdict, TpVerdict::CertifiedViolation);
    let good = tp_battery(&CatalogEntry::JacobiTheta, 4, 50, 3, GridStrategy::UniformWindow, &p).unwrap();
    assert_eq!(good.verdict, TpVerdict::NoCertifiedViolation);
}
