//! Randomized invariants for the statistics layer and the depth families.
//!
//! Dyadic inputs (integer multiples of 1/8 in a small range) make shift
//! and evaluation identities exact in f64, so those assertions are
//! bitwise; everything float-rounded uses a relative tolerance.

use approx::assert_relative_eq;
use proptest::prelude::*;

use regdepth_core::axioms::Transform;
use regdepth_core::dataset::residuals;
use regdepth_core::depth::dc::{dc_exact, dc_sampled};
use regdepth_core::depth::obj::{obj_unfitness, Loss, ObjSpec};
use regdepth_core::depth::prd::{prd, uf_with_directions, TSpec};
use regdepth_core::depth::rd::{rd_exact_simple, rd_sampled, rd_with_directions};
use regdepth_core::directions::sample_directions;
use regdepth_core::estimators::{fit_obj, FitOptions};
use regdepth_core::stats::{mad, median, quantile};
use regdepth_core::{Coef, Dataset, DirectionPlan};

fn dyadic(k: i64) -> f64 {
    k as f64 / 8.0
}

/// Integer check that the responses have a strictly positive mad, using
/// doubled values so even-length medians stay in integer arithmetic.
fn integer_mad_positive(ys: &[i64]) -> bool {
    let mut sorted = ys.to_vec();
    sorted.sort_unstable();
    let med2 = sorted[sorted.len() / 2] + sorted[(sorted.len() - 1) / 2];
    let mut dev2: Vec<i64> = ys.iter().map(|y| (2 * y - med2).abs()).collect();
    dev2.sort_unstable();
    dev2[dev2.len() / 2] + dev2[(dev2.len() - 1) / 2] > 0
}

prop_compose! {
    /// Simple-regression data on the 1/8 grid with at least two distinct
    /// carriers and spread responses.
    fn simple_data()(
        pairs in prop::collection::vec(((-256i64..=256), (-1024i64..=1024)), 3..=16)
            .prop_filter("two distinct carriers and positive response mad", |pairs| {
                let mut xs: Vec<i64> = pairs.iter().map(|p| p.0).collect();
                xs.sort_unstable();
                xs.dedup();
                let ys: Vec<i64> = pairs.iter().map(|p| p.1).collect();
                xs.len() >= 2 && integer_mad_positive(&ys)
            })
    ) -> (Vec<f64>, Vec<f64>) {
        (
            pairs.iter().map(|p| dyadic(p.0)).collect(),
            pairs.iter().map(|p| dyadic(p.1)).collect(),
        )
    }
}

prop_compose! {
    fn dyadic_coef()(a in -32i64..=32, b in -32i64..=32) -> (f64, f64) {
        (dyadic(a), dyadic(b))
    }
}

proptest! {
    #[test]
    fn median_is_permutation_invariant(
        mut v in prop::collection::vec(-1e3f64..1e3, 1..40),
        rot in 0usize..40,
    ) {
        let before = median(&v).unwrap();
        let r = rot % v.len();
        v.rotate_left(r);
        prop_assert_eq!(median(&v).unwrap(), before);
        v.reverse();
        prop_assert_eq!(median(&v).unwrap(), before);
    }

    #[test]
    fn quantile_is_permutation_invariant(
        mut v in prop::collection::vec(-1e3f64..1e3, 1..40),
        rot in 0usize..40,
        tau64 in 1i64..64,
    ) {
        let tau = tau64 as f64 / 64.0;
        let before = quantile(&v, tau).unwrap();
        let r = rot % v.len();
        v.rotate_left(r);
        prop_assert_eq!(quantile(&v, tau).unwrap(), before);
        v.reverse();
        prop_assert_eq!(quantile(&v, tau).unwrap(), before);
    }

    #[test]
    fn mad_is_shift_invariant_and_scale_equivariant(
        v in prop::collection::vec(-1e3f64..1e3, 2..40),
        c in -1e3f64..1e3,
        s in prop_oneof![-8f64..-0.125, 0.125f64..8.0],
    ) {
        let base = mad(&v).unwrap();
        let shifted: Vec<f64> = v.iter().map(|x| x + c).collect();
        assert_relative_eq!(mad(&shifted).unwrap(), base, max_relative = 1e-9, epsilon = 1e-9);
        let scaled: Vec<f64> = v.iter().map(|x| x * s).collect();
        assert_relative_eq!(mad(&scaled).unwrap(), s.abs() * base, max_relative = 1e-12, epsilon = 1e-12);
    }

    #[test]
    fn check_loss_negation_swaps_the_quantile_level(
        x in -1e6f64..1e6,
        tau64 in 1i64..64,
    ) {
        let tau = tau64 as f64 / 64.0;
        prop_assert_eq!(Loss::Check(tau).apply(-x), Loss::Check(1.0 - tau).apply(x));
    }

    #[test]
    fn residual_shift_identity_is_exact_on_dyadic_data(
        (xs, ys) in simple_data(),
        b in dyadic_coef(),
        shift in dyadic_coef(),
    ) {
        let ds = Dataset::simple(&xs, &ys).unwrap();
        let beta = Coef::from_slice(&[b.0, b.1]).unwrap();
        let tr = Transform::RegressionShift(Coef::from_slice(&[shift.0, shift.1]).unwrap());
        let tds = tr.apply(&ds).unwrap();
        let tb = tr.map_coef(&beta).unwrap();
        let r = residuals(&ds, &beta).unwrap();
        let tr_r = residuals(&tds, &tb).unwrap();
        for i in 0..ds.n() {
            prop_assert_eq!(r[i], tr_r[i]);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn depths_stay_in_the_unit_interval(
        (xs, ys) in simple_data(),
        b in dyadic_coef(),
    ) {
        let ds = Dataset::simple(&xs, &ys).unwrap();
        let beta = Coef::from_slice(&[b.0, b.1]).unwrap();
        let plan = DirectionPlan::new(16, 7, true);
        let values = [
            obj_unfitness(&ds, &beta, &ObjSpec::least_squares()).map(|u| 1.0 / (1.0 + u)).unwrap(),
            obj_unfitness(&ds, &beta, &ObjSpec::lad()).map(|u| 1.0 / (1.0 + u)).unwrap(),
            dc_exact(&ds, &beta, 1e-9).unwrap().value(),
            rd_exact_simple(&ds, &beta).unwrap().value(),
            prd(&ds, &beta, &plan, &TSpec::Median).unwrap().value(),
        ];
        for v in values {
            prop_assert!((0.0..=1.0).contains(&v), "depth out of range: {v}");
        }
        let (k, n) = rd_exact_simple(&ds, &beta).unwrap().counts().unwrap();
        prop_assert!(k <= n);
        prop_assert_eq!(n as usize, ds.n());
    }

    #[test]
    fn count_depth_minimum_never_rises_with_more_directions(
        (xs, ys) in simple_data(),
        b in dyadic_coef(),
        seed in 0u64..1000,
    ) {
        let ds = Dataset::simple(&xs, &ys).unwrap();
        let beta = Coef::from_slice(&[b.0, b.1]).unwrap();
        let dirs = sample_directions(&DirectionPlan::new(32, seed, true), 2, Some(&ds));
        let (k_few, _) = rd_with_directions(&ds, &beta, &dirs[..8]).unwrap().counts().unwrap();
        let (k_all, _) = rd_with_directions(&ds, &beta, &dirs).unwrap().counts().unwrap();
        prop_assert!(k_all <= k_few);
    }

    #[test]
    fn unfitness_maximum_never_falls_with_more_directions(
        (xs, ys) in simple_data(),
        b in dyadic_coef(),
        seed in 0u64..1000,
    ) {
        let ds = Dataset::simple(&xs, &ys).unwrap();
        let beta = Coef::from_slice(&[b.0, b.1]).unwrap();
        let dirs = sample_directions(&DirectionPlan::new(32, seed, true), 2, Some(&ds));
        let few = uf_with_directions(&ds, &beta, &dirs[..8], &TSpec::Median).unwrap();
        let all = uf_with_directions(&ds, &beta, &dirs, &TSpec::Median).unwrap();
        prop_assert!(all >= few);
    }

    #[test]
    fn sampled_count_depth_matches_the_exact_sweep(
        (xs, ys) in simple_data(),
        b in dyadic_coef(),
        seed in 0u64..1000,
    ) {
        let ds = Dataset::simple(&xs, &ys).unwrap();
        let beta = Coef::from_slice(&[b.0, b.1]).unwrap();
        let plan = DirectionPlan::new(8, seed, true);
        let exact = rd_exact_simple(&ds, &beta).unwrap().counts().unwrap();
        let sampled = rd_sampled(&ds, &beta, &plan).unwrap().counts().unwrap();
        prop_assert_eq!(exact, sampled);
    }

    #[test]
    fn sampled_competitor_depth_dominates_the_on_hyperplane_mass(
        (xs, ys) in simple_data(),
        b in dyadic_coef(),
        seed in 0u64..1000,
    ) {
        let ds = Dataset::simple(&xs, &ys).unwrap();
        let beta = Coef::from_slice(&[b.0, b.1]).unwrap();
        let exact = dc_exact(&ds, &beta, 0.0).unwrap().value();
        let sampled = dc_sampled(&ds, &beta, 200, seed).unwrap().value();
        prop_assert!(sampled >= exact, "sampled {sampled} below exact {exact}");
    }

    #[test]
    fn reported_objective_matches_reevaluation(
        (xs, ys) in simple_data(),
    ) {
        let ds = Dataset::simple(&xs, &ys).unwrap();
        let spec = ObjSpec::lad();
        let opts = FitOptions { refine: false, ..FitOptions::default() };
        let fit = fit_obj(&ds, &spec, &opts).unwrap();
        prop_assert_eq!(fit.achieved, obj_unfitness(&ds, &fit.coef, &spec).unwrap());
    }

    #[test]
    fn mean_absolute_objective_matches_the_direct_formula(
        (xs, ys) in simple_data(),
        b in dyadic_coef(),
    ) {
        let ds = Dataset::simple(&xs, &ys).unwrap();
        let beta = Coef::from_slice(&[b.0, b.1]).unwrap();
        let u = obj_unfitness(&ds, &beta, &ObjSpec::lad()).unwrap();
        let m = mad(&ys).unwrap();
        let r = residuals(&ds, &beta).unwrap();
        let direct = r.iter().map(|ri| (ri / m).abs()).sum::<f64>() / ds.n() as f64;
        assert_relative_eq!(u, direct, max_relative = 1e-12, epsilon = 1e-12);
    }
}
