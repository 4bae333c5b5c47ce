//! Regression depth: the smallest fraction of points whose residual sign
//! agrees with a direction's carrier projection, over all directions.
//!
//! Evaluators:
//! * [`rd_exact_simple`] — exact sweep for simple regression (intercept
//!   plus one carrier). The candidate count is piecewise constant in the
//!   sweep pivot with breakpoints only at data carriers, so carriers,
//!   adjacent midpoints, and two sentinels cover every cell.
//! * [`rd_sampled`] — direction-sampled upper bound for any p; with data
//!   directions enabled it reproduces the exact sweep for p = 2.
//! * [`rd_bai_he`] — strict-inequality two-sided form, equal to the
//!   direction form in general position and a labeled alternative when
//!   residuals or projections hit zero.
//! * [`rd_competitor_bound`] — tilting-competitor upper bound converging
//!   toward the depth as competitors accumulate.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Cauchy, Distribution};
use rayon::prelude::*;

use crate::dataset::{residuals, Coef, Dataset, DepthValue};
use crate::directions::{sample_directions, sweep_pivots, DirectionPlan};
use crate::error::{Error, Result};

/// Exact regression depth for simple regression via the pivot sweep.
///
/// For each sign `v2` in {+1, -1} and pivot `v1` over sorted distinct
/// carriers, adjacent midpoints, and sentinels outside the data range,
/// counts `#{i : r_i * (v2*x_i - v1*v2) >= 0}`; zero residuals count
/// toward every candidate. Returns the minimum as an exact `k/n`.
pub fn rd_exact_simple(ds: &Dataset, b: &Coef) -> Result<DepthValue> {
    let xs = ds.simple_carriers()?;
    let r = residuals(ds, b)?;
    let n = ds.n();
    let mut best = n as u64;
    for v2 in [1.0f64, -1.0] {
        for &v1 in &sweep_pivots(&xs) {
            let count = (0..n)
                .filter(|&i| r[i] * (v2 * xs[i] - v1 * v2) >= 0.0)
                .count() as u64;
            best = best.min(count);
        }
    }
    DepthValue::from_counts(best, n as u64)
}

/// Direction-sampled regression depth: min over sampled `v` of
/// `#{i : r_i * (w_i'v) >= 0} / n`. An upper bound on the depth,
/// nonincreasing as directions are added; equals [`rd_exact_simple`] for
/// p = 2 with data directions enabled.
pub fn rd_sampled(ds: &Dataset, b: &Coef, plan: &DirectionPlan) -> Result<DepthValue> {
    let dirs = sample_directions(plan, ds.p(), Some(ds));
    rd_with_directions(ds, b, &dirs)
}

/// The sampled evaluator over an explicit direction list. Directions
/// need not be unit vectors: only the sign pattern of the projections
/// matters.
pub fn rd_with_directions(ds: &Dataset, b: &Coef, dirs: &[DVector<f64>]) -> Result<DepthValue> {
    let r = residuals(ds, b)?;
    if dirs.is_empty() {
        return Err(Error::InvalidParameter("direction plan produced no directions".into()));
    }
    let n = ds.n();
    let best = dirs
        .par_iter()
        .map(|v| {
            let proj = ds.x() * v;
            (0..n).filter(|&i| r[i] * proj[i] >= 0.0).count() as u64
        })
        .min()
        .expect("nonempty directions");
    DepthValue::from_counts(best, n as u64)
}

/// Two-sided strict-count form: min over candidate pairs `(u, v)` of
/// `min(#{r_i (u'x_i - v) > 0}, #{r_i (u'x_i - v) < 0}) / n`.
///
/// Candidate pairs come from the sampled direction set: `u` is the
/// carrier block of a direction and `v` its negated intercept coordinate,
/// so with data directions enabled the `v` candidates run over projected
/// carriers, their midpoints, and sentinels. Zero residuals and exact
/// projection ties count toward neither side, which makes this form a
/// lower bound on the direction form.
pub fn rd_bai_he(ds: &Dataset, b: &Coef, plan: &DirectionPlan) -> Result<DepthValue> {
    if !ds.has_intercept() {
        return Err(Error::WrongShape(
            "the two-sided strict form separates intercept from carriers".into(),
        ));
    }
    let r = residuals(ds, b)?;
    let dirs = sample_directions(plan, ds.p(), Some(ds));
    if dirs.is_empty() {
        return Err(Error::InvalidParameter("direction plan produced no directions".into()));
    }
    let n = ds.n();
    let best = dirs
        .par_iter()
        .map(|v| {
            // d'w_i = u'x_i - v for u = carrier block, v = -d[0]
            let proj = ds.x() * v;
            let mut pos = 0u64;
            let mut neg = 0u64;
            for i in 0..n {
                let s = r[i] * proj[i];
                if s > 0.0 {
                    pos += 1;
                } else if s < 0.0 {
                    neg += 1;
                }
            }
            pos.min(neg)
        })
        .min()
        .expect("nonempty directions");
    DepthValue::from_counts(best, n as u64)
}

fn heavy_tailed_tilt(rng: &mut ChaCha8Rng) -> f64 {
    // standard Cauchy scaled log-uniformly down to 1e-8, favors tiny tilts
    let cauchy = Cauchy::new(0.0, 1.0).expect("valid cauchy");
    let c: f64 = cauchy.sample(rng);
    let exponent: f64 = rng.gen_range(-8.0..0.0);
    c * 10f64.powf(exponent)
}

/// Competitor-form upper bound: min over tilted competitors `alpha` of
/// `#{i : |r_i(b)| <= |r_i(alpha)|} / n`.
///
/// Competitors tilt `b` about hyperlines over random size-(p-1) data
/// subsets by heavy-tailed angles, so most lie close to `b` where the
/// infimum is approached. Nonincreasing in `n_competitors` for a fixed
/// seed (the competitor stream is a deterministic prefix sequence).
pub fn rd_competitor_bound(
    ds: &Dataset,
    b: &Coef,
    n_competitors: usize,
    seed: u64,
) -> Result<DepthValue> {
    let r = residuals(ds, b)?;
    let n = ds.n();
    let p = ds.p();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut competitors: Vec<(DVector<f64>, f64)> = Vec::with_capacity(n_competitors);
    let mut guard = 0usize;
    while competitors.len() < n_competitors && guard < n_competitors * 4 {
        guard += 1;
        let d = if p == 1 {
            Some(DVector::from_column_slice(&[1.0]))
        } else {
            let mut pick: Vec<usize> = Vec::with_capacity(p - 1);
            while pick.len() < p - 1 {
                let c = rng.gen_range(0..n);
                if !pick.contains(&c) {
                    pick.push(c);
                }
            }
            let rows: Vec<DVector<f64>> = pick.iter().map(|&i| ds.row(i)).collect();
            crate::directions::span_normal(&rows, p)
        };
        let t = heavy_tailed_tilt(&mut rng);
        if let Some(d) = d {
            if t.is_finite() && t != 0.0 {
                competitors.push((d, t));
            }
        }
    }
    let best = competitors
        .par_iter()
        .map(|(d, t)| {
            let proj = ds.x() * d;
            (0..n)
                .filter(|&i| r[i].abs() <= (r[i] - t * proj[i]).abs())
                .count() as u64
        })
        .min()
        .unwrap_or(n as u64);
    DepthValue::from_counts(best, n as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mirrored_ds() -> Dataset {
        Dataset::simple(&[-1.0, -1.0, 1.0, 1.0], &[-2.0, 0.0, 0.0, 2.0]).unwrap()
    }

    #[test]
    fn collinear_data_has_full_depth() {
        let ds = Dataset::simple(&[0.0, 1.0, 2.0], &[1.0, 3.0, 5.0]).unwrap();
        let b = Coef::from_slice(&[1.0, 2.0]).unwrap();
        let d = rd_exact_simple(&ds, &b).unwrap();
        assert_eq!(d.counts(), Some((3, 3)));
        assert_eq!(d.value(), 1.0);
    }

    #[test]
    fn mirrored_four_points_have_half_depth() {
        let b = Coef::from_slice(&[0.0, 1.0]).unwrap();
        let d = rd_exact_simple(&mirrored_ds(), &b).unwrap();
        assert_eq!(d.counts(), Some((2, 4)));
    }

    #[test]
    fn single_off_point_has_zero_depth() {
        let ds = Dataset::simple(&[0.0], &[0.0]).unwrap();
        let b = Coef::from_slice(&[5.0, 0.0]).unwrap();
        let d = rd_exact_simple(&ds, &b).unwrap();
        assert_eq!(d.counts(), Some((0, 1)));
    }

    #[test]
    fn wrong_shape_is_rejected() {
        let ds = Dataset::from_rows(&[vec![1.0], vec![2.0]], &[1.0, 2.0]).unwrap();
        let b = Coef::from_slice(&[1.0]).unwrap();
        assert!(matches!(rd_exact_simple(&ds, &b), Err(Error::WrongShape(_))));
    }

    #[test]
    fn sampled_equals_exact_with_data_directions() {
        let ds = Dataset::simple(&[0.0, 1.0, 2.5, 3.0, 4.5], &[1.0, 0.5, 3.0, 2.0, 5.0]).unwrap();
        let plan = DirectionPlan::new(32, 9, true);
        for bs in [[0.0, 1.0], [1.0, 0.5], [-2.0, 2.0], [0.5, 0.0]] {
            let b = Coef::from_slice(&bs).unwrap();
            let exact = rd_exact_simple(&ds, &b).unwrap();
            let sampled = rd_sampled(&ds, &b, &plan).unwrap();
            assert_eq!(exact.counts(), sampled.counts());
        }
    }

    #[test]
    fn sampled_perfect_fit_is_one_for_any_plan() {
        let ds = Dataset::simple(&[0.0, 1.0, 2.0], &[1.0, 3.0, 5.0]).unwrap();
        let b = Coef::from_slice(&[1.0, 2.0]).unwrap();
        for plan in [DirectionPlan::new(4, 0, false), DirectionPlan::new(256, 3, true)] {
            assert_eq!(rd_sampled(&ds, &b, &plan).unwrap().value(), 1.0);
        }
    }

    #[test]
    fn vertical_limit_decays() {
        let ds = Dataset::simple(&[0.0, 1.0, 2.0, 3.0, 4.0], &[0.3, 1.1, 1.9, 3.2, 4.1]).unwrap();
        let plan = DirectionPlan::new(64, 17, true);
        let mut prev = u64::MAX;
        for c in [1e2, 1e4, 1e6] {
            let b = Coef::from_slice(&[0.0, c]).unwrap();
            let (k, _) = rd_sampled(&ds, &b, &plan).unwrap().counts().unwrap();
            assert!(k <= prev);
            prev = k;
        }
        assert!(prev <= 1);
    }

    #[test]
    fn bai_he_matches_direction_form_in_general_position() {
        let ds = Dataset::simple(&[0.0, 1.0, 2.5, 3.0, 4.5], &[1.0, 0.4, 3.1, 2.0, 5.3]).unwrap();
        let plan = DirectionPlan::new(16, 5, true);
        for bs in [[0.25, 0.75], [1.1, 0.4], [-0.5, 1.6]] {
            let b = Coef::from_slice(&bs).unwrap();
            let r = residuals(&ds, &b).unwrap();
            assert!(r.iter().all(|&v| v != 0.0), "test wants general position");
            let a = rd_sampled(&ds, &b, &plan).unwrap();
            let h = rd_bai_he(&ds, &b, &plan).unwrap();
            assert_eq!(a.counts(), h.counts());
        }
    }

    #[test]
    fn bai_he_drops_zero_residual_points() {
        // exact fit through (0, 1) and (1, 3)
        let ds = Dataset::simple(&[0.0, 1.0, 2.0, 3.0], &[1.0, 3.0, 4.0, 9.0]).unwrap();
        let b = Coef::from_slice(&[1.0, 2.0]).unwrap();
        let plan = DirectionPlan::new(16, 5, true);
        let a = rd_sampled(&ds, &b, &plan).unwrap();
        let h = rd_bai_he(&ds, &b, &plan).unwrap();
        assert!(h.value() <= a.value());
    }

    #[test]
    fn bai_he_perfect_fit_is_zero_while_direction_form_is_one() {
        let ds = Dataset::simple(&[0.0, 1.0, 2.0], &[1.0, 3.0, 5.0]).unwrap();
        let b = Coef::from_slice(&[1.0, 2.0]).unwrap();
        let plan = DirectionPlan::new(8, 2, true);
        assert_eq!(rd_bai_he(&ds, &b, &plan).unwrap().value(), 0.0);
        assert_eq!(rd_sampled(&ds, &b, &plan).unwrap().value(), 1.0);
    }

    #[test]
    fn competitor_bound_dominates_exact_and_shrinks() {
        let ds = Dataset::simple(&[0.0, 1.0, 2.0, 3.5, 5.0, 6.0], &[0.2, 1.3, 1.8, 4.0, 4.9, 6.4])
            .unwrap();
        let b = Coef::from_slice(&[0.3, 0.9]).unwrap();
        let exact = rd_exact_simple(&ds, &b).unwrap().value();
        let mut prev = f64::INFINITY;
        for m in [10, 100, 1000] {
            let v = rd_competitor_bound(&ds, &b, m, 77).unwrap().value();
            assert!(v >= exact - 1e-15);
            assert!(v <= prev + 1e-15);
            prev = v;
        }
    }

    #[test]
    fn competitor_bound_within_one_quantum_at_scale() {
        let ds = Dataset::simple(
            &[0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0],
            &[0.8, 0.1, 2.7, 2.2, 4.9, 4.4, 6.0, 7.3],
        )
        .unwrap();
        let b = Coef::from_slice(&[0.1, 1.0]).unwrap();
        let exact = rd_exact_simple(&ds, &b).unwrap();
        let bound = rd_competitor_bound(&ds, &b, 10_000, 3).unwrap();
        let (ke, n) = exact.counts().unwrap();
        let (kb, _) = bound.counts().unwrap();
        assert!(kb >= ke);
        assert!(kb - ke <= 1, "bound {kb}/{n} vs exact {ke}/{n}");
    }

    #[test]
    fn count_depth_can_dip_between_two_fits() {
        // both endpoints reach count 2, yet the midpoint (1, 0.25) leaves
        // residuals (-1, 0.25, -0.5, 1.75, 1) and the direction (2.5, -1)
        // agrees with only one of them, so the segment profile is not
        // quasiconcave
        let ds = Dataset::simple(&[0.0, 1.0, 2.0, 3.0, 4.0], &[0.0, 1.5, 1.0, 3.5, 3.0]).unwrap();
        let b1 = Coef::from_slice(&[0.0, 1.0]).unwrap();
        let b2 = Coef::from_slice(&[2.0, -0.5]).unwrap();
        let mid = Coef::new(b1.beta() * 0.5 + b2.beta() * 0.5).unwrap();
        assert_eq!(rd_exact_simple(&ds, &b1).unwrap().counts().unwrap(), (2, 5));
        assert_eq!(rd_exact_simple(&ds, &b2).unwrap().counts().unwrap(), (2, 5));
        assert_eq!(rd_exact_simple(&ds, &mid).unwrap().counts().unwrap(), (1, 5));
    }
}
