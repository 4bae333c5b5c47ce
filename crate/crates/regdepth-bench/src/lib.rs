//! Deterministic inputs shared by the criterion benchmarks: seeded
//! simple-regression datasets and the coefficient they are measured at.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use regdepth_core::estimators::fit_ls;
use regdepth_core::{Coef, Dataset, DirectionPlan};

/// Simple-regression dataset (intercept plus one carrier): carriers
/// uniform on [-3, 3], responses from y = 1 + 2x plus uniform noise.
/// The seed fully determines the dataset.
pub fn linear_dataset(n: usize, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let xs: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
    let ys: Vec<f64> = xs
        .iter()
        .map(|x| 1.0 + 2.0 * x + rng.gen_range(-0.5..0.5))
        .collect();
    Dataset::simple(&xs, &ys).expect("generated dataset is well formed")
}

/// Same model with one gross outlier so the robust fits have work to do.
pub fn contaminated_dataset(n: usize, seed: u64) -> Dataset {
    let ds = linear_dataset(n, seed);
    let xs = ds.simple_carriers().expect("simple dataset");
    let mut ys: Vec<f64> = ds.y().iter().copied().collect();
    ys[0] += 100.0;
    Dataset::simple(&xs, &ys).expect("generated dataset is well formed")
}

/// The least-squares coefficient: a realistic interior evaluation point.
pub fn eval_coef(ds: &Dataset) -> Coef {
    fit_ls(ds).expect("full-rank dataset").coef
}

pub fn plan(directions: usize, seed: u64) -> DirectionPlan {
    DirectionPlan::new(directions, seed, true)
}
