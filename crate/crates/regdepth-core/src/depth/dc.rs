//! Competitor depth: the fraction of the sample a hyperplane must keep at
//! least as close as any competing hyperplane. Equals the on-hyperplane
//! mass, which makes it exactly computable, and the same competitor idea
//! in location gives halfspace depth.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Cauchy, Distribution, StandardNormal};
use rayon::prelude::*;

use crate::dataset::{residuals, Coef, Dataset, DepthValue};
use crate::error::{Error, Result};

/// Default zero-residual tolerance factor, applied as `tol * (1 + |y_i|)`.
pub const DEFAULT_ZERO_TOL: f64 = 1e-12;

/// On-hyperplane fraction: `#{i : |r_i| <= tol * (1 + |y_i|)} / n`.
pub fn dc_exact(ds: &Dataset, b: &Coef, tol: f64) -> Result<DepthValue> {
    if !ds.has_intercept() {
        return Err(Error::WrongShape("competitor depth expects an intercept column".into()));
    }
    if tol < 0.0 {
        return Err(Error::InvalidParameter(format!("tol = {tol} must be >= 0")));
    }
    let r = residuals(ds, b)?;
    let n = ds.n();
    let count = (0..n)
        .filter(|&i| r[i].abs() <= tol * (1.0 + ds.y()[i].abs()))
        .count() as u64;
    DepthValue::from_counts(count, n as u64)
}

fn heavy_tailed_tilt(rng: &mut ChaCha8Rng) -> f64 {
    let cauchy = Cauchy::new(0.0, 1.0).expect("valid cauchy");
    let c: f64 = cauchy.sample(rng);
    let exponent: f64 = rng.gen_range(-8.0..0.0);
    c * 10f64.powf(exponent)
}

/// Sampled competitor depth: min over competitors `alpha` of
/// `#{i : |r_i(b)| <= |r_i(alpha)|} / n`.
///
/// The competitor stream interleaves four kinds, all seeded:
/// parallel offsets with gaps shrinking to 1e-8 (the infimum is driven by
/// parallel hyperplanes), tilts anchored at data rows, tilts anchored at
/// midpoints of row pairs (these realize open-cell counts no data anchor
/// attains), and free perturbations at log-uniform radii. An upper bound
/// on [`dc_exact`] at tolerance 0, nonincreasing in `n_competitors` for a
/// fixed seed.
pub fn dc_sampled(ds: &Dataset, b: &Coef, n_competitors: usize, seed: u64) -> Result<DepthValue> {
    if !ds.has_intercept() {
        return Err(Error::WrongShape("competitor depth expects an intercept column".into()));
    }
    let r = residuals(ds, b)?;
    let n = ds.n();
    let p = ds.p();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut deltas: Vec<DVector<f64>> = Vec::with_capacity(n_competitors);

    let mut parallel_rank = 0usize;
    let mut guard = 0usize;
    while deltas.len() < n_competitors && guard < n_competitors * 6 {
        guard += 1;
        match guard % 4 {
            0 => {
                // parallel offset along the intercept coordinate
                let exponent = -0.25 * (parallel_rank / 2) as f64;
                if exponent >= -8.0 {
                    let sign = if parallel_rank % 2 == 0 { 1.0 } else { -1.0 };
                    let mut d = DVector::zeros(p);
                    d[0] = sign * 10f64.powf(exponent);
                    parallel_rank += 1;
                    deltas.push(d);
                } else {
                    let mut d = DVector::zeros(p);
                    let e: f64 = rng.gen_range(-8.0..0.0);
                    let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
                    d[0] = sign * 10f64.powf(e);
                    deltas.push(d);
                }
            }
            1 => {
                // tilt anchored at a random size-(p-1) subset of rows
                if p == 1 {
                    continue;
                }
                let mut pick: Vec<usize> = Vec::with_capacity(p - 1);
                while pick.len() < p - 1 {
                    let c = rng.gen_range(0..n);
                    if !pick.contains(&c) {
                        pick.push(c);
                    }
                }
                let rows: Vec<DVector<f64>> = pick.iter().map(|&i| ds.row(i)).collect();
                let t = heavy_tailed_tilt(&mut rng);
                if let Some(d) = crate::directions::span_normal(&rows, p) {
                    if t.is_finite() && t != 0.0 {
                        deltas.push(d * t);
                    }
                }
            }
            2 => {
                // tilt anchored at midpoints of random row pairs
                if p == 1 || n < 2 {
                    continue;
                }
                let mut anchors: Vec<DVector<f64>> = Vec::with_capacity(p - 1);
                for _ in 0..p - 1 {
                    let i = rng.gen_range(0..n);
                    let mut j = rng.gen_range(0..n);
                    while j == i {
                        j = rng.gen_range(0..n);
                    }
                    anchors.push((ds.row(i) + ds.row(j)) / 2.0);
                }
                let t = heavy_tailed_tilt(&mut rng);
                if let Some(d) = crate::directions::span_normal(&anchors, p) {
                    if t.is_finite() && t != 0.0 {
                        deltas.push(d * t);
                    }
                }
            }
            _ => {
                // free perturbation at a log-uniform radius
                let z = DVector::from_fn(p, |_, _| rng.sample::<f64, _>(StandardNormal));
                let norm = z.norm();
                if norm < 1e-8 {
                    continue;
                }
                let e: f64 = rng.gen_range(-8.0..1.0);
                deltas.push(z / norm * 10f64.powf(e));
            }
        }
    }

    let best = deltas
        .par_iter()
        .map(|d| {
            let shift = ds.x() * d;
            (0..n)
                .filter(|&i| r[i].abs() <= (r[i] - shift[i]).abs())
                .count() as u64
        })
        .min()
        .unwrap_or(n as u64);
    DepthValue::from_counts(best, n as u64)
}

fn check_dims(sample: &[DVector<f64>], x: &DVector<f64>) -> Result<usize> {
    if sample.is_empty() {
        return Err(Error::EmptyInput("location sample is empty".into()));
    }
    let dim = x.len();
    if dim == 0 || dim > 2 {
        return Err(Error::WrongShape(format!("location depth supports dims 1 and 2, got {dim}")));
    }
    if sample.iter().any(|a| a.len() != dim) {
        return Err(Error::DimensionMismatch("sample points and x disagree on dimension".into()));
    }
    Ok(dim)
}

/// Candidate halfspace normals through `x`: perpendiculars of pair
/// differences, axes, perpendiculars anchored at `x`, and angular
/// midpoints between consecutive anchored perpendiculars. The anchored
/// perpendiculars are the breakpoints of the count function on the circle
/// and the midpoints cover every open cell, so the minimum over this set
/// is the exact halfspace depth.
fn location_directions(sample: &[DVector<f64>], x: &DVector<f64>) -> Vec<DVector<f64>> {
    let dim = x.len();
    if dim == 1 {
        return vec![
            DVector::from_column_slice(&[1.0]),
            DVector::from_column_slice(&[-1.0]),
        ];
    }
    let mut dirs: Vec<DVector<f64>> = Vec::new();
    let perp = |v: &DVector<f64>| DVector::from_column_slice(&[-v[1], v[0]]);
    for i in 0..sample.len() {
        for j in 0..sample.len() {
            if i == j {
                continue;
            }
            let d = &sample[i] - &sample[j];
            let norm = d.norm();
            if norm > 1e-12 {
                dirs.push(perp(&d) / norm);
            }
        }
    }
    dirs.push(DVector::from_column_slice(&[1.0, 0.0]));
    dirs.push(DVector::from_column_slice(&[-1.0, 0.0]));
    dirs.push(DVector::from_column_slice(&[0.0, 1.0]));
    dirs.push(DVector::from_column_slice(&[0.0, -1.0]));
    let mut angles: Vec<f64> = Vec::new();
    for a in sample {
        let d = a - x;
        let norm = d.norm();
        if norm > 1e-12 {
            let q = perp(&d) / norm;
            for s in [1.0f64, -1.0] {
                let u = &q * s;
                angles.push(u[1].atan2(u[0]));
                dirs.push(u);
            }
        }
    }
    angles.sort_by(|a, b| a.partial_cmp(b).expect("finite angle"));
    angles.dedup();
    for k in 0..angles.len() {
        let next = if k + 1 < angles.len() {
            angles[k + 1]
        } else {
            angles[0] + std::f64::consts::TAU
        };
        let mid = (angles[k] + next) / 2.0;
        dirs.push(DVector::from_column_slice(&[mid.cos(), mid.sin()]));
    }
    dirs
}

/// Exact halfspace depth of `x` in dimension 1 or 2: the smallest
/// boundary-inclusive halfspace count over halfspaces with `x` on the
/// boundary, divided by n.
pub fn hd_location(sample: &[DVector<f64>], x: &DVector<f64>) -> Result<DepthValue> {
    let dim = check_dims(sample, x)?;
    let n = sample.len();
    if dim == 1 {
        let le = sample.iter().filter(|a| a[0] <= x[0]).count() as u64;
        let ge = sample.iter().filter(|a| a[0] >= x[0]).count() as u64;
        return DepthValue::from_counts(le.min(ge), n as u64);
    }
    let dirs = location_directions(sample, x);
    let best = dirs
        .iter()
        .map(|u| {
            sample
                .iter()
                .filter(|a| u.dot(&(*a - x)) >= 0.0)
                .count() as u64
        })
        .min()
        .expect("direction set is nonempty");
    DepthValue::from_counts(best, n as u64)
}

/// Sampled nearness depth: min over competitor points `y` of
/// `#{i : ||y - a_i|| >= ||x - a_i||} / n`.
///
/// Competitors mix uniform draws from an expanded data bounding box with
/// points approaching `x` radially along the halfspace candidate
/// directions; the radial family's counts converge to the halfspace
/// counts, so the value meets [`hd_location`] from above.
pub fn nd_location_sampled(
    sample: &[DVector<f64>],
    x: &DVector<f64>,
    n_competitors: usize,
    seed: u64,
) -> Result<DepthValue> {
    let dim = check_dims(sample, x)?;
    let n = sample.len();
    let mut competitors: Vec<DVector<f64>> = Vec::with_capacity(n_competitors);

    let mut scale = 0.0f64;
    for a in sample {
        scale = scale.max((a - x).norm());
    }
    if scale == 0.0 {
        scale = 1.0;
    }
    for u in location_directions(sample, x) {
        for k in 0..=8 {
            let eps = scale * 10f64.powi(-k);
            competitors.push(x - &u * eps);
            if competitors.len() >= n_competitors {
                break;
            }
        }
        if competitors.len() >= n_competitors {
            break;
        }
    }

    let mut lo = vec![f64::INFINITY; dim];
    let mut hi = vec![f64::NEG_INFINITY; dim];
    for a in sample {
        for d in 0..dim {
            lo[d] = lo[d].min(a[d]);
            hi[d] = hi[d].max(a[d]);
        }
    }
    for d in 0..dim {
        let span = (hi[d] - lo[d]).max(1.0);
        lo[d] -= span / 2.0;
        hi[d] += span / 2.0;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while competitors.len() < n_competitors {
        let y = DVector::from_fn(dim, |d, _| rng.gen_range(lo[d]..=hi[d]));
        competitors.push(y);
    }

    let best = competitors
        .par_iter()
        .map(|y| {
            sample
                .iter()
                .filter(|a| (*a - y).norm_squared() >= (*a - x).norm_squared())
                .count() as u64
        })
        .min()
        .unwrap_or(n as u64);
    DepthValue::from_counts(best, n as u64)
}
