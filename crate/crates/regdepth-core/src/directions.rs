//! Direction sampling for depth evaluators that discretize an infimum or
//! supremum over the unit sphere.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::dataset::Dataset;

/// Cap on the number of data-derived subset normals.
pub const DATA_DIRECTION_CAP: usize = 2000;

/// How to discretize directions on the unit sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectionPlan {
    /// Number of pseudo-random unit directions.
    pub n_random: usize,
    /// RNG seed; identical seeds give byte-identical direction lists.
    pub seed: u64,
    /// Also emit unit normals of hyperplanes determined by data rows.
    pub include_data_directions: bool,
}

impl DirectionPlan {
    pub fn new(n_random: usize, seed: u64, include_data_directions: bool) -> Self {
        Self { n_random, seed, include_data_directions }
    }

    /// Default plan for projection-type depths: 512 random directions plus
    /// data-derived normals.
    pub fn default_prd(seed: u64) -> Self {
        Self::new(512, seed, true)
    }
}

fn random_unit(rng: &mut ChaCha8Rng, p: usize) -> DVector<f64> {
    loop {
        let z = DVector::from_fn(p, |_, _| rng.sample::<f64, _>(StandardNormal));
        let norm = z.norm();
        if norm > 1e-8 {
            return z / norm;
        }
    }
}

/// Unit normal of the span of `rows` (expected dimension p-1).
/// Returns `None` when the rows do not span a (p-1)-dimensional subspace.
pub fn span_normal(rows: &[DVector<f64>], p: usize) -> Option<DVector<f64>> {
    // orthonormalize the rows, two passes for stability
    let mut basis: Vec<DVector<f64>> = Vec::with_capacity(rows.len());
    for row in rows {
        let mut v = row.clone();
        for _ in 0..2 {
            for b in &basis {
                let proj = b.dot(&v);
                v -= b * proj;
            }
        }
        let norm = v.norm();
        if norm > 1e-10 * (1.0 + row.norm()) {
            basis.push(v / norm);
        }
    }
    if basis.len() != p - 1 {
        return None;
    }
    // largest remainder among the canonical basis vectors
    let mut best: Option<DVector<f64>> = None;
    let mut best_norm = 0.0;
    for k in 0..p {
        let mut v = DVector::zeros(p);
        v[k] = 1.0;
        for _ in 0..2 {
            for b in &basis {
                let proj = b.dot(&v);
                v -= b * proj;
            }
        }
        let norm = v.norm();
        if norm > best_norm {
            best_norm = norm;
            best = Some(v / norm);
        }
    }
    best.filter(|_| best_norm > 1e-8)
}

/// The exact candidate directions of the simple-regression depth sweep:
/// for v1 over sorted distinct carriers, adjacent midpoints, and the two
/// sentinels just outside the data range, and v2 over {+1, -1}, the unit
/// vector along (-v1*v2, v2).
pub fn simple_sweep_directions(carriers: &[f64]) -> Vec<DVector<f64>> {
    let pivots = sweep_pivots(carriers);
    let mut out = Vec::with_capacity(2 * pivots.len());
    for &v2 in &[1.0f64, -1.0] {
        for &v1 in &pivots {
            let d = DVector::from_column_slice(&[-v1 * v2, v2]);
            let norm = d.norm();
            out.push(d / norm);
        }
    }
    out
}

/// Sorted distinct carrier values, adjacent midpoints, and sentinels one
/// unit outside the data range.
pub fn sweep_pivots(carriers: &[f64]) -> Vec<f64> {
    let mut vals: Vec<f64> = carriers.to_vec();
    vals.sort_by(|a, b| a.partial_cmp(b).expect("non-finite carrier"));
    vals.dedup();
    let mut pivots = Vec::with_capacity(2 * vals.len() + 1);
    pivots.push(vals[0] - 1.0);
    for i in 0..vals.len() {
        pivots.push(vals[i]);
        if i + 1 < vals.len() {
            pivots.push((vals[i] + vals[i + 1]) / 2.0);
        }
    }
    pivots.push(vals[vals.len() - 1] + 1.0);
    pivots
}

fn subset_normals(ds: &Dataset, p: usize, seed: u64) -> Vec<DVector<f64>> {
    let n = ds.n();
    let k = p - 1;
    if k == 0 || k > n {
        return Vec::new();
    }
    let total = binomial(n, k);
    let mut out = Vec::new();
    if total <= DATA_DIRECTION_CAP as u128 {
        let mut idx: Vec<usize> = (0..k).collect();
        loop {
            let rows: Vec<DVector<f64>> = idx.iter().map(|&i| ds.row(i)).collect();
            if let Some(v) = span_normal(&rows, p) {
                out.push(v);
            }
            // next lexicographic combination
            let mut i = k;
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                if idx[i] != i + n - k {
                    break;
                }
            }
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
        }
    }
    // seeded subsampling of index subsets
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    let mut seen = std::collections::HashSet::new();
    let mut attempts = 0usize;
    while out.len() < DATA_DIRECTION_CAP && attempts < DATA_DIRECTION_CAP * 20 {
        attempts += 1;
        let mut pick: Vec<usize> = Vec::with_capacity(k);
        while pick.len() < k {
            let c = rng.gen_range(0..n);
            if !pick.contains(&c) {
                pick.push(c);
            }
        }
        pick.sort_unstable();
        if !seen.insert(pick.clone()) {
            continue;
        }
        let rows: Vec<DVector<f64>> = pick.iter().map(|&i| ds.row(i)).collect();
        if let Some(v) = span_normal(&rows, p) {
            out.push(v);
        }
    }
    out
}

pub(crate) fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
        if acc > u128::MAX / 2 {
            return u128::MAX;
        }
    }
    acc
}

/// Samples unit directions per `plan`.
///
/// p = 1 always returns exactly {+1, -1}. Random directions come first,
/// then (when requested and a dataset is supplied) data-derived normals:
/// for simple-regression data the exact sweep candidate directions, and in
/// general the unit normals of subspaces spanned by size-(p-1) row subsets,
/// capped at [`DATA_DIRECTION_CAP`] via seeded subsampling.
///
/// Output is byte-identical for identical `(plan, p)` and dataset.
pub fn sample_directions(plan: &DirectionPlan, p: usize, ds: Option<&Dataset>) -> Vec<DVector<f64>> {
    assert!(p >= 1, "direction dimension must be >= 1");
    if p == 1 {
        return vec![
            DVector::from_column_slice(&[1.0]),
            DVector::from_column_slice(&[-1.0]),
        ];
    }
    let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
    let mut dirs: Vec<DVector<f64>> = (0..plan.n_random).map(|_| random_unit(&mut rng, p)).collect();
    if plan.include_data_directions {
        if let Some(ds) = ds {
            if ds.p() == p {
                let data_dirs = if p == 2 && ds.has_intercept() {
                    let carriers = ds.simple_carriers().expect("checked shape");
                    simple_sweep_directions(&carriers)
                } else {
                    subset_normals(ds, p, plan.seed)
                };
                let capped = if data_dirs.len() > DATA_DIRECTION_CAP {
                    // seeded subsample keeps the cap exact
                    let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
                    rng.set_stream(2);
                    let mut keep: Vec<usize> = (0..data_dirs.len()).collect();
                    for i in (1..keep.len()).rev() {
                        let j = rng.gen_range(0..=i);
                        keep.swap(i, j);
                    }
                    keep.truncate(DATA_DIRECTION_CAP);
                    keep.sort_unstable();
                    keep.into_iter().map(|i| data_dirs[i].clone()).collect()
                } else {
                    data_dirs
                };
                dirs.extend(capped);
            }
        }
    }
    dirs
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p1_is_exactly_plus_minus_one() {
        let plan = DirectionPlan::new(100, 7, true);
        let dirs = sample_directions(&plan, 1, None);
        assert_eq!(dirs.len(), 2);
        assert_eq!(dirs[0][0], 1.0);
        assert_eq!(dirs[1][0], -1.0);
    }

    #[test]
    fn same_seed_same_directions() {
        let plan = DirectionPlan::new(64, 42, false);
        let a = sample_directions(&plan, 3, None);
        let b = sample_directions(&plan, 3, None);
        assert_eq!(a.len(), b.len());
        for (u, v) in a.iter().zip(b.iter()) {
            assert_eq!(u.as_slice(), v.as_slice());
        }
    }

    #[test]
    fn random_directions_are_unit() {
        let plan = DirectionPlan::new(1000, 3, false);
        for v in sample_directions(&plan, 3, None) {
            assert!((v.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn simple_sweep_contains_carrier_midpoint_sentinel_normals() {
        let ds = Dataset::simple(&[0.0, 1.0, 3.0], &[1.0, 2.0, 3.0]).unwrap();
        let plan = DirectionPlan::new(0, 0, true);
        let dirs = sample_directions(&plan, 2, Some(&ds));
        // pivots: -1, 0, 0.5, 1, 2, 3, 4 for each of the two signs
        assert_eq!(dirs.len(), 14);
        for v in &dirs {
            assert!((v.norm() - 1.0).abs() < 1e-12);
        }
        // the carrier pivot x = 1 with v2 = 1 appears as normalize((-1, 1))
        let target = (DVector::from_column_slice(&[-1.0, 1.0])).normalize();
        assert!(dirs
            .iter()
            .any(|v| (v - &target).norm() < 1e-15));
    }

    #[test]
    fn subset_normals_are_orthogonal_to_their_rows() {
        let rows = vec![
            vec![1.0, 0.0, 2.0],
            vec![0.0, 1.0, -1.0],
            vec![2.0, 1.0, 0.5],
            vec![-1.0, 3.0, 1.0],
        ];
        let ds = Dataset::from_rows(&rows, &[1.0, 2.0, 3.0, 4.0]).unwrap();
        let plan = DirectionPlan::new(0, 11, true);
        let dirs = sample_directions(&plan, 3, Some(&ds));
        // C(4, 2) = 6 subsets, all in general position
        assert_eq!(dirs.len(), 6);
        for v in &dirs {
            assert!((v.norm() - 1.0).abs() < 1e-12);
            let orth = rows
                .iter()
                .filter(|r| {
                    let d = v[0] * r[0] + v[1] * r[1] + v[2] * r[2];
                    d.abs() < 1e-9
                })
                .count();
            assert!(orth >= 2, "normal not orthogonal to a row pair");
        }
    }

    #[test]
    fn data_direction_cap_holds() {
        let n = 80;
        let xs: Vec<Vec<f64>> = (0..n)
            .map(|i| vec![(i as f64).sin() + 2.0, (i as f64 * 0.7).cos(), i as f64 / 10.0])
            .collect();
        let ys: Vec<f64> = (0..n).map(|i| i as f64).collect();
        let ds = Dataset::from_rows(&xs, &ys).unwrap();
        let plan = DirectionPlan::new(0, 5, true);
        let dirs = sample_directions(&plan, 3, Some(&ds));
        assert!(dirs.len() <= DATA_DIRECTION_CAP);
        assert!(dirs.len() >= DATA_DIRECTION_CAP / 2);
    }
}
