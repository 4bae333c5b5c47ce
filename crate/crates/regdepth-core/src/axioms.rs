//! Property harness for the depth families: invariance under
//! regression shifts, response scalings, and carrier affine maps;
//! maximality at a symmetry center; monotonicity along rays from a
//! deepest point; vanishing at infinity; and quasi-concavity.
//!
//! Checks that are known to fail are run in expected-violation mode:
//! the suite passes only when the violation actually shows up.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::dataset::{residuals, Coef, Dataset};
use crate::depth::dc::{dc_exact, DEFAULT_ZERO_TOL};
use crate::depth::obj::{obj_depth, Aggregator, Loss, ObjSpec};
use crate::depth::prd::{prd_with_directions, TSpec};
use crate::depth::rd::{rd_exact_simple, rd_with_directions};
use crate::directions::{sample_directions, DirectionPlan};
use crate::error::{Error, Result};
use crate::estimators::{fit_deepest_rd, fit_obj, fit_prd_minimax, FitOptions};
use crate::stats;

/// Largest condition number an affine carrier map may have.
pub const AFFINE_COND_CAP: f64 = 1e4;

/// Depth families the harness can exercise.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Obj,
    Dc,
    Rd,
    Prd,
}

impl Family {
    pub fn label(&self) -> &'static str {
        match self {
            Family::Obj => "obj",
            Family::Dc => "dc",
            Family::Rd => "rd",
            Family::Prd => "prd",
        }
    }
}

/// A transform of the regression problem together with how coefficients
/// and projection directions move under it.
#[derive(Debug, Clone)]
pub enum Transform {
    /// y -> y + X b0, coefficients move by +b0.
    RegressionShift(Coef),
    /// y -> s y, coefficients scale by s.
    ResponseScale(f64),
    /// X -> X A, coefficients move by A^{-1}; directions likewise, kept
    /// unnormalized so ratio samples are preserved.
    CarrierAffine(DMatrix<f64>),
}

impl Transform {
    pub fn validate(&self, ds: &Dataset) -> Result<()> {
        match self {
            Transform::RegressionShift(b0) => {
                if b0.len() != ds.p() {
                    return Err(Error::DimensionMismatch(format!(
                        "shift has {} entries but p = {}",
                        b0.len(),
                        ds.p()
                    )));
                }
                Ok(())
            }
            Transform::ResponseScale(s) => {
                if *s == 0.0 || !s.is_finite() {
                    return Err(Error::InvalidParameter(format!("response scale {s}")));
                }
                Ok(())
            }
            Transform::CarrierAffine(a) => {
                if a.nrows() != ds.p() || a.ncols() != ds.p() {
                    return Err(Error::WrongShape(format!(
                        "affine map is {}x{} but p = {}",
                        a.nrows(),
                        a.ncols(),
                        ds.p()
                    )));
                }
                if a.iter().any(|v| !v.is_finite()) {
                    return Err(Error::InvalidParameter("non-finite affine map".into()));
                }
                let svd = a.clone().svd(false, false);
                let mut smin = f64::INFINITY;
                let mut smax: f64 = 0.0;
                for s in svd.singular_values.iter() {
                    smin = smin.min(*s);
                    smax = smax.max(*s);
                }
                if smin <= 0.0 || smax / smin > AFFINE_COND_CAP {
                    return Err(Error::InvalidParameter(format!(
                        "affine map condition number {:.3e} above cap {AFFINE_COND_CAP:.0e}",
                        smax / smin.max(f64::MIN_POSITIVE)
                    )));
                }
                if ds.has_intercept() {
                    // x'A must keep the intercept column: first column = e1
                    let ok = a[(0, 0)] == 1.0 && (1..ds.p()).all(|i| a[(i, 0)] == 0.0);
                    if !ok {
                        return Err(Error::InvalidParameter(
                            "affine map does not preserve the intercept column".into(),
                        ));
                    }
                }
                Ok(())
            }
        }
    }

    pub fn apply(&self, ds: &Dataset) -> Result<Dataset> {
        self.validate(ds)?;
        match self {
            Transform::RegressionShift(b0) => {
                let y = ds.y() + ds.x() * b0.beta();
                Dataset::new(ds.x().clone(), y, ds.has_intercept())
            }
            Transform::ResponseScale(s) => {
                Dataset::new(ds.x().clone(), ds.y() * *s, ds.has_intercept())
            }
            Transform::CarrierAffine(a) => {
                Dataset::new(ds.x() * a, ds.y().clone(), ds.has_intercept())
            }
        }
    }

    pub fn map_coef(&self, b: &Coef) -> Result<Coef> {
        match self {
            Transform::RegressionShift(b0) => Coef::new(b.beta() + b0.beta()),
            Transform::ResponseScale(s) => Coef::new(b.beta() * *s),
            Transform::CarrierAffine(a) => {
                let solved = a
                    .clone()
                    .lu()
                    .solve(b.beta())
                    .ok_or(Error::RankDeficient)?;
                Coef::new(solved)
            }
        }
    }

    pub fn map_direction(&self, v: &DVector<f64>) -> Result<DVector<f64>> {
        match self {
            Transform::RegressionShift(_) | Transform::ResponseScale(_) => Ok(v.clone()),
            Transform::CarrierAffine(a) => {
                a.clone().lu().solve(v).ok_or(Error::RankDeficient)
            }
        }
    }
}

/// Outcome of one property check over many trials.
#[derive(Debug, Clone)]
pub struct AxiomReport {
    pub axiom: String,
    pub n_trials: u64,
    pub n_violations: u64,
    pub worst_violation: f64,
    pub witness: Option<String>,
    /// When set, the check passes only if at least one violation occurs.
    pub expects_violation: bool,
}

impl AxiomReport {
    pub fn new(axiom: &str) -> Self {
        AxiomReport {
            axiom: axiom.to_string(),
            n_trials: 0,
            n_violations: 0,
            worst_violation: 0.0,
            witness: None,
            expects_violation: false,
        }
    }

    pub fn record(&mut self, delta: f64, violated: bool, witness: impl FnOnce() -> String) {
        self.n_trials += 1;
        if violated {
            self.n_violations += 1;
            if self.witness.is_none() || delta > self.worst_violation {
                self.worst_violation = self.worst_violation.max(delta);
                self.witness = Some(witness());
            }
        }
    }

    pub fn merge(&mut self, other: &AxiomReport) {
        self.n_trials += other.n_trials;
        self.n_violations += other.n_violations;
        if other.n_violations > 0 && other.worst_violation >= self.worst_violation {
            self.worst_violation = other.worst_violation;
            self.witness = other.witness.clone();
        }
        self.expects_violation |= other.expects_violation;
    }

    pub fn passed(&self) -> bool {
        if self.expects_violation {
            self.n_violations >= 1
        } else {
            self.n_violations == 0
        }
    }
}

/// One depth evaluator with everything needed to score a coefficient.
#[derive(Debug, Clone)]
pub enum DepthEval {
    Obj(ObjSpec),
    RdExact,
    RdSampled(DirectionPlan),
    DcExact(f64),
    Prd(DirectionPlan, TSpec),
}

impl DepthEval {
    pub fn label(&self) -> String {
        match self {
            DepthEval::Obj(spec) => format!("obj[{spec}]"),
            DepthEval::RdExact => "rd-exact".to_string(),
            DepthEval::RdSampled(_) => "rd-sampled".to_string(),
            DepthEval::DcExact(_) => "dc-exact".to_string(),
            DepthEval::Prd(_, t) => format!("prd[{t:?}]"),
        }
    }

    pub fn eval(&self, ds: &Dataset, b: &Coef) -> Result<f64> {
        match self {
            DepthEval::Obj(spec) => Ok(obj_depth(ds, b, spec)?.value()),
            DepthEval::RdExact => Ok(rd_exact_simple(ds, b)?.value()),
            DepthEval::RdSampled(plan) => {
                let dirs = sample_directions(plan, ds.p(), Some(ds));
                Ok(rd_with_directions(ds, b, &dirs)?.value())
            }
            DepthEval::DcExact(tol) => Ok(dc_exact(ds, b, *tol)?.value()),
            DepthEval::Prd(plan, t) => {
                let dirs = sample_directions(plan, ds.p(), Some(ds));
                Ok(prd_with_directions(ds, b, &dirs, t)?.value())
            }
        }
    }

    /// Evaluate on a transformed problem, pushing the direction set of
    /// the original dataset through the transform for the
    /// direction-based evaluators.
    pub fn eval_transformed(
        &self,
        original: &Dataset,
        transformed: &Dataset,
        mapped_b: &Coef,
        tr: &Transform,
    ) -> Result<f64> {
        match self {
            DepthEval::Prd(plan, t) => {
                let dirs = sample_directions(plan, original.p(), Some(original));
                let mapped: Result<Vec<DVector<f64>>> =
                    dirs.iter().map(|v| tr.map_direction(v)).collect();
                Ok(prd_with_directions(transformed, mapped_b, &mapped?, t)?.value())
            }
            DepthEval::RdSampled(plan) => {
                let dirs = sample_directions(plan, original.p(), Some(original));
                let mapped: Result<Vec<DVector<f64>>> =
                    dirs.iter().map(|v| tr.map_direction(v)).collect();
                Ok(rd_with_directions(transformed, mapped_b, &mapped?)?.value())
            }
            _ => self.eval(transformed, mapped_b),
        }
    }
}

/// Augment `ds` so every row (x, y) is paired with (x, 2 x'b0 - y).
/// Residuals about `b0` then form an exactly sign-paired multiset.
pub fn make_symmetric(ds: &Dataset, b0: &Coef) -> Result<Dataset> {
    if b0.len() != ds.p() {
        return Err(Error::DimensionMismatch(format!(
            "center has {} entries but p = {}",
            b0.len(),
            ds.p()
        )));
    }
    let n = ds.n();
    let mut x = DMatrix::zeros(2 * n, ds.p());
    let mut y = DVector::zeros(2 * n);
    let fitted = ds.x() * b0.beta();
    for i in 0..n {
        x.set_row(i, &ds.x().row(i));
        x.set_row(n + i, &ds.x().row(i));
        y[i] = ds.y()[i];
        y[n + i] = 2.0 * fitted[i] - ds.y()[i];
    }
    Dataset::new(x, y, ds.has_intercept())
}

fn describe_ds(ds: &Dataset) -> String {
    if let Ok(xs) = ds.simple_carriers() {
        format!("xs={:?} ys={:?}", xs, ds.y().as_slice())
    } else {
        format!("x={:?} ys={:?}", ds.x().as_slice(), ds.y().as_slice())
    }
}

/// Compare depth before and after each transform with mapped arguments.
pub fn check_invariance(
    eval: &DepthEval,
    ds: &Dataset,
    b: &Coef,
    transforms: &[Transform],
    tol: f64,
) -> AxiomReport {
    let mut report = AxiomReport::new(&format!("invariance[{}]", eval.label()));
    let outcomes: Vec<(f64, bool, String)> = transforms
        .par_iter()
        .map(|tr| {
            let run = || -> Result<f64> {
                let before = eval.eval(ds, b)?;
                let tds = tr.apply(ds)?;
                let tb = tr.map_coef(b)?;
                let after = eval.eval_transformed(ds, &tds, &tb, tr)?;
                Ok((before - after).abs())
            };
            match run() {
                Ok(delta) => (
                    delta,
                    delta > tol,
                    format!("{}; b={:?}; {:?}; delta={delta:.3e}", describe_ds(ds), b.beta().as_slice(), tr),
                ),
                Err(e) => (
                    f64::INFINITY,
                    true,
                    format!("evaluator error: {e}; {:?}", tr),
                ),
            }
        })
        .collect();
    for (delta, violated, witness) in outcomes {
        report.record(delta, violated, || witness);
    }
    report
}

/// Assert no sampled coefficient beats the symmetry center.
pub fn check_max_at_center(
    eval: &DepthEval,
    ds: &Dataset,
    b0: &Coef,
    n_samples: usize,
    seed: u64,
    tol: f64,
) -> Result<AxiomReport> {
    let sym = make_symmetric(ds, b0)?;
    let center = eval.eval(&sym, b0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(11);
    let radius = 10.0 * b0.norm() + 10.0;
    let samples: Vec<Coef> = (0..n_samples)
        .map(|_| {
            let z = DVector::from_fn(ds.p(), |_, _| rng.sample::<f64, _>(StandardNormal));
            let r = radius * rng.gen::<f64>();
            let b = if z.norm() > 1e-12 {
                b0.beta() + z.normalize() * r
            } else {
                b0.beta().clone()
            };
            Coef::new(b).expect("finite sample point")
        })
        .collect();
    let mut report = AxiomReport::new(&format!("center-max[{}]", eval.label()));
    let outcomes: Vec<(f64, bool, String)> = samples
        .par_iter()
        .map(|b| match eval.eval(&sym, b) {
            Ok(d) => {
                let delta = d - center;
                (
                    delta,
                    delta > tol,
                    format!(
                        "{}; center={:?} depth {center:.6}; b={:?} depth {d:.6}",
                        describe_ds(&sym),
                        b0.beta().as_slice(),
                        b.beta().as_slice()
                    ),
                )
            }
            Err(e) => (f64::INFINITY, true, format!("evaluator error: {e}")),
        })
        .collect();
    for (delta, violated, witness) in outcomes {
        report.record(delta, violated, || witness);
    }
    Ok(report)
}

/// Assert depth along segments toward `b_star` never drops below the
/// depth at the far endpoint. With `expects_violation` the check passes
/// only when a drop occurs.
#[allow(clippy::too_many_arguments)]
pub fn check_ray_monotonicity(
    eval: &DepthEval,
    ds: &Dataset,
    b_star: &Coef,
    extra_rays: &[Coef],
    n_rays: usize,
    n_steps: usize,
    seed: u64,
    tol: f64,
    expects_violation: bool,
) -> AxiomReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(12);
    let mut rays: Vec<Coef> = extra_rays.to_vec();
    for _ in 0..n_rays {
        let z = DVector::from_fn(ds.p(), |_, _| rng.sample::<f64, _>(StandardNormal));
        rays.push(Coef::new(z * 4.0).expect("finite ray endpoint"));
    }
    let mut report = AxiomReport::new(&format!("ray-monotonicity[{}]", eval.label()));
    report.expects_violation = expects_violation;
    let outcomes: Vec<(f64, bool, String)> = rays
        .par_iter()
        .map(|b| {
            let run = || -> Result<(f64, f64, f64)> {
                let at_end = eval.eval(ds, b)?;
                let mut worst = 0.0f64;
                let mut worst_lambda = 0.0;
                for j in 1..n_steps {
                    let lambda = j as f64 / n_steps as f64;
                    let point =
                        Coef::new(b_star.beta() * lambda + b.beta() * (1.0 - lambda))?;
                    let d = eval.eval(ds, &point)?;
                    let drop = at_end - d;
                    if drop > worst {
                        worst = drop;
                        worst_lambda = lambda;
                    }
                }
                Ok((at_end, worst, worst_lambda))
            };
            match run() {
                Ok((at_end, worst, lambda)) => (
                    worst,
                    worst > tol,
                    format!(
                        "{}; b_star={:?}; ray={:?}; depth(ray)={at_end:.6}; drop {worst:.3e} at lambda={lambda}",
                        describe_ds(ds),
                        b_star.beta().as_slice(),
                        b.beta().as_slice()
                    ),
                ),
                Err(e) => (f64::INFINITY, true, format!("evaluator error: {e}")),
            }
        })
        .collect();
    for (delta, violated, witness) in outcomes {
        report.record(delta, violated, || witness);
    }
    report
}

/// Scales at which the decay toward zero is probed.
pub const VANISH_SCALES: [f64; 6] = [1e1, 1e2, 1e3, 1e4, 1e5, 1e6];

/// Evaluate depth at c*u for growing c along each ray; assert the final
/// value sits below `threshold` and the tail is nonincreasing. Rays in
/// `recorded_rays` are evaluated and reported but never counted as
/// violations.
#[allow(clippy::too_many_arguments)]
pub fn check_vanishing(
    eval: &DepthEval,
    ds: &Dataset,
    asserted_rays: &[DVector<f64>],
    recorded_rays: &[DVector<f64>],
    threshold: f64,
) -> AxiomReport {
    let mut report = AxiomReport::new(&format!("vanishing[{}]", eval.label()));
    let eval_ray = |u: &DVector<f64>| -> Result<Vec<f64>> {
        VANISH_SCALES
            .iter()
            .map(|c| {
                let b = Coef::new(u * *c)?;
                match eval {
                    // the ray direction joins the direction set so the
                    // growth along it is visible to the supremum
                    DepthEval::Prd(plan, t) => {
                        let mut dirs = sample_directions(plan, ds.p(), Some(ds));
                        dirs.push(u.normalize());
                        Ok(prd_with_directions(ds, &b, &dirs, t)?.value())
                    }
                    _ => eval.eval(ds, &b),
                }
            })
            .collect()
    };
    let scored: Vec<(bool, f64, bool, String)> = asserted_rays
        .par_iter()
        .map(|u| (true, u))
        .chain(recorded_rays.par_iter().map(|u| (false, u)))
        .map(|(asserted, u)| {
            match eval_ray(u) {
                Ok(vals) => {
                    let last = *vals.last().expect("nonempty scale grid");
                    let mut delta = (last - threshold).max(0.0);
                    // tail = transitions among the last three scales
                    for k in 3..vals.len() - 1 {
                        delta = delta.max(vals[k + 1] - vals[k] - 1e-12);
                    }
                    let violated = asserted && delta > 0.0;
                    (
                        asserted,
                        delta,
                        violated,
                        format!(
                            "{}; ray={:?}; values={:?}; threshold={threshold:.3e}",
                            describe_ds(ds),
                            u.as_slice(),
                            vals
                        ),
                    )
                }
                Err(e) => (
                    asserted,
                    f64::INFINITY,
                    asserted,
                    format!("evaluator error: {e}"),
                ),
            }
        })
        .collect();
    for (asserted, delta, violated, witness) in scored {
        if asserted {
            report.record(delta, violated, || witness);
        } else {
            report.n_trials += 1;
            if report.witness.is_none() {
                report.witness = Some(format!("recorded (not asserted): {witness}"));
            }
        }
    }
    report
}

/// Assert depth at a random convex combination is at least the smaller
/// endpoint depth.
pub fn check_quasiconcavity(
    eval: &DepthEval,
    ds: &Dataset,
    n_segments: usize,
    seed: u64,
    tol: f64,
) -> AxiomReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(13);
    let segments: Vec<(Coef, Coef, f64)> = (0..n_segments)
        .map(|_| {
            let a = DVector::from_fn(ds.p(), |_, _| rng.sample::<f64, _>(StandardNormal));
            let b = DVector::from_fn(ds.p(), |_, _| rng.sample::<f64, _>(StandardNormal));
            (
                Coef::new(a * 4.0).expect("finite endpoint"),
                Coef::new(b * 4.0).expect("finite endpoint"),
                rng.gen::<f64>(),
            )
        })
        .collect();
    let mut report = AxiomReport::new(&format!("quasi-concavity[{}]", eval.label()));
    let outcomes: Vec<(f64, bool, String)> = segments
        .par_iter()
        .map(|(b1, b2, lambda)| {
            let run = || -> Result<f64> {
                let d1 = eval.eval(ds, b1)?;
                let d2 = eval.eval(ds, b2)?;
                let mid = Coef::new(b1.beta() * *lambda + b2.beta() * (1.0 - *lambda))?;
                let dm = eval.eval(ds, &mid)?;
                Ok(d1.min(d2) - dm)
            };
            match run() {
                Ok(gap) => (
                    gap,
                    gap > tol,
                    format!(
                        "{}; b1={:?} b2={:?} lambda={lambda}; min(endpoints) exceeds midpoint by {gap:.3e}",
                        describe_ds(ds),
                        b1.beta().as_slice(),
                        b2.beta().as_slice()
                    ),
                ),
                Err(e) => (f64::INFINITY, true, format!("evaluator error: {e}")),
            }
        })
        .collect();
    for (delta, violated, witness) in outcomes {
        report.record(delta, violated, || witness);
    }
    report
}

/// Advisory resampling probe: largest depth gap between the full data
/// and seeded bootstrap resamples at the same coefficient.
pub fn bootstrap_gap(
    eval: &DepthEval,
    ds: &Dataset,
    b: &Coef,
    n_resamples: usize,
    seed: u64,
) -> Result<f64> {
    let base = eval.eval(ds, b)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(14);
    let mut worst = 0.0f64;
    for _ in 0..n_resamples {
        let mut x = DMatrix::zeros(ds.n(), ds.p());
        let mut y = DVector::zeros(ds.n());
        for i in 0..ds.n() {
            let j = rng.gen_range(0..ds.n());
            x.set_row(i, &ds.x().row(j));
            y[i] = ds.y()[j];
        }
        let Ok(res) = Dataset::new(x, y, ds.has_intercept()) else {
            continue;
        };
        if let Ok(d) = eval.eval(&res, b) {
            worst = worst.max((d - base).abs());
        }
    }
    Ok(worst)
}

// ---- deterministic trial generation -----------------------------------

/// Grid step for generated data: everything is a multiple of 1/8, so the
/// transform arithmetic below is exact in binary floating point.
fn dyadic(rng: &mut ChaCha8Rng, lo: i32, hi: i32) -> f64 {
    rng.gen_range(lo..=hi) as f64 / 8.0
}

fn gen_simple_dataset(rng: &mut ChaCha8Rng, n_min: usize, n_max: usize) -> Dataset {
    let n = rng.gen_range(n_min..=n_max);
    loop {
        let xs: Vec<f64> = (0..n).map(|_| dyadic(rng, -32, 32)).collect();
        let ys: Vec<f64> = (0..n).map(|_| dyadic(rng, -128, 128)).collect();
        let distinct = {
            let mut s = xs.clone();
            s.sort_by(f64::total_cmp);
            s.dedup();
            s.len()
        };
        if distinct < 2 {
            continue;
        }
        if stats::mad(&ys).map(|m| m > 0.0).unwrap_or(false) {
            return Dataset::simple(&xs, &ys).expect("generated data is finite");
        }
    }
}

fn gen_coef(rng: &mut ChaCha8Rng) -> Coef {
    Coef::from_slice(&[dyadic(rng, -32, 32), dyadic(rng, -32, 32)]).expect("finite coefficient")
}

const SCALE_POOL: [f64; 6] = [2.0, -2.0, 0.5, -0.5, 1.5, -1.5];
const SCALE_POOL_POSITIVE: [f64; 3] = [2.0, 0.5, 1.5];
const AFFINE_SLOPE_POOL: [f64; 5] = [2.0, -2.0, 0.5, -0.5, -1.5];

fn gen_transform(
    rng: &mut ChaCha8Rng,
    kind: usize,
    intercept_shift_only: bool,
    positive_scale_only: bool,
) -> Transform {
    match kind % 3 {
        0 => {
            let b0 = if intercept_shift_only {
                Coef::from_slice(&[dyadic(rng, -32, 32), 0.0])
            } else {
                Coef::from_slice(&[dyadic(rng, -32, 32), dyadic(rng, -32, 32)])
            };
            Transform::RegressionShift(b0.expect("finite shift"))
        }
        1 => {
            let s = if positive_scale_only {
                SCALE_POOL_POSITIVE[rng.gen_range(0..SCALE_POOL_POSITIVE.len())]
            } else {
                SCALE_POOL[rng.gen_range(0..SCALE_POOL.len())]
            };
            Transform::ResponseScale(s)
        }
        _ => {
            let a = dyadic(rng, -16, 16);
            let c = AFFINE_SLOPE_POOL[rng.gen_range(0..AFFINE_SLOPE_POOL.len())];
            Transform::CarrierAffine(DMatrix::from_row_slice(2, 2, &[1.0, a, 0.0, c]))
        }
    }
}

fn obj_spec_cycle(i: usize) -> ObjSpec {
    match i % 4 {
        0 => ObjSpec::least_squares(),
        1 => ObjSpec::lad(),
        2 => ObjSpec::lms(),
        _ => ObjSpec::new(Loss::Check(0.25), Aggregator::Mean).expect("valid check spec"),
    }
}

/// Mean-aggregator specs with convex losses: the cases where the depth
/// is provably quasi-concave.
fn obj_convex_cycle(i: usize) -> ObjSpec {
    match i % 3 {
        0 => ObjSpec::least_squares(),
        1 => ObjSpec::lad(),
        _ => ObjSpec::new(Loss::Check(0.25), Aggregator::Mean).expect("valid check spec"),
    }
}

fn prd_t_cycle(i: usize) -> TSpec {
    match i % 3 {
        0 => TSpec::Median,
        1 => TSpec::Mean,
        _ => TSpec::Quantile(0.25),
    }
}

fn prd_plan(seed: u64) -> DirectionPlan {
    DirectionPlan::new(32, seed, true)
}

/// Outcome of a suite run: individual reports plus the overall verdict.
#[derive(Debug, Clone)]
pub struct SuiteOutcome {
    pub reports: Vec<AxiomReport>,
    pub passed: bool,
}

impl SuiteOutcome {
    fn from_reports(reports: Vec<AxiomReport>) -> Self {
        let passed = reports.iter().all(AxiomReport::passed);
        SuiteOutcome { reports, passed }
    }
}

/// Invariance trials. Shifts for the response-scaled families keep the
/// slope fixed: their scale basis is the raw response, and a slope
/// shift changes that basis while leaving residuals alone, so only
/// intercept shifts preserve the depth (see the module tests for a
/// two-point demonstration).
pub fn run_p1_suite(family: Family, n_trials: usize, seed: u64) -> SuiteOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(21);
    let mut report: Option<AxiomReport> = None;
    let mut t = 0usize;
    while report.as_ref().map(|r| r.n_trials).unwrap_or(0) < n_trials as u64 {
        let ds = gen_simple_dataset(&mut rng, 4, 12);
        let b = gen_coef(&mut rng);
        let (eval, tol, intercept_only, positive_scale) = match family {
            Family::Rd => (DepthEval::RdExact, 0.0, false, false),
            Family::Dc => (DepthEval::DcExact(DEFAULT_ZERO_TOL), 0.0, false, false),
            Family::Obj => {
                let spec = obj_spec_cycle(t);
                let positive = matches!(spec.loss, Loss::Check(_));
                (DepthEval::Obj(spec), 1e-9, true, positive)
            }
            Family::Prd => {
                let tspec = prd_t_cycle(t);
                let positive = matches!(tspec, TSpec::Quantile(tau) if tau != 0.5);
                (
                    DepthEval::Prd(prd_plan(seed.wrapping_add(t as u64)), tspec),
                    1e-9,
                    true,
                    positive,
                )
            }
        };
        let tr = gen_transform(&mut rng, t, intercept_only, positive_scale);
        let r = check_invariance(&eval, &ds, &b, std::slice::from_ref(&tr), tol);
        match report.as_mut() {
            Some(acc) => acc.merge(&r),
            None => report = Some(r),
        }
        t += 1;
    }
    SuiteOutcome::from_reports(vec![report.expect("at least one trial")])
}

/// Center-maximality trials on symmetrized datasets, including the exact
/// center values where they are known in closed form.
pub fn run_p2_suite(family: Family, n_trials: usize, seed: u64) -> SuiteOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(22);
    let mut reports: Vec<AxiomReport> = Vec::new();
    let mut exact = AxiomReport::new(&format!("center-value[{}]", family.label()));
    for t in 0..n_trials {
        let ds = gen_simple_dataset(&mut rng, 4, 10);
        let b0 = gen_coef(&mut rng);
        let sym = make_symmetric(&ds, &b0).expect("dims match");
        let (eval, tol) = match family {
            Family::Rd => (DepthEval::RdExact, 0.0),
            Family::Dc => (DepthEval::DcExact(DEFAULT_ZERO_TOL), 0.0),
            Family::Obj => (DepthEval::Obj(obj_convex_cycle(t)), 1e-12),
            Family::Prd => (
                DepthEval::Prd(prd_plan(seed.wrapping_add(t as u64)), TSpec::Median),
                0.0,
            ),
        };
        match family {
            Family::Prd => {
                let d = eval.eval(&sym, &b0).expect("center evaluates");
                exact.record(1.0 - d, d != 1.0, || {
                    format!("{}; center depth {d} != 1", describe_ds(&sym))
                });
            }
            Family::Rd => {
                let d = rd_exact_simple(&sym, &b0).expect("center evaluates");
                let r = residuals(&sym, &b0).expect("dims match");
                let zeros = r.iter().filter(|v| **v == 0.0).count() as u64;
                let expect = (sym.n() as u64 / 2 + zeros / 2, sym.n() as u64);
                let got = d.counts().expect("count-based depth");
                exact.record(
                    (got.0 as f64 - expect.0 as f64).abs(),
                    got != expect,
                    || format!("{}; counts {:?} != {:?}", describe_ds(&sym), got, expect),
                );
            }
            _ => {}
        }
        let r = check_max_at_center(&eval, &ds, &b0, 500, seed ^ (t as u64), tol)
            .expect("symmetrization succeeds");
        match reports.iter_mut().find(|x| x.axiom == r.axiom) {
            Some(acc) => acc.merge(&r),
            None => reports.push(r),
        }
    }
    if exact.n_trials > 0 {
        reports.insert(0, exact);
    }
    SuiteOutcome::from_reports(reports)
}

/// The dataset on which the on-hyperplane depth provably breaks ray
/// monotonicity: two point pairs on two crossing lines.
pub fn crossing_lines_dataset() -> Dataset {
    Dataset::simple(&[1.0, 2.0, 3.0, 4.0], &[0.0, 0.0, 3.0, 4.0]).expect("fixed data")
}

/// Ray-monotonicity trials. The on-hyperplane family runs in
/// expected-violation mode on the crossing-lines dataset; the others are
/// anchored at a fitted deepest point and asserted. The projection
/// family runs the mean transform: monotonicity from the anchor is
/// quasi-concavity in ray form, so the median transform is excluded
/// here for the same reason as in the quasi-concavity suite.
pub fn run_p3_suite(family: Family, n_trials: usize, seed: u64) -> SuiteOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(23);
    if family == Family::Dc {
        let ds = crossing_lines_dataset();
        let eval = DepthEval::DcExact(DEFAULT_ZERO_TOL);
        let b_star = Coef::from_slice(&[0.0, 0.0]).expect("fixed center");
        let pinned = Coef::from_slice(&[0.0, 1.0]).expect("fixed ray");
        let report = check_ray_monotonicity(
            &eval,
            &ds,
            &b_star,
            &[pinned],
            n_trials.saturating_sub(1).max(1),
            10,
            seed,
            0.0,
            true,
        );
        return SuiteOutcome::from_reports(vec![report]);
    }
    let mut reports: Vec<AxiomReport> = Vec::new();
    let opts = FitOptions::default();
    for t in 0..n_trials {
        let ds = gen_simple_dataset(&mut rng, 4, 10);
        let (eval, b_star, tol) = match family {
            Family::Rd => {
                let fit = fit_deepest_rd(&ds, &prd_plan(seed), &opts).expect("fit succeeds");
                (DepthEval::RdExact, fit.coef, 0.0)
            }
            Family::Obj => {
                let spec = obj_convex_cycle(t);
                let fit = fit_obj(&ds, &spec, &opts).expect("fit succeeds");
                (DepthEval::Obj(spec), fit.coef, 1e-12)
            }
            Family::Prd => {
                let plan = prd_plan(seed.wrapping_add(t as u64));
                let fit =
                    fit_prd_minimax(&ds, &plan, &TSpec::Mean, &opts).expect("fit succeeds");
                (DepthEval::Prd(plan, TSpec::Mean), fit.coef, 1e-12)
            }
            Family::Dc => unreachable!("handled above"),
        };
        let r = check_ray_monotonicity(
            &eval,
            &ds,
            &b_star,
            &[],
            4,
            10,
            seed ^ (t as u64),
            tol,
            false,
        );
        match reports.iter_mut().find(|x| x.axiom == r.axiom) {
            Some(acc) => acc.merge(&r),
            None => reports.push(r),
        }
    }
    SuiteOutcome::from_reports(reports)
}

/// Vanishing-at-infinity trials. The objective family asserts decay
/// along the intercept rays only and records a random slope ray, whose
/// limiting behavior is not guaranteed.
pub fn run_p4_suite(family: Family, n_trials: usize, seed: u64) -> SuiteOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(24);
    let mut reports: Vec<AxiomReport> = Vec::new();
    for t in 0..n_trials {
        let ds = gen_simple_dataset(&mut rng, 4, 12);
        let quantized = 1.0 / ds.n() as f64 + 1e-9;
        let (eval, threshold) = match family {
            Family::Rd => (DepthEval::RdExact, quantized),
            Family::Dc => (DepthEval::DcExact(DEFAULT_ZERO_TOL), quantized),
            Family::Obj => (DepthEval::Obj(obj_spec_cycle(t)), 1e-3),
            Family::Prd => (
                DepthEval::Prd(prd_plan(seed.wrapping_add(t as u64)), prd_t_cycle(t)),
                1e-3,
            ),
        };
        let random_ray = {
            let z = DVector::from_fn(2, |_, _| rng.sample::<f64, _>(StandardNormal));
            z.normalize()
        };
        let e1 = DVector::from_column_slice(&[1.0, 0.0]);
        let (asserted, recorded): (Vec<DVector<f64>>, Vec<DVector<f64>>) = match family {
            Family::Obj => (vec![e1.clone(), -e1], vec![random_ray]),
            _ => (vec![random_ray], Vec::new()),
        };
        let r = check_vanishing(&eval, &ds, &asserted, &recorded, threshold);
        match reports.iter_mut().find(|x| x.axiom == r.axiom) {
            Some(acc) => acc.merge(&r),
            None => reports.push(r),
        }
    }
    SuiteOutcome::from_reports(reports)
}

/// Quasi-concavity trials over random segments. The objective and
/// projection families run the configurations for which the property
/// actually holds: the quantile aggregator and the median transform
/// are excluded because their per-point building blocks are not
/// quasi-convex along segments, so a fixed direction or loss set can
/// dip mid-segment. Each module pins a counterexample test.
pub fn run_qc_suite(family: Family, n_segments: usize, seed: u64) -> SuiteOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(25);
    let per_ds = 10usize;
    let n_datasets = n_segments.div_ceil(per_ds);
    let mut reports: Vec<AxiomReport> = Vec::new();
    for t in 0..n_datasets {
        let ds = gen_simple_dataset(&mut rng, 4, 15);
        let (eval, tol) = match family {
            Family::Rd => (DepthEval::RdExact, 0.0),
            Family::Dc => (DepthEval::DcExact(DEFAULT_ZERO_TOL), 0.0),
            Family::Obj => (DepthEval::Obj(obj_convex_cycle(t)), 1e-12),
            Family::Prd => (
                DepthEval::Prd(prd_plan(seed.wrapping_add(t as u64)), TSpec::Mean),
                1e-12,
            ),
        };
        let r = check_quasiconcavity(&eval, &ds, per_ds, seed ^ (t as u64), tol);
        match reports.iter_mut().find(|x| x.axiom == r.axiom) {
            Some(acc) => acc.merge(&r),
            None => reports.push(r),
        }
    }
    SuiteOutcome::from_reports(reports)
}

/// Which suite to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    P1,
    P2,
    P3,
    P4,
    Qc,
    All,
}

impl Suite {
    pub fn label(&self) -> &'static str {
        match self {
            Suite::P1 => "p1",
            Suite::P2 => "p2",
            Suite::P3 => "p3",
            Suite::P4 => "p4",
            Suite::Qc => "qc",
            Suite::All => "all",
        }
    }
}

/// Default trial counts per suite.
pub fn default_trials(suite: Suite) -> usize {
    match suite {
        Suite::P1 => 200,
        Suite::P2 => 25,
        Suite::P3 => 25,
        Suite::P4 => 50,
        Suite::Qc => 1000,
        Suite::All => 0,
    }
}

/// Run one suite (or all of them) for a family.
pub fn run_suite(family: Family, suite: Suite, n_trials: usize, seed: u64) -> SuiteOutcome {
    match suite {
        Suite::P1 => run_p1_suite(family, n_trials, seed),
        Suite::P2 => run_p2_suite(family, n_trials, seed),
        Suite::P3 => run_p3_suite(family, n_trials, seed),
        Suite::P4 => run_p4_suite(family, n_trials, seed),
        Suite::Qc => run_qc_suite(family, n_trials, seed),
        Suite::All => {
            let mut reports = Vec::new();
            for s in [Suite::P1, Suite::P2, Suite::P3, Suite::P4, Suite::Qc] {
                let n = if n_trials > 0 { n_trials } else { default_trials(s) };
                reports.extend(run_suite(family, s, n, seed).reports);
            }
            SuiteOutcome::from_reports(reports)
        }
    }
}
