//! Projection regression depth: `1/(1 + UF)` where the unfitness UF is
//! the worst scaled location statistic of residual-to-projection ratios
//! over directions.
//!
//! A multiplicative variant [`my93_a`] (location statistic of the ratios
//! times the projected-carrier spread) is included for contrast: its
//! minimax fit is not scale equivariant the way the UF minimax is.

use nalgebra::DVector;
use rayon::prelude::*;

use crate::dataset::{residuals, Coef, Dataset, DepthValue};
use crate::directions::{sample_directions, DirectionPlan};
use crate::error::{Error, Result};
use crate::stats;

/// Location statistic applied to the ratio sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TSpec {
    Median,
    Quantile(f64),
    Mean,
}

impl TSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            TSpec::Quantile(tau) if !(tau > 0.0 && tau < 1.0) => Err(Error::InvalidParameter(
                format!("quantile tau = {tau} outside (0, 1)"),
            )),
            _ => Ok(()),
        }
    }

    pub fn apply(&self, sample: &[f64]) -> Result<f64> {
        match *self {
            TSpec::Median => stats::median(sample),
            TSpec::Quantile(tau) => stats::quantile(sample, tau),
            TSpec::Mean => Ok(sample.iter().sum::<f64>() / sample.len() as f64),
        }
    }
}

/// Scale denominator for the per-direction unfitness.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScaleBasis {
    /// mad of the raw response (the default).
    Response,
    /// mad of the residuals at the evaluated coefficient.
    Residual,
}

/// Per-point projection exclusion factor, applied as `1e-12 * (1 + ||x_i||)`.
pub const PROJ_TOL: f64 = 1e-12;

fn ratio_sample(ds: &Dataset, b: &Coef, v: &DVector<f64>) -> Result<Vec<f64>> {
    if v.len() != ds.p() {
        return Err(Error::DimensionMismatch(format!(
            "direction has {} entries but the dataset has p = {}",
            v.len(),
            ds.p()
        )));
    }
    let r = residuals(ds, b)?;
    let proj = ds.x() * v;
    let mut ratios = Vec::with_capacity(ds.n());
    for i in 0..ds.n() {
        let gate = PROJ_TOL * (1.0 + ds.row(i).norm());
        if proj[i].abs() > gate {
            ratios.push(r[i] / proj[i]);
        }
    }
    if ratios.is_empty() {
        return Err(Error::DegenerateDirection);
    }
    Ok(ratios)
}

fn scale_value(ds: &Dataset, b: &Coef, basis: ScaleBasis) -> Result<f64> {
    let s = match basis {
        ScaleBasis::Response => stats::mad(ds.y().as_slice())?,
        ScaleBasis::Residual => stats::mad(residuals(ds, b)?.as_slice())?,
    };
    if s == 0.0 {
        return Err(Error::ZeroScale);
    }
    Ok(s)
}

/// Per-direction unfitness `|T({r_i / (x_i'v)})| / mad(y)`, with ratios
/// whose projection magnitude falls below the per-point gate excluded.
///
/// `v` is used as given; callers discretizing the unit sphere pass unit
/// vectors, and invariance harnesses pass transform-mapped vectors
/// unnormalized so the ratio sample matches the untransformed one.
pub fn uf_direction(ds: &Dataset, b: &Coef, v: &DVector<f64>, t: &TSpec) -> Result<f64> {
    uf_direction_scaled(ds, b, v, t, ScaleBasis::Response)
}

/// [`uf_direction`] with a selectable scale denominator.
pub fn uf_direction_scaled(
    ds: &Dataset,
    b: &Coef,
    v: &DVector<f64>,
    t: &TSpec,
    basis: ScaleBasis,
) -> Result<f64> {
    t.validate()?;
    let scale = scale_value(ds, b, basis)?;
    let ratios = ratio_sample(ds, b, v)?;
    Ok(t.apply(&ratios)?.abs() / scale)
}

/// Max of [`uf_direction`] over an explicit direction list, skipping
/// degenerate directions. A lower bound on the supremum over the sphere,
/// nondecreasing under refinement of the list.
pub fn uf_with_directions(
    ds: &Dataset,
    b: &Coef,
    dirs: &[DVector<f64>],
    t: &TSpec,
) -> Result<f64> {
    if dirs.is_empty() {
        return Err(Error::AllDirectionsDegenerate);
    }
    let evals: Vec<Result<Option<f64>>> = dirs
        .par_iter()
        .map(|v| match uf_direction(ds, b, v, t) {
            Ok(u) => Ok(Some(u)),
            Err(Error::DegenerateDirection) => Ok(None),
            Err(e) => Err(e),
        })
        .collect();
    let mut best: Option<f64> = None;
    for e in evals {
        if let Some(u) = e? {
            best = Some(match best {
                Some(cur) => cur.max(u),
                None => u,
            });
        }
    }
    best.ok_or(Error::AllDirectionsDegenerate)
}

/// Max of [`uf_direction`] over sampled directions. Exact for p = 1,
/// where the directions are exactly {+1, -1}.
pub fn uf(ds: &Dataset, b: &Coef, plan: &DirectionPlan, t: &TSpec) -> Result<f64> {
    let dirs = sample_directions(plan, ds.p(), Some(ds));
    uf_with_directions(ds, b, &dirs, t)
}

/// Projection regression depth `1/(1 + uf)`. An upper bound on the true
/// depth under direction sampling: adding directions never increases it.
pub fn prd(ds: &Dataset, b: &Coef, plan: &DirectionPlan, t: &TSpec) -> Result<DepthValue> {
    let u = uf(ds, b, plan, t)?;
    DepthValue::new(1.0 / (1.0 + u))
}

/// [`prd`] evaluated on an explicit direction list.
pub fn prd_with_directions(
    ds: &Dataset,
    b: &Coef,
    dirs: &[DVector<f64>],
    t: &TSpec,
) -> Result<DepthValue> {
    let u = uf_with_directions(ds, b, dirs, t)?;
    DepthValue::new(1.0 / (1.0 + u))
}

/// Multiplicative unfitness `|T({r_i / (x_i'v)})| * mad({x_i'v})`.
///
/// Unlike [`uf_direction`] this trades the fixed response scale for the
/// projected-carrier spread, and its minimax fit picks up an extra factor
/// of the response scale under `y -> s y`.
pub fn my93_a(ds: &Dataset, b: &Coef, v: &DVector<f64>, t: &TSpec) -> Result<f64> {
    t.validate()?;
    let ratios = ratio_sample(ds, b, v)?;
    let proj = ds.x() * v;
    let proj_all: Vec<f64> = proj.iter().copied().collect();
    let spread = stats::mad(&proj_all)?;
    if spread == 0.0 {
        return Err(Error::ZeroProjectionScale);
    }
    Ok(t.apply(&ratios)?.abs() * spread)
}

/// Max of [`my93_a`] over an explicit direction list.
pub fn my93_sup(ds: &Dataset, b: &Coef, dirs: &[DVector<f64>], t: &TSpec) -> Result<f64> {
    if dirs.is_empty() {
        return Err(Error::AllDirectionsDegenerate);
    }
    let evals: Vec<Result<Option<f64>>> = dirs
        .par_iter()
        .map(|v| match my93_a(ds, b, v, t) {
            Ok(u) => Ok(Some(u)),
            Err(Error::DegenerateDirection) | Err(Error::ZeroProjectionScale) => Ok(None),
            Err(e) => Err(e),
        })
        .collect();
    let mut best: Option<f64> = None;
    for e in evals {
        if let Some(u) = e? {
            best = Some(match best {
                Some(cur) => cur.max(u),
                None => u,
            });
        }
    }
    best.ok_or(Error::AllDirectionsDegenerate)
}
