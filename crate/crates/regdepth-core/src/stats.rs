//! Robust univariate functionals: median, MAD, empirical quantile.
//!
//! Conventions:
//! * even-length median is the midpoint of the two central order statistics,
//! * MAD carries no consistency factor,
//! * quantile is the left-continuous inverse of the empirical CDF, with the
//!   τ = 0.5 case deferring to the median so the two agree.

use crate::error::{Error, Result};

fn sorted_copy(v: &[f64]) -> Vec<f64> {
    let mut s = v.to_vec();
    s.sort_by(|a, b| a.partial_cmp(b).expect("non-finite value in sample"));
    s
}

/// Sample median. Even lengths average the two central order statistics.
pub fn median(v: &[f64]) -> Result<f64> {
    if v.is_empty() {
        return Err(Error::EmptyInput("median of empty sample".into()));
    }
    let s = sorted_copy(v);
    let n = s.len();
    if n % 2 == 1 {
        Ok(s[n / 2])
    } else {
        Ok((s[n / 2 - 1] + s[n / 2]) / 2.0)
    }
}

/// Median absolute deviation about the median, without a consistency factor.
pub fn mad(v: &[f64]) -> Result<f64> {
    let m = median(v)?;
    let devs: Vec<f64> = v.iter().map(|x| (x - m).abs()).collect();
    median(&devs)
}

/// Left-continuous empirical quantile: the order statistic at rank
/// ceil(n·τ). τ = 0.5 uses the median so both agree on even lengths.
pub fn quantile(v: &[f64], tau: f64) -> Result<f64> {
    if v.is_empty() {
        return Err(Error::EmptyInput("quantile of empty sample".into()));
    }
    if !(tau > 0.0 && tau < 1.0) {
        return Err(Error::InvalidParameter(format!("tau = {tau} outside (0, 1)")));
    }
    if tau == 0.5 {
        return median(v);
    }
    let s = sorted_copy(v);
    let n = s.len();
    let nt = n as f64 * tau;
    // guard against float dust when n·τ is an exact integer
    let rank = if (nt - nt.round()).abs() < 1e-9 {
        nt.round() as usize
    } else {
        nt.ceil() as usize
    };
    let rank = rank.clamp(1, n);
    Ok(s[rank - 1])
}
