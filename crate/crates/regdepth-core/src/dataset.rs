//! Core data types: datasets, coefficient vectors, depth values.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// A regression sample: carrier matrix `X` (n rows, p columns) and
/// response vector `y` (length n).
///
/// With `has_intercept`, column 0 of `X` is identically 1 and the rows
/// follow the `w = (1, x')'` convention.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    x: DMatrix<f64>,
    y: DVector<f64>,
    has_intercept: bool,
}

impl Dataset {
    /// Builds a dataset, validating finiteness and the intercept column.
    pub fn new(x: DMatrix<f64>, y: DVector<f64>, has_intercept: bool) -> Result<Self> {
        if x.nrows() == 0 || x.ncols() == 0 {
            return Err(Error::EmptyInput("dataset must have n >= 1 and p >= 1".into()));
        }
        if x.nrows() != y.len() {
            return Err(Error::DimensionMismatch(format!(
                "X has {} rows but y has {} entries",
                x.nrows(),
                y.len()
            )));
        }
        if x.iter().any(|v| !v.is_finite()) || y.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("dataset entries must be finite".into()));
        }
        if has_intercept && x.column(0).iter().any(|&v| v != 1.0) {
            return Err(Error::WrongShape(
                "has_intercept requires column 0 of X to be exactly 1".into(),
            ));
        }
        Ok(Self { x, y, has_intercept })
    }

    /// Builds a simple-regression dataset (intercept column plus one carrier).
    pub fn simple(xs: &[f64], ys: &[f64]) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} carriers vs {} responses",
                xs.len(),
                ys.len()
            )));
        }
        let n = xs.len();
        let x = DMatrix::from_fn(n, 2, |i, j| if j == 0 { 1.0 } else { xs[i] });
        Dataset::new(x, DVector::from_column_slice(ys), true)
    }

    /// Builds a dataset without an intercept column from row-major carriers.
    pub fn from_rows(rows: &[Vec<f64>], ys: &[f64]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::EmptyInput("no rows".into()));
        }
        let p = rows[0].len();
        if rows.iter().any(|r| r.len() != p) {
            return Err(Error::DimensionMismatch("ragged carrier rows".into()));
        }
        let x = DMatrix::from_fn(rows.len(), p, |i, j| rows[i][j]);
        Dataset::new(x, DVector::from_column_slice(ys), false)
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn p(&self) -> usize {
        self.x.ncols()
    }

    pub fn x(&self) -> &DMatrix<f64> {
        &self.x
    }

    pub fn y(&self) -> &DVector<f64> {
        &self.y
    }

    pub fn has_intercept(&self) -> bool {
        self.has_intercept
    }

    /// Carrier row i as an owned vector.
    pub fn row(&self, i: usize) -> DVector<f64> {
        self.x.row(i).transpose()
    }

    /// The single non-intercept carrier column of a simple-regression dataset.
    pub fn simple_carriers(&self) -> Result<Vec<f64>> {
        if !self.has_intercept || self.p() != 2 {
            return Err(Error::WrongShape(
                "expected an intercept column plus exactly one carrier (p = 2)".into(),
            ));
        }
        Ok(self.x.column(1).iter().copied().collect())
    }

    /// Replaces the response vector, keeping carriers.
    pub fn with_response(&self, y: DVector<f64>) -> Result<Self> {
        Dataset::new(self.x.clone(), y, self.has_intercept)
    }

    /// Replaces the carrier matrix.
    pub fn with_carriers(&self, x: DMatrix<f64>, has_intercept: bool) -> Result<Self> {
        Dataset::new(x, self.y.clone(), has_intercept)
    }
}

/// A coefficient vector β.
#[derive(Debug, Clone, PartialEq)]
pub struct Coef {
    beta: DVector<f64>,
}

impl Coef {
    pub fn new(beta: DVector<f64>) -> Result<Self> {
        if beta.is_empty() {
            return Err(Error::EmptyInput("coefficient vector is empty".into()));
        }
        if beta.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("coefficients must be finite".into()));
        }
        Ok(Self { beta })
    }

    pub fn from_slice(beta: &[f64]) -> Result<Self> {
        Self::new(DVector::from_column_slice(beta))
    }

    pub fn beta(&self) -> &DVector<f64> {
        &self.beta
    }

    pub fn len(&self) -> usize {
        self.beta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.beta.is_empty()
    }

    pub fn norm(&self) -> f64 {
        self.beta.norm()
    }

    /// Total order for deterministic tie-breaking: entrywise lexicographic.
    pub fn lex_cmp(&self, other: &Coef) -> std::cmp::Ordering {
        for (a, b) in self.beta.iter().zip(other.beta.iter()) {
            match a.partial_cmp(b) {
                Some(std::cmp::Ordering::Equal) => continue,
                Some(ord) => return ord,
                None => return std::cmp::Ordering::Equal,
            }
        }
        self.beta.len().cmp(&other.beta.len())
    }
}

/// A depth value in `[0, 1]`.
///
/// Count-based evaluators also carry the exact pair `(k, n)` so tests can
/// compare integers instead of floats.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DepthValue {
    value: f64,
    counts: Option<(u64, u64)>,
}

impl DepthValue {
    pub fn new(value: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::InvalidParameter(format!(
                "depth value {value} outside [0, 1]"
            )));
        }
        Ok(Self { value, counts: None })
    }

    /// Exact rational depth k/n.
    pub fn from_counts(k: u64, n: u64) -> Result<Self> {
        if n == 0 || k > n {
            return Err(Error::InvalidParameter(format!("invalid counts {k}/{n}")));
        }
        Ok(Self {
            value: k as f64 / n as f64,
            counts: Some((k, n)),
        })
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    /// The exact `(k, n)` pair when the evaluator counted points.
    pub fn counts(&self) -> Option<(u64, u64)> {
        self.counts
    }
}

/// Residual vector r_i = y_i - x_i'b.
pub fn residuals(ds: &Dataset, b: &Coef) -> Result<DVector<f64>> {
    if b.len() != ds.p() {
        return Err(Error::DimensionMismatch(format!(
            "coefficient has {} entries but the dataset has p = {}",
            b.len(),
            ds.p()
        )));
    }
    Ok(ds.y() - ds.x() * b.beta())
}
