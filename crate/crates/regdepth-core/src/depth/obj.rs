//! Objective-function depth: `1/(1 + φ(F_R))` where `R_i = f(r_i / mad(y))`
//! for a loss `f` and an aggregator `φ` (mean or quantile).
//!
//! Maximizing this depth over β recovers the classical estimators: square
//! loss with mean aggregation is least squares, absolute loss is least
//! absolute deviations, the check loss gives quantile regression, and
//! square loss with the median aggregator is least median of squares.

use crate::dataset::{residuals, Coef, Dataset, DepthValue};
use crate::error::{Error, Result};
use crate::stats;

/// Residual loss function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Loss {
    Square,
    Abs,
    /// Check loss f_tau(x) = x * (tau - I(x < 0)).
    Check(f64),
    /// Huber loss with threshold k.
    Huber(f64),
}

impl Loss {
    pub fn apply(&self, x: f64) -> f64 {
        match *self {
            Loss::Square => x * x,
            Loss::Abs => x.abs(),
            Loss::Check(tau) => x * (tau - if x < 0.0 { 1.0 } else { 0.0 }),
            Loss::Huber(k) => {
                let a = x.abs();
                if a <= k {
                    0.5 * x * x
                } else {
                    k * a - 0.5 * k * k
                }
            }
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Loss::Check(tau) if !(tau > 0.0 && tau < 1.0) => Err(Error::InvalidParameter(
                format!("check loss tau = {tau} outside (0, 1)"),
            )),
            Loss::Huber(k) if !(k > 0.0) => {
                Err(Error::InvalidParameter(format!("huber k = {k} must be > 0")))
            }
            _ => Ok(()),
        }
    }
}

/// Conventional Huber threshold.
pub const HUBER_DEFAULT_K: f64 = 1.345;

/// Aggregator applied to the empirical loss distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Aggregator {
    Mean,
    Quantile(f64),
}

impl Aggregator {
    fn validate(&self) -> Result<()> {
        match *self {
            Aggregator::Quantile(tau) if !(tau > 0.0 && tau < 1.0) => Err(
                Error::InvalidParameter(format!("aggregator tau = {tau} outside (0, 1)")),
            ),
            _ => Ok(()),
        }
    }

    fn apply(&self, sample: &[f64]) -> Result<f64> {
        match *self {
            Aggregator::Mean => Ok(sample.iter().sum::<f64>() / sample.len() as f64),
            Aggregator::Quantile(tau) => stats::quantile(sample, tau),
        }
    }
}

/// Loss plus aggregator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjSpec {
    pub loss: Loss,
    pub aggregator: Aggregator,
}

impl ObjSpec {
    pub fn new(loss: Loss, aggregator: Aggregator) -> Result<Self> {
        loss.validate()?;
        aggregator.validate()?;
        Ok(Self { loss, aggregator })
    }

    /// Square loss, mean aggregator (the LS objective).
    pub fn least_squares() -> Self {
        Self { loss: Loss::Square, aggregator: Aggregator::Mean }
    }

    /// Absolute loss, mean aggregator (the LAD objective).
    pub fn lad() -> Self {
        Self { loss: Loss::Abs, aggregator: Aggregator::Mean }
    }

    /// Square loss, median aggregator (the LMS objective).
    pub fn lms() -> Self {
        Self { loss: Loss::Square, aggregator: Aggregator::Quantile(0.5) }
    }

    pub fn validate(&self) -> Result<()> {
        self.loss.validate()?;
        self.aggregator.validate()
    }
}

impl std::fmt::Display for Loss {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Loss::Square => write!(f, "square"),
            Loss::Abs => write!(f, "abs"),
            Loss::Check(tau) => write!(f, "check({tau})"),
            Loss::Huber(k) => write!(f, "huber({k})"),
        }
    }
}

impl std::fmt::Display for Aggregator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Aggregator::Mean => write!(f, "mean"),
            Aggregator::Quantile(tau) => write!(f, "quantile({tau})"),
        }
    }
}

impl std::fmt::Display for ObjSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.loss, self.aggregator)
    }
}

/// φ of the scaled residual losses. Errors with [`Error::ZeroScale`] when
/// mad(y) = 0.
pub fn obj_unfitness(ds: &Dataset, b: &Coef, spec: &ObjSpec) -> Result<f64> {
    spec.loss.validate()?;
    spec.aggregator.validate()?;
    let scale = stats::mad(ds.y().as_slice())?;
    if scale == 0.0 {
        return Err(Error::ZeroScale);
    }
    let r = residuals(ds, b)?;
    let losses: Vec<f64> = r.iter().map(|&ri| spec.loss.apply(ri / scale)).collect();
    spec.aggregator.apply(&losses)
}

/// `1/(1 + obj_unfitness)`.
pub fn obj_depth(ds: &Dataset, b: &Coef, spec: &ObjSpec) -> Result<DepthValue> {
    let uf = obj_unfitness(ds, b, spec)?;
    DepthValue::new(1.0 / (1.0 + uf))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example_ds() -> Dataset {
        Dataset::from_rows(&[vec![1.0], vec![2.0], vec![3.0]], &[1.0, 2.0, 9.0]).unwrap()
    }

    #[test]
    fn perfect_fit_has_zero_unfitness_and_depth_one() {
        let ds = Dataset::simple(&[0.0, 1.0, 2.0], &[1.0, 3.0, 5.0]).unwrap();
        let b = Coef::from_slice(&[1.0, 2.0]).unwrap();
        for spec in [
            ObjSpec::least_squares(),
            ObjSpec::lad(),
            ObjSpec::lms(),
            ObjSpec::new(Loss::Check(0.3), Aggregator::Mean).unwrap(),
            ObjSpec::new(Loss::Huber(HUBER_DEFAULT_K), Aggregator::Mean).unwrap(),
        ] {
            assert_eq!(obj_unfitness(&ds, &b, &spec).unwrap(), 0.0);
            assert_eq!(obj_depth(&ds, &b, &spec).unwrap().value(), 1.0);
        }
    }

    #[test]
    fn abs_mean_example() {
        // mad(y) = 1, scaled |residuals| = (1, 2, 9), mean = 4
        let ds = example_ds();
        let b = Coef::from_slice(&[0.0]).unwrap();
        let uf = obj_unfitness(&ds, &b, &ObjSpec::lad()).unwrap();
        assert_eq!(uf, 4.0);
        assert_eq!(obj_depth(&ds, &b, &ObjSpec::lad()).unwrap().value(), 0.2);
    }

    #[test]
    fn square_median_example() {
        // squared scaled residuals (1, 4, 81), median = 4
        let ds = example_ds();
        let b = Coef::from_slice(&[0.0]).unwrap();
        let uf = obj_unfitness(&ds, &b, &ObjSpec::lms()).unwrap();
        assert_eq!(uf, 4.0);
    }

    #[test]
    fn zero_scale_is_an_error() {
        let ds = Dataset::from_rows(&[vec![1.0], vec![2.0], vec![3.0]], &[5.0, 5.0, 5.0]).unwrap();
        let b = Coef::from_slice(&[0.0]).unwrap();
        match obj_unfitness(&ds, &b, &ObjSpec::lad()) {
            Err(Error::ZeroScale) => {}
            other => panic!("expected ZeroScale, got {other:?}"),
        }
    }

    #[test]
    fn depth_always_in_unit_interval() {
        let ds = example_ds();
        for c in [-100.0, -1.0, 0.0, 0.5, 3.0, 1e6] {
            let b = Coef::from_slice(&[c]).unwrap();
            let d = obj_depth(&ds, &b, &ObjSpec::least_squares()).unwrap().value();
            assert!(d > 0.0 && d <= 1.0);
        }
    }

    #[test]
    fn check_loss_is_nonnegative_and_asymmetric() {
        let f = Loss::Check(0.25);
        assert_eq!(f.apply(0.0), 0.0);
        assert_eq!(f.apply(4.0), 1.0);
        assert_eq!(f.apply(-4.0), 3.0);
        // f_tau(-x) = f_{1-tau}(x): scaling y by s < 0 swaps tau and 1 - tau,
        // so check-loss depth is only scale invariant for s > 0
        let g = Loss::Check(0.75);
        for x in [-3.0, -0.5, 0.2, 7.0] {
            assert!((f.apply(-x) - g.apply(x)).abs() < 1e-15);
        }
    }

    #[test]
    fn huber_matches_square_near_zero_and_linear_tail() {
        let f = Loss::Huber(1.0);
        assert_eq!(f.apply(0.5), 0.125);
        assert_eq!(f.apply(3.0), 2.5);
        assert_eq!(f.apply(-3.0), 2.5);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(ObjSpec::new(Loss::Check(0.0), Aggregator::Mean).is_err());
        assert!(ObjSpec::new(Loss::Huber(0.0), Aggregator::Mean).is_err());
        assert!(ObjSpec::new(Loss::Abs, Aggregator::Quantile(1.0)).is_err());
    }

    #[test]
    fn mean_aggregator_with_convex_loss_is_quasiconcave_on_segments() {
        let ds = Dataset::simple(&[0.0, 1.0, 2.0, 3.0, 5.0], &[0.5, 2.0, 3.0, 3.5, 9.0]).unwrap();
        let spec = ObjSpec::lad();
        let b1 = Coef::from_slice(&[0.0, 1.0]).unwrap();
        let b2 = Coef::from_slice(&[2.0, -1.0]).unwrap();
        let d1 = obj_depth(&ds, &b1, &spec).unwrap().value();
        let d2 = obj_depth(&ds, &b2, &spec).unwrap().value();
        for k in 0..=10 {
            let lam = k as f64 / 10.0;
            let mid = Coef::new(b1.beta() * lam + b2.beta() * (1.0 - lam)).unwrap();
            let dm = obj_depth(&ds, &mid, &spec).unwrap().value();
            assert!(dm >= d1.min(d2) - 1e-12);
        }
    }

    #[test]
    fn quantile_aggregator_can_break_quasiconcavity() {
        // two lines crossing at (5, 5), each carrying a majority once the
        // doubled crossing point is counted; every line strictly between
        // them fits only the crossing point
        let ds = Dataset::simple(
            &[5.0, 5.0, 1.0, 2.0, 3.0, 7.0, 8.0, 9.0],
            &[5.0, 5.0, 1.0, 2.0, 3.0, 3.0, 2.0, 1.0],
        )
        .unwrap();
        let spec = ObjSpec::lms();
        let b1 = Coef::from_slice(&[0.0, 1.0]).unwrap();
        let b2 = Coef::from_slice(&[10.0, -1.0]).unwrap();
        let d1 = obj_depth(&ds, &b1, &spec).unwrap().value();
        let d2 = obj_depth(&ds, &b2, &spec).unwrap().value();
        assert_eq!(d1, 1.0);
        assert_eq!(d2, 1.0);
        let mid = Coef::from_slice(&[5.0, 0.0]).unwrap();
        let dm = obj_depth(&ds, &mid, &spec).unwrap().value();
        assert!(
            dm < d1.min(d2) - 1e-9,
            "expected a quasi-concavity dip for the quantile aggregator, got {dm}"
        );
    }
}
