//! Depth and unfitness functionals for linear regression.
//!
//! A coefficient vector β is a candidate description of a dataset
//! `(X, y)`. Each depth family in this crate grades β on `[0, 1]`:
//! higher means better centered with respect to the sample.
//!
//! * [`depth::obj`] — objective-function depth `1/(1 + φ(loss of scaled residuals))`;
//!   its maximizers are the classical LS / LAD / quantile / LMS fits.
//! * [`depth::dc`] — competitor depth: the sample fraction a hyperplane
//!   must carry on itself; equals the on-hyperplane mass.
//! * [`depth::rd`] — regression depth: the smallest sample fraction with
//!   nonnegative residual-times-projection sign over all directions,
//!   with an exact sweep for simple regression.
//! * [`depth::prd`] — projection regression depth: `1/(1 + UF)` where UF
//!   is the worst scaled location statistic of residual/projection
//!   ratios over directions.
//!
//! [`estimators`] computes maximum-depth (minimum-unfitness) fits and
//! [`axioms`] machine-checks invariance, centrality, monotonicity,
//! vanishing, and quasi-concavity for any evaluator in the crate.

pub mod axioms;
pub mod dataset;
pub mod depth;
pub mod directions;
pub mod error;
pub mod estimators;
pub mod io;
pub mod simplex;
pub mod stats;

pub use dataset::{Coef, Dataset, DepthValue};
pub use directions::DirectionPlan;
pub use error::{Error, Result};
