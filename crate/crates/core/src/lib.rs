//! Optimal test plans for gamma-process degradation tests.
//!
//! The crate computes the number of test units, the number of inspections and
//! the inspection schedule that minimise the D-, A- or V-criterion of the
//! maximum-likelihood estimator of a gamma degradation process in the Tweedie
//! parametrization, optionally under a linear cost budget and a minimum
//! inspection interval.
//!
//! Module map:
//! - [`specfun`]: polygamma functions, incomplete gamma, the Ω function.
//! - [`lifetime`]: process parameters, first-passage lifetime, quantile sensitivity.
//! - [`criteria`]: designs, Fisher information, objectives and their log-derivatives.
//! - [`plan_type1`]: periodic inspection plans.
//! - [`plan_type2`]: aperiodic (one long interval plus minimal intervals) plans.
//! - [`fit`]: likelihood, MLE and simulation.
//! - [`analysis`]: integer designs and sensitivity tables.
//! - [`presets`]: the two worked configurations used throughout the tests.

// `!(x > y)` guards deliberately reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod criteria;
pub mod error;
pub mod fit;
pub mod lifetime;
pub mod plan;
pub mod plan_type1;
pub mod plan_type2;
pub mod presets;
pub mod roots;
pub mod specfun;

pub use criteria::{CostModel, Criterion, CriterionKind, Design, Resolved, Schedule};
pub use error::{Error, Result};
pub use lifetime::{LifetimeSpec, ProcessParams, SensitivityVector};
pub use plan::{Candidate, CaseLabel, Family, PlanResult};
