//! Gamma degradation process and its first-passage lifetime.
//!
//! The process is parametrized by `alpha` (shape per unit time) and `gamma`
//! (log mean drift), so that `Z(t) ~ Gamma(shape = alpha t, rate = beta)` with
//! `beta = alpha exp(-gamma)` and `E[Z(t)] = exp(gamma) t`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::roots::{brent, expand_positive_bracket};
use crate::specfun::{reg_lower_gamma, reg_upper_gamma};

/// Relative step for the finite differences behind [`sensitivity_vector`].
const FD_REL_STEP: f64 = 1e-5;

/// Parameters of a stationary gamma process.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProcessParams {
    pub alpha: f64,
    pub gamma: f64,
}

impl ProcessParams {
    pub fn new(alpha: f64, gamma: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::invalid("alpha", format!("must be finite and > 0, got {alpha}")));
        }
        if !gamma.is_finite() {
            return Err(Error::invalid("gamma", format!("must be finite, got {gamma}")));
        }
        let p = ProcessParams { alpha, gamma };
        if !(p.beta() > 0.0 && p.beta().is_finite()) {
            return Err(Error::invalid(
                "gamma",
                format!("rate alpha*exp(-gamma) is not a positive finite number for gamma = {gamma}"),
            ));
        }
        Ok(p)
    }

    /// Rate parameter `alpha exp(-gamma)`.
    pub fn beta(&self) -> f64 {
        self.alpha * (-self.gamma).exp()
    }

    /// Mean degradation `exp(gamma) t`.
    pub fn mean(&self, t: f64) -> f64 {
        self.gamma.exp() * t
    }

    /// Variance of `Z(t)`, `exp(2 gamma) t / alpha`.
    pub fn variance(&self, t: f64) -> f64 {
        (2.0 * self.gamma).exp() * t / self.alpha
    }
}

/// Failure threshold and quantile level defining the lifetime quantile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LifetimeSpec {
    pub eta: f64,
    pub p: f64,
}

impl LifetimeSpec {
    pub fn new(eta: f64, p: f64) -> Result<Self> {
        if !(eta.is_finite() && eta > 0.0) {
            return Err(Error::invalid("eta", format!("must be finite and > 0, got {eta}")));
        }
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::invalid("p", format!("must lie in (0, 1), got {p}")));
        }
        Ok(LifetimeSpec { eta, p })
    }
}

/// Gradient of the lifetime quantile with respect to `(alpha, gamma)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SensitivityVector {
    pub h1: f64,
    pub h2: f64,
}

impl SensitivityVector {
    /// `h2^2 / (alpha^2 h1^2)`; an interior V-optimal interval exists only below 2/3.
    pub fn ratio(&self, alpha: f64) -> f64 {
        self.h2 * self.h2 / (alpha * alpha * self.h1 * self.h1)
    }
}

/// `P(Z(t) <= z)`.
pub fn degradation_cdf(params: &ProcessParams, t: f64, z: f64) -> Result<f64> {
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::domain("degradation_cdf", format!("t must be > 0, got {t}")));
    }
    if !(z >= 0.0) {
        return Err(Error::domain("degradation_cdf", format!("z must be >= 0, got {z}")));
    }
    reg_lower_gamma(params.alpha * t, params.beta() * z)
}

/// Upper tail `P(Z(t) > threshold)`, the first-passage CDF at `t`.
fn exceedance(alpha: f64, beta: f64, threshold: f64, t: f64) -> Result<f64> {
    reg_upper_gamma(alpha * t, beta * threshold)
}

/// `P(Q <= t)` where `Q` is the first time the path reaches `eta`.
pub fn lifetime_cdf(params: &ProcessParams, spec: &LifetimeSpec, t: f64) -> Result<f64> {
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::domain("lifetime_cdf", format!("t must be > 0, got {t}")));
    }
    exceedance(params.alpha, params.beta(), spec.eta, t)
}

/// Time `t` at which `P(Z(t) > threshold) = level`.
fn crossing_time(alpha: f64, beta: f64, threshold: f64, level: f64, what: &'static str) -> Result<f64> {
    // mean-crossing time as the starting point
    let start = threshold * beta / alpha;
    let f = |t: f64| exceedance(alpha, beta, threshold, t).map_or(f64::NAN, |v| v - level);
    let bracket = expand_positive_bracket(f, start, true, what)?;
    brent(f, bracket, bracket.lo * 1e-15, what)
}

/// The `p`-quantile of the lifetime.
pub fn lifetime_quantile(params: &ProcessParams, spec: &LifetimeSpec) -> Result<f64> {
    crossing_time(params.alpha, params.beta(), spec.eta, spec.p, "lifetime_quantile")
}

/// Central difference with one Richardson step.
fn richardson<F: Fn(f64) -> Result<f64>>(f: F, x: f64, h: f64) -> Result<f64> {
    let d = |s: f64| -> Result<f64> { Ok((f(x + s)? - f(x - s)?) / (2.0 * s)) };
    let coarse = d(h)?;
    let fine = d(0.5 * h)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

/// `h = -(1/f_Q) dF_Q/d(alpha, gamma)` evaluated at the quantile.
pub fn sensitivity_vector(params: &ProcessParams, spec: &LifetimeSpec) -> Result<SensitivityVector> {
    let xi = lifetime_quantile(params, spec)?;
    let (alpha, gamma, eta) = (params.alpha, params.gamma, spec.eta);
    let cdf = |a: f64, g: f64, t: f64| exceedance(a, a * (-g).exp(), eta, t);

    let density = richardson(|t| cdf(alpha, gamma, t), xi, FD_REL_STEP * xi)?;
    if !(density > 1e-300) {
        return Err(Error::Instability {
            func: "sensitivity_vector",
            detail: format!("lifetime density at the quantile is {density:e}"),
        });
    }
    let d_alpha = richardson(|a| cdf(a, gamma, xi), alpha, FD_REL_STEP * alpha)?;
    let d_gamma = richardson(|g| cdf(alpha, g, xi), gamma, FD_REL_STEP * gamma.abs().max(1.0))?;
    Ok(SensitivityVector {
        h1: -d_alpha / density,
        h2: -d_gamma / density,
    })
}

/// Smallest inspection interval for which an increment exceeds the tool
/// resolution `a` with probability `b`.
pub fn choose_min_interval(params: &ProcessParams, a: f64, b: f64) -> Result<f64> {
    if !(a.is_finite() && a > 0.0) {
        return Err(Error::invalid("a", format!("must be finite and > 0, got {a}")));
    }
    if !(b > 0.0 && b < 1.0) {
        return Err(Error::invalid("b", format!("must lie in (0, 1), got {b}")));
    }
    crossing_time(params.alpha, params.beta(), a, b, "choose_min_interval")
}
