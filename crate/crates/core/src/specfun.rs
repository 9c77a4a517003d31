//! Special functions: log-gamma, polygamma of orders 0-2, the regularized
//! incomplete gamma function and its inverse, and the Ω function whose inverse
//! locates the interior V-optimal inspection interval.
//!
//! Polygamma values use the recurrence shift to `x >= 10` followed by the
//! asymptotic Bernoulli series. The incomplete gamma function uses the power
//! series below `x = a + 1` and a Lentz continued fraction above.

use crate::error::{Error, Result};
use crate::roots::{brent, expand_positive_bracket, RealInterval};

/// Shift threshold for the asymptotic polygamma series.
const ASYMPTOTIC_FROM: f64 = 10.0;

/// Bernoulli numbers B_2, B_4, ..., B_20.
const BERNOULLI: [f64; 10] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
];

/// Above this argument Ω is refused rather than evaluated.
pub const OMEGA_MAX_ARG: f64 = 1e12;

fn check_positive(func: &'static str, x: f64) -> Result<()> {
    if !(x.is_finite() && x > 0.0) {
        return Err(Error::domain(func, format!("argument must be finite and > 0, got {x}")));
    }
    Ok(())
}

// Lanczos approximation, g = 7, n = 9.
const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of the gamma function for `x > 0`.
pub fn ln_gamma(x: f64) -> Result<f64> {
    check_positive("ln_gamma", x)?;
    Ok(ln_gamma_unchecked(x))
}

fn ln_gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        // lnΓ(x) = lnΓ(x+1) - ln x keeps the Lanczos sum on x >= 0.5
        return ln_gamma_unchecked(x + 1.0) - x.ln();
    }
    let z = x - 1.0;
    let mut sum = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        sum += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (z + 0.5) * t.ln() - t + sum.ln()
}

/// Digamma ψ₀(x).
pub fn digamma(x: f64) -> Result<f64> {
    check_positive("digamma", x)?;
    let mut acc = 0.0;
    let mut z = x;
    while z < ASYMPTOTIC_FROM {
        acc -= 1.0 / z;
        z += 1.0;
    }
    let inv2 = 1.0 / (z * z);
    let mut pow = inv2;
    let mut series = 0.0;
    for (k, b) in BERNOULLI.iter().enumerate() {
        let two_k = 2.0 * (k as f64 + 1.0);
        series += b / two_k * pow;
        pow *= inv2;
    }
    Ok(acc + z.ln() - 0.5 / z - series)
}

/// Trigamma ψ₁(x) = Σ_{v≥0} 1/(x+v)².
pub fn trigamma(x: f64) -> Result<f64> {
    check_positive("trigamma", x)?;
    Ok(trigamma_unchecked(x))
}

fn trigamma_unchecked(x: f64) -> f64 {
    let mut acc = 0.0;
    let mut z = x;
    while z < ASYMPTOTIC_FROM {
        acc += 1.0 / (z * z);
        z += 1.0;
    }
    acc + trigamma_asymptotic(z)
}

fn trigamma_asymptotic(z: f64) -> f64 {
    let inv = 1.0 / z;
    let inv2 = inv * inv;
    // Σ B_2k / z^(2k+1), summed smallest first
    let mut series = 0.0;
    for k in (0..BERNOULLI.len()).rev() {
        series = series * inv2 + BERNOULLI[k];
    }
    series *= inv2 * inv;
    inv + 0.5 * inv2 + series
}

/// Tetragamma ψ₂(x) = −2 Σ_{v≥0} 1/(x+v)³.
pub fn tetragamma(x: f64) -> Result<f64> {
    check_positive("tetragamma", x)?;
    Ok(tetragamma_unchecked(x))
}

fn tetragamma_unchecked(x: f64) -> f64 {
    let mut acc = 0.0;
    let mut z = x;
    while z < ASYMPTOTIC_FROM {
        acc -= 2.0 / (z * z * z);
        z += 1.0;
    }
    let inv = 1.0 / z;
    let inv2 = inv * inv;
    let mut series = 0.0;
    for k in (0..BERNOULLI.len()).rev() {
        let coef = (2 * k + 3) as f64 * BERNOULLI[k];
        series = series * inv2 + coef;
    }
    series *= inv2 * inv2;
    acc - inv2 - inv2 * inv - series
}

/// x·ψ₁(x) − 1, which is positive for every x > 0.
///
/// Evaluated without the cancellation that the direct formula suffers for
/// both small and large `x`.
pub fn trigamma_excess(x: f64) -> Result<f64> {
    check_positive("trigamma_excess", x)?;
    Ok(shape_information_unchecked(x) / x)
}

/// Per-inspection shape information x²ψ₁(x) − x in scaled time `x = αΔt`.
///
/// Decreases from 1 (x → 0⁺) to 1/2 (x → ∞).
pub fn shape_information(x: f64) -> Result<f64> {
    check_positive("shape_information", x)?;
    Ok(shape_information_unchecked(x))
}

pub(crate) fn shape_information_unchecked(x: f64) -> f64 {
    if x < 1.0 {
        1.0 - x + x * x * trigamma_unchecked(x + 1.0)
    } else if x < ASYMPTOTIC_FROM {
        x * x * trigamma_unchecked(x) - x
    } else {
        // x(1/(2x) + Σ B_2k / x^2k)
        let inv2 = 1.0 / (x * x);
        let mut series = 0.0;
        for k in (0..BERNOULLI.len()).rev() {
            series = series * inv2 + BERNOULLI[k];
        }
        0.5 + series * inv2 * x
    }
}

/// d/dx [x²ψ₁(x) − x] = 2xψ₁(x) + x²ψ₂(x) − 1, negative for every x > 0.
pub fn shape_information_slope(x: f64) -> Result<f64> {
    check_positive("shape_information_slope", x)?;
    Ok(shape_information_slope_unchecked(x))
}

pub(crate) fn shape_information_slope_unchecked(x: f64) -> f64 {
    if x < 1.0 {
        2.0 * x * trigamma_unchecked(x + 1.0) + x * x * tetragamma_unchecked(x + 1.0) - 1.0
    } else if x < ASYMPTOTIC_FROM {
        2.0 * x * trigamma_unchecked(x) + x * x * tetragamma_unchecked(x) - 1.0
    } else {
        // Σ (1 - 2k) B_2k / x^2k
        let inv2 = 1.0 / (x * x);
        let mut series = 0.0;
        for k in (0..BERNOULLI.len()).rev() {
            let coef = (1.0 - 2.0 * (k as f64 + 1.0)) * BERNOULLI[k];
            series = series * inv2 + coef;
        }
        series * inv2
    }
}

/// Ω(x) = (2xψ₁(x) + x²ψ₂(x) − 1) / (xψ₁(x) − 1)², strictly decreasing from
/// 0 (x → 0⁺) to −2/3 (x → ∞).
pub fn omega(x: f64) -> Result<f64> {
    check_positive("omega", x)?;
    if x > OMEGA_MAX_ARG {
        return Err(Error::Instability {
            func: "omega",
            detail: format!("argument {x:e} exceeds {OMEGA_MAX_ARG:e}"),
        });
    }
    let info = shape_information_unchecked(x);
    // (xψ₁ − 1)² = info² / x²
    Ok(x * x * shape_information_slope_unchecked(x) / (info * info))
}

/// The unique `x > 0` with `omega(x) = y`, for `y` in (−2/3, 0).
pub fn omega_inverse(y: f64) -> Result<f64> {
    if !(y > -2.0 / 3.0 && y < 0.0) {
        return Err(Error::domain(
            "omega_inverse",
            format!("argument must lie in (-2/3, 0), got {y}"),
        ));
    }
    let mut lo = 1e-8;
    let mut guard = 0;
    while omega(lo)? < y {
        lo *= 0.5;
        guard += 1;
        if guard > 2000 {
            return Err(Error::NotBracketed {
                what: "omega_inverse",
                lo,
                hi: 1e-8,
            });
        }
    }
    let mut hi = 1.0;
    while omega(hi)? > y {
        hi *= 2.0;
        if hi > OMEGA_MAX_ARG {
            return Err(Error::Instability {
                func: "omega_inverse",
                detail: format!("{y} is too close to -2/3 to invert"),
            });
        }
    }
    let lo = lo.min(hi * 0.5);
    let u = brent(
        |u| omega(u.exp()).unwrap_or(f64::NAN) - y,
        RealInterval::new(lo.ln(), hi.ln())?,
        1e-13,
        "omega_inverse",
    )?;
    Ok(u.exp())
}

fn incgamma_iteration_cap(a: f64) -> usize {
    1000 + (40.0 * a.sqrt()) as usize
}

/// Regularized (P, Q) pair for a > 0, x ≥ 0.
fn incomplete_gamma_pair(a: f64, x: f64) -> Result<(f64, f64)> {
    if !(a.is_finite() && a > 0.0) {
        return Err(Error::domain("incomplete_gamma", format!("shape must be > 0, got {a}")));
    }
    if !(x >= 0.0) || x.is_nan() {
        return Err(Error::domain("incomplete_gamma", format!("x must be >= 0, got {x}")));
    }
    if x == 0.0 {
        return Ok((0.0, 1.0));
    }
    if x == f64::INFINITY {
        return Ok((1.0, 0.0));
    }
    let log_prefactor = a * x.ln() - x - ln_gamma_unchecked(a);
    let cap = incgamma_iteration_cap(a);

    if x < a + 1.0 {
        let mut term = 1.0 / a;
        let mut sum = term;
        let mut n = a;
        let mut converged = false;
        for _ in 0..cap {
            n += 1.0;
            term *= x / n;
            sum += term;
            if term.abs() < sum.abs() * f64::EPSILON {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NoConvergence {
                what: "incomplete gamma series",
                iterations: cap,
                last: sum,
                residual: term,
            });
        }
        let p = (log_prefactor.exp() * sum).min(1.0);
        Ok((p, 1.0 - p))
    } else {
        const TINY: f64 = 1e-300;
        let mut b = x + 1.0 - a;
        let mut c = 1.0 / TINY;
        let mut d = 1.0 / b;
        let mut h = d;
        let mut converged = false;
        for i in 1..=cap {
            let fi = i as f64;
            let an = -fi * (fi - a);
            b += 2.0;
            d = an * d + b;
            if d.abs() < TINY {
                d = TINY;
            }
            c = b + an / c;
            if c.abs() < TINY {
                c = TINY;
            }
            d = 1.0 / d;
            let delta = d * c;
            h *= delta;
            if (delta - 1.0).abs() < f64::EPSILON {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NoConvergence {
                what: "incomplete gamma continued fraction",
                iterations: cap,
                last: h,
                residual: f64::NAN,
            });
        }
        let q = (log_prefactor.exp() * h).min(1.0);
        Ok((1.0 - q, q))
    }
}

/// Regularized lower incomplete gamma P(a, x) = γ(a, x)/Γ(a).
pub fn reg_lower_gamma(a: f64, x: f64) -> Result<f64> {
    incomplete_gamma_pair(a, x).map(|(p, _)| p)
}

/// Regularized upper incomplete gamma Q(a, x) = 1 − P(a, x), computed
/// directly so that small tails keep their relative precision.
pub fn reg_upper_gamma(a: f64, x: f64) -> Result<f64> {
    incomplete_gamma_pair(a, x).map(|(_, q)| q)
}

/// The `x` with P(a, x) = q, for a > 0 and q in (0, 1).
pub fn inv_reg_lower_gamma(a: f64, q: f64) -> Result<f64> {
    if !(a.is_finite() && a > 0.0) {
        return Err(Error::domain(
            "inv_reg_lower_gamma",
            format!("shape must be > 0, got {a}"),
        ));
    }
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::domain(
            "inv_reg_lower_gamma",
            format!("probability must lie in (0, 1), got {q}"),
        ));
    }
    // residual oriented so that it increases with x; upper tail for q > 1/2
    let upper = q > 0.5;
    let target = if upper { 1.0 - q } else { q };
    let residual = |x: f64| -> f64 {
        match incomplete_gamma_pair(a, x) {
            Ok((p, qq)) => {
                if upper {
                    target - qq
                } else {
                    p - target
                }
            }
            Err(_) => f64::NAN,
        }
    };
    let bracket = expand_positive_bracket(residual, a.max(1e-3), true, "inv_reg_lower_gamma")?;
    brent(residual, bracket, bracket.lo * 1e-15, "inv_reg_lower_gamma")
}
