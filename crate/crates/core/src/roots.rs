//! Bracketed scalar root finding.
//!
//! Everything here works on a sign change: either a caller-supplied bracket
//! or the brackets found by scanning a grid. No derivative information is
//! used, which keeps the planners robust near case boundaries where the
//! stationarity equations become flat.

use crate::error::{Error, Result};

const MAX_ITER: usize = 300;

/// A closed interval `[lo, hi]` with `lo < hi`, both finite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealInterval {
    pub lo: f64,
    pub hi: f64,
}

impl RealInterval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() {
            return Err(Error::domain("RealInterval", "bounds must be finite"));
        }
        if lo >= hi {
            return Err(Error::domain("RealInterval", format!("lo ({lo}) must be < hi ({hi})")));
        }
        Ok(RealInterval { lo, hi })
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// `n` points spaced logarithmically from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            let step = (b - a) / (n - 1) as f64;
            let mut out: Vec<f64> = (0..n).map(|i| (a + step * i as f64).exp()).collect();
            // pin the end points exactly
            out[0] = lo;
            out[n - 1] = hi;
            out
        }
    }
}

/// `n` points spaced linearly from `lo` to `hi` inclusive.
pub fn linear_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let step = (hi - lo) / (n - 1) as f64;
            let mut out: Vec<f64> = (0..n).map(|i| lo + step * i as f64).collect();
            out[n - 1] = hi;
            out
        }
    }
}

/// Brent's method on a bracket with `f(lo)` and `f(hi)` of opposite sign.
///
/// Terminates when the bracket is narrower than `xtol + 4 eps |x|` or an
/// exact zero is hit.
pub fn brent<F>(mut f: F, bracket: RealInterval, xtol: f64, what: &'static str) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let (mut a, mut b) = (bracket.lo, bracket.hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa.is_nan() || fb.is_nan() {
        return Err(Error::Instability {
            func: what,
            detail: "function is NaN at a bracket end".into(),
        });
    }
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::NotBracketed { what, lo: a, hi: b });
    }

    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..MAX_ITER {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol;
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b);
        if fb.is_nan() {
            return Err(Error::Instability {
                func: what,
                detail: format!("function is NaN at {b}"),
            });
        }
    }
    Err(Error::NoConvergence {
        what,
        iterations: MAX_ITER,
        last: b,
        residual: fb,
    })
}

/// Plain bisection; slower than [`brent`] but with a guaranteed halving per step.
pub fn bisect<F>(mut f: F, bracket: RealInterval, xtol: f64, what: &'static str) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let (mut lo, mut hi) = (bracket.lo, bracket.hi);
    let flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.is_nan() || fhi.is_nan() || flo.signum() == fhi.signum() {
        return Err(Error::NotBracketed { what, lo, hi });
    }
    let lo_negative = flo < 0.0;
    for _ in 0..MAX_ITER {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= xtol || mid <= lo || mid >= hi {
            return Ok(mid);
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if (fm < 0.0) == lo_negative {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Every root of `f` on `grid`: each adjacent pair with a strict sign change is
/// refined with Brent; exact zeros on grid points are reported as roots.
/// Pairs where `f` is not finite are skipped.
pub fn scan_roots<F>(mut f: F, grid: &[f64], rel_xtol: f64, what: &'static str) -> Vec<f64>
where
    F: FnMut(f64) -> f64,
{
    let values: Vec<f64> = grid.iter().map(|&x| f(x)).collect();
    let mut roots = Vec::new();
    for i in 0..grid.len() {
        if values[i] == 0.0 {
            roots.push(grid[i]);
            continue;
        }
        if i + 1 == grid.len() {
            break;
        }
        let (fa, fb) = (values[i], values[i + 1]);
        if !fa.is_finite() || !fb.is_finite() || fb == 0.0 {
            continue;
        }
        if fa.signum() != fb.signum() {
            let bracket = RealInterval {
                lo: grid[i],
                hi: grid[i + 1],
            };
            let tol = rel_xtol * grid[i + 1].abs();
            if let Ok(r) = brent(&mut f, bracket, tol, what) {
                roots.push(r);
            }
        }
    }
    roots
}

/// Expand `[lo, hi]` geometrically (positive axis) until `f` changes sign.
///
/// `increasing` tells the direction of monotonicity: for an increasing `f`
/// the lower end moves down while `f(lo) > 0`, the upper end up while `f(hi) < 0`.
pub fn expand_positive_bracket<F>(mut f: F, start: f64, increasing: bool, what: &'static str) -> Result<RealInterval>
where
    F: FnMut(f64) -> f64,
{
    let sign = if increasing { 1.0 } else { -1.0 };
    let mut lo = start;
    let mut hi = start;
    let mut flo = sign * f(lo);
    let mut fhi = flo;
    let mut steps = 0;
    while flo > 0.0 {
        lo *= 0.5;
        flo = sign * f(lo);
        steps += 1;
        if steps > 2000 || lo < f64::MIN_POSITIVE || flo.is_nan() {
            return Err(Error::NotBracketed { what, lo, hi: start });
        }
    }
    steps = 0;
    while fhi < 0.0 {
        hi *= 2.0;
        fhi = sign * f(hi);
        steps += 1;
        if steps > 2000 || !hi.is_finite() || fhi.is_nan() {
            return Err(Error::NotBracketed { what, lo: start, hi });
        }
    }
    if lo == hi {
        // f(start) == 0 exactly
        return Ok(RealInterval {
            lo: start * 0.5,
            hi: start * 2.0,
        });
    }
    Ok(RealInterval { lo, hi })
}
