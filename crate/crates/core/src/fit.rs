//! Likelihood, maximum-likelihood fit and simulation of degradation paths.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};
use serde::Serialize;

use crate::criteria::{fisher_information, Design};
use crate::error::{Error, Result};
use crate::lifetime::ProcessParams;
use crate::roots::{brent, RealInterval};
use crate::specfun::{digamma, ln_gamma};

const ALPHA_LO: f64 = 1e-8;
const MAX_DOUBLINGS: usize = 200;

/// Cumulative measurements of one unit; the path starts at zero at time zero.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnitPath {
    pub id: String,
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

/// A set of unit paths.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegradationDataset {
    pub units: Vec<UnitPath>,
}

/// One increment of one unit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Increment<'a> {
    pub unit: &'a str,
    pub time: f64,
    pub dt: f64,
    pub dz: f64,
}

impl DegradationDataset {
    /// Validate and wrap unit paths.
    pub fn new(units: Vec<UnitPath>) -> Result<Self> {
        if units.is_empty() {
            return Err(Error::Dataset("no units".into()));
        }
        for u in &units {
            if u.times.is_empty() {
                return Err(Error::Dataset(format!("unit `{}` has no measurements", u.id)));
            }
            if u.times.len() != u.values.len() {
                return Err(Error::Dataset(format!(
                    "unit `{}` has mismatched times and values",
                    u.id
                )));
            }
            let (mut t0, mut z0) = (0.0, 0.0);
            for (&t, &z) in u.times.iter().zip(&u.values) {
                if !(t.is_finite() && t > t0) {
                    return Err(Error::Dataset(format!(
                        "unit `{}`: time {t} is not after the previous time {t0}",
                        u.id
                    )));
                }
                if !(z.is_finite() && z >= z0) {
                    return Err(Error::Dataset(format!(
                        "unit `{}`: value {z} at time {t} is below the previous value {z0}",
                        u.id
                    )));
                }
                t0 = t;
                z0 = z;
            }
        }
        Ok(DegradationDataset { units })
    }

    pub fn increments(&self) -> impl Iterator<Item = Increment<'_>> {
        self.units.iter().flat_map(|u| {
            let mut prev = (0.0, 0.0);
            u.times.iter().zip(&u.values).map(move |(&t, &z)| {
                let inc = Increment {
                    unit: &u.id,
                    time: t,
                    dt: t - prev.0,
                    dz: z - prev.1,
                };
                prev = (t, z);
                inc
            })
        })
    }

    /// Per-unit inspection intervals.
    pub fn intervals(&self) -> Vec<Vec<f64>> {
        self.units
            .iter()
            .map(|u| {
                let mut prev = 0.0;
                u.times
                    .iter()
                    .map(|&t| {
                        let d = t - prev;
                        prev = t;
                        d
                    })
                    .collect()
            })
            .collect()
    }

    fn positive_increments(&self) -> Result<Vec<(f64, f64)>> {
        self.increments()
            .map(|i| {
                if i.dz > 0.0 {
                    Ok((i.dt, i.dz))
                } else {
                    Err(Error::ZeroIncrement {
                        unit: i.unit.to_string(),
                        time: i.time,
                    })
                }
            })
            .collect()
    }
}

/// Log-likelihood of the gamma-increment model.
pub fn log_likelihood(params: &ProcessParams, data: &DegradationDataset) -> Result<f64> {
    let (a, b) = (params.alpha, params.beta());
    let lb = b.ln();
    let mut sum = 0.0;
    for (dt, dz) in data.positive_increments()? {
        let s = a * dt;
        sum += s * lb - ln_gamma(s)? + (s - 1.0) * dz.ln() - b * dz;
    }
    Ok(sum)
}

/// Gradient of [`log_likelihood`] in `(alpha, gamma)`.
pub fn score(params: &ProcessParams, data: &DegradationDataset) -> Result<(f64, f64)> {
    let (a, g) = (params.alpha, params.gamma);
    let lb = params.beta().ln();
    let eg = (-g).exp();
    let (mut sa, mut sum_dt, mut sum_dz) = (0.0, 0.0, 0.0);
    for (dt, dz) in data.positive_increments()? {
        sa += dt * (lb + 1.0 - digamma(a * dt)? + dz.ln()) - eg * dz;
        sum_dt += dt;
        sum_dz += dz;
    }
    Ok((sa, a * (eg * sum_dz - sum_dt)))
}

/// Diagnostics of [`mle_fit`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitReport {
    /// Bracket on which the profile score changed sign.
    pub bracket: (f64, f64),
    /// Score at the estimate.
    pub score: (f64, f64),
    pub increments: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MleFit {
    pub params: ProcessParams,
    /// Inverse Fisher information at the estimate and the observed inspection times.
    pub covariance: [[f64; 2]; 2],
    pub log_likelihood: f64,
    pub report: FitReport,
}

/// Maximum-likelihood estimate of `(alpha, gamma)`.
///
/// `gamma` has the closed form `ln(sum dz / sum dt)`; `alpha` solves the
/// profile score `sum dt [ln alpha - psi0(alpha dt) + ln dz - gamma] = 0`.
pub fn mle_fit(data: &DegradationDataset) -> Result<MleFit> {
    let incs = data.positive_increments()?;
    if incs.len() < 2 {
        return Err(Error::Dataset(format!(
            "need at least 2 increments, got {}",
            incs.len()
        )));
    }
    let sum_dt: f64 = incs.iter().map(|x| x.0).sum();
    let sum_dz: f64 = incs.iter().map(|x| x.1).sum();
    let gamma = (sum_dz / sum_dt).ln();
    // Jensen gap of the log rates; zero when every increment has the same rate
    let gap: f64 = incs.iter().map(|&(dt, dz)| dt * (gamma - (dz / dt).ln())).sum();
    if gap <= 1e-12 * sum_dt {
        return Err(Error::NoConvergence {
            what: "mle_fit",
            iterations: 0,
            last: f64::INFINITY,
            residual: gap,
        });
    }
    let profile = |a: f64| -> f64 {
        incs.iter()
            .map(|&(dt, dz)| dt * (a.ln() - digamma(a * dt).unwrap_or(f64::NAN) + dz.ln() - gamma))
            .sum()
    };
    let mut hi = 1.0;
    let mut doublings = 0;
    while profile(hi) > 0.0 {
        hi *= 2.0;
        doublings += 1;
        if doublings > MAX_DOUBLINGS {
            return Err(Error::NoConvergence {
                what: "mle_fit",
                iterations: doublings,
                last: hi,
                residual: profile(hi),
            });
        }
    }
    let bracket = RealInterval::new(ALPHA_LO, hi)?;
    let alpha = brent(profile, bracket, 1e-15 * hi, "mle_fit")?;
    let params = ProcessParams::new(alpha, gamma)?;

    let mut aa = 0.0;
    let mut gg = 0.0;
    for iv in data.intervals() {
        let fi = fisher_information(&params, &Design::aperiodic(1.0, iv)?)?;
        aa += fi.alpha_alpha;
        gg += fi.gamma_gamma;
    }
    Ok(MleFit {
        params,
        covariance: [[1.0 / aa, 0.0], [0.0, 1.0 / gg]],
        log_likelihood: log_likelihood(&params, data)?,
        report: FitReport {
            bracket: (bracket.lo, bracket.hi),
            score: score(&params, data)?,
            increments: incs.len(),
        },
    })
}

/// Simulate `n` units inspected at `times`; unit `i` uses stream `i` of the seed.
pub fn simulate(params: &ProcessParams, n: usize, times: &[f64], seed: u64) -> Result<DegradationDataset> {
    if n == 0 {
        return Err(Error::invalid("n", "must be at least 1"));
    }
    if times.is_empty() {
        return Err(Error::invalid("times", "at least one inspection time is required"));
    }
    let mut prev = 0.0;
    let mut gammas = Vec::with_capacity(times.len());
    for &t in times {
        if !(t.is_finite() && t > prev) {
            return Err(Error::invalid(
                "times",
                format!("must be positive and strictly increasing, got {t} after {prev}"),
            ));
        }
        let shape = params.alpha * (t - prev);
        let g = Gamma::new(shape, 1.0 / params.beta())
            .map_err(|e| Error::invalid("times", format!("gamma({shape}) increment: {e}")))?;
        gammas.push(g);
        prev = t;
    }
    let units = (0..n)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let mut z = 0.0;
            let values = gammas
                .iter()
                .map(|g| {
                    z += g.sample(&mut rng);
                    z
                })
                .collect();
            UnitPath {
                id: (i + 1).to_string(),
                times: times.to_vec(),
                values,
            }
        })
        .collect();
    Ok(DegradationDataset { units })
}
