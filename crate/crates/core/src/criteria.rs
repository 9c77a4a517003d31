//! Designs, Fisher information and the D/A/V objectives.
//!
//! With `n` units inspected at intervals `dt_1..dt_m` over `T = sum dt_j` the
//! Fisher information of `(alpha, gamma)` is `n diag(J, alpha T)` with
//! `J = sum dt_j^2 psi1(alpha dt_j) - T/alpha = alpha^-2 sum g(alpha dt_j)`,
//! where `g(x) = x^2 psi1(x) - x` is [`shape_information`](crate::specfun::shape_information).
//! All objectives are expressed for a budget normalized to 1.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lifetime::{sensitivity_vector, LifetimeSpec, ProcessParams, SensitivityVector};
use crate::specfun::{shape_information_slope_unchecked as slope, shape_information_unchecked as info};

/// Slack allowed on `n >= 1`, `m >= 1` and similar bounds.
pub const BOUND_SLACK: f64 = 1e-9;

/// How the test time is split into inspection intervals.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Schedule {
    /// `m` equal intervals of length `tau`; `m` may be fractional.
    Periodic { tau: f64 },
    /// One interval of length `T - (m-1) dt` followed by `m - 1` intervals of
    /// length `dt`; `m` may be fractional.
    LongThenMinimal { total: f64, dt: f64 },
    /// Explicit interval lengths; `m` equals their count.
    Aperiodic { intervals: Vec<f64> },
}

/// A degradation test: `n` units each inspected `m` times.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Design {
    pub n: f64,
    pub m: f64,
    pub schedule: Schedule,
}

fn check_count(field: &'static str, v: f64) -> Result<()> {
    if !(v.is_finite() && v >= 1.0 - BOUND_SLACK) {
        return Err(Error::invalid(field, format!("must be finite and >= 1, got {v}")));
    }
    Ok(())
}

fn check_length(field: &'static str, v: f64) -> Result<()> {
    if !(v.is_finite() && v > 0.0) {
        return Err(Error::invalid(field, format!("must be finite and > 0, got {v}")));
    }
    Ok(())
}

impl Design {
    pub fn periodic(n: f64, m: f64, tau: f64) -> Result<Self> {
        check_count("n", n)?;
        check_count("m", m)?;
        check_length("tau", tau)?;
        Ok(Design {
            n,
            m,
            schedule: Schedule::Periodic { tau },
        })
    }

    /// The schedule with one long interval first and all others at `dt`.
    pub fn long_then_minimal(n: f64, m: f64, total: f64, dt: f64) -> Result<Self> {
        check_count("n", n)?;
        check_count("m", m)?;
        check_length("T", total)?;
        check_length("dt", dt)?;
        if total - (m - 1.0) * dt <= 0.0 {
            return Err(Error::Infeasible(format!(
                "T = {total} leaves no room for {m} inspections at minimum interval {dt}"
            )));
        }
        Ok(Design {
            n,
            m,
            schedule: Schedule::LongThenMinimal { total, dt },
        })
    }

    pub fn aperiodic(n: f64, intervals: Vec<f64>) -> Result<Self> {
        check_count("n", n)?;
        if intervals.is_empty() {
            return Err(Error::invalid("intervals", "at least one interval is required"));
        }
        for &d in &intervals {
            check_length("intervals", d)?;
        }
        let m = intervals.len() as f64;
        Ok(Design {
            n,
            m,
            schedule: Schedule::Aperiodic { intervals },
        })
    }

    /// Total test time.
    pub fn total_time(&self) -> f64 {
        match &self.schedule {
            Schedule::Periodic { tau } => self.m * tau,
            Schedule::LongThenMinimal { total, .. } => *total,
            Schedule::Aperiodic { intervals } => intervals.iter().sum(),
        }
    }

    /// Smallest interval in the schedule.
    pub fn min_interval(&self) -> f64 {
        match &self.schedule {
            Schedule::Periodic { tau } => *tau,
            Schedule::LongThenMinimal { total, dt } => {
                if self.m > 1.0 {
                    dt.min(total - (self.m - 1.0) * dt)
                } else {
                    *total
                }
            }
            Schedule::Aperiodic { intervals } => intervals.iter().copied().fold(f64::INFINITY, f64::min),
        }
    }

    /// Concrete interval lengths, or `None` when `m` is fractional.
    pub fn intervals(&self) -> Option<Vec<f64>> {
        let whole = |m: f64| (m.round() - m).abs() <= BOUND_SLACK && m.round() >= 1.0;
        match &self.schedule {
            Schedule::Aperiodic { intervals } => Some(intervals.clone()),
            Schedule::Periodic { tau } if whole(self.m) => Some(vec![*tau; self.m.round() as usize]),
            Schedule::LongThenMinimal { total, dt } if whole(self.m) => {
                let k = self.m.round() as usize;
                let mut v = vec![*dt; k];
                v[0] = total - (k as f64 - 1.0) * dt;
                Some(v)
            }
            _ => None,
        }
    }

    /// `J`, the per-unit information about `alpha`.
    pub fn shape_information(&self, alpha: f64) -> f64 {
        let a2 = alpha * alpha;
        match &self.schedule {
            Schedule::Periodic { tau } => self.m * info(alpha * tau) / a2,
            Schedule::LongThenMinimal { total, dt } => {
                let long = total - (self.m - 1.0) * dt;
                ((self.m - 1.0) * info(alpha * dt) + info(alpha * long)) / a2
            }
            Schedule::Aperiodic { intervals } => intervals.iter().map(|&d| info(alpha * d)).sum::<f64>() / a2,
        }
    }
}

/// Optimality criterion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum CriterionKind {
    D,
    A,
    V,
}

impl std::str::FromStr for CriterionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "D" => Ok(CriterionKind::D),
            "A" => Ok(CriterionKind::A),
            "V" => Ok(CriterionKind::V),
            _ => Err(Error::invalid("criterion", format!("expected D, A or V, got `{s}`"))),
        }
    }
}

impl std::fmt::Display for CriterionKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            CriterionKind::D => "D",
            CriterionKind::A => "A",
            CriterionKind::V => "V",
        };
        f.write_str(s)
    }
}

/// A criterion together with the lifetime spec that V-optimality needs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Criterion {
    pub kind: CriterionKind,
    pub lifetime: Option<LifetimeSpec>,
}

impl Criterion {
    pub fn d() -> Self {
        Criterion {
            kind: CriterionKind::D,
            lifetime: None,
        }
    }

    pub fn a() -> Self {
        Criterion {
            kind: CriterionKind::A,
            lifetime: None,
        }
    }

    pub fn v(spec: LifetimeSpec) -> Self {
        Criterion {
            kind: CriterionKind::V,
            lifetime: Some(spec),
        }
    }

    pub fn new(kind: CriterionKind, lifetime: Option<LifetimeSpec>) -> Result<Self> {
        match (kind, lifetime) {
            (CriterionKind::V, None) => Err(Error::invalid(
                "criterion",
                "V-optimality needs a lifetime spec (eta and p)",
            )),
            (CriterionKind::V, spec) => Ok(Criterion { kind, lifetime: spec }),
            _ => Ok(Criterion { kind, lifetime: None }),
        }
    }

    /// Fix the weights for the given parameters.
    pub fn resolve(&self, params: &ProcessParams) -> Result<Resolved> {
        match self.kind {
            CriterionKind::D => Ok(Resolved::D),
            CriterionKind::A => Ok(Resolved::Linear { w1: 1.0, w2: 1.0 }),
            CriterionKind::V => {
                let spec = self
                    .lifetime
                    .ok_or_else(|| Error::invalid("criterion", "V-optimality needs a lifetime spec (eta and p)"))?;
                Ok(Resolved::from_sensitivity(sensitivity_vector(params, &spec)?))
            }
        }
    }
}

/// A criterion with its weights evaluated, ready for repeated use.
///
/// A-optimality is the linear form with unit weights; V-optimality uses
/// `(h1^2, h2^2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Resolved {
    D,
    Linear { w1: f64, w2: f64 },
}

impl Resolved {
    pub fn from_sensitivity(h: SensitivityVector) -> Self {
        Resolved::Linear {
            w1: h.h1 * h.h1,
            w2: h.h2 * h.h2,
        }
    }

    /// Objective value from the per-unit informations `j = J` and `k = alpha T`.
    fn value(&self, n: f64, j: f64, k: f64) -> f64 {
        match *self {
            Resolved::D => 1.0 / (n * n * j * k),
            Resolved::Linear { w1, w2 } => (w1 / j + w2 / k) / n,
        }
    }

    /// Objective of `design`.
    pub fn objective(&self, params: &ProcessParams, design: &Design) -> Result<f64> {
        let fi = fisher_information(params, design)?;
        Ok(self.value(design.n, fi.alpha_alpha / design.n, fi.gamma_gamma / design.n))
    }

    /// `d/dtau` of `log rho(tau)` for a periodic design (halved for D).
    pub fn phi_tau(&self, alpha: f64, tau: f64) -> f64 {
        let x = alpha * tau;
        let (g, b) = (info(x), slope(x));
        match *self {
            Resolved::D => 0.5 * (1.0 / tau + alpha * b / g),
            Resolved::Linear { w1, w2 } => {
                let j = g / (alpha * alpha);
                let dj = b / alpha;
                let u = w1 / j + w2 / x;
                (w1 * dj / (j * j) + w2 / (x * tau)) / u
            }
        }
    }

    /// `rho(m, T)` for the long-then-minimal schedule.
    pub fn varrho_type2(&self, alpha: f64, m: f64, total: f64, dt: f64) -> f64 {
        let j = type2_j(alpha, m, total, dt);
        let k = alpha * total;
        match *self {
            Resolved::D => j * k,
            Resolved::Linear { w1, w2 } => 1.0 / (w1 / j + w2 / k),
        }
    }

    /// Partial log-derivatives `(phi_m, phi_T)` of `rho(m, T)` (halved for D).
    pub fn phi_m_phi_t(&self, alpha: f64, m: f64, total: f64, dt: f64) -> (f64, f64) {
        let long = total - (m - 1.0) * dt;
        let j = type2_j(alpha, m, total, dt);
        let b = slope(alpha * long);
        let jm = (info(alpha * dt) - alpha * dt * b) / (alpha * alpha);
        let jt = b / alpha;
        match *self {
            Resolved::D => (0.5 * jm / j, 0.5 * (1.0 / total + jt / j)),
            Resolved::Linear { w1, w2 } => {
                let u = w1 / j + w2 / (alpha * total);
                let pm = w1 * jm / (j * j) / u;
                let pt = (w1 * jt / (j * j) + w2 / (alpha * total * total)) / u;
                (pm, pt)
            }
        }
    }

    /// Power of `n` in the objective: 2 for D, 1 otherwise.
    pub fn n_power(&self) -> i32 {
        match self {
            Resolved::D => 2,
            Resolved::Linear { .. } => 1,
        }
    }
}

fn type2_j(alpha: f64, m: f64, total: f64, dt: f64) -> f64 {
    let long = total - (m - 1.0) * dt;
    ((m - 1.0) * info(alpha * dt) + info(alpha * long)) / (alpha * alpha)
}

fn check_type2(m: f64, total: f64, dt: f64) -> Result<()> {
    check_count("m", m)?;
    check_length("T", total)?;
    check_length("dt", dt)?;
    if total < m * dt * (1.0 - BOUND_SLACK) {
        return Err(Error::Infeasible(format!(
            "T = {total} is shorter than m * dt = {}",
            m * dt
        )));
    }
    Ok(())
}

/// Diagonal Fisher information of `(alpha, gamma)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FisherInformation {
    pub alpha_alpha: f64,
    pub gamma_gamma: f64,
}

impl FisherInformation {
    /// Full symmetric matrix; the off-diagonal terms vanish identically.
    pub fn matrix(&self) -> [[f64; 2]; 2] {
        [[self.alpha_alpha, 0.0], [0.0, self.gamma_gamma]]
    }

    /// Asymptotic variances `(Var alpha, Var gamma)`.
    pub fn variances(&self) -> (f64, f64) {
        (1.0 / self.alpha_alpha, 1.0 / self.gamma_gamma)
    }
}

pub fn fisher_information(params: &ProcessParams, design: &Design) -> Result<FisherInformation> {
    let j = design.shape_information(params.alpha);
    let t = design.total_time();
    if !(j.is_finite() && j > 0.0) {
        return Err(Error::SingularInformation(format!("alpha-alpha entry is {j:e}")));
    }
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::SingularInformation(format!("total time is {t:e}")));
    }
    Ok(FisherInformation {
        alpha_alpha: design.n * j,
        gamma_gamma: design.n * params.alpha * t,
    })
}

/// D: `det(I^-1)`; A: `tr(I^-1)`; V: `h' I^-1 h`.
pub fn objective(params: &ProcessParams, criterion: &Criterion, design: &Design) -> Result<f64> {
    criterion.resolve(params)?.objective(params, design)
}

/// Log-derivative of the periodic-design objective kernel in `tau`.
pub fn phi_tau(params: &ProcessParams, criterion: &Criterion, tau: f64) -> Result<f64> {
    check_length("tau", tau)?;
    Ok(criterion.resolve(params)?.phi_tau(params.alpha, tau))
}

/// `rho(m, T)` under the long-then-minimal schedule.
pub fn varrho_type2(params: &ProcessParams, criterion: &Criterion, m: f64, total: f64, dt: f64) -> Result<f64> {
    check_type2(m, total, dt)?;
    Ok(criterion.resolve(params)?.varrho_type2(params.alpha, m, total, dt))
}

/// `(phi_m, phi_T)` under the long-then-minimal schedule.
pub fn phi_m_phi_t(params: &ProcessParams, criterion: &Criterion, m: f64, total: f64, dt: f64) -> Result<(f64, f64)> {
    check_type2(m, total, dt)?;
    Ok(criterion.resolve(params)?.phi_m_phi_t(params.alpha, m, total, dt))
}

/// Linear test cost with the budget normalized to 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CostModel {
    pub c_it: f64,
    pub c_mea: f64,
    pub c_op: f64,
    pub min_interval: f64,
}

/// The three breakpoints of the cost geometry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CostIndices {
    pub tau_lower: f64,
    pub tau_upper: f64,
    pub tau_max: f64,
}

/// Which boundary function the piecewise `K(tau)` follows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum KRegion {
    /// `tau <= tau_lower`, `K = K1`.
    Lower,
    /// `tau_lower < tau <= tau_upper`, `K = K3`.
    Middle,
    /// `tau > tau_upper`, `K = K2`.
    Upper,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KBoundaries {
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub k: f64,
    pub region: KRegion,
}

impl CostModel {
    /// Costs per unit of budget. `c_mea` may be zero; everything else must be positive.
    pub fn new(c_it: f64, c_mea: f64, c_op: f64, min_interval: f64) -> Result<Self> {
        check_length("c_it", c_it)?;
        if !(c_mea.is_finite() && c_mea >= 0.0) {
            return Err(Error::invalid("c_mea", format!("must be finite and >= 0, got {c_mea}")));
        }
        check_length("c_op", c_op)?;
        check_length("dt", min_interval)?;
        let c = CostModel {
            c_it,
            c_mea,
            c_op,
            min_interval,
        };
        let least = c.total_cost(1.0, 1.0, min_interval);
        if least > 1.0 + BOUND_SLACK {
            return Err(Error::Infeasible(format!(
                "one unit inspected once after the minimum interval costs {least} > 1"
            )));
        }
        Ok(c)
    }

    /// Costs for an absolute budget, rescaled to the unit budget.
    pub fn with_budget(c_it: f64, c_mea: f64, c_op: f64, min_interval: f64, budget: f64) -> Result<Self> {
        check_length("budget", budget)?;
        CostModel::new(c_it / budget, c_mea / budget, c_op / budget, min_interval)
    }

    /// `n C_it + n m C_mea + T C_op`.
    pub fn total_cost(&self, n: f64, m: f64, total: f64) -> f64 {
        n * self.c_it + n * m * self.c_mea + total * self.c_op
    }

    /// Units affordable with `m` inspections over `total`.
    pub fn units_for(&self, m: f64, total: f64) -> f64 {
        (1.0 - self.c_op * total) / (self.c_it + self.c_mea * m)
    }

    pub fn indices(&self) -> CostIndices {
        let (ci, cm, co) = (self.c_it, self.c_mea, self.c_op);
        CostIndices {
            tau_lower: ci * cm / (co * (1.0 - 2.0 * ci)),
            tau_upper: ci / (co * (cm + 2.0 * ci)),
            tau_max: (1.0 - ci - cm) / co,
        }
    }

    /// `true` when the piecewise `K(tau)` is defined.
    pub fn has_piecewise_k(&self) -> bool {
        1.0 - 2.0 * self.c_it - self.c_mea > 0.0
    }

    pub fn k1(&self, tau: f64) -> f64 {
        1.0 / (self.c_mea / self.c_op + tau)
    }

    pub fn k2(&self, tau: f64) -> f64 {
        1.0 / (1.0 / self.c_op - tau)
    }

    pub fn k3(&self, tau: f64) -> f64 {
        1.0 / (tau * (1.0 + self.c_mea / (self.c_op * self.c_it * tau)).sqrt())
    }
}

/// `K1`, `K2`, `K3` and the piecewise `K(tau)`.
pub fn k_boundaries(cost: &CostModel, tau: f64) -> Result<KBoundaries> {
    let idx = cost.indices();
    if !(tau > 0.0 && tau <= idx.tau_max * (1.0 + BOUND_SLACK)) {
        return Err(Error::domain(
            "k_boundaries",
            format!("tau must lie in (0, {}], got {tau}", idx.tau_max),
        ));
    }
    if !cost.has_piecewise_k() {
        return Err(Error::domain(
            "k_boundaries",
            "piecewise K needs 1 - 2 c_it - c_mea > 0; only K1 applies",
        ));
    }
    let (k1, k2, k3) = (cost.k1(tau), cost.k2(tau), cost.k3(tau));
    let (k, region) = if tau <= idx.tau_lower {
        (k1, KRegion::Lower)
    } else if tau <= idx.tau_upper {
        (k3, KRegion::Middle)
    } else {
        (k2, KRegion::Upper)
    };
    Ok(KBoundaries { k1, k2, k3, k, region })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::trigamma;
    use proptest::prelude::*;

    fn ex1_cost() -> CostModel {
        CostModel::new(0.03, 0.0019, 0.0027, 5.0).unwrap()
    }

    fn ex1_params() -> ProcessParams {
        ProcessParams::new(0.065, -0.77).unwrap()
    }

    fn v_crit() -> Criterion {
        Criterion::v(LifetimeSpec::new(0.5, 0.1).unwrap())
    }

    /// Log of the periodic-design kernel written with trigamma directly.
    fn log_rho_direct(alpha: f64, r: &Resolved, tau: f64) -> f64 {
        let s = tau * tau * trigamma(alpha * tau).unwrap() - tau / alpha;
        match *r {
            Resolved::D => 0.5 * (alpha * tau * s).ln(),
            Resolved::Linear { w1, w2 } => -(w1 / s + w2 / (alpha * tau)).ln(),
        }
    }

    fn fd<F: Fn(f64) -> f64>(f: F, x: f64) -> f64 {
        let h = 1e-4 * x;
        let d = |s: f64| (f(x + s) - f(x - s)) / (2.0 * s);
        (4.0 * d(0.5 * h) - d(h)) / 3.0
    }

    #[test]
    fn fisher_scales_and_matches_sum() {
        let p = ProcessParams::new(0.028, -2.073).unwrap();
        let d1 = Design::periodic(12.0, 5.0, 50.0).unwrap();
        let d2 = Design::periodic(24.0, 5.0, 50.0).unwrap();
        let d3 = Design::aperiodic(12.0, vec![50.0; 5]).unwrap();
        let f1 = fisher_information(&p, &d1).unwrap();
        let f2 = fisher_information(&p, &d2).unwrap();
        let f3 = fisher_information(&p, &d3).unwrap();
        assert!((f2.alpha_alpha - 2.0 * f1.alpha_alpha).abs() <= 1e-12 * f2.alpha_alpha);
        assert_eq!(f2.gamma_gamma, 2.0 * f1.gamma_gamma);
        assert!((f3.alpha_alpha - f1.alpha_alpha).abs() <= 1e-12 * f1.alpha_alpha);
        // direct trigamma form
        let direct = 12.0 * (5.0 * 2500.0 * trigamma(0.028 * 50.0).unwrap() - 250.0 / 0.028);
        assert!((f1.alpha_alpha - direct).abs() <= 1e-10 * direct);
        assert_eq!(f1.matrix()[0][1], 0.0);
        let (va, vg) = f1.variances();
        assert!((va / 2.18e-5 - 1.0).abs() < 0.02, "{va}");
        assert!((vg / 1.18e-2 - 1.0).abs() < 0.02, "{vg}");
    }

    #[test]
    fn objective_scaling_in_n() {
        let p = ex1_params();
        for c in [Criterion::d(), Criterion::a(), v_crit()] {
            let r = c.resolve(&p).unwrap();
            let a = r.objective(&p, &Design::periodic(3.0, 7.0, 11.0).unwrap()).unwrap();
            let b = r.objective(&p, &Design::periodic(6.0, 7.0, 11.0).unwrap()).unwrap();
            let k = 2f64.powi(r.n_power());
            assert!((a / b - k).abs() <= 1e-12 * k);
        }
    }

    #[test]
    fn a_is_v_with_unit_weights() {
        let p = ex1_params();
        let d = Design::periodic(10.0, 20.0, 5.7).unwrap();
        let a = objective(&p, &Criterion::a(), &d).unwrap();
        let v = Resolved::from_sensitivity(SensitivityVector { h1: 1.0, h2: 1.0 })
            .objective(&p, &d)
            .unwrap();
        assert_eq!(a, v);
    }

    #[test]
    fn example1_v_design_value() {
        let p = ex1_params();
        let d = Design::periodic(10.2, 19.9, 113.7 / 19.9).unwrap();
        let v = objective(&p, &v_crit(), &d).unwrap();
        assert!((v / 2.47e-3 - 1.0).abs() < 0.01, "{v}");
    }

    #[test]
    fn phi_tau_matches_fd() {
        let p = ex1_params();
        let mut rng = 0x2545_f491_4f6c_dd1du64;
        for c in [Criterion::d(), Criterion::a(), v_crit()] {
            let r = c.resolve(&p).unwrap();
            for _ in 0..100 {
                // xorshift for a spread of tau values
                rng ^= rng << 13;
                rng ^= rng >> 7;
                rng ^= rng << 17;
                let u = (rng >> 11) as f64 / (1u64 << 53) as f64;
                let tau = 10f64.powf(-2.0 + 5.0 * u);
                let an = r.phi_tau(p.alpha, tau);
                let num = fd(|t| log_rho_direct(p.alpha, &r, t), tau);
                assert!(
                    (an - num).abs() <= 1e-6 * an.abs().max(1e-300),
                    "{c:?} tau={tau}: {an} vs {num}"
                );
            }
        }
    }

    #[test]
    fn phi_d_positive() {
        let p = ex1_params();
        for tau in crate::roots::log_grid(1e-3, 1e5, 400) {
            assert!(Resolved::D.phi_tau(p.alpha, tau) > 0.0);
        }
    }

    #[test]
    fn cost_indices_example1() {
        let i = ex1_cost().indices();
        assert!((i.tau_lower / 0.02246 - 1.0).abs() < 1e-3);
        assert!((i.tau_upper / 179.5 - 1.0).abs() < 1e-3);
        assert!((i.tau_max / 358.6 - 1.0).abs() < 1e-3);
    }

    #[test]
    fn k_is_continuous() {
        let c = ex1_cost();
        let i = c.indices();
        for x in [i.tau_lower, i.tau_upper] {
            let left = k_boundaries(&c, x * (1.0 - 1e-13)).unwrap();
            let right = k_boundaries(&c, x * (1.0 + 1e-13)).unwrap();
            assert_ne!(left.region, right.region);
            assert!((left.k - right.k).abs() < 1e-9);
        }
        assert!((c.k3(i.tau_lower) - c.k1(i.tau_lower)).abs() <= 1e-12 * c.k1(i.tau_lower));
        assert!((c.k3(i.tau_upper) - c.k2(i.tau_upper)).abs() <= 1e-12 * c.k2(i.tau_upper));
    }

    #[test]
    fn k_piecewise_requires_room() {
        let c = CostModel::new(0.45, 0.2, 0.001, 1.0).unwrap();
        assert!(!c.has_piecewise_k());
        assert!(matches!(k_boundaries(&c, 10.0), Err(Error::Domain { .. })));
        assert!(k_boundaries(&ex1_cost(), 1000.0).is_err());
    }

    #[test]
    fn cost_validation() {
        assert!(matches!(CostModel::new(0.5, 0.5, 0.1, 1.0), Err(Error::Infeasible(_))));
        assert!(CostModel::new(0.0, 0.1, 0.1, 1.0).is_err());
        let a = CostModel::with_budget(0.06, 0.0038, 0.0054, 5.0, 2.0).unwrap();
        assert!((a.c_it - 0.03).abs() < 1e-15 && (a.c_op - 0.0027).abs() < 1e-15);
    }

    #[test]
    fn varrho_single_inspection() {
        let p = ex1_params();
        let t = 40.0;
        let rho = varrho_type2(&p, &Criterion::d(), 1.0, t, 5.0).unwrap();
        let direct = p.alpha * t * t * t * trigamma(p.alpha * t).unwrap() - t * t;
        assert!((rho - direct).abs() <= 1e-10 * direct);
        assert!(varrho_type2(&p, &Criterion::d(), 10.0, 40.0, 5.0).is_err());
    }

    #[test]
    fn varrho_consistent_with_objective() {
        let p = ex1_params();
        for c in [Criterion::d(), Criterion::a(), v_crit()] {
            let r = c.resolve(&p).unwrap();
            let (n, m, t, dt) = (10.63, 17.73, 119.65, 5.0);
            let d = Design::long_then_minimal(n, m, t, dt).unwrap();
            let lhs = r.objective(&p, &d).unwrap() * n.powi(r.n_power());
            let rhs = 1.0 / r.varrho_type2(p.alpha, m, t, dt);
            assert!((lhs - rhs).abs() <= 1e-10 * rhs);
            // integer m: explicit intervals give the same value
            let d2 = Design::long_then_minimal(n, 17.0, t, dt).unwrap();
            let d3 = Design::aperiodic(n, d2.intervals().unwrap()).unwrap();
            let (a, b) = (r.objective(&p, &d2).unwrap(), r.objective(&p, &d3).unwrap());
            assert!((a - b).abs() <= 1e-12 * a);
        }
    }

    #[test]
    fn phi_m_t_match_fd() {
        let p = ProcessParams::new(0.028, -2.073).unwrap();
        let spec = LifetimeSpec::new(50.0, 0.05).unwrap();
        let dt = 5.0;
        for c in [Criterion::d(), Criterion::a(), Criterion::v(spec)] {
            let r = c.resolve(&p).unwrap();
            let half = if r == Resolved::D { 0.5 } else { 1.0 };
            let lr = |m: f64, t: f64| half * r.varrho_type2(p.alpha, m, t, dt).ln();
            for k in 0..100 {
                let u = (k as f64 + 0.5) / 100.0;
                let m = 1.5 + 80.0 * u;
                let t = m * dt * (1.05 + 3.0 * ((7.0 * u) % 1.0));
                let (pm, pt) = r.phi_m_phi_t(p.alpha, m, t, dt);
                let fm = fd(|x| lr(x, t), m);
                let ft = fd(|x| lr(m, x), t);
                assert!((pm - fm).abs() <= 1e-6 * pm.abs(), "m: {pm} vs {fm}");
                assert!((pt - ft).abs() <= 1e-6 * pt.abs(), "T: {pt} vs {ft}");
            }
            // along the boundary T = m dt
            let m = 12.0;
            let (pm, pt) = r.phi_m_phi_t(p.alpha, m, m * dt, dt);
            let dir = fd(|x| lr(x, x * dt), m);
            assert!((pm + dt * pt - dir).abs() <= 1e-6 * dir.abs());
            // more time helps when it is short
            assert!(r.phi_m_phi_t(p.alpha, 2.0, 12.0, dt).1 > 0.0);
        }
    }

    #[test]
    fn design_helpers() {
        let d = Design::long_then_minimal(2.0, 4.0, 50.0, 5.0).unwrap();
        assert_eq!(d.intervals().unwrap(), vec![35.0, 5.0, 5.0, 5.0]);
        assert_eq!(d.min_interval(), 5.0);
        assert!(Design::long_then_minimal(2.0, 4.5, 50.0, 5.0)
            .unwrap()
            .intervals()
            .is_none());
        assert!(Design::long_then_minimal(2.0, 11.0, 50.0, 5.0).is_err());
        assert!(Design::periodic(0.5, 2.0, 1.0).is_err());
        assert!(Design::aperiodic(1.0, vec![]).is_err());
        assert_eq!("v".parse::<CriterionKind>().unwrap(), CriterionKind::V);
        assert!(Criterion::new(CriterionKind::V, None).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn d_objective_decreases_in_tau(a in 1e-3f64..10.0, n in 1.0f64..50.0, m in 1.0f64..100.0,
                                        t1 in 1e-2f64..1e3, f in 1.0001f64..10.0) {
            let p = ProcessParams::new(a, 0.0).unwrap();
            let d1 = Design::periodic(n, m, t1).unwrap();
            let d2 = Design::periodic(n, m, t1 * f).unwrap();
            prop_assert!(Resolved::D.objective(&p, &d1).unwrap() > Resolved::D.objective(&p, &d2).unwrap());
        }

        #[test]
        fn tau_trigamma_decreasing(a in 1e-3f64..10.0, t1 in 1e-3f64..1e3, f in 1.0001f64..10.0) {
            let t2 = t1 * f;
            prop_assert!(t1 * trigamma(a * t1).unwrap() > t2 * trigamma(a * t2).unwrap());
        }

        #[test]
        fn x2_trigamma_midpoint_convex(x in 1e-3f64..100.0, y in 1e-3f64..100.0) {
            prop_assume!((x - y).abs() > 1e-6);
            let f = |z: f64| z * z * trigamma(z).unwrap();
            let mid = 0.5 * (x + y);
            prop_assert!(f(mid) <= 0.5 * (f(x) + f(y)) + 1e-12 * f(mid));
        }
    }
}
