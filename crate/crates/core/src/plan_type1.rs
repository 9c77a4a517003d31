//! Optimal periodic-inspection (Type-I) designs.

use serde::Serialize;

use crate::criteria::{CostModel, Criterion, Design, Resolved};
use crate::error::{Error, Result};
use crate::lifetime::ProcessParams;
use crate::plan::{budget_is_degenerate, select, Candidate, CaseLabel, PlanResult, ROOT_GRID_POINTS};
use crate::roots::{log_grid, scan_roots};
use crate::specfun::omega_inverse;

pub use crate::plan::Family;

/// Outcome of the fixed-`(n, m)` interval optimization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TauVerdict {
    /// Unique interior minimum at or above the minimum interval.
    Interior,
    /// The interior minimum lies below the minimum interval.
    ClampedToMinInterval,
    /// The interior minimum lies beyond the supplied upper bound.
    ClampedToUpperBound,
    /// The objective decreases without bound in `tau`.
    NoInteriorOptimum,
}

/// Best inspection interval for a fixed number of units and inspections.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TauPlan {
    pub verdict: TauVerdict,
    /// `None` when the objective keeps decreasing and no upper bound was given.
    pub tau: Option<f64>,
    /// `h2^2 / (alpha^2 h1^2)` (1/alpha^2 for A); absent for D.
    pub ratio: Option<f64>,
    pub design: Option<Design>,
    pub objective: Option<f64>,
}

/// Optimal `tau` with `n` and `m` held fixed.
///
/// For D-optimality, and for A/V when the weight ratio is at least 2/3, the
/// objective decreases in `tau`; the result is then `tau_max` if given.
/// Otherwise `tau* = max(dt, omega_inverse(-ratio) / alpha)`.
pub fn optimal_tau_fixed_nm(
    params: &ProcessParams,
    criterion: &Criterion,
    n: f64,
    m: f64,
    dt: f64,
    tau_max: Option<f64>,
) -> Result<TauPlan> {
    Design::periodic(n, m, dt)?;
    if let Some(t) = tau_max {
        if !(t >= dt) {
            return Err(Error::invalid("tau_max", format!("must be >= dt = {dt}, got {t}")));
        }
    }
    let r = criterion.resolve(params)?;
    let ratio = match r {
        Resolved::D => None,
        Resolved::Linear { w1, w2 } => Some(w2 / (params.alpha * params.alpha * w1)),
    };
    let (verdict, tau) = match ratio {
        Some(q) if q < 2.0 / 3.0 => {
            let interior = omega_inverse(-q)? / params.alpha;
            match tau_max {
                _ if interior < dt => (TauVerdict::ClampedToMinInterval, Some(dt)),
                Some(t) if interior > t => (TauVerdict::ClampedToUpperBound, Some(t)),
                _ => (TauVerdict::Interior, Some(interior)),
            }
        }
        _ => (TauVerdict::NoInteriorOptimum, tau_max),
    };
    let (design, objective) = match tau {
        Some(t) => {
            let d = Design::periodic(n, m, t)?;
            let v = r.objective(params, &d)?;
            (Some(d), Some(v))
        }
        None => (None, None),
    };
    Ok(TauPlan {
        verdict,
        tau,
        ratio,
        design,
        objective,
    })
}

/// Optimal interval with `n` and total time `T` fixed: always the minimum interval.
pub fn optimal_tau_fixed_nt(
    params: &ProcessParams,
    criterion: &Criterion,
    n: f64,
    total: f64,
    dt: f64,
) -> Result<PlanResult> {
    if !(dt > 0.0) {
        return Err(Error::invalid("dt", format!("must be > 0, got {dt}")));
    }
    if !(total >= dt) {
        return Err(Error::Infeasible(format!("T = {total} is shorter than dt = {dt}")));
    }
    let design = Design::periodic(n, total / dt, dt)?;
    let objective = criterion.resolve(params)?.objective(params, &design)?;
    Ok(PlanResult {
        design,
        objective,
        case_label: CaseLabel::ClosedForm,
        diagnostics: Vec::new(),
    })
}

/// `(n, m)` of the Type-I constructions at interval `tau`.
///
/// Cases 1 and 5 take one unit, cases 2 and 6 one inspection, cases 3 and 7
/// the interior split; cases 4 and 8 are the single-unit single-inspection design.
pub fn type1_case_design(cost: &CostModel, case: u8, tau: f64) -> Result<(f64, f64)> {
    let (ci, cm, co) = (cost.c_it, cost.c_mea, cost.c_op);
    match case {
        1 | 5 => Ok((1.0, (1.0 - ci) / (cm + co * tau))),
        2 | 6 => Ok(((1.0 - co * tau) / (ci + cm), 1.0)),
        3 | 7 => {
            // rationalized so that c_mea -> 0 stays finite
            let c = cm * ci / (co * tau);
            let root = (ci * ci + c).sqrt();
            let n = 1.0 / (ci + root);
            let m = ci / (co * tau * (ci + root));
            Ok((n, m))
        }
        4 | 8 => Ok((1.0, 1.0)),
        _ => Err(Error::invalid("case", format!("expected 1..=8, got {case}"))),
    }
}

/// Which boundary function a case's stationarity equation uses.
fn boundary(cost: &CostModel, case: u8, tau: f64) -> f64 {
    match case {
        1 | 5 => cost.k1(tau),
        2 | 6 => cost.k2(tau),
        _ => cost.k3(tau),
    }
}

fn conditions(cost: &CostModel, phi: &dyn Fn(f64) -> f64, case: u8, tau: f64) -> bool {
    let idx = cost.indices();
    let dt = cost.min_interval;
    let pw = cost.has_piecewise_k();
    let (ci, cm, co) = (cost.c_it, cost.c_mea, cost.c_op);
    match case {
        1 => (pw && idx.tau_lower > tau && tau > dt) || (!pw && idx.tau_max > tau && tau > dt),
        2 => pw && idx.tau_max > tau && tau > idx.tau_upper.max(dt),
        3 => pw && idx.tau_upper > tau && tau > idx.tau_lower.max(dt),
        4 => phi(idx.tau_max) > (co / (ci + cm)).max(co / (1.0 - ci)),
        5 => phi(dt) < cost.k1(dt) && ((pw && idx.tau_lower > dt) || !pw),
        6 => phi(dt) < cost.k2(dt) && pw && dt > idx.tau_upper,
        7 => phi(dt) < cost.k3(dt) && pw && idx.tau_upper > dt && dt > idx.tau_lower,
        8 => budget_is_degenerate(cost),
        _ => false,
    }
}

fn candidate(
    params: &ProcessParams,
    r: &Resolved,
    cost: &CostModel,
    phi: &dyn Fn(f64) -> f64,
    case: u8,
    tau: f64,
    note: String,
) -> Candidate {
    let design = type1_case_design(cost, case, tau).and_then(|(n, m)| Design::periodic(n, m, tau));
    let ok = conditions(cost, phi, case, tau);
    Candidate::evaluate(case, design, params, r, cost, ok, note)
}

/// All stationarity roots of `phi = K_i` over `(dt/1000, tau_max]`.
pub fn type1_roots(params: &ProcessParams, r: &Resolved, cost: &CostModel, case: u8) -> Vec<f64> {
    let grid = log_grid(cost.min_interval * 1e-3, cost.indices().tau_max, ROOT_GRID_POINTS);
    scan_roots(
        |t| r.phi_tau(params.alpha, t) - boundary(cost, case, t),
        &grid,
        1e-14,
        "type1 stationarity",
    )
}

/// Cost-constrained optimal Type-I design.
///
/// Every construction is built: each root of `phi = K_i` for the interior
/// cases, the three minimum-interval designs and the one-unit one-inspection
/// design at `tau_max`. The feasible candidate with the smallest objective
/// wins. A budget that buys exactly one unit inspected once returns case 8.
pub fn optimal_cost_constrained(params: &ProcessParams, criterion: &Criterion, cost: &CostModel) -> Result<PlanResult> {
    let r = criterion.resolve(params)?;
    optimal_cost_constrained_resolved(params, &r, cost)
}

/// [`optimal_cost_constrained`] with the criterion weights already fixed.
pub fn optimal_cost_constrained_resolved(params: &ProcessParams, r: &Resolved, cost: &CostModel) -> Result<PlanResult> {
    let phi = |t: f64| r.phi_tau(params.alpha, t);
    let dt = cost.min_interval;
    let tau_max = cost.indices().tau_max;
    if budget_is_degenerate(cost) {
        let only = candidate(
            params,
            r,
            cost,
            &phi,
            8,
            dt,
            "budget admits one unit inspected once".into(),
        );
        return select(vec![only], "type1 planner");
    }
    let mut out = Vec::new();
    for case in 1..=3u8 {
        let roots = type1_roots(params, r, cost, case);
        if roots.is_empty() {
            out.push(Candidate::missing(
                case,
                format!("phi = K{} has no root", [1, 2, 3][case as usize - 1]),
            ));
        }
        for tau in roots {
            out.push(candidate(params, r, cost, &phi, case, tau, format!("root tau = {tau}")));
        }
    }
    out.push(candidate(params, r, cost, &phi, 4, tau_max, "tau = tau_max".into()));
    for case in 5..=7u8 {
        out.push(candidate(params, r, cost, &phi, case, dt, "tau = dt".into()));
    }
    select(out, "type1 planner")
}
