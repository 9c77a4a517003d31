//! Optimal aperiodic (Type-II) designs.
//!
//! For fixed `(n, m, T)` the information is largest when one interval takes
//! all the slack and the others sit at the minimum `dt`. Planning therefore
//! reduces to choosing `(n, m, T)` under that schedule, with `m` real.

use serde::Serialize;

use crate::criteria::{CostModel, Criterion, Design, Resolved, BOUND_SLACK};
use crate::error::{Error, Result};
use crate::lifetime::ProcessParams;
use crate::plan::{budget_is_degenerate, select, Candidate, CaseLabel, PlanResult, ROOT_GRID_POINTS};
use crate::roots::{log_grid, scan_roots};
use crate::specfun::shape_information_unchecked as info;

/// Grid size for each level of the nested interior solve.
const NESTED_GRID_POINTS: usize = 256;

/// One long interval followed by `m - 1` minimal ones.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScheduleSpec {
    pub m: f64,
    pub total: f64,
    pub dt: f64,
}

impl ScheduleSpec {
    /// Length of the long interval, `T - (m-1) dt`.
    pub fn first(&self) -> f64 {
        self.total - (self.m - 1.0) * self.dt
    }

    fn whole_m(&self) -> Option<usize> {
        let k = self.m.round();
        ((self.m - k).abs() <= BOUND_SLACK && k >= 1.0).then_some(k as usize)
    }

    /// The optimal intervals; `None` for fractional `m`.
    pub fn intervals(&self) -> Option<Vec<f64>> {
        let k = self.whole_m()?;
        let mut v = vec![self.dt; k];
        v[0] = self.first();
        Some(v)
    }

    /// The least informative split, `T/m` each; `None` for fractional `m`.
    pub fn worst_case(&self) -> Option<Vec<f64>> {
        let k = self.whole_m()?;
        Some(vec![self.total / k as f64; k])
    }

    /// `sum (alpha dt_j)^2 psi1(alpha dt_j)` with `m` treated as real.
    pub fn g1(&self, alpha: f64) -> f64 {
        let (x, y) = (alpha * self.dt, alpha * self.first());
        (self.m - 1.0) * (info(x) + x) + info(y) + y
    }
}

/// `sum (alpha dt_j)^2 psi1(alpha dt_j)` for explicit intervals.
pub fn g1(alpha: f64, intervals: &[f64]) -> f64 {
    intervals
        .iter()
        .map(|&d| {
            let x = alpha * d;
            info(x) + x
        })
        .sum()
}

/// The information-maximizing schedule for `m` inspections over `T`.
pub fn optimal_schedule(m: f64, total: f64, dt: f64) -> Result<ScheduleSpec> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::invalid("dt", format!("must be finite and > 0, got {dt}")));
    }
    if !(m.is_finite() && m >= 1.0) {
        return Err(Error::invalid("m", format!("must be finite and >= 1, got {m}")));
    }
    if !(total.is_finite() && total >= m * dt * (1.0 - BOUND_SLACK)) {
        return Err(Error::Infeasible(format!(
            "T = {total} is shorter than m * dt = {}",
            m * dt
        )));
    }
    Ok(ScheduleSpec { m, total, dt })
}

/// Closed-form optimum when inspections are free:
/// `(n, m, T) = (1/(2 c_it), 1/(2 c_op dt), 1/(2 c_op))`, inspected every `dt`.
///
/// Falls back to the eight-case solver when the closed form violates `n >= 1`
/// or `m >= 1`.
pub fn optimal_zero_mea(params: &ProcessParams, criterion: &Criterion, cost: &CostModel) -> Result<PlanResult> {
    if cost.c_mea != 0.0 {
        return Err(Error::invalid(
            "c_mea",
            format!("must be 0 for the closed form, got {}", cost.c_mea),
        ));
    }
    let r = criterion.resolve(params)?;
    let n = 0.5 / cost.c_it;
    let total = 0.5 / cost.c_op;
    let m = total / cost.min_interval;
    if n < 1.0 || m < 1.0 {
        return optimal_cost_constrained_t2_resolved(params, &r, cost);
    }
    let design = Design::periodic(n, m, cost.min_interval)?;
    let objective = r.objective(params, &design)?;
    Ok(PlanResult {
        design,
        objective,
        case_label: CaseLabel::ClosedForm,
        diagnostics: Vec::new(),
    })
}

/// `phi(reference) / phi(candidate)`.
pub fn relative_efficiency(
    params: &ProcessParams,
    criterion: &Criterion,
    reference: &Design,
    candidate: &Design,
) -> Result<f64> {
    let r = criterion.resolve(params)?;
    Ok(r.objective(params, reference)? / r.objective(params, candidate)?)
}

struct Ctx<'a> {
    params: &'a ProcessParams,
    r: &'a Resolved,
    cost: &'a CostModel,
}

impl Ctx<'_> {
    fn phis(&self, m: f64, total: f64) -> (f64, f64) {
        self.r.phi_m_phi_t(self.params.alpha, m, total, self.cost.min_interval)
    }

    fn objective_at(&self, n: f64, m: f64, total: f64) -> f64 {
        1.0 / (n.powi(self.r.n_power()) * self.r.varrho_type2(self.params.alpha, m, total, self.cost.min_interval))
    }

    fn candidate(&self, case: u8, n: f64, m: f64, total: f64, ok: bool, note: String) -> Candidate {
        let design = Design::long_then_minimal(n, m, total, self.cost.min_interval);
        Candidate::evaluate(case, design, self.params, self.r, self.cost, ok, note)
    }

    /// Largest `m` with `n >= 1` and `T >= m dt`.
    fn m_max(&self) -> f64 {
        let c = self.cost;
        (1.0 - c.c_it) / (c.c_mea + c.c_op * c.min_interval)
    }

    /// Interior case: for given `m`, the `T` solving `(1 - c_op T) phi_T = c_op`
    /// with the best objective.
    fn case3_inner(&self, m: f64) -> Option<f64> {
        let c = self.cost;
        let lo = m * c.min_interval;
        let hi = (1.0 - c.c_it - c.c_mea * m) / c.c_op;
        if !(hi > lo) {
            return None;
        }
        let grid = log_grid(lo, hi, NESTED_GRID_POINTS);
        let roots = scan_roots(
            |t| (1.0 - c.c_op * t) * self.phis(m, t).1 - c.c_op,
            &grid,
            1e-14,
            "type2 interior inner",
        );
        roots
            .into_iter()
            .map(|t| (t, self.objective_at(c.units_for(m, t), m, t)))
            .filter(|(_, v)| v.is_finite())
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(t, _)| t)
    }

    fn case3_outer(&self, m: f64) -> f64 {
        let c = self.cost;
        match self.case3_inner(m) {
            Some(t) => self.phis(m, t).0 - c.c_mea / (c.c_it + c.c_mea * m),
            None => f64::NAN,
        }
    }
}

/// Cost-constrained optimal Type-II design over the eight constructions.
pub fn optimal_cost_constrained_t2(
    params: &ProcessParams,
    criterion: &Criterion,
    cost: &CostModel,
) -> Result<PlanResult> {
    let r = criterion.resolve(params)?;
    optimal_cost_constrained_t2_resolved(params, &r, cost)
}

/// [`optimal_cost_constrained_t2`] with the criterion weights already fixed.
pub fn optimal_cost_constrained_t2_resolved(
    params: &ProcessParams,
    r: &Resolved,
    cost: &CostModel,
) -> Result<PlanResult> {
    let cx = Ctx { params, r, cost };
    let (ci, cm, co, dt) = (cost.c_it, cost.c_mea, cost.c_op, cost.min_interval);
    if budget_is_degenerate(cost) {
        let only = cx.candidate(8, 1.0, 1.0, dt, true, "budget admits one unit inspected once".into());
        return select(vec![only], "type2 planner");
    }
    let m5 = cx.m_max();
    let n6 = (1.0 - co * dt) / (ci + cm);
    let mut out = Vec::new();

    // case 1: one unit, T exhausts the budget
    let t_of_m = |m: f64| (1.0 - cm * m - ci) / co;
    let roots = if m5 > 1.0 {
        let f = |m: f64| {
            let (pm, pt) = cx.phis(m, t_of_m(m));
            co * pm - cm * pt
        };
        scan_roots(f, &log_grid(1.0, m5, ROOT_GRID_POINTS), 1e-14, "type2 case 1")
    } else {
        Vec::new()
    };
    if roots.is_empty() {
        out.push(Candidate::missing(1, "phi_m / phi_T = c_mea / c_op has no root"));
    }
    for m in roots {
        let t = t_of_m(m);
        let ok = co / (ci + cm * m) < cx.phis(m, t).1;
        out.push(cx.candidate(1, 1.0, m, t, ok, format!("root m = {m}")));
    }

    // case 2: one inspection
    let t_of_n = |n: f64| (1.0 - n * (cm + ci)) / co;
    let roots = if n6 > 1.0 {
        let f = |n: f64| n * cx.phis(1.0, t_of_n(n)).1 - co / (ci + cm);
        scan_roots(f, &log_grid(1.0, n6, ROOT_GRID_POINTS), 1e-14, "type2 case 2")
    } else {
        Vec::new()
    };
    if roots.is_empty() {
        out.push(Candidate::missing(
            2,
            "n phi_T(1, T(n)) = c_op / (c_it + c_mea) has no root",
        ));
    }
    for n in roots {
        let t = t_of_n(n);
        let ok = cx.phis(1.0, t).0 < cm / (ci + cm);
        out.push(cx.candidate(2, n, 1.0, t, ok, format!("root n = {n}")));
    }

    // case 3: interior, nested solve
    let roots = if m5 > 1.0 {
        scan_roots(
            |m| cx.case3_outer(m),
            &log_grid(1.0, m5, NESTED_GRID_POINTS),
            1e-12,
            "type2 interior outer",
        )
    } else {
        Vec::new()
    };
    let mut any = false;
    for m in roots {
        let Some(t) = cx.case3_inner(m) else { continue };
        any = true;
        let n = cost.units_for(m, t);
        let target = cm / (ci + cm * m);
        let resid = (cx.phis(m, t).0 - target).abs();
        let ok = n > 1.0 && m > 1.0 && t > m * dt && resid <= 1e-6 * target.abs().max(f64::MIN_POSITIVE);
        out.push(cx.candidate(3, n, m, t, ok, format!("root m = {m}, T = {t}")));
    }
    if !any {
        out.push(Candidate::missing(3, "interior stationarity system has no root"));
    }

    // case 4: one unit, one inspection, all remaining budget on time
    let t4 = (1.0 - cm - ci) / co;
    let (pm, pt) = cx.phis(1.0, t4);
    let ok = co / (ci + cm) < pt && pm / pt < cm / co;
    out.push(cx.candidate(4, 1.0, 1.0, t4, ok, "T = T4".into()));

    // case 5: one unit inspected every dt
    let (pm, pt) = cx.phis(m5, m5 * dt);
    let ok = (cm + dt * co) / (ci + cm * m5) < pm + dt * pt;
    out.push(cx.candidate(5, 1.0, m5, m5 * dt, ok, "T = m dt, n = 1".into()));

    // case 6: one inspection at dt
    let (pm, pt) = cx.phis(1.0, dt);
    let ok = n6 * (pm + dt * pt) < (co * dt + cm * n6) / (ci + cm) && n6 * pt < co / (ci + cm);
    out.push(cx.candidate(6, n6, 1.0, dt, ok, "T = dt, m = 1".into()));

    // case 7: every interval at dt
    let n_of_m = |m: f64| (1.0 - co * m * dt) / (ci + cm * m);
    let roots = if m5 > 1.0 {
        let f = |m: f64| {
            let n = n_of_m(m);
            let (pm, pt) = cx.phis(m, m * dt);
            n * (pm + dt * pt) - (co * dt + cm * n) / (ci + cm * m)
        };
        scan_roots(f, &log_grid(1.0, m5, ROOT_GRID_POINTS), 1e-14, "type2 case 7")
    } else {
        Vec::new()
    };
    if roots.is_empty() {
        out.push(Candidate::missing(
            7,
            "boundary stationarity along T = m dt has no root",
        ));
    }
    for m in roots {
        let n = n_of_m(m);
        let ok = n * cx.phis(m, m * dt).1 < co / (ci + cm * m);
        out.push(cx.candidate(7, n, m, m * dt, ok, format!("root m = {m}")));
    }

    select(out, "type2 planner")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::criteria::objective;
    use crate::lifetime::LifetimeSpec;
    use crate::plan_type1::optimal_cost_constrained;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ex1() -> (ProcessParams, CostModel, LifetimeSpec) {
        (
            ProcessParams::new(0.065, -0.77).unwrap(),
            CostModel::new(0.03, 0.0019, 0.0027, 5.0).unwrap(),
            LifetimeSpec::new(0.5, 0.1).unwrap(),
        )
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    fn random_type2(rng: &mut ChaCha8Rng, cost: &CostModel) -> Option<Design> {
        let dt = cost.min_interval;
        let t_max = (1.0 - cost.c_it - cost.c_mea) / cost.c_op;
        let t = (dt.ln() + rng.random::<f64>() * (t_max / dt).ln()).exp();
        let m_cap = (t / dt).min((1.0 - cost.c_op * t - cost.c_it) / cost.c_mea);
        if m_cap < 1.0 {
            return None;
        }
        let m = (rng.random::<f64>() * m_cap.ln()).exp();
        Design::long_then_minimal(cost.units_for(m, t), m, t, dt).ok()
    }

    #[test]
    fn schedule_shapes() {
        let s = optimal_schedule(1.0, 40.0, 5.0).unwrap();
        assert_eq!(s.intervals().unwrap(), vec![40.0]);
        let s = optimal_schedule(4.0, 20.0, 5.0).unwrap();
        assert_eq!(s.intervals().unwrap(), s.worst_case().unwrap());
        let s = optimal_schedule(3.0, 30.0, 5.0).unwrap();
        assert_eq!(s.intervals().unwrap(), vec![20.0, 5.0, 5.0]);
        assert!(optimal_schedule(7.0, 30.0, 5.0).is_err());
        assert!(optimal_schedule(2.5, 30.0, 5.0).unwrap().intervals().is_none());
        let alpha = 0.028;
        assert!((s.g1(alpha) - g1(alpha, &s.intervals().unwrap())).abs() < 1e-14);
    }

    #[test]
    fn schedule_beats_random_splits() {
        let (alpha, m, t, dt) = (0.028, 5usize, 250.0, 5.0);
        let s = optimal_schedule(m as f64, t, dt).unwrap();
        let best = s.g1(alpha);
        let worst = g1(alpha, &s.worst_case().unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let slack = t - m as f64 * dt;
        for _ in 0..20_000 {
            // flat Dirichlet on the slack
            let e: Vec<f64> = (0..m).map(|_| -rng.random::<f64>().ln()).collect();
            let sum: f64 = e.iter().sum();
            let v: Vec<f64> = e.iter().map(|x| dt + slack * x / sum).collect();
            let g = g1(alpha, &v);
            assert!(g <= best * (1.0 + 1e-14));
            assert!(g >= worst * (1.0 - 1e-14));
        }
    }

    #[test]
    fn zero_mea_closed_form() {
        let p = ProcessParams::new(0.065, -0.77).unwrap();
        let c = CostModel::new(0.1, 0.0, 0.01, 5.0).unwrap();
        let plan = optimal_zero_mea(&p, &Criterion::d(), &c).unwrap();
        let d = &plan.design;
        assert!((d.n - 5.0).abs() < 1e-12 && (d.m - 10.0).abs() < 1e-12 && (d.total_time() - 50.0).abs() < 1e-12);
        assert_eq!(c.total_cost(d.n, d.m, d.total_time()), 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..2000 {
            let t = 5.0 + rng.random::<f64>() * 85.0;
            let n = (1.0 - 0.01 * t) / 0.1;
            let m = 1.0 + rng.random::<f64>() * (t / 5.0 - 1.0);
            let cand = Design::long_then_minimal(n, m, t, 5.0).unwrap();
            assert!(objective(&p, &Criterion::d(), &cand).unwrap() >= plan.objective * (1.0 - 1e-12));
        }
        assert!(optimal_zero_mea(&p, &Criterion::d(), &CostModel::new(0.1, 0.01, 0.01, 5.0).unwrap()).is_err());
    }

    #[test]
    fn example1_plans() {
        let (p, c, s) = ex1();
        let expect = [
            (Criterion::d(), (10.9, 16.6, 122.5), 3.48e-7),
            (Criterion::a(), (15.8, 1.35, 179.5), 5.75e-3),
            (Criterion::v(s), (10.6, 17.7, 119.7), 2.43e-3),
        ];
        for (crit, (n, m, t), v) in expect {
            let plan = optimal_cost_constrained_t2(&p, &crit, &c).unwrap();
            let d = &plan.design;
            assert_eq!(plan.case_label, CaseLabel::Case(3), "{crit:?} {:?}", plan.case_label);
            assert!(
                rel(d.n, n) < 0.02 && rel(d.m, m) < 0.02 && rel(d.total_time(), t) < 0.02,
                "{d:?}"
            );
            assert!(rel(plan.objective, v) < 0.01, "{}", plan.objective);
            assert!((c.total_cost(d.n, d.m, d.total_time()) - 1.0).abs() <= 1e-9);
            let t1 = optimal_cost_constrained(&p, &crit, &c).unwrap();
            assert!(plan.objective <= t1.objective + 1e-12);
        }
    }

    #[test]
    fn interior_kkt_residuals() {
        let (p, c, s) = ex1();
        for crit in [Criterion::d(), Criterion::a(), Criterion::v(s)] {
            let r = crit.resolve(&p).unwrap();
            let plan = optimal_cost_constrained_t2_resolved(&p, &r, &c).unwrap();
            let (n, m, t) = (plan.design.n, plan.design.m, plan.design.total_time());
            let (pm, pt) = r.phi_m_phi_t(p.alpha, m, t, c.min_interval);
            let e1 = n * pt - c.c_op / (c.c_it + c.c_mea * m);
            let e2 = pm - c.c_mea / (c.c_it + c.c_mea * m);
            assert!(e1.abs() <= 1e-8 * pt.abs() * n, "{e1}");
            assert!(e2.abs() <= 1e-8 * pm.abs().max(1e-3), "{e2}");
        }
    }

    #[test]
    fn degenerate_budget() {
        let p = ProcessParams::new(0.065, -0.77).unwrap();
        let c = CostModel::new(0.3, 0.2, 0.1, 5.0).unwrap();
        let plan = optimal_cost_constrained_t2(&p, &Criterion::a(), &c).unwrap();
        assert_eq!(plan.case_label, CaseLabel::Case(8));
        assert_eq!(plan.design.total_time(), 5.0);
    }

    #[test]
    fn dominates_random_designs() {
        let (p, c, s) = ex1();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for crit in [Criterion::d(), Criterion::a(), Criterion::v(s)] {
            let r = crit.resolve(&p).unwrap();
            let best = optimal_cost_constrained_t2_resolved(&p, &r, &c).unwrap().objective;
            for _ in 0..2000 {
                if let Some(d) = random_type2(&mut rng, &c) {
                    assert!(r.objective(&p, &d).unwrap() >= best * (1.0 - 1e-12), "{d:?}");
                }
            }
        }
    }

    #[test]
    fn order_invariance_and_efficiency() {
        let (p, c, s) = ex1();
        let crit = Criterion::v(s);
        let d = Design::aperiodic(10.0, vec![35.0, 5.0, 5.0, 5.0]).unwrap();
        let e = Design::aperiodic(10.0, vec![5.0, 5.0, 35.0, 5.0]).unwrap();
        assert!((relative_efficiency(&p, &crit, &d, &e).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(relative_efficiency(&p, &crit, &d, &d).unwrap(), 1.0);
        let t1 = optimal_cost_constrained(&p, &crit, &c).unwrap();
        let t2 = optimal_cost_constrained_t2(&p, &crit, &c).unwrap();
        let re = relative_efficiency(&p, &crit, &t2.design, &t1.design).unwrap();
        assert!((re - 0.98).abs() <= 0.01, "{re}");
    }
}
