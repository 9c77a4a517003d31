//! Integer designs near an approximate optimum and parameter-sensitivity tables.

use rayon::prelude::*;
use serde::Serialize;

use crate::criteria::{CostModel, Criterion, CriterionKind, Design, Resolved};
use crate::error::{Error, Result};
use crate::lifetime::ProcessParams;
use crate::plan::{CaseLabel, Family, PlanResult};
use crate::plan_type1::optimal_cost_constrained_resolved;
use crate::plan_type2::optimal_cost_constrained_t2_resolved;
use crate::presets::{LED_INTENSITY_SIGMA_ALPHA, LED_INTENSITY_SIGMA_GAMMA};

/// Default half-width of the integer search box in `n`.
pub const DEFAULT_RADIUS: u32 = 3;

/// Approximate optimum for the chosen family.
pub fn optimal_for_family(
    params: &ProcessParams,
    r: &Resolved,
    cost: &CostModel,
    family: Family,
) -> Result<PlanResult> {
    match family {
        Family::Type1 => optimal_cost_constrained_resolved(params, r, cost),
        Family::Type2 => optimal_cost_constrained_t2_resolved(params, r, cost),
    }
}

/// Design for integer `(n, m)` spending the whole budget, if it respects `dt`.
pub fn integer_design(cost: &CostModel, family: Family, n: u64, m: u64) -> Option<Design> {
    let (nf, mf) = (n as f64, m as f64);
    let total = (1.0 - cost.c_it * nf - cost.c_mea * nf * mf) / cost.c_op;
    if !(total >= mf * cost.min_interval) {
        return None;
    }
    match family {
        Family::Type1 => Design::periodic(nf, mf, total / mf).ok(),
        Family::Type2 => Design::long_then_minimal(nf, mf, total, cost.min_interval).ok(),
    }
}

/// Best integer design with `n` within `radius` of the rounded anchor.
///
/// For each `n` every affordable integer `m` is tried with the test time that
/// exhausts the budget. Ties go to the smaller `n`, then the smaller `m`.
pub fn integer_search(
    params: &ProcessParams,
    criterion: &Criterion,
    cost: &CostModel,
    family: Family,
    anchor: &PlanResult,
    radius: u32,
) -> Result<PlanResult> {
    if radius == 0 {
        return Err(Error::invalid("radius", "must be at least 1"));
    }
    let r = criterion.resolve(params)?;
    let centre = anchor.design.n.round().max(1.0) as u64;
    let lo = centre.saturating_sub(radius as u64).max(1);
    let hi = centre + radius as u64;
    let mut best: Option<(f64, Design)> = None;
    for n in lo..=hi {
        for m in 1u64.. {
            let Some(d) = integer_design(cost, family, n, m) else {
                break;
            };
            let Ok(v) = r.objective(params, &d) else { continue };
            if best.as_ref().is_none_or(|(bv, _)| v < bv * (1.0 - 1e-12)) {
                best = Some((v, d));
            }
        }
    }
    let (objective, design) =
        best.ok_or_else(|| Error::Infeasible(format!("no affordable integer design with n in [{lo}, {hi}]")))?;
    Ok(PlanResult {
        design,
        objective,
        case_label: CaseLabel::IntegerSearch,
        diagnostics: Vec::new(),
    })
}

/// `phi(reference) / phi(candidate)` for each candidate.
pub fn efficiency_report(
    params: &ProcessParams,
    criterion: &Criterion,
    reference: &Design,
    candidates: &[Design],
) -> Result<Vec<f64>> {
    let r = criterion.resolve(params)?;
    let base = r.objective(params, reference)?;
    candidates.iter().map(|d| Ok(base / r.objective(params, d)?)).collect()
}

/// Parameter deviations, in multiples of the estimate standard deviations.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SensitivityGrid {
    pub sigma_alpha: f64,
    pub sigma_gamma: f64,
    pub multipliers: Vec<i32>,
}

impl Default for SensitivityGrid {
    fn default() -> Self {
        SensitivityGrid {
            sigma_alpha: LED_INTENSITY_SIGMA_ALPHA,
            sigma_gamma: LED_INTENSITY_SIGMA_GAMMA,
            multipliers: (-3..=3).collect(),
        }
    }
}

/// One entry of a sensitivity table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SensitivityCell {
    pub alpha_multiplier: i32,
    pub gamma_multiplier: i32,
    /// Relative efficiency in (0, 1]; `None` when planning failed.
    pub efficiency: Option<f64>,
    pub note: Option<String>,
}

/// Rows follow the `gamma` deviation, columns the `alpha` deviation. D and A
/// do not depend on `gamma`, so their tables have a single row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SensitivityTable {
    pub criterion: CriterionKind,
    pub family: Family,
    pub alpha_multipliers: Vec<i32>,
    pub gamma_multipliers: Vec<i32>,
    pub rows: Vec<Vec<SensitivityCell>>,
}

/// Plan at perturbed parameters, evaluate under the true ones, compare with
/// the true optimum.
pub fn sensitivity_table(
    truth: &ProcessParams,
    grid: &SensitivityGrid,
    criterion: &Criterion,
    cost: &CostModel,
    family: Family,
) -> Result<SensitivityTable> {
    if !(grid.sigma_alpha > 0.0 && grid.sigma_gamma > 0.0) {
        return Err(Error::invalid("sigma", "standard deviations must be > 0"));
    }
    if grid.multipliers.is_empty() {
        return Err(Error::invalid("multipliers", "at least one multiplier is required"));
    }
    let r_true = criterion.resolve(truth)?;
    let best = optimal_for_family(truth, &r_true, cost, family)?.objective;
    let gamma_multipliers = match criterion.kind {
        CriterionKind::V => grid.multipliers.clone(),
        _ => vec![0],
    };
    let cells: Vec<(i32, i32)> = gamma_multipliers
        .iter()
        .flat_map(|&g| grid.multipliers.iter().map(move |&a| (g, a)))
        .collect();
    let evaluated: Vec<SensitivityCell> = cells
        .par_iter()
        .map(|&(gk, ak)| {
            let cell = |efficiency, note| SensitivityCell {
                alpha_multiplier: ak,
                gamma_multiplier: gk,
                efficiency,
                note,
            };
            let a = truth.alpha + ak as f64 * grid.sigma_alpha;
            let g = truth.gamma + gk as f64 * grid.sigma_gamma;
            if a <= 0.0 {
                return cell(None, Some(format!("perturbed alpha {a} is not positive")));
            }
            let run = || -> Result<f64> {
                let p = ProcessParams::new(a, g)?;
                let plan = optimal_for_family(&p, &criterion.resolve(&p)?, cost, family)?;
                Ok(best / r_true.objective(truth, &plan.design)?)
            };
            match run() {
                Ok(re) => cell(Some(re), None),
                Err(e) => cell(None, Some(e.to_string())),
            }
        })
        .collect();
    let width = grid.multipliers.len();
    let rows = evaluated.chunks(width).map(|c| c.to_vec()).collect();
    Ok(SensitivityTable {
        criterion: criterion.kind,
        family,
        alpha_multipliers: grid.multipliers.clone(),
        gamma_multipliers,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets::{led, led_intensity};

    #[test]
    fn integer_search_bounds_relaxation() {
        let s = led();
        for family in [Family::Type1, Family::Type2] {
            for crit in [Criterion::d(), Criterion::a(), Criterion::v(s.lifetime)] {
                let r = crit.resolve(&s.params).unwrap();
                let anchor = optimal_for_family(&s.params, &r, &s.cost, family).unwrap();
                let int = integer_search(&s.params, &crit, &s.cost, family, &anchor, 3).unwrap();
                let d = &int.design;
                assert_eq!(d.n.fract(), 0.0);
                assert_eq!(d.m.fract(), 0.0);
                assert!(int.objective >= anchor.objective * (1.0 - 1e-12));
                assert!((s.cost.total_cost(d.n, d.m, d.total_time()) - 1.0).abs() < 1e-9);
                assert!(d.min_interval() >= s.cost.min_interval * (1.0 - 1e-12));
            }
        }
    }

    #[test]
    fn integer_design_rejects_short_tests() {
        let c = led().cost;
        assert!(integer_design(&c, Family::Type1, 1, 10_000).is_none());
        let d = integer_design(&c, Family::Type2, 2, 3).unwrap();
        assert_eq!(d.intervals().unwrap().len(), 3);
    }

    #[test]
    fn sensitivity_shapes_and_centre() {
        let s = led_intensity();
        let grid = SensitivityGrid {
            multipliers: vec![-1, 0, 1],
            ..Default::default()
        };
        let t = sensitivity_table(&s.params, &grid, &Criterion::a(), &s.cost, Family::Type1).unwrap();
        assert_eq!(t.rows.len(), 1);
        assert_eq!(t.rows[0].len(), 3);
        assert!((t.rows[0][1].efficiency.unwrap() - 1.0).abs() < 1e-12);
        for c in &t.rows[0] {
            let re = c.efficiency.unwrap();
            assert!(re > 0.0 && re <= 1.0 + 1e-9);
        }
        let v = sensitivity_table(&s.params, &grid, &Criterion::v(s.lifetime), &s.cost, Family::Type2).unwrap();
        assert_eq!(v.rows.len(), 3);
        assert_eq!(v.rows[1][1].gamma_multiplier, 0);
        assert!((v.rows[1][1].efficiency.unwrap() - 1.0).abs() < 1e-12);
        let single = SensitivityGrid {
            multipliers: vec![0],
            ..Default::default()
        };
        let one = sensitivity_table(&s.params, &single, &Criterion::d(), &s.cost, Family::Type2).unwrap();
        assert_eq!(one.rows.len(), 1);
        assert_eq!(one.rows[0].len(), 1);
    }

    #[test]
    fn nonpositive_alpha_is_flagged() {
        let s = led_intensity();
        let grid = SensitivityGrid {
            sigma_alpha: 0.02,
            sigma_gamma: 0.1,
            multipliers: vec![-2, 0],
        };
        let t = sensitivity_table(&s.params, &grid, &Criterion::a(), &s.cost, Family::Type1).unwrap();
        assert!(t.rows[0][0].efficiency.is_none());
        assert!(t.rows[0][0].note.as_deref().unwrap().contains("not positive"));
    }

    #[test]
    fn efficiency_report_is_one_for_reference() {
        let s = led();
        let d = Design::periodic(10.0, 20.0, 5.0).unwrap();
        let e = Design::periodic(10.0, 10.0, 10.0).unwrap();
        let re = efficiency_report(&s.params, &Criterion::a(), &d, &[d.clone(), e]).unwrap();
        assert_eq!(re[0], 1.0);
        assert!(re[1] > 0.0);
    }
}
