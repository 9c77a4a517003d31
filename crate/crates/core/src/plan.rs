//! Result types shared by the Type-I and Type-II planners.

use std::fmt;

use serde::Serialize;

use crate::criteria::{CostModel, Design, Resolved, BOUND_SLACK};
use crate::error::{Error, Result};
use crate::lifetime::ProcessParams;

/// Points in the logarithmic scan used to bracket stationarity roots.
pub(crate) const ROOT_GRID_POINTS: usize = 512;

/// Relative tolerance used when comparing candidate objectives.
const TIE_RTOL: f64 = 1e-12;

/// Periodic (Type-I) or one-long-plus-minimal (Type-II) inspection schedules.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Type1,
    Type2,
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "type1" | "type-i" | "1" => Ok(Family::Type1),
            "type2" | "type-ii" | "2" => Ok(Family::Type2),
            _ => Err(Error::invalid("family", format!("expected type1 or type2, got `{s}`"))),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Type1 => "type1",
            Family::Type2 => "type2",
        })
    }
}

/// Which construction produced a plan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "case", rename_all = "snake_case")]
pub enum CaseLabel {
    /// The case's sufficient conditions hold at the winning candidate.
    Case(u8),
    /// The winner was found by enumeration but its conditions do not hold exactly.
    ByEnumeration(u8),
    /// A closed-form optimum outside the eight-case analysis.
    ClosedForm,
    /// Integer design found by grid search.
    IntegerSearch,
}

impl CaseLabel {
    /// Case index, if any.
    pub fn case(&self) -> Option<u8> {
        match *self {
            CaseLabel::Case(k) | CaseLabel::ByEnumeration(k) => Some(k),
            _ => None,
        }
    }
}

impl fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CaseLabel::Case(k) => write!(f, "case {k}"),
            CaseLabel::ByEnumeration(k) => write!(f, "case {k} (by enumeration)"),
            CaseLabel::ClosedForm => f.write_str("closed form"),
            CaseLabel::IntegerSearch => f.write_str("integer search"),
        }
    }
}

/// One evaluated construction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Candidate {
    pub case: u8,
    pub design: Option<Design>,
    pub objective: Option<f64>,
    pub feasible: bool,
    pub conditions_hold: bool,
    pub note: String,
}

impl Candidate {
    pub(crate) fn missing(case: u8, note: impl Into<String>) -> Self {
        Candidate {
            case,
            design: None,
            objective: None,
            feasible: false,
            conditions_hold: false,
            note: note.into(),
        }
    }

    /// Build and check a candidate: bounds, minimum interval and cost equality.
    pub(crate) fn evaluate(
        case: u8,
        design: Result<Design>,
        params: &ProcessParams,
        crit: &Resolved,
        cost: &CostModel,
        conditions_hold: bool,
        note: impl Into<String>,
    ) -> Self {
        let note = note.into();
        let design = match design {
            Ok(d) => d,
            Err(e) => {
                return Candidate {
                    conditions_hold,
                    ..Candidate::missing(case, format!("{note}; {e}"))
                }
            }
        };
        let objective = crit
            .objective(params, &design)
            .ok()
            .filter(|v| v.is_finite() && *v > 0.0);
        let tc = cost.total_cost(design.n, design.m, design.total_time());
        let feasible = objective.is_some()
            && (tc - 1.0).abs() <= BOUND_SLACK
            && design.min_interval() >= cost.min_interval * (1.0 - BOUND_SLACK);
        Candidate {
            case,
            design: Some(design),
            objective,
            feasible,
            conditions_hold,
            note,
        }
    }
}

/// An optimal (approximate or integer) design with its provenance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlanResult {
    pub design: Design,
    pub objective: f64,
    pub case_label: CaseLabel,
    pub diagnostics: Vec<Candidate>,
}

/// Pick the feasible minimum. Ties go to a case whose conditions hold, then
/// to the smaller case index.
pub(crate) fn select(candidates: Vec<Candidate>, what: &'static str) -> Result<PlanResult> {
    let mut best: Option<usize> = None;
    for (i, c) in candidates.iter().enumerate() {
        if !c.feasible {
            continue;
        }
        let v = c.objective.unwrap_or(f64::INFINITY);
        best = match best {
            None => Some(i),
            Some(b) => {
                let incumbent = &candidates[b];
                let bv = incumbent.objective.unwrap_or(f64::INFINITY);
                let tie = (v - bv).abs() <= TIE_RTOL * bv;
                // on ties a case whose conditions hold beats one whose do not
                let rank = |x: &Candidate| (!x.conditions_hold, x.case);
                if (tie && rank(c) < rank(incumbent)) || (!tie && v < bv) {
                    Some(i)
                } else {
                    Some(b)
                }
            }
        };
    }
    let b = best.ok_or_else(|| Error::Instability {
        func: what,
        detail: "no candidate construction is feasible".into(),
    })?;
    let win = &candidates[b];
    let label = if win.conditions_hold {
        CaseLabel::Case(win.case)
    } else {
        CaseLabel::ByEnumeration(win.case)
    };
    Ok(PlanResult {
        design: win.design.clone().expect("feasible candidates carry a design"),
        objective: win.objective.expect("feasible candidates carry an objective"),
        case_label: label,
        diagnostics: candidates,
    })
}

/// Cost equality holds with the tightest possible design (one unit, one inspection at `dt`).
pub(crate) fn budget_is_degenerate(cost: &CostModel) -> bool {
    (cost.total_cost(1.0, 1.0, cost.min_interval) - 1.0).abs() <= BOUND_SLACK
}
