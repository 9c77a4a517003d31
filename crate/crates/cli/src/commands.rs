use degplan::analysis::{integer_search, optimal_for_family, sensitivity_table, SensitivityGrid, DEFAULT_RADIUS};
use degplan::criteria::{fisher_information, k_boundaries};
use degplan::fit::{mle_fit, simulate};
use degplan::plan_type1::optimal_tau_fixed_nm;
use degplan::roots::{linear_grid, log_grid};
use degplan::{CostModel, CriterionKind, Design, Family, PlanResult, Schedule};
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::io::{dataset_csv, read_dataset, Fmt, DEFAULT_DIGITS};

pub enum Output {
    Report(Value),
    Table(String),
}

fn report_fmt(cfg: &RunConfig) -> Result<Fmt, CliError> {
    Ok(Fmt(Some(cfg.precision()?.unwrap_or(DEFAULT_DIGITS))))
}

fn design_json(d: &Design, f: Fmt) -> Value {
    let schedule = match &d.schedule {
        Schedule::Periodic { tau } => json!({ "kind": "periodic", "tau": f.num(*tau) }),
        Schedule::LongThenMinimal { total, dt } => json!({
            "kind": "long_then_minimal",
            "first": f.num(total - (d.m - 1.0) * dt),
            "dt": f.num(*dt),
        }),
        Schedule::Aperiodic { intervals } => json!({
            "kind": "aperiodic",
            "intervals": intervals.iter().map(|x| f.num(*x)).collect::<Vec<_>>(),
        }),
    };
    json!({
        "n": f.num(d.n),
        "m": f.num(d.m),
        "total_time": f.num(d.total_time()),
        "schedule": schedule,
    })
}

fn plan_json(p: &PlanResult, cost: &CostModel, f: Fmt) -> Value {
    let d = &p.design;
    json!({
        "case": p.case_label.to_string(),
        "objective": f.num(p.objective),
        "total_cost": f.num(cost.total_cost(d.n, d.m, d.total_time())),
        "design": design_json(d, f),
    })
}

pub fn plan(cfg: &RunConfig) -> Result<Output, CliError> {
    let f = report_fmt(cfg)?;
    let params = cfg.params()?;
    let crit = cfg.criterion()?;
    let family = cfg.family()?;
    let cost = cfg.cost()?;
    let plan = optimal_for_family(&params, &crit.resolve(&params)?, &cost, family)?;
    let mut out = json!({
        "command": "plan",
        "family": family.to_string(),
        "criterion": crit.kind.to_string(),
        "plan": plan_json(&plan, &cost, f),
    });
    if cfg.integer.unwrap_or(false) {
        let radius = cfg.radius.unwrap_or(DEFAULT_RADIUS);
        let int = integer_search(&params, &crit, &cost, family, &plan, radius)?;
        out["integer"] = plan_json(&int, &cost, f);
        out["integer"]["efficiency"] = f.num(plan.objective / int.objective);
    }
    Ok(Output::Report(out))
}

fn eval_design(cfg: &RunConfig) -> Result<Design, CliError> {
    let n = RunConfig::require(cfg.n, "n")?;
    if let Some(iv) = &cfg.intervals {
        return Ok(Design::aperiodic(n, iv.clone())?);
    }
    let m = RunConfig::require(cfg.m, "m")?;
    match cfg.family()? {
        Family::Type2 => {
            let total = RunConfig::require(cfg.total, "total")?;
            Ok(Design::long_then_minimal(
                n,
                m,
                total,
                RunConfig::require(cfg.dt, "dt")?,
            )?)
        }
        Family::Type1 => match (cfg.tau, cfg.total) {
            (Some(tau), _) => Ok(Design::periodic(n, m, tau)?),
            (None, Some(total)) => Ok(Design::periodic(n, m, total / m)?),
            (None, None) => Err(CliError::Missing("tau")),
        },
    }
}

pub fn eval(cfg: &RunConfig) -> Result<Output, CliError> {
    let f = report_fmt(cfg)?;
    let params = cfg.params()?;
    let crit = cfg.criterion()?;
    let d = eval_design(cfg)?;
    let objective = crit.resolve(&params)?.objective(&params, &d)?;
    let (va, vg) = fisher_information(&params, &d)?.variances();
    let mut out = json!({
        "command": "eval",
        "criterion": crit.kind.to_string(),
        "objective": f.num(objective),
        "var_alpha": f.num(va),
        "var_gamma": f.num(vg),
        "design": design_json(&d, f),
    });
    if cfg.has_costs() {
        let cost = cfg.cost()?;
        let tc = cost.total_cost(d.n, d.m, d.total_time());
        out["total_cost"] = f.num(tc);
        out["feasible"] = json!(tc <= 1.0 + 1e-9 && d.min_interval() >= cost.min_interval * (1.0 - 1e-9));
    }
    Ok(Output::Report(out))
}

pub fn fit(cfg: &RunConfig) -> Result<Output, CliError> {
    let f = report_fmt(cfg)?;
    let path = cfg.data.as_deref().ok_or(CliError::Missing("data"))?;
    let data = read_dataset(path)?;
    let fit = mle_fit(&data)?;
    Ok(Output::Report(json!({
        "command": "fit",
        "alpha": f.num(fit.params.alpha),
        "gamma": f.num(fit.params.gamma),
        "var_alpha": f.num(fit.covariance[0][0]),
        "var_gamma": f.num(fit.covariance[1][1]),
        "log_likelihood": f.num(fit.log_likelihood),
        "units": data.units.len(),
        "increments": fit.report.increments,
    })))
}

pub fn simulate_cmd(cfg: &RunConfig) -> Result<Output, CliError> {
    let params = cfg.params()?;
    let units = RunConfig::require(cfg.units, "units")?;
    let times = cfg.times.as_deref().ok_or(CliError::Missing("times"))?;
    let data = simulate(&params, units, times, cfg.seed.unwrap_or(0))?;
    // data keep every digit unless asked otherwise; rounding can create zero increments
    Ok(Output::Table(dataset_csv(&data, Fmt(cfg.precision()?))?))
}

pub fn sensitivity(cfg: &RunConfig) -> Result<Output, CliError> {
    let f = report_fmt(cfg)?;
    let params = cfg.params()?;
    let cost = cfg.cost()?;
    let family = cfg.family()?;
    let base = SensitivityGrid::default();
    let grid = SensitivityGrid {
        sigma_alpha: cfg.sigma_alpha.unwrap_or(base.sigma_alpha),
        sigma_gamma: cfg.sigma_gamma.unwrap_or(base.sigma_gamma),
        multipliers: cfg.multipliers.clone().unwrap_or(base.multipliers),
    };
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["criterion".to_string(), "gamma".to_string()];
    header.extend(grid.multipliers.iter().map(i32::to_string));
    let mut rows = vec![header];
    for crit in cfg.criteria()? {
        let t = sensitivity_table(&params, &grid, &crit, &cost, family)?;
        for (g, row) in t.gamma_multipliers.iter().zip(&t.rows) {
            let label = match t.criterion {
                CriterionKind::V => g.to_string(),
                _ => "-".to_string(),
            };
            let mut r = vec![t.criterion.to_string(), label];
            r.extend(
                row.iter()
                    .map(|c| c.efficiency.map_or("NA".to_string(), |e| f.cell(100.0 * e))),
            );
            rows.push(r);
        }
    }
    for r in rows {
        w.write_record(&r).map_err(|e| CliError::Config(format!("csv: {e}")))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Config(format!("csv: {e}")))?;
    Ok(Output::Table(String::from_utf8(bytes).expect("csv output is utf-8")))
}

pub fn curve(cfg: &RunConfig) -> Result<Output, CliError> {
    let f = report_fmt(cfg)?;
    let lo = RunConfig::require(cfg.lo, "lo")?;
    let hi = RunConfig::require(cfg.hi, "hi")?;
    let points = cfg.points.unwrap_or(200);
    if !(lo > 0.0 && hi >= lo && lo.is_finite() && hi.is_finite()) {
        return Err(CliError::invalid("lo", format!("need 0 < lo <= hi, got [{lo}, {hi}]")));
    }
    if points == 0 {
        return Err(CliError::invalid("points", "must be at least 1"));
    }
    let grid = match cfg.scale.as_deref().unwrap_or("log") {
        "log" => log_grid(lo, hi, points),
        "linear" => linear_grid(lo, hi, points),
        other => {
            return Err(CliError::invalid(
                "scale",
                format!("expected log or linear, got `{other}`"),
            ))
        }
    };
    let which = cfg.which.as_deref().ok_or(CliError::Missing("which"))?;
    let mut header = vec!["tau".to_string()];
    let mut columns: Vec<Box<dyn Fn(f64) -> f64>> = Vec::new();
    match which {
        "phi_vs_tau" => {
            let params = cfg.shape_params()?;
            for crit in cfg.criteria()? {
                let r = crit.resolve(&params)?;
                header.push(format!("phi_{}", crit.kind));
                columns.push(Box::new(move |t| r.phi_tau(params.alpha, t)));
            }
        }
        "K" | "k" => {
            let cost = cfg.cost()?;
            header.extend(["k1", "k2", "k3", "k"].map(String::from));
            columns.push(Box::new(move |t| cost.k1(t)));
            columns.push(Box::new(move |t| cost.k2(t)));
            columns.push(Box::new(move |t| cost.k3(t)));
            columns.push(Box::new(move |t| k_boundaries(&cost, t).map_or(f64::NAN, |k| k.k)));
        }
        "objective_vs_tau" => {
            let params = cfg.shape_params()?;
            let (n, m) = (cfg.n.unwrap_or(1.0), cfg.m.unwrap_or(1.0));
            Design::periodic(n, m, lo)?;
            for crit in cfg.criteria()? {
                let r = crit.resolve(&params)?;
                header.push(format!("objective_{}", crit.kind));
                columns.push(Box::new(move |t| {
                    Design::periodic(n, m, t)
                        .and_then(|d| r.objective(&params, &d))
                        .unwrap_or(f64::NAN)
                }));
            }
        }
        other => {
            return Err(CliError::invalid(
                "which",
                format!("expected phi_vs_tau, K or objective_vs_tau, got `{other}`"),
            ))
        }
    }
    let mut text = header.join(",");
    text.push('\n');
    for &t in &grid {
        let mut row = vec![f.cell(t)];
        row.extend(columns.iter().map(|c| f.cell(c(t))));
        text.push_str(&row.join(","));
        text.push('\n');
    }
    Ok(Output::Table(text))
}

/// Optimal interval for fixed `(n, m)`, reported by `plan` when `--n` and `--m` are given.
pub fn fixed_nm(cfg: &RunConfig) -> Result<Output, CliError> {
    let f = report_fmt(cfg)?;
    let params = cfg.params()?;
    let crit = cfg.criterion()?;
    let n = RunConfig::require(cfg.n, "n")?;
    let m = RunConfig::require(cfg.m, "m")?;
    let dt = cfg.dt.unwrap_or(f64::MIN_POSITIVE);
    let p = optimal_tau_fixed_nm(&params, &crit, n, m, dt, None)?;
    Ok(Output::Report(json!({
        "command": "plan",
        "criterion": crit.kind.to_string(),
        "verdict": format!("{:?}", p.verdict),
        "tau": p.tau.map(|t| f.num(t)),
        "ratio": p.ratio.map(|r| f.num(r)),
        "objective": p.objective.map(|v| f.num(v)),
        "design": p.design.as_ref().map(|d| design_json(d, f)),
    })))
}
