//! `degplan`: plan, evaluate and analyse gamma-process degradation tests.

// `!(x > y)` guards deliberately reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod error;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::commands::Output;
use crate::config::RunConfig;
use crate::error::CliError;

#[derive(Parser)]
#[command(
    name = "degplan",
    version,
    about = "Optimal inspection plans for gamma degradation tests"
)]
struct Cli {
    #[command(flatten)]
    shared: Shared,

    #[command(subcommand)]
    command: Command,
}

/// Flags accepted by every subcommand. Each overrides the same key of `--config`.
#[derive(Args)]
struct Shared {
    /// Shape rate of the gamma process
    #[arg(long, global = true)]
    alpha: Option<f64>,
    /// Log mean degradation rate
    #[arg(long, global = true, allow_negative_numbers = true)]
    gamma: Option<f64>,
    /// Failure threshold
    #[arg(long, global = true)]
    eta: Option<f64>,
    /// Lifetime quantile level for V-optimality
    #[arg(long, global = true)]
    p: Option<f64>,
    /// D, A or V
    #[arg(long, global = true)]
    criterion: Option<String>,
    /// type1 (periodic) or type2 (free intervals)
    #[arg(long, global = true)]
    family: Option<String>,
    /// Cost per test unit
    #[arg(long, global = true)]
    c_it: Option<f64>,
    /// Cost per measurement
    #[arg(long, global = true)]
    c_mea: Option<f64>,
    /// Operating cost per unit time
    #[arg(long, global = true)]
    c_op: Option<f64>,
    /// Minimum inspection interval
    #[arg(long, global = true)]
    dt: Option<f64>,
    /// Total budget; costs are divided by it (default 1)
    #[arg(long, global = true)]
    budget: Option<f64>,
    /// JSON file with any of the keys above
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Also write the result to this file
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Refine the plan to integer n and m
    #[arg(long, global = true)]
    integer: bool,
    /// Half-width of the integer search in n
    #[arg(long, global = true)]
    radius: Option<u32>,
    /// Significant digits in reports (default 6)
    #[arg(long, global = true)]
    precision: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Optimal design under the budget, or the optimal interval for fixed n and m
    Plan {
        #[arg(long)]
        n: Option<f64>,
        #[arg(long)]
        m: Option<f64>,
    },
    /// Objective and variances of a given design
    Eval {
        #[arg(long)]
        n: Option<f64>,
        #[arg(long)]
        m: Option<f64>,
        /// Periodic interval (type1)
        #[arg(long)]
        tau: Option<f64>,
        /// Total test time
        #[arg(long)]
        total: Option<f64>,
        /// Explicit comma-separated intervals
        #[arg(long, value_delimiter = ',')]
        intervals: Option<Vec<f64>>,
    },
    /// Maximum-likelihood fit of a `unit,time,value` CSV
    Fit { data: Option<PathBuf> },
    /// Simulate degradation paths as `unit,time,value` CSV
    Simulate {
        #[arg(long)]
        units: Option<usize>,
        /// Comma-separated inspection times
        #[arg(long, value_delimiter = ',')]
        times: Option<Vec<f64>>,
    },
    /// Relative efficiency (%) of plans made with misestimated parameters
    Sensitivity {
        #[arg(long)]
        sigma_alpha: Option<f64>,
        #[arg(long)]
        sigma_gamma: Option<f64>,
        /// Comma-separated multiples of sigma, e.g. -3,-2,-1,0,1,2,3
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        multipliers: Option<Vec<i32>>,
    },
    /// Curve data as CSV: phi_vs_tau, K or objective_vs_tau
    Curve {
        #[arg(long)]
        which: Option<String>,
        #[arg(long)]
        lo: Option<f64>,
        #[arg(long)]
        hi: Option<f64>,
        #[arg(long)]
        points: Option<usize>,
        /// log or linear
        #[arg(long)]
        scale: Option<String>,
        /// Units for objective_vs_tau
        #[arg(long)]
        n: Option<f64>,
        /// Inspections for objective_vs_tau
        #[arg(long)]
        m: Option<f64>,
    },
}

fn flags(cli: &Cli) -> RunConfig {
    let s = &cli.shared;
    let mut c = RunConfig {
        alpha: s.alpha,
        gamma: s.gamma,
        eta: s.eta,
        p: s.p,
        criterion: s.criterion.clone(),
        family: s.family.clone(),
        c_it: s.c_it,
        c_mea: s.c_mea,
        c_op: s.c_op,
        dt: s.dt,
        budget: s.budget,
        seed: s.seed,
        integer: s.integer.then_some(true),
        radius: s.radius,
        precision: s.precision,
        out: s.out.clone(),
        ..RunConfig::default()
    };
    match &cli.command {
        Command::Plan { n, m } => (c.n, c.m) = (*n, *m),
        Command::Eval {
            n,
            m,
            tau,
            total,
            intervals,
        } => {
            (c.n, c.m, c.tau, c.total, c.intervals) = (*n, *m, *tau, *total, intervals.clone());
        }
        Command::Fit { data } => c.data = data.clone(),
        Command::Simulate { units, times } => (c.units, c.times) = (*units, times.clone()),
        Command::Sensitivity {
            sigma_alpha,
            sigma_gamma,
            multipliers,
        } => {
            (c.sigma_alpha, c.sigma_gamma, c.multipliers) = (*sigma_alpha, *sigma_gamma, multipliers.clone());
        }
        Command::Curve {
            which,
            lo,
            hi,
            points,
            scale,
            n,
            m,
        } => {
            (c.which, c.lo, c.hi, c.points, c.scale) = (which.clone(), *lo, *hi, *points, scale.clone());
            (c.n, c.m) = (*n, *m);
        }
    }
    c
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let base = match &cli.shared.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let cfg = base.merge(&flags(cli));
    let output = match cli.command {
        Command::Plan { .. } if cfg.n.is_some() && cfg.m.is_some() => commands::fixed_nm(&cfg)?,
        Command::Plan { .. } => commands::plan(&cfg)?,
        Command::Eval { .. } => commands::eval(&cfg)?,
        Command::Fit { .. } => commands::fit(&cfg)?,
        Command::Simulate { .. } => commands::simulate_cmd(&cfg)?,
        Command::Sensitivity { .. } => commands::sensitivity(&cfg)?,
        Command::Curve { .. } => commands::curve(&cfg)?,
    };
    match output {
        Output::Report(v) => {
            let mut text = serde_json::to_string_pretty(&v).expect("report serializes");
            text.push('\n');
            io::emit(&text, cfg.out.as_deref(), true)
        }
        Output::Table(text) => io::emit(&text, cfg.out.as_deref(), false),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.record());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
