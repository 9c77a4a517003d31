//! JSON run configuration merged with command-line overrides.

use std::path::{Path, PathBuf};

use degplan::{CostModel, Criterion, CriterionKind, Family, LifetimeSpec, ProcessParams};
use serde::Deserialize;

use crate::error::CliError;

/// Every recognised key. All are optional so that a file can hold any subset;
/// the command that runs decides what is required.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub alpha: Option<f64>,
    pub gamma: Option<f64>,
    pub eta: Option<f64>,
    pub p: Option<f64>,
    pub criterion: Option<String>,
    pub family: Option<String>,
    pub c_it: Option<f64>,
    pub c_mea: Option<f64>,
    pub c_op: Option<f64>,
    pub dt: Option<f64>,
    pub budget: Option<f64>,
    pub seed: Option<u64>,
    pub integer: Option<bool>,
    pub radius: Option<u32>,
    pub precision: Option<usize>,
    pub out: Option<PathBuf>,

    pub n: Option<f64>,
    pub m: Option<f64>,
    pub tau: Option<f64>,
    pub total: Option<f64>,
    pub intervals: Option<Vec<f64>>,

    pub data: Option<PathBuf>,
    pub units: Option<usize>,
    pub times: Option<Vec<f64>>,

    pub sigma_alpha: Option<f64>,
    pub sigma_gamma: Option<f64>,
    pub multipliers: Option<Vec<i32>>,

    pub which: Option<String>,
    pub lo: Option<f64>,
    pub hi: Option<f64>,
    pub points: Option<usize>,
    pub scale: Option<String>,
}

/// Copy every `Some` field of `$src` over `$dst`.
macro_rules! overlay {
    ($dst:expr, $src:expr; $($f:ident),* $(,)?) => {
        $( if $src.$f.is_some() { $dst.$f = $src.$f.clone(); } )*
    };
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    /// Fields set in `flags` win.
    pub fn merge(mut self, flags: &RunConfig) -> Self {
        overlay!(self, flags;
            alpha, gamma, eta, p, criterion, family, c_it, c_mea, c_op, dt, budget, seed,
            integer, radius, precision, out, n, m, tau, total, intervals, data, units, times,
            sigma_alpha, sigma_gamma, multipliers, which, lo, hi, points, scale,
        );
        self
    }

    pub fn require<T: Copy>(value: Option<T>, field: &'static str) -> Result<T, CliError> {
        value.ok_or(CliError::Missing(field))
    }

    pub fn params(&self) -> Result<ProcessParams, CliError> {
        Ok(ProcessParams::new(
            Self::require(self.alpha, "alpha")?,
            Self::require(self.gamma, "gamma")?,
        )?)
    }

    /// Shape only; `gamma` defaults to zero where it cannot matter.
    pub fn shape_params(&self) -> Result<ProcessParams, CliError> {
        Ok(ProcessParams::new(
            Self::require(self.alpha, "alpha")?,
            self.gamma.unwrap_or(0.0),
        )?)
    }

    pub fn lifetime(&self) -> Result<Option<LifetimeSpec>, CliError> {
        match (self.eta, self.p) {
            (None, None) => Ok(None),
            (eta, p) => Ok(Some(LifetimeSpec::new(
                Self::require(eta, "eta")?,
                Self::require(p, "p")?,
            )?)),
        }
    }

    pub fn criterion_kind(&self) -> Result<Option<CriterionKind>, CliError> {
        self.criterion
            .as_deref()
            .map(str::parse)
            .transpose()
            .map_err(Into::into)
    }

    pub fn criterion(&self) -> Result<Criterion, CliError> {
        let kind = self.criterion_kind()?.ok_or(CliError::Missing("criterion"))?;
        Ok(Criterion::new(kind, self.lifetime()?)?)
    }

    /// The requested criterion, or every criterion the inputs allow.
    pub fn criteria(&self) -> Result<Vec<Criterion>, CliError> {
        if self.criterion.is_some() {
            return Ok(vec![self.criterion()?]);
        }
        let mut out = vec![Criterion::d(), Criterion::a()];
        if let Some(spec) = self.lifetime()? {
            out.push(Criterion::v(spec));
        }
        Ok(out)
    }

    pub fn family(&self) -> Result<Family, CliError> {
        Ok(self
            .family
            .as_deref()
            .map(str::parse)
            .transpose()?
            .unwrap_or(Family::Type1))
    }

    pub fn has_costs(&self) -> bool {
        self.c_it.is_some() || self.c_mea.is_some() || self.c_op.is_some()
    }

    /// Costs divided by the budget, so the constraint reads `total cost = 1`.
    pub fn cost(&self) -> Result<CostModel, CliError> {
        Ok(CostModel::with_budget(
            Self::require(self.c_it, "c_it")?,
            Self::require(self.c_mea, "c_mea")?,
            Self::require(self.c_op, "c_op")?,
            Self::require(self.dt, "dt")?,
            self.budget.unwrap_or(1.0),
        )?)
    }

    pub fn precision(&self) -> Result<Option<usize>, CliError> {
        match self.precision {
            Some(0) | Some(18..) => Err(CliError::invalid("precision", "must be between 1 and 17")),
            p => Ok(p),
        }
    }
}
