//! Run configuration: a single schema-checked JSON document. Unknown keys
//! are rejected so typos fail loudly instead of silently defaulting.

use std::path::Path;

use serde::{Deserialize, Serialize};

use deterrence_core::behavior::{CrimeParams, PenalStrategy, StrategyTargets};
use deterrence_core::dist::{DiscountDist, GammaDist, PopulationModel, WealthDist};
use deterrence_core::sim::{GammaMode, SimConfig};
use deterrence_core::welfare::CostParams;

use crate::CliError;

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    pub population: PopulationSection,
    pub crime: CrimeSection,
    pub costs: CostsSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strategy: Option<StrategySection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub targets: Option<TargetsSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sim: Option<SimSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub optimize: Option<OptimizeSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phase_sweep: Option<PhaseSweepSection>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct PopulationSection {
    pub alpha: f64,
    pub w_m: f64,
    pub rho: f64,
    pub beta: f64,
    pub mu_gamma: f64,
    pub sigma_gamma: f64,
    pub epsilon: f64,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct CrimeSection {
    pub b: f64,
    pub s: f64,
    pub l: f64,
    pub g: f64,
    pub lambda: f64,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct CostsSection {
    pub c_p: f64,
    pub c_f: f64,
    pub c_0: f64,
    pub c_t: f64,
    pub c_tau: f64,
    #[serde(default = "default_m_options")]
    pub m_options: f64,
}

fn default_m_options() -> f64 {
    2.0
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct StrategySection {
    pub p: f64,
    pub f: f64,
    pub t: f64,
    pub tau: f64,
    pub r: f64,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct TargetsSection {
    pub p: f64,
    pub w0: f64,
    pub k0: f64,
    pub t: f64,
    pub r: f64,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SimSection {
    pub n_agents: usize,
    pub delta_t: f64,
    pub lambda_rate: f64,
    pub seed: u64,
    #[serde(default = "default_gamma_mode")]
    pub gamma_mode: GammaModeSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub burglary_gain: Option<f64>,
}

fn default_gamma_mode() -> GammaModeSection {
    GammaModeSection::SharedMean
}

#[derive(Clone, Copy, Debug, Deserialize, Serialize, PartialEq, Eq)]
pub enum GammaModeSection {
    #[serde(rename = "shared-mean")]
    SharedMean,
    #[serde(rename = "per-agent")]
    PerAgent,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizeSection {
    #[serde(default = "default_kappa0_large")]
    pub kappa0_large: f64,
}

fn default_kappa0_large() -> f64 {
    30.0
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseSweepSection {
    pub r_min: f64,
    pub r_max: f64,
    pub f_min: f64,
    pub f_max: f64,
    pub grid_r: usize,
    pub grid_f: usize,
    #[serde(default = "default_kappa0_grid_min")]
    pub kappa0_min: f64,
    #[serde(default = "default_kappa0_grid_max")]
    pub kappa0_max: f64,
    #[serde(default = "default_kappa0_points")]
    pub kappa0_points: usize,
    #[serde(default = "default_sweep_p")]
    pub p: f64,
}

fn default_kappa0_grid_min() -> f64 {
    0.5
}
fn default_kappa0_grid_max() -> f64 {
    40.0
}
fn default_kappa0_points() -> usize {
    24
}
fn default_sweep_p() -> f64 {
    1.0
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Validation(format!("cannot read config {path:?}: {e}")))?;
        let cfg: RunConfig = serde_json::from_str(&text)
            .map_err(|e| CliError::Validation(format!("config parse error: {e}")))?;
        if cfg.schema_version != crate::SCHEMA_VERSION {
            return Err(CliError::Validation(format!(
                "unsupported schema_version {} (expected {})",
                cfg.schema_version,
                crate::SCHEMA_VERSION
            )));
        }
        Ok(cfg)
    }

    pub fn population(&self) -> Result<PopulationModel, CliError> {
        let p = &self.population;
        let wealth = WealthDist::new(p.alpha, p.w_m)
            .map_err(|e| CliError::Validation(format!("population.wealth: {e}")))?;
        let discount = DiscountDist::new(p.rho, p.beta)
            .map_err(|e| CliError::Validation(format!("population.discount: {e}")))?;
        let gamma = GammaDist::new(p.mu_gamma, p.sigma_gamma)
            .map_err(|e| CliError::Validation(format!("population.gamma: {e}")))?;
        PopulationModel::new(wealth, discount, gamma, p.epsilon)
            .map_err(|e| CliError::Validation(format!("population: {e}")))
    }

    pub fn crime(&self) -> Result<CrimeParams, CliError> {
        let c = &self.crime;
        let crime = CrimeParams {
            b: c.b,
            s: c.s,
            l: c.l,
            g: c.g,
            lambda: c.lambda,
        };
        crime
            .validate()
            .map_err(|e| CliError::Validation(format!("crime: {e}")))?;
        Ok(crime)
    }

    pub fn costs(&self) -> Result<CostParams, CliError> {
        let c = &self.costs;
        let costs = CostParams {
            c_p: c.c_p,
            c_f: c.c_f,
            c_0: c.c_0,
            c_t: c.c_t,
            c_tau: c.c_tau,
            m_options: c.m_options,
        };
        costs
            .validate()
            .map_err(|e| CliError::Validation(format!("costs: {e}")))?;
        Ok(costs)
    }

    pub fn strategy(&self) -> Result<PenalStrategy, CliError> {
        let s = self
            .strategy
            .as_ref()
            .ok_or_else(|| CliError::Validation("config needs a `strategy` section".into()))?;
        let strat = PenalStrategy {
            p: s.p,
            f: s.f,
            t: s.t,
            tau: s.tau,
            r: s.r,
        };
        strat
            .validate()
            .map_err(|e| CliError::Validation(format!("strategy: {e}")))?;
        Ok(strat)
    }

    pub fn targets(&self) -> Option<StrategyTargets> {
        self.targets.as_ref().map(|t| StrategyTargets {
            p: t.p,
            w0: t.w0,
            k0: t.k0,
            t: t.t,
            r: t.r,
        })
    }

    pub fn sim(&self, seed_override: Option<u64>) -> Result<SimConfig, CliError> {
        let s = self
            .sim
            .as_ref()
            .ok_or_else(|| CliError::Validation("config needs a `sim` section".into()))?;
        let cfg = SimConfig {
            n_agents: s.n_agents,
            delta_t: s.delta_t,
            lambda_rate: s.lambda_rate,
            seed: seed_override.unwrap_or(s.seed),
            gamma_mode: match s.gamma_mode {
                GammaModeSection::SharedMean => GammaMode::SharedMean,
                GammaModeSection::PerAgent => GammaMode::PerAgent,
            },
        };
        cfg.validate()
            .map_err(|e| CliError::Validation(format!("sim: {e}")))?;
        Ok(cfg)
    }
}
