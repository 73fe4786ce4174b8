pub mod eval_welfare;
pub mod fit_survey;
pub mod optimize;
pub mod phase_sweep;
pub mod simulate;

use deterrence_core::behavior::{
    psi, target_k0, target_w0, tau_for_target, BehaviorError, CrimeParams, StrategyTargets,
};
use deterrence_core::dist::PopulationModel;

use crate::config::RunConfig;
use crate::CliError;

/// Outcome of resolving a configuration into a targeting view plus the
/// `(t, tau)` pair the cost model needs.
pub enum Resolved {
    Ok {
        targets: StrategyTargets,
        t: f64,
        tau: f64,
    },
    /// The strategy deters nobody (targeted wealth below the minimum, or
    /// no targeted discount rate exists).
    Degenerate { reason: String },
}

/// Derives targets either from an explicit `targets` section (with `tau`
/// restored from the targeting constraint) or from a raw `strategy`
/// (solving for `w0` and `k0`).
pub fn resolve_targets(
    config: &RunConfig,
    pop: &PopulationModel,
    crime: &CrimeParams,
) -> Result<Resolved, CliError> {
    let gamma = pop.gamma.mu();
    match (&config.targets, &config.strategy) {
        (Some(_), Some(_)) => Err(CliError::Validation(
            "config must not carry both `targets` and `strategy`".into(),
        )),
        (Some(_), None) => {
            let targets = config.targets().unwrap();
            if !(targets.t > 0.0) {
                return Err(CliError::Validation(
                    "targets.t must be positive (celerity cost diverges at 0)".into(),
                ));
            }
            if targets.w0 < pop.wealth.w_m() {
                return Ok(Resolved::Degenerate {
                    reason: format!(
                        "targeted wealth {} below minimum wealth {}",
                        targets.w0,
                        pop.wealth.w_m()
                    ),
                });
            }
            let psi_v = psi(targets.p, crime, targets.r, gamma)
                .map_err(|e| CliError::Validation(format!("targets: {e}")))?;
            let tau = tau_for_target(targets.k0, targets.t, psi_v);
            if !tau.is_finite() {
                return Err(CliError::Validation(
                    "targets imply an imprisonment length beyond floating range".into(),
                ));
            }
            Ok(Resolved::Ok {
                targets,
                t: targets.t,
                tau,
            })
        }
        (None, Some(_)) => {
            let strategy = config.strategy()?;
            if !(strategy.t > 0.0) {
                return Err(CliError::Validation(
                    "strategy.t must be positive (celerity cost diverges at 0)".into(),
                ));
            }
            let w0 = match target_w0(&strategy, crime, gamma) {
                Ok(w0) => w0,
                Err(BehaviorError::DegenerateStrategy) => {
                    return Ok(Resolved::Degenerate {
                        reason: "stigma alone deters every member".into(),
                    })
                }
                Err(e) => return Err(CliError::Validation(format!("strategy: {e}"))),
            };
            if w0 < pop.wealth.w_m() {
                return Ok(Resolved::Degenerate {
                    reason: format!(
                        "strategy targets wealth {} below minimum wealth {}",
                        w0,
                        pop.wealth.w_m()
                    ),
                });
            }
            let k0 = match target_k0(&strategy, crime, gamma) {
                Ok(k0) => k0,
                Err(BehaviorError::NoRoot) => {
                    return Ok(Resolved::Degenerate {
                        reason: "imprisonment too weak to deter any discount rate".into(),
                    })
                }
                Err(e) => return Err(CliError::Validation(format!("strategy: {e}"))),
            };
            Ok(Resolved::Ok {
                targets: StrategyTargets {
                    p: strategy.p,
                    w0,
                    k0,
                    t: strategy.t,
                    r: strategy.r,
                },
                t: strategy.t,
                tau: strategy.tau,
            })
        }
        (None, None) => Err(CliError::Validation(
            "config needs either a `targets` or a `strategy` section".into(),
        )),
    }
}
