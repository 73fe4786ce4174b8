//! `optimize`: the reduced `(v, p)` optimum, thresholds, and the implied
//! raw strategy at a configured large `kappa0`.

use std::path::Path;

use serde::Serialize;

use deterrence_core::optimizer::{optimize, OptimizeOutcome, SolutionBranch};
use deterrence_core::welfare::{optimal_t_tau, thresholds};

use crate::config::RunConfig;
use crate::report::{self, Envelope};
use crate::CliError;

#[derive(Serialize)]
struct Thresholds {
    r_threshold: f64,
    fine_bound: f64,
}

#[derive(Serialize)]
struct Solution {
    p_star: f64,
    v_star: f64,
    f_star: f64,
    objective: f64,
    branch: &'static str,
}

#[derive(Serialize)]
struct ImpliedSchedule {
    kappa0: f64,
    t_star: f64,
    tau_star: f64,
    j2_min: f64,
}

#[derive(Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
enum Body {
    Ok {
        r: f64,
        thresholds: Thresholds,
        solution: Solution,
        implied: ImpliedSchedule,
    },
    PhaseFailure {
        r: f64,
        r_threshold: f64,
        detail: String,
    },
}

pub fn run(config: &RunConfig, out: &Path, strict: bool) -> Result<(), CliError> {
    let pop = config.population()?;
    let crime = config.crime()?;
    let costs = config.costs()?;
    let r = config
        .strategy
        .as_ref()
        .map(|s| s.r)
        .or_else(|| config.targets.as_ref().map(|t| t.r))
        .ok_or_else(|| {
            CliError::Validation("optimize needs the harshness from `strategy` or `targets`".into())
        })?;
    let gamma = pop.gamma.mu();
    let kappa0_large = config
        .optimize
        .as_ref()
        .map(|o| o.kappa0_large)
        .unwrap_or(30.0);

    let (r_thr, f_bound) = thresholds(&pop, &crime, r);
    let outcome = optimize(&pop, &crime, &costs, r, gamma)
        .map_err(|e| CliError::Validation(e.to_string()))?;

    let body = match outcome {
        OptimizeOutcome::PhaseFailure { r_threshold } => Body::PhaseFailure {
            r,
            r_threshold,
            detail: format!(
                "harshness {r} at or below the phase threshold {r_threshold}; \
                 explore finite kappa0 strategies with `phase-sweep` instead"
            ),
        },
        OptimizeOutcome::Solved(sol) => {
            let sched = optimal_t_tau(
                kappa0_large,
                &pop,
                &crime,
                &costs,
                sol.p_star,
                sol.v_star,
                r,
                gamma,
            )
            .map_err(|e| CliError::Validation(e.to_string()))?;
            Body::Ok {
                r,
                thresholds: Thresholds {
                    r_threshold: r_thr,
                    fine_bound: f_bound,
                },
                solution: Solution {
                    p_star: sol.p_star,
                    v_star: sol.v_star,
                    f_star: sol.f_star,
                    objective: sol.objective,
                    branch: match sol.branch {
                        SolutionBranch::Interior => "interior",
                        SolutionBranch::SpecialCase => "special-case",
                        SolutionBranch::Boundary => "boundary",
                    },
                },
                implied: ImpliedSchedule {
                    kappa0: kappa0_large,
                    t_star: sched.t_star,
                    tau_star: sched.tau_star,
                    j2_min: sched.j2_min,
                },
            }
        }
    };

    let phase_failure = matches!(&body, Body::PhaseFailure { .. });
    report::write_json(
        &out.join("optimize.json"),
        &Envelope::new("optimize", None, config, body),
    )?;
    if phase_failure && strict {
        return Err(CliError::Degenerate(format!(
            "phase failure: harshness {r} below threshold {r_thr}"
        )));
    }
    Ok(())
}
