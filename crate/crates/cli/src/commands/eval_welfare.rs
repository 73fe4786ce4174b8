//! `eval-welfare`: all three evaluation tiers plus pairwise deviations.

use std::path::Path;

use serde::Serialize;

use deterrence_core::welfare::{welfare_asymptotic, welfare_closed_form, welfare_quadrature};

use crate::commands::{resolve_targets, Resolved};
use crate::config::RunConfig;
use crate::report::{self, BreakdownOut, Envelope, TierDeviation};
use crate::CliError;

#[derive(Serialize)]
struct Tiers {
    quadrature: BreakdownOut,
    closed_form: BreakdownOut,
    asymptotic: BreakdownOut,
}

#[derive(Serialize)]
struct Deviations {
    closed_vs_quadrature: TierDeviation,
    asymptotic_vs_closed: TierDeviation,
}

#[derive(Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
#[allow(clippy::large_enum_variant)]
enum Body {
    Ok {
        targets: TargetsOut,
        t: f64,
        tau: f64,
        tiers: Tiers,
        deviations: Deviations,
    },
    DegenerateStrategy {
        reason: String,
    },
}

#[derive(Serialize)]
struct TargetsOut {
    p: f64,
    w0: f64,
    k0: f64,
    t: f64,
    r: f64,
    v: f64,
    kappa0: f64,
}

pub fn run(config: &RunConfig, out: &Path, strict: bool) -> Result<(), CliError> {
    let pop = config.population()?;
    let crime = config.crime()?;
    let costs = config.costs()?;

    let body = match resolve_targets(config, &pop, &crime)? {
        Resolved::Degenerate { reason } => Body::DegenerateStrategy { reason },
        Resolved::Ok { targets, t, tau } => {
            let map_err =
                |e: deterrence_core::welfare::WelfareError| CliError::Validation(e.to_string());
            let q = welfare_quadrature(&targets, &pop, &crime, &costs, t, tau).map_err(map_err)?;
            let c = welfare_closed_form(&targets, &pop, &crime, &costs, t, tau).map_err(map_err)?;
            let a = welfare_asymptotic(&targets, &pop, &crime, &costs, t, tau).map_err(map_err)?;
            Body::Ok {
                targets: TargetsOut {
                    p: targets.p,
                    w0: targets.w0,
                    k0: targets.k0,
                    t: targets.t,
                    r: targets.r,
                    v: pop.wealth.w_m() / targets.w0,
                    kappa0: targets.k0 / pop.discount.beta(),
                },
                t,
                tau,
                tiers: Tiers {
                    quadrature: (&q).into(),
                    closed_form: (&c).into(),
                    asymptotic: (&a).into(),
                },
                deviations: Deviations {
                    closed_vs_quadrature: TierDeviation::between(&c, &q),
                    asymptotic_vs_closed: TierDeviation::between(&a, &c),
                },
            }
        }
    };

    let degenerate_reason = match &body {
        Body::DegenerateStrategy { reason } => Some(reason.clone()),
        Body::Ok { .. } => None,
    };
    report::write_json(
        &out.join("eval_welfare.json"),
        &Envelope::new("eval-welfare", None, config, body),
    )?;
    match degenerate_reason {
        Some(reason) if strict => Err(CliError::Degenerate(format!(
            "degenerate strategy: {reason}"
        ))),
        _ => Ok(()),
    }
}
