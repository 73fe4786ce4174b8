//! `fit-survey`: estimates the discount-rate and weighting-factor
//! distributions, the harshness median, and the median-split independence
//! table from a survey CSV; emits histogram tables for plotting.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use deterrence_core::estimate::{
    estimate_gamma, estimate_gamma_population, estimate_harshness, estimate_k, estimate_rho_beta,
    independence_split, EstimateError, EstimateWithSE, KEstimate, SigmaTables, SurveyResponse,
};
use deterrence_core::fmath::erf;

use crate::config::RunConfig;
use crate::report::{self, EstimateOut};
use crate::survey;
use crate::CliError;

#[derive(Serialize)]
struct FitReport {
    schema_version: u32,
    command: &'static str,
    input: String,
    input_rows: usize,
    k_distribution: Section<KSection>,
    gamma: Section<GammaSection>,
    harshness: Section<HarshnessSection>,
    independence: Section<IndependenceSection>,
}

#[derive(Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
enum Section<T: Serialize> {
    Ok {
        #[serde(flatten)]
        body: T,
    },
    InsufficientData {
        detail: String,
    },
}

#[derive(Serialize)]
struct KSection {
    rho: EstimateOut,
    #[serde(skip_serializing_if = "Option::is_none")]
    beta: Option<EstimateOut>,
    respondents: usize,
}

#[derive(Serialize)]
struct GammaSection {
    mu_gamma: EstimateOut,
    sigma_gamma: EstimateOut,
    clamped: bool,
    respondents: usize,
    boundary_fits: usize,
}

#[derive(Serialize)]
struct HarshnessSection {
    median: f64,
    respondents: usize,
    skipped: usize,
}

#[derive(Serialize)]
struct IndependenceSection {
    rows: Vec<IndependenceRow>,
}

#[derive(Serialize)]
struct IndependenceRow {
    split_by: &'static str,
    parameter: &'static str,
    low: EstimateOut,
    high: EstimateOut,
    z: f64,
}

pub fn run(config: Option<&RunConfig>, input: &Path, out: &Path) -> Result<(), CliError> {
    let _ = config; // survey fitting is config-free; flag accepted for symmetry
    let file = std::fs::File::open(input)
        .map_err(|e| CliError::Validation(format!("cannot open survey {input:?}: {e}")))?;
    let (rows, errors) = survey::parse_survey(file)?;
    if !errors.is_empty() {
        report::write_json(&out.join("fit_survey_errors.json"), &errors)?;
        return Err(CliError::Validation(format!(
            "{} malformed survey rows; see fit_survey_errors.json",
            errors.len()
        )));
    }

    let tables = SigmaTables::build().map_err(|e| CliError::Validation(e.to_string()))?;

    // per-respondent estimates, index-aligned with `rows`
    let k_ests: Vec<Option<KEstimate>> = rows.iter().map(|r| estimate_k(r, &tables)).collect();
    let full_fits: Vec<Option<deterrence_core::estimate::GammaFit>> =
        rows.iter().map(|r| estimate_gamma(r).ok()).collect();
    let boundary_fits = full_fits.iter().flatten().filter(|f| f.boundary).count();
    let gamma_fits: Vec<Option<(f64, f64)>> = full_fits
        .iter()
        .map(|f| f.as_ref().map(|fit| (fit.gamma.value, fit.gamma.se)))
        .collect();

    let k_list: Vec<KEstimate> = k_ests.iter().flatten().copied().collect();
    let k_section = match estimate_rho_beta(&k_list) {
        Ok(est) => {
            write_k_histogram(out, &k_list, &est)?;
            Section::Ok {
                body: KSection {
                    rho: est.rho.into(),
                    beta: est.beta.map(Into::into),
                    respondents: k_list.len(),
                },
            }
        }
        Err(e) => Section::InsufficientData {
            detail: e.to_string(),
        },
    };

    let gamma_list: Vec<(f64, f64)> = gamma_fits.iter().flatten().copied().collect();
    let gamma_section = match estimate_gamma_population(&gamma_list) {
        Ok(popfit) => {
            write_gamma_histogram(out, &gamma_list, &popfit.mu)?;
            Section::Ok {
                body: GammaSection {
                    mu_gamma: popfit.mu.into(),
                    sigma_gamma: popfit.sd.into(),
                    clamped: popfit.clamped,
                    respondents: gamma_list.len(),
                    boundary_fits,
                },
            }
        }
        Err(e) => Section::InsufficientData {
            detail: e.to_string(),
        },
    };

    let mut harshness: Vec<f64> = Vec::new();
    let mut skipped = 0usize;
    for (row, k_est) in rows.iter().zip(&k_ests) {
        match k_est.and_then(|k| estimate_harshness(row, k.k_hat)) {
            Some(r) => harshness.push(r),
            None => skipped += 1,
        }
    }
    let harshness_section = if harshness.is_empty() {
        Section::InsufficientData {
            detail: "no respondent carries salary, delays, and a detention answer".into(),
        }
    } else {
        harshness.sort_by(f64::total_cmp);
        let n = harshness.len();
        let median = if n % 2 == 1 {
            harshness[n / 2]
        } else {
            0.5 * (harshness[n / 2 - 1] + harshness[n / 2])
        };
        Section::Ok {
            body: HarshnessSection {
                median,
                respondents: n,
                skipped,
            },
        }
    };

    let independence_section = match independence_rows(&rows, &k_ests, &gamma_fits) {
        Ok(rows) if !rows.is_empty() => Section::Ok {
            body: IndependenceSection { rows },
        },
        Ok(_) => Section::InsufficientData {
            detail: "no pairing has enough joint answers".into(),
        },
        Err(e) => Section::InsufficientData {
            detail: e.to_string(),
        },
    };

    let fit = FitReport {
        schema_version: crate::SCHEMA_VERSION,
        command: "fit-survey",
        input: input.display().to_string(),
        input_rows: rows.len(),
        k_distribution: k_section,
        gamma: gamma_section,
        harshness: harshness_section,
        independence: independence_section,
    };
    report::write_json(&out.join("fit_survey.json"), &fit)?;
    Ok(())
}

/// Expected-count histogram table: `bin_left,bin_right,count,fitted_density`.
fn write_histogram(
    path: &Path,
    values: &[f64],
    bin_width: f64,
    model_mass: impl Fn(f64, f64) -> f64,
    n: usize,
) -> Result<(), CliError> {
    let max = values.iter().cloned().fold(0.0f64, f64::max);
    let bins = ((max / bin_width).floor() as usize + 1).max(1);
    let mut counts = vec![0usize; bins];
    for &v in values {
        let idx = ((v / bin_width) as usize).min(bins - 1);
        counts[idx] += 1;
    }
    let mut text = String::from("bin_left,bin_right,count,fitted_density\n");
    for (i, count) in counts.iter().enumerate() {
        let left = i as f64 * bin_width;
        let right = left + bin_width;
        let fitted = model_mass(left, right) * n as f64;
        text.push_str(&format!("{left},{right},{count},{fitted}\n"));
    }
    let mut file = std::fs::File::create(path)?;
    file.write_all(text.as_bytes())?;
    Ok(())
}

fn write_k_histogram(
    out: &Path,
    k_list: &[KEstimate],
    est: &deterrence_core::estimate::RhoBetaEstimate,
) -> Result<(), CliError> {
    let Some(beta) = est.beta.as_ref() else {
        return Ok(());
    };
    let values: Vec<f64> = k_list.iter().map(|k| k.k_hat).collect();
    let rho = est.rho.value;
    let beta = beta.value;
    // fitted zero-inflated exponential mass per bin; the atom lands in the
    // first bin
    let mass = move |left: f64, right: f64| -> f64 {
        let tail = |x: f64| (-x / beta).exp();
        let cont = rho * (tail(left) - tail(right));
        if left == 0.0 {
            cont + (1.0 - rho)
        } else {
            cont
        }
    };
    write_histogram(
        &out.join("k_histogram.csv"),
        &values,
        beta / 4.0,
        mass,
        values.len(),
    )
}

fn write_gamma_histogram(
    out: &Path,
    fits: &[(f64, f64)],
    mu: &EstimateWithSE,
) -> Result<(), CliError> {
    let values: Vec<f64> = fits.iter().map(|f| f.0).collect();
    let n = values.len() as f64;
    let mean = mu.value;
    // the histogram shows the estimates, whose spread includes the
    // per-respondent fit noise; use their sample sd for the overlay
    let sd = (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)).sqrt();
    let phi = move |x: f64| 0.5 * (1.0 + erf((x - mean) / (sd * std::f64::consts::SQRT_2)));
    let mass = move |left: f64, right: f64| phi(right) - phi(left);
    write_histogram(
        &out.join("gamma_histogram.csv"),
        &values,
        0.02,
        mass,
        values.len(),
    )
}

fn independence_rows(
    rows: &[SurveyResponse],
    k_ests: &[Option<KEstimate>],
    gamma_fits: &[Option<(f64, f64)>],
) -> Result<Vec<IndependenceRow>, EstimateError> {
    let mut table = Vec::new();

    let k_fitter =
        |xs: &[KEstimate]| -> Result<Vec<(&'static str, EstimateWithSE)>, EstimateError> {
            let est = estimate_rho_beta(xs)?;
            let beta = est.beta.ok_or(EstimateError::InsufficientData)?;
            Ok(vec![("rho", est.rho), ("beta", beta)])
        };
    let gamma_fitter =
        |xs: &[(f64, f64)]| -> Result<Vec<(&'static str, EstimateWithSE)>, EstimateError> {
            let popfit = estimate_gamma_population(xs)?;
            Ok(vec![("mu_gamma", popfit.mu), ("sigma_gamma", popfit.sd)])
        };

    // salary median split against the discount-rate parameters
    let paired: Vec<(f64, KEstimate)> = rows
        .iter()
        .zip(k_ests)
        .filter_map(|(r, k)| Some((r.salary?, (*k)?)))
        .collect();
    if paired.len() >= 4 {
        let (a, b): (Vec<f64>, Vec<KEstimate>) = paired.into_iter().unzip();
        if let Ok(rows) = independence_split(&a, &b, k_fitter) {
            for row in rows {
                table.push(IndependenceRow {
                    split_by: "salary",
                    parameter: row.parameter,
                    low: row.low.into(),
                    high: row.high.into(),
                    z: row.z,
                });
            }
        }
    }

    // salary median split against the weighting-factor parameters
    let paired: Vec<(f64, (f64, f64))> = rows
        .iter()
        .zip(gamma_fits)
        .filter_map(|(r, g)| Some((r.salary?, (*g)?)))
        .collect();
    if paired.len() >= 4 {
        let (a, b): (Vec<f64>, Vec<(f64, f64)>) = paired.into_iter().unzip();
        if let Ok(rows) = independence_split(&a, &b, gamma_fitter) {
            for row in rows {
                table.push(IndependenceRow {
                    split_by: "salary",
                    parameter: row.parameter,
                    low: row.low.into(),
                    high: row.high.into(),
                    z: row.z,
                });
            }
        }
    }

    // discount-rate median split against the weighting-factor parameters
    let paired: Vec<(f64, (f64, f64))> = k_ests
        .iter()
        .zip(gamma_fits)
        .filter_map(|(k, g)| Some(((*k)?.k_hat, (*g)?)))
        .collect();
    if paired.len() >= 4 {
        let (a, b): (Vec<f64>, Vec<(f64, f64)>) = paired.into_iter().unzip();
        if let Ok(rows) = independence_split(&a, &b, gamma_fitter) {
            for row in rows {
                table.push(IndependenceRow {
                    split_by: "k_hat",
                    parameter: row.parameter,
                    low: row.low.into(),
                    high: row.high.into(),
                    z: row.z,
                });
            }
        }
    }

    Ok(table)
}
