//! Survey estimators: per-respondent discount rates under multiplicative
//! response error, zero-inflated exponential population parameters,
//! per-respondent weighting factors by nested least squares, population
//! weighting-factor moments, harshness, and the median-split independence
//! check.
//!
//! Error propagates in two stages (respondent noise, then sampling), so
//! each estimator carries an analytic standard error derived for exactly
//! that composition.

use alloc::string::String;
use alloc::vec::Vec;

use crate::dist::{weighting_pi, DistError};
use crate::fmath::{exp, ln_1p, pow, sqrt};
use crate::golden;
use crate::quad::{self, QuadConfig};

/// Imprisonment lengths (hours) of the four delay questions.
pub const SURVEY_TAUS: [f64; 4] = [2.5, 4.0, 10.0, 20.0];
/// Apprehension probabilities of the nine fine-scenario questions.
pub const SURVEY_PS: [f64; 9] = [0.05, 0.1, 0.25, 0.5, 0.75, 0.9, 0.95, 0.98, 1.0];
/// Fine fixed by the survey design (currency units).
pub const SURVEY_FINE: f64 = 500.0;
/// Immediate-punishment length of the delay questions (hours).
pub const SURVEY_TAU0: f64 = 2.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EstimateError {
    /// Too few usable answers for the requested estimator.
    InsufficientData,
    /// All responses identical in a way that breaks the fit.
    DegenerateDesign,
    /// The response violates a survey invariant.
    InvalidResponse(&'static str),
    Domain(&'static str),
    Dist(DistError),
}

impl From<DistError> for EstimateError {
    fn from(e: DistError) -> Self {
        EstimateError::Dist(e)
    }
}

impl core::fmt::Display for EstimateError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            EstimateError::InsufficientData => write!(f, "not enough usable answers"),
            EstimateError::DegenerateDesign => write!(f, "degenerate response pattern"),
            EstimateError::InvalidResponse(what) => write!(f, "invalid response: {what}"),
            EstimateError::Domain(what) => write!(f, "domain error: {what}"),
            EstimateError::Dist(e) => write!(f, "{e}"),
        }
    }
}

/// Point estimate with its standard error and the count that produced it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EstimateWithSE {
    pub value: f64,
    pub se: f64,
    pub n_used: usize,
}

/// Answer to one delay question: a finite minimal delay, or the refusal to
/// accept the longer imprisonment under any delay.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DelayAnswer {
    Finite(f64),
    Infinite,
}

/// One survey row.
#[derive(Clone, Debug, PartialEq)]
pub struct SurveyResponse {
    pub id: String,
    pub salary: Option<f64>,
    /// Minimal delays for the four imprisonment lengths, when the
    /// respondent answered the section.
    pub delays: Option<[DelayAnswer; 4]>,
    /// Certainty-equivalent amounts for the nine probabilities; missing
    /// entries allowed.
    pub fines: [Option<f64>; 9],
    pub detention_hours: Option<f64>,
}

impl SurveyResponse {
    /// Checks the survey invariants: positive finite delays, monotone
    /// truncation (after the first refusal every later answer is also a
    /// refusal), positive salary, nonnegative amounts.
    pub fn validate(&self) -> Result<(), EstimateError> {
        if let Some(salary) = self.salary {
            if !(salary > 0.0) {
                return Err(EstimateError::InvalidResponse("salary must be positive"));
            }
        }
        if let Some(delays) = &self.delays {
            let mut seen_infinite = false;
            for d in delays {
                match d {
                    DelayAnswer::Infinite => seen_infinite = true,
                    DelayAnswer::Finite(t) => {
                        if seen_infinite {
                            return Err(EstimateError::InvalidResponse(
                                "monotone truncation: finite delay after a refusal",
                            ));
                        }
                        if !(*t > 0.0) {
                            return Err(EstimateError::InvalidResponse("delays must be positive"));
                        }
                    }
                }
            }
        }
        for b in self.fines.iter().flatten() {
            if !(*b >= 0.0) || !b.is_finite() {
                return Err(EstimateError::InvalidResponse(
                    "fine answers must be nonnegative",
                ));
            }
        }
        if let Some(h) = self.detention_hours {
            if !(h > 0.0) {
                return Err(EstimateError::InvalidResponse(
                    "detention tolerance must be positive",
                ));
            }
        }
        Ok(())
    }
}

/// Per-respondent discount-rate estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KEstimate {
    pub k_hat: f64,
    pub se: f64,
    /// Answers used (the first refusal, when present, counts as a zero
    /// ratio).
    pub m: usize,
    /// Estimated multiplicative-error scale, when `m >= 2`.
    pub sigma_hat: Option<f64>,
}

/// Discount-rate estimator: the average of the question ratios
/// `(tau_j/2 - 1)/t_ij` up to and including the first refusal (which
/// contributes zero).
///
/// A refusal on the first question pins the estimate to exactly zero.
/// Returns `None` when the respondent skipped the section.
pub fn estimate_k(resp: &SurveyResponse, tables: &SigmaTables) -> Option<KEstimate> {
    let delays = resp.delays.as_ref()?;
    let mut ratios = Vec::with_capacity(4);
    for (j, d) in delays.iter().enumerate() {
        match d {
            DelayAnswer::Finite(t) => ratios.push((SURVEY_TAUS[j] / SURVEY_TAU0 - 1.0) / t),
            DelayAnswer::Infinite => {
                ratios.push(0.0);
                break;
            }
        }
    }
    let m = ratios.len();
    let k_hat = ratios.iter().sum::<f64>() / m as f64;
    if m == 1 || k_hat == 0.0 {
        return Some(KEstimate {
            k_hat: 0.0,
            se: 0.0,
            m,
            sigma_hat: None,
        });
    }
    let sigma_hat = estimate_sigma(&ratios, k_hat, tables);
    Some(KEstimate {
        k_hat,
        se: k_hat * sigma_hat / sqrt(m as f64),
        m,
        sigma_hat: Some(sigma_hat),
    })
}

/// Response-noise scale behind a ratio sample: computes the dispersion
/// statistic `J = mean((r_j / k_hat - 1)^2)` and inverts the tabulated
/// `sigma -> E[J]` map for the sample size.
///
/// Needs at least two ratios and a non-zero rate estimate.
pub fn estimate_sigma(ratios: &[f64], k_hat: f64, tables: &SigmaTables) -> f64 {
    let m = ratios.len();
    debug_assert!(m >= 2 && k_hat != 0.0);
    let j_obs = ratios
        .iter()
        .map(|r| {
            let d = r / k_hat - 1.0;
            d * d
        })
        .sum::<f64>()
        / m as f64;
    tables.invert(j_obs, m)
}

/// Density of the ratio `X` of the two normal aggregates behind the
/// noise-scale statistic: numerator mean `(m-1)/m`, variance
/// `(m-1) sigma^2 / m^2`; denominator mean 1, variance `sigma^2`.
///
/// This is the printed Jacobian-transform form, valid while the
/// denominator rarely crosses zero.
pub fn ratio_normal_pdf(x: f64, m: usize, sigma: f64) -> f64 {
    debug_assert!(m >= 2 && sigma > 0.0);
    let mf = m as f64;
    let q = mf - 1.0 + mf * mf * x * x;
    let z = 1.0 - mf + mf * x;
    mf * (mf - 1.0) * (1.0 + mf * x) / (sqrt(2.0 * core::f64::consts::PI) * pow(q, 1.5) * sigma)
        * exp(-z * z / (2.0 * q * sigma * sigma))
}

/// Integrates `g(x) * ratio_normal_pdf(x)` over the real line, stepping
/// around the spike at `(m-1)/m` and (symmetrically) around the pole that
/// `g` may carry at `x = -1/m`.
fn ratio_pdf_integral<G: Fn(f64) -> f64>(m: usize, sigma: f64, g: G) -> f64 {
    let mf = m as f64;
    let center = (mf - 1.0) / mf;
    let pole = -1.0 / mf;
    // the density has 1/x^2 tails with weight exp(-1/(2 sigma^2)); the wide
    // reach keeps the truncated tail below the density's own accuracy
    let reach = 60.0 * sigma + 120.0;
    let eta = 1e-4 / mf;
    let mut cuts = [
        pole - reach,
        pole - eta,
        pole + eta,
        center - 8.0 * sigma,
        center - sigma,
        center + sigma,
        center + 8.0 * sigma,
        center + reach,
    ];
    cuts.sort_by(f64::total_cmp);
    let cfg = QuadConfig {
        rel_tol: 1e-10,
        abs_tol: 1e-14,
        max_intervals: 2000,
    };
    let mut total = 0.0;
    for pair in cuts.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        if b <= a || (a < pole && pole < b) {
            // skip inverted pieces and the excluded pole window
            continue;
        }
        total += quad::integrate(|x| g(x) * ratio_normal_pdf(x, m, sigma), a, b, &cfg).value;
    }
    total
}

/// Normalization of the ratio density by quadrature.
pub fn ratio_normal_mass(m: usize, sigma: f64) -> f64 {
    ratio_pdf_integral(m, sigma, |_| 1.0)
}

/// Lookup tables mapping the noise scale `sigma` to the expected
/// ratio-dispersion statistic `E[J]`, per answer count `m`.
///
/// `E[J] = E[(1/m + X)^-2] - 1` evaluated by quadrature over the ratio
/// density; inverted by monotone interpolation.
pub struct SigmaTables {
    /// `(sigma, e_j)` nodes for m = 2, 3, 4.
    tables: [Vec<(f64, f64)>; 3],
}

pub const SIGMA_TABLE_STEP: f64 = 0.005;
pub const SIGMA_TABLE_MAX: f64 = 1.0;

impl SigmaTables {
    /// Builds the three tables, keeping the strictly monotone prefix of
    /// each.
    ///
    /// Above roughly `sigma = 0.95` the dispersion statistic stops
    /// identifying the scale for small `m` and the mapping turns over;
    /// the table ends there and larger observed dispersions clamp to the
    /// last node. A prefix shorter than `sigma = 0.5` is treated as a
    /// build failure.
    pub fn build() -> Result<Self, EstimateError> {
        let mut tables: [Vec<(f64, f64)>; 3] = [Vec::new(), Vec::new(), Vec::new()];
        for (idx, m) in (2usize..=4).enumerate() {
            let steps = (SIGMA_TABLE_MAX / SIGMA_TABLE_STEP) as usize;
            let mut tab = Vec::with_capacity(steps + 1);
            tab.push((0.0, 0.0));
            let mut prev = 0.0;
            for i in 1..=steps {
                let sigma = i as f64 * SIGMA_TABLE_STEP;
                let ej = expected_j(m, sigma);
                if ej <= prev {
                    break;
                }
                prev = ej;
                tab.push((sigma, ej));
            }
            if tab.last().map(|t| t.0 < 0.5).unwrap_or(true) {
                return Err(EstimateError::Domain(
                    "sigma lookup table is not monotone over its working range",
                ));
            }
            tables[idx] = tab;
        }
        Ok(Self { tables })
    }

    /// Expected dispersion for a given scale.
    pub fn expected_j(&self, sigma: f64, m: usize) -> f64 {
        debug_assert!((2..=4).contains(&m));
        let tab = &self.tables[m - 2];
        match tab.binary_search_by(|probe| probe.0.total_cmp(&sigma)) {
            Ok(i) => tab[i].1,
            Err(i) => {
                if i == 0 {
                    tab[0].1
                } else if i >= tab.len() {
                    tab[tab.len() - 1].1
                } else {
                    let (s0, j0) = tab[i - 1];
                    let (s1, j1) = tab[i];
                    j0 + (j1 - j0) * (sigma - s0) / (s1 - s0)
                }
            }
        }
    }

    /// Inverts the observed dispersion to a scale estimate, clamping at
    /// the table ends.
    pub fn invert(&self, j_obs: f64, m: usize) -> f64 {
        debug_assert!((2..=4).contains(&m));
        let tab = &self.tables[m - 2];
        if j_obs <= 0.0 {
            return 0.0;
        }
        let last = tab.len() - 1;
        if j_obs >= tab[last].1 {
            return tab[last].0;
        }
        let i = tab.partition_point(|probe| probe.1 < j_obs);
        let (s0, j0) = tab[i - 1];
        let (s1, j1) = tab[i];
        s0 + (s1 - s0) * (j_obs - j0) / (j1 - j0)
    }
}

fn expected_j(m: usize, sigma: f64) -> f64 {
    let mf = m as f64;
    ratio_pdf_integral(m, sigma, |x| {
        let d = 1.0 / mf + x;
        1.0 / (d * d)
    }) - 1.0
}

/// Population estimates for the zero-inflated exponential discount model.
#[derive(Clone, Debug, PartialEq)]
pub struct RhoBetaEstimate {
    pub rho: EstimateWithSE,
    /// Undefined when every respondent reported a zero rate.
    pub beta: Option<EstimateWithSE>,
}

/// Estimates the non-zero fraction and the mean non-zero rate from
/// per-respondent estimates.
///
/// `rho` is the fraction of non-zero estimates with the binomial standard
/// error. `beta` pools the ratio sums of respondents with non-zero
/// estimates, with the standard error combining sampling weights and the
/// averaged response-noise variance.
pub fn estimate_rho_beta(estimates: &[KEstimate]) -> Result<RhoBetaEstimate, EstimateError> {
    let n = estimates.len();
    if n < 2 {
        return Err(EstimateError::InsufficientData);
    }
    let nonzero: Vec<&KEstimate> = estimates.iter().filter(|e| e.k_hat > 0.0).collect();
    let rho_hat = nonzero.len() as f64 / n as f64;
    let rho = EstimateWithSE {
        value: rho_hat,
        se: sqrt(rho_hat * (1.0 - rho_hat) / n as f64),
        n_used: n,
    };
    if nonzero.is_empty() {
        return Ok(RhoBetaEstimate { rho, beta: None });
    }
    let m_total: f64 = nonzero.iter().map(|e| e.m as f64).sum();
    let beta_hat: f64 = nonzero.iter().map(|e| e.m as f64 * e.k_hat).sum::<f64>() / m_total;
    let weight_sq: f64 = nonzero
        .iter()
        .map(|e| {
            let w = e.m as f64 / m_total;
            w * w
        })
        .sum();
    let avg_var: f64 = nonzero
        .iter()
        .map(|e| {
            let s = e.sigma_hat.unwrap_or(0.0);
            e.m as f64 * s * s
        })
        .sum::<f64>()
        / (m_total * m_total);
    let beta = EstimateWithSE {
        value: beta_hat,
        se: beta_hat * sqrt(weight_sq + 2.0 * avg_var),
        n_used: nonzero.len(),
    };
    Ok(RhoBetaEstimate {
        rho,
        beta: Some(beta),
    })
}

/// Per-respondent weighting-factor fit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GammaFit {
    pub gamma: EstimateWithSE,
    /// Combined stigma-plus-punishment coefficient.
    pub sd_sum: EstimateWithSE,
    /// The optimum landed on the search boundary.
    pub boundary: bool,
}

const GAMMA_SEARCH: (f64, f64) = (0.01, 0.99);

/// Fits `B_j = pi(p_j, gamma) * (S + D)` by nested least squares: for a
/// fixed factor the coefficient is a linear projection, and the factor is
/// found by scan plus golden refinement. Standard errors come from the
/// Gauss-Newton covariance at the optimum.
pub fn estimate_gamma(resp: &SurveyResponse) -> Result<GammaFit, EstimateError> {
    let data: Vec<(f64, f64)> = resp
        .fines
        .iter()
        .enumerate()
        .filter_map(|(j, b)| b.map(|b| (SURVEY_PS[j], b)))
        .collect();
    if data.len() < 3 {
        return Err(EstimateError::InsufficientData);
    }
    if data.iter().all(|&(_, b)| b == 0.0) {
        return Err(EstimateError::DegenerateDesign);
    }

    let theta_for = |gamma: f64| -> (f64, f64) {
        let mut num = 0.0;
        let mut den = 0.0;
        for &(p, b) in &data {
            let pi = weighting_pi(p, gamma).unwrap_or(0.0);
            num += pi * b;
            den += pi * pi;
        }
        let theta = if den > 0.0 { num / den } else { 0.0 };
        let rss: f64 = data
            .iter()
            .map(|&(p, b)| {
                let pi = weighting_pi(p, gamma).unwrap_or(0.0);
                let e = b - theta * pi;
                e * e
            })
            .sum();
        (theta, rss)
    };

    let (gamma_hat, _) = golden::scan_then_minimize(
        |g| theta_for(g).1,
        GAMMA_SEARCH.0,
        GAMMA_SEARCH.1,
        96,
        1e-10,
    );
    let (theta_hat, rss) = theta_for(gamma_hat);
    let boundary = gamma_hat < GAMMA_SEARCH.0 + 1e-4 || gamma_hat > GAMMA_SEARCH.1 - 1e-4;

    // Gauss-Newton covariance: model f_j = theta * pi_j(gamma)
    let m = data.len();
    let h = 1e-6;
    let mut jtj = [[0.0f64; 2]; 2];
    for &(p, _) in &data {
        let pi = weighting_pi(p, gamma_hat)?;
        let dpi = (weighting_pi(p, gamma_hat + h)? - weighting_pi(p, gamma_hat - h)?) / (2.0 * h);
        let row = [theta_hat * dpi, pi];
        for (i, ri) in row.iter().enumerate() {
            for (j, rj) in row.iter().enumerate() {
                jtj[i][j] += ri * rj;
            }
        }
    }
    let dof = (m - 2) as f64;
    let sigma2 = if dof > 0.0 { rss / dof } else { 0.0 };
    let det = jtj[0][0] * jtj[1][1] - jtj[0][1] * jtj[1][0];
    let (se_gamma, se_theta) = if det > 0.0 {
        (
            sqrt(sigma2 * jtj[1][1] / det),
            sqrt(sigma2 * jtj[0][0] / det),
        )
    } else {
        (f64::INFINITY, f64::INFINITY)
    };

    Ok(GammaFit {
        gamma: EstimateWithSE {
            value: gamma_hat,
            se: se_gamma,
            n_used: m,
        },
        sd_sum: EstimateWithSE {
            value: theta_hat,
            se: se_theta,
            n_used: m,
        },
        boundary,
    })
}

/// Population moments of the weighting factor.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GammaPopulation {
    pub mu: EstimateWithSE,
    pub sd: EstimateWithSE,
    /// The unbiased variance estimate went negative and was clamped.
    pub clamped: bool,
}

/// Combines per-respondent factor fits into population mean and spread.
///
/// The population variance estimate subtracts the averaged per-respondent
/// fit variance from the sample variance (clamped at zero); spread errors
/// follow from the sample-variance statistics by the delta method.
pub fn estimate_gamma_population(fits: &[(f64, f64)]) -> Result<GammaPopulation, EstimateError> {
    let n = fits.len();
    if n < 2 {
        return Err(EstimateError::InsufficientData);
    }
    let nf = n as f64;
    let mean: f64 = fits.iter().map(|f| f.0).sum::<f64>() / nf;
    let s2: f64 = fits
        .iter()
        .map(|f| (f.0 - mean) * (f.0 - mean))
        .sum::<f64>()
        / (nf - 1.0);
    let mean_se2: f64 = fits.iter().map(|f| f.1 * f.1).sum::<f64>() / nf;
    let mean_se4: f64 = fits.iter().map(|f| pow(f.1, 4.0)).sum::<f64>() / nf;

    let raw_var = s2 - mean_se2;
    let clamped = raw_var < 0.0;
    let var_gamma = raw_var.max(0.0);

    let mu = EstimateWithSE {
        value: mean,
        se: sqrt((var_gamma + mean_se2) / nf),
        n_used: n,
    };

    let se_var = sqrt(2.0) / (nf - 1.0)
        * sqrt(
            ((nf - 1.0) * var_gamma * var_gamma
                + 2.0 * (nf - 1.0) * var_gamma * mean_se2
                + nf * mean_se4
                - mean_se2 * mean_se2)
                .max(0.0),
        );
    let sd_value = sqrt(var_gamma);
    let sd = EstimateWithSE {
        value: sd_value,
        se: if sd_value > 0.0 {
            se_var / (2.0 * sd_value)
        } else {
            0.0
        },
        n_used: n,
    };
    Ok(GammaPopulation { mu, sd, clamped })
}

/// Variance of the sample variance for independent zero-mean normals with
/// per-draw scales `sigmas`:
/// `2 (n mean(sigma^4) - mean(sigma^2)^2) / (n - 1)^2`.
pub fn var_s2(sigmas: &[f64]) -> f64 {
    let n = sigmas.len() as f64;
    debug_assert!(n >= 2.0);
    let m4: f64 = sigmas.iter().map(|s| pow(*s, 4.0)).sum::<f64>() / n;
    let m2: f64 = sigmas.iter().map(|s| s * s).sum::<f64>() / n;
    2.0 * (n * m4 - m2 * m2) / ((n - 1.0) * (n - 1.0))
}

/// Harshness implied by the fine/detention indifference point:
/// `r = k f / (w ln(1 + k tau))`, with the `k = 0` limit `f / (w tau)`.
///
/// Returns `None` when the detention answer or salary is missing.
pub fn estimate_harshness(resp: &SurveyResponse, k_hat: f64) -> Option<f64> {
    let tau = resp.detention_hours?;
    let w = resp.salary?;
    if !(w > 0.0) || !(tau > 0.0) {
        return None;
    }
    Some(if k_hat > 0.0 {
        k_hat * SURVEY_FINE / (w * ln_1p(k_hat * tau))
    } else {
        SURVEY_FINE / (w * tau)
    })
}

/// One parameter row of a median-split comparison.
#[derive(Clone, Debug, PartialEq)]
pub struct SplitZ {
    pub parameter: &'static str,
    pub low: EstimateWithSE,
    pub high: EstimateWithSE,
    pub z: f64,
}

/// Splits paired samples at the median of `a`, fits `b`'s parameters on
/// both halves, and reports the per-parameter discrepancy
/// `z = |low - high| / sqrt(se_low^2 + se_high^2)`.
///
/// Ties at the median resolve by stable input order.
pub fn independence_split<T: Clone, F>(
    a: &[f64],
    b: &[T],
    fitter: F,
) -> Result<Vec<SplitZ>, EstimateError>
where
    F: Fn(&[T]) -> Result<Vec<(&'static str, EstimateWithSE)>, EstimateError>,
{
    let n = a.len();
    if n < 4 || b.len() != n {
        return Err(EstimateError::InsufficientData);
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i].total_cmp(&a[j]));
    let half = n / 2;
    let low: Vec<T> = order[..half].iter().map(|&i| b[i].clone()).collect();
    let high: Vec<T> = order[half..].iter().map(|&i| b[i].clone()).collect();
    let low_fit = fitter(&low)?;
    let high_fit = fitter(&high)?;
    if low_fit.len() != high_fit.len() {
        return Err(EstimateError::Domain(
            "fitter returned mismatched parameters",
        ));
    }
    let mut rows = Vec::with_capacity(low_fit.len());
    for ((name, lo), (name2, hi)) in low_fit.into_iter().zip(high_fit) {
        debug_assert_eq!(name, name2);
        let denom = sqrt(lo.se * lo.se + hi.se * hi.se);
        let diff = (lo.value - hi.value).abs();
        let z = if denom > 0.0 {
            diff / denom
        } else if diff == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        rows.push(SplitZ {
            parameter: name,
            low: lo,
            high: hi,
            z,
        });
    }
    Ok(rows)
}
