//! Social-welfare evaluation in three tiers: a nested adaptive-quadrature
//! oracle over the trait densities, the closed forms built on special
//! functions, and the large-`kappa0` asymptotic forms. Also the cost
//! models, the `J2` minimization over the punishment delay, and the
//! phase-transition thresholds.
//!
//! Welfare is zeroed at "every opportunity realized, no strategy in
//! effect": deterred offenses add `l - b w`, punished offenses subtract
//! their social cost weighted by the apprehension probability, and
//! detection subtracts `c_p p` once.

use crate::behavior::{psi, tau_for_target, BehaviorError, CrimeParams, StrategyTargets};
use crate::dist::{weighting_pi, DistError, PopulationModel};
use crate::fmath::{exp, pow};
use crate::golden;
use crate::quad::{self, QuadConfig};
use crate::special::{exp_integral_e, upper_gamma, SpecialError};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WelfareError {
    /// Strategy targets a wealth level below the population minimum:
    /// nobody is deterred and the targeting reduction does not apply.
    DegenerateStrategy,
    Domain(&'static str),
    Special(SpecialError),
    Behavior(BehaviorError),
}

impl From<SpecialError> for WelfareError {
    fn from(e: SpecialError) -> Self {
        WelfareError::Special(e)
    }
}

impl From<BehaviorError> for WelfareError {
    fn from(e: BehaviorError) -> Self {
        WelfareError::Behavior(e)
    }
}

impl From<DistError> for WelfareError {
    fn from(e: DistError) -> Self {
        WelfareError::Behavior(BehaviorError::Dist(e))
    }
}

impl core::fmt::Display for WelfareError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            WelfareError::DegenerateStrategy => {
                write!(
                    f,
                    "degenerate strategy: targeted wealth below minimum wealth"
                )
            }
            WelfareError::Domain(what) => write!(f, "domain error: {what}"),
            WelfareError::Special(e) => write!(f, "special function: {e}"),
            WelfareError::Behavior(e) => write!(f, "{e}"),
        }
    }
}

/// Strategy implementation costs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CostParams {
    /// Detection cost per unit apprehension probability.
    pub c_p: f64,
    /// Fine collection cost.
    pub c_f: f64,
    /// Fixed imprisonment cost.
    pub c_0: f64,
    /// Celerity cost scale (divided by `m_options * t`).
    pub c_t: f64,
    /// Severity cost rate per imprisonment hour.
    pub c_tau: f64,
    /// Punishment-option count in the celerity denominator.
    pub m_options: f64,
}

impl CostParams {
    pub fn validate(&self) -> Result<(), WelfareError> {
        let ok = self.c_p >= 0.0
            && self.c_f >= 0.0
            && self.c_0 >= 0.0
            && self.c_t >= 0.0
            && self.c_tau >= 0.0
            && self.m_options >= 1.0;
        if ok {
            Ok(())
        } else {
            Err(WelfareError::Domain("cost params out of range"))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Tier {
    Quadrature,
    ClosedForm,
    Asymptotic,
}

/// Welfare split into its named parts; `total` always recomputes from them.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WelfareBreakdown {
    pub j0: f64,
    pub j1: f64,
    pub j2: f64,
    pub detection: f64,
    pub total: f64,
    pub tier: Tier,
}

impl WelfareBreakdown {
    fn assemble(j0: f64, j1: f64, j2: f64, p: f64, c_p: f64, tier: Tier) -> Self {
        let detection = c_p * p;
        Self {
            j0,
            j1,
            j2,
            detection,
            total: j0 - p * (j1 + j2) - detection,
            tier,
        }
    }
}

/// Enforcement cost of imprisonment: `c_0 + c_t/(m t) + c_tau tau`.
///
/// The celerity term diverges at `t = 0`, which is a domain error.
pub fn imprisonment_cost_ci(t: f64, tau: f64, costs: &CostParams) -> Result<f64, WelfareError> {
    if !(t > 0.0) {
        return Err(WelfareError::Domain("celerity cost diverges at t <= 0"));
    }
    if tau < 0.0 {
        return Err(WelfareError::Domain("tau must be nonnegative"));
    }
    Ok(costs.c_0 + costs.c_t / (costs.m_options * t) + costs.c_tau * tau)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PunishmentChoice {
    Fine,
    Prison,
}

/// Total social cost of punishing an offender of wealth `w`.
///
/// Fine: `c_f + g s w`. Prison: enforcement cost plus the opportunity cost
/// `g w (s + r tau)` minus the crimes forgone while imprisoned,
/// `Lambda tau (l - b w)`.
pub fn punishment_social_cost(
    w: f64,
    t: f64,
    tau: f64,
    choice: PunishmentChoice,
    crime: &CrimeParams,
    costs: &CostParams,
    r: f64,
) -> Result<f64, WelfareError> {
    match choice {
        PunishmentChoice::Fine => Ok(costs.c_f + crime.g * crime.s * w),
        PunishmentChoice::Prison => {
            let ci = imprisonment_cost_ci(t, tau, costs)?;
            Ok(ci + crime.g * w * (crime.s + r * tau)
                - crime.lambda * tau * (crime.l - crime.b * w))
        }
    }
}

/// Derived dimensionless view of a targeting strategy against a population.
struct Reparam {
    alpha: f64,
    w_m: f64,
    w0: f64,
    /// Partition-line slope `u = k0/w0`.
    u: f64,
    /// `v = w_m/w0 = k_m/k0`, in `(0, 1]`.
    v: f64,
    k_m: f64,
    kappa0: f64,
    kappa_m: f64,
    beta: f64,
    rho: f64,
    eps: f64,
}

fn reparam(targets: &StrategyTargets, pop: &PopulationModel) -> Result<Reparam, WelfareError> {
    let w_m = pop.wealth.w_m();
    let (w0, k0) = (targets.w0, targets.k0);
    if !(w0.is_finite() && k0 > 0.0) {
        return Err(WelfareError::Domain("targets must be finite with k0 > 0"));
    }
    if w0 < w_m {
        return Err(WelfareError::DegenerateStrategy);
    }
    let beta = pop.discount.beta();
    let v = w_m / w0;
    Ok(Reparam {
        alpha: pop.wealth.alpha(),
        w_m,
        w0,
        u: k0 / w0,
        v,
        k_m: v * k0,
        kappa0: k0 / beta,
        kappa_m: v * k0 / beta,
        beta,
        rho: pop.discount.rho(),
        eps: pop.epsilon,
    })
}

/// `(A, B)` coefficients of the imprisonment-branch cost `A + B w`:
/// `A = c_0 + c_t/(m t) + (c_tau - Lambda l) tau`,
/// `B = g s + (g r + Lambda b) tau`.
fn cost_coefficients(
    crime: &CrimeParams,
    costs: &CostParams,
    r: f64,
    t: f64,
    tau: f64,
) -> Result<(f64, f64), WelfareError> {
    if !(t > 0.0) {
        return Err(WelfareError::Domain("celerity cost diverges at t <= 0"));
    }
    if !(tau >= 0.0) {
        return Err(WelfareError::Domain("tau must be nonnegative"));
    }
    let a = costs.c_0
        + costs.c_t / (costs.m_options * t)
        + (costs.c_tau - crime.lambda * crime.l) * tau;
    let b = crime.g * crime.s + (crime.g * r + crime.lambda * crime.b) * tau;
    Ok((a, b))
}

const OUTER_TOL: f64 = 1e-10;
const INNER_TOL: f64 = 1e-11;

fn outer_cfg() -> QuadConfig {
    QuadConfig {
        rel_tol: OUTER_TOL,
        abs_tol: 1e-300,
        max_intervals: 4000,
    }
}

fn inner_cfg() -> QuadConfig {
    QuadConfig {
        rel_tol: INNER_TOL,
        abs_tol: 1e-300,
        max_intervals: 2000,
    }
}

/// Nested-quadrature oracle for the three region integrals of the welfare
/// function.
///
/// Regions: the deterred rectangle `[w_m, w0] x [0, k0]`, the fine region
/// below the line `k = u w` beyond `w0` (plus the uninformed copy from
/// `w_m`), and the imprisonment region above the line beyond `k0` (plus
/// the uninformed copy from `k_m`). The `k = 0` atom enters analytically;
/// both infinite tails are transform-mapped.
pub fn welfare_quadrature(
    targets: &StrategyTargets,
    pop: &PopulationModel,
    crime: &CrimeParams,
    costs: &CostParams,
    t: f64,
    tau: f64,
) -> Result<WelfareBreakdown, WelfareError> {
    let rp = reparam(targets, pop)?;
    let (a_coef, b_coef) = cost_coefficients(crime, costs, targets.r, t, tau)?;
    let wealth = pop.wealth;
    let (rho, beta) = (rp.rho, rp.beta);
    let ocfg = outer_cfg();
    let icfg = inner_cfg();

    // P(K <= hi): atom plus adaptive quadrature of the exponential part.
    // Beyond 60 scale lengths the remaining density is below f64
    // resolution, and leaving the interval unbounded would park every
    // panel node past the support.
    let k_cdf_num = |hi: f64| -> f64 {
        if hi <= 0.0 {
            return 1.0 - rho;
        }
        let hi_eff = hi.min(60.0 * beta);
        let cont = quad::integrate(|k| exp(-k / beta) / beta, 0.0, hi_eff, &icfg).value;
        (1.0 - rho) + rho * cont
    };

    // J0 over the rectangle factorizes exactly
    let j0_w = quad::integrate(
        |w| (crime.l - crime.b * w) * wealth.pdf(w),
        rp.w_m,
        rp.w0,
        &ocfg,
    )
    .value;
    let j0 = j0_w * k_cdf_num(targets.k0);

    // J1: fine region, inner k-integral up to the partition line
    let fine_integrand = |w: f64| -> f64 {
        (costs.c_f + crime.g * crime.s * w) * wealth.pdf(w) * k_cdf_num(rp.u * w)
    };
    let mut j1 = quad::integrate_power_tail(fine_integrand, rp.w0, &ocfg).value;
    if rp.eps > 0.0 {
        j1 += rp.eps * quad::integrate_power_tail(fine_integrand, rp.w_m, &ocfg).value;
    }

    // J2: imprisonment region, inner w-integral up to the partition line;
    // geometric splitting keeps wide polynomial-tail intervals resolved
    let prison_inner = |k: f64| -> f64 {
        let hi = k / rp.u;
        if hi <= rp.w_m {
            return 0.0;
        }
        quad::integrate_geometric(
            |w| (a_coef + b_coef * w) * wealth.pdf(w),
            rp.w_m,
            hi,
            8.0,
            &icfg,
        )
        .value
    };
    let prison_integrand = |k: f64| rho * exp(-k / beta) / beta * prison_inner(k);
    let mut j2 = if rho > 0.0 {
        quad::integrate_exp_tail(prison_integrand, targets.k0, beta, &ocfg).value
    } else {
        0.0
    };
    if rp.eps > 0.0 && rho > 0.0 {
        j2 += rp.eps * quad::integrate_exp_tail(prison_integrand, rp.k_m, beta, &ocfg).value;
    }

    Ok(WelfareBreakdown::assemble(
        j0,
        j1,
        j2,
        targets.p,
        costs.c_p,
        Tier::Quadrature,
    ))
}

/// Closed-form tier on exponential integrals and the upper gamma function.
///
/// Agrees with the quadrature oracle to within special-function accuracy.
pub fn welfare_closed_form(
    targets: &StrategyTargets,
    pop: &PopulationModel,
    crime: &CrimeParams,
    costs: &CostParams,
    t: f64,
    tau: f64,
) -> Result<WelfareBreakdown, WelfareError> {
    let rp = reparam(targets, pop)?;
    let (a_coef, b_coef) = cost_coefficients(crime, costs, targets.r, t, tau)?;
    let j0 = j0_closed(&rp, crime);
    let j1 = j1_closed(&rp, crime, costs)?;
    let j2 = j2_closed(&rp, a_coef, b_coef)?;
    Ok(WelfareBreakdown::assemble(
        j0,
        j1,
        j2,
        targets.p,
        costs.c_p,
        Tier::ClosedForm,
    ))
}

fn j0_closed(rp: &Reparam, crime: &CrimeParams) -> f64 {
    let al = rp.alpha;
    (1.0 - rp.rho * exp(-rp.kappa0))
        * (crime.l * (1.0 - pow(rp.v, al))
            - al / (al - 1.0) * crime.b * rp.w_m * (1.0 - pow(rp.v, al - 1.0)))
}

fn j1_closed(rp: &Reparam, crime: &CrimeParams, costs: &CostParams) -> Result<f64, WelfareError> {
    let al = rp.alpha;
    let va = pow(rp.v, al);
    let e_a1_k0 = exp_integral_e(al + 1.0, rp.kappa0)?;
    let e_a_k0 = exp_integral_e(al, rp.kappa0)?;
    let mut fine = costs.c_f * va * (1.0 - al * rp.rho * e_a1_k0);
    let mut stigma =
        crime.g * crime.s * (al / (al - 1.0) * va * rp.w0 - al * rp.rho * va * rp.w0 * e_a_k0);
    if rp.eps > 0.0 {
        let e_a1_km = exp_integral_e(al + 1.0, rp.kappa_m)?;
        let e_a_km = exp_integral_e(al, rp.kappa_m)?;
        fine += costs.c_f * rp.eps * (1.0 - al * rp.rho * e_a1_km);
        stigma +=
            crime.g * crime.s * rp.eps * (al / (al - 1.0) * rp.w_m - al * rp.rho * rp.w_m * e_a_km);
    }
    Ok(fine + stigma)
}

fn j2_closed(rp: &Reparam, a_coef: f64, b_coef: f64) -> Result<f64, WelfareError> {
    if rp.rho == 0.0 {
        return Ok(0.0);
    }
    let al = rp.alpha;
    let e_a_k0 = exp_integral_e(al, rp.kappa0)?;
    let g_a = upper_gamma(2.0 - al, rp.kappa0)?;
    let mut bracket_a = exp(-rp.kappa0) - pow(rp.v, al) * rp.kappa0 * e_a_k0;
    let mut bracket_b = exp(-rp.kappa0) - pow(rp.v * rp.kappa0, al - 1.0) * g_a;
    if rp.eps > 0.0 {
        let e_a_km = exp_integral_e(al, rp.kappa_m)?;
        let g_am = upper_gamma(2.0 - al, rp.kappa_m)?;
        bracket_a += rp.eps * (exp(-rp.kappa_m) - rp.kappa_m * e_a_km);
        bracket_b += rp.eps * (exp(-rp.v * rp.kappa0) - pow(rp.v * rp.kappa0, al - 1.0) * g_am);
    }
    Ok(rp.rho * (a_coef * bracket_a + al / (al - 1.0) * b_coef * rp.w_m * bracket_b))
}

/// Asymptotic tier: the large-`kappa0` reductions. `J0` carries no
/// approximation; `J1`/`J2` replace the special functions with their
/// leading exponential behavior.
pub fn welfare_asymptotic(
    targets: &StrategyTargets,
    pop: &PopulationModel,
    crime: &CrimeParams,
    costs: &CostParams,
    t: f64,
    tau: f64,
) -> Result<WelfareBreakdown, WelfareError> {
    let rp = reparam(targets, pop)?;
    let (a_coef, b_coef) = cost_coefficients(crime, costs, targets.r, t, tau)?;
    let al = rp.alpha;
    let va = pow(rp.v, al);
    let va1 = pow(rp.v, al - 1.0);
    let decay0 = exp(-rp.kappa0) / rp.kappa0;
    let decay_m = exp(-rp.v * rp.kappa0) / (rp.v * rp.kappa0);

    let j0 = j0_closed(&rp, crime);

    let mut j1 = costs.c_f * va * (1.0 - al * rp.rho * decay0)
        + crime.g * crime.s * va1 * rp.w_m * (al / (al - 1.0) - al * rp.rho * decay0);
    if rp.eps > 0.0 {
        j1 += costs.c_f * rp.eps * (1.0 - al * rp.rho * decay_m)
            + crime.g * crime.s * rp.eps * rp.w_m * (al / (al - 1.0) - al * rp.rho * decay_m);
    }

    let mut bracket_a = (1.0 - va) * exp(-rp.kappa0) + al * va * decay0;
    let mut bracket_b = (1.0 - va1) * exp(-rp.kappa0) + (al - 1.0) * va1 * decay0;
    if rp.eps > 0.0 {
        bracket_a += al * rp.eps * decay_m;
        bracket_b += (al - 1.0) * rp.eps * decay_m;
    }
    let j2 = rp.rho * (a_coef * bracket_a + al / (al - 1.0) * b_coef * rp.w_m * bracket_b);

    Ok(WelfareBreakdown::assemble(
        j0,
        j1,
        j2,
        targets.p,
        costs.c_p,
        Tier::Asymptotic,
    ))
}

/// Result of minimizing `J2` over the punishment delay with `tau` bound to
/// the targeting constraint.
#[derive(Clone, Copy, Debug)]
pub struct OptimalSchedule {
    pub t_star: f64,
    pub tau_star: f64,
    pub j2_min: f64,
    /// Scale-free asymptotic predictions `exp(-psi beta kappa0 / 2)` and
    /// `exp(+psi beta kappa0 / 2)` for comparison against the minimizer.
    pub t_star_asymptotic: f64,
    pub tau_star_asymptotic: f64,
}

/// Search window for the delay, in natural log hours. `t = 0` is excluded
/// because the celerity cost diverges there.
const LOG_T_RANGE: (f64, f64) = (-30.0, 30.0);

/// Minimizes `J2(t, tau(t))` over `t > 0` for a strategy targeting
/// `kappa0`, with `tau` tied to the target by the deterrence constraint.
#[allow(clippy::too_many_arguments)]
pub fn optimal_t_tau(
    kappa0: f64,
    pop: &PopulationModel,
    crime: &CrimeParams,
    costs: &CostParams,
    p: f64,
    v: f64,
    r: f64,
    gamma: f64,
) -> Result<OptimalSchedule, WelfareError> {
    if !(kappa0 > 0.0) || !(v > 0.0 && v <= 1.0) {
        return Err(WelfareError::Domain("need kappa0 > 0 and v in (0, 1]"));
    }
    let beta = pop.discount.beta();
    let k0 = kappa0 * beta;
    let w_m = pop.wealth.w_m();
    let rp = Reparam {
        alpha: pop.wealth.alpha(),
        w_m,
        w0: w_m / v,
        u: k0 * v / w_m,
        v,
        k_m: v * k0,
        kappa0,
        kappa_m: v * kappa0,
        beta,
        rho: pop.discount.rho(),
        eps: pop.epsilon,
    };
    let psi_v = psi(p, crime, r, gamma)?;

    let j2_at = |log_t: f64| -> f64 {
        let t = exp(log_t);
        let tau = tau_for_target(k0, t, psi_v);
        if !tau.is_finite() {
            return f64::INFINITY;
        }
        match cost_coefficients(crime, costs, r, t, tau) {
            Ok((a, b)) => j2_closed(&rp, a, b).unwrap_or(f64::INFINITY),
            Err(_) => f64::INFINITY,
        }
    };

    let (log_t, j2_min) = golden::minimize(j2_at, LOG_T_RANGE.0, LOG_T_RANGE.1, 1e-10);
    let t_star = exp(log_t);
    let tau_star = tau_for_target(k0, t_star, psi_v);
    let half_rate = 0.5 * psi_v * beta * kappa0;
    Ok(OptimalSchedule {
        t_star,
        tau_star,
        j2_min,
        t_star_asymptotic: exp(-half_rate),
        tau_star_asymptotic: exp(half_rate),
    })
}

/// Whether `J2` decays as `kappa0 -> inf` for the pair `(v, p)`:
/// `v >= beta (b - pi(p) s) / (2 pi(p) r)`.
///
/// The boundary is included; there the decay is polynomial rather than
/// exponential but `J2` still vanishes.
pub fn phase_condition(
    v: f64,
    p: f64,
    pop: &PopulationModel,
    crime: &CrimeParams,
    r: f64,
    gamma: f64,
) -> Result<bool, WelfareError> {
    let pi = weighting_pi(p, gamma)?;
    if pi <= 0.0 {
        return Ok(false);
    }
    let rhs = pop.discount.beta() * (crime.b - pi * crime.s) / (2.0 * pi * r);
    Ok(v >= rhs)
}

/// Phase-transition thresholds: the harshness floor `(b - s) beta / 2` and
/// the fine ceiling `2 r w_m / beta`.
pub fn thresholds(pop: &PopulationModel, crime: &CrimeParams, r: f64) -> (f64, f64) {
    let beta = pop.discount.beta();
    (
        (crime.b - crime.s) * beta / 2.0,
        2.0 * r * pop.wealth.w_m() / beta,
    )
}
