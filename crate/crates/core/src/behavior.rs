//! Individual-level offense utilities and the `(w, k)`-plane partition.
//!
//! A member is deterred when the perceived punishment outweighs the gain;
//! otherwise they offend and, once apprehended, pick whichever of fine or
//! imprisonment costs them less. All formulas take analytic limits at
//! `k = 0` rather than dividing by the discount rate.

use crate::dist::{weighting_pi, DistError};
use crate::fmath::{exp_m1, ln_1p};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BehaviorError {
    /// Stigma alone deters everyone: `b - pi(p) s <= 0`.
    DegenerateStrategy,
    /// The deterrence condition has no solution in `k` (imprisonment too
    /// weak to deter even a zero-discount member).
    NoRoot,
    Dist(DistError),
}

impl From<DistError> for BehaviorError {
    fn from(e: DistError) -> Self {
        BehaviorError::Dist(e)
    }
}

impl core::fmt::Display for BehaviorError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            BehaviorError::DegenerateStrategy => {
                write!(f, "degenerate strategy: stigma alone deters every member")
            }
            BehaviorError::NoRoot => write!(f, "no targeted discount rate exists"),
            BehaviorError::Dist(e) => write!(f, "{e}"),
        }
    }
}

/// A member of the population: wealth, discount rate, weighting factor,
/// and whether they are aware of the penal strategy.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Agent {
    pub w: f64,
    pub k: f64,
    pub gamma: f64,
    pub informed: bool,
}

/// Raw penal-strategy levers: apprehension probability, fine, punishment
/// delay, imprisonment length, and harshness.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PenalStrategy {
    pub p: f64,
    pub f: f64,
    pub t: f64,
    pub tau: f64,
    pub r: f64,
}

impl PenalStrategy {
    pub fn validate(&self) -> Result<(), BehaviorError> {
        let ok = (0.0..=1.0).contains(&self.p)
            && self.f >= 0.0
            && self.t >= 0.0
            && self.tau >= 0.0
            && self.r > 0.0
            && [self.p, self.f, self.t, self.tau, self.r]
                .iter()
                .all(|v| v.is_finite());
        if ok {
            Ok(())
        } else {
            Err(BehaviorError::Dist(DistError::InvalidParameter(
                "penal strategy out of range",
            )))
        }
    }
}

/// Crime economics: gain and stigma per unit wealth, expected victim loss,
/// output multiplier, and the aggregate opportunity rate `Lambda = N*lambda`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CrimeParams {
    pub b: f64,
    pub s: f64,
    pub l: f64,
    pub g: f64,
    pub lambda: f64,
}

impl CrimeParams {
    pub fn validate(&self) -> Result<(), BehaviorError> {
        let ok = self.b > 0.0
            && self.s >= 0.0
            && self.b > self.s
            && self.l > 0.0
            && self.g > 1.0
            && self.lambda >= 0.0;
        if ok {
            Ok(())
        } else {
            Err(BehaviorError::Dist(DistError::InvalidParameter(
                "crime params out of range (need b > s >= 0, l > 0, g > 1)",
            )))
        }
    }
}

/// Reparameterized strategy: the wealth and discount-rate levels at which
/// the deterrence inequalities bind, instead of `{f, tau}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StrategyTargets {
    pub p: f64,
    pub w0: f64,
    pub k0: f64,
    pub t: f64,
    pub r: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PartitionLabel {
    /// Deterred member (`Omega_0`).
    NonOffender,
    /// Offender who would pay the fine (`Omega_1`).
    FineChooser,
    /// Offender who would choose imprisonment (`Omega_2`).
    PrisonChooser,
}

/// Stable evaluation of `ln(1 + k*tau/(1 + k*t))`, with the small-argument
/// series so `k = 0` never divides by zero downstream.
#[inline]
fn log_discount_arg(k: f64, t: f64, tau: f64) -> f64 {
    ln_1p(k * tau / (1.0 + k * t))
}

/// Discounted disutility of imprisonment of length `tau` delayed by `t`
/// for discount rate `k` and harshness `r`; nonpositive.
///
/// `-(r/k) ln[1 + k tau/(1+k t)]`, with limit `-r tau` at `k = 0`.
pub fn discounted_disutility(k: f64, r: f64, t: f64, tau: f64) -> f64 {
    debug_assert!(k >= 0.0 && r > 0.0 && t >= 0.0 && tau >= 0.0);
    let u = k * tau / (1.0 + k * t);
    if u < 1e-8 {
        // ln(1+u)/k = (tau/(1+kt)) * (1 - u/2 + u^2/3 - ...)
        -r * (tau / (1.0 + k * t)) * (1.0 - 0.5 * u + u * u / 3.0)
    } else {
        -(r / k) * log_discount_arg(k, t, tau)
    }
}

/// Wealth-scaled magnitude of the imprisonment disutility (positive).
pub fn imprisonment_disutility_magnitude(w: f64, k: f64, strategy: &PenalStrategy) -> f64 {
    -w * discounted_disutility(k, strategy.r, strategy.t, strategy.tau)
}

/// Wealth-scaled imprisonment disutility for an agent (nonpositive).
pub fn imprisonment_disutility(agent: &Agent, strategy: &PenalStrategy) -> f64 {
    -imprisonment_disutility_magnitude(agent.w, agent.k, strategy)
}

/// Net utility the agent expects from an offense.
///
/// Informed members weigh the cheaper punishment plus stigma by the
/// perceived apprehension probability; uninformed members are unaware of
/// the punishment and see only the stigma term.
pub fn net_offense_utility(
    agent: &Agent,
    strategy: &PenalStrategy,
    crime: &CrimeParams,
) -> Result<f64, BehaviorError> {
    let pi = weighting_pi(strategy.p, agent.gamma)?;
    let gain = crime.b * agent.w;
    if agent.informed {
        let prison = imprisonment_disutility_magnitude(agent.w, agent.k, strategy);
        let punished = if strategy.f <= prison {
            strategy.f
        } else {
            prison
        };
        Ok(gain - pi * (punished + crime.s * agent.w))
    } else {
        Ok((crime.b - pi * crime.s) * agent.w)
    }
}

/// Wealth level the strategy targets: `w0 = pi(p) f / (b - pi(p) s)`.
pub fn target_w0(
    strategy: &PenalStrategy,
    crime: &CrimeParams,
    gamma: f64,
) -> Result<f64, BehaviorError> {
    let pi = weighting_pi(strategy.p, gamma)?;
    let denom = crime.b - pi * crime.s;
    if denom <= 0.0 {
        return Err(BehaviorError::DegenerateStrategy);
    }
    Ok(pi * strategy.f / denom)
}

/// Deterrence time scale `psi = (b - pi(p) s) / (pi(p) r)`.
pub fn psi(p: f64, crime: &CrimeParams, r: f64, gamma: f64) -> Result<f64, BehaviorError> {
    let pi = weighting_pi(p, gamma)?;
    if pi <= 0.0 {
        return Err(BehaviorError::DegenerateStrategy);
    }
    let num = crime.b - pi * crime.s;
    if num <= 0.0 {
        return Err(BehaviorError::DegenerateStrategy);
    }
    Ok(num / (pi * r))
}

/// Discount rate the strategy targets: the unique root of
/// `k / ln[1 + k tau/(1+k t)] = 1/psi`.
///
/// The left side rises monotonically from `1/tau` at `k = 0`, so a root
/// exists iff `tau > psi`; otherwise not even a zero-discount member is
/// deterred by the imprisonment option.
pub fn target_k0(
    strategy: &PenalStrategy,
    crime: &CrimeParams,
    gamma: f64,
) -> Result<f64, BehaviorError> {
    let psi = psi(strategy.p, crime, strategy.r, gamma)?;
    let (t, tau) = (strategy.t, strategy.tau);
    if !(tau > 0.0) {
        return Err(BehaviorError::NoRoot);
    }
    // h(k) = psi * k / ln[...] - 1, negative at k=0+ iff tau > psi
    let h = |k: f64| {
        let u = k * tau / (1.0 + k * t);
        if u < 1e-8 {
            psi * (1.0 + k * t) / (tau * (1.0 - 0.5 * u + u * u / 3.0)) - 1.0
        } else {
            psi * k / log_discount_arg(k, t, tau) - 1.0
        }
    };
    if h(0.0) >= 0.0 {
        return Err(BehaviorError::NoRoot);
    }
    let mut hi = 1.0 / tau;
    let mut grow = 0;
    while h(hi) < 0.0 {
        hi *= 4.0;
        grow += 1;
        if grow > 600 {
            return Err(BehaviorError::NoRoot);
        }
    }
    let mut lo = 0.0f64;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if h(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-13 * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Imprisonment length that makes the deterrence condition bind at `k0`:
/// `tau = (e^(psi k0) - 1)(1/k0 + t)`.
///
/// Returns `f64::INFINITY` when the exponent overflows.
pub fn tau_for_target(k0: f64, t: f64, psi: f64) -> f64 {
    debug_assert!(k0 > 0.0);
    let e = psi * k0;
    if e > 700.0 {
        return f64::INFINITY;
    }
    exp_m1(e) * (1.0 / k0 + t)
}

/// Fine/imprisonment indifference wealth at discount rate `k`:
/// `w = k f / (r ln[1 + k tau/(1+k t)])`, limit `f/(r tau)` at `k = 0`.
pub fn partition_curve_w(k: f64, f: f64, r: f64, t: f64, tau: f64) -> f64 {
    let u = k * tau / (1.0 + k * t);
    if u < 1e-8 {
        f * (1.0 + k * t) / (r * tau * (1.0 - 0.5 * u + u * u / 3.0))
    } else {
        k * f / (r * log_discount_arg(k, t, tau))
    }
}

/// Assigns an agent to its partition under a strategy.
///
/// Utility exactly zero counts as an offense; fine/imprisonment
/// indifference resolves to the fine.
pub fn classify(
    agent: &Agent,
    strategy: &PenalStrategy,
    crime: &CrimeParams,
) -> Result<PartitionLabel, BehaviorError> {
    let u = net_offense_utility(agent, strategy, crime)?;
    if u < 0.0 {
        return Ok(PartitionLabel::NonOffender);
    }
    let prison = imprisonment_disutility_magnitude(agent.w, agent.k, strategy);
    if strategy.f <= prison {
        Ok(PartitionLabel::FineChooser)
    } else {
        Ok(PartitionLabel::PrisonChooser)
    }
}

/// Burglary variant: fixed offense gain, certain apprehension, and the
/// linearized disutility `r w L / k` with `L = ln(1 + tau/t)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BurglaryStrategy {
    pub f: f64,
    pub t: f64,
    pub tau: f64,
    pub r: f64,
    /// Fixed utility gain of the offense (independent of wealth).
    pub gain: f64,
}

impl BurglaryStrategy {
    /// With `f < gain` no fine can deter anyone and `Omega_0` is empty.
    pub fn is_degenerate(&self) -> bool {
        self.f < self.gain
    }

    /// Slope factor `L = ln(1 + tau/t)` of the two partition lines.
    pub fn line_slope_log(&self) -> f64 {
        ln_1p(self.tau / self.t)
    }
}

/// Classification for the burglary partition (two straight lines in the
/// `(w, k)` plane).
pub fn burglary_classify(agent: &Agent, strategy: &BurglaryStrategy) -> PartitionLabel {
    debug_assert!(strategy.t > 0.0 && strategy.tau > 0.0 && strategy.r > 0.0);
    let l = strategy.line_slope_log();
    let rwl = strategy.r * agent.w * l;
    // linearized imprisonment disutility r w L / k (infinite at k = 0)
    let deterred = strategy.gain < strategy.f && (agent.k == 0.0 || strategy.gain * agent.k < rwl);
    if deterred {
        return PartitionLabel::NonOffender;
    }
    let fine_preferred = agent.k == 0.0 || strategy.f * agent.k <= rwl;
    if fine_preferred {
        PartitionLabel::FineChooser
    } else {
        PartitionLabel::PrisonChooser
    }
}
