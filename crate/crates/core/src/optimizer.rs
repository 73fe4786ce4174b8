//! Reduced two-parameter optimization.
//!
//! Past the phase-transition threshold the welfare function collapses to
//! `J(v, p)` over the ratio `v = w_m/w0` and the apprehension probability,
//! constrained to the region where the imprisonment cost decays. This
//! module carries the constraint curves, the per-`p` optimal ratio and
//! fine, the one-dimensional search for `p*`, the analytic corner case,
//! and a brute-force grid oracle for validation.

use crate::behavior::CrimeParams;
use crate::dist::{weighting_pi, weighting_pi_inverse, DistError, PopulationModel};
use crate::fmath::pow;
use crate::golden;
use crate::welfare::CostParams;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OptimizerError {
    Domain(&'static str),
    Dist(DistError),
}

impl From<DistError> for OptimizerError {
    fn from(e: DistError) -> Self {
        OptimizerError::Dist(e)
    }
}

impl core::fmt::Display for OptimizerError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            OptimizerError::Domain(what) => write!(f, "domain error: {what}"),
            OptimizerError::Dist(e) => write!(f, "{e}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolutionBranch {
    /// Numeric optimum strictly inside `(p_min, 1)`.
    Interior,
    /// Analytic corner optimum at `v = 1`, `p = p_min`.
    SpecialCase,
    /// Numeric optimum pinned at `p = 1`.
    Boundary,
}

/// Optimal reduced strategy.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReducedSolution {
    pub p_star: f64,
    pub v_star: f64,
    pub f_star: f64,
    pub objective: f64,
    pub branch: SolutionBranch,
}

/// Outcome of [`optimize`]: either a solution or the typed statement that
/// the harshness sits below the phase threshold, in which case the caller
/// should explore finite `kappa0` strategies instead.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum OptimizeOutcome {
    Solved(ReducedSolution),
    PhaseFailure { r_threshold: f64 },
}

/// Reduced welfare objective `J(v, p)` in the `kappa0 -> inf` limit.
pub fn reduced_objective(
    v: f64,
    p: f64,
    pop: &PopulationModel,
    crime: &CrimeParams,
    costs: &CostParams,
) -> f64 {
    let al = pop.wealth.alpha();
    let w_m = pop.wealth.w_m();
    let eps = pop.epsilon;
    let va = pow(v, al);
    let va1 = pow(v, al - 1.0);
    crime.l * (1.0 - va)
        - al / (al - 1.0) * crime.b * w_m * (1.0 - va1)
        - p * costs.c_f * (va + eps)
        - al / (al - 1.0) * p * crime.g * crime.s * w_m * (va1 + eps)
        - costs.c_p * p
}

/// Constraint curve `v_c(p) = beta (b - pi(p) s) / (2 pi(p) r)`: the
/// smallest ratio at which the imprisonment cost still decays.
pub fn constraint_v_c(
    p: f64,
    pop: &PopulationModel,
    crime: &CrimeParams,
    r: f64,
    gamma: f64,
) -> Result<f64, OptimizerError> {
    let pi = weighting_pi(p, gamma)?;
    if pi <= 0.0 {
        return Err(OptimizerError::Domain("constraint curve needs p > 0"));
    }
    Ok(pop.discount.beta() * (crime.b - pi * crime.s) / (2.0 * pi * r))
}

/// Inverse constraint curve `p_c(v) = pi^-1(b beta / (2 v r + s beta))`.
pub fn constraint_p_c(
    v: f64,
    pop: &PopulationModel,
    crime: &CrimeParams,
    r: f64,
    gamma: f64,
) -> Result<f64, OptimizerError> {
    let beta = pop.discount.beta();
    let target = crime.b * beta / (2.0 * v * r + crime.s * beta);
    if !(0.0..=1.0).contains(&target) {
        return Err(OptimizerError::Domain(
            "inverse weighting argument outside [0, 1]",
        ));
    }
    Ok(weighting_pi_inverse(target, gamma)?)
}

/// Location of the unconstrained per-`p` maximum of `J(v, p)` in `v`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum UnconstrainedV {
    Interior(f64),
    /// `b - p g s <= 0`: the fine-branch maximum degenerates to `v -> 0+`
    /// and only the constraint curve binds.
    Degenerate,
}

/// `v_o(p) = (b - p g s) w_m / (l + p c_f)`.
pub fn unconstrained_v_opt(
    p: f64,
    pop: &PopulationModel,
    crime: &CrimeParams,
    costs: &CostParams,
) -> UnconstrainedV {
    let num = crime.b - p * crime.g * crime.s;
    if num <= 0.0 {
        return UnconstrainedV::Degenerate;
    }
    UnconstrainedV::Interior(num * pop.wealth.w_m() / (crime.l + p * costs.c_f))
}

/// Inverse of the unconstrained curve:
/// `p_o(v) = (b w_m - l v) / (g s w_m + c_f v)`.
pub fn unconstrained_p_opt(
    v: f64,
    pop: &PopulationModel,
    crime: &CrimeParams,
    costs: &CostParams,
) -> f64 {
    let w_m = pop.wealth.w_m();
    (crime.b * w_m - crime.l * v) / (crime.g * crime.s * w_m + costs.c_f * v)
}

/// Global per-`p` maximizer `v*(p) = min(1, max(v_c(p), v_o(p)))`.
///
/// The objective rises to `v_o` and falls after it, so the constrained
/// maximum over `[v_c, 1]` is the unconstrained point clamped into the
/// feasible interval.
pub fn v_star(
    p: f64,
    pop: &PopulationModel,
    crime: &CrimeParams,
    costs: &CostParams,
    r: f64,
    gamma: f64,
) -> Result<f64, OptimizerError> {
    let vc = constraint_v_c(p, pop, crime, r, gamma)?;
    let vo = match unconstrained_v_opt(p, pop, crime, costs) {
        UnconstrainedV::Interior(v) => v,
        UnconstrainedV::Degenerate => 0.0,
    };
    Ok(vc.max(vo).min(1.0))
}

/// Optimal fine for a given apprehension probability:
/// `f*(p) = min(2 w_m r / beta, (b - pi s)/(b - p g s) * (l + c_f p)/pi)`.
///
/// The first branch is the phase-transition fine ceiling; the second is
/// the fine implied by the unconstrained ratio.
pub fn f_star(
    p: f64,
    pop: &PopulationModel,
    crime: &CrimeParams,
    costs: &CostParams,
    r: f64,
    gamma: f64,
) -> Result<f64, OptimizerError> {
    let pi = weighting_pi(p, gamma)?;
    if pi <= 0.0 {
        return Err(OptimizerError::Domain("fine is undefined at p = 0"));
    }
    let beta = pop.discount.beta();
    let w_m = pop.wealth.w_m();
    let ceiling = 2.0 * w_m * r / beta;
    let denom = crime.b - p * crime.g * crime.s;
    if denom <= 0.0 {
        return Ok(ceiling);
    }
    let implied = (crime.b - pi * crime.s) / denom * (crime.l + costs.c_f * p) / pi;
    Ok(ceiling.min(implied))
}

/// Fine implied by a ratio `v` at probability `p` through
/// `f = w0 (b - pi s)/pi` with `w0 = w_m / v`.
pub fn fine_for_ratio(
    v: f64,
    p: f64,
    pop: &PopulationModel,
    crime: &CrimeParams,
    gamma: f64,
) -> Result<f64, OptimizerError> {
    let pi = weighting_pi(p, gamma)?;
    if pi <= 0.0 || v <= 0.0 {
        return Err(OptimizerError::Domain("fine needs p > 0 and v > 0"));
    }
    Ok(pop.wealth.w_m() / v * (crime.b - pi * crime.s) / pi)
}

/// Smallest feasible probability `p_min = pi^-1(b beta / (2 r + s beta))`.
pub fn p_min(
    pop: &PopulationModel,
    crime: &CrimeParams,
    r: f64,
    gamma: f64,
) -> Result<f64, OptimizerError> {
    let beta = pop.discount.beta();
    let arg = crime.b * beta / (2.0 * r + crime.s * beta);
    if !(0.0..=1.0).contains(&arg) {
        return Err(OptimizerError::Domain("harshness below phase threshold"));
    }
    Ok(weighting_pi_inverse(arg, gamma)?)
}

const P_SCAN: usize = 512;
const P_TOL: f64 = 1e-8;

/// Solves the reduced problem.
///
/// Below the harshness threshold returns [`OptimizeOutcome::PhaseFailure`]
/// rather than an error: the reduction is simply not valid there. When
/// `p_o(1) >= p_min` the corner `(v, p) = (1, p_min)` is the proven global
/// maximum; otherwise a scan plus golden refinement searches
/// `p in (p_min, 1]` along `p -> J(v*(p), p)`.
pub fn optimize(
    pop: &PopulationModel,
    crime: &CrimeParams,
    costs: &CostParams,
    r: f64,
    gamma: f64,
) -> Result<OptimizeOutcome, OptimizerError> {
    let beta = pop.discount.beta();
    let r_threshold = (crime.b - crime.s) * beta / 2.0;
    if r <= r_threshold {
        return Ok(OptimizeOutcome::PhaseFailure { r_threshold });
    }
    let pmin = p_min(pop, crime, r, gamma)?;
    let po1 = unconstrained_p_opt(1.0, pop, crime, costs);
    if po1 >= pmin {
        let objective = reduced_objective(1.0, pmin, pop, crime, costs);
        return Ok(OptimizeOutcome::Solved(ReducedSolution {
            p_star: pmin,
            v_star: 1.0,
            f_star: 2.0 * r * pop.wealth.w_m() / beta,
            objective,
            branch: SolutionBranch::SpecialCase,
        }));
    }

    // p_min is an open endpoint: start the numeric search just inside
    let lo = pmin + 1e-9;
    let hi = 1.0;
    let objective_at = |p: f64| -> f64 {
        match v_star(p, pop, crime, costs, r, gamma) {
            Ok(v) => reduced_objective(v, p, pop, crime, costs),
            Err(_) => f64::NEG_INFINITY,
        }
    };
    // The profile p -> J(v*(p), p) is smooth except for a kink wherever
    // the binding side of v* switches (v_c crossing v_o), which can split
    // a scan cell into two local maxima. Refine around the best scan cell
    // and around every switch cell, and keep the best.
    let step = (hi - lo) / P_SCAN as f64;
    let scan_p = |i: usize| lo + (i as f64 + 0.5) * step;
    let binding_gap = |p: f64| -> f64 {
        let vc = constraint_v_c(p, pop, crime, r, gamma).unwrap_or(f64::INFINITY);
        let vo = match unconstrained_v_opt(p, pop, crime, costs) {
            UnconstrainedV::Interior(v) => v,
            UnconstrainedV::Degenerate => 0.0,
        };
        vc - vo
    };
    let mut best_i = 0usize;
    let mut best_v = f64::NEG_INFINITY;
    for i in 0..P_SCAN {
        let v = objective_at(scan_p(i));
        if v > best_v {
            best_v = v;
            best_i = i;
        }
    }
    let mut candidates = alloc::vec![best_i];
    let mut prev_gap = binding_gap(scan_p(0));
    for i in 1..P_SCAN {
        let gap = binding_gap(scan_p(i));
        if prev_gap.signum() != gap.signum() {
            candidates.push(i.saturating_sub(1));
            candidates.push(i);
        }
        prev_gap = gap;
    }
    let mut p_star = scan_p(best_i);
    let mut objective = best_v;
    for &i in &candidates {
        // bracket the neighboring scan midpoints symmetrically
        let a = (lo + (i as f64 - 0.5) * step).max(lo);
        let b = (lo + (i as f64 + 1.5) * step).min(hi);
        let (p_cand, neg) = golden::minimize(|p| -objective_at(p), a, b, P_TOL);
        if -neg > objective {
            objective = -neg;
            p_star = p_cand;
        }
    }
    // the closed upper endpoint is a candidate of its own
    if objective_at(hi) > objective {
        objective = objective_at(hi);
        p_star = hi;
    }
    let v = v_star(p_star, pop, crime, costs, r, gamma)?;
    let f = f_star(p_star, pop, crime, costs, r, gamma)?;
    let branch = if p_star > 1.0 - 1e-9 {
        SolutionBranch::Boundary
    } else {
        SolutionBranch::Interior
    };
    Ok(OptimizeOutcome::Solved(ReducedSolution {
        p_star,
        v_star: v,
        f_star: f,
        objective,
        branch,
    }))
}

/// Exhaustive argmax of the reduced objective over a discretization of
/// the feasible region `{(v, p) : v >= v_c(p)}`; deterministic validation
/// oracle.
///
/// Each probability column carries its own ratio lattice
/// `v = v_c(p) + q (1 - v_c(p))`, `q = 0, 1/res, ..., 1`, so the first
/// node sits exactly on the constraint curve. An absolute `v` lattice
/// would quantize the curve itself, and where the optimum rides the
/// curve (the objective is first order in `v` there) that quantization
/// aliases the argmax several cells along the ridge.
pub fn grid_oracle(
    pop: &PopulationModel,
    crime: &CrimeParams,
    costs: &CostParams,
    r: f64,
    gamma: f64,
    resolution: usize,
) -> Result<(f64, f64, f64), OptimizerError> {
    if resolution < 2 {
        return Err(OptimizerError::Domain("resolution must be at least 2"));
    }
    let mut best = (f64::NAN, f64::NAN, f64::NEG_INFINITY);
    for j in 1..=resolution {
        let p = j as f64 / resolution as f64;
        let vc = constraint_v_c(p, pop, crime, r, gamma)?;
        if vc > 1.0 {
            continue;
        }
        for i in 0..=resolution {
            let v = vc + (1.0 - vc) * i as f64 / resolution as f64;
            let obj = reduced_objective(v, p, pop, crime, costs);
            if obj > best.2 {
                best = (v, p, obj);
            }
        }
    }
    if best.2 == f64::NEG_INFINITY {
        return Err(OptimizerError::Domain("feasible region empty on grid"));
    }
    Ok(best)
}
