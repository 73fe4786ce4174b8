//! Parametric population-trait distributions and the probability
//! weighting function.
//!
//! Wealth follows a Pareto law on `[w_m, inf)`, the discount rate follows a
//! zero-inflated exponential (a point mass at `k = 0` plus an exponential
//! tail), and the weighting factor is normal, truncated to keep the
//! weighting function well defined.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::fmath::{exp, exp_m1, ln, pow};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DistError {
    /// A constructor argument violates a distribution invariant.
    InvalidParameter(&'static str),
    /// An evaluation point lies outside the distribution support.
    Domain(&'static str),
    /// The weighting function is not strictly increasing for this factor,
    /// so its inverse is not defined.
    NonMonotoneWeighting,
}

impl core::fmt::Display for DistError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            DistError::InvalidParameter(what) => write!(f, "invalid parameter: {what}"),
            DistError::Domain(what) => write!(f, "outside support: {what}"),
            DistError::NonMonotoneWeighting => {
                write!(f, "weighting function not monotone for this factor")
            }
        }
    }
}

/// Pareto wealth distribution on `[w_m, inf)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WealthDist {
    alpha: f64,
    w_m: f64,
}

impl WealthDist {
    /// Requires `alpha > 1` (finite mean) and `w_m > 0`.
    pub fn new(alpha: f64, w_m: f64) -> Result<Self, DistError> {
        if !(alpha > 1.0) || !alpha.is_finite() {
            return Err(DistError::InvalidParameter("alpha must be > 1"));
        }
        if !(w_m > 0.0) || !w_m.is_finite() {
            return Err(DistError::InvalidParameter("w_m must be > 0"));
        }
        Ok(Self { alpha, w_m })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn w_m(&self) -> f64 {
        self.w_m
    }

    /// Density and cumulative at `w >= w_m`.
    pub fn pdf_cdf(&self, w: f64) -> Result<(f64, f64), DistError> {
        if w < self.w_m {
            return Err(DistError::Domain("w below minimum wealth"));
        }
        let ratio = self.w_m / w;
        let pdf = self.alpha * pow(self.w_m, self.alpha) / pow(w, self.alpha + 1.0);
        let cdf = 1.0 - pow(ratio, self.alpha);
        Ok((pdf, cdf))
    }

    pub fn pdf(&self, w: f64) -> f64 {
        if w < self.w_m {
            0.0
        } else {
            self.alpha * pow(self.w_m, self.alpha) / pow(w, self.alpha + 1.0)
        }
    }

    pub fn mean(&self) -> f64 {
        self.alpha * self.w_m / (self.alpha - 1.0)
    }

    pub fn median(&self) -> f64 {
        self.w_m * pow(2.0, 1.0 / self.alpha)
    }

    fn quantile(&self, u: f64) -> f64 {
        self.w_m * pow(1.0 - u, -1.0 / self.alpha)
    }

    pub fn sample(&self, count: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        (0..count)
            .map(|_| self.quantile(rng.gen::<f64>()))
            .collect()
    }
}

/// How the zero-inflated density evaluates at a point: the atom carries
/// finite mass and is reported separately from the continuous part.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZiePoint {
    /// Mass concentrated at `k = 0` (zero unless evaluated at the atom).
    pub atom_mass: f64,
    /// Continuous density `rho * exp(-k/beta) / beta`.
    pub density: f64,
    /// Cumulative including the atom.
    pub cdf: f64,
}

/// Zero-inflated exponential discount-rate distribution.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiscountDist {
    rho: f64,
    beta: f64,
}

impl DiscountDist {
    /// Requires `rho` in `[0, 1]` and `beta > 0`.
    pub fn new(rho: f64, beta: f64) -> Result<Self, DistError> {
        if !(0.0..=1.0).contains(&rho) {
            return Err(DistError::InvalidParameter("rho must be in [0, 1]"));
        }
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(DistError::InvalidParameter("beta must be > 0"));
        }
        Ok(Self { rho, beta })
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn pdf_cdf(&self, k: f64) -> Result<ZiePoint, DistError> {
        if k < 0.0 {
            return Err(DistError::Domain("k must be nonnegative"));
        }
        let atom_mass = if k == 0.0 { 1.0 - self.rho } else { 0.0 };
        let density = self.rho * exp(-k / self.beta) / self.beta;
        let cdf = (1.0 - self.rho) + self.rho * (-exp_m1(-k / self.beta));
        Ok(ZiePoint {
            atom_mass,
            density,
            cdf,
        })
    }

    pub fn sample(&self, count: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        (0..count)
            .map(|_| {
                if rng.gen::<f64>() < 1.0 - self.rho {
                    0.0
                } else {
                    -self.beta * ln(1.0 - rng.gen::<f64>())
                }
            })
            .collect()
    }
}

/// Truncation window for weighting-factor draws; keeps `pi` well defined.
pub const GAMMA_TRUNCATION: (f64, f64) = (0.01, 0.99);

/// Normal distribution of the probability weighting factor, truncated by
/// rejection to [`GAMMA_TRUNCATION`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GammaDist {
    mu: f64,
    sigma: f64,
}

impl GammaDist {
    /// Requires `0 < mu < 1` and `sigma >= 0`.
    pub fn new(mu: f64, sigma: f64) -> Result<Self, DistError> {
        if !(mu > 0.0 && mu < 1.0) {
            return Err(DistError::InvalidParameter("mu_gamma must be in (0, 1)"));
        }
        if !(sigma >= 0.0) || !sigma.is_finite() {
            return Err(DistError::InvalidParameter("sigma_gamma must be >= 0"));
        }
        Ok(Self { mu, sigma })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn sample(&self, count: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        (0..count).map(|_| self.draw(&mut rng)).collect()
    }

    pub fn draw<R: Rng>(&self, rng: &mut R) -> f64 {
        if self.sigma == 0.0 {
            return self.mu;
        }
        let (lo, hi) = GAMMA_TRUNCATION;
        loop {
            let g = self.mu + self.sigma * standard_normal(rng);
            if g > lo && g < hi {
                return g;
            }
        }
    }
}

/// One standard-normal draw (Box-Muller, first component).
pub fn standard_normal<R: Rng>(rng: &mut R) -> f64 {
    loop {
        let u1: f64 = rng.gen();
        if u1 <= f64::MIN_POSITIVE {
            continue;
        }
        let u2: f64 = rng.gen();
        let r = crate::fmath::sqrt(-2.0 * ln(u1));
        return r * libm::cos(2.0 * core::f64::consts::PI * u2);
    }
}

/// Full population model: wealth, discount rate, weighting factor, and the
/// uninformed fraction `epsilon`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PopulationModel {
    pub wealth: WealthDist,
    pub discount: DiscountDist,
    pub gamma: GammaDist,
    pub epsilon: f64,
}

impl PopulationModel {
    pub fn new(
        wealth: WealthDist,
        discount: DiscountDist,
        gamma: GammaDist,
        epsilon: f64,
    ) -> Result<Self, DistError> {
        if !(epsilon >= 0.0) || !epsilon.is_finite() {
            return Err(DistError::InvalidParameter("epsilon must be >= 0"));
        }
        Ok(Self {
            wealth,
            discount,
            gamma,
            epsilon,
        })
    }
}

/// Probability weighting function
/// `pi(p) = p^gamma / (p^gamma + (1-p)^gamma)^(1/gamma)`.
///
/// Requires `p` in `[0, 1]` and `gamma` in `(0, 1]`; hits the endpoints
/// exactly.
pub fn weighting_pi(p: f64, gamma: f64) -> Result<f64, DistError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(DistError::Domain("p must be in [0, 1]"));
    }
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(DistError::Domain("gamma must be in (0, 1]"));
    }
    if p == 0.0 {
        return Ok(0.0);
    }
    if p == 1.0 {
        return Ok(1.0);
    }
    let pg = pow(p, gamma);
    let qg = pow(1.0 - p, gamma);
    Ok(pg / pow(pg + qg, 1.0 / gamma))
}

/// Grid check that `pi(., gamma)` is strictly increasing on `[0, 1]`.
///
/// The factor range where monotonicity fails is never stated analytically;
/// the inverse refuses to run on a factor the grid rejects.
pub fn pi_is_monotone(gamma: f64, grid: usize) -> bool {
    if !(gamma > 0.0 && gamma <= 1.0) {
        return false;
    }
    let mut prev = 0.0;
    for i in 1..=grid {
        let p = i as f64 / grid as f64;
        let v = match weighting_pi(p, gamma) {
            Ok(v) => v,
            Err(_) => return false,
        };
        if v <= prev {
            return false;
        }
        prev = v;
    }
    true
}

const MONOTONE_GRID: usize = 10_000;

/// Inverse of the weighting function by bisection.
///
/// Errors with [`DistError::NonMonotoneWeighting`] when the grid check
/// rejects `gamma`.
pub fn weighting_pi_inverse(y: f64, gamma: f64) -> Result<f64, DistError> {
    if !(0.0..=1.0).contains(&y) {
        return Err(DistError::Domain("y must be in [0, 1]"));
    }
    if !pi_is_monotone(gamma, MONOTONE_GRID) {
        return Err(DistError::NonMonotoneWeighting);
    }
    if y == 0.0 {
        return Ok(0.0);
    }
    if y == 1.0 {
        return Ok(1.0);
    }
    let mut lo = 0.0f64;
    let mut hi = 1.0f64;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if weighting_pi(mid, gamma)? < y {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-16 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Interior fixed point `p*` of `pi(p) = p`, the probability below which
/// events are over-weighted.
///
/// Requires `gamma` strictly inside `(0, 1)`; at `gamma = 1` every `p` is a
/// fixed point and the operation is rejected.
pub fn pi_fixed_point(gamma: f64) -> Result<f64, DistError> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(DistError::Domain("gamma must be in (0, 1)"));
    }
    // F(p) = (pi/p)^gamma = p^(gamma(gamma-1)) / (p^gamma + (1-p)^gamma);
    // F decreases through 1 somewhere in (0, 1/2) since F(0+) = inf and
    // F(1/2) = 2^-(1-gamma)^2 < 1. Bisect on ln F.
    let ln_f = |p: f64| gamma * (gamma - 1.0) * ln(p) - ln(pow(p, gamma) + pow(1.0 - p, gamma));
    let mut lo = 1e-30f64;
    debug_assert!(ln_f(lo) > 0.0);
    let mut hi = 0.5f64;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if ln_f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-16 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}
