//! Monte-Carlo population simulator.
//!
//! Agents carry independently drawn traits; criminal opportunities arrive
//! per agent as a Poisson count over the horizon. Realized welfare
//! accumulates the same per-opportunity summands the analytic integrals
//! average, so the report cross-validates the closed-form pipeline.
//!
//! Determinism: every agent owns a counter-derived RNG stream, and the
//! reduction sums per-agent totals in index order, so a report depends
//! only on the seed regardless of how the agent loop is scheduled.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::behavior::{
    burglary_classify, classify, Agent, BehaviorError, BurglaryStrategy, CrimeParams,
    PartitionLabel, PenalStrategy,
};
use crate::dist::PopulationModel;
use crate::fmath::{exp, ln, sqrt};
use crate::welfare::CostParams;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GammaMode {
    /// Every agent carries the population mean factor (the analytic
    /// pipeline's constant-factor assumption).
    SharedMean,
    /// Each agent draws its own factor; measures the cost of the
    /// constant-factor assumption.
    PerAgent,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimConfig {
    pub n_agents: usize,
    /// Horizon in hours.
    pub delta_t: f64,
    /// Per-edge opportunity rate; each agent sees `n_agents * lambda_rate`
    /// opportunities per hour in expectation.
    pub lambda_rate: f64,
    pub seed: u64,
    pub gamma_mode: GammaMode,
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), BehaviorError> {
        if self.n_agents >= 1 && self.delta_t > 0.0 && self.lambda_rate >= 0.0 {
            Ok(())
        } else {
            Err(BehaviorError::Dist(
                crate::dist::DistError::InvalidParameter("sim config out of range"),
            ))
        }
    }

    /// Expected opportunities per agent over the horizon.
    pub fn opportunity_mean(&self) -> f64 {
        self.n_agents as f64 * self.lambda_rate * self.delta_t
    }
}

/// Simulation outcome with per-partition tallies and realized welfare.
#[derive(Clone, Debug, PartialEq)]
pub struct SimReport {
    pub seed: u64,
    pub n_agents: usize,
    pub n_informed: usize,
    pub n_uninformed: usize,
    pub non_offenders: usize,
    pub fine_choosers: usize,
    pub prison_choosers: usize,
    pub opportunities: u64,
    pub offenses: u64,
    /// Realized welfare per informed member per expected opportunity,
    /// on the same zero as the analytic welfare function.
    pub realized_welfare: f64,
    pub realized_se: f64,
    /// Per-label welfare contributions in the same normalization; the
    /// total recomputes as their sum minus the detection cost.
    pub welfare_deterred: f64,
    pub welfare_fines: f64,
    pub welfare_prison: f64,
    pub detection_cost: f64,
    /// Analytic value for comparison, when the caller provides one.
    pub analytic_welfare: Option<f64>,
}

impl SimReport {
    /// Attaches the analytic comparison value.
    pub fn with_analytic(mut self, value: f64) -> Self {
        self.analytic_welfare = Some(value);
        self
    }

    /// Whether the realized value sits within `z` standard errors of the
    /// attached analytic value.
    pub fn agrees_within(&self, z: f64) -> Option<bool> {
        self.analytic_welfare
            .map(|a| (self.realized_welfare - a).abs() <= z * self.realized_se)
    }
}

/// Derives a per-agent RNG stream from the run seed.
fn agent_rng(seed: u64, index: u64) -> ChaCha12Rng {
    // splitmix-style mix keeps streams decorrelated for consecutive indices
    let mut z = seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    ChaCha12Rng::seed_from_u64(z ^ (z >> 31))
}

/// Poisson draw by Knuth's product method; adequate for the modest means
/// the simulator uses.
fn poisson<R: Rng>(rng: &mut R, mean: f64) -> u64 {
    debug_assert!(mean >= 0.0);
    if mean == 0.0 {
        return 0;
    }
    if mean < 30.0 {
        let limit = exp(-mean);
        let mut count = 0u64;
        let mut prod: f64 = rng.gen();
        while prod > limit {
            count += 1;
            prod *= rng.gen::<f64>();
        }
        count
    } else {
        // split the mean; recursion depth is log2(mean/30)
        let half = poisson(rng, mean / 2.0);
        half + poisson(rng, mean - mean / 2.0)
    }
}

/// Draws the agent population.
///
/// Traits are drawn independently per agent from the model; the last
/// `floor(eps * n / (1 + eps))` agents are marked uninformed so that the
/// uninformed-to-informed ratio is `eps`.
pub fn build_population(pop: &PopulationModel, config: &SimConfig) -> Vec<Agent> {
    let n = config.n_agents;
    let n_uninformed = crate::fmath::floor(pop.epsilon * n as f64 / (1.0 + pop.epsilon)) as usize;
    let informed_cut = n - n_uninformed;
    let mut agents = Vec::with_capacity(n);
    for i in 0..n {
        let mut rng = agent_rng(config.seed, i as u64);
        let w =
            pop.wealth.w_m() * crate::fmath::pow(1.0 - rng.gen::<f64>(), -1.0 / pop.wealth.alpha());
        let k = if rng.gen::<f64>() < 1.0 - pop.discount.rho() {
            0.0
        } else {
            -pop.discount.beta() * ln(1.0 - rng.gen::<f64>())
        };
        let gamma = match config.gamma_mode {
            GammaMode::SharedMean => pop.gamma.mu(),
            GammaMode::PerAgent => pop.gamma.draw(&mut rng),
        };
        agents.push(Agent {
            w,
            k,
            gamma,
            informed: i < informed_cut,
        });
    }
    agents
}

/// Per-opportunity welfare summand for one agent under a strategy.
fn welfare_summand(
    label: PartitionLabel,
    informed: bool,
    w: f64,
    strategy: &PenalStrategy,
    crime: &CrimeParams,
    costs: &CostParams,
) -> f64 {
    match label {
        PartitionLabel::NonOffender => {
            debug_assert!(informed);
            crime.l - crime.b * w
        }
        PartitionLabel::FineChooser => -strategy.p * (costs.c_f + crime.g * crime.s * w),
        PartitionLabel::PrisonChooser => {
            let ci =
                costs.c_0 + costs.c_t / (costs.m_options * strategy.t) + costs.c_tau * strategy.tau;
            -strategy.p
                * (ci + crime.g * w * (crime.s + strategy.r * strategy.tau)
                    - crime.lambda * strategy.tau * (crime.l - crime.b * w))
        }
    }
}

/// Runs the opportunity process and accumulates realized welfare.
///
/// Opportunities arrive per agent as `Poisson(n lambda delta_t)`; each one
/// is realized as an offense unless the agent is deterred. The report
/// normalizes by (informed members x expected opportunities) and then
/// subtracts the detection cost once, matching the analytic zeroing.
pub fn simulate(
    agents: &[Agent],
    strategy: &PenalStrategy,
    crime: &CrimeParams,
    costs: &CostParams,
    config: &SimConfig,
) -> Result<SimReport, BehaviorError> {
    strategy.validate()?;
    config.validate()?;
    if strategy.t <= 0.0 {
        return Err(BehaviorError::Dist(
            crate::dist::DistError::InvalidParameter(
                "simulate needs t > 0 (celerity cost diverges)",
            ),
        ));
    }
    let mean = config.opportunity_mean();
    let mut totals = Vec::with_capacity(agents.len());
    let mut label_sums = [0.0f64; 3];
    let mut counts = [0usize; 3];
    let mut opportunities = 0u64;
    let mut offenses = 0u64;
    let mut n_informed = 0usize;

    for (i, agent) in agents.iter().enumerate() {
        let label = classify(agent, strategy, crime)?;
        counts[label_index(label)] += 1;
        if agent.informed {
            n_informed += 1;
        }
        let mut rng = agent_rng(config.seed ^ 0x5EED_0F0F_5EED_0F0F, i as u64);
        let n_opp = poisson(&mut rng, mean);
        opportunities += n_opp;
        if label != PartitionLabel::NonOffender {
            offenses += n_opp;
        }
        let summand = welfare_summand(label, agent.informed, agent.w, strategy, crime, costs);
        let contribution = n_opp as f64 * summand;
        label_sums[label_index(label)] += contribution;
        totals.push(contribution);
    }

    Ok(assemble_report(
        totals,
        label_sums,
        counts,
        opportunities,
        offenses,
        n_informed,
        agents.len(),
        mean,
        strategy.p,
        costs.c_p,
        config.seed,
    ))
}

/// Burglary variant: fixed offense gain, certain apprehension, the
/// two-line partition, and the same welfare accounting with the gain in
/// place of `b w`.
pub fn burglary_simulate(
    agents: &[Agent],
    strategy: &BurglaryStrategy,
    crime: &CrimeParams,
    costs: &CostParams,
    config: &SimConfig,
) -> Result<SimReport, BehaviorError> {
    config.validate()?;
    let mean = config.opportunity_mean();
    let p = 1.0;
    let mut totals = Vec::with_capacity(agents.len());
    let mut label_sums = [0.0f64; 3];
    let mut counts = [0usize; 3];
    let mut opportunities = 0u64;
    let mut offenses = 0u64;

    for (i, agent) in agents.iter().enumerate() {
        let label = burglary_classify(agent, strategy);
        counts[label_index(label)] += 1;
        let mut rng = agent_rng(config.seed ^ 0x5EED_0F0F_5EED_0F0F, i as u64);
        let n_opp = poisson(&mut rng, mean);
        opportunities += n_opp;
        if label != PartitionLabel::NonOffender {
            offenses += n_opp;
        }
        let summand = match label {
            PartitionLabel::NonOffender => crime.l - strategy.gain,
            PartitionLabel::FineChooser => -p * (costs.c_f + crime.g * crime.s * agent.w),
            PartitionLabel::PrisonChooser => {
                let ci = costs.c_0
                    + costs.c_t / (costs.m_options * strategy.t)
                    + costs.c_tau * strategy.tau;
                -p * (ci + crime.g * agent.w * (crime.s + strategy.r * strategy.tau)
                    - crime.lambda * strategy.tau * (crime.l - strategy.gain))
            }
        };
        let contribution = n_opp as f64 * summand;
        label_sums[label_index(label)] += contribution;
        totals.push(contribution);
    }

    Ok(assemble_report(
        totals,
        label_sums,
        counts,
        opportunities,
        offenses,
        agents.len(),
        agents.len(),
        mean,
        p,
        costs.c_p,
        config.seed,
    ))
}

fn label_index(label: PartitionLabel) -> usize {
    match label {
        PartitionLabel::NonOffender => 0,
        PartitionLabel::FineChooser => 1,
        PartitionLabel::PrisonChooser => 2,
    }
}

#[allow(clippy::too_many_arguments)]
fn assemble_report(
    totals: Vec<f64>,
    label_sums: [f64; 3],
    counts: [usize; 3],
    opportunities: u64,
    offenses: u64,
    n_informed: usize,
    n_agents: usize,
    mean_opportunities: f64,
    p: f64,
    c_p: f64,
    seed: u64,
) -> SimReport {
    let denom = mean_opportunities * n_informed as f64;
    let sum: f64 = totals.iter().sum();
    let n = totals.len() as f64;
    let avg = sum / n;
    let var: f64 = totals.iter().map(|x| (x - avg) * (x - avg)).sum::<f64>() / (n - 1.0).max(1.0);
    SimReport {
        seed,
        n_agents,
        n_informed,
        n_uninformed: n_agents - n_informed,
        non_offenders: counts[0],
        fine_choosers: counts[1],
        prison_choosers: counts[2],
        opportunities,
        offenses,
        // built from the label tallies so the total recomputes from the
        // reported parts bit for bit
        realized_welfare: (label_sums[0] / denom + label_sums[1] / denom + label_sums[2] / denom)
            - c_p * p,
        realized_se: sqrt(n * var) / denom,
        welfare_deterred: label_sums[0] / denom,
        welfare_fines: label_sums[1] / denom,
        welfare_prison: label_sums[2] / denom,
        detection_cost: c_p * p,
        analytic_welfare: None,
    }
}
