//! Cross-validation of the Monte-Carlo simulator against the analytic
//! pipeline: partition fractions against region probabilities and
//! realized welfare against the quadrature oracle.

use deterrence_core::behavior::{
    psi, target_w0, tau_for_target, CrimeParams, PenalStrategy, StrategyTargets,
};
use deterrence_core::dist::{DiscountDist, GammaDist, PopulationModel, WealthDist};
use deterrence_core::quad::{self, QuadConfig};
use deterrence_core::sim::{build_population, simulate, GammaMode, SimConfig};
use deterrence_core::welfare::{welfare_quadrature, CostParams};

fn pop(eps: f64) -> PopulationModel {
    PopulationModel::new(
        WealthDist::new(2.0, 100.0).unwrap(),
        DiscountDist::new(0.66, 0.00431).unwrap(),
        GammaDist::new(0.61, 0.07).unwrap(),
        eps,
    )
    .unwrap()
}

fn crime() -> CrimeParams {
    CrimeParams {
        b: 1.0,
        s: 0.3,
        l: 900.0,
        g: 2.0,
        lambda: 0.001,
    }
}

fn costs() -> CostParams {
    CostParams {
        c_p: 40.0,
        c_f: 25.0,
        c_0: 12.0,
        c_t: 6.0,
        c_tau: 2.0,
        m_options: 2.0,
    }
}

/// Builds a strategy whose exact partition hugs the straight partition
/// line: long delay (`k0 t` large) with the constraint-bound `tau`, the
/// regime where the indifference curve flattens onto the chord.
fn deep_regime_strategy(
    pop: &PopulationModel,
    cr: &CrimeParams,
    p: f64,
    r: f64,
    kappa0: f64,
    v: f64,
) -> (PenalStrategy, StrategyTargets, f64, f64) {
    let gamma = pop.gamma.mu();
    let k0 = kappa0 * pop.discount.beta();
    let psi_v = psi(p, cr, r, gamma).unwrap();
    let t = 1e4 / k0;
    let tau = tau_for_target(k0, t, psi_v);
    let pi = deterrence_pi(p, gamma);
    let w0 = pop.wealth.w_m() / v;
    let f = w0 * (cr.b - pi * cr.s) / pi;
    let strat = PenalStrategy { p, f, t, tau, r };
    let w0_check = target_w0(&strat, cr, gamma).unwrap();
    assert!(((w0_check - w0) / w0).abs() < 1e-12);
    let targets = StrategyTargets { p, w0, k0, t, r };
    (strat, targets, t, tau)
}

fn deterrence_pi(p: f64, gamma: f64) -> f64 {
    deterrence_core::dist::weighting_pi(p, gamma).unwrap()
}

#[test]
fn partition_fractions_match_region_probabilities() {
    let pop_model = pop(0.0);
    let cr = crime();
    let (p, r, kappa0) = (0.6, 0.05, 1.2);
    let gamma = pop_model.gamma.mu();
    let k0 = kappa0 * pop_model.discount.beta();
    let psi_v = psi(p, &cr, r, gamma).unwrap();
    let t = 1e4 / k0;
    let tau = tau_for_target(k0, t, psi_v);
    let v = 0.45;
    let w0 = pop_model.wealth.w_m() / v;
    let f = w0 * (cr.b - deterrence_pi(p, gamma) * cr.s) / deterrence_pi(p, gamma);
    let strat = PenalStrategy { p, f, t, tau, r };

    let cfg = SimConfig {
        n_agents: 100_000,
        delta_t: 50.0,
        lambda_rate: 3.0 / (100_000.0 * 50.0),
        seed: 404,
        gamma_mode: GammaMode::SharedMean,
    };
    let agents = build_population(&pop_model, &cfg);
    let rep = simulate(&agents, &strat, &cr, &costs(), &cfg).unwrap();

    // analytic rectangle probability: F_W-band times F_K(k0)
    let n = cfg.n_agents as f64;
    let p_rect = {
        let fw = pop_model.wealth.pdf_cdf(w0).unwrap().1;
        let fk = pop_model.discount.pdf_cdf(k0).unwrap().cdf;
        fw * fk
    };
    let frac = rep.non_offenders as f64 / n;
    let se = (p_rect * (1.0 - p_rect) / n).sqrt();
    assert!(
        (frac - p_rect).abs() < 3.0 * se,
        "non-offenders {frac} vs {p_rect} (se {se})"
    );

    // fine region: w > w0 (or any w for offenders below the curve);
    // integrate the exact indifference curve condition
    let qcfg = QuadConfig::with_rel_tol(1e-10);
    let p_fine = quad::integrate_power_tail(
        |w| {
            // offender iff w >= w0 or k >= k0; fine iff f <= I(w,k)
            // P(fine | w) = P(k <= k_curve(w)) minus the deterred overlap
            let k_curve = invert_curve(w, &strat);
            let fk_curve = pop_model.discount.pdf_cdf(k_curve).unwrap().cdf;
            let deterred = if w < w0 {
                pop_model.discount.pdf_cdf(k0).unwrap().cdf
            } else {
                0.0
            };
            (fk_curve - deterred).max(0.0) * pop_model.wealth.pdf(w)
        },
        pop_model.wealth.w_m(),
        &qcfg,
    )
    .value;
    let frac_fine = rep.fine_choosers as f64 / n;
    let se_fine = (p_fine * (1.0 - p_fine) / n).sqrt();
    assert!(
        (frac_fine - p_fine).abs() < 3.5 * se_fine,
        "fine {frac_fine} vs {p_fine} (se {se_fine})"
    );
}

/// Largest k with `I(w, k) >= f`, i.e. the exact partition curve read as
/// a k-threshold at fixed wealth (the disutility falls with k).
fn invert_curve(w: f64, strat: &PenalStrategy) -> f64 {
    let mag = |k: f64| deterrence_core::behavior::imprisonment_disutility_magnitude(w, k, strat);
    if mag(0.0) < strat.f {
        return 0.0;
    }
    let mut lo = 0.0;
    let mut hi = 1.0;
    while mag(hi) >= strat.f {
        hi *= 4.0;
        if hi > 1e12 {
            return hi;
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mag(mid) >= strat.f {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn realized_welfare_tracks_quadrature() {
    let pop_model = pop(0.2);
    let cr = crime();
    let co = costs();
    let (strat, targets, t, tau) = deep_regime_strategy(&pop_model, &cr, 0.6, 0.05, 1.2, 0.45);
    let analytic = welfare_quadrature(&targets, &pop_model, &cr, &co, t, tau)
        .unwrap()
        .total;
    let cfg = SimConfig {
        n_agents: 100_000,
        delta_t: 50.0,
        lambda_rate: 3.0 / (100_000.0 * 50.0),
        seed: 31337,
        gamma_mode: GammaMode::SharedMean,
    };
    let agents = build_population(&pop_model, &cfg);
    let rep = simulate(&agents, &strat, &cr, &co, &cfg)
        .unwrap()
        .with_analytic(analytic);
    assert_eq!(rep.seed, 31337);
    assert!(
        rep.agrees_within(3.0).unwrap(),
        "realized {} +- {} vs analytic {analytic}",
        rep.realized_welfare,
        rep.realized_se
    );
    // accounting identities: tallies cover the population and the total
    // recomputes from the per-label welfare parts exactly
    assert_eq!(
        rep.non_offenders + rep.fine_choosers + rep.prison_choosers,
        rep.n_agents
    );
    assert!(rep.offenses <= rep.opportunities);
    let recomputed =
        rep.welfare_deterred + rep.welfare_fines + rep.welfare_prison - rep.detection_cost;
    assert_eq!(rep.realized_welfare, recomputed);
}
