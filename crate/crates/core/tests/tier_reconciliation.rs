//! Reconciliation of the closed-form welfare expressions against the
//! nested quadrature oracle on random parameter draws.
//!
//! The quadrature oracle is the source of truth; the closed forms must
//! track it to special-function accuracy across the whole draw box.

use deterrence_core::behavior::{CrimeParams, StrategyTargets};
use deterrence_core::dist::{DiscountDist, GammaDist, PopulationModel, WealthDist};
use deterrence_core::welfare::{welfare_closed_form, welfare_quadrature, CostParams};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

struct Draw {
    pop: PopulationModel,
    crime: CrimeParams,
    costs: CostParams,
    targets: StrategyTargets,
    t: f64,
    tau: f64,
}

fn uniform(rng: &mut ChaCha12Rng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.gen::<f64>()
}

fn random_draw(rng: &mut ChaCha12Rng) -> Draw {
    let alpha = uniform(rng, 1.2, 4.0);
    let w_m = uniform(rng, 50.0, 500.0);
    let rho = uniform(rng, 0.05, 1.0);
    let beta = uniform(rng, 0.001, 0.1);
    let eps = uniform(rng, 0.0, 0.5);
    let pop = PopulationModel::new(
        WealthDist::new(alpha, w_m).unwrap(),
        DiscountDist::new(rho, beta).unwrap(),
        GammaDist::new(0.61, 0.07).unwrap(),
        eps,
    )
    .unwrap();

    let b = uniform(rng, 0.5, 2.0);
    let crime = CrimeParams {
        b,
        s: uniform(rng, 0.0, 0.6) * b,
        l: uniform(rng, 200.0, 2000.0),
        g: uniform(rng, 1.1, 3.0),
        lambda: uniform(rng, 0.0, 0.01),
    };
    // keep c_tau above Lambda*l so every imprisonment cost term stays
    // positive and relative agreement is well defined
    let costs = CostParams {
        c_p: uniform(rng, 0.0, 100.0),
        c_f: uniform(rng, 1.0, 100.0),
        c_0: uniform(rng, 0.0, 100.0),
        c_t: uniform(rng, 0.0, 100.0),
        c_tau: crime.lambda * crime.l + uniform(rng, 0.5, 50.0),
        m_options: uniform(rng, 1.0, 4.0).floor().max(1.0),
    };

    let v = uniform(rng, 0.05, 0.95);
    let kappa0 = uniform(rng, 0.1, 20.0);
    let targets = StrategyTargets {
        p: uniform(rng, 0.05, 1.0),
        w0: w_m / v,
        k0: kappa0 * beta,
        t: 0.0,
        r: uniform(rng, 0.01, 0.2),
    };
    Draw {
        pop,
        crime,
        costs,
        targets,
        t: uniform(rng, 1.0, 100.0),
        tau: uniform(rng, 1.0, 1000.0),
    }
}

fn j0_scale(d: &Draw) -> f64 {
    d.crime.l + d.crime.b * d.pop.wealth.w_m() * d.pop.wealth.alpha() / (d.pop.wealth.alpha() - 1.0)
}

#[test]
fn closed_forms_match_quadrature_on_random_draws() {
    let mut rng = ChaCha12Rng::seed_from_u64(20240614);
    let mut checked = 0usize;
    let mut worst = (0.0f64, 0.0f64, 0.0f64);
    while checked < 100 {
        let d = random_draw(&mut rng);
        let c = welfare_closed_form(&d.targets, &d.pop, &d.crime, &d.costs, d.t, d.tau).unwrap();
        // a draw whose deterrence benefit crosses zero cannot carry a
        // relative comparison; redraw deterministically
        if c.j0.abs() < 1e-5 * j0_scale(&d) {
            continue;
        }
        let q = welfare_quadrature(&d.targets, &d.pop, &d.crime, &d.costs, d.t, d.tau).unwrap();

        let e0 = ((q.j0 - c.j0) / c.j0).abs();
        let e1 = ((q.j1 - c.j1) / c.j1).abs();
        let e2 = if c.j2 == 0.0 {
            q.j2.abs()
        } else {
            ((q.j2 - c.j2) / c.j2).abs()
        };
        assert!(
            e0 < 1e-9,
            "draw {checked}: j0 quad {} closed {}",
            q.j0,
            c.j0
        );
        assert!(
            e1 < 1e-6,
            "draw {checked}: j1 quad {} closed {}",
            q.j1,
            c.j1
        );
        assert!(
            e2 < 1e-6,
            "draw {checked}: j2 quad {} closed {}",
            q.j2,
            c.j2
        );
        worst = (worst.0.max(e0), worst.1.max(e1), worst.2.max(e2));
        checked += 1;
    }
    println!(
        "worst relative gaps over {checked} draws: j0 {:.2e}, j1 {:.2e}, j2 {:.2e}",
        worst.0, worst.1, worst.2
    );
}

#[test]
fn totals_recompute_identically_in_both_tiers() {
    let mut rng = ChaCha12Rng::seed_from_u64(7);
    for _ in 0..20 {
        let d = random_draw(&mut rng);
        let c = welfare_closed_form(&d.targets, &d.pop, &d.crime, &d.costs, d.t, d.tau).unwrap();
        let reassembled = c.j0 - d.targets.p * (c.j1 + c.j2) - c.detection;
        assert_eq!(c.total, reassembled);
    }
}
