//! Distribution and weighting-function invariants, mostly as property
//! tests over random parameters.

use deterrence_core::dist::{
    pi_fixed_point, weighting_pi, weighting_pi_inverse, DiscountDist, GammaDist, WealthDist,
};
use deterrence_core::quad::{self, QuadConfig};

use proptest::prelude::*;

proptest! {
    #[test]
    fn pareto_cdf_monotone_and_bounded(
        alpha in 1.05f64..5.0,
        w_m in 1.0f64..1000.0,
        a in 0.0f64..1.0,
        b in 0.0f64..1.0,
    ) {
        let d = WealthDist::new(alpha, w_m).unwrap();
        let w1 = w_m * (1.0 + 50.0 * a.min(b));
        let w2 = w_m * (1.0 + 50.0 * a.max(b));
        let (p1, c1) = d.pdf_cdf(w1).unwrap();
        let (p2, c2) = d.pdf_cdf(w2).unwrap();
        prop_assert!(p1 >= 0.0 && p2 >= 0.0);
        prop_assert!((0.0..=1.0).contains(&c1) && (0.0..=1.0).contains(&c2));
        prop_assert!(c2 >= c1);
    }

    #[test]
    fn zie_cdf_monotone_with_atom(
        rho in 0.0f64..=1.0,
        beta in 1e-4f64..1.0,
        k in 0.0f64..5.0,
    ) {
        let d = DiscountDist::new(rho, beta).unwrap();
        let at_zero = d.pdf_cdf(0.0).unwrap();
        prop_assert!((at_zero.atom_mass - (1.0 - rho)).abs() < 1e-15);
        let pt = d.pdf_cdf(k * beta).unwrap();
        prop_assert!(pt.cdf >= at_zero.cdf - 1e-15);
        prop_assert!(pt.cdf <= 1.0 + 1e-15);
        prop_assert!(pt.density >= 0.0);
    }

    #[test]
    fn pi_inverse_round_trip(
        y in 0.0f64..=1.0,
        gamma in 0.5f64..=1.0,
    ) {
        let p = weighting_pi_inverse(y, gamma).unwrap();
        let back = weighting_pi(p, gamma).unwrap();
        prop_assert!((back - y).abs() < 1e-10, "y={y} gamma={gamma} p={p} back={back}");
    }

    #[test]
    fn fixed_point_in_lower_half(gamma in 0.05f64..0.999) {
        let p = pi_fixed_point(gamma).unwrap();
        prop_assert!(p > 0.0 && p < 0.5);
        let resid = (weighting_pi(p, gamma).unwrap() - p).abs();
        prop_assert!(resid < 1e-10);
    }
}

#[test]
fn pdfs_integrate_to_one_with_atom() {
    let cfg = QuadConfig::with_rel_tol(1e-11);
    for &(alpha, w_m) in &[(1.3, 80.0), (2.0, 100.0), (3.7, 12.0)] {
        let d = WealthDist::new(alpha, w_m).unwrap();
        let mass = quad::integrate_power_tail(|w| d.pdf(w), w_m, &cfg).value;
        assert!((mass - 1.0).abs() < 1e-9, "alpha={alpha}: {mass}");
    }
    for &(rho, beta) in &[(0.0, 0.01), (0.66, 0.00431), (1.0, 0.5)] {
        let d = DiscountDist::new(rho, beta).unwrap();
        let atom = d.pdf_cdf(0.0).unwrap().atom_mass;
        let cont =
            quad::integrate_exp_tail(|k| d.pdf_cdf(k).unwrap().density, 0.0, beta, &cfg).value;
        assert!(
            (atom + cont - 1.0).abs() < 1e-9,
            "rho={rho}: {}",
            atom + cont
        );
    }
}

#[test]
fn pi_strictly_increasing_on_grid_for_reported_range() {
    for &gamma in &[0.5, 0.55, 0.61, 0.75, 0.9, 0.99] {
        let mut prev = -1.0;
        for i in 0..=10_000 {
            let p = i as f64 / 10_000.0;
            let v = weighting_pi(p, gamma).unwrap();
            assert!(v > prev, "gamma={gamma} p={p}");
            prev = v;
        }
    }
}

/// Kolmogorov-Smirnov distance between sampler output and the analytic
/// distribution stays below 0.01 at 1e5 draws.
#[test]
fn sampler_ks_distances() {
    let n = 100_000usize;

    let wealth = WealthDist::new(2.0, 100.0).unwrap();
    let mut ws = wealth.sample(n, 2024);
    ws.sort_by(f64::total_cmp);
    let mut ks = 0.0f64;
    for (i, w) in ws.iter().enumerate() {
        let model = wealth.pdf_cdf(*w).unwrap().1;
        let emp_hi = (i + 1) as f64 / n as f64;
        let emp_lo = i as f64 / n as f64;
        ks = ks.max((model - emp_hi).abs()).max((model - emp_lo).abs());
    }
    assert!(ks < 0.01, "wealth KS {ks}");

    let disc = DiscountDist::new(0.66, 0.00431).unwrap();
    let mut kss = disc.sample(n, 555);
    kss.sort_by(f64::total_cmp);
    // the atom at k = 0 is a genuine CDF jump: compare the empirical step
    // against the left limit below it and the full cdf above it
    let mut ks = 0.0f64;
    let mut i = 0usize;
    while i < n {
        let k = kss[i];
        let mut j = i;
        while j < n && kss[j] == k {
            j += 1;
        }
        let pt = disc.pdf_cdf(k).unwrap();
        let left_limit = pt.cdf - pt.atom_mass;
        let emp_before = i as f64 / n as f64;
        let emp_after = j as f64 / n as f64;
        ks = ks.max((left_limit - emp_before).abs());
        ks = ks.max((pt.cdf - emp_after).abs());
        i = j;
    }
    assert!(ks < 0.01, "discount KS {ks}");

    // truncated-normal weighting factor: compare against the renormalized
    // normal CDF on the truncation window
    let gam = GammaDist::new(0.61, 0.07).unwrap();
    let mut gs = gam.sample(n, 99);
    gs.sort_by(f64::total_cmp);
    let phi = |x: f64| 0.5 * (1.0 + libm::erf((x - 0.61) / (0.07 * std::f64::consts::SQRT_2)));
    let (lo, hi) = deterrence_core::dist::GAMMA_TRUNCATION;
    let z = phi(hi) - phi(lo);
    let mut ks = 0.0f64;
    for (i, g) in gs.iter().enumerate() {
        let model = (phi(*g) - phi(lo)) / z;
        let emp = (i + 1) as f64 / n as f64;
        ks = ks.max((model - emp).abs());
    }
    assert!(ks < 0.01, "gamma KS {ks}");
}
