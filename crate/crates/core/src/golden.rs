//! Golden-section minimization on a bracketed interval.

use crate::fmath::sqrt;

/// Minimizes `f` on `[a, b]` to interval width `xtol`.
///
/// Returns `(x_min, f_min)`. The function must be unimodal on the bracket
/// for a guaranteed global result; otherwise a local minimum is found.
pub fn minimize<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, xtol: f64) -> (f64, f64) {
    let inv_phi = (sqrt(5.0) - 1.0) / 2.0;
    let (mut lo, mut hi) = if a < b { (a, b) } else { (b, a) };
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > xtol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
        if !(hi - lo).is_finite() {
            break;
        }
    }
    let xm = 0.5 * (lo + hi);
    (xm, f(xm))
}

/// Maximizes `f` on `[a, b]`; thin wrapper over [`minimize`].
pub fn maximize<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, xtol: f64) -> (f64, f64) {
    let (x, fneg) = minimize(|x| -f(x), a, b, xtol);
    (x, -fneg)
}

/// Scans `n` midpoints of `[lo, hi]`, then golden-refines around the best
/// scan cell. Robust when unimodality is not guaranteed.
pub fn scan_then_minimize<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    n: usize,
    xtol: f64,
) -> (f64, f64) {
    debug_assert!(n >= 2);
    let step = (hi - lo) / n as f64;
    let mut best_i = 0usize;
    let mut best_v = f64::INFINITY;
    for i in 0..n {
        let x = lo + (i as f64 + 0.5) * step;
        let v = f(x);
        if v < best_v {
            best_v = v;
            best_i = i;
        }
    }
    let a = lo + (best_i as f64 - 0.5).max(0.0) * step;
    let b = (lo + (best_i as f64 + 1.5) * step).min(hi);
    minimize(f, a, b, xtol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_minimum() {
        let (x, v) = minimize(|x| (x - 1.25) * (x - 1.25) + 3.0, -10.0, 10.0, 1e-10);
        // beyond ~sqrt(eps) the quadratic is flat at f64 precision
        assert!((x - 1.25).abs() < 1e-6);
        assert!((v - 3.0).abs() < 1e-12);
    }

    #[test]
    fn reciprocal_plus_linear() {
        // a/t + b*t has its minimum at sqrt(a/b) with value 2*sqrt(a*b)
        let (a, b) = (4.0, 9.0);
        let (x, v) = minimize(|t| a / t + b * t, 1e-6, 1e3, 1e-12);
        assert!((x - (a / b).sqrt()).abs() < 1e-6);
        assert!((v - 2.0 * (a * b).sqrt()).abs() < 1e-9);
    }

    #[test]
    fn scan_handles_multimodal() {
        let f = |x: f64| (x * 3.0).sin() + 0.1 * (x - 2.0) * (x - 2.0);
        let (x, _) = scan_then_minimize(f, -4.0, 8.0, 200, 1e-10);
        // global minimum near x where derivative vanishes; brute check
        let mut best = (0.0, f64::INFINITY);
        for i in 0..400_000 {
            let xx = -4.0 + 12.0 * (i as f64) / 400_000.0;
            let v = f(xx);
            if v < best.1 {
                best = (xx, v);
            }
        }
        assert!((x - best.0).abs() < 1e-3);
    }
}
