//! `phase-sweep`: per-cell decay condition and finite-`kappa0` argmax
//! across a harshness/fine grid, exhibiting the regime jump along the
//! analytic thresholds.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use deterrence_core::behavior::StrategyTargets;
use deterrence_core::dist::weighting_pi;
use deterrence_core::welfare::{optimal_t_tau, phase_condition, thresholds, welfare_closed_form};

use crate::config::RunConfig;
use crate::report::{self, Envelope};
use crate::CliError;

#[derive(Clone, Debug, Serialize)]
pub struct SweepCell {
    pub r: f64,
    pub f: f64,
    /// Ratio `w_m/w0` implied by the fine; above 1 the cell is degenerate.
    pub v: f64,
    pub degenerate: bool,
    pub decay_condition: bool,
    pub kappa0_argmax: f64,
    /// Argmax sits at the top of the `kappa0` grid: the severe regime.
    pub severe: bool,
}

#[derive(Serialize)]
struct Meta {
    r_threshold: f64,
    grid_r: usize,
    grid_f: usize,
    kappa0_min: f64,
    kappa0_max: f64,
    kappa0_points: usize,
    p: f64,
    cells: usize,
}

pub fn run(config: &RunConfig, out: &Path, threads: usize) -> Result<(), CliError> {
    let section = config
        .phase_sweep
        .as_ref()
        .ok_or_else(|| CliError::Validation("config needs a `phase_sweep` section".into()))?;
    if section.grid_r < 2 || section.grid_f < 2 {
        return Err(CliError::Validation(
            "phase sweep grid must be at least 2x2".into(),
        ));
    }
    if section.kappa0_points < 2 || !(section.kappa0_min > 0.0) {
        return Err(CliError::Validation(
            "kappa0 grid must have >= 2 positive points".into(),
        ));
    }
    let pop = config.population()?;
    let crime = config.crime()?;
    let costs = config.costs()?;
    let cells = sweep(config, &pop, &crime, &costs, threads)?;

    let mut csv = String::from("r,f,v,degenerate,decay_condition,kappa0_argmax,severe\n");
    for c in &cells {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            c.r, c.f, c.v, c.degenerate, c.decay_condition, c.kappa0_argmax, c.severe
        ));
    }
    let mut file = std::fs::File::create(out.join("phase_sweep.csv"))?;
    file.write_all(csv.as_bytes())?;

    let (r_thr, _) = thresholds(&pop, &crime, 1.0);
    report::write_json(
        &out.join("phase_sweep.json"),
        &Envelope::new(
            "phase-sweep",
            None,
            config,
            Meta {
                r_threshold: r_thr,
                grid_r: section.grid_r,
                grid_f: section.grid_f,
                kappa0_min: section.kappa0_min,
                kappa0_max: section.kappa0_max,
                kappa0_points: section.kappa0_points,
                p: section.p,
                cells: cells.len(),
            },
        ),
    )?;
    Ok(())
}

/// Evaluates every `(r, f)` cell; rows fan out across `threads` workers
/// and results are stitched back in index order, so the output does not
/// depend on the thread count.
pub fn sweep(
    config: &RunConfig,
    pop: &deterrence_core::dist::PopulationModel,
    crime: &deterrence_core::behavior::CrimeParams,
    costs: &deterrence_core::welfare::CostParams,
    threads: usize,
) -> Result<Vec<SweepCell>, CliError> {
    let section = config.phase_sweep.as_ref().unwrap();
    let gamma = pop.gamma.mu();
    let p = section.p;
    let pi = weighting_pi(p, gamma).map_err(|e| CliError::Validation(e.to_string()))?;
    if crime.b - pi * crime.s <= 0.0 {
        return Err(CliError::Validation(
            "sweep probability makes stigma alone deter everyone".into(),
        ));
    }

    let r_grid: Vec<f64> = grid(section.r_min, section.r_max, section.grid_r);
    let f_grid: Vec<f64> = grid(section.f_min, section.f_max, section.grid_f);
    let kappa_grid: Vec<f64> = grid(
        section.kappa0_min,
        section.kappa0_max,
        section.kappa0_points,
    );

    let pairs: Vec<(f64, f64)> = r_grid
        .iter()
        .flat_map(|&r| f_grid.iter().map(move |&f| (r, f)))
        .collect();

    let eval_cell = |&(r, f): &(f64, f64)| -> SweepCell {
        let w0 = pi * f / (crime.b - pi * crime.s);
        let v = pop.wealth.w_m() / w0;
        if v > 1.0 {
            // fine too small to deter even the poorest member
            return SweepCell {
                r,
                f,
                v,
                degenerate: true,
                decay_condition: false,
                kappa0_argmax: f64::NAN,
                severe: false,
            };
        }
        let decay = phase_condition(v, p, pop, crime, r, gamma).unwrap_or(false);
        let mut best = (f64::NEG_INFINITY, kappa_grid[0]);
        let mut best_idx = 0usize;
        for (i, &kappa0) in kappa_grid.iter().enumerate() {
            let total = match optimal_t_tau(kappa0, pop, crime, costs, p, v, r, gamma) {
                Ok(sched) if sched.tau_star.is_finite() => {
                    let targets = StrategyTargets {
                        p,
                        w0,
                        k0: kappa0 * pop.discount.beta(),
                        t: sched.t_star,
                        r,
                    };
                    welfare_closed_form(&targets, pop, crime, costs, sched.t_star, sched.tau_star)
                        .map(|b| b.total)
                        .unwrap_or(f64::NEG_INFINITY)
                }
                _ => f64::NEG_INFINITY,
            };
            if total > best.0 {
                best = (total, kappa0);
                best_idx = i;
            }
        }
        SweepCell {
            r,
            f,
            v,
            degenerate: false,
            decay_condition: decay,
            kappa0_argmax: best.1,
            severe: best_idx == kappa_grid.len() - 1,
        }
    };

    let workers = threads.max(1).min(pairs.len().max(1));
    let mut cells: Vec<Option<SweepCell>> = vec![None; pairs.len()];
    if workers <= 1 {
        for (slot, pair) in cells.iter_mut().zip(&pairs) {
            *slot = Some(eval_cell(pair));
        }
    } else {
        let chunk = pairs.len().div_ceil(workers);
        std::thread::scope(|scope| {
            for (pair_chunk, cell_chunk) in pairs.chunks(chunk).zip(cells.chunks_mut(chunk)) {
                scope.spawn(move || {
                    for (slot, pair) in cell_chunk.iter_mut().zip(pair_chunk) {
                        *slot = Some(eval_cell(pair));
                    }
                });
            }
        });
    }
    Ok(cells.into_iter().map(Option::unwrap).collect())
}

fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}
