//! End-to-end runs of the `deterrence` binary: exit codes, determinism,
//! seed handling, and the survey pipeline against a synthetic census.

use std::path::{Path, PathBuf};
use std::process::Command;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use deterrence_core::dist::{standard_normal, weighting_pi};
use deterrence_core::estimate::{SURVEY_PS, SURVEY_TAU0, SURVEY_TAUS};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_deterrence"))
}

fn write_config(dir: &Path) -> PathBuf {
    let path = dir.join("config.json");
    std::fs::write(
        &path,
        r#"{
  "schema_version": 1,
  "population": {"alpha": 2.0, "w_m": 100.0, "rho": 0.66, "beta": 0.00431, "mu_gamma": 0.61, "sigma_gamma": 0.07, "epsilon": 0.1},
  "crime": {"b": 1.0, "s": 0.3, "l": 900.0, "g": 2.0, "lambda": 0.001},
  "costs": {"c_p": 40.0, "c_f": 25.0, "c_0": 12.0, "c_t": 6.0, "c_tau": 2.0, "m_options": 2.0},
  "strategy": {"p": 0.6, "f": 300.0, "t": 24.0, "tau": 2000.0, "r": 0.05},
  "sim": {"n_agents": 5000, "delta_t": 50.0, "lambda_rate": 1.2e-5, "seed": 7, "gamma_mode": "shared-mean"},
  "phase_sweep": {"r_min": 0.001, "r_max": 0.004, "f_min": 60.0, "f_max": 160.0, "grid_r": 4, "grid_f": 4, "kappa0_min": 0.5, "kappa0_max": 10.0, "kappa0_points": 6, "p": 1.0}
}"#,
    )
    .unwrap();
    path
}

#[test]
fn eval_welfare_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path());
    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    for out in [&out_a, &out_b] {
        let status = bin()
            .args([
                "--config",
                config.to_str().unwrap(),
                "--out",
                out.to_str().unwrap(),
                "eval-welfare",
            ])
            .status()
            .unwrap();
        assert!(status.success());
    }
    let a = std::fs::read(out_a.join("eval_welfare.json")).unwrap();
    let b = std::fs::read(out_b.join("eval_welfare.json")).unwrap();
    assert_eq!(a, b, "outputs must be byte-identical");
    let parsed: serde_json::Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(parsed["schema_version"], 1);
    assert_eq!(parsed["status"], "ok");
    // tier deviations are reported even when large
    assert!(parsed["deviations"]["asymptotic_vs_closed"]["j2"].is_number());
}

#[test]
fn unknown_config_keys_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.json");
    std::fs::write(
        &config,
        r#"{"schema_version": 1, "population": {"alpha": 2.0, "w_m": 100.0, "rho": 0.5, "beta": 0.004, "mu_gamma": 0.6, "sigma_gamma": 0.05, "epsilon": 0.0, "typo_key": 1}, "crime": {"b": 1, "s": 0.3, "l": 900, "g": 2, "lambda": 0}, "costs": {"c_p": 1, "c_f": 1, "c_0": 1, "c_t": 1, "c_tau": 1}}"#,
    )
    .unwrap();
    let status = bin()
        .args([
            "--config",
            config.to_str().unwrap(),
            "--out",
            dir.path().to_str().unwrap(),
            "eval-welfare",
        ])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn degenerate_strategy_reported_and_strict_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("degenerate.json");
    // fine far too small: targeted wealth falls below the minimum
    std::fs::write(
        &config,
        r#"{
  "schema_version": 1,
  "population": {"alpha": 2.0, "w_m": 100.0, "rho": 0.66, "beta": 0.00431, "mu_gamma": 0.61, "sigma_gamma": 0.07, "epsilon": 0.0},
  "crime": {"b": 1.0, "s": 0.3, "l": 900.0, "g": 2.0, "lambda": 0.0},
  "costs": {"c_p": 40.0, "c_f": 25.0, "c_0": 12.0, "c_t": 6.0, "c_tau": 2.0},
  "strategy": {"p": 0.6, "f": 10.0, "t": 24.0, "tau": 2000.0, "r": 0.05}
}"#,
    )
    .unwrap();
    let status = bin()
        .args([
            "--config",
            config.to_str().unwrap(),
            "--out",
            dir.path().to_str().unwrap(),
            "eval-welfare",
        ])
        .status()
        .unwrap();
    assert!(status.success(), "default mode reports, not errors");
    let parsed: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("eval_welfare.json")).unwrap())
            .unwrap();
    assert_eq!(parsed["status"], "degenerate-strategy");

    let status = bin()
        .args([
            "--config",
            config.to_str().unwrap(),
            "--out",
            dir.path().to_str().unwrap(),
            "--strict",
            "eval-welfare",
        ])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(3));
}

#[test]
fn simulate_echoes_seed_and_flag() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path());
    let status = bin()
        .args([
            "--config",
            config.to_str().unwrap(),
            "--out",
            dir.path().to_str().unwrap(),
            "--seed",
            "12345",
            "simulate",
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let parsed: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("simulate.json")).unwrap()).unwrap();
    assert_eq!(parsed["seed"], 12345);
    assert!(parsed["agrees_within_3se"].is_boolean());
    let total = parsed["non_offenders"].as_u64().unwrap()
        + parsed["fine_choosers"].as_u64().unwrap()
        + parsed["prison_choosers"].as_u64().unwrap();
    assert_eq!(total, 5000);
}

#[test]
fn burglary_mode_emits_partition_fractions() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("burglary.json");
    std::fs::write(
        &config,
        r#"{
  "schema_version": 1,
  "population": {"alpha": 2.0, "w_m": 100.0, "rho": 0.66, "beta": 0.00431, "mu_gamma": 0.61, "sigma_gamma": 0.07, "epsilon": 0.0},
  "crime": {"b": 1.0, "s": 0.3, "l": 900.0, "g": 2.0, "lambda": 0.0},
  "costs": {"c_p": 40.0, "c_f": 25.0, "c_0": 12.0, "c_t": 6.0, "c_tau": 2.0},
  "strategy": {"p": 1.0, "f": 400.0, "t": 24.0, "tau": 240.0, "r": 0.0505},
  "sim": {"n_agents": 50000, "delta_t": 50.0, "lambda_rate": 1.2e-6, "seed": 3, "gamma_mode": "shared-mean", "burglary_gain": 250.0}
}"#,
    )
    .unwrap();
    let status = bin()
        .args([
            "--config",
            config.to_str().unwrap(),
            "--out",
            dir.path().to_str().unwrap(),
            "simulate",
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let parsed: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("simulate.json")).unwrap()).unwrap();
    let fractions = &parsed["analytic_fractions"];
    let n = 50_000.0;
    for (label, count_key) in [
        ("non_offenders", "non_offenders"),
        ("fine_choosers", "fine_choosers"),
        ("prison_choosers", "prison_choosers"),
    ] {
        let frac = fractions[label].as_f64().unwrap();
        let observed = parsed[count_key].as_u64().unwrap() as f64 / n;
        let se = (frac * (1.0 - frac) / n).sqrt().max(1e-9);
        assert!(
            (observed - frac).abs() <= 3.5 * se,
            "{label}: observed {observed} vs analytic {frac} (se {se})"
        );
    }
}

#[test]
fn phase_sweep_writes_grid() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path());
    let status = bin()
        .args([
            "--config",
            config.to_str().unwrap(),
            "--out",
            dir.path().to_str().unwrap(),
            "--threads",
            "2",
            "phase-sweep",
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let csv = std::fs::read_to_string(dir.path().join("phase_sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 16);
    assert!(csv.starts_with("r,f,v,degenerate,decay_condition,kappa0_argmax,severe"));
    // thread count must not change the output
    let out2 = dir.path().join("single");
    bin()
        .args([
            "--config",
            config.to_str().unwrap(),
            "--out",
            out2.to_str().unwrap(),
            "--threads",
            "1",
            "phase-sweep",
        ])
        .status()
        .unwrap();
    let csv1 = std::fs::read_to_string(out2.join("phase_sweep.csv")).unwrap();
    assert_eq!(csv, csv1);
}

#[test]
fn optimize_reports_solution_consistent_with_eval() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path());
    let status = bin()
        .args([
            "--config",
            config.to_str().unwrap(),
            "--out",
            dir.path().to_str().unwrap(),
            "optimize",
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let parsed: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("optimize.json")).unwrap()).unwrap();
    assert_eq!(parsed["status"], "ok");
    let sol = &parsed["solution"];
    // the reported objective matches a direct evaluation at the solution
    let cfg: deterrence_cli::config::RunConfig =
        serde_json::from_value(parsed["config"].clone()).unwrap();
    let population = cfg.population().unwrap();
    let crime = cfg.crime().unwrap();
    let costs = cfg.costs().unwrap();
    let direct = deterrence_core::optimizer::reduced_objective(
        sol["v_star"].as_f64().unwrap(),
        sol["p_star"].as_f64().unwrap(),
        &population,
        &crime,
        &costs,
    );
    let reported = sol["objective"].as_f64().unwrap();
    assert!(((direct - reported) / reported).abs() < 1e-12);
}

#[test]
fn phase_failure_exits_3_only_when_strict() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("weak.json");
    std::fs::write(
        &config,
        r#"{
  "schema_version": 1,
  "population": {"alpha": 2.0, "w_m": 100.0, "rho": 0.66, "beta": 0.00431, "mu_gamma": 0.61, "sigma_gamma": 0.07, "epsilon": 0.0},
  "crime": {"b": 1.0, "s": 0.3, "l": 900.0, "g": 2.0, "lambda": 0.0},
  "costs": {"c_p": 40.0, "c_f": 25.0, "c_0": 12.0, "c_t": 6.0, "c_tau": 2.0},
  "strategy": {"p": 0.6, "f": 300.0, "t": 24.0, "tau": 2000.0, "r": 0.0000001}
}"#,
    )
    .unwrap();
    let status = bin()
        .args([
            "--config",
            config.to_str().unwrap(),
            "--out",
            dir.path().to_str().unwrap(),
            "optimize",
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let parsed: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("optimize.json")).unwrap()).unwrap();
    assert_eq!(parsed["status"], "phase-failure");
    assert!(parsed["r_threshold"].as_f64().unwrap() > 0.0);
    let status = bin()
        .args([
            "--config",
            config.to_str().unwrap(),
            "--out",
            dir.path().to_str().unwrap(),
            "--strict",
            "optimize",
        ])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(3));
}

/// Synthetic survey at field scale: the pipeline recovers its own
/// generating parameters within three standard errors, deterministically.
#[test]
fn fit_survey_recovers_synthetic_truth() {
    let (rho, beta, sigma) = (0.66, 0.00431, 0.2);
    let (mu_g, sd_g, sd_sum, noise_b) = (0.61, 0.07, 568.0, 4.0);
    let n = 200usize;
    let mut rng = ChaCha12Rng::seed_from_u64(424242);
    let mut csv = String::from(
        "id,salary,t_2.5,t_4,t_10,t_20,B_0.05,B_0.1,B_0.25,B_0.5,B_0.75,B_0.9,B_0.95,B_0.98,B_1,detention_hours\n",
    );
    for i in 0..n {
        let salary = 2000.0 + 8000.0 * rng.gen::<f64>();
        let k_i = if rng.gen::<f64>() < 1.0 - rho {
            0.0
        } else {
            -beta * (1.0 - rng.gen::<f64>()).ln()
        };
        let mut cells: Vec<String> = vec![format!("r{i}"), format!("{salary}")];
        if k_i == 0.0 {
            cells.extend(std::iter::repeat_n("inf".to_string(), 4));
        } else {
            for tau in SURVEY_TAUS {
                let eps = loop {
                    let e = sigma * standard_normal(&mut rng);
                    if e > -0.9 {
                        break e;
                    }
                };
                cells.push(format!(
                    "{}",
                    (tau / SURVEY_TAU0 - 1.0) / (k_i * (1.0 + eps))
                ));
            }
        }
        let gamma_i = loop {
            let g: f64 = mu_g + sd_g * standard_normal(&mut rng);
            if g > 0.01 && g < 0.99 {
                break g;
            }
        };
        for p in SURVEY_PS {
            let b =
                weighting_pi(p, gamma_i).unwrap() * sd_sum + noise_b * standard_normal(&mut rng);
            cells.push(format!("{}", b.max(0.0)));
        }
        cells.push(format!("{}", 1.0 + 3.0 * rng.gen::<f64>()));
        csv.push_str(&cells.join(","));
        csv.push('\n');
    }

    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("survey.csv");
    std::fs::write(&input, &csv).unwrap();
    let run = |out: &Path| {
        let status = bin()
            .args([
                "--out",
                out.to_str().unwrap(),
                "fit-survey",
                "--input",
                input.to_str().unwrap(),
            ])
            .status()
            .unwrap();
        assert!(status.success());
        std::fs::read(out.join("fit_survey.json")).unwrap()
    };
    let bytes = run(&dir.path().join("one"));
    let again = run(&dir.path().join("two"));
    assert_eq!(bytes, again, "identical input must give identical bytes");

    let parsed: serde_json::Value = serde_json::from_slice(&bytes).unwrap();
    let close = |section: &str, name: &str, truth: f64| {
        let est = &parsed[section][name];
        let (v, se) = (est["value"].as_f64().unwrap(), est["se"].as_f64().unwrap());
        assert!(
            (v - truth).abs() <= 3.0 * se,
            "{name}: {v} +- {se} vs truth {truth}"
        );
    };
    close("k_distribution", "rho", rho);
    close("k_distribution", "beta", beta);
    close("gamma", "mu_gamma", mu_g);
    close("gamma", "sigma_gamma", sd_g);

    // independence z-table present with all pairings
    let rows = parsed["independence"]["rows"].as_array().unwrap();
    assert!(rows.len() >= 6, "{} independence rows", rows.len());
    for row in rows {
        assert!(
            row["z"].as_f64().unwrap() < 4.0,
            "independent synthetic data: {row}"
        );
    }

    // histogram tables exist and count every respondent
    let khist = std::fs::read_to_string(dir.path().join("one").join("k_histogram.csv")).unwrap();
    let counted: usize = khist
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(2).unwrap().parse::<usize>().unwrap())
        .sum();
    assert_eq!(counted, n);

    // sections degrade gracefully when optional columns are empty
    let mut sparse = String::from(
        "id,salary,t_2.5,t_4,t_10,t_20,B_0.05,B_0.1,B_0.25,B_0.5,B_0.75,B_0.9,B_0.95,B_0.98,B_1,detention_hours\n",
    );
    sparse.push_str("a,5000,50,200,800,1800,,,,,,,,,,\n");
    sparse.push_str("b,3000,40,170,650,1500,,,,,,,,,,\n");
    let sparse_path = dir.path().join("sparse.csv");
    std::fs::write(&sparse_path, sparse).unwrap();
    let out = dir.path().join("sparse");
    let status = bin()
        .args([
            "--out",
            out.to_str().unwrap(),
            "fit-survey",
            "--input",
            sparse_path.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let parsed: serde_json::Value =
        serde_json::from_slice(&std::fs::read(out.join("fit_survey.json")).unwrap()).unwrap();
    assert_eq!(parsed["gamma"]["status"], "insufficient-data");

    // malformed rows exit 2 with a row-level report
    let mut bad = csv.clone();
    bad.push_str("zz,1000,inf,5,inf,inf,,,,,,,,,,\n");
    let bad_path = dir.path().join("bad.csv");
    std::fs::write(&bad_path, bad).unwrap();
    let out = dir.path().join("bad");
    let status = bin()
        .args([
            "--out",
            out.to_str().unwrap(),
            "fit-survey",
            "--input",
            bad_path.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
    let report: serde_json::Value =
        serde_json::from_slice(&std::fs::read(out.join("fit_survey_errors.json")).unwrap())
            .unwrap();
    assert_eq!(report.as_array().unwrap().len(), 1);
    assert_eq!(report[0]["row"], n + 1);
}
