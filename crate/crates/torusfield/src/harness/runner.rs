//! Experiment drivers.
//!
//! Each driver turns a validated [`ExperimentConfig`] into a list of
//! [`ExperimentRecord`]s. Monte Carlo trials fan out across worker threads;
//! per-trial seeds are derived as seed(seed(master, E), trial), so results
//! are identical for any thread count, and aggregation always runs over the
//! trial-index-ordered results. Energies an experiment cannot use are never
//! silently skipped: each produces a rejection record naming its residue
//! mod 8.
//!
//! The timestamp is injected by the caller (a fixed label in tests, wall
//! clock in the CLI), so that identical (config, seed) runs produce
//! bit-identical records.

use std::collections::BTreeMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::curve::{Curve, CurveError};
use crate::harness::config::{ExperimentConfig, ExperimentKind};
use crate::harness::record::ExperimentRecord;
use crate::kacrice::{self, KacRiceError};
use crate::lattice::{is_admissible, is_sum_of_three_squares, LatticeError, LatticeShell};
use crate::oscillatory::{self, OscillatoryError};
use crate::wave::{derive_seed, sample_wave, WaveError};
use crate::zeros::{count_zeros, ZeroCount};

/// Frequency grid used by the oscillatory experiment.
pub const DEFAULT_LAMBDA_GRID: [f64; 4] = [1e2, 1e3, 1e4, 1e5];
/// Direction samples used by the oscillatory experiment.
pub const DEFAULT_XI_SAMPLES: usize = 64;
/// Riesz exponents evaluated per shell.
pub const DEFAULT_RIESZ_EXPONENTS: [f64; 3] = [0.5, 2.0 / 3.0, 1.0];
/// Bootstrap resamples behind variance confidence intervals.
pub const BOOTSTRAP_RESAMPLES: usize = 1000;
/// Two-sided bootstrap confidence level.
pub const BOOTSTRAP_CONFIDENCE: f64 = 0.95;
/// Minimum trials for a variance experiment.
pub const MIN_VARIANCE_TRIALS: u64 = 500;

/// Errors from experiment execution.
#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Wave(#[from] WaveError),
    #[error(transparent)]
    KacRice(#[from] KacRiceError),
    #[error(transparent)]
    Oscillatory(#[from] OscillatoryError),
    #[error(transparent)]
    Curve(#[from] CurveError),
    /// Zero-density experiments need somewhere-positive curvature.
    #[error("experiment needs a curve with positive minimum curvature, got {0}")]
    FlatCurve(f64),
    /// Variance estimation needs enough trials for a stable bootstrap.
    #[error("variance experiment needs at least {need} trials, got {got}")]
    TooFewTrials { got: u64, need: u64 },
    /// Variance slopes need at least two admissible energies spanning a
    /// decade.
    #[error("variance experiment needs ≥ 2 admissible energies spanning a decade, got {admissible} spanning ratio {ratio}")]
    NarrowEnergyLadder { admissible: usize, ratio: f64 },
}

/// Runs the configured experiment and returns its records.
pub fn run(config: &ExperimentConfig, timestamp: &str) -> Result<Vec<ExperimentRecord>, HarnessError> {
    match config.experiment {
        ExperimentKind::Expectation => run_expectation(config, timestamp),
        ExperimentKind::Variance => run_variance(config, timestamp),
        ExperimentKind::R2Scaling
        | ExperimentKind::Riesz
        | ExperimentKind::Oscillatory
        | ExperimentKind::ShellCensus => run_scaling_suite(config, timestamp),
        ExperimentKind::Singular => run_singular(config, timestamp),
    }
}

fn payload(entries: &[(&str, f64)]) -> BTreeMap<String, f64> {
    entries.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

/// Rejection record for an energy the experiment cannot use. Always emitted
/// in place, never a silent skip.
fn rejection_record(
    experiment: &str,
    energy: i64,
    curve: &str,
    length: f64,
    seed: u64,
    timestamp: &str,
) -> ExperimentRecord {
    ExperimentRecord::aggregate(
        experiment,
        energy,
        0,
        curve,
        length,
        0,
        payload(&[
            ("rejected", 1.0),
            ("residue_mod_8", energy.rem_euclid(8) as f64),
            ("sum_three_squares", (is_sum_of_three_squares(energy) as u8) as f64),
        ]),
        seed,
        timestamp,
    )
}

fn ensure_curved(curve: &Curve) -> Result<(), HarnessError> {
    let k_min = curve.min_curvature(512);
    if k_min > 0.0 {
        Ok(())
    } else {
        Err(HarnessError::FlatCurve(k_min))
    }
}

/// `trials` independent zero counts of waves restricted to `curve`, in trial
/// order: (trial, count, seed).
fn zero_count_trials(
    shell: &LatticeShell,
    curve: &Curve,
    trials: u64,
    energy_seed: u64,
    points_per_wavelength: usize,
) -> Result<Vec<(u64, ZeroCount, u64)>, WaveError> {
    (0..trials)
        .into_par_iter()
        .map(|trial| {
            let seed = derive_seed(energy_seed, trial);
            let wave = sample_wave(shell, seed)?;
            let restriction = wave.restrict(curve);
            Ok((trial, count_zeros(&restriction, points_per_wavelength), seed))
        })
        .collect()
}

fn sample_variance(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n < 2 {
        return 0.0;
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n as f64 - 1.0)
}

fn percentile(sorted: &[f64], q: f64) -> f64 {
    let idx = ((sorted.len() - 1) as f64 * q).round() as usize;
    sorted[idx]
}

/// Percentile bootstrap interval for Var(x) at `BOOTSTRAP_CONFIDENCE`.
fn bootstrap_variance_ci(xs: &[f64], seed: u64) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = xs.len();
    let mut variances = Vec::with_capacity(BOOTSTRAP_RESAMPLES);
    let mut resample = vec![0.0; n];
    for _ in 0..BOOTSTRAP_RESAMPLES {
        for slot in resample.iter_mut() {
            *slot = xs[rng.random_range(0..n)];
        }
        variances.push(sample_variance(&resample));
    }
    variances.sort_unstable_by(f64::total_cmp);
    let tail = (1.0 - BOOTSTRAP_CONFIDENCE) / 2.0;
    (percentile(&variances, tail), percentile(&variances, 1.0 - tail))
}

/// Monte Carlo mean of Z/√E per energy against the prediction 2L/√3.
pub fn run_expectation(
    config: &ExperimentConfig,
    timestamp: &str,
) -> Result<Vec<ExperimentRecord>, HarnessError> {
    let curve = config.build_curve()?;
    ensure_curved(&curve)?;
    let tag = config.experiment.tag();
    let curve_tag = curve.kind().tag();
    let length = curve.length();
    let mut records = Vec::new();

    for &energy in &config.energies {
        if !is_admissible(energy) {
            records.push(rejection_record(tag, energy, curve_tag, length, config.master_seed, timestamp));
            continue;
        }
        let shell = LatticeShell::enumerate(energy)?;
        let energy_seed = derive_seed(config.master_seed, energy as u64);
        let trials = zero_count_trials(
            &shell,
            &curve,
            config.trials,
            energy_seed,
            config.points_per_wavelength,
        )?;

        let sqrt_e = (energy as f64).sqrt();
        let normalized: Vec<f64> = trials.iter().map(|(_, z, _)| z.count as f64 / sqrt_e).collect();
        let mut suspicious_total = 0.0;
        for (trial, z, seed) in &trials {
            suspicious_total += z.suspicious as f64;
            records.push(ExperimentRecord::per_trial(
                tag,
                energy,
                shell.count(),
                curve_tag,
                length,
                *trial,
                payload(&[
                    ("zero_count", z.count as f64),
                    ("suspicious", z.suspicious as f64),
                    ("normalized", z.count as f64 / sqrt_e),
                ]),
                *seed,
                timestamp,
            ));
        }

        let n = normalized.len() as f64;
        let mean = normalized.iter().sum::<f64>() / n;
        let std_error = (sample_variance(&normalized) / n).sqrt();
        let prediction = kacrice::expected_count(&curve, energy) / sqrt_e;
        records.push(ExperimentRecord::aggregate(
            tag,
            energy,
            shell.count(),
            curve_tag,
            length,
            config.trials,
            payload(&[
                ("mean_normalized", mean),
                ("std_error", std_error),
                ("prediction", prediction),
                ("abs_deviation", (mean - prediction).abs()),
                ("mean_count", mean * sqrt_e),
                ("suspicious_total", suspicious_total),
            ]),
            energy_seed,
            timestamp,
        ));
    }
    Ok(records)
}

/// Monte Carlo variance of Z/√E across an energy ladder, with bootstrap
/// confidence intervals and the deterministic second-moment proxy, plus a
/// cross-energy log-log slope record.
pub fn run_variance(
    config: &ExperimentConfig,
    timestamp: &str,
) -> Result<Vec<ExperimentRecord>, HarnessError> {
    if config.trials < MIN_VARIANCE_TRIALS {
        return Err(HarnessError::TooFewTrials {
            got: config.trials,
            need: MIN_VARIANCE_TRIALS,
        });
    }
    let admissible: Vec<i64> = config.energies.iter().copied().filter(|&e| is_admissible(e)).collect();
    let ratio = match (admissible.iter().min(), admissible.iter().max()) {
        (Some(&lo), Some(&hi)) => hi as f64 / lo as f64,
        _ => 0.0,
    };
    if admissible.len() < 2 || ratio < 10.0 {
        return Err(HarnessError::NarrowEnergyLadder {
            admissible: admissible.len(),
            ratio,
        });
    }
    let curve = config.build_curve()?;
    ensure_curved(&curve)?;
    let tag = config.experiment.tag();
    let curve_tag = curve.kind().tag();
    let length = curve.length();
    let mut records = Vec::new();
    let mut fitted: Vec<(f64, f64, f64)> = Vec::new(); // (E, Var, proxy)

    for &energy in &config.energies {
        if !is_admissible(energy) {
            records.push(rejection_record(tag, energy, curve_tag, length, config.master_seed, timestamp));
            continue;
        }
        let shell = LatticeShell::enumerate(energy)?;
        let energy_seed = derive_seed(config.master_seed, energy as u64);
        let trials = zero_count_trials(
            &shell,
            &curve,
            config.trials,
            energy_seed,
            config.points_per_wavelength,
        )?;

        let sqrt_e = (energy as f64).sqrt();
        let normalized: Vec<f64> = trials.iter().map(|(_, z, _)| z.count as f64 / sqrt_e).collect();
        let mut suspicious_total = 0.0;
        for (trial, z, seed) in &trials {
            suspicious_total += z.suspicious as f64;
            records.push(ExperimentRecord::per_trial(
                tag,
                energy,
                shell.count(),
                curve_tag,
                length,
                *trial,
                payload(&[
                    ("zero_count", z.count as f64),
                    ("suspicious", z.suspicious as f64),
                    ("normalized", z.count as f64 / sqrt_e),
                ]),
                *seed,
                timestamp,
            ));
        }

        let variance = sample_variance(&normalized);
        assert!(variance > 0.0, "degenerate variance sample at E = {energy}");
        let (ci_lo, ci_hi) = bootstrap_variance_ci(&normalized, derive_seed(energy_seed, u64::MAX));
        let proxy = kacrice::variance_upper_proxy(&shell, &curve, config.grid_per_wavelength)?;
        let mean = normalized.iter().sum::<f64>() / normalized.len() as f64;
        fitted.push((energy as f64, variance, proxy));
        records.push(ExperimentRecord::aggregate(
            tag,
            energy,
            shell.count(),
            curve_tag,
            length,
            config.trials,
            payload(&[
                ("variance", variance),
                ("var_ci_lo", ci_lo),
                ("var_ci_hi", ci_hi),
                ("mean_normalized", mean),
                ("r2_proxy", proxy),
                ("suspicious_total", suspicious_total),
            ]),
            energy_seed,
            timestamp,
        ));
    }

    let log_e: Vec<f64> = fitted.iter().map(|(e, _, _)| e.ln()).collect();
    let log_var: Vec<f64> = fitted.iter().map(|(_, v, _)| v.ln()).collect();
    let log_proxy: Vec<f64> = fitted.iter().map(|(_, _, p)| p.ln()).collect();
    records.push(ExperimentRecord::aggregate(
        tag,
        0,
        0,
        curve_tag,
        length,
        config.trials * fitted.len() as u64,
        payload(&[
            ("variance_slope", oscillatory::ols_slope(&log_e, &log_var)),
            ("proxy_slope", oscillatory::ols_slope(&log_e, &log_proxy)),
            ("energies_fit", fitted.len() as f64),
        ]),
        config.master_seed,
        timestamp,
    ));
    Ok(records)
}

/// Deterministic scaling experiments: R₂(E) ladders, Riesz energies against
/// the uniform-sphere limit I(s) = 2^(1−s)/(2−s), oscillatory decay fits,
/// and the shell census.
pub fn run_scaling_suite(
    config: &ExperimentConfig,
    timestamp: &str,
) -> Result<Vec<ExperimentRecord>, HarnessError> {
    match config.experiment {
        ExperimentKind::R2Scaling => run_r2_scaling(config, timestamp),
        ExperimentKind::Riesz => run_riesz(config, timestamp),
        ExperimentKind::Oscillatory => run_oscillatory(config, timestamp),
        ExperimentKind::ShellCensus => run_shell_census(config, timestamp),
        _ => unreachable!("not a scaling-suite experiment"),
    }
}

fn run_r2_scaling(config: &ExperimentConfig, timestamp: &str) -> Result<Vec<ExperimentRecord>, HarnessError> {
    let curve = config.build_curve()?;
    let tag = config.experiment.tag();
    let curve_tag = curve.kind().tag();
    let length = curve.length();
    let mut records = Vec::new();
    let mut fitted: Vec<(f64, f64, f64)> = Vec::new();

    for &energy in &config.energies {
        if !is_sum_of_three_squares(energy) {
            records.push(rejection_record(tag, energy, curve_tag, length, config.master_seed, timestamp));
            continue;
        }
        let shell = LatticeShell::enumerate(energy)?;
        let r2 = kacrice::r2_moment(&shell, &curve, config.grid_per_wavelength)?;
        let r_squared = kacrice::r_squared_moment(&shell, &curve, config.grid_per_wavelength)?;
        fitted.push((energy as f64, r2, r_squared));
        records.push(ExperimentRecord::aggregate(
            tag,
            energy,
            shell.count(),
            curve_tag,
            length,
            0,
            payload(&[("r2", r2), ("r_squared", r_squared)]),
            config.master_seed,
            timestamp,
        ));
    }

    if fitted.len() >= 2 {
        let log_e: Vec<f64> = fitted.iter().map(|(e, _, _)| e.ln()).collect();
        let log_r2: Vec<f64> = fitted.iter().map(|(_, r, _)| r.ln()).collect();
        let log_rsq: Vec<f64> = fitted.iter().map(|(_, _, r)| r.ln()).collect();
        records.push(ExperimentRecord::aggregate(
            tag,
            0,
            0,
            curve_tag,
            length,
            0,
            payload(&[
                ("r2_slope", oscillatory::ols_slope(&log_e, &log_r2)),
                ("r_squared_slope", oscillatory::ols_slope(&log_e, &log_rsq)),
                ("energies_fit", fitted.len() as f64),
            ]),
            config.master_seed,
            timestamp,
        ));
    }
    Ok(records)
}

fn run_riesz(config: &ExperimentConfig, timestamp: &str) -> Result<Vec<ExperimentRecord>, HarnessError> {
    let tag = config.experiment.tag();
    let mut records = Vec::new();
    for &energy in &config.energies {
        if !is_sum_of_three_squares(energy) {
            records.push(rejection_record(tag, energy, "none", 0.0, config.master_seed, timestamp));
            continue;
        }
        let shell = LatticeShell::enumerate(energy)?;
        for s in DEFAULT_RIESZ_EXPONENTS {
            let report = shell.riesz_energy(s)?;
            let limit = 2f64.powf(1.0 - s) / (2.0 - s);
            records.push(ExperimentRecord::aggregate(
                tag,
                energy,
                shell.count(),
                "none",
                0.0,
                0,
                payload(&[
                    ("s", s),
                    ("riesz_raw", report.value),
                    ("riesz_normalized", report.normalized),
                    ("dyadic_bound", report.dyadic_bound),
                    ("uniform_limit", limit),
                    ("rel_deviation", (report.normalized - limit).abs() / limit),
                ]),
                config.master_seed,
                timestamp,
            ));
        }
    }
    Ok(records)
}

fn run_oscillatory(config: &ExperimentConfig, timestamp: &str) -> Result<Vec<ExperimentRecord>, HarnessError> {
    let curve = config.build_curve()?;
    let fit = oscillatory::decay_fit(&curve, &DEFAULT_LAMBDA_GRID, DEFAULT_XI_SAMPLES, config.master_seed)?;
    let mut entries = vec![
        ("exponent".to_string(), fit.exponent),
        ("directions".to_string(), fit.directions as f64),
    ];
    for (idx, (lambda, max_abs)) in fit.lambdas.iter().zip(&fit.max_abs).enumerate() {
        entries.push((format!("lambda_{idx}"), *lambda));
        entries.push((format!("max_abs_{idx}"), *max_abs));
    }
    Ok(vec![ExperimentRecord::aggregate(
        config.experiment.tag(),
        0,
        0,
        curve.kind().tag(),
        curve.length(),
        0,
        entries.into_iter().collect(),
        fit.seed,
        timestamp,
    )])
}

fn run_shell_census(config: &ExperimentConfig, timestamp: &str) -> Result<Vec<ExperimentRecord>, HarnessError> {
    let tag = config.experiment.tag();
    // A single listed energy M means the range 1..=M; several mean themselves.
    let energies: Vec<i64> = match config.energies.as_slice() {
        [max] => (1..=*max).collect(),
        list => list.to_vec(),
    };
    let mut records = Vec::with_capacity(energies.len() + 1);
    let mut admissible_count = 0u64;
    let mut admissible_with_empty_shell = 0u64;
    for &energy in &energies {
        let shell = LatticeShell::enumerate(energy)?;
        let admissible = is_admissible(energy);
        if admissible {
            admissible_count += 1;
            if shell.is_empty() {
                admissible_with_empty_shell += 1;
            }
        }
        records.push(ExperimentRecord::aggregate(
            tag,
            energy,
            shell.count(),
            "none",
            0.0,
            0,
            payload(&[
                ("shell_count", shell.count() as f64),
                ("admissible", (admissible as u8) as f64),
                ("sum_three_squares", (is_sum_of_three_squares(energy) as u8) as f64),
                ("residue_mod_8", energy.rem_euclid(8) as f64),
            ]),
            config.master_seed,
            timestamp,
        ));
    }
    records.push(ExperimentRecord::aggregate(
        tag,
        0,
        0,
        "none",
        0.0,
        0,
        payload(&[
            ("energies_scanned", energies.len() as f64),
            ("admissible_count", admissible_count as f64),
            ("admissible_with_empty_shell", admissible_with_empty_shell as f64),
        ]),
        config.master_seed,
        timestamp,
    ));
    Ok(records)
}

/// Singular-cube census of the two-point correlation domain per energy.
pub fn run_singular(config: &ExperimentConfig, timestamp: &str) -> Result<Vec<ExperimentRecord>, HarnessError> {
    let curve = config.build_curve()?;
    let tag = config.experiment.tag();
    let curve_tag = curve.kind().tag();
    let length = curve.length();
    let mut records = Vec::new();
    let mut max_ratio = 0.0f64;
    let mut used = 0u64;

    for &energy in &config.energies {
        if !is_sum_of_three_squares(energy) {
            records.push(rejection_record(tag, energy, curve_tag, length, config.master_seed, timestamp));
            continue;
        }
        let shell = LatticeShell::enumerate(energy)?;
        let report = kacrice::singular_cubes(&shell, &curve, config.c0)?;
        let ratio = report.bound_ratio(energy);
        max_ratio = max_ratio.max(ratio);
        used += 1;
        records.push(ExperimentRecord::aggregate(
            tag,
            energy,
            shell.count(),
            curve_tag,
            length,
            0,
            payload(&[
                ("singular_count", report.singular_count() as f64),
                ("subdivision", report.k as f64),
                ("delta0", report.delta0),
                ("r_sq_integral", report.r_sq_integral),
                ("bound_ratio", ratio),
            ]),
            config.master_seed,
            timestamp,
        ));
    }

    records.push(ExperimentRecord::aggregate(
        tag,
        0,
        0,
        curve_tag,
        length,
        0,
        payload(&[("max_bound_ratio", max_ratio), ("energies_used", used as f64)]),
        config.master_seed,
        timestamp,
    ));
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::CurveSpec;

    fn base_config(kind: ExperimentKind, energies: Vec<i64>) -> ExperimentConfig {
        ExperimentConfig {
            experiment: kind,
            energies,
            curve: CurveSpec::parse("torus-helix 0.25").unwrap(),
            trials: 50,
            master_seed: 1,
            points_per_wavelength: 32,
            grid_per_wavelength: 4,
            c0: 1.0,
            output: None,
        }
    }

    #[test]
    fn expectation_matches_prediction_and_rejects_bad_energies() {
        let mut config = base_config(ExperimentKind::Expectation, vec![7, 11]);
        config.trials = 600;
        let records = run(&config, "test").unwrap();

        let rejection = &records[0];
        assert_eq!(rejection.energy, 7);
        assert_eq!(rejection.payload["rejected"], 1.0);
        assert_eq!(rejection.payload["residue_mod_8"], 7.0);
        assert_eq!(rejection.payload["sum_three_squares"], 0.0);
        assert_eq!(rejection.trials, Some(0));

        let per_trial: Vec<_> = records.iter().filter(|r| !r.aggregate).collect();
        assert_eq!(per_trial.len(), 600);
        assert!(per_trial.iter().all(|r| r.energy == 11 && r.shell_count == 24));

        let aggregate = records.iter().find(|r| r.aggregate && r.energy == 11).unwrap();
        assert_eq!(aggregate.trials, Some(600));
        let mean = aggregate.payload["mean_normalized"];
        let se = aggregate.payload["std_error"];
        let prediction = aggregate.payload["prediction"];
        let curve = config.build_curve().unwrap();
        assert!((prediction - 2.0 * curve.length() / 3f64.sqrt()).abs() < 1e-12);
        assert!(
            (mean - prediction).abs() < 3.0 * se,
            "mean {mean} vs prediction {prediction} exceeds 3·SE = {}",
            3.0 * se
        );
    }

    #[test]
    fn single_trial_aggregate_equals_that_trial() {
        let mut config = base_config(ExperimentKind::Expectation, vec![11]);
        config.trials = 1;
        let records = run(&config, "test").unwrap();
        assert_eq!(records.len(), 2);
        assert_eq!(
            records[0].payload["normalized"],
            records[1].payload["mean_normalized"]
        );
        assert_eq!(records[1].payload["std_error"], 0.0);
    }

    #[test]
    fn expectation_requires_curvature() {
        let mut config = base_config(ExperimentKind::Expectation, vec![11]);
        config.curve = CurveSpec::parse("straight-segment 0 0.3 0.7 1 0.3 0.7").unwrap();
        assert!(matches!(run(&config, "test"), Err(HarnessError::FlatCurve(_))));
    }

    #[test]
    fn variance_ladder_produces_intervals_and_slopes() {
        let mut config = base_config(ExperimentKind::Variance, vec![3, 12, 101]);
        config.trials = 500;
        let records = run(&config, "test").unwrap();

        // 12 ≡ 4 mod 8 must be rejected, never silently skipped.
        let rejection = records.iter().find(|r| r.energy == 12).unwrap();
        assert_eq!(rejection.payload["rejected"], 1.0);
        assert_eq!(rejection.payload["residue_mod_8"], 4.0);

        for energy in [3i64, 101] {
            let agg = records
                .iter()
                .find(|r| r.aggregate && r.energy == energy && r.payload.contains_key("variance"))
                .unwrap();
            let var = agg.payload["variance"];
            assert!(var > 0.0);
            assert!(agg.payload["var_ci_lo"] <= var && var <= agg.payload["var_ci_hi"]);
            assert!(agg.payload["r2_proxy"] > 0.0);
        }

        let cross = records.iter().find(|r| r.energy == 0).unwrap();
        assert_eq!(cross.payload["energies_fit"], 2.0);
        assert!(cross.payload["variance_slope"].is_finite());
        // The deterministic proxy must decrease along the ladder.
        assert!(cross.payload["proxy_slope"] < 0.0);
    }

    #[test]
    fn variance_preconditions_are_enforced() {
        let config = base_config(ExperimentKind::Variance, vec![3, 101]);
        assert!(matches!(
            run(&config, "test"),
            Err(HarnessError::TooFewTrials { got: 50, need: 500 })
        ));

        let mut config = base_config(ExperimentKind::Variance, vec![11, 19]);
        config.trials = 500;
        assert!(matches!(
            run(&config, "test"),
            Err(HarnessError::NarrowEnergyLadder { admissible: 2, .. })
        ));

        let mut config = base_config(ExperimentKind::Variance, vec![11]);
        config.trials = 500;
        assert!(matches!(
            run(&config, "test"),
            Err(HarnessError::NarrowEnergyLadder { admissible: 1, .. })
        ));
    }

    #[test]
    fn reruns_and_thread_counts_leave_records_bit_identical() {
        let mut config = base_config(ExperimentKind::Expectation, vec![11]);
        config.trials = 40;
        let single = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| run(&config, "test"))
            .unwrap();
        let quad = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap()
            .install(|| run(&config, "test"))
            .unwrap();
        assert_eq!(single, quad);

        let again = run(&config, "test").unwrap();
        assert_eq!(single, again);

        config.master_seed = 2;
        let reseeded = run(&config, "test").unwrap();
        assert_ne!(single, reseeded);
    }

    #[test]
    fn r2_scaling_ladder_decreases() {
        let config = base_config(ExperimentKind::R2Scaling, vec![11, 101]);
        let records = run(&config, "test").unwrap();
        let r2_11 = records[0].payload["r2"];
        let r2_101 = records[1].payload["r2"];
        assert!(r2_11 > r2_101, "R₂ should decrease: {r2_11} vs {r2_101}");
        let cross = records.iter().find(|r| r.energy == 0).unwrap();
        assert!(cross.payload["r2_slope"] < 0.0);
        assert_eq!(cross.payload["energies_fit"], 2.0);
    }

    #[test]
    fn riesz_records_compare_against_uniform_limit() {
        let config = base_config(ExperimentKind::Riesz, vec![7, 101]);
        let records = run(&config, "test").unwrap();
        assert_eq!(records[0].payload["rejected"], 1.0);
        let for_101: Vec<_> = records.iter().filter(|r| r.energy == 101).collect();
        assert_eq!(for_101.len(), DEFAULT_RIESZ_EXPONENTS.len());
        for record in &for_101 {
            assert_eq!(record.curve, "none");
            let s = record.payload["s"];
            let limit = record.payload["uniform_limit"];
            assert!((limit - 2f64.powf(1.0 - s) / (2.0 - s)).abs() < 1e-15);
            assert!(record.payload["riesz_normalized"] > 0.0);
            assert!(record.payload["rel_deviation"] < 0.5);
        }
    }

    #[test]
    fn shell_census_range_flags_empty_shells() {
        let config = base_config(ExperimentKind::ShellCensus, vec![20]);
        let records = run(&config, "test").unwrap();
        assert_eq!(records.len(), 21);
        let e7 = records.iter().find(|r| r.energy == 7).unwrap();
        assert_eq!(e7.payload["shell_count"], 0.0);
        assert_eq!(e7.payload["admissible"], 0.0);
        assert_eq!(e7.payload["sum_three_squares"], 0.0);
        let e15 = records.iter().find(|r| r.energy == 15).unwrap();
        assert_eq!(e15.payload["shell_count"], 0.0);
        let e4 = records.iter().find(|r| r.energy == 4).unwrap();
        assert_eq!(e4.payload["shell_count"], 6.0);
        assert_eq!(e4.payload["admissible"], 0.0);
        assert_eq!(e4.payload["sum_three_squares"], 1.0);
        let summary = records.last().unwrap();
        assert_eq!(summary.payload["energies_scanned"], 20.0);
        assert_eq!(summary.payload["admissible_with_empty_shell"], 0.0);

        // An explicit multi-entry list is taken literally.
        let config = base_config(ExperimentKind::ShellCensus, vec![11, 101]);
        let records = run(&config, "test").unwrap();
        assert_eq!(records.len(), 3);
    }

    #[test]
    fn singular_census_matches_direct_call() {
        let config = base_config(ExperimentKind::Singular, vec![11]);
        let records = run(&config, "test").unwrap();
        let shell = LatticeShell::enumerate(11).unwrap();
        let curve = config.build_curve().unwrap();
        let report = kacrice::singular_cubes(&shell, &curve, 1.0).unwrap();
        assert_eq!(records[0].payload["singular_count"], report.singular_count() as f64);
        assert_eq!(records[0].payload["bound_ratio"], report.bound_ratio(11));
        assert_eq!(
            records.last().unwrap().payload["max_bound_ratio"],
            report.bound_ratio(11)
        );
    }

    #[test]
    fn oscillatory_runner_emits_decay_fit() {
        let mut config = base_config(ExperimentKind::Oscillatory, vec![11]);
        config.master_seed = 20260815;
        let records = run(&config, "test").unwrap();
        assert_eq!(records.len(), 1);
        let fit = &records[0];
        assert_eq!(fit.seed, 20260815);
        assert_eq!(fit.payload["directions"], DEFAULT_XI_SAMPLES as f64);
        assert_eq!(fit.payload["lambda_0"], 1e2);
        assert_eq!(fit.payload["lambda_3"], 1e5);
        assert!(fit.payload["exponent"] <= -1.0 / 3.0 + 0.05);
        for idx in 0..4 {
            assert!(fit.payload[&format!("max_abs_{idx}")] > 0.0);
        }
    }
}
