//! `benchmark`: four reference experiments with published targets.
//!
//! Each experiment writes a JSON report; `summary.csv` collects one row per
//! headline number with its reference value and pass threshold. Everything
//! except the `runtime_seconds` fields is deterministic for a given seed.

use std::time::Instant;

use haarscatter::signals::{
    AR1_NOISE_SIGMA, AR1_PHI, DEFAULT_LENGTH, LOGISTIC_BETA, LOGISTIC_CAPACITY, LOGISTIC_INITIAL,
    LOGISTIC_NOISE_SIGMA,
};
use haarscatter::{
    fit_parameter_forward, fit_parameter_inverse, fit_reconstruction, node_domain_position,
    optimize_rules, propagate, sweep_family, GeneratorSpec, GridConfig, InputKind, PairingRule,
    ParameterSweep, Signal, SweepOutcome, Transfer,
};
use serde::Serialize;

use crate::csvio::{self, fmt_f64};
use crate::report::{holdout_r_squared, rule_echoes, RuleEcho};
use crate::{BenchmarkArgs, CliError};

/// Noisy recursions escape for some seeds; the time-series experiment walks
/// forward from the requested seed until one survives.
const MAX_SEED_ATTEMPTS: u64 = 32;

const FIXED_RULE: PairingRule = PairingRule {
    sigma: 0.0,
    tau: 1,
};

#[derive(Serialize)]
struct ExperimentRun {
    label: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    theta: Option<f64>,
    rules: Vec<RuleEcho>,
    r_squared: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    r_squared_holdout: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    kept: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    dropped_thetas: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed_requested: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed_used: Option<u64>,
}

#[derive(Serialize)]
struct ExperimentReport {
    experiment: String,
    depth: usize,
    seed: u64,
    runs: Vec<ExperimentRun>,
    runtime_seconds: f64,
}

struct SummaryRow {
    name: &'static str,
    r_squared: f64,
    reference: f64,
    threshold: f64,
}

impl SummaryRow {
    fn pass(&self) -> bool {
        self.r_squared >= self.threshold
    }
}

/// Rule search plus reconstruction fit for one signal.
fn reconstruction_run(
    label: &str,
    theta: f64,
    signal: &Signal,
    depth: usize,
) -> Result<ExperimentRun, CliError> {
    let grid = GridConfig::default_grid(signal.len(), depth);
    let result = optimize_rules(signal, &grid)?;
    let network = propagate(signal, &result.rules, depth, true)?;
    let (_, fit) = fit_reconstruction(&network, signal, false)?;
    let deepest = network.final_layer();
    let rows: Vec<Vec<f64>> = (0..deepest.rows()).map(|n| deepest.row(n).to_vec()).collect();
    let targets: Vec<f64> = (0..deepest.rows())
        .map(|n| signal.samples()[node_domain_position(n + 1, depth) - 1])
        .collect();
    let r_squared = fit
        .r_squared
        .ok_or_else(|| CliError::usage(format!("{label}: fit has undefined r_squared")))?;
    Ok(ExperimentRun {
        label: label.into(),
        theta: Some(theta),
        rules: rule_echoes(network.rules()),
        r_squared,
        r_squared_holdout: holdout_r_squared(&rows, &targets, false),
        kept: None,
        dropped_thetas: None,
        seed_requested: None,
        seed_used: None,
    })
}

/// Fixed-rule sweep fit across realizations of one family.
fn sweep_run(
    label: &str,
    outcome: SweepOutcome,
    depth: usize,
    forward: bool,
) -> Result<ExperimentRun, CliError> {
    if outcome.realizations.len() < 2 {
        return Err(CliError::usage(format!(
            "{label}: only {} finite realizations; nothing to fit",
            outcome.realizations.len()
        )));
    }
    let sweep = ParameterSweep::build(
        outcome.theta_values,
        outcome.realizations,
        &[FIXED_RULE],
        depth,
        true,
    )?;
    let (_, fit) = if forward {
        fit_parameter_forward(&sweep, Transfer::Identity, false)?
    } else {
        fit_parameter_inverse(&sweep, Transfer::Identity, false)?
    };
    let features = sweep.averaged_features();
    let rows: Vec<Vec<f64>> = (0..features.rows()).map(|r| features.row(r).to_vec()).collect();
    let targets: Vec<f64> = if forward {
        sweep
            .realizations()
            .iter()
            .map(|r| r.samples()[r.len() / 2 - 1])
            .collect()
    } else {
        sweep.theta_values().to_vec()
    };
    let r_squared = fit
        .r_squared
        .ok_or_else(|| CliError::usage(format!("{label}: fit has undefined r_squared")))?;
    Ok(ExperimentRun {
        label: label.into(),
        theta: None,
        rules: rule_echoes(sweep.rules()),
        r_squared,
        r_squared_holdout: holdout_r_squared(&rows, &targets, false),
        kept: Some(sweep.theta_values().len()),
        dropped_thetas: Some(outcome.dropped),
        seed_requested: None,
        seed_used: None,
    })
}

fn write_experiment(
    out: &std::path::Path,
    file: &str,
    experiment: &str,
    args: &BenchmarkArgs,
    runs: Vec<ExperimentRun>,
    started: Instant,
) -> Result<(), CliError> {
    let doc = ExperimentReport {
        experiment: experiment.into(),
        depth: args.depth,
        seed: args.seed,
        runs,
        runtime_seconds: started.elapsed().as_secs_f64(),
    };
    let mut text = serde_json::to_string_pretty(&doc)
        .map_err(|e| CliError::usage(format!("cannot serialize report: {e}")))?;
    text.push('\n');
    std::fs::write(out.join(file), text)?;
    Ok(())
}

fn run_sinusoid(args: &BenchmarkArgs) -> Result<SummaryRow, CliError> {
    let started = Instant::now();
    let mut runs = Vec::new();
    let mut worst = f64::INFINITY;
    for beta in [-6.0, -4.0, -2.0, -1.0, 1.0, 2.0, 4.0, 6.0] {
        let signal = GeneratorSpec::Sinusoid {
            beta,
            length: DEFAULT_LENGTH,
        }
        .generate()?;
        let run = reconstruction_run(&format!("beta={}", fmt_f64(beta)), beta, &signal, args.depth)?;
        worst = worst.min(run.r_squared);
        runs.push(run);
    }
    write_experiment(&args.out, "report_sinusoid.json", "sinusoid", args, runs, started)?;
    Ok(SummaryRow {
        name: "sinusoid",
        r_squared: worst,
        reference: 0.99,
        threshold: 0.99,
    })
}

fn run_exponential(args: &BenchmarkArgs) -> Result<SummaryRow, CliError> {
    let started = Instant::now();
    let mut runs = Vec::new();
    let mut worst = f64::INFINITY;
    for beta in [-3.0, -1.0, 1.0, 3.0] {
        let signal = GeneratorSpec::Exponential {
            beta,
            length: DEFAULT_LENGTH,
        }
        .generate()?;
        let run = reconstruction_run(&format!("beta={}", fmt_f64(beta)), beta, &signal, args.depth)?;
        worst = worst.min(run.r_squared);
        runs.push(run);
    }
    write_experiment(
        &args.out,
        "report_exponential.json",
        "exponential",
        args,
        runs,
        started,
    )?;
    Ok(SummaryRow {
        name: "exponential",
        r_squared: worst,
        reference: 0.99,
        threshold: 0.99,
    })
}

fn run_logistic(args: &BenchmarkArgs) -> Result<(SummaryRow, SummaryRow), CliError> {
    let started = Instant::now();
    let base = GeneratorSpec::Logistic {
        beta: LOGISTIC_BETA,
        capacity: LOGISTIC_CAPACITY,
        initial: LOGISTIC_INITIAL,
        noise_sigma: LOGISTIC_NOISE_SIGMA,
        length: DEFAULT_LENGTH,
        seed: args.seed,
    };

    let mut survivor = None;
    for attempt in 0..MAX_SEED_ATTEMPTS {
        let seed = args.seed + attempt;
        match base.with_seed(seed).generate() {
            Ok(signal) => {
                survivor = Some((signal, seed));
                break;
            }
            Err(haarscatter::Error::NonFiniteSample { .. }) => continue,
            Err(e) => return Err(e.into()),
        }
    }
    let (signal, seed_used) = survivor.ok_or_else(|| {
        CliError::usage(format!(
            "no finite logistic trajectory within {MAX_SEED_ATTEMPTS} seeds of {}",
            args.seed
        ))
    })?;
    let mut timeseries = reconstruction_run("timeseries", LOGISTIC_BETA, &signal, args.depth)?;
    timeseries.seed_requested = Some(args.seed);
    timeseries.seed_used = Some(seed_used);
    let ts_row = SummaryRow {
        name: "logistic_timeseries",
        r_squared: timeseries.r_squared,
        reference: 0.9611,
        threshold: 0.90,
    };

    let thetas: Vec<f64> = (0..=30).map(|i| 0.005 + 0.0005 * i as f64).collect();
    let outcome = sweep_family(&base, &thetas, args.seed)?;
    let state = sweep_run("state", outcome, args.depth, true)?;
    let state_row = SummaryRow {
        name: "logistic_state",
        r_squared: state.r_squared,
        reference: 0.915,
        threshold: 0.85,
    };

    write_experiment(
        &args.out,
        "report_logistic.json",
        "logistic",
        args,
        vec![timeseries, state],
        started,
    )?;
    Ok((ts_row, state_row))
}

fn run_ar1(args: &BenchmarkArgs) -> Result<(SummaryRow, SummaryRow), CliError> {
    let started = Instant::now();
    let thetas: Vec<f64> = (1..=19).map(|i| 0.05 * i as f64).collect();
    let mut rows = Vec::new();
    let mut runs = Vec::new();
    for (label, input) in [("step", InputKind::Step), ("pulse", InputKind::Pulse)] {
        let base = GeneratorSpec::Ar1 {
            phi: AR1_PHI,
            input,
            noise_sigma: AR1_NOISE_SIGMA,
            length: DEFAULT_LENGTH,
            seed: args.seed,
        };
        let outcome = sweep_family(&base, &thetas, args.seed)?;
        let run = sweep_run(label, outcome, args.depth, false)?;
        rows.push(run.r_squared);
        runs.push(run);
    }
    write_experiment(&args.out, "report_ar1.json", "ar1", args, runs, started)?;
    Ok((
        SummaryRow {
            name: "ar1_step",
            r_squared: rows[0],
            reference: 0.9663,
            threshold: 0.90,
        },
        SummaryRow {
            name: "ar1_pulse",
            r_squared: rows[1],
            reference: 0.9663,
            threshold: 0.90,
        },
    ))
}

pub fn run(args: &BenchmarkArgs) -> Result<(), CliError> {
    std::fs::create_dir_all(&args.out)?;
    let sinusoid = run_sinusoid(args)?;
    let exponential = run_exponential(args)?;
    let (logistic_ts, logistic_state) = run_logistic(args)?;
    let (ar1_step, ar1_pulse) = run_ar1(args)?;

    let summary = [
        sinusoid,
        exponential,
        logistic_ts,
        logistic_state,
        ar1_step,
        ar1_pulse,
    ];
    let rows: Vec<Vec<String>> = summary
        .iter()
        .map(|row| {
            vec![
                row.name.to_string(),
                fmt_f64(row.r_squared),
                fmt_f64(row.reference),
                fmt_f64(row.threshold),
                row.pass().to_string(),
            ]
        })
        .collect();
    csvio::write_csv(
        &args.out.join("summary.csv"),
        &["experiment", "r_squared", "reference", "threshold", "pass"],
        &rows,
    )?;

    for row in &summary {
        println!(
            "{}: r_squared {} (threshold {}) {}",
            row.name,
            fmt_f64(row.r_squared),
            fmt_f64(row.threshold),
            if row.pass() { "pass" } else { "FAIL" }
        );
    }
    Ok(())
}
