//! `reconstruct`: search rules, fit the coarse grid, interpolate.

use std::time::Instant;

use haarscatter::{fit_reconstruction, interpolate, optimize_rules, propagate};

use crate::csvio::{self, fmt_f64};
use crate::{input, report, CliError, ReconstructArgs};

pub fn run(args: &ReconstructArgs) -> Result<(), CliError> {
    let start = Instant::now();
    let source = input::resolve(&args.source)?;
    input::check_depth(args.cascade.depth, &source.signal)?;
    let signal = &source.signal;

    let grid = input::grid_config(&args.cascade, signal.len())?;
    let result = optimize_rules(signal, &grid)?;
    let network = propagate(signal, &result.rules, args.cascade.depth, grid.use_abs)?;
    let (model, fit) = fit_reconstruction(&network, signal, args.intercept)?;

    // Node-level data: feature rows for the holdout split, actuals and
    // predictions for the CSV.
    let deepest = network.final_layer();
    let nodes = predicted_nodes(&fit, network.depth());
    let feature_rows: Vec<Vec<f64>> = (0..deepest.rows()).map(|n| deepest.row(n).to_vec()).collect();
    let actual_at = |position: usize| signal.samples()[position - 1];
    let targets: Vec<f64> = nodes.iter().map(|&(p, _)| actual_at(p)).collect();
    let holdout = report::holdout_r_squared(&feature_rows, &targets, args.intercept);

    std::fs::create_dir_all(&args.out)?;
    let prediction_rows: Vec<Vec<String>> = nodes
        .iter()
        .map(|&(position, predicted)| {
            vec![
                position.to_string(),
                fmt_f64(actual_at(position)),
                fmt_f64(predicted),
            ]
        })
        .collect();
    csvio::write_csv(
        &args.out.join("predictions.csv"),
        &["t", "actual", "predicted"],
        &prediction_rows,
    )?;

    let filled = interpolate(&nodes, signal.len())?;
    let interpolated_rows: Vec<Vec<String>> = filled
        .samples()
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            vec![
                (i + 1).to_string(),
                fmt_f64(signal.samples()[i]),
                fmt_f64(v),
            ]
        })
        .collect();
    csvio::write_csv(
        &args.out.join("interpolated.csv"),
        &["t", "actual", "interpolated"],
        &interpolated_rows,
    )?;

    let mut notes = Vec::new();
    if fit.r_squared.is_none() {
        notes.push("targets are constant; r_squared is undefined".into());
    }
    if let Some(original) = source.original_len {
        if original != signal.len() {
            notes.push(format!("input length {original} adjusted to {}", signal.len()));
        }
    }

    let mut config = report::base_config(&source, &args.cascade, Some(&grid));
    config.intercept = Some(args.intercept);
    let doc = report::Report {
        command: "reconstruct".into(),
        config,
        rules: report::rule_echoes(network.rules()),
        optimization: Some(report::optimization_echo(&result)),
        fit: Some(report::fit_echo(&model, &fit, holdout)),
        dropped_thetas: None,
        kept_thetas: None,
        notes,
        runtime_seconds: start.elapsed().as_secs_f64(),
    };
    report::write_report(&args.out.join("report.json"), &doc)
}

/// `(position, predicted)` per node, from the in-sample fit.
fn predicted_nodes(fit: &haarscatter::FitReport, depth: usize) -> Vec<(usize, f64)> {
    fit.predictions
        .iter()
        .enumerate()
        .map(|(n, &p)| (haarscatter::node_domain_position(n + 1, depth), p))
        .collect()
}
