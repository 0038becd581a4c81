//! `extract`: propagate a cascade and dump the deepest layer.

use std::time::Instant;

use haarscatter::{node_domain_position, optimize_rules, propagate, PairingRule};

use crate::csvio::{self, fmt_f64};
use crate::{input, report, CliError, ExtractArgs};

pub fn run(args: &ExtractArgs) -> Result<(), CliError> {
    let start = Instant::now();
    let source = input::resolve(&args.source)?;
    input::check_depth(args.cascade.depth, &source.signal)?;
    let use_abs = !args.cascade.no_abs;

    // A rule search only runs when a candidate grid was given; otherwise the
    // stride-1 rule is used as-is.
    let (rules, optimization, grid) = if input::has_explicit_grid(&args.cascade) {
        let grid = input::grid_config(&args.cascade, source.signal.len())?;
        let result = optimize_rules(&source.signal, &grid)?;
        (
            result.rules.clone(),
            Some(report::optimization_echo(&result)),
            Some(grid),
        )
    } else {
        (vec![PairingRule { sigma: 0.0, tau: 1 }], None, None)
    };

    let network = propagate(&source.signal, &rules, args.cascade.depth, use_abs)?;
    let deepest = network.final_layer();

    std::fs::create_dir_all(&args.out)?;
    let mut header = vec!["position".to_string()];
    for c in 0..deepest.cols() {
        header.push(format!("f{c}"));
    }
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut rows = Vec::with_capacity(deepest.rows());
    for n in 0..deepest.rows() {
        let mut row = Vec::with_capacity(deepest.cols() + 1);
        row.push(node_domain_position(n + 1, network.depth()).to_string());
        row.extend(deepest.row(n).iter().map(|&v| fmt_f64(v)));
        rows.push(row);
    }
    csvio::write_csv(&args.out.join("features.csv"), &header_refs, &rows)?;

    let mut notes = Vec::new();
    if let Some(original) = source.original_len {
        if original != source.signal.len() {
            notes.push(format!(
                "input length {original} adjusted to {}",
                source.signal.len()
            ));
        }
    }

    let doc = report::Report {
        command: "extract".into(),
        config: report::base_config(&source, &args.cascade, grid.as_ref()),
        rules: report::rule_echoes(network.rules()),
        optimization,
        fit: None,
        dropped_thetas: None,
        kept_thetas: None,
        notes,
        runtime_seconds: start.elapsed().as_secs_f64(),
    };
    report::write_report(&args.out.join("report.json"), &doc)
}
