//! `identify`: sweep a generator parameter and fit a readout across
//! realizations.

use std::time::Instant;

use haarscatter::{
    fit_parameter_forward, fit_parameter_inverse, optimize_rules, sweep_family, Family,
    PairingRule, ParameterSweep,
};

use crate::csvio::{self, fmt_f64};
use crate::report::ParamEcho;
use crate::{input, report, CliError, Direction, IdentifyArgs};

/// Stock sweep range per family: `(start, stop, step)`.
fn default_theta_range(family: Family) -> (f64, f64, f64) {
    match family {
        Family::Sinusoid | Family::Exponential => (0.5, 4.0, 0.5),
        Family::Logistic => (0.005, 0.02, 0.0005),
        Family::Ar1 => (0.05, 0.95, 0.05),
    }
}

fn theta_values(args: &IdentifyArgs, family: Family) -> Result<Vec<f64>, CliError> {
    let (d_start, d_stop, d_step) = default_theta_range(family);
    let start = args.theta_start.unwrap_or(d_start);
    let stop = args.theta_stop.unwrap_or(d_stop);
    let step = args.theta_step.unwrap_or(d_step);
    if !start.is_finite() || !stop.is_finite() || !step.is_finite() || step == 0.0 {
        return Err(CliError::usage(
            "theta range must be finite with a nonzero step",
        ));
    }
    // Inclusive endpoint with slack for accumulated rounding.
    let count = ((stop - start) / step + 1e-9).floor() as i64;
    if count < 1 {
        return Err(CliError::usage(
            "theta range must contain at least two values",
        ));
    }
    Ok((0..=count).map(|i| start + i as f64 * step).collect())
}

/// The parameter key the sweep varies; left out of the fixed-parameter echo.
fn swept_key(family: Family) -> &'static str {
    match family {
        Family::Ar1 => "phi",
        _ => "beta",
    }
}

pub fn run(args: &IdentifyArgs) -> Result<(), CliError> {
    let start = Instant::now();
    let family = input::parse_family(&args.family)?;
    let overrides = input::parse_param_flags(&args.params)?;
    let spec = input::build_spec(family, &overrides, args.seed)?;
    let thetas = theta_values(args, family)?;

    let outcome = sweep_family(&spec, &thetas, args.seed)?;
    if outcome.realizations.len() < 2 {
        return Err(CliError::usage(format!(
            "only {} of {} parameter values produced finite realizations; nothing to fit",
            outcome.realizations.len(),
            thetas.len()
        )));
    }
    let reference = &outcome.realizations[0];
    input::check_depth(args.cascade.depth, reference)?;
    let use_abs = !args.cascade.no_abs;

    let (rules, optimization, grid) = if input::has_explicit_grid(&args.cascade) {
        let grid = input::grid_config(&args.cascade, reference.len())?;
        let result = optimize_rules(reference, &grid)?;
        (
            result.rules.clone(),
            Some(report::optimization_echo(&result)),
            Some(grid),
        )
    } else {
        (vec![PairingRule { sigma: 0.0, tau: 1 }], None, None)
    };

    let sweep = ParameterSweep::build(
        outcome.theta_values.clone(),
        outcome.realizations,
        &rules,
        args.cascade.depth,
        use_abs,
    )?;
    let transfer = args.transfer.to_core();
    let (model, fit) = match args.direction {
        Direction::Forward => fit_parameter_forward(&sweep, transfer, args.intercept)?,
        Direction::Inverse => fit_parameter_inverse(&sweep, transfer, args.intercept)?,
    };

    // Holdout over the transferred feature rows and the same targets the
    // fit used.
    let features = sweep.averaged_features();
    let feature_rows: Vec<Vec<f64>> = (0..features.rows())
        .map(|r| features.row(r).iter().map(|&x| transfer.apply(x)).collect())
        .collect();
    let targets: Vec<f64> = match args.direction {
        Direction::Forward => sweep
            .realizations()
            .iter()
            .map(|r| r.samples()[r.len() / 2 - 1])
            .collect(),
        Direction::Inverse => sweep.theta_values().to_vec(),
    };
    let holdout = report::holdout_r_squared(&feature_rows, &targets, args.intercept);

    std::fs::create_dir_all(&args.out)?;
    let (header, rows): (Vec<&str>, Vec<Vec<String>>) = match args.direction {
        Direction::Forward => (
            vec!["theta", "actual", "predicted"],
            sweep
                .theta_values()
                .iter()
                .zip(&targets)
                .zip(&fit.predictions)
                .map(|((&theta, &actual), &predicted)| {
                    vec![fmt_f64(theta), fmt_f64(actual), fmt_f64(predicted)]
                })
                .collect(),
        ),
        Direction::Inverse => (
            vec!["theta", "predicted"],
            sweep
                .theta_values()
                .iter()
                .zip(&fit.predictions)
                .map(|(&theta, &predicted)| vec![fmt_f64(theta), fmt_f64(predicted)])
                .collect(),
        ),
    };
    csvio::write_csv(&args.out.join("sweep.csv"), &header, &rows)?;

    let mut params: Vec<ParamEcho> = input::spec_param_echo(&spec)
        .into_iter()
        .filter(|(key, _)| key != swept_key(family))
        .map(|(key, value)| ParamEcho { key, value })
        .collect();
    params.push(ParamEcho {
        key: "theta_start".into(),
        value: fmt_f64(thetas[0]),
    });
    params.push(ParamEcho {
        key: "theta_stop".into(),
        value: fmt_f64(*thetas.last().expect("at least two values")),
    });
    params.push(ParamEcho {
        key: "theta_step".into(),
        value: fmt_f64(thetas[1] - thetas[0]),
    });

    let mut notes = Vec::new();
    if !outcome.dropped.is_empty() {
        notes.push(format!(
            "{} parameter values dropped after non-finite trajectories",
            outcome.dropped.len()
        ));
    }

    let doc = report::Report {
        command: "identify".into(),
        config: report::ConfigEcho {
            input: None,
            family: Some(input::family_name(family).into()),
            params: Some(params),
            length: spec.length(),
            depth: args.cascade.depth,
            seed: Some(args.seed),
            sigma_grid: grid.as_ref().map(|g| g.sigma_values.clone()),
            tau_grid: grid.as_ref().map(|g| g.tau_values.clone()),
            per_layer: args.cascade.per_layer,
            use_abs,
            transfer: Some(args.transfer.name().into()),
            intercept: Some(args.intercept),
            direction: Some(args.direction.name().into()),
        },
        rules: report::rule_echoes(sweep.rules()),
        optimization,
        fit: Some(report::fit_echo(&model, &fit, holdout)),
        dropped_thetas: Some(outcome.dropped),
        kept_thetas: Some(sweep.theta_values().to_vec()),
        notes,
        runtime_seconds: start.elapsed().as_secs_f64(),
    };
    report::write_report(&args.out.join("report.json"), &doc)
}
