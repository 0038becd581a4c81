//! JSON run reports shared by every subcommand.

use std::path::Path;

use haarscatter::{
    lstsq, r_squared, FitReport, GridConfig, Matrix, OptimizationResult, PairingRule, ReadoutModel,
};
use serde::Serialize;

use crate::input::ResolvedSource;
use crate::{CascadeArgs, CliError};

#[derive(Serialize)]
pub struct RuleEcho {
    pub sigma: f64,
    pub tau: i64,
}

#[derive(Serialize)]
pub struct TraceEcho {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub transition: Option<usize>,
    pub sigma: f64,
    pub tau: i64,
    pub loss: f64,
}

#[derive(Serialize)]
pub struct OptimizationEcho {
    /// Residual sum of squares under the winning rules.
    pub loss: f64,
    /// Candidates scored, degenerate ones excluded.
    pub evaluated: usize,
    pub trace: Vec<TraceEcho>,
}

#[derive(Serialize)]
pub struct FitEcho {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_squared: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_squared_holdout: Option<f64>,
    /// True when the targets were constant, leaving r_squared undefined.
    pub undefined_variance: bool,
    pub rank_deficient: bool,
    pub zero_design_rows: usize,
    pub residual_rmse: f64,
    pub residual_max_abs: f64,
    pub coefficients: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub intercept: Option<f64>,
}

#[derive(Serialize)]
pub struct ParamEcho {
    pub key: String,
    pub value: String,
}

/// Everything that shaped the run, echoed back so the report stands alone.
#[derive(Serialize)]
pub struct ConfigEcho {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub params: Option<Vec<ParamEcho>>,
    pub length: usize,
    pub depth: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Candidate grids; absent when no rule search ran.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma_grid: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau_grid: Option<Vec<i64>>,
    pub per_layer: bool,
    pub use_abs: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub transfer: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub intercept: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub direction: Option<String>,
}

#[derive(Serialize)]
pub struct Report {
    pub command: String,
    pub config: ConfigEcho,
    /// One rule per transition, as actually used.
    pub rules: Vec<RuleEcho>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub optimization: Option<OptimizationEcho>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit: Option<FitEcho>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dropped_thetas: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kept_thetas: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    /// Wall-clock time; kept last so the rest of the report is stable
    /// across runs.
    pub runtime_seconds: f64,
}

/// Config echo for commands that take the common source and cascade flags.
/// Fields the command does not use stay `None` for the caller to fill.
pub fn base_config(
    source: &ResolvedSource,
    cascade: &CascadeArgs,
    grid: Option<&GridConfig>,
) -> ConfigEcho {
    ConfigEcho {
        input: source.input_path.clone(),
        family: source.family_name().map(str::to_string),
        params: source.params_echo().map(|pairs| {
            pairs
                .into_iter()
                .map(|(key, value)| ParamEcho { key, value })
                .collect()
        }),
        length: source.signal.len(),
        depth: cascade.depth,
        seed: source.spec.and_then(|s| s.seed()),
        sigma_grid: grid.map(|g| g.sigma_values.clone()),
        tau_grid: grid.map(|g| g.tau_values.clone()),
        per_layer: cascade.per_layer,
        use_abs: !cascade.no_abs,
        transfer: None,
        intercept: None,
        direction: None,
    }
}

pub fn rule_echoes(rules: &[PairingRule]) -> Vec<RuleEcho> {
    rules
        .iter()
        .map(|r| RuleEcho {
            sigma: r.sigma,
            tau: r.tau,
        })
        .collect()
}

pub fn optimization_echo(result: &OptimizationResult) -> OptimizationEcho {
    OptimizationEcho {
        loss: result.loss,
        evaluated: result.trace.len(),
        trace: result
            .trace
            .iter()
            .map(|t| TraceEcho {
                transition: t.transition,
                sigma: t.sigma,
                tau: t.tau,
                loss: t.loss,
            })
            .collect(),
    }
}

pub fn fit_echo(model: &ReadoutModel, fit: &FitReport, holdout: Option<f64>) -> FitEcho {
    let n = fit.residuals.len().max(1);
    let sum_sq: f64 = fit.residuals.iter().map(|r| r * r).sum();
    let max_abs = fit.residuals.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    FitEcho {
        r_squared: fit.r_squared,
        r_squared_holdout: holdout,
        undefined_variance: fit.r_squared.is_none(),
        rank_deficient: fit.rank_deficient,
        zero_design_rows: fit.zero_design_rows,
        residual_rmse: (sum_sq / n as f64).sqrt(),
        residual_max_abs: max_abs,
        coefficients: model.beta.clone(),
        intercept: model.intercept,
    }
}

/// Out-of-sample fit check: train on even-indexed rows, score on odd-indexed
/// rows. `None` when either split has fewer than two rows or the fit or
/// scoring fails, so callers can always attach the result.
pub fn holdout_r_squared(rows: &[Vec<f64>], targets: &[f64], intercept: bool) -> Option<f64> {
    if rows.len() != targets.len() {
        return None;
    }
    let mut train_rows = Vec::new();
    let mut train_targets = Vec::new();
    let mut test_rows = Vec::new();
    let mut test_targets = Vec::new();
    for (i, (row, &target)) in rows.iter().zip(targets).enumerate() {
        if i % 2 == 0 {
            train_rows.push(row.clone());
            train_targets.push(target);
        } else {
            test_rows.push(row.clone());
            test_targets.push(target);
        }
    }
    if train_rows.len() < 2 || test_rows.len() < 2 {
        return None;
    }
    let mut design = Matrix::from_rows(&train_rows).ok()?;
    if intercept {
        design = design.with_ones_column();
    }
    let solution = lstsq(&design, &train_targets).ok()?;
    let coef = solution.coefficients;
    let mut predicted = Vec::with_capacity(test_rows.len());
    for row in &test_rows {
        let mut acc = if intercept { coef[row.len()] } else { 0.0 };
        for (w, &x) in coef.iter().zip(row) {
            acc += w * x;
        }
        predicted.push(acc);
    }
    r_squared(&test_targets, &predicted).ok()
}

pub fn write_report(path: &Path, report: &Report) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(report)
        .map_err(|e| CliError::usage(format!("cannot serialize report: {e}")))?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}
