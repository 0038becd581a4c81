//! Grid search over pairing rules, scored by reconstruction fit.

use alloc::vec::Vec;

use crate::error::Error;
use crate::readout::fit_reconstruction;
use crate::scattering::{propagate, PairingRule};
use crate::signal::Signal;

/// Candidate grid and search mode.
#[derive(Debug, Clone, PartialEq)]
pub struct GridConfig {
    /// Scale candidates, tried in the given order (outer loop).
    pub sigma_values: Vec<f64>,
    /// Shift candidates, tried in the given order (inner loop).
    pub tau_values: Vec<i64>,
    /// Cascade depth the winning rules must drive.
    pub depth: usize,
    /// When true, pick one rule per transition greedily instead of a single
    /// rule shared by all transitions.
    pub per_layer: bool,
    /// Whether the scored cascades rectify differences; mirrored into the
    /// final fit.
    pub use_abs: bool,
}

impl GridConfig {
    /// The stock grid: scale 0 with every shift from 1 to the deepest
    /// layer's row count minus one, capped at 64.
    ///
    /// Every shift in that range resolves to a nonzero offset at every
    /// transition, so the whole grid is feasible.
    pub fn default_grid(signal_len: usize, depth: usize) -> Self {
        let tau_values = if depth == 0 {
            Vec::new()
        } else {
            let last_rows = signal_len >> (depth - 1);
            let cap = last_rows.saturating_sub(1).min(64) as i64;
            (1..=cap).collect()
        };
        GridConfig {
            sigma_values: alloc::vec![0.0],
            tau_values,
            depth,
            per_layer: false,
            use_abs: true,
        }
    }
}

/// One scored candidate from a search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceEntry {
    /// Transition the candidate was scored for; `None` in single-rule mode,
    /// where one candidate drives every transition.
    pub transition: Option<usize>,
    pub sigma: f64,
    pub tau: i64,
    pub loss: f64,
}

/// Winning rules with their score and the full scored trace.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationResult {
    /// One rule per transition; in single-rule mode the winner repeated.
    pub rules: Vec<PairingRule>,
    /// Residual sum of squares of the depth-`depth` reconstruction fit.
    pub loss: f64,
    /// Fit quality of the winning rules; `None` for constant signals.
    pub r_squared: Option<f64>,
    /// Every feasible candidate in evaluation order; degenerate candidates
    /// are excluded.
    pub trace: Vec<TraceEntry>,
}

/// Residual sum of squares of the reconstruction fit at `depth` under
/// `rules`, the score minimized by [`optimize_rules`].
///
/// # Errors
///
/// Cascade and fit errors as in [`propagate`] and [`fit_reconstruction`].
pub fn reconstruction_loss(
    signal: &Signal,
    rules: &[PairingRule],
    depth: usize,
    use_abs: bool,
) -> Result<f64, Error> {
    let network = propagate(signal, rules, depth, use_abs)?;
    let (_, report) = fit_reconstruction(&network, signal, false)?;
    Ok(report.residuals.iter().map(|r| r * r).sum())
}

fn feasible_at(rule: &PairingRule, transition: usize, signal_len: usize) -> Result<bool, Error> {
    match rule.offset(transition, signal_len, signal_len >> transition) {
        Ok(_) => Ok(true),
        Err(Error::DegenerateRule { .. }) => Ok(false),
        Err(e) => Err(e),
    }
}

/// Grid search for the pairing rules minimizing [`reconstruction_loss`].
///
/// Candidates are scored in grid order (scale outer, shift inner) and ties
/// keep the earliest winner, so results are deterministic. In single-rule
/// mode every candidate drives all transitions and candidates degenerate at
/// any transition are skipped; the exhaustive trace makes the search
/// equivalent to brute force over the grid. In per-transition mode each
/// transition is chosen greedily, scoring candidates by the loss at that
/// partial depth with earlier winners frozen.
///
/// # Errors
///
/// [`Error::Empty`] for an empty grid; [`Error::DepthTooLarge`] if the depth
/// exceeds the signal's; [`Error::NoFeasibleRule`] when every candidate is
/// degenerate; cascade and fit errors propagate.
pub fn optimize_rules(signal: &Signal, grid: &GridConfig) -> Result<OptimizationResult, Error> {
    let depth = grid.depth;
    if depth > signal.max_depth() {
        return Err(Error::DepthTooLarge {
            depth,
            max: signal.max_depth(),
        });
    }
    if depth == 0 {
        let loss = reconstruction_loss(signal, &[], 0, grid.use_abs)?;
        let network = propagate(signal, &[], 0, grid.use_abs)?;
        let (_, report) = fit_reconstruction(&network, signal, false)?;
        return Ok(OptimizationResult {
            rules: Vec::new(),
            loss,
            r_squared: report.r_squared,
            trace: Vec::new(),
        });
    }
    if grid.sigma_values.is_empty() || grid.tau_values.is_empty() {
        return Err(Error::Empty {
            what: "candidate grid",
        });
    }
    let len = signal.len();
    let mut trace = Vec::new();

    let rules = if grid.per_layer {
        let mut frozen: Vec<PairingRule> = Vec::with_capacity(depth);
        for transition in 0..depth {
            let mut best: Option<(PairingRule, f64)> = None;
            for &sigma in &grid.sigma_values {
                for &tau in &grid.tau_values {
                    let rule = PairingRule { sigma, tau };
                    if !feasible_at(&rule, transition, len)? {
                        continue;
                    }
                    let mut candidate = frozen.clone();
                    candidate.push(rule);
                    let loss =
                        reconstruction_loss(signal, &candidate, transition + 1, grid.use_abs)?;
                    trace.push(TraceEntry {
                        transition: Some(transition),
                        sigma,
                        tau,
                        loss,
                    });
                    if best.is_none_or(|(_, b)| loss < b) {
                        best = Some((rule, loss));
                    }
                }
            }
            let (winner, _) = best.ok_or(Error::NoFeasibleRule)?;
            frozen.push(winner);
        }
        frozen
    } else {
        let mut best: Option<(PairingRule, f64)> = None;
        for &sigma in &grid.sigma_values {
            for &tau in &grid.tau_values {
                let rule = PairingRule { sigma, tau };
                let mut feasible = true;
                for transition in 0..depth {
                    if !feasible_at(&rule, transition, len)? {
                        feasible = false;
                        break;
                    }
                }
                if !feasible {
                    continue;
                }
                let loss = reconstruction_loss(
                    signal,
                    core::slice::from_ref(&rule),
                    depth,
                    grid.use_abs,
                )?;
                trace.push(TraceEntry {
                    transition: None,
                    sigma,
                    tau,
                    loss,
                });
                if best.is_none_or(|(_, b)| loss < b) {
                    best = Some((rule, loss));
                }
            }
        }
        let (winner, _) = best.ok_or(Error::NoFeasibleRule)?;
        alloc::vec![winner; depth]
    };

    let network = propagate(signal, &rules, depth, grid.use_abs)?;
    let (_, report) = fit_reconstruction(&network, signal, false)?;
    let loss = report.residuals.iter().map(|r| r * r).sum();
    Ok(OptimizationResult {
        rules,
        loss,
        r_squared: report.r_squared,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signals::gen_sinusoid;
    use alloc::vec;

    #[test]
    fn default_grid_spans_the_deepest_layer() {
        let grid = GridConfig::default_grid(1024, 4);
        assert_eq!(grid.sigma_values, vec![0.0]);
        assert_eq!(grid.tau_values.len(), 64);
        assert_eq!(grid.tau_values[0], 1);
        assert_eq!(grid.tau_values[63], 64);
        let small = GridConfig::default_grid(64, 3);
        // Deepest transition has 16 rows, so shifts run to 15.
        assert_eq!(small.tau_values.len(), 15);
    }

    #[test]
    fn search_matches_a_manual_scan() {
        let signal = gen_sinusoid(2.0, 64).unwrap();
        let grid = GridConfig {
            sigma_values: vec![0.0, 0.25],
            tau_values: vec![1, 2, 3, 5, 7],
            depth: 3,
            per_layer: false,
            use_abs: true,
        };
        let result = optimize_rules(&signal, &grid).unwrap();
        let mut best_loss = f64::INFINITY;
        let mut best_rule = None;
        for &sigma in &grid.sigma_values {
            for &tau in &grid.tau_values {
                let rule = PairingRule { sigma, tau };
                if (0..3).any(|j| rule.offset(j, 64, 64 >> j).is_err()) {
                    continue;
                }
                let loss =
                    reconstruction_loss(&signal, core::slice::from_ref(&rule), 3, true).unwrap();
                if loss < best_loss {
                    best_loss = loss;
                    best_rule = Some(rule);
                }
            }
        }
        assert_eq!(result.rules[0], best_rule.unwrap());
        assert!((result.loss - best_loss).abs() <= 1e-12 * (1.0 + best_loss));
    }

    #[test]
    fn trace_skips_degenerate_candidates() {
        let signal = Signal::new((1..=8).map(f64::from).collect()).unwrap();
        let grid = GridConfig {
            sigma_values: vec![0.0],
            tau_values: vec![8, 1, 16],
            depth: 1,
            per_layer: false,
            use_abs: true,
        };
        // Shifts 8 and 16 reduce to offset 0 on 8 rows.
        let result = optimize_rules(&signal, &grid).unwrap();
        assert_eq!(result.trace.len(), 1);
        assert_eq!(result.rules[0].tau, 1);
    }

    #[test]
    fn all_degenerate_grid_is_rejected() {
        let signal = Signal::new(vec![1.0; 8]).unwrap();
        let grid = GridConfig {
            sigma_values: vec![0.0],
            tau_values: vec![8, 16],
            depth: 1,
            per_layer: false,
            use_abs: true,
        };
        assert_eq!(
            optimize_rules(&signal, &grid).unwrap_err(),
            Error::NoFeasibleRule
        );
        let empty = GridConfig {
            sigma_values: vec![],
            tau_values: vec![1],
            depth: 1,
            per_layer: false,
            use_abs: true,
        };
        assert!(matches!(
            optimize_rules(&signal, &empty).unwrap_err(),
            Error::Empty { .. }
        ));
    }

    #[test]
    fn ties_keep_the_earliest_candidate() {
        // Constant signal: every feasible rule fits exactly, loss 0.
        let signal = Signal::new(vec![3.0; 16]).unwrap();
        let grid = GridConfig {
            sigma_values: vec![0.0],
            tau_values: vec![2, 1, 3],
            depth: 2,
            per_layer: false,
            use_abs: true,
        };
        let result = optimize_rules(&signal, &grid).unwrap();
        assert_eq!(result.rules[0].tau, 2);
        assert_eq!(result.loss, 0.0);
        assert_eq!(result.r_squared, None);
    }

    #[test]
    fn greedy_mode_picks_one_rule_per_transition() {
        let signal = gen_sinusoid(3.0, 64).unwrap();
        let grid = GridConfig {
            sigma_values: vec![0.0],
            tau_values: vec![1, 2, 3],
            depth: 3,
            per_layer: true,
            use_abs: true,
        };
        let result = optimize_rules(&signal, &grid).unwrap();
        assert_eq!(result.rules.len(), 3);
        assert_eq!(result.trace.len(), 9);
        for entry in &result.trace {
            assert!(entry.transition.is_some());
        }
        // Greedy runs are reproducible.
        let again = optimize_rules(&signal, &grid).unwrap();
        assert_eq!(result, again);
    }

    #[test]
    fn depth_zero_needs_no_rules() {
        let signal = Signal::new((1..=8).map(f64::from).collect()).unwrap();
        let grid = GridConfig {
            sigma_values: vec![],
            tau_values: vec![],
            depth: 0,
            per_layer: false,
            use_abs: true,
        };
        let result = optimize_rules(&signal, &grid).unwrap();
        assert!(result.rules.is_empty());
        assert!(result.loss < 1e-18);
    }
}
