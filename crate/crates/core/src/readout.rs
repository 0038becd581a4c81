//! Linear readouts over scattering features.
//!
//! Two readout families share the same fitting core: reconstruction readouts
//! regress coarse-grid signal samples on the rows of the deepest layer, and
//! parameter readouts regress a generator parameter (or a representative
//! sample) on averaged features across a sweep of realizations.

use alloc::vec::Vec;

use crate::error::Error;
use crate::linalg::{lstsq, Matrix};
use crate::scattering::{average_features, propagate, PairingRule, ScatteringNetwork};
use crate::signal::Signal;

/// Pointwise transfer applied to features before a parameter fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Transfer {
    /// Features used as-is.
    Identity,
    /// Absolute value.
    Abs,
    /// `ln(1 + |x|)`, a monotone compression for wide dynamic ranges.
    Log1p,
}

impl Transfer {
    pub fn apply(self, x: f64) -> f64 {
        match self {
            Transfer::Identity => x,
            Transfer::Abs => libm::fabs(x),
            Transfer::Log1p => libm::log1p(libm::fabs(x)),
        }
    }
}

/// What a readout model predicts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReadoutKind {
    /// Signal samples on the coarse node grid.
    Reconstruction,
    /// A representative sample from the parameter value's realization.
    ForwardParameter,
    /// The parameter value from averaged features.
    InverseParameter,
}

/// Fitted linear readout.
#[derive(Debug, Clone, PartialEq)]
pub struct ReadoutModel {
    /// One weight per feature column.
    pub beta: Vec<f64>,
    /// Constant term, present only when fitted with an intercept.
    pub intercept: Option<f64>,
    /// Cascade depth the features came from.
    pub depth: usize,
    pub kind: ReadoutKind,
    pub transfer: Transfer,
}

impl ReadoutModel {
    /// Applies the model to one raw feature row.
    ///
    /// # Errors
    ///
    /// [`Error::DimensionMismatch`] unless the row length matches the weights.
    pub fn predict_row(&self, features: &[f64]) -> Result<f64, Error> {
        if features.len() != self.beta.len() {
            return Err(Error::DimensionMismatch {
                what: "feature row length",
                expected: self.beta.len(),
                actual: features.len(),
            });
        }
        let mut acc = self.intercept.unwrap_or(0.0);
        for (w, &x) in self.beta.iter().zip(features) {
            acc += w * self.transfer.apply(x);
        }
        Ok(acc)
    }
}

/// Diagnostics from a readout fit.
#[derive(Debug, Clone, PartialEq)]
pub struct FitReport {
    /// In-sample coefficient of determination; `None` when the targets are
    /// constant and it is undefined.
    pub r_squared: Option<f64>,
    /// Fitted values, one per target.
    pub predictions: Vec<f64>,
    /// `target - prediction`, one per target.
    pub residuals: Vec<f64>,
    /// True when the design rank falls short of its column count, including
    /// every system with fewer rows than columns.
    pub rank_deficient: bool,
    /// Feature rows that are identically zero and so carry no information.
    pub zero_design_rows: usize,
}

/// Domain position covered by node `node` (1-based) of a depth-`depth` layer:
/// `(node - 1) * 2^depth + 1`.
///
/// Node 1 sits at position 1 for every depth; each further node advances by
/// the layer stride `2^depth`.
///
/// # Panics
///
/// If `node` is 0; nodes are numbered from 1.
pub fn node_domain_position(node: usize, depth: usize) -> usize {
    assert!(node >= 1, "nodes are numbered from 1");
    (node - 1) * (1usize << depth) + 1
}

/// Coefficient of determination of `predicted` against `actual`.
///
/// # Errors
///
/// [`Error::Empty`] for no data; [`Error::DimensionMismatch`] for unequal
/// lengths; [`Error::UndefinedVariance`] when `actual` is constant.
pub fn r_squared(actual: &[f64], predicted: &[f64]) -> Result<f64, Error> {
    if actual.is_empty() {
        return Err(Error::Empty { what: "targets" });
    }
    if actual.len() != predicted.len() {
        return Err(Error::DimensionMismatch {
            what: "prediction length",
            expected: actual.len(),
            actual: predicted.len(),
        });
    }
    let mean = actual.iter().sum::<f64>() / actual.len() as f64;
    let ss_tot: f64 = actual.iter().map(|&y| (y - mean) * (y - mean)).sum();
    if ss_tot == 0.0 {
        return Err(Error::UndefinedVariance);
    }
    let ss_res: f64 = actual
        .iter()
        .zip(predicted)
        .map(|(&y, &p)| (y - p) * (y - p))
        .sum();
    Ok(1.0 - ss_res / ss_tot)
}

/// Shared fitting core. `features` is the raw (pre-intercept) design; the
/// transfer must already be applied by the caller.
fn fit_linear(
    features: &Matrix,
    targets: &[f64],
    intercept: bool,
    depth: usize,
    kind: ReadoutKind,
    transfer: Transfer,
) -> Result<(ReadoutModel, FitReport), Error> {
    let zero_design_rows = (0..features.rows())
        .filter(|&r| features.row(r).iter().all(|&x| x == 0.0))
        .count();
    let design = if intercept {
        features.with_ones_column()
    } else {
        features.clone()
    };
    let solution = lstsq(&design, targets)?;
    let rank_deficient = solution.rank < design.cols();
    let predictions = design.mul_vec(&solution.coefficients)?;
    let residuals: Vec<f64> = targets
        .iter()
        .zip(&predictions)
        .map(|(&y, &p)| y - p)
        .collect();
    let r2 = match r_squared(targets, &predictions) {
        Ok(v) => Some(v),
        Err(Error::UndefinedVariance) => None,
        Err(e) => return Err(e),
    };
    let mut beta = solution.coefficients;
    let intercept_value = if intercept { beta.pop() } else { None };
    Ok((
        ReadoutModel {
            beta,
            intercept: intercept_value,
            depth,
            kind,
            transfer,
        },
        FitReport {
            r_squared: r2,
            predictions,
            residuals,
            rank_deficient,
            zero_design_rows,
        },
    ))
}

/// Fits coarse-grid samples of `signal` on the rows of the deepest layer of
/// `network`.
///
/// Row `n` (0-based) of the deepest layer predicts the sample at
/// [`node_domain_position`]`(n + 1, depth)`. With a square or overdetermined
/// full-rank design this interpolates or approximates the signal on the
/// stride-`2^depth` grid.
///
/// # Errors
///
/// [`Error::SignalNetworkMismatch`] unless the network's layer 0 equals the
/// signal; solver errors as in [`lstsq`].
pub fn fit_reconstruction(
    network: &ScatteringNetwork,
    signal: &Signal,
    intercept: bool,
) -> Result<(ReadoutModel, FitReport), Error> {
    if network.layers()[0].values() != signal.samples() {
        return Err(Error::SignalNetworkMismatch);
    }
    let deepest = network.final_layer();
    let depth = network.depth();
    let mut feature_rows = Vec::with_capacity(deepest.rows());
    let mut targets = Vec::with_capacity(deepest.rows());
    for n in 0..deepest.rows() {
        feature_rows.push(deepest.row(n).to_vec());
        let position = node_domain_position(n + 1, depth);
        targets.push(signal.samples()[position - 1]);
    }
    let features = Matrix::from_rows(&feature_rows)?;
    fit_linear(
        &features,
        &targets,
        intercept,
        depth,
        ReadoutKind::Reconstruction,
        Transfer::Identity,
    )
}

/// Evaluates a reconstruction model on a network, returning
/// `(domain position, predicted sample)` per node.
///
/// # Errors
///
/// [`Error::DimensionMismatch`] if the model depth or feature count does not
/// match the network.
pub fn predict_reconstruction(
    model: &ReadoutModel,
    network: &ScatteringNetwork,
) -> Result<Vec<(usize, f64)>, Error> {
    if model.depth != network.depth() {
        return Err(Error::DimensionMismatch {
            what: "model depth",
            expected: model.depth,
            actual: network.depth(),
        });
    }
    let deepest = network.final_layer();
    let mut out = Vec::with_capacity(deepest.rows());
    for n in 0..deepest.rows() {
        let value = model.predict_row(deepest.row(n))?;
        out.push((node_domain_position(n + 1, model.depth), value));
    }
    Ok(out)
}

/// Fills a full-length signal from sparse `(position, value)` nodes by
/// piecewise-linear interpolation, holding the end values constant outside
/// the covered range.
///
/// # Errors
///
/// [`Error::Empty`] for no nodes; [`Error::NonMonotonicPositions`] unless
/// positions strictly increase; [`Error::PositionOutOfRange`] for positions
/// outside `1..=length`; signal validation errors for a non-dyadic `length`
/// or non-finite node values.
pub fn interpolate(nodes: &[(usize, f64)], length: usize) -> Result<Signal, Error> {
    if nodes.is_empty() {
        return Err(Error::Empty {
            what: "node predictions",
        });
    }
    for (index, window) in nodes.windows(2).enumerate() {
        if window[1].0 <= window[0].0 {
            return Err(Error::NonMonotonicPositions { index: index + 1 });
        }
    }
    for &(position, _) in nodes {
        if position < 1 || position > length {
            return Err(Error::PositionOutOfRange { position, length });
        }
    }
    let mut samples = Vec::with_capacity(length);
    let mut segment = 0usize;
    for t in 1..=length {
        if t <= nodes[0].0 {
            samples.push(nodes[0].1);
            continue;
        }
        if t >= nodes[nodes.len() - 1].0 {
            samples.push(nodes[nodes.len() - 1].1);
            continue;
        }
        while nodes[segment + 1].0 < t {
            segment += 1;
        }
        let (p0, v0) = nodes[segment];
        let (p1, v1) = nodes[segment + 1];
        if t == p1 {
            // Exact pass-through at node positions.
            samples.push(v1);
        } else {
            let frac = (t - p0) as f64 / (p1 - p0) as f64;
            samples.push(v0 + (v1 - v0) * frac);
        }
    }
    Signal::new(samples)
}

/// A family of realizations indexed by a scalar parameter, with averaged
/// scattering features per realization.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterSweep {
    theta_values: Vec<f64>,
    realizations: Vec<Signal>,
    averaged_features: Matrix,
    depth: usize,
    use_abs: bool,
    rules: Vec<PairingRule>,
}

impl ParameterSweep {
    /// Propagates every realization to `depth` under `rules` and stores the
    /// column means of each deepest layer as one feature row.
    ///
    /// # Errors
    ///
    /// [`Error::Empty`] for an empty sweep; [`Error::DimensionMismatch`] if
    /// counts or realization lengths disagree;
    /// [`Error::NonMonotonicThetas`] unless the parameter values strictly
    /// increase or strictly decrease; [`Error::InvalidParameter`] for
    /// non-finite parameter values; cascade errors as in
    /// [`propagate`].
    pub fn build(
        theta_values: Vec<f64>,
        realizations: Vec<Signal>,
        rules: &[PairingRule],
        depth: usize,
        use_abs: bool,
    ) -> Result<Self, Error> {
        if theta_values.is_empty() {
            return Err(Error::Empty {
                what: "parameter sweep",
            });
        }
        if theta_values.len() != realizations.len() {
            return Err(Error::DimensionMismatch {
                what: "realization count",
                expected: theta_values.len(),
                actual: realizations.len(),
            });
        }
        for &theta in &theta_values {
            if !theta.is_finite() {
                return Err(Error::InvalidParameter {
                    name: "theta",
                    value: theta,
                });
            }
        }
        let increasing = theta_values.len() < 2 || theta_values[1] > theta_values[0];
        for (index, window) in theta_values.windows(2).enumerate() {
            let ordered = if increasing {
                window[1] > window[0]
            } else {
                window[1] < window[0]
            };
            if !ordered {
                return Err(Error::NonMonotonicThetas { index: index + 1 });
            }
        }
        let len = realizations[0].len();
        for realization in &realizations {
            if realization.len() != len {
                return Err(Error::DimensionMismatch {
                    what: "realization length",
                    expected: len,
                    actual: realization.len(),
                });
            }
        }
        let mut feature_rows = Vec::with_capacity(realizations.len());
        let mut stored_rules = Vec::new();
        for realization in &realizations {
            let network = propagate(realization, rules, depth, use_abs)?;
            if stored_rules.is_empty() {
                stored_rules = network.rules().to_vec();
            }
            feature_rows.push(average_features(network.final_layer()));
        }
        let averaged_features = Matrix::from_rows(&feature_rows)?;
        Ok(ParameterSweep {
            theta_values,
            realizations,
            averaged_features,
            depth,
            use_abs,
            rules: stored_rules,
        })
    }

    pub fn theta_values(&self) -> &[f64] {
        &self.theta_values
    }

    pub fn realizations(&self) -> &[Signal] {
        &self.realizations
    }

    /// One row of averaged deepest-layer features per realization.
    pub fn averaged_features(&self) -> &Matrix {
        &self.averaged_features
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn use_abs(&self) -> bool {
        self.use_abs
    }

    /// Expanded rules the features were built with.
    pub fn rules(&self) -> &[PairingRule] {
        &self.rules
    }

    /// Number of `(theta, realization)` pairs.
    pub fn len(&self) -> usize {
        self.theta_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta_values.is_empty()
    }

    fn transferred_features(&self, transfer: Transfer) -> Matrix {
        let mut out = Matrix::zeros(self.averaged_features.rows(), self.averaged_features.cols());
        for r in 0..out.rows() {
            for c in 0..out.cols() {
                out.set(r, c, transfer.apply(self.averaged_features.get(r, c)));
            }
        }
        out
    }
}

/// Fits the midpoint sample of each realization on its transferred features:
/// the forward map from features to observable state.
///
/// # Errors
///
/// Solver errors as in [`lstsq`].
pub fn fit_parameter_forward(
    sweep: &ParameterSweep,
    transfer: Transfer,
    intercept: bool,
) -> Result<(ReadoutModel, FitReport), Error> {
    let features = sweep.transferred_features(transfer);
    let targets: Vec<f64> = sweep
        .realizations()
        .iter()
        .map(|r| r.samples()[r.len() / 2 - 1])
        .collect();
    fit_linear(
        &features,
        &targets,
        intercept,
        sweep.depth(),
        ReadoutKind::ForwardParameter,
        transfer,
    )
}

/// Fits the parameter values on the transferred features: the inverse map
/// that identifies the parameter from observed features.
///
/// # Errors
///
/// Solver errors as in [`lstsq`].
pub fn fit_parameter_inverse(
    sweep: &ParameterSweep,
    transfer: Transfer,
    intercept: bool,
) -> Result<(ReadoutModel, FitReport), Error> {
    let features = sweep.transferred_features(transfer);
    fit_linear(
        &features,
        sweep.theta_values(),
        intercept,
        sweep.depth(),
        ReadoutKind::InverseParameter,
        transfer,
    )
}
