//! Scattering layers: circular pairing, sum/difference propagation.

use alloc::vec::Vec;

use crate::error::Error;
use crate::signal::Signal;

/// Sum and absolute difference of a pair: `(a + b, |a - b|)`.
///
/// The pair is recoverable up to order, see [`recover_max_min`].
pub fn scatter_pair(a: f64, b: f64) -> (f64, f64) {
    (a + b, (a - b).abs())
}

/// Recovers `(max, min)` of the pair that produced `(sum, absdiff)`.
///
/// # Errors
///
/// [`Error::NonFiniteValue`] for NaN or infinite inputs;
/// [`Error::NegativeAbsDiff`] if `absdiff` is negative, since no pair
/// produces one.
pub fn recover_max_min(sum: f64, absdiff: f64) -> Result<(f64, f64), Error> {
    if !sum.is_finite() {
        return Err(Error::NonFiniteValue { what: "sum" });
    }
    if !absdiff.is_finite() {
        return Err(Error::NonFiniteValue { what: "absdiff" });
    }
    if absdiff < 0.0 {
        return Err(Error::NegativeAbsDiff { value: absdiff });
    }
    Ok(((sum + absdiff) / 2.0, (sum - absdiff) / 2.0))
}

/// Circular pairing rule.
///
/// At layer `j` of a cascade over a length-`N` signal the rule turns into a
/// row offset: `round(2^(1-j) * N * sigma) + tau`, rounded half away from
/// zero, reduced modulo the row count. `sigma` scales with layer resolution;
/// `tau` is a fixed shift.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairingRule {
    pub sigma: f64,
    pub tau: i64,
}

impl PairingRule {
    /// Resolved row offset at layer `depth_index` of a cascade over
    /// `signal_len` samples, reduced modulo `row_count`.
    ///
    /// # Errors
    ///
    /// [`Error::DegenerateRule`] if the offset reduces to 0, which would pair
    /// every row with itself; [`Error::NonFiniteValue`] for a non-finite
    /// `sigma`; [`Error::Empty`] for zero rows.
    pub fn offset(
        &self,
        depth_index: usize,
        signal_len: usize,
        row_count: usize,
    ) -> Result<usize, Error> {
        if row_count == 0 {
            return Err(Error::Empty { what: "layer rows" });
        }
        if !self.sigma.is_finite() {
            return Err(Error::NonFiniteValue { what: "sigma" });
        }
        // 2^(1-j) as an exact power-of-two scale; j < 64 because a layer at
        // depth j still has at least two rows.
        let scale = 2.0 / (1u64 << depth_index) as f64;
        let raw = libm::round(scale * signal_len as f64 * self.sigma);
        if !raw.is_finite() {
            return Err(Error::NonFiniteValue { what: "scaled sigma" });
        }
        let shifted = raw as i128 + i128::from(self.tau);
        let offset = shifted.rem_euclid(row_count as i128) as usize;
        if offset == 0 {
            return Err(Error::DegenerateRule {
                sigma: self.sigma,
                tau: self.tau,
                rows: row_count,
            });
        }
        Ok(offset)
    }
}

/// The full circular pair list `(n, (n + offset) mod row_count)` for every
/// row `n`.
///
/// # Errors
///
/// Same as [`PairingRule::offset`].
pub fn pairing_indices(
    rule: &PairingRule,
    depth_index: usize,
    signal_len: usize,
    row_count: usize,
) -> Result<Vec<(usize, usize)>, Error> {
    let offset = rule.offset(depth_index, signal_len, row_count)?;
    Ok((0..row_count)
        .map(|n| (n, (n + offset) % row_count))
        .collect())
}

/// One layer of a scattering cascade: `rows` nodes with `cols` features each,
/// stored row-major.
///
/// Layer 0 is the signal itself, one feature per node. Each transition halves
/// `rows` and doubles `cols`, so `rows * cols` stays equal to the signal
/// length. Node `n` of the layer at depth `j` summarizes the signal around
/// position `2^j * n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScatteringLayer {
    values: Vec<f64>,
    rows: usize,
    cols: usize,
    depth_index: usize,
}

impl ScatteringLayer {
    /// Layer 0 of a cascade: one row per sample, a single feature column.
    pub fn from_signal(signal: &Signal) -> Self {
        ScatteringLayer {
            values: signal.samples().to_vec(),
            rows: signal.len(),
            cols: 1,
            depth_index: 0,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Depth of this layer in its cascade; 0 for the raw signal.
    pub fn depth_index(&self) -> usize {
        self.depth_index
    }

    /// All values, row-major.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Feature row of node `n`.
    pub fn row(&self, n: usize) -> &[f64] {
        &self.values[n * self.cols..(n + 1) * self.cols]
    }

    /// Feature `q` of node `n`.
    pub fn get(&self, n: usize, q: usize) -> f64 {
        self.values[n * self.cols + q]
    }

    /// Mean of each feature column across nodes.
    pub fn column_means(&self) -> Vec<f64> {
        let mut means = alloc::vec![0.0; self.cols];
        for n in 0..self.rows {
            for (mean, &v) in means.iter_mut().zip(self.row(n)) {
                *mean += v;
            }
        }
        let scale = 1.0 / self.rows as f64;
        for mean in &mut means {
            *mean *= scale;
        }
        means
    }
}

/// Propagates one transition: pairs rows of `prev` under `rule` and stores,
/// for each retained pair, the interleaved sums and differences.
///
/// Row `n` of the output pairs rows `2n` and `(2n + offset) mod rows` of
/// `prev`, keeping every other entry of the circular pair list so the output
/// row count halves while node `n` stays anchored near signal position
/// `2^(j+1) * n`. Feature `2q` is the pair sum of feature `q`; feature
/// `2q + 1` is the absolute difference, or the signed difference when
/// `use_abs` is false.
///
/// # Errors
///
/// [`Error::OddLength`] unless `prev` has a positive even row count; rule
/// resolution errors as in [`PairingRule::offset`].
pub fn build_layer(
    prev: &ScatteringLayer,
    rule: &PairingRule,
    use_abs: bool,
) -> Result<ScatteringLayer, Error> {
    let rows = prev.rows;
    if rows < 2 || !rows.is_multiple_of(2) {
        return Err(Error::OddLength { len: rows });
    }
    let signal_len = rows * prev.cols;
    let offset = rule.offset(prev.depth_index, signal_len, rows)?;
    let out_rows = rows / 2;
    let out_cols = prev.cols * 2;
    let mut values = Vec::with_capacity(rows * prev.cols);
    for n in 0..out_rows {
        let a = prev.row(2 * n);
        let b = prev.row((2 * n + offset) % rows);
        for (&x, &y) in a.iter().zip(b) {
            values.push(x + y);
            values.push(if use_abs { (x - y).abs() } else { x - y });
        }
    }
    Ok(ScatteringLayer {
        values,
        rows: out_rows,
        cols: out_cols,
        depth_index: prev.depth_index + 1,
    })
}

/// A propagated cascade: every layer from the raw signal down to the
/// requested depth, plus the rules that produced the transitions.
#[derive(Debug, Clone, PartialEq)]
pub struct ScatteringNetwork {
    layers: Vec<ScatteringLayer>,
    rules: Vec<PairingRule>,
    use_abs: bool,
}

impl ScatteringNetwork {
    /// Number of transitions; the deepest layer has `depth_index` equal to this.
    pub fn depth(&self) -> usize {
        self.layers.len() - 1
    }

    /// All layers, depth 0 first.
    pub fn layers(&self) -> &[ScatteringLayer] {
        &self.layers
    }

    /// The deepest layer.
    pub fn final_layer(&self) -> &ScatteringLayer {
        self.layers.last().expect("at least layer 0")
    }

    /// One rule per transition, broadcast already expanded.
    pub fn rules(&self) -> &[PairingRule] {
        &self.rules
    }

    /// Whether differences were rectified.
    pub fn use_abs(&self) -> bool {
        self.use_abs
    }

    /// Length of the signal the cascade was built from.
    pub fn input_len(&self) -> usize {
        self.layers[0].rows
    }
}

/// Builds the full cascade of `depth` transitions over `signal`.
///
/// `rules` either holds one rule per transition or a single rule broadcast to
/// all of them. `depth` 0 is allowed and yields just layer 0.
///
/// # Errors
///
/// [`Error::DepthTooLarge`] if `2^depth` exceeds the signal length;
/// [`Error::RuleCountMismatch`] unless `rules.len()` is 1 or `depth` (0 also
/// accepted at depth 0); per-transition errors as in [`build_layer`].
pub fn propagate(
    signal: &Signal,
    rules: &[PairingRule],
    depth: usize,
    use_abs: bool,
) -> Result<ScatteringNetwork, Error> {
    let max = signal.max_depth();
    if depth > max {
        return Err(Error::DepthTooLarge { depth, max });
    }
    let expanded: Vec<PairingRule> = if rules.len() == depth {
        rules.to_vec()
    } else if rules.len() == 1 {
        alloc::vec![rules[0]; depth]
    } else {
        return Err(Error::RuleCountMismatch {
            rules: rules.len(),
            depth,
        });
    };
    let mut layers = Vec::with_capacity(depth + 1);
    layers.push(ScatteringLayer::from_signal(signal));
    for rule in &expanded {
        let next = build_layer(layers.last().expect("layer 0 pushed"), rule, use_abs)?;
        layers.push(next);
    }
    Ok(ScatteringNetwork {
        layers,
        rules: expanded,
        use_abs,
    })
}

/// Mean of each feature column of a layer, the order-invariant summary used
/// by parameter readouts.
pub fn average_features(layer: &ScatteringLayer) -> Vec<f64> {
    layer.column_means()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn scatter_pair_examples() {
        assert_eq!(scatter_pair(3.0, 1.0), (4.0, 2.0));
        assert_eq!(scatter_pair(-2.0, 5.0), (3.0, 7.0));
    }

    #[test]
    fn recover_inverts_scatter() {
        assert_eq!(recover_max_min(3.0, 7.0).unwrap(), (5.0, -2.0));
        let (sum, absdiff) = scatter_pair(-2.0, 5.0);
        let (hi, lo) = recover_max_min(sum, absdiff).unwrap();
        assert_eq!((hi, lo), (5.0, -2.0));
    }

    #[test]
    fn recover_rejects_bad_inputs() {
        assert_eq!(
            recover_max_min(1.0, -0.5).unwrap_err(),
            Error::NegativeAbsDiff { value: -0.5 }
        );
        assert!(matches!(
            recover_max_min(f64::NAN, 1.0).unwrap_err(),
            Error::NonFiniteValue { .. }
        ));
    }

    #[test]
    fn offset_scales_sigma_by_layer_resolution() {
        let rule = PairingRule {
            sigma: 0.25,
            tau: 0,
        };
        assert_eq!(rule.offset(1, 16, 8).unwrap(), 4);
    }

    #[test]
    fn offset_zero_is_degenerate() {
        let rule = PairingRule { sigma: 0.5, tau: 0 };
        assert_eq!(
            rule.offset(0, 8, 8).unwrap_err(),
            Error::DegenerateRule {
                sigma: 0.5,
                tau: 0,
                rows: 8
            }
        );
    }

    #[test]
    fn offset_rounds_half_away_from_zero() {
        // 2 * 16 * sigma = 2.5 and -2.5.
        let up = PairingRule {
            sigma: 2.5 / 32.0,
            tau: 0,
        };
        assert_eq!(up.offset(0, 16, 16).unwrap(), 3);
        let down = PairingRule {
            sigma: -2.5 / 32.0,
            tau: 0,
        };
        // -3 mod 16.
        assert_eq!(down.offset(0, 16, 16).unwrap(), 13);
    }

    #[test]
    fn offset_wraps_negative_tau() {
        let rule = PairingRule { sigma: 0.0, tau: -3 };
        assert_eq!(rule.offset(0, 8, 8).unwrap(), 5);
    }

    #[test]
    fn pairing_indices_lists_every_row() {
        let rule = PairingRule {
            sigma: 0.25,
            tau: 0,
        };
        let pairs = pairing_indices(&rule, 1, 16, 8).unwrap();
        assert_eq!(
            pairs,
            vec![
                (0, 4),
                (1, 5),
                (2, 6),
                (3, 7),
                (4, 0),
                (5, 1),
                (6, 2),
                (7, 3)
            ]
        );
    }

    #[test]
    fn build_layer_interleaves_sums_and_differences() {
        let signal = Signal::new(vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let layer0 = ScatteringLayer::from_signal(&signal);
        let rule = PairingRule { sigma: 0.0, tau: 1 };
        let layer1 = build_layer(&layer0, &rule, true).unwrap();
        assert_eq!(layer1.rows(), 2);
        assert_eq!(layer1.cols(), 2);
        assert_eq!(layer1.row(0), &[3.0, 1.0]);
        assert_eq!(layer1.row(1), &[7.0, 1.0]);
    }

    #[test]
    fn build_layer_wraps_around_the_last_row() {
        let signal = Signal::new(vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let layer0 = ScatteringLayer::from_signal(&signal);
        let rule = PairingRule { sigma: 0.0, tau: 3 };
        let layer1 = build_layer(&layer0, &rule, true).unwrap();
        // Node 0 pairs rows 0 and 3, node 1 pairs rows 2 and 1.
        assert_eq!(layer1.row(0), &[5.0, 3.0]);
        assert_eq!(layer1.row(1), &[5.0, 1.0]);
    }

    #[test]
    fn signed_differences_when_abs_disabled() {
        let signal = Signal::new(vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let layer0 = ScatteringLayer::from_signal(&signal);
        let rule = PairingRule { sigma: 0.0, tau: 1 };
        let layer1 = build_layer(&layer0, &rule, false).unwrap();
        assert_eq!(layer1.row(0), &[3.0, -1.0]);
        assert_eq!(layer1.row(1), &[7.0, -1.0]);
    }

    #[test]
    fn propagate_conserves_coefficient_count() {
        let signal = Signal::new((1..=64).map(f64::from).collect()).unwrap();
        let rule = PairingRule { sigma: 0.0, tau: 1 };
        let network = propagate(&signal, &[rule], 4, true).unwrap();
        assert_eq!(network.depth(), 4);
        for (j, layer) in network.layers().iter().enumerate() {
            assert_eq!(layer.depth_index(), j);
            assert_eq!(layer.rows() * layer.cols(), 64);
            assert_eq!(layer.rows(), 64 >> j);
        }
        assert_eq!(network.rules().len(), 4);
    }

    #[test]
    fn propagate_rejects_excess_depth_and_bad_rule_counts() {
        let signal = Signal::new(vec![0.0; 16]).unwrap();
        let rule = PairingRule { sigma: 0.0, tau: 1 };
        assert_eq!(
            propagate(&signal, &[rule], 5, true).unwrap_err(),
            Error::DepthTooLarge { depth: 5, max: 4 }
        );
        assert_eq!(
            propagate(&signal, &[rule, rule], 3, true).unwrap_err(),
            Error::RuleCountMismatch { rules: 2, depth: 3 }
        );
    }

    #[test]
    fn propagate_depth_zero_is_the_signal() {
        let signal = Signal::new(vec![2.0, 4.0]).unwrap();
        let network = propagate(&signal, &[], 0, true).unwrap();
        assert_eq!(network.depth(), 0);
        assert_eq!(network.final_layer().values(), signal.samples());
    }

    #[test]
    fn column_means_average_over_nodes() {
        let signal = Signal::new(vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let rule = PairingRule { sigma: 0.0, tau: 1 };
        let network = propagate(&signal, &[rule], 1, true).unwrap();
        assert_eq!(average_features(network.final_layer()), vec![5.0, 1.0]);
    }
}
