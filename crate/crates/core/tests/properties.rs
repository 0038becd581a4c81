//! Property tests for the transform, cascade, and solver invariants.

use haarscatter::{
    build_layer, haar_forward, haar_inverse, haar_step, interpolate, lstsq, optimize_rules,
    propagate, r_squared, recover_max_min, scatter_pair, GridConfig, Matrix, PairingRule,
    ScatteringLayer, Signal,
};
use proptest::prelude::*;

fn dyadic_signal(max_depth: u32) -> impl Strategy<Value = Signal> {
    (1..=max_depth)
        .prop_flat_map(|d| prop::collection::vec(-100.0..100.0f64, 1usize << d))
        .prop_map(|samples| Signal::new(samples).expect("dyadic finite samples"))
}

fn feasible_rule() -> impl Strategy<Value = PairingRule> {
    // Shift-only rules with a small positive shift stay non-degenerate on
    // every layer with more than `tau` rows.
    (1i64..=3).prop_map(|tau| PairingRule { sigma: 0.0, tau })
}

fn frobenius_diff(a: &ScatteringLayer, b: &ScatteringLayer) -> f64 {
    a.values()
        .iter()
        .zip(b.values())
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

proptest! {
    #[test]
    fn haar_round_trip_recovers_the_signal(signal in dyadic_signal(8)) {
        let back = haar_inverse(&haar_forward(&signal)).unwrap();
        for (x, y) in signal.samples().iter().zip(back.samples()) {
            prop_assert!((x - y).abs() <= 1e-9 * (1.0 + x.abs()));
        }
    }

    #[test]
    fn haar_preserves_energy(signal in dyadic_signal(8)) {
        let pyramid = haar_forward(&signal);
        let signal_energy: f64 = signal.samples().iter().map(|x| x * x).sum();
        let pyramid_energy: f64 = pyramid.approx.iter().map(|c| c * c).sum::<f64>()
            + pyramid.details.iter().flatten().map(|c| c * c).sum::<f64>();
        prop_assert!((signal_energy - pyramid_energy).abs() <= 1e-9 * (1.0 + signal_energy));
    }

    #[test]
    fn haar_step_is_linear(
        xs in prop::collection::vec(-50.0..50.0f64, 8),
        ys in prop::collection::vec(-50.0..50.0f64, 8),
        a in -4.0..4.0f64,
    ) {
        let combined: Vec<f64> = xs.iter().zip(&ys).map(|(x, y)| a * x + y).collect();
        let (ca, cd) = haar_step(&combined).unwrap();
        let (xa, xd) = haar_step(&xs).unwrap();
        let (ya, yd) = haar_step(&ys).unwrap();
        for k in 0..4 {
            prop_assert!((ca[k] - (a * xa[k] + ya[k])).abs() <= 1e-9);
            prop_assert!((cd[k] - (a * xd[k] + yd[k])).abs() <= 1e-9);
        }
    }

    #[test]
    fn pair_recovery_is_exact_on_a_dyadic_grid(a in -33_554_432i32..33_554_432, b in -33_554_432i32..33_554_432) {
        // Values of the form k * 2^-26 with |k| < 2^25: sums and differences
        // are exactly representable, so recovery is bit-exact.
        let x = f64::from(a) / 67_108_864.0;
        let y = f64::from(b) / 67_108_864.0;
        let (sum, absdiff) = scatter_pair(x, y);
        let (hi, lo) = recover_max_min(sum, absdiff).unwrap();
        prop_assert_eq!(hi.to_bits(), x.max(y).to_bits());
        prop_assert_eq!(lo.to_bits(), x.min(y).to_bits());
    }

    #[test]
    fn pair_recovery_is_tight_for_arbitrary_values(x in -1e12..1e12f64, y in -1e12..1e12f64) {
        let (sum, absdiff) = scatter_pair(x, y);
        let (hi, lo) = recover_max_min(sum, absdiff).unwrap();
        let scale = x.abs().max(y.abs()).max(1.0);
        prop_assert!((hi - x.max(y)).abs() <= f64::EPSILON * scale);
        prop_assert!((lo - x.min(y)).abs() <= f64::EPSILON * scale);
    }

    #[test]
    fn rectified_differences_never_expand(
        u in -1e6..1e6f64,
        v in -1e6..1e6f64,
        u2 in -1e6..1e6f64,
        v2 in -1e6..1e6f64,
    ) {
        let d = ((u - v).abs() - (u2 - v2).abs()).abs();
        prop_assert!(d <= ((u - v) - (u2 - v2)).abs() * (1.0 + 1e-15));
    }

    #[test]
    fn cascade_contracts_per_normalized_level(
        pair in (1u32..=6).prop_flat_map(|d| {
            let n = 1usize << d;
            (
                prop::collection::vec(-100.0..100.0f64, n),
                prop::collection::vec(-100.0..100.0f64, n),
            )
        }),
        rule in feasible_rule(),
    ) {
        let (xs, ys) = pair;
        let x = Signal::new(xs).unwrap();
        let y = Signal::new(ys).unwrap();
        let depth = x.max_depth().min(3);
        if (0..depth).any(|j| rule.offset(j, x.len(), x.len() >> j).is_err()) {
            return Ok(());
        }
        let nx = propagate(&x, &[rule], depth, true).unwrap();
        let ny = propagate(&y, &[rule], depth, true).unwrap();
        // The unnormalized sum/difference map has norm sqrt(2); with an odd
        // offset every row feeds exactly one retained pair, so distances grow
        // by at most sqrt(2) per transition. An even offset feeds even rows
        // into two pairs, doubling the worst case.
        for j in 0..depth {
            let offset = rule.offset(j, x.len(), x.len() >> j).unwrap();
            let factor = if offset.is_multiple_of(2) {
                2.0
            } else {
                core::f64::consts::SQRT_2
            };
            let before = frobenius_diff(&nx.layers()[j], &ny.layers()[j]);
            let after = frobenius_diff(&nx.layers()[j + 1], &ny.layers()[j + 1]);
            prop_assert!(after <= factor * before * (1.0 + 1e-12) + 1e-12);
        }
    }

    #[test]
    fn layers_conserve_coefficients_and_rectify_odd_columns(
        signal in dyadic_signal(7),
        rule in feasible_rule(),
    ) {
        let depth = signal.max_depth().min(4);
        if (0..depth).any(|j| rule.offset(j, signal.len(), signal.len() >> j).is_err()) {
            return Ok(());
        }
        let network = propagate(&signal, &[rule], depth, true).unwrap();
        for (j, layer) in network.layers().iter().enumerate() {
            prop_assert_eq!(layer.rows() * layer.cols(), signal.len());
            prop_assert_eq!(layer.rows(), signal.len() >> j);
            if j > 0 {
                for n in 0..layer.rows() {
                    for q in 0..layer.cols() / 2 {
                        prop_assert!(layer.get(n, 2 * q + 1) >= 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn unrectified_cascade_scales_linearly(signal in dyadic_signal(6), rule in feasible_rule()) {
        let depth = signal.max_depth().min(3);
        if (0..depth).any(|j| rule.offset(j, signal.len(), signal.len() >> j).is_err()) {
            return Ok(());
        }
        let doubled =
            Signal::new(signal.samples().iter().map(|x| 2.0 * x).collect()).unwrap();
        let base = propagate(&signal, &[rule], depth, false).unwrap();
        let scaled = propagate(&doubled, &[rule], depth, false).unwrap();
        // Doubling is exact in binary floating point, so this holds bitwise.
        for (a, b) in base
            .final_layer()
            .values()
            .iter()
            .zip(scaled.final_layer().values())
        {
            prop_assert_eq!((2.0 * a).to_bits(), b.to_bits());
        }
    }

    #[test]
    fn shifting_by_the_layer_stride_rotates_nodes(signal in dyadic_signal(6)) {
        let depth = signal.max_depth().clamp(1, 2);
        let stride = 1usize << depth;
        if signal.len() < 2 * stride {
            return Ok(());
        }
        let n = signal.len();
        let rotated: Vec<f64> = (0..n).map(|i| signal.samples()[(i + n - stride) % n]).collect();
        let rule = PairingRule { sigma: 0.0, tau: 1 };
        let base = propagate(&signal, &[rule], depth, true).unwrap();
        let moved = propagate(&Signal::new(rotated).unwrap(), &[rule], depth, true).unwrap();
        let rows = base.final_layer().rows();
        for node in 0..rows {
            let target = (node + 1) % rows;
            for q in 0..base.final_layer().cols() {
                let a = base.final_layer().get(node, q);
                let b = moved.final_layer().get(target, q);
                prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
            }
        }
    }

    #[test]
    fn least_squares_minimizes_over_random_perturbations(
        rows in 4usize..10,
        seedling in prop::collection::vec(-5.0..5.0f64, 40),
        target_seed in prop::collection::vec(-5.0..5.0f64, 10),
        nudge in prop::collection::vec(-0.5..0.5f64, 3),
    ) {
        let cols = 3usize;
        let rows_data: Vec<Vec<f64>> = (0..rows)
            .map(|r| (0..cols).map(|c| seedling[(r * cols + c) % seedling.len()]).collect())
            .collect();
        let design = Matrix::from_rows(&rows_data).unwrap();
        let targets: Vec<f64> = (0..rows).map(|r| target_seed[r % target_seed.len()]).collect();
        let solution = lstsq(&design, &targets).unwrap();
        let residual = |beta: &[f64]| -> f64 {
            (0..rows)
                .map(|r| {
                    let pred: f64 = design.row(r).iter().zip(beta).map(|(a, b)| a * b).sum();
                    (targets[r] - pred) * (targets[r] - pred)
                })
                .sum()
        };
        let best = residual(&solution.coefficients);
        let perturbed: Vec<f64> = solution
            .coefficients
            .iter()
            .zip(&nudge)
            .map(|(b, n)| b + n)
            .collect();
        prop_assert!(best <= residual(&perturbed) * (1.0 + 1e-9) + 1e-9);
    }

    #[test]
    fn r_squared_never_exceeds_one(
        actual in prop::collection::vec(-10.0..10.0f64, 2..20),
        noise in prop::collection::vec(-1.0..1.0f64, 20),
    ) {
        let predicted: Vec<f64> = actual
            .iter()
            .enumerate()
            .map(|(i, y)| y + noise[i % noise.len()])
            .collect();
        match r_squared(&actual, &predicted) {
            Ok(r2) => prop_assert!(r2 <= 1.0 + 1e-12),
            Err(e) => prop_assert_eq!(e, haarscatter::Error::UndefinedVariance),
        }
    }

    #[test]
    fn interpolation_passes_through_node_values(
        values in prop::collection::vec(-100.0..100.0f64, 4),
    ) {
        let nodes: Vec<(usize, f64)> = values
            .iter()
            .enumerate()
            .map(|(i, &v)| (4 * i + 2, v))
            .collect();
        let filled = interpolate(&nodes, 16).unwrap();
        for &(position, value) in &nodes {
            prop_assert_eq!(filled.samples()[position - 1].to_bits(), value.to_bits());
        }
    }

    #[test]
    fn rule_search_is_deterministic(signal in dyadic_signal(5)) {
        let depth = signal.max_depth().min(2);
        let grid = GridConfig {
            sigma_values: vec![0.0, 0.125],
            tau_values: vec![1, 2, 3],
            depth,
            per_layer: false,
            use_abs: true,
        };
        let first = optimize_rules(&signal, &grid).unwrap();
        let second = optimize_rules(&signal, &grid).unwrap();
        prop_assert_eq!(first, second);
    }

    #[test]
    fn search_winner_beats_every_traced_candidate(signal in dyadic_signal(5)) {
        let depth = signal.max_depth().min(2);
        let grid = GridConfig {
            sigma_values: vec![0.0],
            tau_values: vec![1, 2, 3],
            depth,
            per_layer: false,
            use_abs: true,
        };
        let result = optimize_rules(&signal, &grid).unwrap();
        for entry in &result.trace {
            prop_assert!(result.loss <= entry.loss * (1.0 + 1e-12) + 1e-12);
        }
    }
}

#[test]
fn build_layer_and_propagate_agree() {
    let signal = Signal::new((1..=32).map(f64::from).collect()).unwrap();
    let rule = PairingRule { sigma: 0.0, tau: 2 };
    let network = propagate(&signal, &[rule], 3, true).unwrap();
    let mut layer = ScatteringLayer::from_signal(&signal);
    for j in 0..3 {
        layer = build_layer(&layer, &rule, true).unwrap();
        assert_eq!(layer, network.layers()[j + 1]);
    }
}
