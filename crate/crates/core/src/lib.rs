//! Haar scattering cascades for dyadic signals.
//!
//! A cascade starts from a signal of length `2^d`, repeatedly pairs rows of
//! the current layer under a circular pairing rule, and stores the sum and
//! the absolute difference of each pair. Each transition halves the row count
//! and doubles the per-row feature count, so the total coefficient count is
//! conserved. The deepest layer feeds a linear readout that reconstructs the
//! signal on a coarse grid or regresses a generator parameter across a sweep
//! of realizations.
//!
//! The crate is `no_std` (with `alloc`); the default `std` feature only adds
//! `std::error::Error` for [`Error`]. All transcendental calls go through
//! `libm` so results are bit-identical with and without `std`.
//!
//! ```
//! use haarscatter::{propagate, Signal, PairingRule};
//!
//! let signal = Signal::new((1..=16).map(f64::from).collect()).unwrap();
//! let rule = PairingRule { sigma: 0.0, tau: 1 };
//! let network = propagate(&signal, &[rule], 2, true).unwrap();
//! assert_eq!(network.final_layer().rows(), 4);
//! assert_eq!(network.final_layer().cols(), 4);
//! ```

#![no_std]
#![deny(unsafe_code)]

extern crate alloc;

#[cfg(feature = "std")]
extern crate std;

pub mod error;
pub mod haar;
pub mod linalg;
pub mod optimize;
pub mod readout;
pub mod rng;
pub mod scattering;
pub mod signal;
pub mod signals;

pub use error::Error;
pub use haar::{haar_forward, haar_inverse, haar_step, HaarPyramid};
pub use linalg::{lstsq, solve_least_squares, LeastSquares, Matrix};
pub use optimize::{optimize_rules, reconstruction_loss, GridConfig, OptimizationResult, TraceEntry};
pub use readout::{
    fit_parameter_forward, fit_parameter_inverse, fit_reconstruction, interpolate,
    node_domain_position, predict_reconstruction, r_squared, FitReport, ParameterSweep,
    ReadoutKind, ReadoutModel, Transfer,
};
pub use rng::GaussianSource;
pub use scattering::{
    build_layer, pairing_indices, propagate, recover_max_min, scatter_pair, PairingRule,
    ScatteringLayer, ScatteringNetwork,
};
pub use signal::Signal;
pub use signals::{
    gen_ar1, gen_exponential, gen_logistic, gen_sinusoid, generate, is_stationary, sweep_family,
    Family, GeneratorSpec, InputKind, SweepOutcome,
};
