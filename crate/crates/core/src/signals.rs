//! Reference signal families: two deterministic curves and two noisy
//! recursions, all emitting validated dyadic-length signals.

use alloc::vec::Vec;

use crate::error::Error;
use crate::rng::GaussianSource;
use crate::signal::Signal;

const TWO_PI: f64 = 2.0 * core::f64::consts::PI;
/// Samples per period unit shared by the deterministic families.
pub const TIME_SCALE: f64 = 3600.0;

pub const DEFAULT_LENGTH: usize = 1024;
pub const DEFAULT_SEED: u64 = 42;
pub const LOGISTIC_BETA: f64 = 0.005;
pub const LOGISTIC_CAPACITY: f64 = 1000.0;
pub const LOGISTIC_INITIAL: f64 = 10.0;
pub const LOGISTIC_NOISE_SIGMA: f64 = 5.0;
pub const AR1_PHI: f64 = 0.5;
pub const AR1_NOISE_SIGMA: f64 = 0.1;

/// Exogenous input of the autoregressive family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputKind {
    /// No input; the recursion runs on noise alone.
    None,
    /// Unit input at every step.
    Step,
    /// Unit input at the first step only.
    Pulse,
}

/// Discriminant of [`GeneratorSpec`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Sinusoid,
    Exponential,
    Logistic,
    Ar1,
}

/// `sin(beta * 2 pi t / 3600)` for `t = 1..=length`.
///
/// # Errors
///
/// [`Error::InvalidParameter`] for non-finite `beta`; signal validation
/// errors for a non-dyadic `length`.
pub fn gen_sinusoid(beta: f64, length: usize) -> Result<Signal, Error> {
    if !beta.is_finite() {
        return Err(Error::InvalidParameter {
            name: "beta",
            value: beta,
        });
    }
    Signal::new(
        (1..=length)
            .map(|t| libm::sin(beta * TWO_PI * t as f64 / TIME_SCALE))
            .collect(),
    )
}

/// `exp(beta * t / 3600)` for `t = 1..=length`.
///
/// # Errors
///
/// [`Error::InvalidParameter`] for non-finite `beta`; signal validation
/// errors for a non-dyadic `length` or an overflowing growth rate.
pub fn gen_exponential(beta: f64, length: usize) -> Result<Signal, Error> {
    if !beta.is_finite() {
        return Err(Error::InvalidParameter {
            name: "beta",
            value: beta,
        });
    }
    Signal::new(
        (1..=length)
            .map(|t| libm::exp(beta * t as f64 / TIME_SCALE))
            .collect(),
    )
}

/// Noisy discrete logistic growth toward `capacity`.
///
/// The first sample is `initial`; each step adds
/// `(beta / capacity) * x * (capacity - x)` plus `noise_sigma` times a
/// standard normal draw from [`GaussianSource::new`]`(seed)`. Exactly one
/// draw is consumed per step when `noise_sigma > 0`, none otherwise, so
/// trajectories are reproducible from the seed alone.
///
/// # Errors
///
/// [`Error::InvalidParameter`] for a non-positive or non-finite `capacity`,
/// an `initial` outside `[0, capacity]`, a negative or non-finite
/// `noise_sigma`, or a non-finite `beta`; [`Error::NonFiniteSample`] with the
/// offending step index when the trajectory escapes to infinity, which large
/// rates or unlucky noise can cause; signal validation errors for a
/// non-dyadic `length`.
pub fn gen_logistic(
    beta: f64,
    capacity: f64,
    initial: f64,
    noise_sigma: f64,
    length: usize,
    seed: u64,
) -> Result<Signal, Error> {
    if !beta.is_finite() {
        return Err(Error::InvalidParameter {
            name: "beta",
            value: beta,
        });
    }
    if !capacity.is_finite() || capacity <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "capacity",
            value: capacity,
        });
    }
    if !initial.is_finite() || initial < 0.0 || initial > capacity {
        return Err(Error::InvalidParameter {
            name: "initial",
            value: initial,
        });
    }
    if !noise_sigma.is_finite() || noise_sigma < 0.0 {
        return Err(Error::InvalidParameter {
            name: "noise_sigma",
            value: noise_sigma,
        });
    }
    let mut source = GaussianSource::new(seed);
    let mut samples = Vec::with_capacity(length);
    let mut x = initial;
    samples.push(x);
    for index in 1..length {
        let mut next = x + (beta / capacity) * x * (capacity - x);
        if noise_sigma > 0.0 {
            next += noise_sigma * source.next_gaussian();
        }
        if !next.is_finite() {
            return Err(Error::NonFiniteSample { index });
        }
        x = next;
        samples.push(x);
    }
    Signal::new(samples)
}

/// First-order autoregression from a zero initial state.
///
/// Emits `x(t) = phi * x(t-1) + u(t) + noise` for `t = 1..=length`, where
/// `u` follows `input` and the noise term is `noise_sigma` times a standard
/// normal draw from [`GaussianSource::new`]`(seed)`, one draw per step when
/// `noise_sigma > 0`. `|phi| >= 1` is allowed; see [`is_stationary`].
///
/// # Errors
///
/// [`Error::InvalidParameter`] for non-finite `phi` or a negative or
/// non-finite `noise_sigma`; [`Error::NonFiniteSample`] if an explosive
/// recursion overflows; signal validation errors for a non-dyadic `length`.
pub fn gen_ar1(
    phi: f64,
    input: InputKind,
    noise_sigma: f64,
    length: usize,
    seed: u64,
) -> Result<Signal, Error> {
    if !phi.is_finite() {
        return Err(Error::InvalidParameter {
            name: "phi",
            value: phi,
        });
    }
    if !noise_sigma.is_finite() || noise_sigma < 0.0 {
        return Err(Error::InvalidParameter {
            name: "noise_sigma",
            value: noise_sigma,
        });
    }
    let mut source = GaussianSource::new(seed);
    let mut samples = Vec::with_capacity(length);
    let mut x = 0.0;
    for t in 1..=length {
        let u = match input {
            InputKind::None => 0.0,
            InputKind::Step => 1.0,
            InputKind::Pulse => {
                if t == 1 {
                    1.0
                } else {
                    0.0
                }
            }
        };
        let mut next = phi * x + u;
        if noise_sigma > 0.0 {
            next += noise_sigma * source.next_gaussian();
        }
        if !next.is_finite() {
            return Err(Error::NonFiniteSample { index: t - 1 });
        }
        x = next;
        samples.push(x);
    }
    Signal::new(samples)
}

/// Whether the autoregression with coefficient `phi` decays: `|phi| < 1`.
pub fn is_stationary(phi: f64) -> bool {
    libm::fabs(phi) < 1.0
}

/// A complete recipe for one signal: family, parameters, length, seed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GeneratorSpec {
    Sinusoid {
        beta: f64,
        length: usize,
    },
    Exponential {
        beta: f64,
        length: usize,
    },
    Logistic {
        beta: f64,
        capacity: f64,
        initial: f64,
        noise_sigma: f64,
        length: usize,
        seed: u64,
    },
    Ar1 {
        phi: f64,
        input: InputKind,
        noise_sigma: f64,
        length: usize,
        seed: u64,
    },
}

impl GeneratorSpec {
    pub fn family(&self) -> Family {
        match self {
            GeneratorSpec::Sinusoid { .. } => Family::Sinusoid,
            GeneratorSpec::Exponential { .. } => Family::Exponential,
            GeneratorSpec::Logistic { .. } => Family::Logistic,
            GeneratorSpec::Ar1 { .. } => Family::Ar1,
        }
    }

    pub fn length(&self) -> usize {
        match *self {
            GeneratorSpec::Sinusoid { length, .. }
            | GeneratorSpec::Exponential { length, .. }
            | GeneratorSpec::Logistic { length, .. }
            | GeneratorSpec::Ar1 { length, .. } => length,
        }
    }

    /// The swept parameter: growth rate for the first three families, the
    /// autoregressive coefficient for the fourth.
    pub fn theta(&self) -> f64 {
        match *self {
            GeneratorSpec::Sinusoid { beta, .. }
            | GeneratorSpec::Exponential { beta, .. }
            | GeneratorSpec::Logistic { beta, .. } => beta,
            GeneratorSpec::Ar1 { phi, .. } => phi,
        }
    }

    /// Copy with the swept parameter replaced.
    pub fn with_theta(&self, theta: f64) -> Self {
        let mut spec = *self;
        match &mut spec {
            GeneratorSpec::Sinusoid { beta, .. }
            | GeneratorSpec::Exponential { beta, .. }
            | GeneratorSpec::Logistic { beta, .. } => *beta = theta,
            GeneratorSpec::Ar1 { phi, .. } => *phi = theta,
        }
        spec
    }

    /// Copy with the seed replaced; identity for the noiseless families.
    pub fn with_seed(&self, new_seed: u64) -> Self {
        let mut spec = *self;
        match &mut spec {
            GeneratorSpec::Logistic { seed, .. } | GeneratorSpec::Ar1 { seed, .. } => {
                *seed = new_seed
            }
            _ => {}
        }
        spec
    }

    pub fn seed(&self) -> Option<u64> {
        match *self {
            GeneratorSpec::Logistic { seed, .. } | GeneratorSpec::Ar1 { seed, .. } => Some(seed),
            _ => None,
        }
    }

    /// Runs the recipe.
    ///
    /// # Errors
    ///
    /// As the family's generator function.
    pub fn generate(&self) -> Result<Signal, Error> {
        match *self {
            GeneratorSpec::Sinusoid { beta, length } => gen_sinusoid(beta, length),
            GeneratorSpec::Exponential { beta, length } => gen_exponential(beta, length),
            GeneratorSpec::Logistic {
                beta,
                capacity,
                initial,
                noise_sigma,
                length,
                seed,
            } => gen_logistic(beta, capacity, initial, noise_sigma, length, seed),
            GeneratorSpec::Ar1 {
                phi,
                input,
                noise_sigma,
                length,
                seed,
            } => gen_ar1(phi, input, noise_sigma, length, seed),
        }
    }
}

/// Convenience wrapper over [`GeneratorSpec::generate`].
///
/// # Errors
///
/// As the family's generator function.
pub fn generate(spec: &GeneratorSpec) -> Result<Signal, Error> {
    spec.generate()
}

/// Result of generating one realization per parameter value.
///
/// Parameter values whose realization escaped to infinity are dropped from
/// the sweep and listed in `dropped`; noisy recursions do that for some
/// seeds and the survivors are still a valid sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutcome {
    pub theta_values: Vec<f64>,
    pub realizations: Vec<Signal>,
    pub dropped: Vec<f64>,
}

/// Generates `spec` at each parameter value, seeding realization `i` with
/// `base_seed + i` so dropped values never shift the seeds of later ones.
///
/// # Errors
///
/// Generator errors other than trajectory escape propagate; escape drops the
/// parameter value instead.
pub fn sweep_family(
    spec: &GeneratorSpec,
    theta_values: &[f64],
    base_seed: u64,
) -> Result<SweepOutcome, Error> {
    let mut kept_thetas = Vec::with_capacity(theta_values.len());
    let mut realizations = Vec::with_capacity(theta_values.len());
    let mut dropped = Vec::new();
    for (i, &theta) in theta_values.iter().enumerate() {
        let one = spec.with_theta(theta).with_seed(base_seed + i as u64);
        match one.generate() {
            Ok(signal) => {
                kept_thetas.push(theta);
                realizations.push(signal);
            }
            Err(Error::NonFiniteSample { .. }) => dropped.push(theta),
            Err(e) => return Err(e),
        }
    }
    Ok(SweepOutcome {
        theta_values: kept_thetas,
        realizations,
        dropped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12 * (1.0 + b.abs())
    }

    #[test]
    fn sinusoid_hits_quarter_period() {
        let signal = gen_sinusoid(1.0, 1024).unwrap();
        // t = 900 is a quarter of the 3600-sample period.
        assert!(close(signal.samples()[899], 1.0));
        assert!(close(signal.samples()[0], libm::sin(TWO_PI / 3600.0)));
    }

    #[test]
    fn exponential_doubles_at_calibrated_rate() {
        let beta = TIME_SCALE * core::f64::consts::LN_2 / 1024.0;
        let signal = gen_exponential(beta, 1024).unwrap();
        assert!(close(signal.samples()[1023], 2.0));
    }

    #[test]
    fn logistic_fixed_points_are_constant() {
        let at_capacity = gen_logistic(0.005, 1000.0, 1000.0, 0.0, 64, 0).unwrap();
        assert!(at_capacity.samples().iter().all(|&x| x == 1000.0));
        let at_zero = gen_logistic(0.005, 1000.0, 0.0, 0.0, 64, 0).unwrap();
        assert!(at_zero.samples().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn noiseless_logistic_grows_toward_capacity() {
        let signal = gen_logistic(0.005, 1000.0, 10.0, 0.0, 1024, 0).unwrap();
        let samples = signal.samples();
        assert!(samples.windows(2).all(|w| w[1] > w[0]));
        assert!(samples[1023] > 600.0);
        assert!(samples[1023] < 1000.0);
    }

    #[test]
    fn runaway_logistic_reports_escape_index() {
        // Rate 4 overshoots below zero and then diverges monotonically.
        let err = gen_logistic(4.0, 1000.0, 10.0, 0.0, 1024, 0).unwrap_err();
        assert!(matches!(err, Error::NonFiniteSample { .. }));
    }

    #[test]
    fn logistic_validates_parameters() {
        assert!(matches!(
            gen_logistic(0.005, -1.0, 10.0, 0.0, 64, 0).unwrap_err(),
            Error::InvalidParameter { name: "capacity", .. }
        ));
        assert!(matches!(
            gen_logistic(0.005, 1000.0, 2000.0, 0.0, 64, 0).unwrap_err(),
            Error::InvalidParameter { name: "initial", .. }
        ));
        assert!(matches!(
            gen_logistic(0.005, 1000.0, 10.0, -1.0, 64, 0).unwrap_err(),
            Error::InvalidParameter { name: "noise_sigma", .. }
        ));
    }

    #[test]
    fn ar1_pulse_decays_geometrically() {
        let signal = gen_ar1(0.5, InputKind::Pulse, 0.0, 8, 0).unwrap();
        let expected = [1.0, 0.5, 0.25, 0.125, 0.0625, 0.03125, 0.015625, 0.0078125];
        for (x, e) in signal.samples().iter().zip(expected) {
            assert!(close(*x, e));
        }
    }

    #[test]
    fn ar1_step_approaches_the_geometric_sum() {
        let phi = 0.5f64;
        let signal = gen_ar1(phi, InputKind::Step, 0.0, 16, 0).unwrap();
        for (i, &x) in signal.samples().iter().enumerate() {
            let t = (i + 1) as i32;
            let expected = (1.0 - libm::pow(phi, f64::from(t))) / (1.0 - phi);
            assert!(close(x, expected));
        }
    }

    #[test]
    fn ar1_without_input_or_noise_stays_zero() {
        let signal = gen_ar1(0.9, InputKind::None, 0.0, 8, 0).unwrap();
        assert!(signal.samples().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn stationarity_boundary() {
        assert!(is_stationary(0.95));
        assert!(is_stationary(-0.95));
        assert!(!is_stationary(1.0));
        assert!(!is_stationary(-1.3));
    }

    #[test]
    fn noisy_generators_reproduce_from_seed() {
        let a = gen_logistic(0.005, 1000.0, 10.0, 5.0, 1024, 42).unwrap();
        let b = gen_logistic(0.005, 1000.0, 10.0, 5.0, 1024, 42).unwrap();
        assert_eq!(a, b);
        let c = gen_ar1(0.5, InputKind::Step, 0.1, 256, 9).unwrap();
        let d = gen_ar1(0.5, InputKind::Step, 0.1, 256, 9).unwrap();
        assert_eq!(c, d);
    }

    #[test]
    fn spec_round_trips_theta_and_seed() {
        let spec = GeneratorSpec::Ar1 {
            phi: 0.3,
            input: InputKind::Step,
            noise_sigma: 0.1,
            length: 64,
            seed: 5,
        };
        assert_eq!(spec.family(), Family::Ar1);
        assert_eq!(spec.theta(), 0.3);
        assert_eq!(spec.with_theta(0.7).theta(), 0.7);
        assert_eq!(spec.with_seed(11).seed(), Some(11));
        let fixed = GeneratorSpec::Sinusoid {
            beta: 2.0,
            length: 64,
        };
        assert_eq!(fixed.with_seed(11).seed(), None);
    }

    #[test]
    fn sweep_keeps_seed_alignment_when_dropping() {
        let spec = GeneratorSpec::Logistic {
            beta: 0.005,
            capacity: 1000.0,
            initial: 10.0,
            noise_sigma: 0.0,
            length: 64,
            seed: 0,
        };
        // Rate 4 escapes regardless of seed; the others survive.
        let outcome = sweep_family(&spec, &[0.004, 4.0, 0.006], 10).unwrap();
        assert_eq!(outcome.theta_values, vec![0.004, 0.006]);
        assert_eq!(outcome.dropped, vec![4.0]);
        // Survivor seeds stay tied to their index.
        let direct = gen_logistic(0.006, 1000.0, 10.0, 0.0, 64, 12).unwrap();
        assert_eq!(outcome.realizations[1], direct);
    }
}
