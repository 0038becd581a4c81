//! Orthonormal Haar transform on dyadic signals.

use alloc::vec::Vec;
use core::f64::consts::FRAC_1_SQRT_2;

use crate::error::Error;
use crate::signal::Signal;

/// Multi-level Haar decomposition.
///
/// `approx` holds the single coarsest approximation coefficient and
/// `details[level]` holds `2^level` detail coefficients, coarse to fine, so
/// `details[0]` has one entry and the last level has half the signal length.
#[derive(Debug, Clone, PartialEq)]
pub struct HaarPyramid {
    /// Coarsest approximation; exactly one coefficient for a full decomposition.
    pub approx: Vec<f64>,
    /// Detail coefficients per level, coarse to fine.
    pub details: Vec<Vec<f64>>,
}

impl HaarPyramid {
    /// Total number of stored coefficients; equals the original signal length.
    pub fn coefficient_count(&self) -> usize {
        self.approx.len() + self.details.iter().map(Vec::len).sum::<usize>()
    }

    /// Length of the signal this pyramid reconstructs to.
    pub fn signal_len(&self) -> usize {
        1usize << self.details.len()
    }
}

/// One analysis step: averages and differences of adjacent sample pairs,
/// scaled by `1/sqrt(2)` so the map is orthonormal.
///
/// Returns `(approx, detail)`, each half the input length.
///
/// # Errors
///
/// [`Error::OddLength`] if the input length is zero or odd.
pub fn haar_step(values: &[f64]) -> Result<(Vec<f64>, Vec<f64>), Error> {
    let len = values.len();
    if len == 0 || !len.is_multiple_of(2) {
        return Err(Error::OddLength { len });
    }
    let half = len / 2;
    let mut approx = Vec::with_capacity(half);
    let mut detail = Vec::with_capacity(half);
    for k in 0..half {
        let a = values[2 * k];
        let b = values[2 * k + 1];
        approx.push((a + b) * FRAC_1_SQRT_2);
        detail.push((a - b) * FRAC_1_SQRT_2);
    }
    Ok((approx, detail))
}

/// Full decomposition down to a single approximation coefficient.
pub fn haar_forward(signal: &Signal) -> HaarPyramid {
    let mut current = signal.samples().to_vec();
    let mut details_fine_to_coarse = Vec::with_capacity(signal.max_depth());
    while current.len() > 1 {
        // Length stays even throughout because the signal length is dyadic.
        let (approx, detail) = haar_step(&current).expect("dyadic length");
        details_fine_to_coarse.push(detail);
        current = approx;
    }
    details_fine_to_coarse.reverse();
    HaarPyramid {
        approx: current,
        details: details_fine_to_coarse,
    }
}

/// Inverts [`haar_forward`] exactly up to rounding.
///
/// # Errors
///
/// [`Error::MalformedPyramid`] if `approx` does not hold exactly one
/// coefficient or any detail level has the wrong length;
/// [`Error::NonFiniteSample`] if the coefficients synthesize to non-finite
/// samples; [`Error::NonDyadicLength`] for an empty detail list, since a
/// one-sample output is not a valid signal.
pub fn haar_inverse(pyramid: &HaarPyramid) -> Result<Signal, Error> {
    if pyramid.approx.len() != 1 {
        return Err(Error::MalformedPyramid {
            level: 0,
            expected: 1,
            actual: pyramid.approx.len(),
        });
    }
    let mut current = pyramid.approx.clone();
    for (level, detail) in pyramid.details.iter().enumerate() {
        if detail.len() != current.len() {
            return Err(Error::MalformedPyramid {
                level,
                expected: current.len(),
                actual: detail.len(),
            });
        }
        let mut next = Vec::with_capacity(current.len() * 2);
        for (a, d) in current.iter().zip(detail.iter()) {
            next.push((a + d) * FRAC_1_SQRT_2);
            next.push((a - d) * FRAC_1_SQRT_2);
        }
        current = next;
    }
    Signal::new(current)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    const SQRT_2: f64 = core::f64::consts::SQRT_2;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12 * (1.0 + b.abs())
    }

    #[test]
    fn step_on_constant_pair() {
        let (approx, detail) = haar_step(&[1.0, 1.0]).unwrap();
        assert!(close(approx[0], SQRT_2));
        assert_eq!(detail[0], 0.0);
    }

    #[test]
    fn step_on_ramp() {
        let (approx, detail) = haar_step(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert!(close(approx[0], 3.0 / SQRT_2));
        assert!(close(approx[1], 7.0 / SQRT_2));
        assert!(close(detail[0], -1.0 / SQRT_2));
        assert!(close(detail[1], -1.0 / SQRT_2));
    }

    #[test]
    fn step_rejects_odd_and_empty() {
        assert_eq!(haar_step(&[]).unwrap_err(), Error::OddLength { len: 0 });
        assert_eq!(
            haar_step(&[1.0, 2.0, 3.0]).unwrap_err(),
            Error::OddLength { len: 3 }
        );
    }

    #[test]
    fn forward_pyramid_of_ramp() {
        let signal = Signal::new(vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let pyramid = haar_forward(&signal);
        assert!(close(pyramid.approx[0], 5.0));
        assert_eq!(pyramid.details.len(), 2);
        assert!(close(pyramid.details[0][0], -2.0));
        assert!(close(pyramid.details[1][0], -1.0 / SQRT_2));
        assert!(close(pyramid.details[1][1], -1.0 / SQRT_2));
        assert_eq!(pyramid.coefficient_count(), 4);
        assert_eq!(pyramid.signal_len(), 4);
    }

    #[test]
    fn impulse_keeps_unit_norm() {
        let mut samples = vec![0.0; 64];
        samples[17] = 1.0;
        let pyramid = haar_forward(&Signal::new(samples).unwrap());
        let energy: f64 = pyramid.approx.iter().map(|c| c * c).sum::<f64>()
            + pyramid
                .details
                .iter()
                .flatten()
                .map(|c| c * c)
                .sum::<f64>();
        assert!(close(energy, 1.0));
    }

    #[test]
    fn inverse_rejects_malformed_levels() {
        let pyramid = HaarPyramid {
            approx: vec![1.0],
            details: vec![vec![0.0], vec![0.0, 0.0, 0.0]],
        };
        assert_eq!(
            haar_inverse(&pyramid).unwrap_err(),
            Error::MalformedPyramid {
                level: 1,
                expected: 2,
                actual: 3
            }
        );
        let pyramid = HaarPyramid {
            approx: vec![1.0, 2.0],
            details: vec![],
        };
        assert!(matches!(
            haar_inverse(&pyramid).unwrap_err(),
            Error::MalformedPyramid { .. }
        ));
    }

    #[test]
    fn round_trip_recovers_ramp() {
        let signal = Signal::new((1..=32).map(f64::from).collect()).unwrap();
        let back = haar_inverse(&haar_forward(&signal)).unwrap();
        for (x, y) in signal.samples().iter().zip(back.samples()) {
            assert!(close(*x, *y));
        }
    }
}
