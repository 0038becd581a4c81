//! Validated dyadic-length signals.

use alloc::vec::Vec;

use crate::error::Error;

/// A finite real signal whose length is a power of two, at least 2.
///
/// Every cascade and transform in this crate assumes both properties, so they
/// are checked once at construction and never again.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    samples: Vec<f64>,
}

impl Signal {
    /// Wraps `samples` after validating length and finiteness.
    ///
    /// # Errors
    ///
    /// [`Error::NonDyadicLength`] unless the length is a power of two and at
    /// least 2; [`Error::NonFiniteSample`] on the first NaN or infinity.
    pub fn new(samples: Vec<f64>) -> Result<Self, Error> {
        let len = samples.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::NonDyadicLength { len });
        }
        for (index, &x) in samples.iter().enumerate() {
            if !x.is_finite() {
                return Err(Error::NonFiniteSample { index });
            }
        }
        Ok(Signal { samples })
    }

    /// Sample values in order.
    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    /// Number of samples; always a power of two.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    /// Base-2 logarithm of the length: the deepest cascade this signal supports.
    pub fn max_depth(&self) -> usize {
        self.samples.len().trailing_zeros() as usize
    }

    /// Consumes the signal and returns the raw samples.
    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn accepts_dyadic_lengths() {
        for d in 1..=12 {
            let n = 1usize << d;
            let s = Signal::new(vec![0.5; n]).unwrap();
            assert_eq!(s.len(), n);
            assert_eq!(s.max_depth(), d);
        }
    }

    #[test]
    fn rejects_non_dyadic_lengths() {
        for len in [0usize, 1, 3, 6, 12, 100, 1000] {
            let err = Signal::new(vec![1.0; len]).unwrap_err();
            assert_eq!(err, Error::NonDyadicLength { len });
        }
    }

    #[test]
    fn rejects_non_finite_samples() {
        let err = Signal::new(vec![1.0, f64::NAN, 2.0, 3.0]).unwrap_err();
        assert_eq!(err, Error::NonFiniteSample { index: 1 });
        let err = Signal::new(vec![1.0, 2.0, f64::INFINITY, 3.0]).unwrap_err();
        assert_eq!(err, Error::NonFiniteSample { index: 2 });
    }
}
