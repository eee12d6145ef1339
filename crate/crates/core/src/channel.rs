//! Binary symmetric channel parameters and the confidence target shared by
//! every algorithm.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest admissible target error probability (exclusive).
pub const DELTA_LIMIT: f64 = 0.49;

/// Crossover probability of a binary symmetric channel, `0 <= p < 1/2`.
///
/// `p = 0` is the noiseless channel. Every algorithm accepts it; the
/// variable-length loops treat a single observation as conclusive there.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct NoiseModel {
    p: f64,
}

impl NoiseModel {
    pub fn new(p: f64) -> Result<Self> {
        if p.is_finite() && (0.0..0.5).contains(&p) {
            Ok(Self { p })
        } else {
            Err(Error::InvalidNoise(p))
        }
    }

    pub fn noiseless() -> Self {
        Self { p: 0.0 }
    }

    #[inline]
    pub fn p(&self) -> f64 {
        self.p
    }

    #[inline]
    pub fn is_noiseless(&self) -> bool {
        self.p == 0.0
    }

    /// `(1-p)/p`; infinite on the noiseless channel.
    pub fn likelihood_ratio(&self) -> f64 {
        (1.0 - self.p) / self.p
    }

    /// Natural log of the likelihood ratio: the log-odds step one
    /// observation moves a posterior by.
    pub fn log_likelihood_ratio(&self) -> f64 {
        (-self.p).ln_1p() - self.p.ln()
    }

    /// A draw `u` uniform on `[0, 2^64)` flips the bit iff `u < threshold`.
    pub(crate) fn flip_threshold(&self) -> u64 {
        // p < 1/2, so the product is below 2^63 and converts exactly enough.
        (self.p * 18_446_744_073_709_551_616.0) as u64
    }
}

impl TryFrom<f64> for NoiseModel {
    type Error = Error;

    fn try_from(p: f64) -> Result<Self> {
        Self::new(p)
    }
}

impl From<NoiseModel> for f64 {
    fn from(noise: NoiseModel) -> f64 {
        noise.p
    }
}

/// Target error probability, `0 < delta < 0.49`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Delta(f64);

impl Delta {
    pub fn new(delta: f64) -> Result<Self> {
        if delta.is_finite() && delta > 0.0 && delta < DELTA_LIMIT {
            Ok(Self(delta))
        } else {
            Err(Error::InvalidDelta(delta))
        }
    }

    #[inline]
    pub fn get(&self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Delta {
    type Error = Error;

    fn try_from(delta: f64) -> Result<Self> {
        Self::new(delta)
    }
}

impl From<Delta> for f64 {
    fn from(delta: Delta) -> f64 {
        delta.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn noise_range() {
        assert!(NoiseModel::new(0.0).is_ok());
        assert!(NoiseModel::new(0.499).is_ok());
        assert_eq!(NoiseModel::new(0.5), Err(Error::InvalidNoise(0.5)));
        assert!(NoiseModel::new(-0.1).is_err());
        assert!(NoiseModel::new(f64::NAN).is_err());
    }

    #[test]
    fn likelihood_ratio_finite_iff_noisy() {
        assert!(NoiseModel::noiseless().likelihood_ratio().is_infinite());
        let noise = NoiseModel::new(0.1).unwrap();
        assert!((noise.likelihood_ratio() - 9.0).abs() < 1e-12);
        assert!((noise.log_likelihood_ratio() - 9f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn delta_range() {
        assert!(Delta::new(0.1).is_ok());
        assert!(Delta::new(0.0).is_err());
        assert_eq!(Delta::new(0.49), Err(Error::InvalidDelta(0.49)));
    }

    #[test]
    fn serde_validates() {
        assert!(serde_json::from_str::<NoiseModel>("0.6").is_err());
        let noise: NoiseModel = serde_json::from_str("0.25").unwrap();
        assert_eq!(noise.p(), 0.25);
    }
}
