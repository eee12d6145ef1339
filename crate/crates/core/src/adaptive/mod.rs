//! Adaptive algorithms: fixed-length tournaments, their variable-length
//! counterparts built on a posterior stopping loop, posterior-median
//! search, and insertion sort on top of it.

mod search;
mod tournament;

pub use search::{search_adaptive, sort_adaptive, SearchMode};
pub use tournament::{
    compare_variable, max_tournament_fixed, max_tournament_variable, or_tournament_fixed,
    or_tournament_variable, Comparison,
};

use crate::bounds::posterior_barrier;
use crate::channel::NoiseModel;
use crate::error::{Error, Result};

/// Posterior probability `a` that the tested hypothesis holds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PosteriorState {
    a: f64,
}

impl Default for PosteriorState {
    fn default() -> Self {
        Self { a: 0.5 }
    }
}

impl PosteriorState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn observe(&mut self, obs: bool, noise: NoiseModel) -> Result<()> {
        self.a = posterior_update(self.a, obs, noise)?;
        Ok(())
    }

    /// Whether the posterior has left `(threshold, 1 - threshold)`.
    pub fn is_decided(&self, threshold: f64) -> bool {
        self.a <= threshold || self.a >= 1.0 - threshold
    }
}

/// Bayes update of `a` after one observation through BSC(p).
///
/// Observing 1 gives `(1-p)a / ((1-p)a + p(1-a))`, observing 0 gives
/// `pa / (pa + (1-p)(1-a))`.
pub fn posterior_update(a: f64, obs: bool, noise: NoiseModel) -> Result<f64> {
    if !(0.0..=1.0).contains(&a) {
        return Err(Error::InvalidProbability(a));
    }
    let p = noise.p();
    if (a == 0.0 || a == 1.0) && p > 0.0 {
        return Err(Error::AbsorbedPosterior(a));
    }
    let (agree, disagree) = if obs { (1.0 - p, p) } else { (p, 1.0 - p) };
    Ok(agree * a / (agree * a + disagree * (1.0 - a)))
}

/// Observes until the posterior, started at 1/2, leaves `(d, 1-d)` with
/// `d = exp(ln_threshold)`. Returns whether it ended above `1-d`.
///
/// Starting from 1/2 the posterior after any history is determined by the
/// net count of ones minus zeros, so the loop tracks that integer walk
/// instead of `a` itself. Thresholds as small as `delta^(2(2i-1))` are far
/// below what `1 - d` can represent in a double.
pub(crate) fn posterior_loop(
    noise: NoiseModel,
    ln_threshold: f64,
    mut observe: impl FnMut() -> Result<bool>,
) -> Result<bool> {
    let barrier = posterior_barrier(noise, ln_threshold) as i64;
    let mut walk = 0i64;
    while walk.abs() < barrier {
        walk += if observe()? { 1 } else { -1 };
    }
    Ok(walk > 0)
}

/// `ln(delta^(2(2i-1)))`, the per-round threshold of the variable-length
/// tournaments (round `i` is 1-based).
pub(crate) fn round_ln_threshold(ln_delta: f64, round: u32) -> f64 {
    2.0 * (2 * round - 1) as f64 * ln_delta
}
