//! Aggregation of per-trial outcomes.

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Wilson score interval for `successes` out of `n` at normal quantile `z`.
pub fn wilson_interval(successes: u64, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n_f = n as f64;
    let phat = successes as f64 / n_f;
    let z2 = z * z;
    let denom = 1.0 + z2 / n_f;
    let center = (phat + z2 / (2.0 * n_f)) / denom;
    let half = z / denom * (phat * (1.0 - phat) / n_f + z2 / (4.0 * n_f * n_f)).sqrt();
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Upper end of the Wilson 95% interval.
pub fn wilson_upper(successes: u64, n: u64) -> f64 {
    wilson_interval(successes, n, Z95).1
}

/// Query-count moments accumulated exactly in integers, so the result does
/// not depend on the order trials finished in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QueryMoments {
    pub count: u64,
    pub sum: u128,
    pub sum_sq: u128,
    pub min: u64,
    pub max: u64,
}

impl Default for QueryMoments {
    fn default() -> Self {
        Self {
            count: 0,
            sum: 0,
            sum_sq: 0,
            min: u64::MAX,
            max: 0,
        }
    }
}

impl QueryMoments {
    pub fn push(&mut self, q: u64) {
        self.count += 1;
        self.sum += q as u128;
        self.sum_sq += (q as u128) * (q as u128);
        self.min = self.min.min(q);
        self.max = self.max.max(q);
    }

    pub fn merge(&mut self, other: &QueryMoments) {
        self.count += other.count;
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
        self.min = self.min.min(other.min);
        self.max = self.max.max(other.max);
    }

    pub fn mean(&self) -> f64 {
        if self.count == 0 {
            return 0.0;
        }
        self.sum as f64 / self.count as f64
    }

    /// Sample standard deviation.
    pub fn stddev(&self) -> f64 {
        if self.count < 2 {
            return 0.0;
        }
        let n = self.count as u128;
        // n * sum_sq - sum^2 is exact and non-negative
        let scaled = n * self.sum_sq - self.sum * self.sum;
        (scaled as f64 / (n * (n - 1)) as f64).sqrt()
    }

    pub fn min(&self) -> u64 {
        if self.count == 0 {
            0
        } else {
            self.min
        }
    }
}
