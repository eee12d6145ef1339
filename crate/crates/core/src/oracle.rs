//! The query gateway. Every noisy observation an algorithm sees comes from
//! an [`OracleSession`], which also counts them.
//!
//! Randomness is ChaCha8 keyed by `(seed, stream)`; the `n`-th query of a
//! session consumes the `n`-th word of that keystream whatever its target
//! is. Two sessions with the same instance, channel, seed and stream
//! therefore replay identical observations for identical query sequences,
//! on any platform.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channel::NoiseModel;
use crate::error::{Error, Result};
use crate::instance::{Instance, InstanceKind};

/// What a single query asked. Recorded only when logging is enabled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Query {
    Bit(usize),
    Compare(usize, usize),
    Target(usize),
}

#[derive(Debug, Clone)]
pub struct OracleSession {
    instance: Instance,
    noise: NoiseModel,
    seed: u64,
    stream: u64,
    rng: ChaCha8Rng,
    threshold: u64,
    queries: u64,
    log: Option<Vec<Query>>,
}

impl OracleSession {
    pub fn new(instance: impl Into<Instance>, noise: NoiseModel, seed: u64) -> Self {
        Self::with_stream(instance, noise, seed, 0)
    }

    /// A session on an independent keystream of `seed`. The harness gives
    /// every trial its own stream.
    pub fn with_stream(
        instance: impl Into<Instance>,
        noise: NoiseModel,
        seed: u64,
        stream: u64,
    ) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self {
            instance: instance.into(),
            noise,
            seed,
            stream,
            rng,
            threshold: noise.flip_threshold(),
            queries: 0,
            log: None,
        }
    }

    /// Record every query target from now on.
    pub fn with_log(mut self) -> Self {
        self.log = Some(Vec::new());
        self
    }

    pub fn instance(&self) -> &Instance {
        &self.instance
    }

    pub fn noise(&self) -> NoiseModel {
        self.noise
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// Number of noisy observations handed out so far.
    pub fn queries_used(&self) -> u64 {
        self.queries
    }

    pub fn log(&self) -> Option<&[Query]> {
        self.log.as_deref()
    }

    pub fn take_log(&mut self) -> Option<Vec<Query>> {
        self.log.take()
    }

    pub fn len(&self) -> usize {
        self.instance.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Noisy read of bit `k`.
    pub fn query_bit(&mut self, k: usize) -> Result<bool> {
        let truth = match &self.instance {
            Instance::Bits(b) => *b.bits().get(k).ok_or(Error::IndexOutOfRange {
                index: k,
                len: b.len(),
            })?,
            other => return Err(wrong(InstanceKind::Bits, other)),
        };
        Ok(self.observe(truth, Query::Bit(k)))
    }

    /// Noisy answer to "is item `i` larger than item `j`?".
    pub fn query_comparison(&mut self, i: usize, j: usize) -> Result<bool> {
        let truth = match &self.instance {
            Instance::Ranks(r) => {
                let len = r.len();
                for index in [i, j] {
                    if index >= len {
                        return Err(Error::IndexOutOfRange { index, len });
                    }
                }
                if i == j {
                    return Err(Error::SelfComparison(i));
                }
                r.rank(i) > r.rank(j)
            }
            other => return Err(wrong(InstanceKind::Ranks, other)),
        };
        Ok(self.observe(truth, Query::Compare(i, j)))
    }

    /// Noisy answer to "is the target larger than item `i`?".
    pub fn query_target_comparison(&mut self, i: usize) -> Result<bool> {
        let truth = match &self.instance {
            Instance::Search(s) => {
                if i >= s.len() {
                    return Err(Error::IndexOutOfRange {
                        index: i,
                        len: s.len(),
                    });
                }
                i < s.slot()
            }
            other => return Err(wrong(InstanceKind::Search, other)),
        };
        Ok(self.observe(truth, Query::Target(i)))
    }

    #[inline]
    fn observe(&mut self, truth: bool, query: Query) -> bool {
        self.queries += 1;
        if let Some(log) = &mut self.log {
            log.push(query);
        }
        let flipped = self.rng.next_u64() < self.threshold;
        truth ^ flipped
    }
}

/// An algorithm's answer together with the number of queries it consumed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgorithmResult<T> {
    pub output: T,
    pub queries: u64,
}

impl OracleSession {
    /// Runs `algorithm` and records the counter delta it caused.
    pub fn measure<T>(
        &mut self,
        algorithm: impl FnOnce(&mut Self) -> Result<T>,
    ) -> Result<AlgorithmResult<T>> {
        let before = self.queries;
        let output = algorithm(self)?;
        Ok(AlgorithmResult {
            output,
            queries: self.queries - before,
        })
    }
}

fn wrong(expected: InstanceKind, found: &Instance) -> Error {
    Error::WrongInstance {
        expected: expected.name(),
        found: found.kind().name(),
    }
}
