//! Seeded Monte Carlo engine: runs batches of trials for any algorithm and
//! instance family and aggregates error rates and query counts.
//!
//! Trial `t` on the `u`-th instance of a family runs on keystream
//! `(u << 40) | t` of the base seed, so results do not depend on the order
//! or thread trials run on.

mod csv;
mod stats;

pub use csv::{format_sig9, to_csv, CSV_HEADER};
pub use stats::{wilson_interval, wilson_upper, QueryMoments, Z95};

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::adaptive::{self, SearchMode};
use crate::bounds::{bound_table, BoundSpec, BoundValue, Problem, Setting};
use crate::channel::{Delta, NoiseModel};
use crate::error::{Error, Result};
use crate::instance::{BitInstance, Instance, InstanceKind, RankInstance, SearchInstance};
use crate::nonadaptive;
use crate::oracle::OracleSession;

/// Every algorithm the harness can run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlgorithmId {
    OrTournamentFixed,
    OrTournamentVariable,
    OrNonadaptive,
    MaxTournamentFixed,
    MaxTournamentVariable,
    MaxNonadaptive,
    /// `compare_variable` on items 0 and 1 of a two-item instance.
    CompareVariable,
    SearchAdaptive,
    SearchNonadaptive,
    SortAdaptive,
    SortNonadaptive,
}

impl AlgorithmId {
    pub const ALL: [AlgorithmId; 11] = [
        AlgorithmId::OrTournamentFixed,
        AlgorithmId::OrTournamentVariable,
        AlgorithmId::OrNonadaptive,
        AlgorithmId::MaxTournamentFixed,
        AlgorithmId::MaxTournamentVariable,
        AlgorithmId::MaxNonadaptive,
        AlgorithmId::CompareVariable,
        AlgorithmId::SearchAdaptive,
        AlgorithmId::SearchNonadaptive,
        AlgorithmId::SortAdaptive,
        AlgorithmId::SortNonadaptive,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AlgorithmId::OrTournamentFixed => "or_tournament_fixed",
            AlgorithmId::OrTournamentVariable => "or_tournament_variable",
            AlgorithmId::OrNonadaptive => "or_nonadaptive",
            AlgorithmId::MaxTournamentFixed => "max_tournament_fixed",
            AlgorithmId::MaxTournamentVariable => "max_tournament_variable",
            AlgorithmId::MaxNonadaptive => "max_nonadaptive",
            AlgorithmId::CompareVariable => "compare_variable",
            AlgorithmId::SearchAdaptive => "search_adaptive",
            AlgorithmId::SearchNonadaptive => "search_nonadaptive",
            AlgorithmId::SortAdaptive => "sort_adaptive",
            AlgorithmId::SortNonadaptive => "sort_nonadaptive",
        }
    }

    pub fn instance_kind(self) -> InstanceKind {
        use AlgorithmId::*;
        match self {
            OrTournamentFixed | OrTournamentVariable | OrNonadaptive => InstanceKind::Bits,
            SearchAdaptive | SearchNonadaptive => InstanceKind::Search,
            _ => InstanceKind::Ranks,
        }
    }

    /// Bound-table row this algorithm is measured against.
    pub fn bound_row(self) -> (Problem, Setting) {
        use AlgorithmId::*;
        match self {
            OrTournamentFixed => (Problem::Or, Setting::FixedAdaptive),
            OrTournamentVariable => (Problem::Or, Setting::VariableAdaptive),
            OrNonadaptive => (Problem::Or, Setting::FixedNonadaptive),
            MaxTournamentFixed => (Problem::Max, Setting::FixedAdaptive),
            MaxTournamentVariable | CompareVariable => (Problem::Max, Setting::VariableAdaptive),
            MaxNonadaptive => (Problem::Max, Setting::FixedNonadaptive),
            SearchAdaptive => (Problem::Search, Setting::VariableAdaptive),
            SearchNonadaptive => (Problem::Search, Setting::FixedNonadaptive),
            SortAdaptive => (Problem::Sort, Setting::VariableAdaptive),
            SortNonadaptive => (Problem::Sort, Setting::FixedNonadaptive),
        }
    }

    /// Whether the query count is deterministic.
    pub fn is_fixed_length(self) -> bool {
        use AlgorithmId::*;
        matches!(
            self,
            OrTournamentFixed
                | OrNonadaptive
                | MaxTournamentFixed
                | MaxNonadaptive
                | SearchNonadaptive
                | SortNonadaptive
        )
    }
}

impl fmt::Display for AlgorithmId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AlgorithmId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        AlgorithmId::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown algorithm '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// The all-zeros string and each single-one string.
    WorstCaseOr,
    /// A fresh uniformly random bit string per trial.
    UniformRandomBits,
    /// A fresh uniformly random permutation per trial.
    RandomPermutation,
    /// Every slot `0..=K` as its own instance.
    EachSearchSlot,
}

impl Family {
    pub const ALL: [Family; 4] = [
        Family::WorstCaseOr,
        Family::UniformRandomBits,
        Family::RandomPermutation,
        Family::EachSearchSlot,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::WorstCaseOr => "worst_case_or",
            Family::UniformRandomBits => "uniform_random_bits",
            Family::RandomPermutation => "random_permutation",
            Family::EachSearchSlot => "each_search_slot",
        }
    }

    pub fn instance_kind(self) -> InstanceKind {
        match self {
            Family::WorstCaseOr | Family::UniformRandomBits => InstanceKind::Bits,
            Family::RandomPermutation => InstanceKind::Ranks,
            Family::EachSearchSlot => InstanceKind::Search,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown family '{s}'")))
    }
}

fn default_trials() -> u64 {
    10_000
}

/// One batch of trials. Deserializes from the objects of a sweep file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub algorithm: AlgorithmId,
    pub family: Family,
    pub k: usize,
    pub p: f64,
    pub delta: f64,
    #[serde(default = "default_trials")]
    pub trials: u64,
    #[serde(default, alias = "base_seed")]
    pub seed: u64,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(NoiseModel, Delta)> {
        let noise = NoiseModel::new(self.p)?;
        let delta = Delta::new(self.delta)?;
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".to_owned()));
        }
        if self.k == 0 {
            return Err(Error::EmptyInstance);
        }
        if self.algorithm.instance_kind() != self.family.instance_kind() {
            return Err(Error::Config(format!(
                "algorithm {} needs {} instances but family {} yields {}",
                self.algorithm,
                self.algorithm.instance_kind().name(),
                self.family,
                self.family.instance_kind().name()
            )));
        }
        if self.algorithm == AlgorithmId::CompareVariable && self.k != 2 {
            return Err(Error::Config("compare_variable needs k = 2".to_owned()));
        }
        Ok((noise, delta))
    }
}

/// Outcome tallies for one instance of a family.
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceStats {
    pub label: String,
    pub trials: u64,
    pub errors: u64,
    pub queries: QueryMoments,
}

impl InstanceStats {
    pub fn error_rate(&self) -> f64 {
        self.errors as f64 / self.trials as f64
    }

    pub fn wilson95(&self) -> f64 {
        wilson_upper(self.errors, self.trials)
    }
}

/// Headline statistics of a batch.
///
/// Error fields are those of the worst instance (highest error rate, the
/// first one on ties); query moments are pooled over every instance.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialStats {
    pub config: ExperimentConfig,
    pub trials: u64,
    pub errors: u64,
    pub error_rate: f64,
    pub wilson95: f64,
    pub queries_mean: f64,
    pub queries_min: u64,
    pub queries_max: u64,
    pub queries_stddev: f64,
    pub worst_instance: String,
    pub per_instance: Vec<InstanceStats>,
}

/// Ground truth of one trial's instance.
enum Truth {
    Bit(bool),
    Index(usize),
    Order(Vec<usize>),
}

fn truth_of(algorithm: AlgorithmId, instance: &Instance) -> Truth {
    match instance {
        Instance::Bits(b) => Truth::Bit(b.or()),
        Instance::Search(s) => Truth::Index(s.slot()),
        Instance::Ranks(r) => match algorithm {
            AlgorithmId::SortAdaptive | AlgorithmId::SortNonadaptive => {
                Truth::Order(r.sorted_order())
            }
            _ => Truth::Index(r.argmax()),
        },
    }
}

/// Runs `algorithm` once on `session` and reports `(correct, queries)`.
pub fn run_once(
    algorithm: AlgorithmId,
    session: &mut OracleSession,
    delta: Delta,
) -> Result<(bool, u64)> {
    use AlgorithmId::*;
    let truth = truth_of(algorithm, session.instance());
    let (output, queries) = match algorithm {
        OrTournamentFixed => bit(adaptive::or_tournament_fixed(session, delta)?),
        OrTournamentVariable => bit(adaptive::or_tournament_variable(session, delta)?),
        OrNonadaptive => bit(nonadaptive::or_nonadaptive(session, delta)?),
        MaxTournamentFixed => index(adaptive::max_tournament_fixed(session, delta)?),
        MaxTournamentVariable => index(adaptive::max_tournament_variable(session, delta)?),
        MaxNonadaptive => index(nonadaptive::max_nonadaptive(session, delta)?),
        CompareVariable => {
            let c = adaptive::compare_variable(session, 0, 1, delta)?;
            (Truth::Index(c.winner), c.queries)
        }
        SearchAdaptive => index(adaptive::search_adaptive(
            session,
            delta,
            SearchMode::Variable,
        )?),
        SearchNonadaptive => index(nonadaptive::search_nonadaptive(session, delta)?),
        SortAdaptive => order(adaptive::sort_adaptive(session, delta)?),
        SortNonadaptive => order(nonadaptive::sort_nonadaptive(session, delta)?),
    };
    let correct = match (truth, output) {
        (Truth::Bit(a), Truth::Bit(b)) => a == b,
        (Truth::Index(a), Truth::Index(b)) => a == b,
        (Truth::Order(a), Truth::Order(b)) => a == b,
        _ => unreachable!("algorithm output matches its instance kind"),
    };
    Ok((correct, queries))
}

fn bit(r: crate::oracle::AlgorithmResult<bool>) -> (Truth, u64) {
    (Truth::Bit(r.output), r.queries)
}

fn index(r: crate::oracle::AlgorithmResult<usize>) -> (Truth, u64) {
    (Truth::Index(r.output), r.queries)
}

fn order(r: crate::oracle::AlgorithmResult<Vec<usize>>) -> (Truth, u64) {
    (Truth::Order(r.output), r.queries)
}

/// Instances of a family: either a fixed labelled list, or one generator
/// slot that draws a fresh instance per trial.
enum FamilyMembers {
    Fixed(Vec<(String, Instance)>),
    Random(&'static str),
}

fn members(family: Family, k: usize) -> Result<FamilyMembers> {
    Ok(match family {
        Family::WorstCaseOr => {
            let mut list = vec![("zeros".to_owned(), BitInstance::zeros(k)?.into())];
            for j in 0..k {
                list.push((format!("one@{j}"), BitInstance::single_one(k, j)?.into()));
            }
            FamilyMembers::Fixed(list)
        }
        Family::EachSearchSlot => FamilyMembers::Fixed(
            (0..=k)
                .map(|s| Ok((format!("slot={s}"), SearchInstance::new(k, s)?.into())))
                .collect::<Result<_>>()?,
        ),
        Family::UniformRandomBits | Family::RandomPermutation => FamilyMembers::Random("random"),
    })
}

const INSTANCE_SALT: u64 = 0x9e37_79b9_7f4a_7c15;

/// Random instance for trial `trial`, drawn from its own keystream.
fn random_instance(family: Family, k: usize, seed: u64, trial: u64) -> Result<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ INSTANCE_SALT);
    rng.set_stream(trial);
    Ok(match family {
        Family::UniformRandomBits => {
            BitInstance::new((0..k).map(|_| rng.random::<bool>()).collect())?.into()
        }
        Family::RandomPermutation => {
            let mut ranks: Vec<usize> = (0..k).collect();
            ranks.shuffle(&mut rng);
            RankInstance::new(ranks)?.into()
        }
        _ => unreachable!("fixed families have no generator"),
    })
}

fn trial_stream(member: usize, trial: u64) -> u64 {
    ((member as u64) << 40) | trial
}

fn run_member(
    config: &ExperimentConfig,
    noise: NoiseModel,
    delta: Delta,
    member: usize,
    fixed: Option<&Instance>,
) -> Result<(u64, QueryMoments)> {
    let one = |t: u64| -> Result<(bool, u64)> {
        let instance = match fixed {
            Some(i) => i.clone(),
            None => random_instance(config.family, config.k, config.seed, t)?,
        };
        let mut session =
            OracleSession::with_stream(instance, noise, config.seed, trial_stream(member, t));
        run_once(config.algorithm, &mut session, delta)
    };

    #[cfg(feature = "parallel")]
    let outcomes: Vec<(bool, u64)> = {
        use rayon::prelude::*;
        (0..config.trials)
            .into_par_iter()
            .map(one)
            .collect::<Result<_>>()?
    };
    #[cfg(not(feature = "parallel"))]
    let outcomes: Vec<(bool, u64)> = (0..config.trials).map(one).collect::<Result<_>>()?;

    let mut moments = QueryMoments::default();
    let mut errors = 0;
    for (correct, q) in outcomes {
        errors += !correct as u64;
        moments.push(q);
    }
    Ok((errors, moments))
}

/// Runs every trial of `config` and aggregates the results.
pub fn run_trials(config: &ExperimentConfig) -> Result<TrialStats> {
    let (noise, delta) = config.validate()?;
    let mut per_instance = Vec::new();
    match members(config.family, config.k)? {
        FamilyMembers::Fixed(list) => {
            for (member, (label, instance)) in list.into_iter().enumerate() {
                let (errors, queries) = run_member(config, noise, delta, member, Some(&instance))?;
                per_instance.push(InstanceStats {
                    label,
                    trials: config.trials,
                    errors,
                    queries,
                });
            }
        }
        FamilyMembers::Random(label) => {
            let (errors, queries) = run_member(config, noise, delta, 0, None)?;
            per_instance.push(InstanceStats {
                label: label.to_owned(),
                trials: config.trials,
                errors,
                queries,
            });
        }
    }

    let worst = per_instance.iter().fold(
        &per_instance[0],
        |w, s| if s.errors > w.errors { s } else { w },
    );
    let mut pooled = QueryMoments::default();
    for s in &per_instance {
        pooled.merge(&s.queries);
    }
    Ok(TrialStats {
        config: config.clone(),
        trials: config.trials,
        errors: worst.errors,
        error_rate: worst.error_rate(),
        wilson95: worst.wilson95(),
        queries_mean: pooled.mean(),
        queries_min: pooled.min(),
        queries_max: pooled.max,
        queries_stddev: pooled.stddev(),
        worst_instance: worst.label.clone(),
        per_instance,
    })
}

/// A sweep row: trial statistics joined with the matching bound row.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub stats: TrialStats,
    /// `None` where the bound expressions are undefined (`p = 0`).
    pub bound: Option<BoundValue>,
}

pub fn bound_for(config: &ExperimentConfig) -> Option<BoundValue> {
    let (problem, setting) = config.algorithm.bound_row();
    bound_table(&BoundSpec {
        problem,
        setting,
        k: config.k,
        p: config.p,
        delta: config.delta,
    })
    .ok()
}

/// Runs every configuration of `grid` in order.
pub fn sweep(grid: &[ExperimentConfig]) -> Result<Vec<SweepRow>> {
    if grid.is_empty() {
        return Err(Error::Config("sweep grid is empty".to_owned()));
    }
    grid.iter()
        .map(|config| {
            Ok(SweepRow {
                stats: run_trials(config)?,
                bound: bound_for(config),
            })
        })
        .collect()
}

/// Parses a sweep file: a JSON array of [`ExperimentConfig`] objects.
pub fn parse_grid(text: &str) -> Result<Vec<ExperimentConfig>> {
    Ok(serde_json::from_str(text)?)
}
