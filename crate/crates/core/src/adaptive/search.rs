use crate::bounds::{log_odds_threshold, THRESHOLD_SLACK};
use crate::channel::{Delta, NoiseModel};
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::oracle::{AlgorithmResult, OracleSession};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMode {
    /// Exactly this many queries, then the most probable slot.
    Fixed(u64),
    /// Query until one slot holds posterior mass at least `1 - delta`.
    Variable,
}

/// Noisy search by posterior median.
///
/// A posterior over the `K+1` slots starts uniform. Each step asks about
/// the item whose boundary splits the posterior mass closest to half, then
/// reweights every slot by `1-p` or `p` according to whether it agrees with
/// the answer.
pub fn search_adaptive(
    session: &mut OracleSession,
    delta: Delta,
    mode: SearchMode,
) -> Result<AlgorithmResult<usize>> {
    if !matches!(session.instance(), Instance::Search(_)) {
        return Err(Error::WrongInstance {
            expected: "search",
            found: session.instance().kind().name(),
        });
    }
    let noise = session.noise();
    let len = session.len();
    session.measure(|s| {
        posterior_search(len, noise, delta.get().ln(), mode, |i| {
            s.query_target_comparison(i)
        })
    })
}

/// Insertion sort: each item is placed into the sorted prefix by a
/// variable-length [`search_adaptive`] at confidence `delta / K`. The
/// output lists items from smallest to largest.
pub fn sort_adaptive(
    session: &mut OracleSession,
    delta: Delta,
) -> Result<AlgorithmResult<Vec<usize>>> {
    if !matches!(session.instance(), Instance::Ranks(_)) {
        return Err(Error::WrongInstance {
            expected: "ranks",
            found: session.instance().kind().name(),
        });
    }
    let noise = session.noise();
    let k = session.len();
    let ln_delta = delta.get().ln() - (k as f64).ln();
    session.measure(|s| {
        let mut order: Vec<usize> = Vec::with_capacity(k);
        for item in 0..k {
            let slot = if order.is_empty() {
                0
            } else {
                posterior_search(order.len(), noise, ln_delta, SearchMode::Variable, |i| {
                    s.query_comparison(item, order[i])
                })?
            };
            order.insert(slot, item);
        }
        Ok(order)
    })
}

/// Core of the posterior-median search over `len` sorted items.
/// `above(i)` is a noisy answer to "does the target lie above item `i`",
/// i.e. is its slot greater than `i`.
pub(crate) fn posterior_search(
    len: usize,
    noise: NoiseModel,
    ln_delta: f64,
    mode: SearchMode,
    mut above: impl FnMut(usize) -> Result<bool>,
) -> Result<usize> {
    if mode == SearchMode::Fixed(0) {
        return Err(Error::ZeroBudget);
    }
    let p = noise.p();
    let (ln_agree, ln_disagree) = ((-p).ln_1p(), p.ln());
    let target = log_odds_threshold(ln_delta);
    let step = if p > 0.0 {
        noise.log_likelihood_ratio()
    } else {
        0.0
    };
    let stop_level = target - THRESHOLD_SLACK * target.max(step);

    // log weights, kept with max 0
    let mut weights = vec![0.0f64; len + 1];
    let mut mass = vec![0.0f64; len + 1];
    let mut asked = 0u64;
    loop {
        match mode {
            SearchMode::Fixed(budget) if asked == budget => return Ok(map_slot(&weights)),
            SearchMode::Variable => {
                let best = map_slot(&weights);
                if best_log_odds(&weights, best) >= stop_level {
                    return Ok(best);
                }
            }
            _ => {}
        }

        for (m, &w) in mass.iter_mut().zip(&weights) {
            *m = w.exp();
        }
        let total: f64 = mass.iter().sum();
        let item = median_boundary(&mass, total);

        let answer = above(item)?;
        asked += 1;
        for (slot, w) in weights.iter_mut().enumerate() {
            *w += if (slot > item) == answer {
                ln_agree
            } else {
                ln_disagree
            };
        }
        let top = weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        for w in &mut weights {
            *w -= top;
        }
    }
}

/// Item whose boundary puts the mass below it closest to half; the
/// earliest such item on ties.
fn median_boundary(mass: &[f64], total: f64) -> usize {
    let mut below = 0.0;
    let mut best = (0, f64::INFINITY);
    for (item, &m) in mass[..mass.len() - 1].iter().enumerate() {
        below += m;
        let gap = (below / total - 0.5).abs();
        if gap < best.1 {
            best = (item, gap);
        }
    }
    best.0
}

fn map_slot(weights: &[f64]) -> usize {
    let mut best = 0;
    for (slot, &w) in weights.iter().enumerate() {
        if w > weights[best] {
            best = slot;
        }
    }
    best
}

/// `ln(P(best) / P(not best))`.
fn best_log_odds(weights: &[f64], best: usize) -> f64 {
    let rest: f64 = weights
        .iter()
        .enumerate()
        .filter(|&(slot, _)| slot != best)
        .map(|(_, w)| (w - weights[best]).exp())
        .sum();
    -rest.ln()
}
