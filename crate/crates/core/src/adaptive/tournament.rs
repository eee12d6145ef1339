use super::{posterior_loop, round_ln_threshold};
use crate::bounds::{halving_rounds, tournament_final_repetitions, tournament_round_repetitions};
use crate::channel::Delta;
use crate::error::{Error, Result};
use crate::oracle::{AlgorithmResult, OracleSession};

/// Fixed-length tournament for OR.
///
/// Each round queries every survivor `ceil(4(2i-1) log2(1/delta) / (1-H(p)))`
/// times and keeps, from each consecutive pair, the element that showed
/// more ones (the earlier one on a tie; an unpaired last element advances).
/// The lone survivor is then queried `ceil(6 log2(1/delta) / (1-H(p)))`
/// times and the answer is 1 iff strictly more than half were ones.
pub fn or_tournament_fixed(
    session: &mut OracleSession,
    delta: Delta,
) -> Result<AlgorithmResult<bool>> {
    session.measure(|s| {
        let noise = s.noise();
        let mut alive: Vec<usize> = (0..s.len()).collect();
        for round in 1..=halving_rounds(s.len()) {
            let reps = tournament_round_repetitions(round, noise, delta);
            let ones = alive
                .iter()
                .map(|&k| count_ones(reps, || s.query_bit(k)))
                .collect::<Result<Vec<_>>>()?;
            alive = alive
                .chunks(2)
                .zip(ones.chunks(2))
                .map(|(pair, score)| match (pair, score) {
                    ([a, b], [sa, sb]) => {
                        if sb > sa {
                            *b
                        } else {
                            *a
                        }
                    }
                    _ => pair[0],
                })
                .collect();
            if alive.len() == 1 {
                break;
            }
        }
        let reps = tournament_final_repetitions(noise, delta);
        let last = alive[0];
        let ones = count_ones(reps, || s.query_bit(last))?;
        Ok(2 * ones > reps)
    })
}

/// Variable-length tournament for OR.
///
/// Round `i` runs a posterior loop with threshold `delta^(2(2i-1))` on the
/// first element of each consecutive pair. If it is judged 1 its partner is
/// dropped unqueried; if judged 0 it is dropped itself. The posterior is
/// reset to 1/2 for every loop. The survivor gets a final loop at `delta`.
pub fn or_tournament_variable(
    session: &mut OracleSession,
    delta: Delta,
) -> Result<AlgorithmResult<bool>> {
    session.measure(|s| {
        let noise = s.noise();
        let ln_delta = delta.get().ln();
        let mut alive: Vec<usize> = (0..s.len()).collect();
        for round in 1..=halving_rounds(s.len()) {
            let threshold = round_ln_threshold(ln_delta, round);
            let mut next = Vec::with_capacity(alive.len().div_ceil(2));
            for pair in alive.chunks(2) {
                let first = pair[0];
                if posterior_loop(noise, threshold, || s.query_bit(first))? {
                    next.push(first);
                } else if let Some(&second) = pair.get(1) {
                    next.push(second);
                }
            }
            alive = next;
            if alive.len() == 1 {
                break;
            }
        }
        let last = alive[0];
        posterior_loop(noise, ln_delta, || s.query_bit(last))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Comparison {
    pub winner: usize,
    pub queries: u64,
}

/// Compares items `i` and `j` until the posterior that `i` is larger leaves
/// `(delta, 1-delta)`.
pub fn compare_variable(
    session: &mut OracleSession,
    i: usize,
    j: usize,
    delta: Delta,
) -> Result<Comparison> {
    compare_variable_ln(session, i, j, delta.get().ln())
}

pub(crate) fn compare_variable_ln(
    session: &mut OracleSession,
    i: usize,
    j: usize,
    ln_threshold: f64,
) -> Result<Comparison> {
    if i == j {
        return Err(Error::SelfComparison(i));
    }
    let noise = session.noise();
    let result =
        session.measure(|s| posterior_loop(noise, ln_threshold, || s.query_comparison(i, j)))?;
    Ok(Comparison {
        winner: if result.output { i } else { j },
        queries: result.queries,
    })
}

/// Fixed-length tournament for MAX: in round `i` each consecutive pair is
/// compared `ceil(4(2i-1) log2(1/delta) / (1-H(p)))` times and the majority
/// winner advances (the earlier item on a tie). The last survivor is the
/// answer.
pub fn max_tournament_fixed(
    session: &mut OracleSession,
    delta: Delta,
) -> Result<AlgorithmResult<usize>> {
    session.measure(|s| {
        let noise = s.noise();
        let mut alive: Vec<usize> = (0..s.len()).collect();
        for round in 1..=halving_rounds(s.len()) {
            let reps = tournament_round_repetitions(round, noise, delta);
            alive = alive
                .chunks(2)
                .map(|pair| match *pair {
                    [a, b] => {
                        let wins = count_ones(reps, || s.query_comparison(a, b))?;
                        Ok(if 2 * wins >= reps { a } else { b })
                    }
                    _ => Ok(pair[0]),
                })
                .collect::<Result<_>>()?;
            if alive.len() == 1 {
                break;
            }
        }
        Ok(alive[0])
    })
}

/// Variable-length MAX: the same bracket with each pair settled by
/// [`compare_variable`] at confidence `delta^(2(2i-1))`.
pub fn max_tournament_variable(
    session: &mut OracleSession,
    delta: Delta,
) -> Result<AlgorithmResult<usize>> {
    session.measure(|s| {
        let ln_delta = delta.get().ln();
        let mut alive: Vec<usize> = (0..s.len()).collect();
        for round in 1..=halving_rounds(s.len()) {
            let threshold = round_ln_threshold(ln_delta, round);
            alive = alive
                .chunks(2)
                .map(|pair| match *pair {
                    [a, b] => Ok(compare_variable_ln(s, a, b, threshold)?.winner),
                    _ => Ok(pair[0]),
                })
                .collect::<Result<_>>()?;
            if alive.len() == 1 {
                break;
            }
        }
        Ok(alive[0])
    })
}

fn count_ones(reps: u64, mut query: impl FnMut() -> Result<bool>) -> Result<u64> {
    let mut ones = 0;
    for _ in 0..reps {
        ones += query()? as u64;
    }
    Ok(ones)
}
