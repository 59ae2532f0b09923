//! Best fixed ranking in hindsight.
//!
//! For measures that are linear in a relevance transform (SumLoss, DCG,
//! Prec@k, and NDCG through `g(r) = (2^r - 1)/Z(r)`) the comparator is the
//! sorting oracle applied to the aggregated transform. PairwiseLoss shares
//! SumLoss's argmin and differs by `Σ_t k_t(k_t+1)/2` (`k_t` relevant objects
//! in round `t`). MAP and AUC fall back to tracking every ranking's total.

use crate::error::{RankError, Result};
use crate::game::{enumerate_permutations, MAX_GAME_OBJECTS};
use crate::measures::{ndcg_normalizer, sort_oracle, Measure, Polarity};
use crate::permutation::Permutation;
use crate::relevance::RelevanceVector;

#[derive(Clone, Debug)]
enum Totals {
    /// Aggregated per-object transform plus a ranking-independent offset.
    Linear { aggregate: Vec<f64>, offset: f64 },
    /// Running total of every ranking, in `enumerate_permutations` order.
    Exhaustive {
        actions: Vec<Permutation>,
        totals: Vec<f64>,
    },
}

/// Incremental best-in-hindsight over a growing prefix of a stream.
#[derive(Clone, Debug)]
pub struct HindsightTracker {
    measure: Measure,
    m: usize,
    totals: Totals,
}

impl HindsightTracker {
    pub fn new(measure: Measure, m: usize) -> Result<Self> {
        let totals = match measure {
            Measure::Map | Measure::Auc => {
                if m > MAX_GAME_OBJECTS {
                    return Err(RankError::OutOfRange {
                        what: "m",
                        value: m,
                        min: 1,
                        max: MAX_GAME_OBJECTS,
                    });
                }
                let actions = enumerate_permutations(m)?;
                let totals = vec![0.0; actions.len()];
                Totals::Exhaustive { actions, totals }
            }
            Measure::PrecAtK(k) if k == 0 || k > m => return Err(RankError::KOutOfRange { k, m }),
            _ => Totals::Linear {
                aggregate: vec![0.0; m],
                offset: 0.0,
            },
        };
        Ok(Self { measure, m, totals })
    }

    pub fn push(&mut self, r: &RelevanceVector) -> Result<()> {
        if r.len() != self.m {
            return Err(RankError::DimensionMismatch {
                expected: self.m,
                found: r.len(),
            });
        }
        self.measure.check_relevance(r)?;
        match &mut self.totals {
            Totals::Linear { aggregate, offset } => match self.measure {
                Measure::Ndcg => {
                    if r.is_zero() {
                        *offset += 1.0;
                    } else {
                        let z: f64 = ndcg_normalizer(r)?;
                        for (a, &l) in aggregate.iter_mut().zip(r.levels()) {
                            *a += self.measure.g_component(l) as f64 / z;
                        }
                    }
                }
                measure => {
                    for (a, &l) in aggregate.iter_mut().zip(r.levels()) {
                        *a += measure.g_component(l) as f64;
                    }
                    if measure == Measure::PairwiseLoss {
                        let k = r.count_relevant() as f64;
                        *offset -= k * (k + 1.0) / 2.0;
                    }
                }
            },
            Totals::Exhaustive { actions, totals } => {
                for (sigma, total) in actions.iter().zip(totals.iter_mut()) {
                    *total += self.measure.evaluate::<f64>(sigma, r)?;
                }
            }
        }
        Ok(())
    }

    /// Best ranking for the prefix pushed so far and its total value.
    pub fn best(&self) -> Result<(Permutation, f64)> {
        match &self.totals {
            Totals::Linear { aggregate, offset } => {
                let sigma = sort_oracle(aggregate);
                let f_measure = self.measure.linear_surrogate().unwrap_or(self.measure);
                let mut value = *offset;
                for (obj, &a) in aggregate.iter().enumerate() {
                    if a != 0.0 {
                        value += f_measure.f_component::<f64>(sigma.rank_of(obj))? * a;
                    }
                }
                Ok((sigma, value))
            }
            Totals::Exhaustive { actions, totals } => {
                let better = |a: f64, b: f64| match self.measure.polarity() {
                    Polarity::Loss => a < b,
                    Polarity::Gain => a > b,
                };
                let mut best = 0;
                for (k, &v) in totals.iter().enumerate() {
                    if better(v, totals[best]) {
                        best = k;
                    }
                }
                Ok((actions[best].clone(), totals[best]))
            }
        }
    }
}

fn stream_width(stream: &[RelevanceVector]) -> Result<usize> {
    let m = stream.first().map_or(0, |r| r.len());
    if let Some(bad) = stream.iter().find(|r| r.len() != m) {
        return Err(RankError::DimensionMismatch {
            expected: m,
            found: bad.len(),
        });
    }
    Ok(m)
}

/// Best fixed ranking for the whole stream and its total value.
pub fn best_in_hindsight(
    measure: Measure,
    stream: &[RelevanceVector],
) -> Result<(Permutation, f64)> {
    let m = stream_width(stream)?;
    if stream.is_empty() {
        return Ok((Permutation::identity(0), 0.0));
    }
    let mut tracker = HindsightTracker::new(measure, m)?;
    for r in stream {
        tracker.push(r)?;
    }
    tracker.best()
}

/// Exhaustive search over all `m!` rankings; the first optimum in
/// lexicographic order wins ties.
pub fn brute_force_best(
    measure: Measure,
    stream: &[RelevanceVector],
) -> Result<(Permutation, f64)> {
    let m = stream_width(stream)?;
    if stream.is_empty() {
        return Ok((Permutation::identity(0), 0.0));
    }
    let mut best: Option<(Permutation, f64)> = None;
    for sigma in enumerate_permutations(m)? {
        let mut total = 0.0;
        for r in stream {
            total += measure.evaluate::<f64>(&sigma, r)?;
        }
        let improves = match (&best, measure.polarity()) {
            (None, _) => true,
            (Some((_, b)), Polarity::Loss) => total < *b,
            (Some((_, b)), Polarity::Gain) => total > *b,
        };
        if improves {
            best = Some((sigma, total));
        }
    }
    Ok(best.expect("at least one ranking"))
}
