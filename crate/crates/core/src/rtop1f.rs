//! Blocked explore/exploit ranking from top-1 feedback.
//!
//! The horizon is cut into `K` blocks. In each block `m` rounds, drawn
//! uniformly without replacement, are spent putting one object on top so
//! its relevance is revealed; round `i_j` probes object `j`. The probed
//! values form an unbiased estimate of the block's average (transformed)
//! relevance vector and are added to the running score `ŝ` once the block
//! closes. All other rounds play an FTPL draw on `ŝ`, so the rankings played
//! in block `k` depend only on feedback from blocks before `k`.

use std::ops::Range;

use num_traits::Float;
use rand::seq::index;
use rand::Rng;

use crate::error::{RankError, Result};
use crate::ftpl::{ftpl_draw, params_for, FtplParams, ScoreState};
use crate::harness::trace::RegretTrace;
use crate::measures::Measure;
use crate::permutation::Permutation;
use crate::relevance::RelevanceVector;
use crate::scalar::Scalar;

/// Block layout of a horizon: `blocks` blocks of `block_len` rounds, the
/// last one extended by the `horizon - blocks·block_len` leftover rounds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BlockPlan {
    pub horizon: usize,
    pub blocks: usize,
    pub block_len: usize,
}

/// `K = max(1, round(m^{-1/3} T^{2/3}))`, reduced to `⌊T/m⌋` if blocks would
/// be shorter than `m`.
pub fn plan_blocks(horizon: usize, m: usize) -> Result<BlockPlan> {
    if m == 0 {
        return Err(RankError::InvalidConfig("m must be positive".into()));
    }
    if horizon < m {
        return Err(RankError::HorizonTooShort { horizon, m });
    }
    let ideal = (m as f64).powf(-1.0 / 3.0) * (horizon as f64).powf(2.0 / 3.0);
    let mut blocks = (ideal.round() as usize).max(1);
    if horizon / blocks < m {
        blocks = horizon / m;
    }
    Ok(BlockPlan {
        horizon,
        blocks,
        block_len: horizon / blocks,
    })
}

impl BlockPlan {
    /// Rounds (0-based) making up block `b`.
    pub fn block_range(&self, b: usize) -> Range<usize> {
        let start = b * self.block_len;
        let end = if b + 1 == self.blocks {
            self.horizon
        } else {
            start + self.block_len
        };
        start..end
    }

    pub fn block_of(&self, t: usize) -> usize {
        (t / self.block_len).min(self.blocks - 1)
    }
}

/// Exploration rounds for block `b`: entry `j` is the (absolute, 0-based)
/// round that probes object `j`.
pub fn schedule_block<R: Rng + ?Sized>(
    plan: &BlockPlan,
    b: usize,
    m: usize,
    rng: &mut R,
) -> Result<Vec<usize>> {
    if b >= plan.blocks {
        return Err(RankError::IndexOutOfRange {
            index: b,
            len: plan.blocks,
        });
    }
    let range = plan.block_range(b);
    if range.len() < m {
        return Err(RankError::HorizonTooShort {
            horizon: range.len(),
            m,
        });
    }
    Ok(index::sample(rng, range.len(), m)
        .into_iter()
        .map(|offset| range.start + offset)
        .collect())
}

/// Running estimate `ŝ` plus the current block's probed values `r̂`.
#[derive(Clone, Debug, PartialEq)]
pub struct EstimatorState<F> {
    s_hat: Vec<F>,
    r_hat_block: Vec<Option<F>>,
}

impl<F: Float> EstimatorState<F> {
    pub fn new(m: usize) -> Self {
        Self {
            s_hat: vec![F::zero(); m],
            r_hat_block: vec![None; m],
        }
    }

    pub fn s_hat(&self) -> &[F] {
        &self.s_hat
    }

    pub fn r_hat_block(&self) -> &[Option<F>] {
        &self.r_hat_block
    }

    pub fn record(&mut self, object: usize, value: F) -> Result<()> {
        let slot = self
            .r_hat_block
            .get_mut(object)
            .ok_or(RankError::IndexOutOfRange {
                index: object,
                len: self.s_hat.len(),
            })?;
        if slot.is_some() {
            return Err(RankError::DuplicateFeedback(object));
        }
        *slot = Some(value);
        Ok(())
    }

    /// `ŝ ← ŝ + r̂`, then clears `r̂`.
    pub fn end_block(&mut self) -> Result<()> {
        let missing = self.r_hat_block.iter().filter(|v| v.is_none()).count();
        if missing > 0 {
            return Err(RankError::IncompleteBlock { missing });
        }
        for (s, r) in self.s_hat.iter_mut().zip(self.r_hat_block.iter_mut()) {
            *s = *s + r.take().expect("checked complete");
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub ranking: Permutation,
    /// Object whose relevance this round reveals to the estimator.
    pub probe: Option<usize>,
}

/// The blocked top-1 feedback learner.
#[derive(Clone, Debug)]
pub struct Rtop1f<F> {
    surrogate: Measure,
    m: usize,
    max_level: u32,
    plan: BlockPlan,
    params: FtplParams<F>,
    estimator: EstimatorState<F>,
    block: usize,
    probe_rounds: Vec<usize>,
    next_round: usize,
    pending_probe: Option<usize>,
}

impl<F: Scalar + Float> Rtop1f<F> {
    /// Learner for `measure` on `m` objects with levels in `0..=max_level`.
    /// Normalized measures are refused.
    pub fn new(measure: Measure, m: usize, max_level: u32, horizon: usize) -> Result<Self> {
        let surrogate = measure
            .linear_surrogate()
            .ok_or(RankError::Refused { measure })?;
        if max_level > 1 && !surrogate.supports_graded() {
            return Err(RankError::NonBinary { measure });
        }
        let plan = plan_blocks(horizon, m)?;
        let params = params_for(surrogate, m, max_level.max(1), plan.blocks)?;
        Ok(Self {
            surrogate,
            m,
            max_level,
            plan,
            params,
            estimator: EstimatorState::new(m),
            block: 0,
            probe_rounds: Vec::new(),
            next_round: 0,
            pending_probe: None,
        })
    }

    pub fn plan(&self) -> &BlockPlan {
        &self.plan
    }

    pub fn params(&self) -> &FtplParams<F> {
        &self.params
    }

    pub fn estimator(&self) -> &EstimatorState<F> {
        &self.estimator
    }

    /// Exploration rounds of the current block (empty before its first round).
    pub fn probe_rounds(&self) -> &[usize] {
        &self.probe_rounds
    }

    /// Ranking for round `t` (0-based). Rounds must be requested in order and
    /// an exploration round's feedback absorbed before the next step.
    pub fn step<R: Rng + ?Sized>(&mut self, t: usize, rng: &mut R) -> Result<Step> {
        if t != self.next_round {
            return Err(RankError::Protocol(format!(
                "round {t} requested, expected round {}",
                self.next_round
            )));
        }
        if t >= self.plan.horizon {
            return Err(RankError::Protocol(format!(
                "round {t} beyond horizon {}",
                self.plan.horizon
            )));
        }
        if let Some(j) = self.pending_probe {
            return Err(RankError::Protocol(format!(
                "feedback for probed object {j} not absorbed"
            )));
        }
        let block = self.plan.block_of(t);
        if block != self.block {
            self.estimator.end_block()?;
            self.block = block;
            self.probe_rounds.clear();
        }
        if self.probe_rounds.is_empty() {
            self.probe_rounds = schedule_block(&self.plan, block, self.m, rng)?;
        }
        self.next_round += 1;
        if let Some(j) = self.probe_rounds.iter().position(|&round| round == t) {
            self.pending_probe = Some(j);
            return Ok(Step {
                ranking: Permutation::with_on_top(self.m, j)?,
                probe: Some(j),
            });
        }
        let state = ScoreState::from_scores(self.estimator.s_hat().to_vec());
        Ok(Step {
            ranking: ftpl_draw(&state, &self.params, rng),
            probe: None,
        })
    }

    /// Stores `g(level)` as the estimate for the probed `object`.
    pub fn absorb_feedback(&mut self, object: usize, level: u32) -> Result<()> {
        if level > self.max_level {
            return Err(RankError::LevelOutOfRange {
                level,
                max: self.max_level,
            });
        }
        match self.pending_probe {
            Some(j) if j == object => {}
            _ => {
                return Err(RankError::Protocol(format!(
                    "feedback for object {object} was not requested"
                )))
            }
        }
        self.estimator
            .record(object, F::from_count(self.surrogate.g_component(level)))?;
        self.pending_probe = None;
        Ok(())
    }

    /// Top-1 feedback for the round just played: the relevance of the object
    /// at rank 1. Only exploration rounds use it.
    pub fn observe_top(&mut self, level: u32) -> Result<()> {
        match self.pending_probe {
            Some(j) => self.absorb_feedback(j, level),
            None if level > self.max_level => Err(RankError::LevelOutOfRange {
                level,
                max: self.max_level,
            }),
            None => Ok(()),
        }
    }

    /// Closes the final block.
    pub fn finish(&mut self) -> Result<()> {
        if self.next_round != self.plan.horizon {
            return Err(RankError::Protocol(format!(
                "finish after {} of {} rounds",
                self.next_round, self.plan.horizon
            )));
        }
        self.estimator.end_block()
    }
}

/// Runs the top-1 feedback learner against a fixed relevance stream and
/// scores every round (exploration included) with `measure`.
///
/// The learner only ever receives `r_t(σ_t⁻¹(1))`.
pub fn run_episode<R: Rng + ?Sized>(
    measure: Measure,
    stream: &[RelevanceVector],
    rng: &mut R,
) -> Result<RegretTrace> {
    if measure.linear_surrogate().is_none() {
        return Err(RankError::Refused { measure });
    }
    let Some(first) = stream.first() else {
        return Err(RankError::HorizonTooShort { horizon: 0, m: 0 });
    };
    let m = first.len();
    let max_level = stream
        .iter()
        .map(|r| r.max_level())
        .max()
        .unwrap_or(1)
        .max(1);
    let mut learner = Rtop1f::<f64>::new(measure, m, max_level, stream.len())?;
    let mut plays = Vec::with_capacity(stream.len());
    for (t, r) in stream.iter().enumerate() {
        if r.len() != m {
            return Err(RankError::DimensionMismatch {
                expected: m,
                found: r.len(),
            });
        }
        let step = learner.step(t, rng)?;
        learner.observe_top(r.level(step.ranking.top()))?;
        plays.push(step.ranking);
    }
    learner.finish()?;
    RegretTrace::from_plays(measure, stream, &plays)
}
