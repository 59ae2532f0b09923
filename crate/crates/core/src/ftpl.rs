//! Follow the Perturbed Leader over rankings.
//!
//! The learner keeps one score per object (accumulated, `g`-transformed
//! relevance), adds a fresh uniform perturbation on `[0, 1/ε]` per coordinate
//! every round and plays the sorting oracle on the result. The distribution
//! over `m!` rankings this induces is never materialised.

use num_traits::Float;
use rand::Rng;

use crate::error::{RankError, Result};
use crate::harness::trace::RegretTrace;
use crate::measures::{sort_oracle, Measure};
use crate::permutation::Permutation;
use crate::relevance::RelevanceVector;
use crate::scalar::Scalar;

/// Perturbation scale and the norm bounds it is derived from.
///
/// `d`: ℓ1 bound on learner vectors `f(σ)`; `r`: bound on `f(σ)·g(r)`;
/// `a`: ℓ1 bound on adversary vectors `g(r)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FtplParams<F> {
    pub epsilon: F,
    pub d: F,
    pub r: F,
    pub a: F,
}

impl<F: Float> FtplParams<F> {
    /// `ε = √(D / (R·A·rounds))`.
    pub fn from_bounds(d: F, r: F, a: F, rounds: usize) -> Result<Self> {
        if rounds == 0 {
            return Err(RankError::InvalidConfig(
                "FTPL needs at least one round".into(),
            ));
        }
        if !(d > F::zero() && r > F::zero() && a > F::zero()) {
            return Err(RankError::InvalidConfig(
                "FTPL bounds must be positive".into(),
            ));
        }
        let epsilon = (d / (r * a * F::from(rounds).unwrap())).sqrt();
        Ok(Self { epsilon, d, r, a })
    }

    /// Upper end of the per-coordinate perturbation.
    pub fn perturbation_scale(&self) -> F {
        self.epsilon.recip()
    }
}

/// Bounds and `ε` for `measure` with `m` objects, maximum relevance level `n`
/// and `rounds` full-information updates (blocks for the top-1 learner).
pub fn params_for<F: Scalar + Float>(
    measure: Measure,
    m: usize,
    n: u32,
    rounds: usize,
) -> Result<FtplParams<F>> {
    if m == 0 {
        return Err(RankError::InvalidConfig("m must be positive".into()));
    }
    let mf = F::from_count(m as u64);
    let (d, r, a) = match measure {
        Measure::SumLoss | Measure::PairwiseLoss => {
            let d = F::from_count((m * (m + 1) / 2) as u64);
            (d, d, mf)
        }
        Measure::Dcg => {
            let gmax = F::from_count(measure.g_component(n));
            if gmax <= F::zero() {
                return Err(RankError::InvalidConfig(
                    "DCG needs a positive relevance level".into(),
                ));
            }
            let mut d = F::zero();
            for rank in 1..=m {
                d = d + measure.f_component::<F>(rank)?;
            }
            (d, gmax * d, gmax * mf)
        }
        Measure::PrecAtK(k) => {
            if k == 0 || k > m {
                return Err(RankError::KOutOfRange { k, m });
            }
            let k = F::from_count(k as u64);
            (k, k, mf)
        }
        Measure::Ndcg | Measure::Map | Measure::Auc => return Err(RankError::Refused { measure }),
    };
    FtplParams::from_bounds(d, r, a, rounds)
}

/// Per-object accumulated scores.
#[derive(Clone, Debug, PartialEq)]
pub struct ScoreState<F> {
    accumulated: Vec<F>,
    rounds_absorbed: u64,
}

impl<F: Float> ScoreState<F> {
    pub fn new(m: usize) -> Self {
        Self {
            accumulated: vec![F::zero(); m],
            rounds_absorbed: 0,
        }
    }

    pub fn from_scores(accumulated: Vec<F>) -> Self {
        Self {
            accumulated,
            rounds_absorbed: 0,
        }
    }

    pub fn accumulated(&self) -> &[F] {
        &self.accumulated
    }

    pub fn rounds_absorbed(&self) -> u64 {
        self.rounds_absorbed
    }

    pub fn len(&self) -> usize {
        self.accumulated.len()
    }

    pub fn is_empty(&self) -> bool {
        self.accumulated.is_empty()
    }

    pub fn absorb(&mut self, scores: &[F]) -> Result<()> {
        if scores.len() != self.accumulated.len() {
            return Err(RankError::DimensionMismatch {
                expected: self.accumulated.len(),
                found: scores.len(),
            });
        }
        for (acc, &s) in self.accumulated.iter_mut().zip(scores) {
            *acc = *acc + s;
        }
        self.rounds_absorbed += 1;
        Ok(())
    }
}

/// `g(r)` as a score vector.
pub fn transformed<F: Scalar>(measure: Measure, r: &RelevanceVector) -> Vec<F> {
    r.levels()
        .iter()
        .map(|&l| F::from_count(measure.g_component(l)))
        .collect()
}

/// One FTPL draw: `M(accumulated + p)` with `p ~ U[0, 1/ε]^m`.
pub fn ftpl_draw<F: Float, R: Rng + ?Sized>(
    state: &ScoreState<F>,
    params: &FtplParams<F>,
    rng: &mut R,
) -> Permutation {
    let scale = params.perturbation_scale();
    let perturbed: Vec<F> = state
        .accumulated
        .iter()
        .map(|&s| s + scale * F::from(rng.random::<f64>()).unwrap())
        .collect();
    sort_oracle(&perturbed)
}

/// Full-information FTPL: sees the whole relevance vector after each round.
#[derive(Clone, Debug)]
pub struct FtplLearner<F> {
    surrogate: Measure,
    params: FtplParams<F>,
    state: ScoreState<F>,
}

impl<F: Scalar + Float> FtplLearner<F> {
    pub fn new(measure: Measure, m: usize, n: u32, horizon: usize) -> Result<Self> {
        let surrogate = measure
            .linear_surrogate()
            .ok_or(RankError::Refused { measure })?;
        Ok(Self {
            surrogate,
            params: params_for(surrogate, m, n, horizon)?,
            state: ScoreState::new(m),
        })
    }

    pub fn params(&self) -> &FtplParams<F> {
        &self.params
    }

    pub fn state(&self) -> &ScoreState<F> {
        &self.state
    }

    pub fn choose<R: Rng + ?Sized>(&self, rng: &mut R) -> Permutation {
        ftpl_draw(&self.state, &self.params, rng)
    }

    pub fn observe(&mut self, r: &RelevanceVector) -> Result<()> {
        self.state.absorb(&transformed::<F>(self.surrogate, r))
    }
}

/// Plays full-information FTPL over `stream` and scores it with `measure`.
pub fn full_info_run<R: Rng + ?Sized>(
    measure: Measure,
    stream: &[RelevanceVector],
    rng: &mut R,
) -> Result<RegretTrace> {
    let Some(first) = stream.first() else {
        return Ok(RegretTrace::empty(measure));
    };
    let m = first.len();
    let n = stream
        .iter()
        .map(|r| r.max_level())
        .max()
        .unwrap_or(1)
        .max(1);
    let mut learner = FtplLearner::<f64>::new(measure, m, n, stream.len())?;
    let mut plays = Vec::with_capacity(stream.len());
    for r in stream {
        if r.len() != m {
            return Err(RankError::DimensionMismatch {
                expected: m,
                found: r.len(),
            });
        }
        plays.push(learner.choose(rng));
        learner.observe(r)?;
    }
    RegretTrace::from_plays(measure, stream, &plays)
}
