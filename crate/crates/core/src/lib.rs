//! Online ranking of a fixed set of `m` objects when the learner only sees
//! the relevance of the object it placed on top.
//!
//! The crate is organised bottom-up:
//!
//! - [`measures`]: ranking measures (SumLoss, PairwiseLoss, DCG, Prec@k, NDCG,
//!   MAP, AUC), their `f(σ)·g(r)` decompositions and the sorting oracle.
//! - [`game`]: explicit loss, feedback and signal matrices for small `m`.
//! - [`observability`]: span-membership checks behind the global/local
//!   observability classification, Pareto witnesses and neighbor structure.
//! - [`ftpl`]: Follow-the-Perturbed-Leader and the full-information baseline.
//! - [`rtop1f`]: the blocked explore/exploit learner driven by top-1 feedback.
//! - [`harness`]: adversaries, best-in-hindsight oracles, regret traces,
//!   slope fits and experiment orchestration.
//!
//! Conventions: objects and action indices are 0-based indices into vectors;
//! ranks are 1-based everywhere (rank 1 is the top of the list), so
//! `σ.rank_of(i)` is the usual `σ(i)`.
//!
//! Core numerics are generic over [`Scalar`]; `f64` is the workhorse, and
//! [`Rational`] evaluates the rational-valued measures exactly.

pub mod error;
pub mod ftpl;
pub mod game;
pub mod harness;
pub mod measures;
pub mod observability;
pub mod permutation;
pub mod relevance;
pub mod rtop1f;
pub mod scalar;

pub use error::{RankError, Result};
pub use game::{
    build_game, enumerate_permutations, enumerate_relevance, GameMatrices, SignalMatrix,
};
pub use measures::{sort_oracle, Measure, Polarity};
pub use permutation::Permutation;
pub use relevance::RelevanceVector;
pub use scalar::Scalar;

/// Exact rational scalar.
pub type Rational = num_rational::Ratio<i64>;

/// Game matrices in double precision.
pub type Game = GameMatrices<f64>;
/// Game matrices in exact rational arithmetic (measures without irrational discounts).
pub type ExactGame = GameMatrices<Rational>;
/// Game matrices in single precision.
pub type Game32 = GameMatrices<f32>;

pub type FtplParams64 = ftpl::FtplParams<f64>;
pub type ScoreState64 = ftpl::ScoreState<f64>;
pub type Rtop1f64 = rtop1f::Rtop1f<f64>;
pub type SpanBasis64 = observability::SpanBasis<f64>;
