use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{RankError, Result};
use crate::ftpl::full_info_run;
use crate::harness::adversary::AdversaryConfig;
use crate::harness::trace::RegretTrace;
use crate::measures::Measure;
use crate::relevance::RelevanceVector;
use crate::rtop1f::run_episode;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LearnerKind {
    /// Top-1 feedback, blocked exploration.
    Rtop1f,
    /// Full-information Follow the Perturbed Leader.
    Ftpl,
}

impl fmt::Display for LearnerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LearnerKind::Rtop1f => "rtop1f",
            LearnerKind::Ftpl => "ftpl",
        })
    }
}

impl FromStr for LearnerKind {
    type Err = RankError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rtop1f" => Ok(LearnerKind::Rtop1f),
            "ftpl" => Ok(LearnerKind::Ftpl),
            other => Err(RankError::InvalidConfig(format!(
                "unknown learner `{other}`"
            ))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub measure: Measure,
    pub learner: LearnerKind,
    pub adversary: AdversaryConfig,
    pub runs: usize,
    pub seed: u64,
}

#[derive(Clone, Debug)]
pub struct ExperimentOutput {
    pub stream: Vec<RelevanceVector>,
    pub traces: Vec<RegretTrace>,
    pub averaged: RegretTrace,
}

/// Learner randomness for one replicate: ChaCha8 seeded with
/// `seed + replicate` on stream 1, disjoint from the adversary's stream 0.
pub fn learner_rng(seed: u64, replicate: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(replicate));
    rng.set_stream(1);
    rng
}

/// One learner run over a fixed stream.
pub fn run_learner(
    learner: LearnerKind,
    measure: Measure,
    stream: &[RelevanceVector],
    rng: &mut ChaCha8Rng,
) -> Result<RegretTrace> {
    match learner {
        LearnerKind::Rtop1f => run_episode(measure, stream, rng),
        LearnerKind::Ftpl => full_info_run(measure, stream, rng),
    }
}

/// Generates the adversary's stream once, then runs `runs` independent
/// learner replicates against it and averages their traces.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    if config.measure.linear_surrogate().is_none() {
        return Err(RankError::Refused {
            measure: config.measure,
        });
    }
    if config.runs == 0 {
        return Err(RankError::InvalidConfig("runs must be at least 1".into()));
    }
    let stream = config.adversary.generate()?;
    let traces = (0..config.runs as u64)
        .into_par_iter()
        .map(|k| {
            run_learner(
                config.learner,
                config.measure,
                &stream,
                &mut learner_rng(config.seed, k),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let averaged = RegretTrace::average(&traces)?;
    Ok(ExperimentOutput {
        stream,
        traces,
        averaged,
    })
}
