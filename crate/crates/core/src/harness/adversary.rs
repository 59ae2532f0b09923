//! Oblivious adversaries: every stream is fixed before a learner plays.

use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{RankError, Result};
use crate::harness::stream::read_stream;
use crate::relevance::RelevanceVector;

#[derive(Clone, Debug, PartialEq)]
pub enum AdversaryKind {
    /// Base vector with the first `⌈m/2⌉` objects relevant; each round
    /// `r(i) = 1` iff `base(i) + N(0, sd²) > 0.5`.
    NoisyFixed { noise_sd: f64 },
    /// Independent `r(i) ~ Bernoulli(p_i)`.
    IidBernoulli { probs: Vec<f64> },
    /// Replays a stream file.
    Replay { path: PathBuf },
    /// Graded analogue of `NoisyFixed` on levels `0..=levels`:
    /// `clamp(round(base(i) + levels·N(0, sd²)), 0, levels)` with `base(i)`
    /// equal to `levels` on the first `⌈m/2⌉` objects and 0 elsewhere.
    GradedNoisyFixed { levels: u32, noise_sd: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct AdversaryConfig {
    pub kind: AdversaryKind,
    pub m: usize,
    pub horizon: usize,
    pub seed: u64,
}

/// Default Bernoulli parameters: object `i` (0-based) is relevant with
/// probability `(m - i)/(m + 1)`.
pub fn default_probs(m: usize) -> Vec<f64> {
    (0..m).map(|i| (m - i) as f64 / (m + 1) as f64).collect()
}

fn noise(sd: f64) -> Result<Normal<f64>> {
    if !(sd >= 0.0 && sd.is_finite()) {
        return Err(RankError::InvalidConfig(format!(
            "noise sd must be finite and >= 0, got {sd}"
        )));
    }
    Normal::new(0.0, sd).map_err(|e| RankError::InvalidConfig(e.to_string()))
}

impl AdversaryConfig {
    pub fn new(kind: AdversaryKind, m: usize, horizon: usize, seed: u64) -> Self {
        Self {
            kind,
            m,
            horizon,
            seed,
        }
    }

    /// Adversary randomness: ChaCha8 on stream 0 of `seed`.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(0);
        rng
    }

    /// Largest relevance level the adversary can emit.
    pub fn max_level(&self) -> u32 {
        match &self.kind {
            AdversaryKind::GradedNoisyFixed { levels, .. } => *levels,
            _ => 1,
        }
    }

    pub fn generate(&self) -> Result<Vec<RelevanceVector>> {
        if self.m == 0 {
            return Err(RankError::InvalidConfig("m must be positive".into()));
        }
        let m = self.m;
        let relevant = m.div_ceil(2);
        let mut rng = self.rng();
        match &self.kind {
            AdversaryKind::NoisyFixed { noise_sd } => {
                let dist = noise(*noise_sd)?;
                (0..self.horizon)
                    .map(|_| {
                        let levels = (0..m)
                            .map(|i| {
                                let base = if i < relevant { 1.0 } else { 0.0 };
                                u32::from(base + dist.sample(&mut rng) > 0.5)
                            })
                            .collect();
                        RelevanceVector::binary(levels)
                    })
                    .collect()
            }
            AdversaryKind::GradedNoisyFixed {
                levels: n,
                noise_sd,
            } => {
                if *n == 0 {
                    return Err(RankError::InvalidConfig(
                        "graded adversary needs levels >= 1".into(),
                    ));
                }
                let dist = noise(*noise_sd)?;
                let top = f64::from(*n);
                (0..self.horizon)
                    .map(|_| {
                        let levels = (0..m)
                            .map(|i| {
                                let base = if i < relevant { top } else { 0.0 };
                                (base + top * dist.sample(&mut rng)).round().clamp(0.0, top) as u32
                            })
                            .collect();
                        RelevanceVector::new(levels, *n)
                    })
                    .collect()
            }
            AdversaryKind::IidBernoulli { probs } => {
                if probs.len() != m {
                    return Err(RankError::DimensionMismatch {
                        expected: m,
                        found: probs.len(),
                    });
                }
                if let Some(p) = probs.iter().find(|p| !(0.0..=1.0).contains(*p)) {
                    return Err(RankError::InvalidConfig(format!(
                        "probability {p} outside [0, 1]"
                    )));
                }
                (0..self.horizon)
                    .map(|_| {
                        let levels = probs
                            .iter()
                            .map(|&p| u32::from(rng.random::<f64>() < p))
                            .collect();
                        RelevanceVector::binary(levels)
                    })
                    .collect()
            }
            AdversaryKind::Replay { path } => {
                let (header, mut stream) = read_stream(BufReader::new(File::open(path)?))?;
                if header.m != m {
                    return Err(RankError::DimensionMismatch {
                        expected: m,
                        found: header.m,
                    });
                }
                if self.horizon > stream.len() {
                    return Err(RankError::InvalidConfig(format!(
                        "replay file has {} rounds, {} requested",
                        stream.len(),
                        self.horizon
                    )));
                }
                stream.truncate(self.horizon);
                Ok(stream)
            }
        }
    }
}
