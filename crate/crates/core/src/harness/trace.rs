use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{RankError, Result};
use crate::harness::hindsight::HindsightTracker;
use crate::measures::{Measure, Polarity};
use crate::permutation::Permutation;
use crate::relevance::RelevanceVector;

/// One round of a regret trace. `t` is 1-based; `cum_best` is the value of
/// the best fixed ranking for rounds `1..=t`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub t: u64,
    pub learner_value: f64,
    pub cum_learner: f64,
    pub cum_best: f64,
    pub regret: f64,
    pub norm_regret: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RegretTrace {
    measure: Measure,
    rows: Vec<TraceRow>,
}

impl RegretTrace {
    pub fn empty(measure: Measure) -> Self {
        Self {
            measure,
            rows: Vec::new(),
        }
    }

    pub fn from_rows(measure: Measure, rows: Vec<TraceRow>) -> Self {
        Self { measure, rows }
    }

    /// Scores a sequence of played rankings against the stream.
    pub fn from_plays(
        measure: Measure,
        stream: &[RelevanceVector],
        plays: &[Permutation],
    ) -> Result<Self> {
        if stream.len() != plays.len() {
            return Err(RankError::DimensionMismatch {
                expected: stream.len(),
                found: plays.len(),
            });
        }
        let Some(first) = stream.first() else {
            return Ok(Self::empty(measure));
        };
        let mut tracker = HindsightTracker::new(measure, first.len())?;
        let mut rows = Vec::with_capacity(stream.len());
        let mut cum_learner = 0.0;
        for (t, (r, sigma)) in stream.iter().zip(plays).enumerate() {
            let learner_value: f64 = measure.evaluate(sigma, r)?;
            cum_learner += learner_value;
            tracker.push(r)?;
            let (_, cum_best) = tracker.best()?;
            let regret = match measure.polarity() {
                Polarity::Loss => cum_learner - cum_best,
                Polarity::Gain => cum_best - cum_learner,
            };
            let t = t as u64 + 1;
            rows.push(TraceRow {
                t,
                learner_value,
                cum_learner,
                cum_best,
                regret,
                norm_regret: regret / t as f64,
            });
        }
        Ok(Self { measure, rows })
    }

    pub fn measure(&self) -> Measure {
        self.measure
    }

    pub fn polarity(&self) -> Polarity {
        self.measure.polarity()
    }

    pub fn rows(&self) -> &[TraceRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn final_regret(&self) -> Option<f64> {
        self.rows.last().map(|r| r.regret)
    }

    /// Pointwise arithmetic mean of equally long traces.
    pub fn average(traces: &[RegretTrace]) -> Result<RegretTrace> {
        let first = traces
            .first()
            .ok_or_else(|| RankError::InvalidConfig("no traces to average".into()))?;
        let len = first.len();
        if let Some(bad) = traces.iter().find(|tr| tr.len() != len) {
            return Err(RankError::DimensionMismatch {
                expected: len,
                found: bad.len(),
            });
        }
        let k = traces.len() as f64;
        let rows = (0..len)
            .map(|i| {
                let mean = |f: fn(&TraceRow) -> f64| {
                    traces.iter().map(|tr| f(&tr.rows[i])).sum::<f64>() / k
                };
                TraceRow {
                    t: first.rows[i].t,
                    learner_value: mean(|r| r.learner_value),
                    cum_learner: mean(|r| r.cum_learner),
                    cum_best: mean(|r| r.cum_best),
                    regret: mean(|r| r.regret),
                    norm_regret: mean(|r| r.norm_regret),
                }
            })
            .collect();
        Ok(RegretTrace {
            measure: first.measure,
            rows,
        })
    }

    /// CSV with header `t,learner_value,cum_learner,cum_best,regret,norm_regret`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for row in &self.rows {
            w.serialize(row)?;
        }
        if self.rows.is_empty() {
            w.write_record([
                "t",
                "learner_value",
                "cum_learner",
                "cum_best",
                "regret",
                "norm_regret",
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(measure: Measure, input: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(input);
        let rows = r
            .deserialize()
            .collect::<std::result::Result<Vec<TraceRow>, _>>()?;
        Ok(Self { measure, rows })
    }
}
