//! Loss, feedback and signal matrices of the top-1 feedback game.
//!
//! Actions are the `m!` rankings in lexicographic order of their rank vectors;
//! outcomes are the `2^m` binary relevance vectors in counter order with
//! object 0 as the most significant bit. For `m = 3` this reproduces the
//! row/column order `123, 132, …, 321` × `000, 001, …, 111`.

use std::io::Write;

use itertools::Itertools;

use crate::error::{RankError, Result};
use crate::measures::{Measure, Polarity};
use crate::permutation::Permutation;
use crate::relevance::RelevanceVector;
use crate::scalar::Scalar;

pub const MAX_GAME_OBJECTS: usize = 8;
pub const MAX_OUTCOME_OBJECTS: usize = 20;

/// All `m!` rankings, lexicographic by rank vector.
pub fn enumerate_permutations(m: usize) -> Result<Vec<Permutation>> {
    if !(1..=MAX_GAME_OBJECTS).contains(&m) {
        return Err(RankError::OutOfRange {
            what: "m",
            value: m,
            min: 1,
            max: MAX_GAME_OBJECTS,
        });
    }
    Ok((1..=m)
        .permutations(m)
        .map(|ranks| Permutation::new(ranks).expect("itertools yields bijections"))
        .collect())
}

/// All `2^m` binary relevance vectors, object 0 as the most significant bit.
pub fn enumerate_relevance(m: usize) -> Result<Vec<RelevanceVector>> {
    if !(1..=MAX_OUTCOME_OBJECTS).contains(&m) {
        return Err(RankError::OutOfRange {
            what: "m",
            value: m,
            min: 1,
            max: MAX_OUTCOME_OBJECTS,
        });
    }
    Ok((0..1usize << m)
        .map(|code| {
            let levels = (0..m).map(|i| ((code >> (m - 1 - i)) & 1) as u32).collect();
            RelevanceVector::binary(levels).expect("bits are binary")
        })
        .collect())
}

/// Dense `m! × 2^m` loss and feedback matrices for one measure.
#[derive(Clone, Debug)]
pub struct GameMatrices<S> {
    m: usize,
    measure: Measure,
    actions: Vec<Permutation>,
    outcomes: Vec<RelevanceVector>,
    loss: Vec<S>,
    feedback: Vec<u8>,
}

/// Builds `L` and `H` for `measure` on binary relevance.
pub fn build_game<S: Scalar>(measure: Measure, m: usize) -> Result<GameMatrices<S>> {
    if let Measure::PrecAtK(k) = measure {
        if k == 0 || k > m {
            return Err(RankError::KOutOfRange { k, m });
        }
    }
    let actions = enumerate_permutations(m)?;
    let outcomes = enumerate_relevance(m)?;
    let mut loss = Vec::with_capacity(actions.len() * outcomes.len());
    let mut feedback = Vec::with_capacity(actions.len() * outcomes.len());
    for sigma in &actions {
        let top = sigma.top();
        for r in &outcomes {
            loss.push(measure.evaluate::<S>(sigma, r)?);
            feedback.push(r.level(top) as u8);
        }
    }
    Ok(GameMatrices {
        m,
        measure,
        actions,
        outcomes,
        loss,
        feedback,
    })
}

impl<S: Scalar> GameMatrices<S> {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn measure(&self) -> Measure {
        self.measure
    }

    pub fn polarity(&self) -> Polarity {
        self.measure.polarity()
    }

    pub fn actions(&self) -> &[Permutation] {
        &self.actions
    }

    pub fn outcomes(&self) -> &[RelevanceVector] {
        &self.outcomes
    }

    pub fn n_actions(&self) -> usize {
        self.actions.len()
    }

    pub fn n_outcomes(&self) -> usize {
        self.outcomes.len()
    }

    /// Row `ℓ_i` of the loss (or gain) matrix.
    pub fn loss_row(&self, action: usize) -> &[S] {
        let w = self.n_outcomes();
        &self.loss[action * w..(action + 1) * w]
    }

    pub fn loss(&self, action: usize, outcome: usize) -> &S {
        &self.loss_row(action)[outcome]
    }

    pub fn feedback_row(&self, action: usize) -> &[u8] {
        let w = self.n_outcomes();
        &self.feedback[action * w..(action + 1) * w]
    }

    pub fn feedback(&self, action: usize, outcome: usize) -> u8 {
        self.feedback_row(action)[outcome]
    }

    pub fn action_index(&self, sigma: &Permutation) -> Option<usize> {
        self.actions.binary_search(sigma).ok()
    }

    /// `ℓ_i - ℓ_j`.
    pub fn loss_difference(&self, i: usize, j: usize) -> Vec<S> {
        self.loss_row(i)
            .iter()
            .zip(self.loss_row(j))
            .map(|(a, b)| a.clone() - b.clone())
            .collect()
    }

    pub fn signal_matrix(&self, action: usize) -> Result<SignalMatrix> {
        if action >= self.n_actions() {
            return Err(RankError::IndexOutOfRange {
                index: action,
                len: self.n_actions(),
            });
        }
        let h = self.feedback_row(action);
        Ok(SignalMatrix {
            action,
            rows: [h.iter().map(|&x| u8::from(x == 0)).collect(), h.to_vec()],
        })
    }

    fn header(&self) -> Vec<String> {
        std::iter::once("action".to_string())
            .chain(self.outcomes.iter().map(|r| r.to_string()))
            .collect()
    }

    /// Writes `L` as CSV: header of outcome bit strings, one row per action.
    pub fn write_loss_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(self.header())?;
        for (i, sigma) in self.actions.iter().enumerate() {
            let row = std::iter::once(sigma.to_string())
                .chain(self.loss_row(i).iter().map(|v| v.to_string()));
            w.write_record(row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_feedback_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(self.header())?;
        for (i, sigma) in self.actions.iter().enumerate() {
            let row = std::iter::once(sigma.to_string())
                .chain(self.feedback_row(i).iter().map(|v| v.to_string()));
            w.write_record(row)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// `S_i ∈ {0,1}^{2 × 2^m}`: row 0 flags outcomes with feedback 0, row 1 those with feedback 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignalMatrix {
    pub action: usize,
    pub rows: [Vec<u8>; 2],
}

impl SignalMatrix {
    /// Columns of `S_iᵀ`, i.e. the two rows as real vectors.
    pub fn transposed_columns<F: Scalar>(&self) -> [Vec<F>; 2] {
        let conv = |row: &Vec<u8>| row.iter().map(|&x| F::from_count(u64::from(x))).collect();
        [conv(&self.rows[0]), conv(&self.rows[1])]
    }

    pub fn write_csv<W: Write>(&self, outcomes: &[RelevanceVector], out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(
            std::iter::once("signal".to_string()).chain(outcomes.iter().map(|r| r.to_string())),
        )?;
        for (label, row) in ["0", "1"].iter().zip(&self.rows) {
            w.write_record(
                std::iter::once(label.to_string()).chain(row.iter().map(|v| v.to_string())),
            )?;
        }
        w.flush()?;
        Ok(())
    }
}
