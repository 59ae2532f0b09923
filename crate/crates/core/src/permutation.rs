use std::fmt;

use crate::error::{RankError, Result};

/// A ranking of `m` objects.
///
/// Stored as the forward map: `ranks[i]` is the 1-based rank of object `i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    ranks: Vec<usize>,
}

impl Permutation {
    /// Builds a permutation from its rank vector (`ranks[i]` = rank of object `i`, 1-based).
    pub fn new(ranks: Vec<usize>) -> Result<Self> {
        let m = ranks.len();
        let mut seen = vec![false; m];
        for &r in &ranks {
            if r == 0 || r > m {
                return Err(RankError::InvalidPermutation(format!(
                    "rank {r} outside 1..={m}"
                )));
            }
            if std::mem::replace(&mut seen[r - 1], true) {
                return Err(RankError::InvalidPermutation(format!("rank {r} repeated")));
            }
        }
        Ok(Self { ranks })
    }

    pub fn identity(m: usize) -> Self {
        Self {
            ranks: (1..=m).collect(),
        }
    }

    /// Builds a permutation from the objects listed best-first.
    pub fn from_order(objects: &[usize]) -> Result<Self> {
        let m = objects.len();
        let mut ranks = vec![0; m];
        for (pos, &obj) in objects.iter().enumerate() {
            if obj >= m {
                return Err(RankError::InvalidPermutation(format!(
                    "object {obj} outside 0..{m}"
                )));
            }
            if ranks[obj] != 0 {
                return Err(RankError::InvalidPermutation(format!(
                    "object {obj} listed twice"
                )));
            }
            ranks[obj] = pos + 1;
        }
        Ok(Self { ranks })
    }

    /// Puts `object` on top and the remaining objects below it in ascending index order.
    pub fn with_on_top(m: usize, object: usize) -> Result<Self> {
        if object >= m {
            return Err(RankError::IndexOutOfRange {
                index: object,
                len: m,
            });
        }
        let order: Vec<usize> = std::iter::once(object)
            .chain((0..m).filter(|&o| o != object))
            .collect();
        Self::from_order(&order)
    }

    pub fn len(&self) -> usize {
        self.ranks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranks.is_empty()
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    /// `σ(object)`, 1-based.
    pub fn rank_of(&self, object: usize) -> usize {
        self.ranks[object]
    }

    /// Objects in rank order: `inverse()[j]` is the object at rank `j + 1`.
    pub fn inverse(&self) -> Vec<usize> {
        let mut inv = vec![0; self.ranks.len()];
        for (obj, &r) in self.ranks.iter().enumerate() {
            inv[r - 1] = obj;
        }
        inv
    }

    /// `σ⁻¹(rank)` for a 1-based rank.
    pub fn object_at(&self, rank: usize) -> usize {
        self.ranks
            .iter()
            .position(|&r| r == rank)
            .expect("rank within 1..=m")
    }

    /// The object placed at rank 1.
    pub fn top(&self) -> usize {
        self.object_at(1)
    }

    /// True iff `other` is `self` with two objects at consecutive ranks swapped.
    pub fn is_adjacent_swap_of(&self, other: &Permutation) -> bool {
        if self.len() != other.len() {
            return false;
        }
        let diff: Vec<usize> = (0..self.len())
            .filter(|&i| self.ranks[i] != other.ranks[i])
            .collect();
        match diff[..] {
            [a, b] => {
                self.ranks[a] == other.ranks[b]
                    && self.ranks[b] == other.ranks[a]
                    && self.ranks[a].abs_diff(self.ranks[b]) == 1
            }
            _ => false,
        }
    }
}

impl fmt::Display for Permutation {
    /// Rank vector, digits concatenated when `m < 10` (`"312"`), space separated otherwise.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sep = if self.len() < 10 { "" } else { " " };
        let parts: Vec<String> = self.ranks.iter().map(|r| r.to_string()).collect();
        f.write_str(&parts.join(sep))
    }
}
