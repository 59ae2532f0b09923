use std::fmt;

use crate::error::{RankError, Result};

/// Per-object relevance levels in `{0..=max_level}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RelevanceVector {
    levels: Vec<u32>,
    max_level: u32,
}

impl RelevanceVector {
    pub fn new(levels: Vec<u32>, max_level: u32) -> Result<Self> {
        if let Some(&level) = levels.iter().find(|&&l| l > max_level) {
            return Err(RankError::LevelOutOfRange {
                level,
                max: max_level,
            });
        }
        Ok(Self { levels, max_level })
    }

    pub fn binary(levels: Vec<u32>) -> Result<Self> {
        Self::new(levels, 1)
    }

    pub fn zeros(m: usize) -> Self {
        Self {
            levels: vec![0; m],
            max_level: 1,
        }
    }

    pub fn levels(&self) -> &[u32] {
        &self.levels
    }

    pub fn max_level(&self) -> u32 {
        self.max_level
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn level(&self, object: usize) -> u32 {
        self.levels[object]
    }

    /// All entries in `{0, 1}`, whatever the declared maximum level.
    pub fn is_binary(&self) -> bool {
        self.levels.iter().all(|&l| l <= 1)
    }

    pub fn is_zero(&self) -> bool {
        self.levels.iter().all(|&l| l == 0)
    }

    /// Number of objects with non-zero relevance.
    pub fn count_relevant(&self) -> usize {
        self.levels.iter().filter(|&&l| l > 0).count()
    }
}

impl fmt::Display for RelevanceVector {
    /// Bit-string style for binary vectors (`"0101"`), space separated otherwise.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sep = if self.max_level <= 9 && self.len() < 10 {
            ""
        } else {
            " "
        };
        let parts: Vec<String> = self.levels.iter().map(|l| l.to_string()).collect();
        f.write_str(&parts.join(sep))
    }
}
