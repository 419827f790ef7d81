//! Tunable limits shared by the library and the CLI.

use crate::{decision, tree};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Config {
    /// Depth of the moved-vertex oracle.
    pub max_depth: usize,
    /// Exponent cap for element orders.
    pub order_cap: u32,
    /// Depth cap for locating the first active level.
    pub level_cap: usize,
    /// Longest commutator tower word allowed.
    pub tower_cap: usize,
    /// Length of random-walk samples.
    pub walk_length: usize,
    /// Candidate evaluations for searches.
    pub budget: usize,
    pub seed: u64,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            max_depth: 12,
            order_cap: decision::DEFAULT_ORDER_CAP,
            level_cap: tree::DEFAULT_LEVEL_CAP,
            tower_cap: 1 << 16,
            walk_length: 24,
            budget: 10_000,
            seed: 0,
        }
    }
}
