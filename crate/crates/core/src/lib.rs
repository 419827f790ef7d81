//! Exact computation in the first Grigorchuk group: reduced words, the
//! wreath recursion, the word problem, the branching subgroup `K`, and
//! certificates for bounded Engel refutations.

pub mod branch;
pub mod certificate;
pub mod cli;
pub mod config;
pub mod decision;
pub mod engel;
pub mod error;
pub mod perm;
pub mod sample;
pub mod tree;
pub mod words;

pub use config::Config;
pub use error::{Error, Result};
pub use words::{Letter, ReducedWord};
