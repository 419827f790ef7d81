//! Word problem, equality and element orders.
//!
//! [`is_trivial`] is the contracting recursion: an element is trivial iff it
//! does not swap the root and both of its first-level sections are trivial.
//! Sections of a reduced word of length `n >= 2` have length at most
//! `(n + 1) / 2`, so the recursion terminates. [`witness_vertex`] is an
//! independent check that only uses the generator permutations on a finite
//! level.

use std::num::NonZeroUsize;
use std::sync::{Mutex, OnceLock};

use lru::LruCache;
use serde::{Deserialize, Serialize};

use crate::tree::{self, Vertex};
use crate::words::ReducedWord;

/// Default number of memoized triviality results.
pub const DEFAULT_CACHE_CAPACITY: usize = 1 << 20;
/// Words longer than this are not memoized; their sections are.
pub const MEMO_MAX_LEN: usize = 512;
/// Default exponent cap for [`order`]: orders up to `2^12`.
pub const DEFAULT_ORDER_CAP: u32 = 12;
/// Deepest level the permutation oracle will build (`2^24` vertices).
pub const MAX_ORACLE_DEPTH: usize = 24;

fn cache() -> &'static Mutex<LruCache<ReducedWord, bool>> {
    static CACHE: OnceLock<Mutex<LruCache<ReducedWord, bool>>> = OnceLock::new();
    CACHE.get_or_init(|| {
        Mutex::new(LruCache::new(
            NonZeroUsize::new(DEFAULT_CACHE_CAPACITY).unwrap(),
        ))
    })
}

/// Decides whether `g` is the identity.
pub fn is_trivial(g: &ReducedWord) -> bool {
    if g.is_odd() {
        return false;
    }
    if g.len() <= 1 {
        return g.is_empty();
    }
    let memo = g.len() <= MEMO_MAX_LEN;
    if memo {
        if let Some(&hit) = cache().lock().unwrap().get(g) {
            return hit;
        }
    }
    let d = tree::decompose(g);
    let bound = g.len().div_ceil(2);
    assert!(
        d.left.len() <= bound && d.right.len() <= bound,
        "contraction bound violated for {g}: sections {} and {} exceed {bound}",
        d.left,
        d.right
    );
    let result = is_trivial(&d.left) && is_trivial(&d.right);
    if memo {
        cache().lock().unwrap().put(g.clone(), result);
    }
    result
}

pub fn are_equal(g: &ReducedWord, h: &ReducedWord) -> bool {
    is_trivial(&g.multiply(&h.invert()))
}

/// Least-depth, lexicographically least vertex of depth at most `max_depth`
/// moved by `g`, found from the level-`max_depth` permutation.
///
/// # Panics
///
/// If `max_depth` exceeds [`MAX_ORACLE_DEPTH`].
pub fn witness_vertex(g: &ReducedWord, max_depth: usize) -> Option<Vertex> {
    assert!(
        max_depth <= MAX_ORACLE_DEPTH,
        "oracle depth {max_depth} above {MAX_ORACLE_DEPTH}"
    );
    let perm = tree::level_perm(g, max_depth);
    // A leaf v whose image first differs at position i witnesses that the
    // prefix of v of length i + 1 is moved.
    let mut best: Option<(usize, usize)> = None;
    for (v, &img) in perm.images.iter().enumerate() {
        let diff = v ^ img as usize;
        if diff == 0 {
            continue;
        }
        let top = usize::BITS as usize - 1 - diff.leading_zeros() as usize;
        let depth = max_depth - top;
        let prefix = v >> top;
        if best.is_none_or(|b| (depth, prefix) < b) {
            best = Some((depth, prefix));
        }
    }
    best.map(|(depth, prefix)| Vertex::from_index(prefix, depth))
}

/// Least-depth, lexicographically least vertex moved by `g`, at any depth;
/// `None` iff `g` is trivial. Searches level by level through the sections,
/// pruning trivial ones.
pub fn moved_vertex(g: &ReducedWord) -> Option<Vertex> {
    let mut frontier = vec![(Vertex::root(), g.clone())];
    loop {
        frontier.retain(|(_, w)| !is_trivial(w));
        if frontier.is_empty() {
            return None;
        }
        if let Some((v, _)) = frontier.iter().find(|(_, w)| w.is_odd()) {
            return Some(v.child(0));
        }
        frontier = frontier
            .into_iter()
            .flat_map(|(v, w)| {
                let d = tree::decompose(&w);
                [(v.child(0), d.left), (v.child(1), d.right)]
            })
            .collect();
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrderResult {
    /// The order, always a power of two.
    Exact(u64),
    /// `g^(2^cap)` is still nontrivial.
    ExceededCap(u32),
}

impl OrderResult {
    pub fn exact(self) -> Option<u64> {
        match self {
            OrderResult::Exact(n) => Some(n),
            OrderResult::ExceededCap(_) => None,
        }
    }
}

/// Order of `g` by repeated squaring, testing `g^(2^k)` for `k = 0..=cap`.
pub fn order(g: &ReducedWord, cap: u32) -> OrderResult {
    let mut power = g.clone();
    for k in 0..=cap {
        if is_trivial(&power) {
            return OrderResult::Exact(1 << k);
        }
        if k < cap {
            power = power.square();
        }
    }
    OrderResult::ExceededCap(cap)
}

/// Order of the permutation `g` induces on level `n`.
pub fn level_order(g: &ReducedWord, n: usize) -> u64 {
    tree::level_perm(g, n).order()
}
