//! Seeded random words. Every sampler draws from a caller-supplied
//! [`ChaCha8Rng`] so results depend only on the seed.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::words::{reduce, Letter, ReducedWord, Reducer};

pub use rand::SeedableRng;

pub type WordRng = ChaCha8Rng;

pub fn rng(seed: u64) -> WordRng {
    ChaCha8Rng::seed_from_u64(seed)
}

const BCD: [Letter; 3] = [Letter::B, Letter::C, Letter::D];

/// Uniform letters, not reduced.
pub fn raw_letters(rng: &mut WordRng, len: usize) -> Vec<Letter> {
    (0..len).map(|_| Letter::ALL[rng.gen_range(0..4)]).collect()
}

/// A reduced word of exactly `len` letters: a random walk that alternates
/// between `a` and a uniform member of `{b, c, d}`.
pub fn random_walk(rng: &mut WordRng, len: usize) -> ReducedWord {
    let mut r = Reducer::with_capacity(len);
    let mut rooted = rng.gen_bool(0.5);
    for _ in 0..len {
        r.push(if rooted {
            Letter::A
        } else {
            BCD[rng.gen_range(0..3)]
        });
        rooted = !rooted;
    }
    debug_assert_eq!(r.len(), len);
    r.finish()
}

/// A random walk whose length is uniform in `1..=max_len`.
pub fn random_word(rng: &mut WordRng, max_len: usize) -> ReducedWord {
    let len = rng.gen_range(1..=max_len.max(1));
    random_walk(rng, len)
}

/// A random element of the first-level stabilizer (even number of `a`).
pub fn random_even_word(rng: &mut WordRng, max_len: usize) -> ReducedWord {
    let w = random_word(rng, max_len);
    if w.is_odd() {
        // Dropping or appending an `a` fixes the parity.
        match w.letters().first() {
            Some(Letter::A) => reduce(&w.letters()[1..]),
            _ => ReducedWord::letter(Letter::A).multiply(&w),
        }
    } else {
        w
    }
}

/// A random word with an odd number of `a`.
pub fn random_odd_word(rng: &mut WordRng, max_len: usize) -> ReducedWord {
    ReducedWord::letter(Letter::A).multiply(&random_even_word(rng, max_len))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_given_seed() {
        let a: Vec<_> = (0..5).map({ let mut r = rng(7); move |_| random_word(&mut r, 20) }).collect();
        let b: Vec<_> = (0..5).map({ let mut r = rng(7); move |_| random_word(&mut r, 20) }).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn parities() {
        let mut r = rng(1);
        for _ in 0..200 {
            assert!(!random_even_word(&mut r, 15).is_odd());
            assert!(random_odd_word(&mut r, 15).is_odd());
            assert_eq!(random_walk(&mut r, 9).len(), 9);
        }
    }
}
