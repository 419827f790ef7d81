//! Words over the generators `a, b, c, d` and the length-reducing rewriting
//! system `xx -> 1`, `bc -> d`, `bd -> c`, `cd -> b`.
//!
//! A [`ReducedWord`] is a representative of a group element, not a normal
//! form: two different reduced words can denote the same element (for
//! instance `adadadad` and the empty word). Use [`crate::decision`] to compare
//! elements.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// One of the four generators. All of them are involutions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(u8)]
pub enum Letter {
    A = 0,
    B = 1,
    C = 2,
    D = 3,
}

impl Letter {
    pub const ALL: [Letter; 4] = [Letter::A, Letter::B, Letter::C, Letter::D];

    pub fn from_char(ch: char) -> Option<Letter> {
        match ch {
            'a' => Some(Letter::A),
            'b' => Some(Letter::B),
            'c' => Some(Letter::C),
            'd' => Some(Letter::D),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Letter::A => 'a',
            Letter::B => 'b',
            Letter::C => 'c',
            Letter::D => 'd',
        }
    }

    #[inline]
    pub fn is_rooted(self) -> bool {
        self == Letter::A
    }

    // b, c, d are 1, 2, 3 and the Klein four-group law is xor.
    #[inline]
    fn klein(self, other: Letter) -> Letter {
        match (self as u8) ^ (other as u8) {
            1 => Letter::B,
            2 => Letter::C,
            3 => Letter::D,
            _ => unreachable!("klein product of equal or rooted letters"),
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// Incremental reducer: pushing letters one at a time keeps the buffer
/// reduced. Each push costs amortized O(1).
#[derive(Clone, Debug, Default)]
pub struct Reducer {
    stack: Vec<Letter>,
}

impl Reducer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(cap: usize) -> Self {
        Reducer {
            stack: Vec::with_capacity(cap),
        }
    }

    /// Starts from an already reduced word.
    pub fn from_reduced(w: &ReducedWord) -> Self {
        Reducer {
            stack: w.letters.clone(),
        }
    }

    #[inline]
    pub fn push(&mut self, x: Letter) {
        match self.stack.last().copied() {
            None => self.stack.push(x),
            Some(top) if top == x => {
                self.stack.pop();
            }
            Some(top) if !top.is_rooted() && !x.is_rooted() => {
                self.stack.pop();
                // The new top is `a` or nothing, so the merged letter cannot
                // cascade further.
                self.stack.push(top.klein(x));
            }
            Some(_) => self.stack.push(x),
        }
    }

    pub fn extend<I: IntoIterator<Item = Letter>>(&mut self, letters: I) {
        for x in letters {
            self.push(x);
        }
    }

    pub fn len(&self) -> usize {
        self.stack.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stack.is_empty()
    }

    pub fn finish(self) -> ReducedWord {
        ReducedWord {
            letters: self.stack,
        }
    }
}

/// A word with no adjacent equal letters and no two adjacent letters from
/// `{b, c, d}`; letters therefore alternate between `a` and `{b, c, d}`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ReducedWord {
    letters: Vec<Letter>,
}

/// Returns the fixpoint of the rewriting system on `raw`.
pub fn reduce(raw: &[Letter]) -> ReducedWord {
    let mut r = Reducer::with_capacity(raw.len());
    r.extend(raw.iter().copied());
    r.finish()
}

impl ReducedWord {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn letter(x: Letter) -> Self {
        ReducedWord { letters: vec![x] }
    }

    /// Parses a literal, reducing it. `"1"` and `""` both denote the identity.
    pub fn parse(literal: &str) -> Result<Self, Error> {
        Ok(reduce(&parse_letters(literal)?))
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn a_count(&self) -> usize {
        self.letters.iter().filter(|l| l.is_rooted()).count()
    }

    /// Parity of the number of `a` letters; `true` means the element swaps
    /// the two halves of the tree.
    pub fn is_odd(&self) -> bool {
        self.a_count() % 2 == 1
    }

    pub fn multiply(&self, other: &ReducedWord) -> ReducedWord {
        let mut r = Reducer {
            stack: Vec::with_capacity(self.len() + other.len()),
        };
        r.stack.extend_from_slice(&self.letters);
        r.extend(other.letters.iter().copied());
        r.finish()
    }

    /// Every letter is an involution, so the inverse is the reversal.
    pub fn invert(&self) -> ReducedWord {
        let mut letters = self.letters.clone();
        letters.reverse();
        ReducedWord { letters }
    }

    /// `g^-1 self g`.
    pub fn conjugate(&self, g: &ReducedWord) -> ReducedWord {
        let mut r = Reducer::with_capacity(self.len() + 2 * g.len());
        r.extend(g.letters.iter().rev().copied());
        r.extend(self.letters.iter().copied());
        r.extend(g.letters.iter().copied());
        r.finish()
    }

    /// Integer power by repeated squaring; negative exponents invert first.
    pub fn pow(&self, e: i64) -> ReducedWord {
        let mut base = if e < 0 { self.invert() } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = ReducedWord::identity();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.multiply(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.multiply(&base);
            }
        }
        acc
    }

    pub fn square(&self) -> ReducedWord {
        self.multiply(self)
    }
}

/// `[x, g] = x^-1 x^g = x^-1 g^-1 x g`.
pub fn commutator(x: &ReducedWord, g: &ReducedWord) -> ReducedWord {
    let mut r = Reducer::with_capacity(2 * (x.len() + g.len()));
    r.extend(x.letters.iter().rev().copied());
    r.extend(g.letters.iter().rev().copied());
    r.extend(x.letters.iter().copied());
    r.extend(g.letters.iter().copied());
    r.finish()
}

/// Parses a literal into raw (unreduced) letters.
pub fn parse_letters(literal: &str) -> Result<Vec<Letter>, Error> {
    if literal == "1" {
        return Ok(Vec::new());
    }
    literal
        .chars()
        .enumerate()
        .map(|(position, ch)| {
            Letter::from_char(ch).ok_or_else(|| Error::Parse {
                literal: literal.to_string(),
                position,
                expected: "one of a, b, c, d (or the literal 1)",
            })
        })
        .collect()
}

impl fmt::Display for ReducedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return f.write_str("1");
        }
        for l in &self.letters {
            write!(f, "{}", l.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for ReducedWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        ReducedWord::parse(s)
    }
}

impl Serialize for ReducedWord {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ReducedWord {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        ReducedWord::parse(&s).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> ReducedWord {
        ReducedWord::parse(s).unwrap()
    }

    #[test]
    fn reduce_examples() {
        assert_eq!(w("aa"), ReducedWord::identity());
        assert_eq!(w("bc").to_string(), "d");
        assert_eq!(w("abba"), ReducedWord::identity());
        assert_eq!(w("bcd"), ReducedWord::identity());
        assert_eq!(w("abcda").to_string(), "1");
        assert_eq!(w("dbcbd").to_string(), "c");
    }

    #[test]
    fn multiply_examples() {
        assert_eq!(ReducedWord::identity().multiply(&w("ab")), w("ab"));
        assert!(w("ab").multiply(&w("ba")).is_empty());
        assert_eq!(w("b").multiply(&w("c")), w("d"));
        // abcd -> ab(cd) -> abb -> a
        assert_eq!(w("ab").multiply(&w("cd")), w("a"));
    }

    #[test]
    fn invert_examples() {
        assert_eq!(w("ab").invert(), w("ba"));
        assert_eq!(ReducedWord::identity().invert(), ReducedWord::identity());
        assert_eq!(w("abad").invert().to_string(), "daba");
    }

    #[test]
    fn commutator_examples() {
        let x = w("abacab");
        assert!(commutator(&x, &ReducedWord::identity()).is_empty());
        assert!(commutator(&x, &x).is_empty());
        assert_eq!(commutator(&w("a"), &w("b")), w("abab"));
    }

    #[test]
    fn pow_matches_repeated_multiplication() {
        let g = w("abac");
        let mut acc = ReducedWord::identity();
        for e in 0..9 {
            assert_eq!(g.pow(e), acc);
            acc = acc.multiply(&g);
        }
        assert_eq!(g.pow(-3), g.pow(3).invert());
    }

    #[test]
    fn literals() {
        assert_eq!(ReducedWord::identity().to_string(), "1");
        assert_eq!(w("1"), ReducedWord::identity());
        assert_eq!(w(""), ReducedWord::identity());
        match ReducedWord::parse("abxa") {
            Err(Error::Parse { position, .. }) => assert_eq!(position, 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(ReducedWord::parse("a1").is_err());
    }

    #[test]
    fn shape_invariant() {
        let r = w("bcbdabcaddabbbcacda");
        for pair in r.letters().windows(2) {
            assert_ne!(pair[0], pair[1]);
            assert!(pair[0].is_rooted() || pair[1].is_rooted());
        }
    }
}
