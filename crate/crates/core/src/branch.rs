//! The branching subgroup `K`, the normal closure of `t = (ab)^2`.
//!
//! Elements of `K` are built constructively as [`TWord`]s, formal products of
//! signed conjugates of `t`. Membership of arbitrary words is decided in the
//! finite quotient of the group acting on a level of the tree, at a level
//! where the index of the image of `K` has stopped growing.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigUint;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::decision::{self, OrderResult};
use crate::error::{Error, Result};
use crate::perm::{normal_closure, Perm, StabChain};
use crate::sample::{self, WordRng};
use crate::tree;
use crate::words::{Letter, ReducedWord, Reducer};

/// Deepest level used for quotients.
pub const MAX_QUOTIENT_LEVEL: usize = 8;
/// Number of consecutive levels with equal index needed to certify.
pub const PLATEAU_WIDTH: usize = 3;
/// Starting conjugator length bound for [`search_high_order`].
pub const CONJUGATOR_BOUND: usize = 12;

/// `(t, u, v)` with `t = (ab)^2`, `u = (bada)^2 = (t, 1)` and
/// `v = (abad)^2 = (1, t)`.
pub fn k_generators() -> (ReducedWord, ReducedWord, ReducedWord) {
    let p = |s: &str| ReducedWord::parse(s).expect("static literal");
    (p("ab").pow(2), p("bada").pow(2), p("abad").pow(2))
}

pub fn t() -> ReducedWord {
    k_generators().0
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

/// `(t^conjugator)^sign`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Factor {
    pub conjugator: ReducedWord,
    pub sign: Sign,
}

impl Factor {
    pub fn new(conjugator: ReducedWord, sign: Sign) -> Self {
        Factor { conjugator, sign }
    }
}

/// A formal product of signed conjugates of `t`; every value lies in `K`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct TWord {
    factors: Vec<Factor>,
}

impl TWord {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn t() -> Self {
        TWord {
            factors: vec![Factor::new(ReducedWord::identity(), Sign::Plus)],
        }
    }

    pub fn from_factors(factors: Vec<Factor>) -> Self {
        TWord { factors }
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn multiply(&self, other: &TWord) -> TWord {
        let mut factors = self.factors.clone();
        factors.extend(other.factors.iter().cloned());
        TWord { factors }
    }

    pub fn invert(&self) -> TWord {
        TWord {
            factors: self
                .factors
                .iter()
                .rev()
                .map(|f| Factor::new(f.conjugator.clone(), f.sign.flip()))
                .collect(),
        }
    }

    /// `self^g`: every conjugator is right-multiplied by `g`.
    pub fn conjugate(&self, g: &ReducedWord) -> TWord {
        TWord {
            factors: self
                .factors
                .iter()
                .map(|f| Factor::new(f.conjugator.multiply(g), f.sign))
                .collect(),
        }
    }

    /// `[self, other] = self^-1 other^-1 self other`.
    pub fn commutator(&self, other: &TWord) -> TWord {
        self.invert()
            .multiply(&other.invert())
            .multiply(self)
            .multiply(other)
    }

    /// The product as a reduced word.
    pub fn flatten(&self) -> ReducedWord {
        let t = t();
        let mut r = Reducer::new();
        for f in &self.factors {
            let w = f.conjugator.letters();
            r.extend(w.iter().rev().copied());
            match f.sign {
                Sign::Plus => r.extend(t.letters().iter().copied()),
                Sign::Minus => r.extend(t.letters().iter().rev().copied()),
            }
            r.extend(w.iter().copied());
        }
        r.finish()
    }
}

pub fn flatten(k: &TWord) -> ReducedWord {
    k.flatten()
}

impl fmt::Display for TWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, factor) in self.factors.iter().enumerate() {
            if i > 0 {
                f.write_str(";")?;
            }
            let sign = match factor.sign {
                Sign::Plus => "+1",
                Sign::Minus => "-1",
            };
            write!(f, "{}^{sign}", factor.conjugator)?;
        }
        Ok(())
    }
}

impl FromStr for TWord {
    type Err = Error;

    /// `"w^+1;v^-1"`; the empty string is the empty product.
    fn from_str(s: &str) -> Result<Self> {
        let mut factors = Vec::new();
        if s.trim().is_empty() {
            return Ok(TWord::empty());
        }
        let mut offset = 0;
        for part in s.split(';') {
            let bad = |position: usize| Error::Parse {
                literal: s.to_string(),
                position,
                expected: "a factor of the form w^+1 or w^-1",
            };
            let (word, sign) = part.rsplit_once('^').ok_or_else(|| bad(offset))?;
            let sign = match sign {
                "+1" | "1" => Sign::Plus,
                "-1" => Sign::Minus,
                _ => return Err(bad(offset + word.len() + 1)),
            };
            let conjugator = ReducedWord::parse(word).map_err(|e| match e {
                Error::Parse { position, expected, .. } => Error::Parse {
                    literal: s.to_string(),
                    position: offset + position,
                    expected,
                },
                other => other,
            })?;
            factors.push(Factor::new(conjugator, sign));
            offset += part.len() + 1;
        }
        Ok(TWord { factors })
    }
}

impl Serialize for TWord {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for TWord {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

fn lift_with(g: &ReducedWord, image: impl Fn(Letter) -> &'static [Letter]) -> ReducedWord {
    let mut r = Reducer::with_capacity(3 * g.len());
    for &x in g.letters() {
        r.extend(image(x).iter().copied());
    }
    r.finish()
}

/// An element of the first-level stabilizer whose left section is `g`.
pub fn lift_first(g: &ReducedWord) -> ReducedWord {
    use Letter::*;
    lift_with(g, |x| match x {
        A => &[B],
        B => &[A, D, A],
        C => &[A, B, A],
        D => &[A, C, A],
    })
}

/// An element of the first-level stabilizer whose right section is `g`.
pub fn lift_second(g: &ReducedWord) -> ReducedWord {
    use Letter::*;
    lift_with(g, |x| match x {
        A => &[A, B, A],
        B => &[D],
        C => &[B],
        D => &[C],
    })
}

/// `y` in `K` with `psi(y) = (flatten(k1), flatten(k2))`.
pub fn emb_pair(k1: &TWord, k2: &TWord) -> ReducedWord {
    let (_, u, v) = k_generators();
    let mut r = Reducer::new();
    let mut push = |base: &ReducedWord, conj: ReducedWord, sign: Sign| {
        let c = conj.letters();
        r.extend(c.iter().rev().copied());
        match sign {
            Sign::Plus => r.extend(base.letters().iter().copied()),
            Sign::Minus => r.extend(base.letters().iter().rev().copied()),
        }
        r.extend(c.iter().copied());
    };
    for f in k1.factors() {
        push(&u, lift_first(&f.conjugator), f.sign);
    }
    for f in k2.factors() {
        push(&v, lift_second(&f.conjugator), f.sign);
    }
    r.finish()
}

/// The image of the group on level `n` together with the image of `K`.
#[derive(Debug)]
pub struct LevelQuotient {
    pub level: usize,
    pub group: StabChain,
    pub k_image: StabChain,
}

impl LevelQuotient {
    pub fn group_order(&self) -> BigUint {
        self.group.order()
    }

    pub fn k_image_order(&self) -> BigUint {
        self.k_image.order()
    }

    pub fn k_image_index(&self) -> BigUint {
        self.group_order() / self.k_image_order()
    }

    pub fn summary(&self) -> QuotientSummary {
        QuotientSummary {
            level: self.level,
            group_order: self.group_order().to_string(),
            k_image_order: self.k_image_order().to_string(),
            k_image_index: self.k_image_index().to_string(),
            base_length: self.group.base().len(),
        }
    }

    pub fn contains_in_k(&self, g: &ReducedWord) -> bool {
        self.k_image.contains(&level_image(g, self.level))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuotientSummary {
    pub level: usize,
    pub group_order: String,
    pub k_image_order: String,
    pub k_image_index: String,
    pub base_length: usize,
}

fn level_image(g: &ReducedWord, n: usize) -> Perm {
    Perm::from_images(tree::level_perm(g, n).images)
}

/// Builds the stabilizer chains of `G_n` and of the normal closure of the
/// image of `t`.
pub fn build_level_quotient(n: usize) -> Result<LevelQuotient> {
    if !(1..=MAX_QUOTIENT_LEVEL).contains(&n) {
        return Err(Error::PreconditionViolated(format!(
            "quotient level must be in 1..={MAX_QUOTIENT_LEVEL}, got {n}"
        )));
    }
    let degree = 1usize << n;
    let gens: Vec<Perm> = Letter::ALL
        .iter()
        .map(|&x| level_image(&ReducedWord::letter(x), n))
        .collect();
    // The chain routines recurse along orbits; give them room.
    std::thread::scope(|s| {
        std::thread::Builder::new()
            .stack_size(256 << 20)
            .spawn_scoped(s, || {
                let group = StabChain::new(degree, &gens);
                let k_image = normal_closure(degree, &[level_image(&t(), n)], &gens);
                LevelQuotient {
                    level: n,
                    group,
                    k_image,
                }
            })
            .map_err(|e| Error::ResourceCap(format!("cannot spawn chain builder: {e}")))?
            .join()
            .map_err(|_| Error::ResourceCap(format!("stabilizer chain at level {n} failed")))
    })
}

/// Shared, lazily built quotient for level `n`.
pub fn level_quotient(n: usize) -> Result<Arc<LevelQuotient>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<LevelQuotient>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(q) = cache.lock().unwrap().get(&n) {
        return Ok(q.clone());
    }
    let q = Arc::new(build_level_quotient(n)?);
    Ok(cache.lock().unwrap().entry(n).or_insert(q).clone())
}

/// Evidence that the index of the image of `K` has stabilized.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Plateau {
    /// First level of the plateau; membership is decided here.
    pub level: usize,
    pub index: String,
    /// `(level, index)` for every level examined.
    pub indices: Vec<(usize, String)>,
}

fn find_plateau() -> Option<Plateau> {
    let mut indices: Vec<(usize, BigUint)> = Vec::new();
    for n in 1..=MAX_QUOTIENT_LEVEL {
        let q = level_quotient(n).ok()?;
        indices.push((n, q.k_image_index()));
        if indices.len() >= PLATEAU_WIDTH {
            let window = &indices[indices.len() - PLATEAU_WIDTH..];
            if window.iter().all(|(_, i)| *i == window[0].1) {
                return Some(Plateau {
                    level: window[0].0,
                    index: window[0].1.to_string(),
                    indices: indices.iter().map(|(l, i)| (*l, i.to_string())).collect(),
                });
            }
        }
    }
    None
}

/// The certified plateau, computed once.
pub fn plateau() -> Option<&'static Plateau> {
    static PLATEAU: OnceLock<Option<Plateau>> = OnceLock::new();
    PLATEAU.get_or_init(find_plateau).as_ref()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum KMembership {
    Inside { level: usize },
    Outside { level: usize },
    Unknown { reason: String },
}

/// Decides `g in K`. Words that swap the root are outside since `K` lies in
/// the first-level stabilizer (reported with level 1).
pub fn membership_in_k(g: &ReducedWord) -> KMembership {
    if g.is_odd() {
        return KMembership::Outside { level: 1 };
    }
    let Some(p) = plateau() else {
        return KMembership::Unknown {
            reason: format!("no index plateau through level {MAX_QUOTIENT_LEVEL}"),
        };
    };
    match level_quotient(p.level) {
        Ok(q) if q.contains_in_k(g) => KMembership::Inside { level: p.level },
        Ok(_) => KMembership::Outside { level: p.level },
        Err(e) => KMembership::Unknown {
            reason: e.to_string(),
        },
    }
}

/// A random `TWord` with `1..=max_factors` factors and conjugators of length
/// at most `bound`.
pub fn random_tword(rng: &mut WordRng, max_factors: usize, bound: usize) -> TWord {
    let n = rng.gen_range(1..=max_factors.max(1));
    let factors = (0..n)
        .map(|_| {
            let len = rng.gen_range(0..=bound);
            let conjugator = sample::random_walk(rng, len);
            let sign = if rng.gen_bool(0.5) { Sign::Plus } else { Sign::Minus };
            Factor::new(conjugator, sign)
        })
        .collect();
    TWord { factors }
}

const SEARCH_CHUNK: usize = 64;

/// Deterministic parallel search: candidates are drawn sequentially from the
/// seed and checked in chunks; the first success in draw order wins.
pub(crate) fn first_success<C, T>(
    budget: usize,
    seed: u64,
    mut draw: impl FnMut(&mut WordRng, usize) -> C,
    check: impl Fn(&C) -> Option<T> + Sync,
) -> Option<(C, T)>
where
    C: Send + Sync,
    T: Send,
{
    let mut rng = sample::rng(seed);
    let mut drawn = 0;
    while drawn < budget {
        let n = SEARCH_CHUNK.min(budget - drawn);
        let chunk: Vec<C> = (0..n).map(|i| draw(&mut rng, drawn + i)).collect();
        drawn += n;
        let hit = chunk
            .par_iter()
            .enumerate()
            .filter_map(|(i, c)| check(c).map(|t| (i, t)))
            .min_by_key(|(i, _)| *i);
        if let Some((i, t)) = hit {
            return Some((chunk.into_iter().nth(i).unwrap(), t));
        }
    }
    None
}

/// Finds a [`TWord`] whose flattening has order at least `target`.
pub fn search_high_order(target: u64, budget: usize, seed: u64) -> Result<(TWord, u64)> {
    if !target.is_power_of_two() {
        return Err(Error::PreconditionViolated(format!(
            "target order {target} is not a power of two"
        )));
    }
    let cap = decision::DEFAULT_ORDER_CAP.max(target.trailing_zeros());
    let found = first_success(
        budget,
        seed,
        |rng, i| {
            if i == 0 {
                return TWord::t();
            }
            // Conjugator bound doubles every 1024 draws, up to 8x.
            let bound = CONJUGATOR_BOUND << (i / 1024).min(3);
            random_tword(rng, 4, bound)
        },
        |k| match decision::order(&k.flatten(), cap) {
            OrderResult::Exact(o) if o >= target => Some(o),
            _ => None,
        },
    );
    found.ok_or_else(|| Error::SearchExhausted {
        what: format!("no element of K of order >= {target}"),
        budget,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decision::{are_equal, is_trivial, order};
    use crate::tree::decompose;

    fn w(s: &str) -> ReducedWord {
        ReducedWord::parse(s).unwrap()
    }

    #[test]
    fn generators_decompose() {
        let (t, u, v) = k_generators();
        assert_eq!(t.to_string(), "abab");
        let du = decompose(&u);
        assert!(!du.active && are_equal(&du.left, &t) && is_trivial(&du.right));
        let dv = decompose(&v);
        assert!(!dv.active && is_trivial(&dv.left) && are_equal(&dv.right, &t));
        assert_eq!(order(&t, 12), OrderResult::Exact(8));
    }

    #[test]
    fn flatten_examples() {
        assert!(TWord::empty().flatten().is_empty());
        assert_eq!(TWord::t().flatten(), t());
        let k: TWord = "1^+1;1^-1".parse().unwrap();
        assert!(k.flatten().is_empty());
        let k: TWord = "ab^-1".parse().unwrap();
        assert!(are_equal(&k.flatten(), &t().conjugate(&w("ab")).invert()));
    }

    #[test]
    fn lift_examples() {
        assert_eq!(lift_first(&w("a")), w("b"));
        assert_eq!(lift_first(&w("b")), w("ada"));
        assert!(lift_first(&ReducedWord::identity()).is_empty());
        assert_eq!(lift_second(&w("b")), w("d"));
        assert_eq!(lift_second(&w("c")), w("b"));
        assert!(lift_second(&ReducedWord::identity()).is_empty());
    }

    #[test]
    fn emb_pair_examples() {
        let (_, u, v) = k_generators();
        assert_eq!(emb_pair(&TWord::t(), &TWord::empty()), u);
        assert_eq!(emb_pair(&TWord::empty(), &TWord::t()), v);
        assert!(emb_pair(&TWord::empty(), &TWord::empty()).is_empty());
    }

    #[test]
    fn tword_literals() {
        let k: TWord = "1^+1;ab^-1;dac^+1".parse().unwrap();
        assert_eq!(k.to_string(), "1^+1;ab^-1;dac^+1");
        assert_eq!("".parse::<TWord>().unwrap(), TWord::empty());
        match "1^+1;ax^-1".parse::<TWord>() {
            Err(Error::Parse { position, .. }) => assert_eq!(position, 6),
            other => panic!("unexpected {other:?}"),
        }
        assert!("ab".parse::<TWord>().is_err());
        assert!("ab^+2".parse::<TWord>().is_err());
    }

    #[test]
    fn small_quotients() {
        assert_eq!(build_level_quotient(1).unwrap().group_order(), BigUint::from(2u32));
        assert_eq!(build_level_quotient(3).unwrap().group_order(), BigUint::from(128u32));
        assert!(build_level_quotient(0).is_err());
        assert!(build_level_quotient(9).is_err());
    }

    #[test]
    fn membership_examples() {
        assert_eq!(membership_in_k(&w("a")), KMembership::Outside { level: 1 });
        assert!(matches!(membership_in_k(&t()), KMembership::Inside { .. }));
        assert!(matches!(membership_in_k(&w("b")), KMembership::Outside { .. }));
    }

    #[test]
    fn high_order_search_trivial_targets() {
        assert_eq!(search_high_order(8, 10, 0).unwrap(), (TWord::t(), 8));
        assert_eq!(search_high_order(1, 10, 0).unwrap().0, TWord::t());
        assert!(search_high_order(6, 10, 0).is_err());
    }
}
