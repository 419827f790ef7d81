//! The action of the group on the rooted binary tree.
//!
//! Words act on the right: in `xy` the letter `x` is applied first. For an
//! element `g` and a vertex `v`, the section `g|v` is the automorphism that `g`
//! induces on the subtree below `v`, indexed by the *source* vertex, so that
//! `g(v w) = g(v) g|v(w)`. With this convention `psi(g^a) = (g_1, g_0)` and
//! `psi(gh) = (g_0 h_0, g_1 h_1)` on the first-level stabilizer.
//!
//! Generators act by
//!
//! ```text
//! a(x w) = (1-x) w
//! b = (a, c)    c = (a, d)    d = (1, b)
//! ```

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::decision;
use crate::error::{Error, Result};
use crate::words::{Letter, ReducedWord, Reducer};

/// Default depth limit for [`first_active_level`].
pub const DEFAULT_LEVEL_CAP: usize = 64;

/// A vertex of the tree, i.e. a finite binary string. The root is the empty
/// string.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vertex {
    path: Vec<u8>,
}

impl Vertex {
    pub fn root() -> Self {
        Self::default()
    }

    pub fn from_bits(path: Vec<u8>) -> Self {
        debug_assert!(path.iter().all(|&b| b <= 1));
        Vertex { path }
    }

    /// The vertex at `depth` whose most-significant-first binary expansion is
    /// `index`.
    pub fn from_index(index: usize, depth: usize) -> Self {
        let path = (0..depth)
            .map(|i| ((index >> (depth - 1 - i)) & 1) as u8)
            .collect();
        Vertex { path }
    }

    pub fn index(&self) -> usize {
        self.path
            .iter()
            .fold(0usize, |acc, &b| (acc << 1) | b as usize)
    }

    pub fn depth(&self) -> usize {
        self.path.len()
    }

    pub fn bits(&self) -> &[u8] {
        &self.path
    }

    pub fn child(&self, bit: u8) -> Vertex {
        let mut path = self.path.clone();
        path.push(bit);
        Vertex { path }
    }

    pub fn is_prefix_of(&self, other: &Vertex) -> bool {
        other.path.starts_with(&self.path)
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.path {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl FromStr for Vertex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let path = s
            .chars()
            .enumerate()
            .map(|(position, ch)| match ch {
                '0' => Ok(0),
                '1' => Ok(1),
                _ => Err(Error::Parse {
                    literal: s.to_string(),
                    position,
                    expected: "a binary digit",
                }),
            })
            .collect::<Result<Vec<u8>>>()?;
        Ok(Vertex { path })
    }
}

impl Serialize for Vertex {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Vertex {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// First-level decomposition: `active` is the root transposition exponent and
/// `left`, `right` are the sections at the vertices `0` and `1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Decomposition {
    pub active: bool,
    pub left: ReducedWord,
    pub right: ReducedWord,
}

fn generator_sections(x: Letter) -> (Option<Letter>, Option<Letter>) {
    match x {
        Letter::B => (Some(Letter::A), Some(Letter::C)),
        Letter::C => (Some(Letter::A), Some(Letter::D)),
        Letter::D => (None, Some(Letter::B)),
        Letter::A => unreachable!("a has no sections"),
    }
}

/// Wreath recursion of a word, scanning left to right with the running
/// `a`-parity deciding which side each section lands on.
pub fn decompose(g: &ReducedWord) -> Decomposition {
    let half = g.len() / 2 + 1;
    let mut left = Reducer::with_capacity(half);
    let mut right = Reducer::with_capacity(half);
    let mut parity = false;
    for &x in g.letters() {
        if x.is_rooted() {
            parity = !parity;
            continue;
        }
        let (s0, s1) = generator_sections(x);
        let (l, r) = if parity { (s1, s0) } else { (s0, s1) };
        if let Some(l) = l {
            left.push(l);
        }
        if let Some(r) = r {
            right.push(r);
        }
    }
    Decomposition {
        active: parity,
        left: left.finish(),
        right: right.finish(),
    }
}

/// A permutation of the `2^n` vertices of level `n`, vertices indexed
/// most-significant-bit first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LevelPerm {
    pub level: usize,
    pub images: Vec<u32>,
}

impl LevelPerm {
    pub fn identity(level: usize) -> Self {
        LevelPerm {
            level,
            images: (0..1u32 << level).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &v)| i as u32 == v)
    }

    pub fn apply(&self, v: usize) -> usize {
        self.images[v] as usize
    }

    /// Order of the permutation (lcm of its cycle lengths).
    pub fn order(&self) -> u64 {
        let n = self.images.len();
        let mut seen = vec![false; n];
        let mut lcm: u64 = 1;
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut len = 0u64;
            let mut p = start;
            while !seen[p] {
                seen[p] = true;
                p = self.images[p] as usize;
                len += 1;
            }
            lcm = num_lcm(lcm, len);
        }
        lcm
    }
}

fn num_lcm(a: u64, b: u64) -> u64 {
    fn gcd(mut a: u64, mut b: u64) -> u64 {
        while b != 0 {
            (a, b) = (b, a % b);
        }
        a
    }
    a / gcd(a, b) * b
}

/// Level permutation and the `2^n` sections of `g` at level `n`, both
/// computed by iterating [`decompose`].
pub fn sections_at(g: &ReducedWord, n: usize) -> (LevelPerm, Vec<ReducedWord>) {
    if n == 0 {
        return (LevelPerm::identity(0), vec![g.clone()]);
    }
    let d = decompose(g);
    let (p0, s0) = sections_at(&d.left, n - 1);
    let (p1, s1) = sections_at(&d.right, n - 1);
    let half = 1u32 << (n - 1);
    let flip = if d.active { half } else { 0 };
    let mut images = Vec::with_capacity(2 * half as usize);
    images.extend(p0.images.iter().map(|&w| w ^ flip));
    images.extend(p1.images.iter().map(|&w| (w | half) ^ flip));
    let mut sections = s0;
    sections.extend(s1);
    (LevelPerm { level: n, images }, sections)
}

/// The section of `g` at the source vertex `v`.
pub fn section_at(g: &ReducedWord, v: &Vertex) -> ReducedWord {
    v.bits().iter().fold(g.clone(), |h, &bit| {
        let d = decompose(&h);
        if bit == 0 {
            d.left
        } else {
            d.right
        }
    })
}

/// Applies one generator to a binary path in place.
fn apply_generator(x: Letter, path: &mut [u8]) {
    if path.is_empty() {
        return;
    }
    if x.is_rooted() {
        path[0] ^= 1;
        return;
    }
    let mut state = x;
    let mut i = 0;
    while i < path.len() {
        match (state, path[i]) {
            // Left sections of b and c are a, of d is trivial.
            (Letter::B | Letter::C, 0) => {
                if i + 1 < path.len() {
                    path[i + 1] ^= 1;
                }
                return;
            }
            (Letter::D, 0) => return,
            (Letter::B, _) => state = Letter::C,
            (Letter::C, _) => state = Letter::D,
            (Letter::D, _) => state = Letter::B,
            (Letter::A, _) => unreachable!(),
        }
        i += 1;
    }
}

/// Image of `v` under `g`, computed letter by letter from the generator
/// automata (independent of [`decompose`]).
pub fn act(g: &ReducedWord, v: &Vertex) -> Vertex {
    let mut path = v.path.clone();
    for &x in g.letters() {
        apply_generator(x, &mut path);
    }
    Vertex { path }
}

type GeneratorPerms = Arc<[Vec<u32>; 4]>;

fn generator_perms(n: usize) -> GeneratorPerms {
    static CACHE: OnceLock<Mutex<HashMap<usize, GeneratorPerms>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(p) = cache.lock().unwrap().get(&n) {
        return p.clone();
    }
    let size = 1usize << n;
    let perms: [Vec<u32>; 4] = Letter::ALL.map(|x| {
        let mut images = Vec::with_capacity(size);
        let mut path = vec![0u8; n];
        for v in 0..size {
            for (i, b) in path.iter_mut().enumerate() {
                *b = ((v >> (n - 1 - i)) & 1) as u8;
            }
            apply_generator(x, &mut path);
            let img = path.iter().fold(0u32, |acc, &b| (acc << 1) | b as u32);
            images.push(img);
        }
        images
    });
    let perms = Arc::new(perms);
    cache.lock().unwrap().insert(n, perms.clone());
    perms
}

/// The permutation induced by a generator on level `n`.
pub fn generator_level_perm(x: Letter, n: usize) -> LevelPerm {
    LevelPerm {
        level: n,
        images: generator_perms(n)[x as usize].clone(),
    }
}

/// The permutation induced by `g` on level `n`, by composing generator
/// permutations. Cost is `O(|g| 2^n)`.
pub fn level_perm(g: &ReducedWord, n: usize) -> LevelPerm {
    letters_level_perm(g.letters(), n)
}

/// Same as [`level_perm`] for an arbitrary, possibly unreduced, letter
/// sequence.
pub fn letters_level_perm(letters: &[Letter], n: usize) -> LevelPerm {
    let gens = generator_perms(n);
    let mut images: Vec<u32> = (0..1u32 << n).collect();
    for &x in letters {
        let table = &gens[x as usize];
        for img in images.iter_mut() {
            *img = table[*img as usize];
        }
    }
    LevelPerm { level: n, images }
}

/// Whether `g` fixes every vertex of depth `n`.
pub fn in_level_stabilizer(g: &ReducedWord, n: usize) -> bool {
    if n == 0 || g.is_empty() {
        return true;
    }
    if g.is_odd() {
        return false;
    }
    let d = decompose(g);
    in_level_stabilizer(&d.left, n - 1) && in_level_stabilizer(&d.right, n - 1)
}

/// The level `n` with `g` in `St(n)` but not in `St(n+1)`, or `None` when `g`
/// is trivial.
pub fn first_active_level(g: &ReducedWord, cap: usize) -> Result<Option<usize>> {
    Ok(first_active_section(g, cap)?.map(|(v, _)| v.depth()))
}

/// The lexicographically least vertex `v` of the first active level
/// together with the section `g|v`, which swaps the root of its subtree.
pub fn first_active_section(g: &ReducedWord, cap: usize) -> Result<Option<(Vertex, ReducedWord)>> {
    let mut frontier = vec![(Vertex::root(), g.clone())];
    for _ in 0..=cap {
        frontier.retain(|(_, w)| !w.is_empty());
        if frontier.is_empty() {
            return Ok(None);
        }
        if let Some(hit) = frontier.iter().find(|(_, w)| w.is_odd()) {
            return Ok(Some(hit.clone()));
        }
        frontier = frontier
            .into_iter()
            .flat_map(|(v, w)| {
                let d = decompose(&w);
                [(v.child(0), d.left), (v.child(1), d.right)]
            })
            .collect();
    }
    if decision::is_trivial(g) {
        Ok(None)
    } else {
        Err(Error::CapExceeded {
            word: g.to_string(),
            cap,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> ReducedWord {
        ReducedWord::parse(s).unwrap()
    }

    fn dec(active: bool, l: &str, r: &str) -> Decomposition {
        Decomposition {
            active,
            left: w(l),
            right: w(r),
        }
    }

    #[test]
    fn decompose_examples() {
        assert_eq!(decompose(&w("b")), dec(false, "a", "c"));
        assert_eq!(decompose(&w("c")), dec(false, "a", "d"));
        assert_eq!(decompose(&w("d")), dec(false, "1", "b"));
        assert_eq!(decompose(&w("aba")), dec(false, "c", "a"));
        assert_eq!(decompose(&w("abab")), dec(false, "ca", "ac"));
        assert_eq!(decompose(&w("a")), dec(true, "1", "1"));
    }

    #[test]
    fn sections_examples() {
        for n in 0..5 {
            let (p, s) = sections_at(&ReducedWord::identity(), n);
            assert!(p.is_identity());
            assert_eq!(s.len(), 1 << n);
            assert!(s.iter().all(|x| x.is_empty()));
        }
        let (p, s) = sections_at(&w("d"), 1);
        assert!(p.is_identity());
        assert_eq!(s, vec![w("1"), w("b")]);
        let (p, s) = sections_at(&w("a"), 1);
        assert_eq!(p.images, vec![1, 0]);
        assert_eq!(s, vec![w("1"), w("1")]);
    }

    #[test]
    fn section_at_matches_sections_list() {
        let g = w("dabacadabac");
        let (_, sections) = sections_at(&g, 3);
        for (i, s) in sections.iter().enumerate() {
            assert_eq!(&section_at(&g, &Vertex::from_index(i, 3)), s);
        }
    }

    #[test]
    fn act_examples() {
        let v: Vertex = "0110".parse().unwrap();
        assert_eq!(act(&w("a"), &v).to_string(), "1110");
        assert_eq!(act(&ReducedWord::identity(), &v), v);
        assert_eq!(act(&w("d"), &"0".parse().unwrap()).to_string(), "0");
        // d = (1, b), b = (a, c): 10x -> 10(1-x)
        assert_eq!(act(&w("d"), &"100".parse().unwrap()).to_string(), "101");
        assert_eq!(act(&w("d"), &Vertex::root()), Vertex::root());
    }

    #[test]
    fn stabilizer_examples() {
        assert!(in_level_stabilizer(&w("b"), 1));
        assert!(!in_level_stabilizer(&w("a"), 1));
        // d = (1, b) and b fixes level 1, so d first moves depth-3 vertices.
        assert!(in_level_stabilizer(&w("d"), 1));
        assert!(in_level_stabilizer(&w("d"), 2));
        assert!(!in_level_stabilizer(&w("d"), 3));
        assert!(!in_level_stabilizer(&w("b"), 2));
    }

    #[test]
    fn first_active_examples() {
        let cap = DEFAULT_LEVEL_CAP;
        assert_eq!(first_active_level(&w("a"), cap).unwrap(), Some(0));
        assert_eq!(first_active_level(&w("d"), cap).unwrap(), Some(2));
        assert_eq!(first_active_level(&w("b"), cap).unwrap(), Some(1));
        assert_eq!(first_active_level(&ReducedWord::identity(), cap).unwrap(), None);
        assert_eq!(first_active_level(&w("adadadad"), cap).unwrap(), None);
        let (v, s) = first_active_section(&w("d"), cap).unwrap().unwrap();
        assert_eq!((v.to_string(), s), ("10".to_string(), w("a")));
        assert!(matches!(
            first_active_level(&w("d"), 1),
            Err(Error::CapExceeded { cap: 1, .. })
        ));
    }

    #[test]
    fn vertex_literals() {
        let v: Vertex = "1011".parse().unwrap();
        assert_eq!(v.index(), 11);
        assert_eq!(Vertex::from_index(11, 4), v);
        assert_eq!(Vertex::root().to_string(), "");
        assert!("102".parse::<Vertex>().is_err());
    }

    #[test]
    fn level_perm_matches_sections_perm() {
        for s in ["abacabad", "dacab", "bab", "cadacabadac"] {
            for n in 0..7 {
                assert_eq!(level_perm(&w(s), n), sections_at(&w(s), n).0, "{s} at {n}");
            }
        }
    }
}
