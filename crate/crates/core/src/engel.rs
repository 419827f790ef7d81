//! Left-normed commutator towers `[x,_n g] = [[x,_{n-1} g], g]`, bounded
//! Engel probes, checkers for the two tower identities in the wreath
//! recursion, and certificate-producing replays of the refutations that
//! bounded left Engel and right Engel elements are trivial.
//!
//! Every unbounded statement ("for every n") is represented by a certificate
//! that records its bound explicitly.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::branch::{self, first_success, TWord};
use crate::config::Config;
use crate::decision::{self, OrderResult};
use crate::error::{Error, Result};
use crate::sample::{self, WordRng};
use crate::tree::{self, Decomposition, Vertex};
use crate::words::{commutator, Letter, ReducedWord};

fn a() -> ReducedWord {
    ReducedWord::letter(Letter::A)
}

/// `[x,_n g]`, reducing after every step. `n = 0` returns `x`.
pub fn iterated_commutator(x: &ReducedWord, g: &ReducedWord, n: usize) -> ReducedWord {
    (0..n).fold(x.clone(), |c, _| commutator(&c, g))
}

/// `[x,_1 g], ..., [x,_n g]`, failing once a word exceeds `cap` letters.
pub fn tower(x: &ReducedWord, g: &ReducedWord, n: usize, cap: usize) -> Result<Vec<ReducedWord>> {
    let mut out = Vec::with_capacity(n);
    let mut c = x.clone();
    for _ in 0..n {
        c = commutator(&c, g);
        if c.len() > cap {
            return Err(Error::TowerOverflow { len: c.len(), cap });
        }
        out.push(c.clone());
    }
    Ok(out)
}

/// `[x,_n g] = 1` with `n` least; `transcript[i]` is the length of
/// `[x,_{i+1} g]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EngelSink {
    pub g: ReducedWord,
    pub x: ReducedWord,
    pub depth: usize,
    pub transcript: Vec<usize>,
}

/// `[x,_bound g] != 1`, witnessed by a vertex it moves.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NonEngelWitness {
    pub g: ReducedWord,
    pub x: ReducedWord,
    pub bound: usize,
    pub transcript: Vec<usize>,
    pub witness: Vertex,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum Probe {
    Sink(EngelSink),
    NoSinkUpTo(NonEngelWitness),
}

/// Looks for the least `n <= bound` with `[x,_n g] = 1`.
pub fn left_engel_probe(g: &ReducedWord, x: &ReducedWord, bound: usize, cfg: &Config) -> Result<Probe> {
    if bound == 0 {
        return Err(Error::PreconditionViolated("probe bound must be at least 1".into()));
    }
    let mut transcript = Vec::new();
    let mut c = x.clone();
    for n in 1..=bound {
        c = commutator(&c, g);
        if c.len() > cfg.tower_cap {
            return Err(Error::TowerOverflow {
                len: c.len(),
                cap: cfg.tower_cap,
            });
        }
        transcript.push(c.len());
        if decision::is_trivial(&c) {
            return Ok(Probe::Sink(EngelSink {
                g: g.clone(),
                x: x.clone(),
                depth: n,
                transcript,
            }));
        }
    }
    let witness = decision::moved_vertex(&c).expect("nontrivial tower moves a vertex");
    Ok(Probe::NoSinkUpTo(NonEngelWitness {
        g: g.clone(),
        x: x.clone(),
        bound,
        transcript,
        witness,
    }))
}

/// Both sides of the first tower identity at one `m`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lemma1Report {
    pub k: TWord,
    pub g: ReducedWord,
    pub m: usize,
    pub y: ReducedWord,
    pub lhs: Decomposition,
    pub rhs_left: ReducedWord,
    pub rhs_right: ReducedWord,
    /// Whether both coordinates are trivial, i.e. `[y,_m x] = 1`.
    pub trivial: bool,
    pub holds: bool,
}

/// Checks `psi([y,_m x]) = (k^{(-1)^m 2^{m-1}}, (k^{g_2})^{(-1)^{m-1} 2^{m-1}})`
/// for the involution `x = a g` and `y = emb_pair(k, 1)`, computing the left
/// side from the tower and the right side from powers.
pub fn lemma1_check(k: &TWord, g: &ReducedWord, m: usize, cfg: &Config) -> Result<Lemma1Report> {
    if m == 0 {
        return Err(Error::PreconditionViolated("m must be at least 1".into()));
    }
    if g.is_odd() {
        return Err(Error::PreconditionViolated(format!("{g} is not in the first-level stabilizer")));
    }
    let x = a().multiply(g);
    if !decision::is_trivial(&x.square()) {
        return Err(Error::PreconditionViolated(format!("x = a{g} is not an involution")));
    }
    let y = branch::emb_pair(k, &TWord::empty());
    let tower = tower(&y, &x, m, cfg.tower_cap)?;
    let lhs = tree::decompose(tower.last().expect("m >= 1"));

    let kw = k.flatten();
    let g2 = tree::decompose(g).right;
    let magnitude = 1i64 << (m - 1);
    let sign = if m.is_multiple_of(2) { 1 } else { -1 };
    let rhs_left = kw.pow(sign * magnitude);
    let rhs_right = kw.conjugate(&g2).pow(-sign * magnitude);

    let holds = !lhs.active
        && decision::are_equal(&lhs.left, &rhs_left)
        && decision::are_equal(&lhs.right, &rhs_right);
    let trivial = !lhs.active && decision::is_trivial(&lhs.left) && decision::is_trivial(&lhs.right);
    Ok(Lemma1Report {
        k: k.clone(),
        g: g.clone(),
        m,
        y,
        lhs,
        rhs_left,
        rhs_right,
        trivial,
        holds,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lemma2Report {
    pub x: ReducedWord,
    pub y: ReducedWord,
    pub m: usize,
    pub lhs: Decomposition,
    pub rhs_left: ReducedWord,
    pub rhs_right: ReducedWord,
    pub holds: bool,
}

/// Right side of the second tower identity, from the sections of `g = a x`
/// and of `y`.
fn lemma2_rhs(g: &Decomposition, y: &Decomposition, m: usize) -> (ReducedWord, ReducedWord) {
    let side = |other: &ReducedWord, gi: &ReducedWord, yi: &ReducedWord| {
        let start = other.invert().conjugate(gi);
        iterated_commutator(&start, yi, m).conjugate(yi)
    };
    (
        side(&y.right, &g.left, &y.left),
        side(&y.left, &g.right, &y.right),
    )
}

/// Checks `psi([x,_{m+1} y]) = ([(y_2^-1)^{g_1},_m y_1]^{y_1}, [(y_1^-1)^{g_2},_m y_2]^{y_2})`
/// with `x = a g` and `y` in the first-level stabilizer.
pub fn lemma2_check(x: &ReducedWord, y: &ReducedWord, m: usize, cfg: &Config) -> Result<Lemma2Report> {
    if m == 0 {
        return Err(Error::PreconditionViolated("m must be at least 1".into()));
    }
    if !x.is_odd() {
        return Err(Error::PreconditionViolated(format!("{x} does not swap the root")));
    }
    if y.is_odd() {
        return Err(Error::PreconditionViolated(format!("{y} is not in the first-level stabilizer")));
    }
    let g = a().multiply(x);
    let dg = tree::decompose(&g);
    let dy = tree::decompose(y);
    let tower = tower(x, y, m + 1, cfg.tower_cap)?;
    let lhs = tree::decompose(tower.last().expect("m + 1 >= 1"));
    let (rhs_left, rhs_right) = lemma2_rhs(&dg, &dy, m);
    let holds = !lhs.active
        && decision::are_equal(&lhs.left, &rhs_left)
        && decision::are_equal(&lhs.right, &rhs_right);
    Ok(Lemma2Report {
        x: x.clone(),
        y: y.clone(),
        m,
        lhs,
        rhs_left,
        rhs_right,
        holds,
    })
}

/// Reduction to an element that swaps the root: `x` fixes level
/// `vertex.depth()` and its section at `vertex` is `active`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SectionChain {
    pub vertex: Vertex,
    pub active: ReducedWord,
}

pub fn section_reduce(x: &ReducedWord, cfg: &Config) -> Result<SectionChain> {
    match tree::first_active_section(x, cfg.level_cap)? {
        Some((vertex, active)) => Ok(SectionChain { vertex, active }),
        None => Err(Error::PreconditionViolated(format!("{x} is the identity"))),
    }
}

/// Certificate that the involution `x` is not left `bound`-Engel: the
/// section `x_v = chain.active` satisfies `[y,_bound x_v] != 1` for
/// `y = emb_pair(k, 1)` with `k` of order greater than `2^(bound-1)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundedLeftRefutation {
    pub x: ReducedWord,
    pub chain: SectionChain,
    pub k: TWord,
    pub k_order: u64,
    pub bound: usize,
    pub y: ReducedWord,
    pub transcript: Vec<usize>,
    pub witness: Vertex,
}

pub fn replay_bounded_left(x: &ReducedWord, bound: usize, cfg: &Config) -> Result<BoundedLeftRefutation> {
    if bound == 0 || bound > 62 {
        return Err(Error::PreconditionViolated(format!("bound {bound} outside 1..=62")));
    }
    if decision::is_trivial(x) {
        return Err(Error::PreconditionViolated("x is the identity".into()));
    }
    if !decision::is_trivial(&x.square()) {
        return Err(Error::PreconditionViolated(format!(
            "{x} is not an involution; only involutions are replayed"
        )));
    }
    let chain = section_reduce(x, cfg)?;
    let (k, k_order) = branch::search_high_order(1 << bound, cfg.budget, cfg.seed)?;
    let y = branch::emb_pair(&k, &TWord::empty());
    let towers = tower(&y, &chain.active, bound, cfg.tower_cap)?;
    let last = towers.last().expect("bound >= 1");
    let witness = decision::moved_vertex(last).ok_or_else(|| {
        Error::CertificateRejected(format!("[y,_{bound} x] is trivial; k of order {k_order} does not refute"))
    })?;
    Ok(BoundedLeftRefutation {
        x: x.clone(),
        chain,
        k,
        k_order,
        bound,
        y,
        transcript: towers.iter().map(ReducedWord::len).collect(),
        witness,
    })
}

/// Candidate pair `(h, y1)` of elements of `K` whose tower
/// `[h,_n y1]` stays nontrivial for `n <= bound`.
pub fn search_nonengel_pair(bound: usize, cfg: &Config) -> Result<Option<(TWord, TWord)>> {
    if bound == 0 {
        return Err(Error::PreconditionViolated("bound must be at least 1".into()));
    }
    let cap = cfg.tower_cap;
    let found = first_success(
        cfg.budget,
        cfg.seed,
        |rng: &mut WordRng, i| {
            if i == 0 {
                let b = ReducedWord::letter(Letter::B);
                return (TWord::t(), TWord::t().conjugate(&b));
            }
            (
                branch::random_tword(rng, 2, branch::CONJUGATOR_BOUND),
                branch::random_tword(rng, 2, branch::CONJUGATOR_BOUND),
            )
        },
        |(h, y1)| match tower(&h.flatten(), &y1.flatten(), bound, cap) {
            Ok(t) if !decision::is_trivial(t.last()?) => Some(()),
            _ => None,
        },
    );
    Ok(found.map(|(pair, ())| pair))
}

/// Evidence for one `m` in a [`RightRefutation`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RightEvidence {
    pub m: usize,
    pub tower_length: usize,
    /// Vertex moved by `[x_v,_{m+1} y]`.
    pub witness: Vertex,
    /// Vertex moved by `[h,_{m+1} y1]`.
    pub inner_witness: Vertex,
    /// First coordinate of `psi([x_v,_{m+1} y])` equals `[h,_{m+1} y1]^{y1}`.
    pub first_coordinate_matches: bool,
}

/// Certificate that `x` is not right Engel with sink at most `bound + 1`:
/// for the section `x_v = a g`, `y = emb_pair(y1, y2)` with
/// `y2 = [y1, h]^{g1^-1}` keeps `[x_v,_{m+1} y]` nontrivial for `m <= bound`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RightRefutation {
    pub x: ReducedWord,
    pub chain: SectionChain,
    pub g1: ReducedWord,
    pub h: TWord,
    pub y1: TWord,
    pub y2: TWord,
    pub y: ReducedWord,
    pub bound: usize,
    pub evidence: Vec<RightEvidence>,
}

pub fn replay_right(x: &ReducedWord, bound: usize, cfg: &Config) -> Result<RightRefutation> {
    if bound == 0 {
        return Err(Error::PreconditionViolated("bound must be at least 1".into()));
    }
    if decision::is_trivial(x) {
        return Err(Error::PreconditionViolated("x is the identity".into()));
    }
    let chain = section_reduce(x, cfg)?;
    let g = a().multiply(&chain.active);
    let g1 = tree::decompose(&g).left;
    let (h, y1) = search_nonengel_pair(bound + 1, cfg)?.ok_or_else(|| Error::SearchExhausted {
        what: format!("no pair in K with towers nontrivial through {}", bound + 1),
        budget: cfg.budget,
    })?;
    let y2 = y1.commutator(&h).conjugate(&g1.invert());
    let y = branch::emb_pair(&y1, &y2);

    let outer = tower(&chain.active, &y, bound + 1, cfg.tower_cap)?;
    let (hw, y1w) = (h.flatten(), y1.flatten());
    let inner = tower(&hw, &y1w, bound + 1, cfg.tower_cap)?;
    let mut evidence = Vec::with_capacity(bound);
    for m in 1..=bound {
        let word = &outer[m];
        let witness = decision::moved_vertex(word).ok_or_else(|| {
            Error::CertificateRejected(format!("[x,_{} y] is trivial", m + 1))
        })?;
        let inner_witness = decision::moved_vertex(&inner[m]).ok_or_else(|| {
            Error::CertificateRejected(format!("[h,_{} y1] is trivial", m + 1))
        })?;
        let d = tree::decompose(word);
        let first_coordinate_matches =
            !d.active && decision::are_equal(&d.left, &inner[m].conjugate(&y1w));
        evidence.push(RightEvidence {
            m,
            tower_length: word.len(),
            witness,
            inner_witness,
            first_coordinate_matches,
        });
    }
    Ok(RightRefutation {
        x: x.clone(),
        chain,
        g1,
        h,
        y1,
        y2,
        y,
        bound,
        evidence,
    })
}

/// Searches for `x` with `[x,_bound g] != 1`.
pub fn search_left_witness(g: &ReducedWord, bound: usize, max_len: usize, cfg: &Config) -> Result<NonEngelWitness> {
    let found = first_success(
        cfg.budget,
        cfg.seed,
        |rng: &mut WordRng, _| sample::random_word(rng, max_len),
        |x| match left_engel_probe(g, x, bound, cfg) {
            Ok(Probe::NoSinkUpTo(w)) => Some(w),
            _ => None,
        },
    );
    found.map(|(_, w)| w).ok_or_else(|| Error::SearchExhausted {
        what: format!("no x with [x,_{bound} {g}] nontrivial"),
        budget: cfg.budget,
    })
}

/// Draws a random involution by rejection on the order.
pub fn random_involution(rng: &mut WordRng, max_len: usize, cfg: &Config) -> Result<ReducedWord> {
    for _ in 0..cfg.budget.max(1) * 100 {
        let g = sample::random_word(rng, max_len);
        if decision::order(&g, 1) == OrderResult::Exact(2) {
            return Ok(g);
        }
    }
    Err(Error::SearchExhausted {
        what: "no involution drawn".into(),
        budget: cfg.budget * 100,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurveyParams {
    /// Involutions drawn (or repetitions of `involution` when given).
    pub samples: usize,
    /// Random opponents per involution.
    pub opponents: usize,
    pub bound: usize,
    pub seed: u64,
    pub involution: Option<ReducedWord>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlaggedPair {
    pub g: ReducedWord,
    pub x: ReducedWord,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurveyReport {
    pub params: SurveyParams,
    pub pairs: usize,
    pub sinks: usize,
    pub no_sink: usize,
    pub overflow: usize,
    /// Sink depth to count.
    pub depth_histogram: BTreeMap<usize, usize>,
    pub flagged: Vec<FlaggedPair>,
    pub excluded: Option<String>,
}

/// Left Engel sink depths of involutions against random opponents.
/// Probes that fail to sink within the bound are flagged, never counted as
/// counterexamples.
pub fn involution_survey(params: &SurveyParams, cfg: &Config) -> Result<SurveyReport> {
    let mut report = SurveyReport {
        params: params.clone(),
        pairs: 0,
        sinks: 0,
        no_sink: 0,
        overflow: 0,
        depth_histogram: BTreeMap::new(),
        flagged: Vec::new(),
        excluded: None,
    };
    if let Some(g) = &params.involution {
        if decision::order(g, cfg.order_cap) != OrderResult::Exact(2) {
            report.excluded = Some(format!("{g} is not an involution"));
            return Ok(report);
        }
    }
    let mut rng = sample::rng(params.seed);
    let mut pairs = Vec::with_capacity(params.samples * params.opponents);
    for _ in 0..params.samples {
        let g = match &params.involution {
            Some(g) => g.clone(),
            None => random_involution(&mut rng, cfg.walk_length, cfg)?,
        };
        for _ in 0..params.opponents {
            pairs.push((g.clone(), sample::random_word(&mut rng, cfg.walk_length)));
        }
    }
    let outcomes: Vec<Result<Probe>> = pairs
        .par_iter()
        .map(|(g, x)| left_engel_probe(g, x, params.bound, cfg))
        .collect();
    report.pairs = pairs.len();
    for ((g, x), outcome) in pairs.into_iter().zip(outcomes) {
        match outcome {
            Ok(Probe::Sink(s)) => {
                report.sinks += 1;
                *report.depth_histogram.entry(s.depth).or_default() += 1;
            }
            Ok(Probe::NoSinkUpTo(_)) => {
                report.no_sink += 1;
                report.flagged.push(FlaggedPair {
                    g,
                    x,
                    reason: format!("no sink up to {}", params.bound),
                });
            }
            Err(Error::TowerOverflow { len, cap }) => {
                report.overflow += 1;
                report.flagged.push(FlaggedPair {
                    g,
                    x,
                    reason: format!("tower overflow ({len} > {cap} letters)"),
                });
            }
            Err(e) => return Err(e),
        }
    }
    Ok(report)
}
