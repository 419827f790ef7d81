//! Versioned JSON certificates and their verifier.
//!
//! A certificate carries every input needed to recompute it. [`verify`]
//! recomputes towers with word operations, decides triviality with
//! [`decision::is_trivial`], and checks witness vertices with
//! [`tree::act`], which does not go through the wreath recursion.

use serde::{Deserialize, Serialize};

use crate::branch::{self, KMembership, Plateau, TWord};
use crate::config::Config;
use crate::decision::{self, OrderResult};
use crate::engel::{
    self, BoundedLeftRefutation, EngelSink, NonEngelWitness, RightRefutation, SectionChain,
};
use crate::error::{Error, Result};
use crate::tree::{self, Vertex};
use crate::words::{Letter, ReducedWord};

pub const SCHEMA_VERSION: u32 = 1;
pub const ENGINE_VERSION: &str = concat!("grigorchuk-core ", env!("CARGO_PKG_VERSION"));

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KMembershipCertificate {
    pub g: ReducedWord,
    pub result: KMembership,
    pub plateau: Option<Plateau>,
}

impl KMembershipCertificate {
    pub fn compute(g: &ReducedWord) -> Self {
        KMembershipCertificate {
            g: g.clone(),
            result: branch::membership_in_k(g),
            plateau: branch::plateau().cloned(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CertificateBody {
    EngelSink(EngelSink),
    NonEngelWitness(NonEngelWitness),
    BoundedLeftRefutation(BoundedLeftRefutation),
    RightRefutation(RightRefutation),
    KMembership(KMembershipCertificate),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub schema: u32,
    pub engine_version: String,
    #[serde(flatten)]
    pub body: CertificateBody,
}

impl Certificate {
    pub fn new(body: CertificateBody) -> Self {
        Certificate {
            schema: SCHEMA_VERSION,
            engine_version: ENGINE_VERSION.to_string(),
            body,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificates serialize")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(Error::CertificateRejected(format!($($fmt)+)));
        }
    };
}

fn check_witness(word: &ReducedWord, v: &Vertex, what: &str) -> Result<()> {
    ensure!(&tree::act(word, v) != v, "{what} does not move the recorded vertex {v:?}");
    Ok(())
}

fn check_chain(x: &ReducedWord, chain: &SectionChain) -> Result<()> {
    let depth = chain.vertex.depth();
    ensure!(tree::in_level_stabilizer(x, depth), "x does not fix level {depth}");
    ensure!(chain.active.is_odd(), "recorded section does not swap the root");
    ensure!(
        decision::are_equal(&tree::section_at(x, &chain.vertex), &chain.active),
        "recorded section differs from the section of x at {}",
        chain.vertex
    );
    Ok(())
}

fn check_transcript(towers: &[ReducedWord], transcript: &[usize]) -> Result<()> {
    let lengths: Vec<usize> = towers.iter().map(ReducedWord::len).collect();
    ensure!(lengths == transcript, "tower lengths {lengths:?} differ from transcript {transcript:?}");
    Ok(())
}

/// Re-checks a certificate from its recorded inputs.
pub fn verify(cert: &Certificate, cfg: &Config) -> Result<()> {
    ensure!(cert.schema == SCHEMA_VERSION, "unsupported schema {}", cert.schema);
    match &cert.body {
        CertificateBody::EngelSink(s) => {
            ensure!(s.depth >= 1, "sink depth must be positive");
            let towers = engel::tower(&s.x, &s.g, s.depth, cfg.tower_cap)?;
            check_transcript(&towers, &s.transcript)?;
            ensure!(decision::is_trivial(&towers[s.depth - 1]), "tower at depth {} is not trivial", s.depth);
            if s.depth >= 2 {
                ensure!(!decision::is_trivial(&towers[s.depth - 2]), "depth {} is not the least", s.depth);
            }
        }
        CertificateBody::NonEngelWitness(n) => {
            ensure!(n.bound >= 1, "bound must be positive");
            let towers = engel::tower(&n.x, &n.g, n.bound, cfg.tower_cap)?;
            check_transcript(&towers, &n.transcript)?;
            check_witness(&towers[n.bound - 1], &n.witness, "[x,_N g]")?;
        }
        CertificateBody::BoundedLeftRefutation(r) => verify_bounded_left(r, cfg)?,
        CertificateBody::RightRefutation(r) => verify_right(r, cfg)?,
        CertificateBody::KMembership(k) => {
            let fresh = KMembershipCertificate::compute(&k.g);
            ensure!(fresh.plateau == k.plateau, "plateau data does not reproduce");
            ensure!(fresh.result == k.result, "membership verdict does not reproduce");
        }
    }
    Ok(())
}

fn verify_bounded_left(r: &BoundedLeftRefutation, cfg: &Config) -> Result<()> {
    ensure!((1..=62).contains(&r.bound), "bound {} out of range", r.bound);
    ensure!(!decision::is_trivial(&r.x), "x is trivial");
    ensure!(decision::is_trivial(&r.x.square()), "x is not an involution");
    check_chain(&r.x, &r.chain)?;

    let k = r.k.flatten();
    let cap = cfg.order_cap.max(r.bound as u32 + 1);
    ensure!(
        decision::order(&k, cap) == OrderResult::Exact(r.k_order),
        "k does not have the recorded order {}",
        r.k_order
    );
    ensure!(r.k_order > 1 << (r.bound - 1), "order {} is not above 2^(N-1)", r.k_order);

    ensure!(r.y == branch::emb_pair(&r.k, &TWord::empty()), "y is not emb_pair(k, 1)");
    let d = tree::decompose(&r.y);
    ensure!(
        !d.active && decision::are_equal(&d.left, &k) && decision::is_trivial(&d.right),
        "y does not decompose as (k, 1)"
    );

    let towers = engel::tower(&r.y, &r.chain.active, r.bound, cfg.tower_cap)?;
    check_transcript(&towers, &r.transcript)?;
    check_witness(&towers[r.bound - 1], &r.witness, "[y,_N x]")
}

fn verify_right(r: &RightRefutation, cfg: &Config) -> Result<()> {
    ensure!(r.bound >= 1, "bound must be positive");
    ensure!(!decision::is_trivial(&r.x), "x is trivial");
    check_chain(&r.x, &r.chain)?;

    let g = ReducedWord::letter(Letter::A).multiply(&r.chain.active);
    ensure!(tree::decompose(&g).left == r.g1, "g1 is not the left section of a x");
    ensure!(
        r.y2 == r.y1.commutator(&r.h).conjugate(&r.g1.invert()),
        "y2 is not [y1, h]^(g1^-1)"
    );
    let (hw, y1w, y2w) = (r.h.flatten(), r.y1.flatten(), r.y2.flatten());
    ensure!(
        decision::are_equal(&y2w.invert().conjugate(&r.g1), &crate::words::commutator(&hw, &y1w)),
        "(y2^-1)^g1 differs from [h, y1]"
    );
    ensure!(r.y == branch::emb_pair(&r.y1, &r.y2), "y is not emb_pair(y1, y2)");
    let d = tree::decompose(&r.y);
    ensure!(
        !d.active && decision::are_equal(&d.left, &y1w) && decision::are_equal(&d.right, &y2w),
        "y does not decompose as (y1, y2)"
    );

    ensure!(r.evidence.len() == r.bound, "expected evidence for m = 1..={}", r.bound);
    let outer = engel::tower(&r.chain.active, &r.y, r.bound + 1, cfg.tower_cap)?;
    let inner = engel::tower(&hw, &y1w, r.bound + 1, cfg.tower_cap)?;
    for (i, e) in r.evidence.iter().enumerate() {
        let m = i + 1;
        ensure!(e.m == m, "evidence out of order at {m}");
        ensure!(e.tower_length == outer[m].len(), "tower length mismatch at m = {m}");
        check_witness(&outer[m], &e.witness, "[x,_(m+1) y]")?;
        check_witness(&inner[m], &e.inner_witness, "[h,_(m+1) y1]")?;
        let d = tree::decompose(&outer[m]);
        let matches = !d.active && decision::are_equal(&d.left, &inner[m].conjugate(&y1w));
        ensure!(matches && e.first_coordinate_matches, "first coordinate mismatch at m = {m}");
    }
    Ok(())
}
