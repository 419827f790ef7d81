//! Command-line front end. [`run`] is the whole program minus process exit,
//! so it can be driven from tests.
//!
//! Exit status: 0 success, 1 a refutation outcome (no Engel sink found,
//! identity check failed, certificate rejected), 2 usage or precondition
//! errors, 3 resource caps and exhausted searches.

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::branch::{self, KMembership, TWord};
use crate::certificate::{self, Certificate, CertificateBody, KMembershipCertificate, SCHEMA_VERSION};
use crate::config::Config;
use crate::decision::{self, OrderResult};
use crate::engel::{self, Probe, SurveyParams};
use crate::error::Error;
use crate::tree::{self, Vertex};
use crate::words::ReducedWord;

pub const DEFAULT_BOUND: usize = 10;

#[derive(Parser, Debug)]
#[command(name = "grigorchuk", version, about = "Exact computation and Engel certificates in the first Grigorchuk group")]
pub struct Cli {
    /// Emit JSON on stdout.
    #[arg(long, global = true)]
    json: bool,
    /// Depth of the moved-vertex oracle.
    #[arg(long, global = true)]
    max_depth: Option<usize>,
    /// Largest exponent k tried when computing orders 2^k.
    #[arg(long, global = true)]
    order_cap: Option<u32>,
    /// Tower bound N.
    #[arg(short = 'N', long = "bound", global = true)]
    bound: Option<usize>,
    /// Candidate evaluations for searches.
    #[arg(long, global = true)]
    budget: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Longest tower word allowed, in letters.
    #[arg(long, global = true)]
    tower_cap: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Reduce a word.
    Reduce { word: String },
    /// Decide whether two words are the same element.
    Eq { left: String, right: String },
    /// Order of an element.
    Order { word: String },
    /// Image of a vertex.
    Act { word: String, vertex: String },
    /// Level permutation and sections at a level.
    Sections { word: String, level: usize },
    /// Whether a word fixes every vertex of a level.
    Stab { word: String, level: usize },
    /// Least level on which the element acts nontrivially.
    FirstActive { word: String },
    /// Membership in the branching subgroup K.
    KTest {
        word: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Element of K with the given pair of sections (TWord literals).
    KEmbed { first: String, second: String },
    /// Lift to the first-level stabilizer with the word as a section.
    Lift {
        word: String,
        /// Use the right section instead of the left.
        #[arg(long)]
        second: bool,
    },
    /// Orders of the level quotient and of the image of K.
    Quotient { level: usize },
    /// Look for an Engel sink [x,_n g] = 1 with n <= N. Without x, search
    /// for an x that keeps the tower nontrivial.
    EngelProbe {
        g: String,
        x: Option<String>,
        #[arg(long, default_value_t = 12)]
        max_len: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the first tower identity.
    Lemma1 {
        #[arg(long)]
        k: String,
        #[arg(long)]
        g: String,
        #[arg(long)]
        m: usize,
    },
    /// Check the second tower identity.
    Lemma2 {
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        #[arg(long)]
        m: usize,
    },
    /// Certificate that an involution is not left N-Engel.
    ReplayLeft {
        x: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Certificate that an element is not right Engel with sink <= N + 1.
    ReplayRight {
        x: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Pair h, y1 in K with [h,_n y1] nontrivial for n <= N.
    SearchPair,
    /// Engel sink depths of random involutions.
    Survey {
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 5)]
        opponents: usize,
        /// Fixed involution instead of random ones.
        #[arg(long)]
        g: Option<String>,
    },
    /// Re-check a certificate file.
    Verify { path: PathBuf },
}

struct Ctx<'a> {
    cfg: Config,
    json: bool,
    bound: usize,
    out: &'a mut dyn Write,
}

type CmdResult = Result<i32, Error>;

impl Ctx<'_> {
    fn emit(&mut self, text: impl std::fmt::Display, value: Value) -> Result<(), Error> {
        if self.json {
            let mut obj = json!({ "schema": SCHEMA_VERSION });
            if let (Value::Object(dst), Value::Object(src)) = (&mut obj, value) {
                dst.extend(src);
            }
            writeln!(self.out, "{}", serde_json::to_string_pretty(&obj)?)?;
        } else {
            writeln!(self.out, "{text}")?;
        }
        Ok(())
    }

    fn emit_certificate(&mut self, cert: &Certificate, text: impl std::fmt::Display, out: Option<&PathBuf>) -> Result<(), Error> {
        if let Some(path) = out {
            std::fs::write(path, cert.to_json() + "\n")?;
        }
        if self.json {
            writeln!(self.out, "{}", cert.to_json())?;
        } else {
            writeln!(self.out, "{text}")?;
        }
        Ok(())
    }
}

fn word(s: &str) -> Result<ReducedWord, Error> {
    ReducedWord::parse(s)
}

fn to_value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("serializable")
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse { .. } | Error::PreconditionViolated(_) | Error::Json(_) | Error::Io(_) => 2,
        Error::CertificateRejected(_) => 1,
        Error::CapExceeded { .. } | Error::TowerOverflow { .. } | Error::SearchExhausted { .. } | Error::ResourceCap(_) => 3,
    }
}

/// Runs the CLI on `args` (including the program name) and returns the exit
/// status.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return code;
        }
    };
    let defaults = Config::default();
    let cfg = Config {
        max_depth: cli.max_depth.unwrap_or(defaults.max_depth),
        order_cap: cli.order_cap.unwrap_or(defaults.order_cap),
        tower_cap: cli.tower_cap.unwrap_or(defaults.tower_cap),
        budget: cli.budget.unwrap_or(defaults.budget),
        seed: cli.seed.unwrap_or(defaults.seed),
        ..defaults
    };
    let mut ctx = Ctx {
        cfg,
        json: cli.json,
        bound: cli.bound.unwrap_or(DEFAULT_BOUND),
        out,
    };
    match dispatch(&mut ctx, cli.command) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(ctx: &mut Ctx<'_>, command: Command) -> CmdResult {
    match command {
        Command::Reduce { word: w } => {
            let r = word(&w)?;
            ctx.emit(&r, json!({ "input": w, "reduced": r }))?;
        }
        Command::Eq { left, right } => {
            let eq = decision::are_equal(&word(&left)?, &word(&right)?);
            ctx.emit(eq, json!({ "left": left, "right": right, "equal": eq }))?;
        }
        Command::Order { word: w } => {
            let g = word(&w)?;
            let o = decision::order(&g, ctx.cfg.order_cap);
            let text = match o {
                OrderResult::Exact(n) => n.to_string(),
                OrderResult::ExceededCap(k) => format!("exceeds 2^{k}"),
            };
            ctx.emit(text, json!({ "word": g, "order": o }))?;
        }
        Command::Act { word: w, vertex } => {
            let g = word(&w)?;
            let v: Vertex = vertex.parse()?;
            let img = tree::act(&g, &v);
            ctx.emit(&img, json!({ "word": g, "vertex": v, "image": img }))?;
        }
        Command::Sections { word: w, level } => {
            if level > 20 {
                return Err(Error::PreconditionViolated(format!("level {level} above 20")));
            }
            let g = word(&w)?;
            let (perm, sections) = tree::sections_at(&g, level);
            let text = sections
                .iter()
                .enumerate()
                .map(|(i, s)| format!("{} -> {}  section {s}", Vertex::from_index(i, level), Vertex::from_index(perm.apply(i), level)))
                .collect::<Vec<_>>()
                .join("\n");
            ctx.emit(text, json!({ "word": g, "level": level, "permutation": perm.images, "sections": sections }))?;
        }
        Command::Stab { word: w, level } => {
            let g = word(&w)?;
            let s = tree::in_level_stabilizer(&g, level);
            ctx.emit(s, json!({ "word": g, "level": level, "in_stabilizer": s }))?;
        }
        Command::FirstActive { word: w } => {
            let g = word(&w)?;
            let level = tree::first_active_level(&g, ctx.cfg.level_cap)?;
            let text = level.map_or("none".to_string(), |l| l.to_string());
            ctx.emit(text, json!({ "word": g, "level": level }))?;
        }
        Command::KTest { word: w, out } => {
            let cert = KMembershipCertificate::compute(&word(&w)?);
            let text = match &cert.result {
                KMembership::Inside { level } => format!("inside (level {level})"),
                KMembership::Outside { level } => format!("outside (level {level})"),
                KMembership::Unknown { reason } => format!("unknown: {reason}"),
            };
            ctx.emit_certificate(&Certificate::new(CertificateBody::KMembership(cert)), text, out.as_ref())?;
        }
        Command::KEmbed { first, second } => {
            let k1: TWord = first.parse()?;
            let k2: TWord = second.parse()?;
            let y = branch::emb_pair(&k1, &k2);
            ctx.emit(&y, json!({ "first": k1, "second": k2, "y": y }))?;
        }
        Command::Lift { word: w, second } => {
            let g = word(&w)?;
            let s = if second { branch::lift_second(&g) } else { branch::lift_first(&g) };
            ctx.emit(&s, json!({ "word": g, "coordinate": if second { "second" } else { "first" }, "lift": s }))?;
        }
        Command::Quotient { level } => {
            let q = branch::build_level_quotient(level)?;
            let s = q.summary();
            let text = format!(
                "level {}: |G| = {}, |image of K| = {}, index = {}",
                s.level, s.group_order, s.k_image_order, s.k_image_index
            );
            ctx.emit(text, to_value(&s))?;
        }
        Command::EngelProbe { g, x, max_len, out } => {
            let g = word(&g)?;
            let probe = match x {
                Some(x) => engel::left_engel_probe(&g, &word(&x)?, ctx.bound, &ctx.cfg)?,
                None => Probe::NoSinkUpTo(engel::search_left_witness(&g, ctx.bound, max_len, &ctx.cfg)?),
            };
            let (body, text, code) = match probe {
                Probe::Sink(s) => {
                    let text = format!("sink at depth {}", s.depth);
                    (CertificateBody::EngelSink(s), text, 0)
                }
                Probe::NoSinkUpTo(w) => {
                    let text = format!("no sink up to {} for x = {} (moves {})", w.bound, w.x, w.witness);
                    (CertificateBody::NonEngelWitness(w), text, 1)
                }
            };
            ctx.emit_certificate(&Certificate::new(body), text, out.as_ref())?;
            return Ok(code);
        }
        Command::Lemma1 { k, g, m } => {
            let r = engel::lemma1_check(&k.parse()?, &word(&g)?, m, &ctx.cfg)?;
            ctx.emit(r.holds, to_value(&r))?;
            return Ok(if r.holds { 0 } else { 1 });
        }
        Command::Lemma2 { x, y, m } => {
            let r = engel::lemma2_check(&word(&x)?, &word(&y)?, m, &ctx.cfg)?;
            ctx.emit(r.holds, to_value(&r))?;
            return Ok(if r.holds { 0 } else { 1 });
        }
        Command::ReplayLeft { x, out } => {
            let r = engel::replay_bounded_left(&word(&x)?, ctx.bound, &ctx.cfg)?;
            let text = format!(
                "x = {} is not left {}-Engel: section {} at {:?}, k = {} of order {}, [y,_{} x] moves {}",
                r.x, r.bound, r.chain.active, r.chain.vertex.to_string(), r.k, r.k_order, r.bound, r.witness
            );
            ctx.emit_certificate(&Certificate::new(CertificateBody::BoundedLeftRefutation(r)), text, out.as_ref())?;
        }
        Command::ReplayRight { x, out } => {
            let r = engel::replay_right(&word(&x)?, ctx.bound, &ctx.cfg)?;
            let text = format!(
                "x = {} has no right Engel sink <= {}: h = {}, y1 = {}, y = {} ({} letters)",
                r.x,
                r.bound + 1,
                r.h,
                r.y1,
                if r.y.len() > 40 { "…".to_string() } else { r.y.to_string() },
                r.y.len()
            );
            ctx.emit_certificate(&Certificate::new(CertificateBody::RightRefutation(r)), text, out.as_ref())?;
        }
        Command::SearchPair => match engel::search_nonengel_pair(ctx.bound, &ctx.cfg)? {
            Some((h, y1)) => {
                let text = format!("h = {h}\ny1 = {y1}");
                ctx.emit(text, json!({ "bound": ctx.bound, "h": h, "y1": y1 }))?;
            }
            None => {
                return Err(Error::SearchExhausted {
                    what: format!("no pair with towers nontrivial through {}", ctx.bound),
                    budget: ctx.cfg.budget,
                })
            }
        },
        Command::Survey { samples, opponents, g } => {
            let params = SurveyParams {
                samples,
                opponents,
                bound: ctx.bound,
                seed: ctx.cfg.seed,
                involution: g.as_deref().map(word).transpose()?,
            };
            let r = engel::involution_survey(&params, &ctx.cfg)?;
            let text = match &r.excluded {
                Some(why) => format!("excluded: {why}"),
                None => format!(
                    "{} pairs: {} sinks, {} without sink up to {}, {} overflows; depths {:?}",
                    r.pairs, r.sinks, r.no_sink, r.params.bound, r.overflow, r.depth_histogram
                ),
            };
            ctx.emit(text, to_value(&r))?;
        }
        Command::Verify { path } => {
            let cert = Certificate::from_json(&std::fs::read_to_string(&path)?)?;
            certificate::verify(&cert, &ctx.cfg)?;
            ctx.emit("ok", json!({ "path": path, "verified": true }))?;
        }
    }
    Ok(0)
}
