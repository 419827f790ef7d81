use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot parse {literal:?} at position {position}: expected {expected}")]
    Parse {
        literal: String,
        position: usize,
        expected: &'static str,
    },

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("element {word} fixes every vertex through depth {cap} but is not trivial; raise the level cap")]
    CapExceeded { word: String, cap: usize },

    #[error("commutator tower reached {len} letters, above the cap of {cap}")]
    TowerOverflow { len: usize, cap: usize },

    #[error("search exhausted its budget of {budget} evaluations: {what}")]
    SearchExhausted { what: String, budget: usize },

    #[error("resource cap: {0}")]
    ResourceCap(String),

    #[error("certificate rejected: {0}")]
    CertificateRejected(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
