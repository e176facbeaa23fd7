use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("logical form syntax error at byte {pos}: {msg}")]
    LfSyntax { pos: usize, msg: String },
    #[error("unknown CHILDES tag `{0}`")]
    UnknownTag(String),
    #[error("unbound variable or unknown atom `{0}`")]
    UnboundVar(String),
    #[error("category syntax error: {0}")]
    CategorySyntax(String),
    #[error("semantic type syntax error: {0}")]
    TypeSyntax(String),
    #[error("tag table error: {0}")]
    TagTable(String),
    #[error("functor has no lambda binder")]
    NoBinder,
    #[error("negative observation weight {0}")]
    NegativeWeight(f64),
    #[error("forest limit exceeded: {0}")]
    ForestLimit(String),
    #[error("corpus error at line {line}: {msg}")]
    Corpus { line: usize, msg: String },
    #[error("gold lexicon error: {0}")]
    GoldLexicon(String),
    #[error("invalid synthetic corpus spec: {0}")]
    SynthSpec(String),
    #[error("checkpoint error: {0}")]
    Checkpoint(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}
