//! An incremental learner of probabilistic CCG grammars and lexicons from
//! paired (utterance, logical form) input.

pub mod ccg;
pub mod cli;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod forest;
pub mod lf;
pub mod model;
pub mod tags;
pub mod trainer;
pub mod types;

pub use error::{Error, Result};
