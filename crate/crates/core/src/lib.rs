//! Sentiment lexicon induction by annotation projection over a word-aligned
//! parallel corpus, embedding-based domain drift scoring, and drift-weighted
//! word sentiment classification.

pub mod align;
pub mod classify;
pub mod corpus;
pub mod embed;
pub mod error;
pub mod eval;
pub mod lexicon;
pub mod pipeline;
pub mod project;
pub mod tag;

pub use error::{Error, Result};
pub use lexicon::{Polarity, SeedLexicon};
pub use tag::LangDomainTag;
