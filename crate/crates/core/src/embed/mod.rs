//! Embedding spaces and neighborhood-based domain drift.

mod drift;
mod space;

pub use drift::{
    compute_drift_table, domdrift_score, drift_report, shared_vocab, word_profile, DriftEntry,
    DriftParams, DriftReport, DriftTable, SharedVocab, WordProfile,
};
pub(crate) use drift::{
    normalize_to_unit_mean as normalize_weights, raw_weight as drift_raw_weight,
};
pub use space::EmbeddingSpace;
