//! Word alignment: translation tables, alignment links, Pharaoh I/O and the
//! pluggable alignment strategies.

mod model1;
mod pharaoh;
mod registry;
mod table;

pub use model1::{corpus_log_likelihood, train_aligner, train_aligner_with, viterbi_align};
pub use pharaoh::{format_pharaoh, load_pharaoh_alignments, parse_pharaoh, write_pharaoh};
pub use registry::{
    AlignerOptions, AlignerRegistry, AlignmentOutput, AlignmentStrategy, Model1Strategy,
    PharaohStrategy,
};
pub use table::TranslationTable;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Source-side token used for the empty (NULL) word.
pub const NULL_WORD: &str = "<null>";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlignerConfig {
    pub em_iterations: usize,
    /// 0 disables the diagonal preference.
    pub diagonal_tension: f64,
    pub use_null: bool,
    /// Probability used for (source, target) pairs missing from the table.
    pub prob_floor: f64,
}

impl Default for AlignerConfig {
    fn default() -> Self {
        Self {
            em_iterations: 5,
            diagonal_tension: 0.0,
            use_null: true,
            prob_floor: 1e-7,
        }
    }
}

impl AlignerConfig {
    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if self.em_iterations < 1 {
            problems.push("em_iterations must be >= 1".to_string());
        }
        if !(self.diagonal_tension.is_finite() && self.diagonal_tension >= 0.0) {
            problems.push(format!(
                "diagonal_tension must be finite and >= 0, got {}",
                self.diagonal_tension
            ));
        }
        if !(self.prob_floor.is_finite() && self.prob_floor > 0.0 && self.prob_floor < 1e-3) {
            problems.push(format!(
                "prob_floor must be in (0, 1e-3), got {}",
                self.prob_floor
            ));
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(problems))
        }
    }

    /// Unnormalized diagonal preference for 0-based source position `i` of
    /// `src_len` and target position `j` of `tgt_len`.
    pub fn diagonal_factor(&self, i: usize, src_len: usize, j: usize, tgt_len: usize) -> f64 {
        if self.diagonal_tension == 0.0 {
            return 1.0;
        }
        let rel_i = (i + 1) as f64 / src_len as f64;
        let rel_j = (j + 1) as f64 / tgt_len as f64;
        (-self.diagonal_tension * (rel_i - rel_j).abs()).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct AlignmentLink {
    pub pair_index: usize,
    /// `None` for links to the NULL word.
    pub source_pos: Option<usize>,
    pub target_pos: usize,
}
