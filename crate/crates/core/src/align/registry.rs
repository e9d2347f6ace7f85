//! Named alignment strategies, selectable at runtime.

use std::collections::BTreeMap;
use std::path::PathBuf;

use super::{
    load_pharaoh_alignments, train_aligner, viterbi_align, AlignerConfig, AlignmentLink,
    TranslationTable,
};
use crate::corpus::ParallelCorpus;
use crate::error::{Error, Result};

pub struct AlignmentOutput {
    /// Present when the strategy estimates translation probabilities.
    pub table: Option<TranslationTable>,
    pub links: Vec<AlignmentLink>,
}

pub trait AlignmentStrategy: Send + Sync {
    fn name(&self) -> &'static str;

    fn align(&self, corpus: &ParallelCorpus) -> Result<AlignmentOutput>;
}

/// Everything a strategy constructor may need.
#[derive(Debug, Clone, Default)]
pub struct AlignerOptions {
    pub config: AlignerConfig,
    pub pharaoh_path: Option<PathBuf>,
}

/// EM-trained lexical translation model followed by Viterbi linking.
pub struct Model1Strategy {
    pub config: AlignerConfig,
}

impl AlignmentStrategy for Model1Strategy {
    fn name(&self) -> &'static str {
        "model1"
    }

    fn align(&self, corpus: &ParallelCorpus) -> Result<AlignmentOutput> {
        let table = train_aligner(corpus, &self.config)?;
        let links = viterbi_align(&table, corpus, &self.config);
        Ok(AlignmentOutput {
            table: Some(table),
            links,
        })
    }
}

/// Links produced by an external aligner, read from a Pharaoh file.
pub struct PharaohStrategy {
    pub path: PathBuf,
}

impl AlignmentStrategy for PharaohStrategy {
    fn name(&self) -> &'static str {
        "pharaoh"
    }

    fn align(&self, corpus: &ParallelCorpus) -> Result<AlignmentOutput> {
        Ok(AlignmentOutput {
            table: None,
            links: load_pharaoh_alignments(&self.path, corpus)?,
        })
    }
}

pub type AlignerFactory = fn(&AlignerOptions) -> Result<Box<dyn AlignmentStrategy>>;

pub struct AlignerRegistry {
    factories: BTreeMap<&'static str, AlignerFactory>,
}

impl Default for AlignerRegistry {
    fn default() -> Self {
        let mut registry = Self::empty();
        registry.register("model1", |opts| {
            opts.config.validate()?;
            Ok(Box::new(Model1Strategy {
                config: opts.config,
            }))
        });
        registry.register("pharaoh", |opts| {
            let path = opts.pharaoh_path.clone().ok_or_else(|| {
                Error::InvalidParameter("the pharaoh aligner needs an alignment file".into())
            })?;
            Ok(Box::new(PharaohStrategy { path }))
        });
        registry
    }
}

impl AlignerRegistry {
    pub fn empty() -> Self {
        Self {
            factories: BTreeMap::new(),
        }
    }

    pub fn register(&mut self, name: &'static str, factory: AlignerFactory) {
        self.factories.insert(name, factory);
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.factories.keys().copied()
    }

    pub fn create(
        &self,
        name: &str,
        options: &AlignerOptions,
    ) -> Result<Box<dyn AlignmentStrategy>> {
        let factory = self
            .factories
            .get(name)
            .ok_or_else(|| Error::UnknownStrategy {
                name: name.to_string(),
                known: self.names().collect::<Vec<_>>().join(", "),
            })?;
        factory(options)
    }
}
