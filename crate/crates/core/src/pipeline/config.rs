//! Declarative run configuration: a flat TOML document whose keys can be
//! overridden from the environment as `LEXIDRIFT_<KEY>`.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::align::{AlignerConfig, AlignerRegistry};
use crate::classify::{LogRegConfig, TrainConfig, TuneConfig};
use crate::corpus::TokenizationPolicy;
use crate::embed::DriftParams;
use crate::error::{Error, Result};
use crate::eval::EvalConfig;
use crate::tag::LangDomainTag;

pub const ENV_PREFIX: &str = "LEXIDRIFT_";

const OPTIONAL_PATH_KEYS: [&str; 3] = ["emoticons", "emoticon_embedding", "pharaoh"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub corpus: PathBuf,
    pub seeds: PathBuf,
    /// Target-language embedding trained on the corpus domain.
    pub source_embedding: PathBuf,
    /// Target-language embedding of the domain being adapted to.
    pub target_embedding: PathBuf,
    pub gold: PathBuf,
    pub emoticons: Option<PathBuf>,
    /// Embedding used for emoticon evaluation; defaults to `target_embedding`.
    pub emoticon_embedding: Option<PathBuf>,
    /// External alignments, read by the `pharaoh` aligner.
    pub pharaoh: Option<PathBuf>,
    pub output_dir: PathBuf,

    pub source_language: String,
    pub target_language: String,
    pub source_domain: String,
    pub target_domain: String,
    pub emoticon_domain: String,

    pub lowercase: bool,
    pub strip_punctuation: bool,
    pub min_token_length: usize,

    pub aligner: String,
    pub em_iterations: usize,
    pub diagonal_tension: f64,
    pub use_null: bool,
    pub prob_floor: f64,

    pub q: f64,

    pub epsilon: f64,
    pub lambda_floor: f64,
    pub cap: Option<usize>,

    /// Fixed weight exponent; when absent it is tuned over `gamma_grid`.
    pub gamma: Option<f64>,
    pub gamma_grid: Vec<f64>,
    pub l2: f64,
    /// Defaults to `[l2]`.
    pub l2_grid: Option<Vec<f64>>,
    pub folds: usize,
    pub tol: f64,
    pub max_iters: usize,

    pub test_fraction: f64,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        let aligner = AlignerConfig::default();
        let tokens = TokenizationPolicy::default();
        let drift = DriftParams::default();
        let logreg = LogRegConfig::default();
        let tune = TuneConfig::default();
        Self {
            corpus: PathBuf::new(),
            seeds: PathBuf::new(),
            source_embedding: PathBuf::new(),
            target_embedding: PathBuf::new(),
            gold: PathBuf::new(),
            emoticons: None,
            emoticon_embedding: None,
            pharaoh: None,
            output_dir: PathBuf::from("lexidrift-out"),
            source_language: "eng".into(),
            target_language: "und".into(),
            source_domain: "bible".into(),
            target_domain: "wiki".into(),
            emoticon_domain: "twitter".into(),
            lowercase: tokens.lowercase,
            strip_punctuation: tokens.strip_punctuation,
            min_token_length: tokens.min_token_length,
            aligner: "model1".into(),
            em_iterations: aligner.em_iterations,
            diagonal_tension: aligner.diagonal_tension,
            use_null: aligner.use_null,
            prob_floor: aligner.prob_floor,
            q: 0.05,
            epsilon: drift.epsilon,
            lambda_floor: drift.lambda_floor,
            cap: drift.cap,
            gamma: None,
            gamma_grid: tune.gamma_grid,
            l2: logreg.l2,
            l2_grid: None,
            folds: tune.folds,
            tol: logreg.tol,
            max_iters: logreg.max_iters,
            test_fraction: 0.2,
            seed: tune.seed,
        }
    }
}

fn tag(language: &str, domain: &str) -> Result<LangDomainTag> {
    LangDomainTag::new(language, domain)
}

impl RunConfig {
    /// Parses a TOML document, then applies `overrides` (`(KEY, value)` pairs
    /// with the prefix already removed). Values of string-typed keys are taken
    /// verbatim; others are read as TOML literals.
    pub fn from_toml_with<I, K, V>(text: &str, overrides: I) -> Result<Self>
    where
        I: IntoIterator<Item = (K, V)>,
        K: AsRef<str>,
        V: AsRef<str>,
    {
        let mut table: toml::Table =
            toml::from_str(text).map_err(|e| Error::Config(vec![e.to_string()]))?;
        let reference =
            toml::Table::try_from(Self::default()).map_err(|e| Error::Serde(e.to_string()))?;
        for (key, value) in overrides {
            let key = key.as_ref().to_ascii_lowercase();
            let value = value.as_ref();
            let string_typed = OPTIONAL_PATH_KEYS.contains(&key.as_str())
                || matches!(reference.get(&key), Some(toml::Value::String(_)));
            let parsed = if string_typed {
                toml::Value::String(value.to_string())
            } else {
                toml::from_str::<toml::Table>(&format!("v = {value}"))
                    .ok()
                    .and_then(|mut t| t.remove("v"))
                    .unwrap_or_else(|| toml::Value::String(value.to_string()))
            };
            table.insert(key, parsed);
        }
        toml::Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| Error::Config(vec![e.to_string()]))
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        Self::from_toml_with(text, std::iter::empty::<(String, String)>())
    }

    /// Reads `path` and applies `LEXIDRIFT_*` variables from the process
    /// environment.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_with(&text, env_overrides())
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Serde(e.to_string()))
    }

    pub fn tokenization(&self) -> TokenizationPolicy {
        TokenizationPolicy {
            lowercase: self.lowercase,
            strip_punctuation: self.strip_punctuation,
            min_token_length: self.min_token_length,
        }
    }

    pub fn aligner_config(&self) -> AlignerConfig {
        AlignerConfig {
            em_iterations: self.em_iterations,
            diagonal_tension: self.diagonal_tension,
            use_null: self.use_null,
            prob_floor: self.prob_floor,
        }
    }

    pub fn drift_params(&self) -> DriftParams {
        DriftParams {
            gamma: self.gamma.unwrap_or(DriftParams::default().gamma),
            cap: self.cap,
            epsilon: self.epsilon,
            lambda_floor: self.lambda_floor,
        }
    }

    pub fn logreg_config(&self) -> LogRegConfig {
        LogRegConfig {
            l2: self.l2,
            tol: self.tol,
            max_iters: self.max_iters,
        }
    }

    pub fn tune_config(&self) -> TuneConfig {
        TuneConfig {
            gamma_grid: self.gamma_grid.clone(),
            l2_grid: self.l2_grid.clone().unwrap_or_else(|| vec![self.l2]),
            folds: self.folds,
            seed: self.seed,
            tol: self.tol,
            max_iters: self.max_iters,
            lambda_floor: self.lambda_floor,
        }
    }

    pub fn train_config(&self) -> TrainConfig {
        TrainConfig {
            logreg: self.logreg_config(),
            gamma: self.gamma,
            tune: self.tune_config(),
            lambda_floor: self.lambda_floor,
        }
    }

    pub fn eval_config(&self) -> EvalConfig {
        EvalConfig {
            logreg: self.logreg_config(),
            gamma: self.gamma,
            tune: self.tune_config(),
            lambda_floor: self.lambda_floor,
        }
    }

    pub fn corpus_source_tag(&self) -> Result<LangDomainTag> {
        tag(&self.source_language, &self.source_domain)
    }

    /// Tag of the induced lexicon and of the corpus target side.
    pub fn corpus_target_tag(&self) -> Result<LangDomainTag> {
        tag(&self.target_language, &self.source_domain)
    }

    pub fn target_domain_tag(&self) -> Result<LangDomainTag> {
        tag(&self.target_language, &self.target_domain)
    }

    pub fn emoticon_domain_tag(&self) -> Result<LangDomainTag> {
        tag(&self.target_language, &self.emoticon_domain)
    }

    pub fn emoticon_embedding_path(&self) -> &Path {
        self.emoticon_embedding
            .as_deref()
            .unwrap_or(&self.target_embedding)
    }
}

/// `(KEY, value)` pairs of every `LEXIDRIFT_*` environment variable, prefix removed.
pub fn env_overrides() -> Vec<(String, String)> {
    let mut pairs: Vec<(String, String)> = std::env::vars()
        .filter_map(|(k, v)| k.strip_prefix(ENV_PREFIX).map(|k| (k.to_string(), v)))
        .collect();
    pairs.sort();
    pairs
}

fn check_file(problems: &mut Vec<String>, key: &str, path: &Path) {
    if path.as_os_str().is_empty() {
        problems.push(format!("{key}: no path given"));
    } else if !path.is_file() {
        problems.push(format!("{key}: {} does not exist", path.display()));
    }
}

fn check_range(problems: &mut Vec<String>, key: &str, value: f64, ok: bool, range: &str) {
    if !(value.is_finite() && ok) {
        problems.push(format!("{key} = {value} is outside {range}"));
    }
}

fn check_output_dir(problems: &mut Vec<String>, path: &Path) {
    if path.as_os_str().is_empty() {
        problems.push("output_dir: no path given".into());
        return;
    }
    let existing = path
        .ancestors()
        .find(|p| p.exists() || p.as_os_str().is_empty());
    match existing {
        Some(p) if p.as_os_str().is_empty() => {}
        Some(p) if !p.is_dir() => {
            problems.push(format!("output_dir: {} is not a directory", p.display()));
        }
        Some(p)
            if fs::metadata(p)
                .map(|m| m.permissions().readonly())
                .unwrap_or(true) =>
        {
            problems.push(format!("output_dir: {} is not writable", p.display()));
        }
        _ => {}
    }
}

/// Every violation in `config`, in a fixed order. Empty when the config is usable.
pub fn validate_config(config: &RunConfig) -> Vec<String> {
    let mut problems = Vec::new();
    check_file(&mut problems, "corpus", &config.corpus);
    check_file(&mut problems, "seeds", &config.seeds);
    check_file(&mut problems, "source_embedding", &config.source_embedding);
    check_file(&mut problems, "target_embedding", &config.target_embedding);
    check_file(&mut problems, "gold", &config.gold);
    if let Some(p) = &config.emoticons {
        check_file(&mut problems, "emoticons", p);
    }
    if let Some(p) = &config.emoticon_embedding {
        check_file(&mut problems, "emoticon_embedding", p);
    }
    if let Some(p) = &config.pharaoh {
        check_file(&mut problems, "pharaoh", p);
    }
    check_output_dir(&mut problems, &config.output_dir);

    for (key, language, domain) in [
        (
            "source_language/source_domain",
            &config.source_language,
            &config.source_domain,
        ),
        (
            "target_language/source_domain",
            &config.target_language,
            &config.source_domain,
        ),
        (
            "target_language/target_domain",
            &config.target_language,
            &config.target_domain,
        ),
        (
            "target_language/emoticon_domain",
            &config.target_language,
            &config.emoticon_domain,
        ),
    ] {
        if let Err(e) = tag(language, domain) {
            problems.push(format!("{key}: {e}"));
        }
    }

    let registry = AlignerRegistry::default();
    if !registry.names().any(|n| n == config.aligner) {
        problems.push(format!(
            "aligner {:?} is not registered (known: {})",
            config.aligner,
            registry.names().collect::<Vec<_>>().join(", ")
        ));
    }
    if config.aligner == "pharaoh" && config.pharaoh.is_none() {
        problems.push("aligner \"pharaoh\" needs the pharaoh path".into());
    }
    if let Err(Error::Config(list)) = config.aligner_config().validate() {
        problems.extend(list);
    }
    if config.min_token_length < 1 {
        problems.push("min_token_length must be >= 1".into());
    }

    check_range(
        &mut problems,
        "q",
        config.q,
        config.q > 0.0 && config.q <= 1.0,
        "(0, 1]",
    );
    check_range(
        &mut problems,
        "epsilon",
        config.epsilon,
        config.epsilon > 0.0 && config.epsilon < 1e-3,
        "(0, 1e-3)",
    );
    check_range(
        &mut problems,
        "lambda_floor",
        config.lambda_floor,
        config.lambda_floor > 0.0,
        "(0, inf)",
    );
    if let Some(cap) = config.cap {
        if cap < 2 {
            problems.push(format!("cap = {cap} must be >= 2"));
        }
    }
    if let Some(g) = config.gamma {
        check_range(&mut problems, "gamma", g, g >= 0.0, "[0, inf)");
    }
    if config.gamma_grid.is_empty() {
        problems.push("gamma_grid is empty".into());
    }
    for &g in &config.gamma_grid {
        check_range(&mut problems, "gamma_grid entry", g, g >= 0.0, "[0, inf)");
    }
    check_range(&mut problems, "l2", config.l2, config.l2 >= 0.0, "[0, inf)");
    if let Some(grid) = &config.l2_grid {
        if grid.is_empty() {
            problems.push("l2_grid is empty".into());
        }
        for &l in grid {
            check_range(&mut problems, "l2_grid entry", l, l >= 0.0, "[0, inf)");
        }
    }
    if config.folds < 2 {
        problems.push(format!("folds = {} must be >= 2", config.folds));
    }
    check_range(
        &mut problems,
        "tol",
        config.tol,
        config.tol > 0.0,
        "(0, inf)",
    );
    if config.max_iters < 1 {
        problems.push("max_iters must be >= 1".into());
    }
    check_range(
        &mut problems,
        "test_fraction",
        config.test_fraction,
        config.test_fraction > 0.0 && config.test_fraction < 1.0,
        "(0, 1)",
    );
    problems
}
