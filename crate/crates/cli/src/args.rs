use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use lexidrift::corpus::Side;

pub const DEFAULT_SEED: u64 = 13;

/// Sentiment lexicon induction by annotation projection, with domain-drift
/// weighting for word sentiment classification.
#[derive(Debug, Parser)]
#[command(name = "lexidrift", version)]
pub struct Cli {
    /// Worker threads for parallel stages (defaults to one per core).
    #[arg(long, global = true)]
    pub workers: Option<usize>,

    /// Seed for data splits and cross-validation folds.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Skip pipeline stages whose recorded inputs and outputs are unchanged.
    #[arg(long, global = true)]
    pub resume: bool,

    /// Log progress to stderr.
    #[arg(short, long, global = true)]
    pub verbose: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parallel corpus utilities.
    Corpus {
        #[command(subcommand)]
        command: CorpusCommand,
    },
    /// Word-align a parallel corpus and write Pharaoh links.
    Align(AlignArgs),
    /// Induce a target-language lexicon from aligned seeds.
    Project(ProjectArgs),
    /// Score lexicon words by drift between two embedding spaces.
    Drift(DriftArgs),
    /// Compare a word's nearest neighbors in two embedding spaces.
    DriftReport(DriftReportArgs),
    /// Train the word sentiment classifier.
    Train(TrainArgs),
    /// Evaluate word sentiment classification against a gold lexicon.
    Eval(EvalArgs),
    /// Evaluate emoticon sentiment prediction.
    EvalEmoticons(EvalEmoticonsArgs),
    /// Run every stage from a configuration file.
    Pipeline(ConfigArgs),
    /// Check a configuration file and report every problem.
    Validate(ConfigArgs),
}

#[derive(Debug, Subcommand)]
pub enum CorpusCommand {
    /// Token and type counts for one side of a corpus.
    Stats(StatsArgs),
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value = "target")]
    pub side: Side,
    /// Number of most frequent words to list.
    #[arg(long, default_value_t = 10)]
    pub top: usize,
    #[arg(long, default_value = "eng:bible")]
    pub source_tag: String,
    #[arg(long, default_value = "und:bible")]
    pub target_tag: String,
}

#[derive(Debug, Args)]
pub struct AlignArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    /// Registered aligner to use.
    #[arg(long, default_value = "model1")]
    pub aligner: String,
    #[arg(long, default_value_t = 5)]
    pub iters: usize,
    /// Strength of the preference for links near the diagonal (0 disables it).
    #[arg(long, default_value_t = 0.0)]
    pub tension: f64,
    #[arg(long)]
    pub no_null: bool,
    /// Read links from an external Pharaoh file instead of training.
    #[arg(long)]
    pub load_pharaoh: Option<PathBuf>,
    /// Pharaoh output file.
    #[arg(long)]
    pub out: PathBuf,
    /// Translation table output file.
    #[arg(long)]
    pub table: Option<PathBuf>,
    #[arg(long, default_value = "eng:bible")]
    pub source_tag: String,
    #[arg(long, default_value = "und:bible")]
    pub target_tag: String,
}

#[derive(Debug, Args)]
pub struct ProjectArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub alignments: PathBuf,
    /// Source-language seed lexicon.
    #[arg(long)]
    pub seeds: PathBuf,
    /// False discovery rate level.
    #[arg(long, default_value_t = 0.05)]
    pub q: f64,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value = "eng:bible")]
    pub source_tag: String,
    #[arg(long, default_value = "und:bible")]
    pub target_tag: String,
}

#[derive(Debug, Args)]
pub struct DriftArgs {
    #[arg(long)]
    pub lexicon: PathBuf,
    #[arg(long)]
    pub src_emb: PathBuf,
    #[arg(long)]
    pub tgt_emb: PathBuf,
    /// Exponent of the inverse-drift sample weight.
    #[arg(long, default_value_t = 1.0)]
    pub gamma: f64,
    /// Keep only this many of the most frequent shared words as reference.
    #[arg(long)]
    pub cap: Option<usize>,
    #[arg(long, default_value_t = 1e-10)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 1e-6)]
    pub lambda_floor: f64,
    #[arg(long)]
    pub out: PathBuf,
    /// Number of highest-drift words to print.
    #[arg(long, default_value_t = 10)]
    pub top: usize,
    #[arg(long, default_value = "und:bible")]
    pub src_tag: String,
    #[arg(long, default_value = "und:twitter")]
    pub tgt_tag: String,
}

#[derive(Debug, Args)]
pub struct DriftReportArgs {
    #[arg(long)]
    pub word: String,
    #[arg(short, default_value_t = 10)]
    pub k: usize,
    #[arg(long)]
    pub src_emb: PathBuf,
    #[arg(long)]
    pub tgt_emb: PathBuf,
    #[arg(long, default_value = "und:bible")]
    pub src_tag: String,
    #[arg(long, default_value = "und:twitter")]
    pub tgt_tag: String,
}

/// Classifier settings shared by `train`, `eval` and `eval-emoticons`.
#[derive(Debug, Args)]
pub struct TrainingArgs {
    #[arg(long, default_value_t = 1.0)]
    pub l2: f64,
    /// Fixed weight exponent; tuned over the grid when omitted.
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long, value_delimiter = ',', default_value = "0,0.5,1,2")]
    pub gamma_grid: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    pub l2_grid: Option<Vec<f64>>,
    #[arg(long, default_value_t = 5)]
    pub folds: usize,
    #[arg(long, default_value_t = 1e-6)]
    pub lambda_floor: f64,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub seeds: PathBuf,
    /// Drift table supplying sample weights.
    #[arg(long)]
    pub weights: Option<PathBuf>,
    #[arg(long)]
    pub emb: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value = "und:wiki")]
    pub tag: String,
    #[command(flatten)]
    pub training: TrainingArgs,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub unisent: PathBuf,
    #[arg(long)]
    pub gold: PathBuf,
    #[arg(long)]
    pub emb: PathBuf,
    #[arg(long)]
    pub drift: Option<PathBuf>,
    #[arg(long, default_value_t = 0.2)]
    pub test_frac: f64,
    /// Output directory for `eval.json` and `eval_summary.tsv`.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value = "und:wiki")]
    pub tag: String,
    #[command(flatten)]
    pub training: TrainingArgs,
}

#[derive(Debug, Args)]
pub struct EvalEmoticonsArgs {
    #[arg(long)]
    pub unisent: PathBuf,
    /// Gold emoticon polarities.
    #[arg(long)]
    pub emoticons: PathBuf,
    #[arg(long)]
    pub emb: PathBuf,
    #[arg(long)]
    pub drift: Option<PathBuf>,
    /// Output directory for `emoticons.json` and `emoticons_summary.tsv`.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value = "und:twitter")]
    pub tag: String,
    #[command(flatten)]
    pub training: TrainingArgs,
}

#[derive(Debug, Args)]
pub struct ConfigArgs {
    /// TOML run configuration; `LEXIDRIFT_<KEY>` variables override its keys.
    #[arg(long)]
    pub config: PathBuf,
}
