//! Command-line surface. Every field is optional or empty by default so a
//! config file can supply it; [`crate::config`] applies the precedence and
//! fills in defaults.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Parser, Serialize, Deserialize)]
#[command(name = "cognate", version, about = "Cognate detection between Hindi and other Indian languages")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct GlobalArgs {
    /// JSON run configuration (or a report embedding one); flags override it.
    #[arg(long, global = true, value_name = "FILE")]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Worker threads (default: available cores).
    #[arg(long, global = true, value_name = "N")]
    pub threads: Option<usize>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write data here instead of standard output.
    #[arg(long, global = true, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// More log output on standard error (repeatable).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    #[serde(skip)]
    pub verbose: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Text,
    Json,
    Csv,
    Markdown,
}

#[derive(Debug, Clone, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Transliterate Brahmic text to Devanagari (or from it with --to).
    Translit(TranslitArgs),
    /// Orthographic similarity of a word pair, optionally with contexts.
    Score(ScoreArgs),
    /// Phonetic feature vectors of words.
    Phonvec(PhonvecArgs),
    /// Angular similarity of two words in cross-lingual embeddings.
    EmbSim(EmbSimArgs),
    /// Build or inspect context dictionaries.
    #[command(subcommand)]
    Context(ContextCommand),
    /// Cross-validate one or more feature sets.
    Evaluate(EvaluateArgs),
    /// Cross-validate several feature sets over shared folds.
    Ablate(EvaluateArgs),
    /// Grid-search a model on a whole dataset and save it.
    Train(TrainArgs),
    /// Label candidate pairs with a trained model.
    Predict(PredictArgs),
    /// Parallel corpus augmentation.
    #[command(subcommand)]
    Augment(AugmentCommand),
    /// Byte-pair encoding.
    #[command(subcommand)]
    Bpe(BpeCommand),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Translit(_) => "translit",
            Command::Score(_) => "score",
            Command::Phonvec(_) => "phonvec",
            Command::EmbSim(_) => "emb-sim",
            Command::Context(ContextCommand::Build(_)) => "context build",
            Command::Context(ContextCommand::Stats(_)) => "context stats",
            Command::Evaluate(_) => "evaluate",
            Command::Ablate(_) => "ablate",
            Command::Train(_) => "train",
            Command::Predict(_) => "predict",
            Command::Augment(AugmentCommand::Inject(_)) => "augment inject",
            Command::Bpe(BpeCommand::Learn(_)) => "bpe learn",
            Command::Bpe(BpeCommand::Apply(_)) => "bpe apply",
        }
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct TranslitArgs {
    /// Text to convert; lines of standard input when omitted.
    #[serde(default)]
    pub text: Vec<String>,
    /// Convert Devanagari into this script instead.
    #[arg(long, value_name = "SCRIPT")]
    pub to: Option<String>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ScoreArgs {
    pub word_s: Option<String>,
    pub word_t: Option<String>,
    #[arg(long)]
    pub q_len: Option<usize>,
    #[arg(long)]
    pub context_cap: Option<usize>,
    #[arg(long, value_name = "FILE")]
    pub context_src: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    pub context_tgt: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    pub stopwords_src: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    pub stopwords_tgt: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct PhonvecArgs {
    #[serde(default)]
    pub words: Vec<String>,
    /// Phonetic feature table CSV (default: the bundled Devanagari table).
    #[arg(long, value_name = "FILE")]
    pub table: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct EmbSimArgs {
    pub word_s: Option<String>,
    pub word_t: Option<String>,
    #[arg(long, value_name = "FILE")]
    pub emb_src: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    pub emb_tgt: Option<PathBuf>,
}

#[derive(Debug, Clone, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ContextCommand {
    /// Build a context dictionary from a wordnet export.
    Build(ContextBuildArgs),
    /// Summarize a context dictionary.
    Stats(ContextStatsArgs),
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ContextBuildArgs {
    /// Rows of `word TAB gloss TAB example|example...`.
    #[arg(long, value_name = "FILE")]
    pub wordnet: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    pub stopwords: Option<PathBuf>,
    #[arg(long)]
    pub lang: Option<String>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ContextStatsArgs {
    /// Dictionary JSON or raw wordnet export.
    #[arg(long, value_name = "FILE")]
    pub context: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    pub stopwords: Option<PathBuf>,
    /// Report coverage of this dataset's words.
    #[arg(long, value_name = "FILE")]
    pub dataset: Option<PathBuf>,
    /// Which side of the dataset to check.
    #[arg(long, value_enum)]
    pub side: Option<Side>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Src,
    Tgt,
}

/// Resources shared by the experiment commands.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct ResourceArgs {
    #[arg(long, value_name = "FILE")]
    pub context_src: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    pub context_tgt: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    pub stopwords_src: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    pub stopwords_tgt: Option<PathBuf>,
    /// Source-side embeddings for every embedding tag not given by --embedding.
    #[arg(long, value_name = "FILE")]
    pub emb_src: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    pub emb_tgt: Option<PathBuf>,
    /// Extra embedding pair as TAG=SRC_FILE,TGT_FILE (repeatable).
    #[arg(long, value_name = "TAG=SRC,TGT")]
    #[serde(default)]
    pub embedding: Vec<String>,
    /// Phonetic feature table CSV (default: the bundled Devanagari table).
    #[arg(long, value_name = "FILE")]
    pub phonetic_table: Option<PathBuf>,
    #[arg(long)]
    pub q_len: Option<usize>,
    #[arg(long)]
    pub context_cap: Option<usize>,
    /// Leave OOV context tokens out of context vectors instead of counting them as zero.
    #[arg(long)]
    #[serde(default)]
    pub skip_oov_context: bool,
}

/// Training and cross-validation knobs.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct TrainingArgs {
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub lr: Option<f64>,
    #[arg(long)]
    pub lr_floor: Option<f64>,
    #[arg(long)]
    pub batch_size: Option<usize>,
    #[arg(long)]
    pub max_epochs: Option<usize>,
    #[arg(long)]
    pub validation_fraction: Option<f64>,
    /// Hidden layer sizes to search (0 = logistic regression).
    #[arg(long, value_delimiter = ',', value_name = "N,...")]
    #[serde(default)]
    pub hidden_dims: Vec<usize>,
    /// Activations to search.
    #[arg(long, value_delimiter = ',', value_name = "NAME,...")]
    #[serde(default)]
    pub activations: Vec<String>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct EvaluateArgs {
    #[arg(long, value_name = "FILE")]
    pub dataset: Option<PathBuf>,
    /// Feature sets such as WLS, PVS+WLS, XL+WLS.
    #[arg(long, value_delimiter = ',', value_name = "SET,...")]
    #[serde(default)]
    pub features: Vec<String>,
    #[arg(long)]
    pub k: Option<usize>,
    #[command(flatten)]
    #[serde(default)]
    pub resources: ResourceArgs,
    #[command(flatten)]
    #[serde(default)]
    pub training: TrainingArgs,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct TrainArgs {
    #[arg(long, value_name = "FILE")]
    pub dataset: Option<PathBuf>,
    #[arg(long, value_name = "SET")]
    pub features: Option<String>,
    #[command(flatten)]
    #[serde(default)]
    pub resources: ResourceArgs,
    #[command(flatten)]
    #[serde(default)]
    pub training: TrainingArgs,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct PredictArgs {
    /// Model written by `train`.
    #[arg(long, value_name = "FILE")]
    pub model: Option<PathBuf>,
    /// Candidate pairs, `lang TAB word_s TAB word_t [TAB label]`.
    #[arg(long, value_name = "FILE")]
    pub pairs: Option<PathBuf>,
    #[command(flatten)]
    #[serde(default)]
    pub resources: ResourceArgs,
}

#[derive(Debug, Clone, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AugmentCommand {
    /// Append cognate pairs to a parallel corpus as one-word sentences.
    Inject(InjectArgs),
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct InjectArgs {
    #[arg(long, value_name = "FILE")]
    pub src: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    pub tgt: Option<PathBuf>,
    /// Pairs TSV; rows labeled 0 are ignored, unlabeled rows are injected.
    #[arg(long, value_name = "FILE")]
    pub cognates: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    pub out_src: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    pub out_tgt: Option<PathBuf>,
}

#[derive(Debug, Clone, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BpeCommand {
    /// Learn merge operations from a corpus.
    Learn(BpeLearnArgs),
    /// Segment text with learned merges.
    Apply(BpeApplyArgs),
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct BpeLearnArgs {
    /// Corpus file (standard input when omitted).
    #[arg(long, value_name = "FILE")]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub merges: Option<usize>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct BpeApplyArgs {
    #[arg(long, value_name = "FILE")]
    pub model: Option<PathBuf>,
    /// Text file (standard input when omitted).
    #[arg(long, value_name = "FILE")]
    pub input: Option<PathBuf>,
}
