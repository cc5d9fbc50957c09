use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "xlembed", version, about = "Train and evaluate bilingual word embeddings")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Count the words of a corpus and write a vocabulary TSV
    Vocab(VocabArgs),
    /// Extract a mutual-best translation lexicon from word alignments
    ExtractLexicon(ExtractLexiconArgs),
    /// Train a bilingual embedding
    Train(TrainArgs),
    /// Spearman correlation of cosine scores with human similarity ratings
    EvalSim(EvalSimArgs),
    /// Top-k dictionary induction accuracy and MRR
    EvalDict(EvalDictArgs),
    /// Cross-lingual document classification with an averaged perceptron
    EvalCldc(EvalCldcArgs),
    /// Nearest neighbours of a word
    Knn(KnnArgs),
    /// Project chosen words onto two principal components
    Pca(PcaArgs),
    /// Generate a synthetic bilingual corpus with gold translations
    Synth(SynthArgs),
    /// Significance tests
    Stats(StatsArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Model {
    Biskip,
    Bicvm,
    Bicca,
    Bivcd,
}

impl Model {
    pub fn name(self) -> &'static str {
        match self {
            Model::Biskip => "biskip",
            Model::Bicvm => "bicvm",
            Model::Bicca => "bicca",
            Model::Bivcd => "bivcd",
        }
    }
}

#[derive(Args, Debug)]
pub struct CommonArgs {
    /// Flat key=value file of flag values; flags on the command line win
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Keep the original casing of tokens (default: lowercase everything)
    #[arg(long)]
    pub keep_case: bool,
}

#[derive(Args, Debug)]
pub struct VocabArgs {
    /// Corpus, one sentence per line
    #[arg(long)]
    pub src: PathBuf,
    /// Drop words seen fewer times [default: 5]
    #[arg(long, default_value_t = 5)]
    pub min_count: u64,
    /// Output vocabulary TSV
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Args, Debug)]
pub struct ExtractLexiconArgs {
    #[arg(long)]
    pub src: PathBuf,
    #[arg(long)]
    pub tgt: PathBuf,
    /// Word alignments, one line of `i-j` pairs per sentence pair
    #[arg(long)]
    pub align: PathBuf,
    /// Drop words seen fewer times [default: 5]
    #[arg(long, default_value_t = 5)]
    pub min_count: u64,
    /// Output lexicon TSV
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Args, Debug)]
pub struct TrainArgs {
    /// Trainer to run
    #[arg(long, value_enum)]
    pub model: Model,
    /// Source-language sentences, one per line
    #[arg(long)]
    pub src: Option<PathBuf>,
    /// Target-language sentences, line-aligned with --src
    #[arg(long)]
    pub tgt: Option<PathBuf>,
    /// Word alignments, one line of `i-j` pairs per sentence pair (required by biskip)
    #[arg(long)]
    pub align: Option<PathBuf>,
    /// Translation lexicon TSV for bicca (extracted from --align when absent)
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
    /// Pre-trained source embeddings for bicca
    #[arg(long)]
    pub src_emb: Option<PathBuf>,
    /// Pre-trained target embeddings for bicca
    #[arg(long)]
    pub tgt_emb: Option<PathBuf>,
    /// Vector size [default: 200]
    #[arg(long)]
    pub dim: Option<usize>,
    /// Maximum context radius [default: biskip 10, bicca 5, bivcd 5]
    #[arg(long)]
    pub window: Option<usize>,
    /// Negative samples per context [default: biskip 30, bicca 5, bivcd 5]
    #[arg(long)]
    pub negatives: Option<usize>,
    /// Passes over the corpus [default: biskip 5, bicca 5, bivcd 5, bicvm 100]
    #[arg(long)]
    pub epochs: Option<usize>,
    /// Initial learning rate [default: 0.025; bicvm 0.001]
    #[arg(long)]
    pub lr: Option<f64>,
    /// bicvm hinge margin [default: 200]
    #[arg(long)]
    pub margin: Option<f64>,
    /// bicvm mini-batch size [default: 50]
    #[arg(long)]
    pub batch: Option<usize>,
    /// bicvm noise sentences per aligned pair [default: 10]
    #[arg(long)]
    pub noise_k: Option<usize>,
    /// bicvm weight decay [default: 0.00001]
    #[arg(long)]
    pub l2: Option<f64>,
    /// bicca fraction of dimensions kept as canonical components [default: 0.5]
    #[arg(long)]
    pub k_ratio: Option<f64>,
    /// Drop words seen fewer times [default: 5]
    #[arg(long)]
    pub min_count: Option<u64>,
    /// biskip weight of the cross-lingual term [default: 4]
    #[arg(long)]
    pub cross_weight: Option<f64>,
    /// biskip weight of the source monolingual term [default: 1]
    #[arg(long)]
    pub alpha: Option<f64>,
    /// biskip weight of the target monolingual term [default: 1]
    #[arg(long)]
    pub beta: Option<f64>,
    /// Frequent-word subsampling threshold, 0 disables [default: 0]
    #[arg(long)]
    pub subsample: Option<f64>,
    /// Random seed [default: 1]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads [default: 1]
    #[arg(long)]
    pub threads: Option<usize>,
    /// Output prefix; writes PREFIX.src.vec, PREFIX.tgt.vec and PREFIX.manifest
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Args, Debug)]
pub struct ReportOut {
    /// Output prefix; writes PREFIX.report.txt, PREFIX.items.tsv and PREFIX.manifest
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct EvalSimArgs {
    /// Embedding file
    #[arg(long)]
    pub emb: PathBuf,
    /// Word pairs TSV: word_a, word_b, score
    #[arg(long)]
    pub data: PathBuf,
    #[command(flatten)]
    pub out: ReportOut,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Args, Debug)]
pub struct EvalDictArgs {
    #[arg(long)]
    pub src_emb: PathBuf,
    #[arg(long)]
    pub tgt_emb: PathBuf,
    /// Gold translation pairs TSV
    #[arg(long, conflicts_with = "synsets")]
    pub lexicon: Option<PathBuf>,
    /// Aligned synsets TSV: comma-separated source lemmas, tab, target lemmas
    #[arg(long, requires_all = ["src_vocab", "tgt_vocab"])]
    pub synsets: Option<PathBuf>,
    /// Source vocabulary TSV with counts, for pruning synsets
    #[arg(long)]
    pub src_vocab: Option<PathBuf>,
    /// Target vocabulary TSV with counts, for pruning synsets
    #[arg(long)]
    pub tgt_vocab: Option<PathBuf>,
    /// Minimum corpus frequency of synset words [default: 1000]
    #[arg(long, default_value_t = 1000)]
    pub min_freq: u64,
    /// Neighbourhood size for a hit [default: 10]
    #[arg(long, default_value_t = 10)]
    pub k: usize,
    #[command(flatten)]
    pub out: ReportOut,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Args, Debug)]
pub struct EvalCldcArgs {
    #[arg(long)]
    pub src_emb: PathBuf,
    #[arg(long)]
    pub tgt_emb: PathBuf,
    /// Training documents (source language): label, tab, tokens
    #[arg(long)]
    pub train: PathBuf,
    /// Test documents (target language): label, tab, tokens
    #[arg(long)]
    pub test: PathBuf,
    /// Train on target-language documents and test on source-language ones
    #[arg(long)]
    pub reverse: bool,
    /// Perceptron epochs [default: 10]
    #[arg(long, default_value_t = 10)]
    pub iters: usize,
    /// Shuffling seed [default: 1]
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[command(flatten)]
    pub out: ReportOut,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Args, Debug)]
pub struct KnnArgs {
    /// Space of the query word
    #[arg(long)]
    pub src_emb: PathBuf,
    /// Space to search (default: the query space, excluding the word itself)
    #[arg(long)]
    pub tgt_emb: Option<PathBuf>,
    #[arg(long)]
    pub word: String,
    /// Neighbours to list [default: 10]
    #[arg(long, default_value_t = 10)]
    pub k: usize,
    /// Also write the neighbours to this file (plus a manifest beside it)
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Args, Debug)]
pub struct PcaArgs {
    #[arg(long)]
    pub src_emb: PathBuf,
    /// Comma-separated source words to project
    #[arg(long, value_delimiter = ',')]
    pub src_words: Vec<String>,
    #[arg(long, requires = "tgt_words")]
    pub tgt_emb: Option<PathBuf>,
    /// Comma-separated target words to project
    #[arg(long, value_delimiter = ',')]
    pub tgt_words: Vec<String>,
    /// Output TSV: word, language, x, y
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Args, Debug)]
pub struct SynthArgs {
    /// Words per language [default: 500]
    #[arg(long, default_value_t = 500)]
    pub vocab_size: usize,
    /// Sentence pairs [default: 20000]
    #[arg(long, default_value_t = 20_000)]
    pub sentences: usize,
    /// Shortest sentence [default: 5]
    #[arg(long, default_value_t = 5)]
    pub min_len: usize,
    /// Longest sentence [default: 15]
    #[arg(long, default_value_t = 15)]
    pub max_len: usize,
    /// Topics; classification data needs at least 2 [default: 2]
    #[arg(long, default_value_t = 2)]
    pub topics: usize,
    /// Chance a target word is replaced by a random one [default: 0.05]
    #[arg(long, default_value_t = 0.05)]
    pub noise: f64,
    /// Classification documents per side [default: 2000]
    #[arg(long, default_value_t = 2000)]
    pub docs: usize,
    /// Random seed [default: 42]
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Output directory
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Args, Debug)]
pub struct StatsArgs {
    #[command(subcommand)]
    pub test: StatsTest,
}

#[derive(Subcommand, Debug)]
pub enum StatsTest {
    /// Steiger's Z test for two correlations sharing one variable
    Steiger(SteigerArgs),
    /// McNemar's test on two per-item outcome files
    Mcnemar(McnemarArgs),
}

#[derive(Args, Debug)]
pub struct SteigerArgs {
    /// Correlation of system A with the reference
    #[arg(long, allow_hyphen_values = true)]
    pub rho_a: f64,
    /// Correlation of system B with the reference
    #[arg(long, allow_hyphen_values = true)]
    pub rho_b: f64,
    /// Correlation between the two systems' scores
    #[arg(long, allow_hyphen_values = true)]
    pub rho_ab: f64,
    /// Number of items
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Args, Debug)]
pub struct McnemarArgs {
    /// Per-item outcomes of system A (items TSV from an eval command)
    #[arg(long)]
    pub items_a: PathBuf,
    /// Per-item outcomes of system B
    #[arg(long)]
    pub items_b: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub common: CommonArgs,
}
