//! Command-line definitions. Every option can also be set in the
//! `--config` file under its long name.

use std::path::PathBuf;

use clap::{ArgAction, Args, Parser, Subcommand, ValueEnum};

use diachrony::detect::ChangeMethod;
use diachrony::embed::{Architecture, MatrixRole};

#[derive(Debug, Parser)]
#[command(
    name = "diachrony",
    version,
    about = "Parliamentary speech corpus pipeline and word-usage change detection"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Input file or directory; repeat or comma-separate for several.
    #[arg(long, global = true, action = ArgAction::Append, value_delimiter = ',')]
    pub input: Vec<PathBuf>,
    /// Output directory; created if missing.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Base seed for every random choice [default: 1].
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads [default: available cores].
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Bitwise-reproducible training (single-threaded SGD) [default: true].
    #[arg(long, global = true, num_args = 0..=1, default_missing_value = "true")]
    pub deterministic: Option<bool>,
    /// Flat `key = value` settings file; flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// More log output (-v info, -vv debug).
    #[arg(short, long, global = true, action = ArgAction::Count)]
    pub verbose: u8,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Segment sittings, resolve speakers and write the speech table.
    Ingest(IngestArgs),
    /// Corpus statistics per slice, before and after preprocessing.
    Stats(CorpusArgs),
    /// Normalize speeches and cut the corpus into time slices.
    Preprocess(CorpusArgs),
    /// Train embeddings for prepared slices.
    Train(TrainCmdArgs),
    /// Rotate one model onto another.
    Align(AlignArgs),
    /// Rank words by usage change between two slices.
    Detect(DetectArgs),
    /// Top-k overlap of change rankings across seeds.
    Stability(StabilityArgs),
    /// Similarity of topic words across consecutive slices.
    Track(TrackArgs),
    /// Similarity of party tags across consecutive slices.
    PartyDrift(PartyDriftArgs),
    /// Series files and a chart from a report.
    Plot(PlotArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Ingest(_) => "ingest",
            Command::Stats(_) => "stats",
            Command::Preprocess(_) => "preprocess",
            Command::Train(_) => "train",
            Command::Align(_) => "align",
            Command::Detect(_) => "detect",
            Command::Stability(_) => "stability",
            Command::Track(_) => "track",
            Command::PartyDrift(_) => "party-drift",
            Command::Plot(_) => "plot",
        }
    }
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// Sitting metadata table.
    #[arg(long)]
    pub meta: Option<PathBuf>,
    /// Directory with members.csv and optionally government_members.csv,
    /// governments.csv, extra_posts.csv.
    #[arg(long)]
    pub registry: Option<PathBuf>,
    /// Genitive-to-nominative name table [default: <registry>/name_cases.csv if present].
    #[arg(long)]
    pub name_cases: Option<PathBuf>,
    /// Nickname table [default: <registry>/nicknames.csv if present].
    #[arg(long)]
    pub nicknames: Option<PathBuf>,
    /// Speaker-line pattern file [default: built-in].
    #[arg(long)]
    pub patterns: Option<PathBuf>,
    /// Minimum name similarity for a match [default: 0.95].
    #[arg(long)]
    pub threshold: Option<f64>,
}

#[derive(Debug, Args)]
pub struct CorpusArgs {
    /// Slicing file [default: one slice per parliamentary period].
    #[arg(long)]
    pub slicing: Option<PathBuf>,
    /// Period merges, e.g. `5:7,6:7`.
    #[arg(long)]
    pub merge: Option<String>,
    /// Stopword list, one word per line.
    #[arg(long)]
    pub stopwords: Option<PathBuf>,
    /// Party pattern table (`pattern,abbreviation`).
    #[arg(long)]
    pub parties: Option<PathBuf>,
    /// Lowercase speeches before normalization [default: true].
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub lowercase: Option<bool>,
    /// Accept only sitting dates of the published Greek corpus [default: false].
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub greek_dates: Option<bool>,
}

#[derive(Debug, Args, Default)]
pub struct TrainArgs {
    /// Vector dimension [default: 100].
    #[arg(long)]
    pub dim: Option<usize>,
    /// Context window on each side [default: 5].
    #[arg(long)]
    pub window: Option<usize>,
    /// Negative samples per positive [default: 5].
    #[arg(long)]
    pub negative: Option<usize>,
    /// Passes over the slice [default: 5].
    #[arg(long)]
    pub epochs: Option<usize>,
    /// Initial learning rate [default: 0.025].
    #[arg(long)]
    pub learning_rate: Option<f64>,
    /// Final learning rate as a fraction of the initial one [default: 0.0001].
    #[arg(long)]
    pub min_learning_rate_fraction: Option<f64>,
    /// Words seen fewer times are left out of the vocabulary [default: 5].
    #[arg(long)]
    pub min_count: Option<u64>,
    /// Frequent-word subsampling threshold; 0 disables.
    #[arg(long)]
    pub subsample: Option<f64>,
    /// skipgram or cbow [default: cbow for compass methods, skipgram otherwise].
    #[arg(long)]
    pub architecture: Option<Architecture>,
    /// Matrix frozen in per-slice compass training: target or context.
    #[arg(long)]
    pub compass_frozen: Option<MatrixRole>,
    /// Keep full-stop tokens in the training stream [default: false].
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub keep_full_stops: Option<bool>,
    /// Remove `@sw` stopword placeholders before training [default: false].
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub drop_stopword_tags: Option<bool>,
}

#[derive(Debug, Args, Default)]
pub struct ChangeArgs {
    /// Neighbourhood size for nn and second_order [default: 1000].
    #[arg(long)]
    pub neighbor_k: Option<usize>,
    /// Most frequent words removed by the cutoffs [default: 200].
    #[arg(long)]
    pub top_freq_cut: Option<usize>,
    /// Words rarer than this are removed by the cutoffs [default: 200].
    #[arg(long)]
    pub min_freq_cut: Option<u64>,
    /// Minimum count in either slice for methods without cutoffs [default: 50].
    #[arg(long)]
    pub candidate_min_occurrences: Option<u64>,
}

#[derive(Debug, Args)]
pub struct TrainCmdArgs {
    /// Slices to train [default: all].
    #[arg(long, value_delimiter = ',')]
    pub slices: Vec<String>,
    /// Train all selected slices against one compass [default: false].
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub compass: Option<bool>,
    #[command(flatten)]
    pub train: TrainArgs,
}

#[derive(Debug, Args)]
pub struct AlignArgs {
    /// Center shared rows before solving [default: false].
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub center: Option<bool>,
    /// Matrix to align: target or context [default: target].
    #[arg(long)]
    pub role: Option<MatrixRole>,
}

#[derive(Debug, Args)]
pub struct DetectArgs {
    /// Slice pair `a:b`.
    #[arg(long)]
    pub pair: Option<String>,
    /// procrustes, compass, compass_cutoff, nn or second_order [default: compass].
    #[arg(long)]
    pub method: Option<ChangeMethod>,
    /// Report raw cosine similarity for cosine methods [default: false].
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub similarity: Option<bool>,
    /// Words listed in the neighbour report [default: 20].
    #[arg(long)]
    pub report_top: Option<usize>,
    /// Neighbours per word in the report [default: 10].
    #[arg(long)]
    pub neighbors: Option<usize>,
    /// Also write the two scored models [default: false].
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub save_models: Option<bool>,
    #[command(flatten)]
    pub change: ChangeArgs,
    #[command(flatten)]
    pub train: TrainArgs,
}

#[derive(Debug, Args)]
pub struct StabilityArgs {
    /// Slice pair `a:b`.
    #[arg(long)]
    pub pair: Option<String>,
    /// Methods to evaluate [default: compass].
    #[arg(long = "method", value_delimiter = ',')]
    pub methods: Vec<ChangeMethod>,
    /// Runs per method [default: 10].
    #[arg(long)]
    pub runs: Option<usize>,
    /// Ascending k values [default: 10,20,50,100,200,500,1000].
    #[arg(long, value_delimiter = ',')]
    pub k: Vec<usize>,
    #[command(flatten)]
    pub bootstrap: BootstrapArgs,
    #[command(flatten)]
    pub change: ChangeArgs,
    #[command(flatten)]
    pub train: TrainArgs,
}

#[derive(Debug, Args)]
pub struct BootstrapArgs {
    /// Bootstrap resamples [default: 10000].
    #[arg(long)]
    pub resamples: Option<usize>,
    /// Confidence level [default: 0.95].
    #[arg(long)]
    pub level: Option<f64>,
}

#[derive(Debug, Args)]
pub struct TrackArgs {
    /// Topic list, one word per line.
    #[arg(long)]
    pub topics: Option<PathBuf>,
    /// Topic words given directly.
    #[arg(long, value_delimiter = ',')]
    pub words: Vec<String>,
    /// Slices in series order [default: all].
    #[arg(long, value_delimiter = ',')]
    pub slices: Vec<String>,
    /// Compass retrainings per pair [default: 50].
    #[arg(long)]
    pub seeds: Option<usize>,
    #[command(flatten)]
    pub bootstrap: BootstrapArgs,
    #[command(flatten)]
    pub train: TrainArgs,
}

#[derive(Debug, Args)]
pub struct PartyDriftArgs {
    /// Party pattern table; its tags are tracked.
    #[arg(long)]
    pub parties: Option<PathBuf>,
    /// Tags given directly, e.g. `@νδ`.
    #[arg(long, value_delimiter = ',')]
    pub tags: Vec<String>,
    /// Slices in series order [default: all].
    #[arg(long, value_delimiter = ',')]
    pub slices: Vec<String>,
    /// Compass retrainings per pair [default: 50].
    #[arg(long)]
    pub seeds: Option<usize>,
    /// Neighbours listed per tag [default: 10].
    #[arg(long)]
    pub neighbors: Option<usize>,
    #[command(flatten)]
    pub bootstrap: BootstrapArgs,
    #[command(flatten)]
    pub train: TrainArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PlotKind {
    Stability,
    Topic,
    Party,
    Gender,
    VocabOverlap,
}

impl PlotKind {
    pub fn name(self) -> &'static str {
        match self {
            PlotKind::Stability => "stability",
            PlotKind::Topic => "topic",
            PlotKind::Party => "party",
            PlotKind::Gender => "gender",
            PlotKind::VocabOverlap => "vocab_overlap",
        }
    }

    /// The `kind` field of the report this plot reads.
    pub fn report_kind(self) -> &'static str {
        match self {
            PlotKind::Gender | PlotKind::VocabOverlap => "stats",
            other => other.name(),
        }
    }
}

impl std::fmt::Display for PlotKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for PlotKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        <PlotKind as ValueEnum>::from_str(&s.replace('_', "-"), true)
    }
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    /// stability, topic, party, gender or vocab-overlap.
    #[arg(long)]
    pub kind: Option<PlotKind>,
}
