use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "hypercube-spectra", version, about = "Fourier analysis of boolean functions on the hypercube")]
pub struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "HYPERCUBE_SPECTRA_WORKERS")]
    pub workers: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Entropy, influences and bounds for one function.
    Analyze {
        #[command(flatten)]
        input: FunctionArgs,
        /// Concentration threshold; repeatable.
        #[arg(long = "delta")]
        deltas: Vec<f64>,
        #[arg(long, value_enum, default_value_t = AnalyzeFormat::Json)]
        format: AnalyzeFormat,
    },
    /// Unnormalized Walsh coefficients.
    Spectrum {
        #[command(flatten)]
        input: FunctionArgs,
        #[arg(long, value_enum, default_value_t = DataFormat::Json)]
        format: DataFormat,
    },
    /// Restricted moments M_{V,ε} over a list of ε values.
    Moments {
        #[command(flatten)]
        input: FunctionArgs,
        /// Coordinate set: a mask (decimal, 0x.., 0b..), a list like `1,3`, or `all`.
        #[arg(long = "V", default_value = "all")]
        v: String,
        /// ε values: a comma list or `start:end:step`.
        #[arg(long, default_value = "0.01:0.49:0.02")]
        eps: String,
        #[arg(long, value_enum, default_value_t = DataFormat::Csv)]
        format: DataFormat,
    },
    /// Moments along a coordinate chain and their per-step floors.
    Chain {
        #[command(flatten)]
        input: FunctionArgs,
        #[arg(long)]
        eps: f64,
        /// Chain order as a comma-separated permutation of 1..n.
        #[arg(long)]
        order: Option<String>,
        /// Lift the default dimension cap of 16.
        #[arg(long)]
        allow_large: bool,
    },
    /// Machine checks of the identities and inequalities.
    Verify {
        #[command(subcommand)]
        target: VerifyTarget,
    },
    /// Neighbouring-coefficient correlations against influences.
    Q31 {
        #[command(flatten)]
        input: FunctionArgs,
    },
    /// Exhaustive or sampled sweep for extremal functions.
    Search(SearchArgs),
    /// Build a named family and compare its influences with known values.
    Family {
        /// Family spec such as `first-even-group:s=3,t=6`.
        spec: String,
        /// Print only the truth table as hex.
        #[arg(long)]
        emit_hex: bool,
    },
}

#[derive(Debug, Args)]
pub struct FunctionArgs {
    /// Truth table as little-endian hex.
    #[arg(long = "fn", value_name = "HEX", requires = "n", conflicts_with = "family")]
    pub hex: Option<String>,
    /// Dimension of the --fn table.
    #[arg(long)]
    pub n: Option<usize>,
    /// Family spec instead of a table.
    #[arg(long)]
    pub family: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AnalyzeFormat {
    Json,
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DataFormat {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum VerifyTarget {
    /// Binomial inequality on a grid and random triples.
    Lemma24(ScalarArgs),
    /// The companion inequality with the 2ε² term.
    Eq27(ScalarArgs),
    /// Restricted-influence identity on random (f, J, k).
    Lemma22 {
        #[arg(long = "random", default_value_t = 1000)]
        count: u64,
        #[arg(long, default_value_t = 10)]
        max_n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Moment chain floors on random functions and orders.
    Lemma31 {
        #[arg(long = "random", default_value_t = 500)]
        count: u64,
        #[arg(long, default_value_t = 8)]
        max_n: usize,
        #[arg(long, default_value = "0.01,0.05,0.1,0.2,0.3,0.4,0.49")]
        eps: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Entropy bound on every small function plus random ones.
    Theorem {
        #[arg(long, default_value_t = 4)]
        exhaustive_max_n: usize,
        #[arg(long = "random", default_value_t = 10_000)]
        count: u64,
        /// Dimension of the random functions.
        #[arg(long, default_value_t = 8)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Args)]
pub struct ScalarArgs {
    /// Grid points per axis.
    #[arg(long)]
    pub grid: Option<usize>,
    /// ε values for the grid: a comma list or `start:end:step`.
    #[arg(long, default_value = "0.01:0.49:0.02")]
    pub eps: String,
    /// Random triples to check.
    #[arg(long)]
    pub random: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SearchModeArg {
    Exhaustive,
    Sample,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    #[arg(long, required_unless_present = "resume")]
    pub n: Option<usize>,
    #[arg(long, value_enum, default_value_t = SearchModeArg::Exhaustive)]
    pub mode: SearchModeArg,
    /// Functions to sample.
    #[arg(long)]
    pub count: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Comma-separated metric names.
    #[arg(long, default_value = "ent_over_I,ent_over_bound,minent_over_I,q31_worst,jensen_slack")]
    pub metrics: String,
    /// Keep only one function per symmetry orbit (exhaustive mode).
    #[arg(long)]
    pub symmetry: bool,
    /// Largest number of tables an exhaustive run may enumerate.
    #[arg(long, default_value_t = hypercube_spectra::search::DEFAULT_BUDGET)]
    pub budget: u64,
    /// Checkpoint file, rewritten after every batch.
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
    /// Continue the job stored in the checkpoint.
    #[arg(long, requires = "checkpoint")]
    pub resume: bool,
    #[arg(long, default_value_t = 1 << 14)]
    pub checkpoint_every: u64,
    /// Stop after this many items (the checkpoint keeps the rest).
    #[arg(long)]
    pub stop_after: Option<u64>,
}
