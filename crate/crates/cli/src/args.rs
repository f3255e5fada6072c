//! Command-line grammar.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Debug, Parser)]
#[command(name = "patcx", version, about = "Maximal pattern complexity of binary sequences")]
pub struct Cli {
    #[command(subcommand)]
    pub command: CommandArgs,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    pub format: Format,

    /// Worker threads for the search engine (default: available cores).
    #[arg(long, global = true, value_parser = clap::value_parser!(u32).range(1..))]
    pub workers: Option<u32>,

    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,

    /// Write the report (or the generated prefix) to this path.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Structured,
}

#[derive(Debug, Clone, Default, Args)]
pub struct InputArgs {
    /// Generator spec: inline JSON, a JSON file, or a preset name.
    #[arg(long, conflicts_with = "prefix_file")]
    pub spec: Option<String>,

    /// A `.bits` file read as a finite prefix.
    #[arg(long)]
    pub prefix_file: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct BoundsArgs {
    /// Largest window size.
    #[arg(long = "n", value_parser = clap::value_parser!(u64).range(1..))]
    pub max_n: Option<u64>,

    /// Largest offset in a window.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub diameter: Option<u64>,

    /// Shifts 0..=S are read.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub shifts: Option<u64>,

    /// Maximum number of windows counted.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub budget: Option<u64>,

    /// Count every window instead of pruning by the admissible bound.
    #[arg(long)]
    pub no_pruning: bool,
}

#[derive(Debug, Subcommand)]
pub enum CommandArgs {
    /// Write the first bits of a generated sequence as a `.bits` file.
    Gen {
        #[command(flatten)]
        input: InputArgs,
        /// Number of bits.
        #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
        length: u64,
    },
    /// The τ-language of one window.
    Lang {
        #[command(flatten)]
        input: InputArgs,
        /// Offsets, comma separated; translated to start at 0.
        #[arg(long, value_delimiter = ',', required = true)]
        window: Vec<usize>,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        shifts: Option<u64>,
    },
    /// Lower bounds on p*(n) from the window search.
    Pstar {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        bounds: BoundsArgs,
    },
    /// Try to refute p*(n) = 2n.
    CheckSturmian {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        bounds: BoundsArgs,
    },
    /// Constructive witnesses.
    Witness {
        #[command(subcommand)]
        kind: WitnessArgs,
    },
    /// Run the reproduction suite.
    Reproduce {
        /// Only these criteria, comma separated.
        #[arg(long, value_delimiter = ',')]
        only: Vec<usize>,
    },
    /// List the named generator presets.
    Presets,
}

#[derive(Debug, Subcommand)]
pub enum WitnessArgs {
    /// Window doubling lower bound; defaults to the block-doubling defect code.
    Doubling {
        #[command(flatten)]
        input: InputArgs,
        /// Number of doubling steps.
        #[arg(long = "n", default_value_t = 5)]
        steps: usize,
        #[arg(long)]
        horizon: Option<usize>,
    },
    /// A long-run window with more than 2n patterns.
    LongBlocks {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        horizon: Option<usize>,
    },
    /// The window {0, g_n, g_{n+1}} at the first gap increase.
    GapWindow {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        horizon: Option<usize>,
    },
    /// A constant pattern read at one shift only (rotation specs).
    Nonrecurrence {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        horizon: Option<usize>,
    },
}
