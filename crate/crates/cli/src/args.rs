use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Bidirectional text compressor with external-memory decompression.
#[derive(Debug, Parser)]
#[command(name = "plcpz", version)]
pub struct Cli {
    /// Core memory for streams, sorts and queues, e.g. `64M`, `1G` or
    /// `unbounded`.
    #[arg(long, global = true, env = "PLCPZ_MEM", default_value = "256M")]
    pub mem: String,

    /// Directory for spill files.
    #[arg(long, global = true, env = "PLCPZ_TMP")]
    pub tmp: Option<PathBuf>,

    /// Transfer block size in bytes.
    #[arg(long, global = true, env = "PLCPZ_BLOCK", default_value = "64K")]
    pub block: String,

    /// Append JSON-lines metrics to this file.
    #[arg(long, global = true)]
    pub metrics: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Io {
    /// Input file; `-` or absent reads stdin.
    pub input: Option<PathBuf>,

    /// Output file; `-` or absent writes stdout.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Strategy {
    Oracle,
    Pj,
    CompactThenPj,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    LowerBound,
    Random,
    Repetitive,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compress a file.
    Compress {
        #[command(flatten)]
        io: Io,
        /// Minimum reference length.
        #[arg(long, default_value_t = 2)]
        theta: u64,
        /// Read PLCP and Φ from an index file written by `index` instead of
        /// building them.
        #[arg(long)]
        index: Option<PathBuf>,
    },
    /// Decompress a coded file.
    Decompress {
        #[command(flatten)]
        io: Io,
        #[arg(long, value_enum, default_value_t = Strategy::Pj)]
        strategy: Strategy,
    },
    /// Print factor counts, peak-list size and dependency census as JSON.
    Stats {
        /// Input text, or a coded file with `--coded`.
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 2)]
        theta: u64,
        /// Treat the input as a coded file.
        #[arg(long)]
        coded: bool,
    },
    /// Write a generated corpus.
    GenCorpus {
        #[arg(long, value_enum)]
        kind: Kind,
        /// Parameter of the lower-bound family (length m²).
        #[arg(long, default_value_t = 100)]
        m: u32,
        /// Length in bytes for random and repetitive corpora, e.g. `16M`.
        #[arg(long, default_value = "1M")]
        len: String,
        #[arg(long, default_value_t = 4)]
        alphabet: u8,
        /// Per-mille chance that a short random edit starts at a copied character.
        #[arg(long, default_value_t = 5)]
        edit: u16,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Build the text index and write it to a file.
    Index {
        #[command(flatten)]
        io: Io,
    },
    /// Factor counts for a range of thresholds, one JSON line each.
    ThetaSweep {
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 2)]
        from: u64,
        #[arg(long, default_value_t = 8)]
        to: u64,
    },
}
