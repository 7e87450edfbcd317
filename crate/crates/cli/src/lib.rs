//! Command-line front end for `lipmorph`.
//!
//! Every successful run prints one JSON record ([`RunMetadata`]) on standard
//! output; diagnostics go to standard error. Exit codes:
//!
//! | code | meaning                                             |
//! |------|-----------------------------------------------------|
//! | 0    | success                                             |
//! | 1    | I/O, parse or encode failure                        |
//! | 2    | validation, domain or size error, bad arguments     |
//! | 3    | direct and gradient maps disagree beyond tolerance  |

pub mod bench;
mod commands;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

pub use commands::run;

#[derive(Debug, Parser)]
#[command(
    name = "lipmorph",
    version,
    about = "Asplund distance maps under the LIP multiplication"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute the map of Asplund's distances between an image and a probe.
    Asplund(AsplundArgs),
    /// LIP-multiply an image by a positive scalar.
    Lipmul(LipmulArgs),
    /// Apply a dilation or erosion to raw grey values.
    Morph(MorphArgs),
    /// List the positions where the probe matches within a threshold.
    Match(MatchArgs),
    /// Time the direct and gradient forms.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Direct,
    Gradient,
    Both,
}

#[derive(Debug, Args)]
pub struct AsplundArgs {
    #[arg(long)]
    pub image: PathBuf,
    #[arg(long)]
    pub probe: PathBuf,
    /// PGM whose nonzero pixels mark the probe support.
    #[arg(long)]
    pub probe_mask: Option<PathBuf>,
    /// Output map, ASPF format.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = MethodArg::Both)]
    pub method: MethodArg,
    /// Also write an 8-bit PGM rendering of the map.
    #[arg(long)]
    pub png_preview: Option<PathBuf>,
    /// Distance rendered as white in the preview.
    #[arg(long, default_value_t = 1.0)]
    pub ceiling: f64,
    /// Reject pixels outside (0, M) instead of clamping them.
    #[arg(long)]
    pub strict: bool,
}

#[derive(Debug, Args)]
pub struct LipmulArgs {
    #[arg(long)]
    pub image: PathBuf,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MorphOp {
    DilateAdd,
    ErodeAdd,
    DilateMult,
    ErodeMult,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BorderArg {
    Valid,
    Replicate,
}

#[derive(Debug, Args)]
pub struct MorphArgs {
    #[arg(long, value_enum)]
    pub op: MorphOp,
    #[arg(long)]
    pub image: PathBuf,
    /// Structuring function, PGM, anchored at its top-left cell.
    #[arg(long)]
    pub sf: PathBuf,
    #[arg(long)]
    pub sf_mask: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = BorderArg::Valid)]
    pub border: BorderArg,
    /// Output plane, ASPF format.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct MatchArgs {
    #[arg(long)]
    pub image: PathBuf,
    #[arg(long)]
    pub probe: PathBuf,
    #[arg(long)]
    pub probe_mask: Option<PathBuf>,
    #[arg(long, allow_negative_numbers = true)]
    pub threshold: f64,
    /// Output CSV with columns x,y,distance.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub strict: bool,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, value_delimiter = ',', default_values_t = vec![256, 512])]
    pub sizes: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = vec![7, 15, 21, 31])]
    pub windows: Vec<usize>,
    #[arg(long, default_value_t = 5)]
    pub reps: usize,
    /// Constant-valued probe (default).
    #[arg(long, conflicts_with = "random_probe")]
    pub flat_probe: bool,
    /// Probe with random grey values.
    #[arg(long)]
    pub random_probe: bool,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

/// The record printed after every successful run.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct RunMetadata {
    pub command: String,
    pub method: String,
    pub image_path: String,
    pub probe_path: String,
    #[serde(rename = "M")]
    pub m: f64,
    pub clamped_pixels: usize,
    pub max_equiv_discrepancy: Option<f64>,
    pub wall_time_ms: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matches: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl RunMetadata {
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("metadata serializes")
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{context}: {source}")]
    Lib {
        context: String,
        #[source]
        source: lipmorph::Error,
    },
    #[error("{0}")]
    Csv(#[from] csv::Error),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use lipmorph::Error as E;
        match self {
            CliError::Io { .. } | CliError::Csv(_) => 1,
            CliError::Lib { source, .. } => match source {
                E::Parse { .. } | E::Encode(_) => 1,
                E::Domain(_) | E::Validation { .. } | E::Size(_) => 2,
                E::Equivalence { .. } => 3,
            },
            CliError::Usage(_) => 2,
        }
    }
}

pub(crate) trait Context<T> {
    fn context(self, what: impl Into<String>) -> Result<T, CliError>;
}

impl<T> Context<T> for lipmorph::Result<T> {
    fn context(self, what: impl Into<String>) -> Result<T, CliError> {
        self.map_err(|source| CliError::Lib {
            context: what.into(),
            source,
        })
    }
}

pub(crate) fn read_file(path: &Path) -> Result<Vec<u8>, CliError> {
    std::fs::read(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

pub(crate) fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, bytes).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}
