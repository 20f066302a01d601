use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "ap3", version, about = "Exact computations on three-term arithmetic progressions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Table of r3(N) with lexicographically least witnesses.
    R3(R3Args),
    /// One density-increment run on a progression-free set, as a JSON trace.
    Pipeline(PipelineArgs),
    /// Exact verification of the block-averaging lower bound for T3(A).
    Varnavides(VarnavidesArgs),
    /// Build or verify a persistent r3 table.
    Cache {
        #[command(subcommand)]
        action: CacheAction,
    },
}

#[derive(Debug, Subcommand)]
pub enum CacheAction {
    /// Compute r3 for a range of N and merge it into the cache file.
    Build {
        #[arg(long)]
        n: NRange,
        #[arg(long)]
        cache: PathBuf,
    },
    /// Recompute every cached value within the search limit.
    Verify {
        #[arg(long)]
        cache: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct R3Args {
    /// `N` or an inclusive range `a..b`.
    #[arg(long)]
    pub n: NRange,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Read-only source of precomputed values, consulted first.
    #[arg(long)]
    pub cache: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SetArgs {
    #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
    pub n: u64,
    /// exact | greedy | behrend | full | random | file:<path>
    #[arg(long, default_value = "greedy")]
    pub source: Source,
    /// Seed for the `random` source.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// r3 table used by the `exact` source beyond the search limit.
    #[arg(long)]
    pub cache: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PipelineArgs {
    #[command(flatten)]
    pub set: SetArgs,
    /// paper | half-density | <positive float>
    #[arg(long, default_value = "paper")]
    pub theta: Theta,
    /// Block length for the final counting step; defaults to the slowly
    /// growing choice determined by p.
    #[arg(long, value_parser = clap::value_parser!(u64).range(3..))]
    pub m: Option<u64>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct VarnavidesArgs {
    #[command(flatten)]
    pub set: SetArgs,
    #[arg(long, value_parser = clap::value_parser!(u64).range(3..))]
    pub m: u64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Replace the lower bound by T3(A) + 1, forcing a failure.
    #[arg(long, hide = true)]
    pub inject_faulty_bound: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Inclusive range of `N`; `lo > hi` is empty.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NRange {
    pub lo: usize,
    pub hi: usize,
}

impl NRange {
    pub fn iter(&self) -> std::ops::RangeInclusive<usize> {
        self.lo..=self.hi
    }
}

impl FromStr for NRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parse = |t: &str| -> Result<usize, String> {
            let v: usize = t.trim().parse().map_err(|_| format!("invalid N: {t:?}"))?;
            if v == 0 {
                return Err("N must be at least 1".into());
            }
            Ok(v)
        };
        match s.split_once("..") {
            Some((a, b)) => Ok(Self { lo: parse(a)?, hi: parse(b)? }),
            None => {
                let v = parse(s)?;
                Ok(Self { lo: v, hi: v })
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    Exact,
    Greedy,
    Behrend,
    Full,
    Random,
    File(PathBuf),
}

impl FromStr for Source {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "exact" => Source::Exact,
            "greedy" => Source::Greedy,
            "behrend" => Source::Behrend,
            "full" => Source::Full,
            "random" => Source::Random,
            _ => match s.strip_prefix("file:") {
                Some(path) if !path.is_empty() => Source::File(path.into()),
                _ => return Err(format!("unknown source {s:?}")),
            },
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Theta {
    Paper,
    HalfDensity,
    Explicit(f64),
}

impl FromStr for Theta {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "paper" => Ok(Theta::Paper),
            "half-density" => Ok(Theta::HalfDensity),
            _ => {
                let t: f64 = s.parse().map_err(|_| format!("invalid theta {s:?}"))?;
                if t.is_finite() && t > 0.0 {
                    Ok(Theta::Explicit(t))
                } else {
                    Err(format!("theta must be a positive finite number, got {s}"))
                }
            }
        }
    }
}
