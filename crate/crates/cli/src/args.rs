use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use millionaire_core::he::HeBackend;
use millionaire_core::ot::{OtBackend, DEFAULT_MODULUS_BITS};
use millionaire_core::prg::Seed;
use millionaire_core::protocols::Protocol;
use millionaire_core::{BigInt, BigUint};

#[derive(Debug, Parser)]
#[command(
    name = "millionaire",
    version,
    about = "Secure two-party integer comparison"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compare two inputs with one protocol run.
    Run(RunArgs),
    /// Check every input pair below 2^max-bits against plain comparison.
    Sweep(SweepArgs),
    /// Regenerate the reference tables and diff them against stored values.
    Tables(TablesArgs),
    /// Measure transcript bytes across input sizes and fit growth models.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CoinArg {
    /// u = 1: inputs are used as they are.
    Fixed,
    /// u drawn from Alice's seed.
    Coin,
    /// u = 0: inputs are complemented.
    #[value(name = "0")]
    Zero,
    /// Same as `fixed`.
    #[value(name = "1")]
    One,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Fixture {
    #[value(name = "paper-3.4.3")]
    PointSample,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OtBackendArg {
    Transparent,
    CommutativeRsa,
}

impl From<OtBackendArg> for OtBackend {
    fn from(b: OtBackendArg) -> Self {
        match b {
            OtBackendArg::Transparent => OtBackend::Transparent,
            OtBackendArg::CommutativeRsa => OtBackend::CommutativeRsa,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum HeBackendArg {
    Transparent,
}

impl From<HeBackendArg> for HeBackend {
    fn from(_: HeBackendArg) -> Self {
        HeBackend::Transparent
    }
}

pub fn parse_protocol(s: &str) -> Result<Protocol, String> {
    s.parse()
}

pub fn parse_seed(s: &str) -> Result<Seed, String> {
    Seed::from_hex(s).map_err(|e| e.to_string())
}

pub fn parse_range(s: &str) -> Result<(BigInt, BigInt), String> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| format!("expected lo:hi, got {s:?}"))?;
    let parse = |v: &str| {
        v.trim()
            .parse::<BigInt>()
            .map_err(|e| format!("{v:?}: {e}"))
    };
    Ok((parse(lo)?, parse(hi)?))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sizes(pub Vec<usize>);

pub fn parse_sizes(s: &str) -> Result<Sizes, String> {
    s.split(',')
        .map(|v| v.trim().parse::<usize>().map_err(|e| format!("{v:?}: {e}")))
        .collect::<Result<_, _>>()
        .map(Sizes)
}

/// Settings shared by every protocol-running command.
#[derive(Debug, Clone, Args)]
pub struct ProtocolFlags {
    /// Protocol A word size; input bound in bits for b-ext.
    #[arg(long)]
    pub width: Option<usize>,
    /// Shared-function constant s (give s, k and l together).
    #[arg(long, requires_all = ["k", "l"])]
    pub s: Option<BigInt>,
    #[arg(long, requires_all = ["s", "l"])]
    pub k: Option<BigInt>,
    #[arg(long, requires_all = ["s", "k"])]
    pub l: Option<BigInt>,
    /// Coin for the shared-function protocol.
    #[arg(long, value_enum)]
    pub u: Option<CoinArg>,
    /// Width within which inputs are complemented when u = 0.
    #[arg(long)]
    pub complement_width: Option<usize>,
    /// Input bound in bits for protocol C.
    #[arg(long)]
    pub d: Option<usize>,
    /// Window width for the point function.
    #[arg(long)]
    pub l_point: Option<BigInt>,
    /// Sampling range lo:hi for the point function's anchor values.
    #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
    pub range: Option<(BigInt, BigInt)>,
    /// Master seed in hex; party seeds are derived from it.
    #[arg(long, value_parser = parse_seed, default_value = "00000000000000000000000000000001")]
    pub seed: Seed,
    #[arg(long, value_enum, default_value = "transparent")]
    pub he_backend: HeBackendArg,
    #[arg(long, value_enum)]
    pub ot_backend: Option<OtBackendArg>,
    #[arg(long, default_value_t = DEFAULT_MODULUS_BITS)]
    pub ot_modulus_bits: usize,
    /// Use a stored point-function instance instead of seeded draws.
    #[arg(long, value_enum)]
    pub fixture: Option<Fixture>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long, value_parser = parse_protocol)]
    pub protocol: Protocol,
    /// Alice's input (decimal).
    #[arg(long)]
    pub a: BigUint,
    /// Bob's input (decimal).
    #[arg(long)]
    pub b: BigUint,
    #[command(flatten)]
    pub flags: ProtocolFlags,
    /// Write the full transcript as JSON.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_parser = parse_protocol)]
    pub protocol: Protocol,
    #[arg(long)]
    pub max_bits: usize,
    /// Number of independent seed variants.
    #[arg(long, default_value_t = 1)]
    pub seeds: usize,
    #[command(flatten)]
    pub flags: ProtocolFlags,
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TablesArgs {
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, value_parser = parse_protocol)]
    pub protocol: Protocol,
    /// Comma-separated ascending input sizes in bits.
    #[arg(long, value_parser = parse_sizes)]
    pub sizes: Option<Sizes>,
    #[command(flatten)]
    pub flags: ProtocolFlags,
    #[arg(long)]
    pub json: Option<PathBuf>,
}
