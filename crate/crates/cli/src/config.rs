//! Argument parsing and the validated run configuration.
//!
//! The CLI exposes tolerances, never truncation sizes: every internal
//! truncation is chosen by the doubling policy, so a "pass" cannot be
//! manufactured by under-truncating. The only size the user controls is
//! the range of section sizes `n` that the report tabulates.

use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use szegolab_core::symbol::DoublingPolicy;
use szegolab_core::{FunctionSpec, MVariant, C64};

#[derive(Parser, Debug)]
#[command(
    name = "szegolab",
    version,
    about = "Determinants of structured truncations: sweeps, constants, identity checks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: CommandCli,
}

#[derive(Subcommand, Debug)]
pub enum CommandCli {
    /// Tabulate det T_n(phi) over the requested range of n
    DetSeq(CommonArgs),
    /// Fit growth and constant factors from det T_n(phi) and compare with the computed ones
    SzegoFit(CommonArgs),
    /// Exact finite-n determinant identity with its correction factor
    Bocg(CommonArgs),
    /// Banded-symbol identity: the constant equals G^n det T_n(phi^{-1}) for n past the bandwidth
    BandedE(CommonArgs),
    /// Toeplitz-plus-Hankel identity; even and non-even symbols are auto-detected
    Th {
        #[command(flatten)]
        common: CommonArgs,
        /// Sign/shift variant of the Toeplitz-plus-Hankel matrix
        #[arg(long, value_parser = parse_variant)]
        variant: MVariant,
    },
    /// Determinants of f(T_n(phi)) against the symbol f(phi)
    Ftoeplitz {
        #[command(flatten)]
        common: CommonArgs,
        /// Function to apply: "exp" or "poly:c0,c1,..."
        #[arg(long, value_parser = parse_function)]
        function: FunctionArg,
    },
}

#[derive(Args, Debug)]
pub struct CommonArgs {
    /// Path to the symbol specification file (JSON)
    #[arg(long)]
    pub symbol: PathBuf,
    /// Inclusive range of section sizes, e.g. 1..40
    #[arg(long, value_parser = parse_range)]
    pub n: NRange,
    /// Per-row tolerance for identity residuals
    #[arg(long, default_value_t = 1e-8, value_parser = parse_tol)]
    pub tol: f64,
    /// Directory the report files are written to
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Report payload format
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

#[derive(Copy, Clone, Debug)]
pub struct NRange {
    pub min: usize,
    pub max: usize,
}

/// Parsed `--function` value. Carries the original text so reports can echo
/// it verbatim, and enough structure to rebuild the `FunctionSpec`.
#[derive(Clone, Debug)]
pub struct FunctionArg {
    pub text: String,
    kind: FunctionKind,
}

#[derive(Clone, Debug)]
enum FunctionKind {
    Exp,
    Poly(Vec<f64>),
}

impl FunctionArg {
    pub fn to_spec(&self) -> FunctionSpec {
        match &self.kind {
            FunctionKind::Exp => FunctionSpec::exp(),
            FunctionKind::Poly(cs) => {
                let coeffs: Vec<C64> = cs.iter().map(|&c| C64::new(c, 0.0)).collect();
                FunctionSpec::polynomial(coeffs).expect("validated at parse time")
            }
        }
    }
}

fn parse_range(s: &str) -> Result<NRange, String> {
    let (a, b) = s
        .split_once("..")
        .ok_or_else(|| format!("expected an inclusive range like 1..40, got `{s}`"))?;
    let min: usize = a.trim().parse().map_err(|_| format!("range start `{a}` is not an integer"))?;
    let max: usize = b.trim().parse().map_err(|_| format!("range end `{b}` is not an integer"))?;
    if min < 1 {
        return Err("range must start at 1 or above".into());
    }
    if min > max {
        return Err(format!("range start {min} exceeds range end {max}"));
    }
    Ok(NRange { min, max })
}

fn parse_tol(s: &str) -> Result<f64, String> {
    let tol: f64 = s.parse().map_err(|_| format!("tolerance `{s}` is not a number"))?;
    if !tol.is_finite() || tol <= 0.0 {
        return Err("tolerance must be a positive finite number".into());
    }
    Ok(tol)
}

fn parse_variant(s: &str) -> Result<MVariant, String> {
    MVariant::from_str(s).map_err(|e| e.to_string())
}

fn parse_function(s: &str) -> Result<FunctionArg, String> {
    if s == "exp" {
        return Ok(FunctionArg { text: s.to_string(), kind: FunctionKind::Exp });
    }
    if let Some(list) = s.strip_prefix("poly:") {
        let coeffs: Vec<f64> = list
            .split(',')
            .map(|c| c.trim().parse::<f64>().map_err(|_| format!("bad coefficient `{c}`")))
            .collect::<Result<_, _>>()?;
        if coeffs.is_empty() || coeffs.iter().any(|c| !c.is_finite()) {
            return Err("polynomial needs at least one finite coefficient".into());
        }
        return Ok(FunctionArg { text: s.to_string(), kind: FunctionKind::Poly(coeffs) });
    }
    Err(format!("unknown function `{s}`; use exp or poly:c0,c1,..."))
}

/// Which check a run performs; decouples dispatch from the clap surface.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum CommandKind {
    DetSeq,
    SzegoFit,
    Bocg,
    BandedE,
    Th,
    Ftoeplitz,
}

impl CommandKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CommandKind::DetSeq => "det-seq",
            CommandKind::SzegoFit => "szego-fit",
            CommandKind::Bocg => "bocg",
            CommandKind::BandedE => "banded-e",
            CommandKind::Th => "th",
            CommandKind::Ftoeplitz => "ftoeplitz",
        }
    }
}

/// Fully validated configuration for one run.
#[derive(Debug)]
pub struct RunConfig {
    pub command: CommandKind,
    pub symbol_path: PathBuf,
    pub n_min: usize,
    pub n_max: usize,
    pub tol: f64,
    pub variant: Option<MVariant>,
    pub function: Option<FunctionArg>,
    pub output_dir: PathBuf,
    pub format: Format,
    pub max_doublings: usize,
}

impl RunConfig {
    /// Lower the parsed CLI surface into a validated config. Path and
    /// environment problems surface here, before any numerics run.
    pub fn from_cli(cli: Cli) -> Result<Self, String> {
        let (command, common, variant, function) = match cli.command {
            CommandCli::DetSeq(c) => (CommandKind::DetSeq, c, None, None),
            CommandCli::SzegoFit(c) => (CommandKind::SzegoFit, c, None, None),
            CommandCli::Bocg(c) => (CommandKind::Bocg, c, None, None),
            CommandCli::BandedE(c) => (CommandKind::BandedE, c, None, None),
            CommandCli::Th { common, variant } => (CommandKind::Th, common, Some(variant), None),
            CommandCli::Ftoeplitz { common, function } => {
                (CommandKind::Ftoeplitz, common, None, Some(function))
            }
        };
        if !common.symbol.is_file() {
            return Err(format!("symbol file `{}` does not exist", common.symbol.display()));
        }
        std::fs::create_dir_all(&common.out)
            .map_err(|e| format!("cannot create output directory `{}`: {e}", common.out.display()))?;
        let max_doublings = match std::env::var("SZEGOLAB_MAX_DOUBLINGS") {
            Ok(v) => v
                .trim()
                .parse::<usize>()
                .map_err(|_| format!("SZEGOLAB_MAX_DOUBLINGS must be a non-negative integer, got `{v}`"))?,
            Err(std::env::VarError::NotPresent) => DoublingPolicy::default().max_doublings,
            Err(e) => return Err(format!("SZEGOLAB_MAX_DOUBLINGS unreadable: {e}")),
        };
        Ok(RunConfig {
            command,
            symbol_path: common.symbol,
            n_min: common.n.min,
            n_max: common.n.max,
            tol: common.tol,
            variant,
            function,
            output_dir: common.out,
            format: common.format,
            max_doublings,
        })
    }
}
