//! `mismatch-qpt`: simulate, fit and characterise the mode-mismatched CNOT.

mod commands;
mod error;
mod manifest;

use std::ffi::OsString;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mismatch_qpt::circuit::{Basis, InputLabel, TauParams};
use mismatch_qpt::fitting::{DataSubset, FitMode};

use crate::error::CliError;

#[derive(Parser, Debug)]
#[command(name = "mismatch-qpt", version, about, args_override_self = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Where to write the run manifest (default: next to --output, else stderr).
    #[arg(long, global = true)]
    pub manifest: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Outcome probabilities of one input through a circuit.
    Simulate(SimulateArgs),
    /// Fit τ to a measured 8×8 matrix.
    Fit(FitArgs),
    /// Process matrix of the model at τ, with its fidelity to an ideal CNOT.
    Qpt(QptArgs),
    /// Process fidelity between two χ files.
    Fidelity(FidelityArgs),
    /// Noisy measured matrix sampled from the model.
    Synth(SynthArgs),
    /// Process fidelity along a line in τ space, as CSV.
    Sweep(SweepArgs),
    /// Re-run the command recorded in a manifest.
    Replay(ReplayArgs),
}

#[derive(Args, Debug)]
pub struct OutputArg {
    /// Output file (default: stdout).
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    /// Built-in circuit.
    #[arg(long, value_enum, conflicts_with = "circuit", required_unless_present = "circuit")]
    pub builtin: Option<Builtin>,
    /// Circuit description file.
    #[arg(long)]
    pub circuit: Option<PathBuf>,
    /// Five comma-separated τ values.
    #[arg(long, allow_hyphen_values = true, default_value = "0,0,0,0,0")]
    pub tau: TauParams,
    /// Two-qubit input such as 10, +-, 0+i.
    #[arg(long, allow_hyphen_values = true)]
    pub input: InputLabel,
    /// Measurement basis: one letter for both qubits or two (control, target).
    #[arg(long, default_value = "z", value_parser = parse_bases)]
    pub basis: (Basis, Basis),
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[command(flatten)]
    pub out: OutputArg,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum Builtin {
    Cnot,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq)]
pub enum Format {
    Text,
    Csv,
}

#[derive(Args, Debug)]
pub struct FitArgs {
    /// Measured matrix as CSV.
    pub data: PathBuf,
    #[arg(long, value_enum, default_value_t = ModeArg::Global)]
    pub mode: ModeArg,
    #[arg(long, env = "MISMATCH_QPT_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Random starts in addition to τ = 0.
    #[arg(long, default_value_t = 32)]
    pub restarts: usize,
    /// Box bound on every |τ_k|.
    #[arg(long, default_value_t = 3.0)]
    pub bound: f64,
    /// Rows that enter the objective.
    #[arg(long, value_enum, default_value_t = SubsetArg::All)]
    pub subset: SubsetArg,
    #[command(flatten)]
    pub out: OutputArg,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum ModeArg {
    Global,
    PerInput,
}

impl From<ModeArg> for FitMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Global => FitMode::Global,
            ModeArg::PerInput => FitMode::PerInput,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum SubsetArg {
    All,
    Computational,
}

impl From<SubsetArg> for DataSubset {
    fn from(s: SubsetArg) -> Self {
        match s {
            SubsetArg::All => DataSubset::All,
            SubsetArg::Computational => DataSubset::Computational,
        }
    }
}

#[derive(Args, Debug)]
pub struct QptArgs {
    #[arg(long, allow_hyphen_values = true, required_unless_present = "fit_result", conflicts_with = "fit_result")]
    pub tau: Option<TauParams>,
    /// FitResult JSON; its global τ is used.
    #[arg(long)]
    pub fit_result: Option<PathBuf>,
    #[command(flatten)]
    pub out: OutputArg,
}

#[derive(Args, Debug)]
pub struct FidelityArgs {
    pub first: PathBuf,
    pub second: PathBuf,
    #[command(flatten)]
    pub out: OutputArg,
}

#[derive(Args, Debug)]
pub struct SynthArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub tau: TauParams,
    /// Events per (input, basis) block.
    #[arg(long, default_value = "4600", value_parser = parse_counts)]
    pub counts: u64,
    #[arg(long, env = "MISMATCH_QPT_SEED", default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub out: OutputArg,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    /// Base point; defaults to the reference mismatch.
    #[arg(long, allow_hyphen_values = true)]
    pub tau: Option<TauParams>,
    /// Vary only τ_K (1..=5) instead of scaling the whole vector.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=5))]
    pub component: Option<u8>,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    pub from: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 1.0)]
    pub to: f64,
    /// Number of grid points, endpoints included.
    #[arg(long, default_value_t = 11, value_parser = clap::value_parser!(u32).range(2..))]
    pub points: u32,
    #[command(flatten)]
    pub out: OutputArg,
}

#[derive(Args, Debug)]
pub struct ReplayArgs {
    pub manifest_file: PathBuf,
    /// Write to this file instead of the recorded output.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

fn parse_bases(s: &str) -> Result<(Basis, Basis), String> {
    let letters: Vec<char> = s.trim().chars().collect();
    let one = |c: char| c.to_string().parse::<Basis>().map_err(|e| e.to_string());
    match letters.as_slice() {
        &[b] => one(b).map(|b| (b, b)),
        &[c, t] => Ok((one(c)?, one(t)?)),
        _ => Err(format!("expected z, x or a pair such as zx, got {s:?}")),
    }
}

fn parse_counts(s: &str) -> Result<u64, String> {
    let n = match s.parse::<u64>() {
        Ok(n) => n,
        Err(_) => {
            let v: f64 = s.parse().map_err(|_| format!("not a count: {s:?}"))?;
            if v.fract() != 0.0 || !(0.0..=u64::MAX as f64).contains(&v) {
                return Err(format!("not a whole count: {s:?}"));
            }
            v as u64
        }
    };
    if n == 0 {
        return Err("counts must be at least 1".into());
    }
    Ok(n)
}

fn run(argv: Vec<OsString>) -> Result<(), CliError> {
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            return Err(CliError::Usage(e.render().to_string()));
        }
        Err(e) => {
            // --help and --version
            e.print().map_err(CliError::io(std::path::Path::new("<stdout>")))?;
            return Ok(());
        }
    };
    commands::dispatch(cli, argv)
}

fn main() -> ExitCode {
    match run(std::env::args_os().collect()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let text = e.to_string();
            eprintln!("{}", text.trim_end());
            ExitCode::from(e.exit_code())
        }
    }
}

impl Cli {
    fn try_parse_from_manifest(argv: &[OsString]) -> Result<Self, CliError> {
        Cli::try_parse_from(argv).map_err(|e| CliError::Invalid(format!("manifest arguments: {e}")))
    }
}
