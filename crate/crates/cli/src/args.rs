use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "scarlab", version, about = "Frustration-free scar chains: dynamics, spectra and native circuits")]
pub struct Cli {
    /// JSON configuration; command-line flags take precedence over its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Progress messages on standard error (repeat for more).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Floquet time evolution with observables written per period.
    Evolve(EvolveArgs),
    /// Exact spectrum, level statistics, entanglement and zero modes.
    Spectrum(SpectrumArgs),
    /// Compile one Floquet gate into native gates.
    Compile(CompileArgs),
    /// Build a preparation circuit for an asymptotic scar.
    Prepare(PrepareArgs),
    /// Run an invariant suite.
    Verify(VerifyArgs),
    /// Single-excitation quantities over a grid of g.
    Sweep(SweepArgs),
}

/// Options shared by every command that builds a model.
#[derive(Args, Debug, Clone, Default)]
pub struct ModelArgs {
    /// Chain length (even, >= 4).
    #[arg(long)]
    pub n: Option<usize>,
    /// Vacuum parameter: `1.5`, `2/3` or `re,im`.
    #[arg(long, allow_hyphen_values = true)]
    pub g: Option<String>,
    /// Generator preset name, inline JSON `{"even": .., "odd": ..}` or a JSON file.
    #[arg(long)]
    pub gens: Option<String>,
}

#[derive(Args, Debug, Clone, Default)]
pub struct OutputArgs {
    /// Output directory (created if missing).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Prefix of every output file name.
    #[arg(long)]
    pub run_id: Option<String>,
}

#[derive(Args, Debug)]
pub struct EvolveArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Number of Floquet periods.
    #[arg(long)]
    pub steps: Option<usize>,
    /// vacuum, ones, left, boundary or a<k> (e.g. a1).
    #[arg(long)]
    pub init: Option<String>,
    /// Phase of the asymptotic scar, radians.
    #[arg(long, allow_hyphen_values = true)]
    pub phi: Option<f64>,
    /// Prepare a<k> by simulating a circuit instead of loading amplitudes.
    #[arg(long, value_enum)]
    pub prep: Option<PrepSource>,
    /// Measurement shots per time point; 0 records exact values.
    #[arg(long)]
    pub shots: Option<usize>,
    /// `device`, `none` or `p1,p2,p_spam`.
    #[arg(long)]
    pub noise: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Comma-separated: m_total, m_sites, fidelity, imbalance, half_entropy.
    #[arg(long, value_delimiter = ',')]
    pub observables: Option<Vec<String>>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PrepSource {
    /// Tree circuit synthesized for the requested state.
    Synth,
    /// Published preparation protocol (k = 1, N in 8/12/16/20).
    Fixture,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelKind {
    Hamiltonian,
    Floquet,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum SectorArg {
    Even,
    Odd,
    All,
}

#[derive(Args, Debug)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    #[arg(long = "model", value_enum, default_value = "floquet")]
    pub model_kind: ModelKind,
    /// Reflection sector; needs g = +-1 unless `all`.
    #[arg(long, value_enum, default_value = "all")]
    pub sector: SectorArg,
    /// Level-spacing statistics.
    #[arg(long)]
    pub stats: bool,
    /// Half-chain entanglement of every eigenvector.
    #[arg(long)]
    pub entanglement: bool,
    /// Count Hamiltonian zero modes.
    #[arg(long)]
    pub zero_modes: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Which {
    Even,
    Odd,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Emit {
    Qasm,
    Json,
}

#[derive(Args, Debug)]
pub struct CompileArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    #[arg(long, value_enum, default_value = "even")]
    pub which: Which,
    #[arg(long, value_enum, default_value = "qasm")]
    pub emit: Emit,
    /// Simulate the circuit and compare with the target gate.
    #[arg(long)]
    pub verify: bool,
    /// Use the tabulated template parameters instead of decomposing.
    #[arg(long)]
    pub table1: bool,
}

#[derive(Args, Debug)]
pub struct PrepareArgs {
    #[command(flatten)]
    pub output: OutputArgs,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub phi: f64,
    #[arg(long, value_enum, default_value = "qasm")]
    pub emit: Emit,
    /// Simulate the circuit and report the fidelity with the target.
    #[arg(long)]
    pub verify: bool,
    /// Use the published protocol (N in 8/12/16/20, k = 1).
    #[arg(long)]
    pub fixture: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Scars,
    Aqmbs,
    Symmetry,
    Closedforms,
    EastWest,
    All,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub suite: Suite,
    /// Chain lengths, comma-separated; each suite has its own default.
    #[arg(long, value_delimiter = ',')]
    pub sizes: Option<Vec<usize>>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepParam {
    G,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Quantity {
    Gap,
    Imbalance,
    Entropy,
    Xi,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[command(flatten)]
    pub output: OutputArgs,
    #[arg(long, value_enum, default_value = "g")]
    pub param: SweepParam,
    #[arg(long, allow_hyphen_values = true)]
    pub from: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub to: f64,
    #[arg(long)]
    pub points: usize,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, value_enum)]
    pub quantity: Quantity,
}
