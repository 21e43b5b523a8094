use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand};
use reldiff_core::defaults;

#[derive(Debug, Parser)]
#[command(name = "reldiff", version, about = "Simulate and certify relativistic diffusions with radial coefficients")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the growth hypotheses on the grid and suggest epsilon.
    ModelCheck(Common),
    /// Euler-Maruyama ensemble plus one recorded trajectory.
    Simulate(SimulateArgs),
    /// Tabulate the equilibrium radial density and potentials.
    Equilibrium(Common),
    /// Draw momenta from the equilibrium measure.
    Sample(SampleArgs),
    /// Spectral gap of the generator.
    Gap(Common),
    /// Lyapunov drift certificate.
    Lyapunov(Common),
    /// Spectral gap, Lyapunov certificate and Poincare constant.
    Certify(Common),
    /// Relaxation of a radial Gaussian bump against the certified rate.
    Decay(DecayArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::ModelCheck(_) => "model-check",
            Command::Simulate(_) => "simulate",
            Command::Equilibrium(_) => "equilibrium",
            Command::Sample(_) => "sample",
            Command::Gap(_) => "gap",
            Command::Lyapunov(_) => "lyapunov",
            Command::Certify(_) => "certify",
            Command::Decay(_) => "decay",
        }
    }

    pub fn common(&self) -> &Common {
        match self {
            Command::ModelCheck(c)
            | Command::Equilibrium(c)
            | Command::Gap(c)
            | Command::Lyapunov(c)
            | Command::Certify(c) => c,
            Command::Simulate(a) => &a.common,
            Command::Sample(a) => &a.common,
            Command::Decay(a) => &a.common,
        }
    }
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("source").required(true).args(["builtin", "model"])))]
pub struct ModelArgs {
    /// Builtin model: roup, dunkel_hanggi or classical_ou.
    #[arg(long)]
    pub builtin: Option<String>,
    /// JSON model definition file.
    #[arg(long, value_name = "FILE.json")]
    pub model: Option<PathBuf>,
    /// Inverse temperature (default 1 for builtins; overrides the model file).
    #[arg(long)]
    pub beta: Option<f64>,
    /// Dimension (default 3 for builtins; overrides the model file).
    #[arg(long)]
    pub d: Option<usize>,
    /// Friction of classical_ou.
    #[arg(long)]
    pub b: Option<f64>,
    /// Noise amplitude of classical_ou.
    #[arg(long)]
    pub sigma: Option<f64>,
}

#[derive(Debug, Args)]
pub struct Common {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Radial grid nodes.
    #[arg(long, default_value_t = defaults::GRID_NODES)]
    pub grid: usize,
    /// Radial grid extent.
    #[arg(long, default_value_t = defaults::R_MAX)]
    pub rmax: f64,
    /// Start of the tail window [r0, rmax] (default rmax/10). When the model
    /// does not fix epsilon it is re-derived on this window.
    #[arg(long)]
    pub tail_start: Option<f64>,
    /// Output directory.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, default_value_t = defaults::SEED)]
    pub seed: u64,
    #[arg(long, default_value_t = defaults::SIM_DT)]
    pub dt: f64,
    #[arg(long, default_value_t = defaults::SIM_T_END)]
    pub t_end: f64,
    #[arg(long, default_value_t = defaults::SIM_PATHS)]
    pub paths: usize,
    /// Number of snapshot intervals; snapshots at k t_end / n.
    #[arg(long, default_value_t = 10)]
    pub snapshots: usize,
    /// Initial momentum, comma separated (default 0).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub p0: Vec<f64>,
    /// Also write positions into the snapshot file.
    #[arg(long)]
    pub positions: bool,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, default_value_t = defaults::SEED)]
    pub seed: u64,
    /// Number of samples.
    #[arg(long, default_value_t = defaults::SIM_PATHS)]
    pub paths: usize,
}

#[derive(Debug, Args)]
pub struct DecayArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, default_value_t = defaults::DECAY_DT)]
    pub dt: f64,
    #[arg(long, default_value_t = defaults::DECAY_T_END)]
    pub t_end: f64,
    /// Standard deviation per component of the initial Gaussian law
    /// (default: variance 0.8 E|p|²/d under equilibrium).
    #[arg(long)]
    pub bump_width: Option<f64>,
    /// Time steps between recorded checkpoints.
    #[arg(long, default_value_t = defaults::DECAY_CHECKPOINT_EVERY)]
    pub checkpoint_every: usize,
}
