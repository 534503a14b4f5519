use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::gridspec::{Bracket, GridSpec};

#[derive(Parser, Debug)]
#[command(
    name = "selfdual",
    version,
    about = "Residual checks, lifts, reconstruction and evolution for the reduced self-dual equations",
    args_override_self = true
)]
pub struct Cli {
    /// Directory for report.json and CSV series; without it the report goes to stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,

    /// Seed for randomized fields and points.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,

    /// Plain-text `key = value` file merged in before the command-line flags.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Sweep a residual over a grid for a closed-form family.
    Verify(VerifyArgs),
    /// Fit the lift proportionality constants on random smooth fields.
    LiftCheck(LiftArgs),
    /// Rebuild p from an exact α through β, W and the hodograph inversion.
    Reconstruct(ReconstructArgs),
    /// Integrate the α-equation in time and compare with the exact family.
    Evolve(EvolveArgs),
    /// Integrate the quadratic-ansatz or Weierstrass ODEs.
    Ode(OdeArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Exact,
    Numeric,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeVariant {
    Paper,
    Corrected,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FamilyId {
    PsParabolic,
    PsLinear,
    PsSqrt,
    AutomodelGeneral,
    Linear,
    AutomodelParabolic,
    Traveling,
    F34,
    PolyAnsatz,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BranchArg {
    Plus,
    Minus,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SignArg {
    Plus,
    Minus,
    Oracle,
}

/// Family selection and parameters. Unset parameters take per-family defaults.
#[derive(Args, Debug, Clone)]
pub struct FamilyArgs {
    #[arg(long, value_enum)]
    pub family: Option<FamilyId>,
    #[arg(long, allow_negative_numbers = true)]
    pub a: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub b: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub c: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub c1: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub c2: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub v: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: Option<f64>,
    #[arg(long, value_enum)]
    pub branch: Option<BranchArg>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Equation {
    /// Similarity-profile ODE in ξ.
    Nu,
    /// Profile ODE after the two-step symmetry with parameter λ.
    Ff,
    /// The α-equation in (y, t).
    #[value(alias = "alpha")]
    Bbb1,
    /// Traveling-wave reduction in s = x + vt.
    Rv,
    /// First integral of the traveling-wave reduction.
    RvFirstIntegral,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub equation: Equation,
    #[command(flatten)]
    pub family: FamilyArgs,
    #[arg(long)]
    pub grid: Option<GridSpec>,
    #[arg(long, value_enum, default_value_t = Mode::Exact)]
    pub mode: Mode,
    #[arg(long, value_enum, default_value_t = ModeVariant::Corrected)]
    pub mode_variant: ModeVariant,
    /// Source-term sign for the poly-ansatz family; defaults to the variant's sign.
    #[arg(long, value_enum)]
    pub sign12: Option<BranchArg>,
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum LiftWhich {
    Plebanski,
    Sdym,
}

#[derive(Args, Debug)]
pub struct LiftArgs {
    #[arg(long, value_enum)]
    pub which: LiftWhich,
    /// Number of random fields.
    #[arg(long, default_value_t = 50, value_parser = clap::value_parser!(u32).range(1..))]
    pub trials: u32,
    /// Random chart points per field.
    #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u32).range(1..))]
    pub points: u32,
    /// Matrix size for the Yang-Mills lift.
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u32).range(2..))]
    pub dim: u32,
    #[arg(long, value_enum, default_value_t = Mode::Exact)]
    pub mode: Mode,
    #[arg(long, value_enum, default_value_t = ModeVariant::Corrected)]
    pub mode_variant: ModeVariant,
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Args, Debug)]
pub struct ReconstructArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    /// `x=lo:hi:n,t=lo:hi:n`
    #[arg(long)]
    pub grid: Option<GridSpec>,
    /// y-interval containing the hodograph root, `lo:hi`.
    #[arg(long, allow_hyphen_values = true)]
    pub bracket: Option<Bracket>,
    /// A at the reference time.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub a0: f64,
    /// B at the reference time.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub b0: f64,
    /// Reference time for the gauge pair; defaults to the first t of the grid.
    #[arg(long, allow_negative_numbers = true)]
    pub t_ref: Option<f64>,
    /// Base point of the y-integration.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub y0: f64,
    #[arg(long, value_enum, default_value_t = ModeVariant::Corrected)]
    pub mode_variant: ModeVariant,
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PerturbArg {
    None,
    Bump,
    Noise,
}

#[derive(Args, Debug)]
pub struct EvolveArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    /// `y=lo:hi:n`
    #[arg(long)]
    pub grid: Option<GridSpec>,
    #[arg(long, allow_negative_numbers = true)]
    pub t0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub t1: Option<f64>,
    /// Courant number used to pick dt when --dt is absent.
    #[arg(long, default_value_t = 0.5)]
    pub cfl: f64,
    #[arg(long)]
    pub dt: Option<f64>,
    /// Comma-separated point counts for a convergence study, e.g. 65,129,257.
    #[arg(long, value_delimiter = ',')]
    pub resolutions: Option<Vec<usize>>,
    #[arg(long, value_enum, default_value_t = PerturbArg::None)]
    pub perturb: PerturbArg,
    #[arg(long, default_value_t = 1e-6)]
    pub amplitude: f64,
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    pub center: f64,
    #[arg(long, default_value_t = 0.1)]
    pub width: f64,
    /// Also run the finite-propagation check with a bump at --center.
    #[arg(long)]
    pub finite_speed: bool,
    /// Number of snapshots written to the CSV series.
    #[arg(long, default_value_t = 10)]
    pub snapshots: usize,
    #[arg(long)]
    pub allow_cfl_violation: bool,
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OdeSystem {
    PolyAnsatz,
    Weierstrass,
}

#[derive(Args, Debug)]
pub struct OdeArgs {
    #[arg(long, value_enum)]
    pub system: OdeSystem,
    #[arg(long, value_enum, default_value_t = SignArg::Oracle)]
    pub sign12: SignArg,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub t0: f64,
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    pub t1: f64,
    /// RK4 steps; defaults to one per 1e-4 (poly-ansatz) or 1e-5 (weierstrass) in t.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub steps: Option<u64>,
    #[arg(long, default_value_t = -1.0, allow_negative_numbers = true)]
    pub a0: f64,
    #[arg(long, default_value_t = -2.0, allow_negative_numbers = true)]
    pub adot0: f64,
    #[arg(long, default_value_t = 2.1, allow_negative_numbers = true)]
    pub b0: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub bdot0: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub c0: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub cdot0: f64,
    /// First integral Ȧ² + 4A³; defaults to its value at the initial data.
    #[arg(long, allow_negative_numbers = true)]
    pub energy: Option<f64>,
    #[arg(long)]
    pub tol: Option<f64>,
}
