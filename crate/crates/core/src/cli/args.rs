use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(
    name = "randpovm",
    version,
    about = "Seeded experiments with random POVMs, coset states and Fourier sampling",
    args_override_self = true
)]
pub struct Cli {
    /// Worker threads (default: available cores). Never changes results.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Master seed. Required by every experiment subcommand.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// CSV output path.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// JSON summary path (default: stdout).
    #[arg(long, global = true)]
    pub json: Option<PathBuf>,

    /// Flat key=value file whose entries act as flags; command-line flags win.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Tail-bound Monte Carlo checks.
    Concentration(ConcentrationArgs),
    /// TV distribution of a random measurement on a pair of states.
    Distinguish(DistinguishArgs),
    /// Hidden subgroup identification, TV spectrum, or coset trace distances.
    Hsp(HspArgs),
    /// State identification with a random POVM and the likelihood tournament.
    Identify(IdentifyArgs),
    /// Irreps, subgroup lattice and w/r distance tables of a group.
    GroupInfo(GroupInfoArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    ChiSquare,
    Projection,
    GramSchmidt,
    GaussianNorm,
    Weighted,
    HighRank,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Side {
    UpperT,
    TwoSidedEps,
}

#[derive(Args, Debug, Serialize)]
pub struct ConcentrationArgs {
    #[arg(long, value_enum)]
    pub exp: Experiment,
    #[arg(long)]
    pub n: Option<usize>,
    /// Subspace dimension (projection).
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub eps: Option<f64>,
    /// Tail multiple (projection, upper-t side).
    #[arg(long)]
    pub t: Option<f64>,
    #[arg(long, value_enum)]
    pub side: Option<Side>,
    /// Number of vectors (gram-schmidt) or rank (high-rank).
    #[arg(long)]
    pub r: Option<usize>,
    /// Parameter M > 1 (gram-schmidt).
    #[arg(long = "M")]
    pub big_m: Option<f64>,
    /// Weight profile (weighted): uniform, geometric, slow-geometric, spike, two-scale.
    #[arg(long)]
    pub profile: Option<String>,
    /// Number of weights in the profile.
    #[arg(long)]
    pub size: Option<usize>,
    /// Explicit comma-separated weights (weighted); overrides the profile.
    #[arg(long)]
    pub lambdas: Option<String>,
    #[arg(long, default_value_t = 100_000)]
    pub trials: usize,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeKind {
    HaarBasis,
    PovmPlain,
    PovmAncilla,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairKind {
    /// Independent Haar-random pure states.
    RandomPure,
    /// `|0>` and `|1>`.
    OrthogonalPure,
    /// Completely mixed states on coordinates `0..r` and `r..2r`.
    Mixed,
}

#[derive(Args, Debug, Serialize)]
pub struct DistinguishArgs {
    #[arg(long, value_enum, default_value = "haar-basis")]
    pub mode: ModeKind,
    /// Ancilla dimension for povm-ancilla.
    #[arg(long = "K", default_value_t = 1)]
    pub big_k: usize,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 500)]
    pub trials: usize,
    #[arg(long, value_enum, default_value = "random-pure")]
    pub pair: PairKind,
    /// Number of random pairs (random-pure).
    #[arg(long, default_value_t = 1)]
    pub pairs: usize,
    /// Rank of each state (mixed).
    #[arg(long, default_value_t = 1)]
    pub r: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct HspArgs {
    /// Group descriptor, e.g. dihedral:4, cyclic:12, heisenberg:3, cyclic:2*dihedral:3.
    #[arg(long)]
    pub group: String,
    #[arg(long, default_value_t = 40)]
    pub copies: usize,
    #[arg(long, default_value_t = 200)]
    pub runs: usize,
    /// Constant C in K_rho = ceil(C log2^2 |G| / d_rho).
    #[arg(long = "C", default_value_t = 1.0)]
    pub big_c: f64,
    /// Record TV / r over POVM draws instead of identifying.
    #[arg(long)]
    pub spectrum: bool,
    #[arg(long, default_value_t = 10)]
    pub draws: usize,
    /// Check pairwise coset-state trace distances instead of identifying.
    #[arg(long, conflicts_with = "spectrum")]
    pub trace_check: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct IdentifyArgs {
    #[arg(long, default_value_t = 16)]
    pub n: usize,
    /// Ensemble size.
    #[arg(long, default_value_t = 6)]
    pub k: usize,
    /// Rank of each ensemble state (1 gives pure states).
    #[arg(long, default_value_t = 1)]
    pub rank: usize,
    #[arg(long, value_enum, default_value = "povm-ancilla")]
    pub mode: ModeKind,
    #[arg(long = "K", default_value_t = 4)]
    pub big_k: usize,
    #[arg(long, default_value_t = 200)]
    pub runs: usize,
    #[arg(long, default_value_t = 16.0)]
    pub c_cal: f64,
    /// Fixed copy count, overriding copies_for.
    #[arg(long)]
    pub copies: Option<usize>,
    /// Use min trace distance / sqrt(rank) in place of the measured power.
    #[arg(long)]
    pub surrogate: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct GroupInfoArgs {
    #[arg(long)]
    pub group: String,
}
