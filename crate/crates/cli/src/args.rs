use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use hyperscheme::hypergroup::DEFAULT_SEED;

#[derive(Debug, Parser)]
#[command(name = "hyperscheme", version, about = "Association schemes, hypergroups and random walks")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Write the report as JSON to stdout.
    #[arg(long, global = true)]
    pub json: bool,

    /// Seed for randomized steps.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the axioms of a scheme file (association or generalized scheme).
    Verify { file: PathBuf },
    /// Build the scheme of a group acting on the cosets of a subgroup.
    Cosets {
        /// JSON group file: {"table": [[..]]}, {"cyclic": n} or {"symmetric": n}.
        group: PathBuf,
        /// Subgroup elements, comma separated.
        subgroup: String,
        /// Write the scheme file here.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Character table, Haar and Plancherel weights of a commutative hypergroup.
    Characters {
        /// Hypergroup or scheme file.
        file: PathBuf,
    },
    /// Dual convolution of two characters.
    Dual { file: PathBuf, i: usize, j: usize },
    /// Deform a hypergroup by a positive semicharacter.
    Deform {
        file: PathBuf,
        /// Values of the semicharacter, comma separated (numbers or p/q).
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Reports on the hypergroup and balls of Gamma(a, b).
    Dtgraph(DtgraphArgs),
    /// Direct product of two schemes or two hypergroups.
    Product {
        first: PathBuf,
        second: PathBuf,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Join of a discrete factor (first) with a compact factor (second).
    Join {
        first: PathBuf,
        second: PathBuf,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Simulate a random walk and compare its projection with the hypergroup walk.
    Walk(WalkArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DtReport {
    Summary,
    Psd,
    Ortho,
    Deform,
    Pushforward,
}

#[derive(Debug, Args)]
pub struct DtgraphArgs {
    #[arg(long)]
    pub a: u32,
    #[arg(long)]
    pub b: u32,
    /// Ball radius (default 4 for psd, 6 for deform).
    #[arg(long)]
    pub radius: Option<usize>,
    /// Single evaluation point.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "grid")]
    pub x: Option<f64>,
    /// Evaluation grid lo:hi:n (default s0:s1:9).
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
    /// Boundary deformation parameter c.
    #[arg(long = "deform-c", allow_hyphen_values = true, default_value_t = 0.0)]
    pub deform_c: f64,
    /// Largest polynomial degree for the orthogonality report.
    #[arg(long, default_value_t = 12)]
    pub degree: usize,
    #[arg(long, value_enum, default_value_t = DtReport::Summary)]
    pub report: DtReport,
}

#[derive(Debug, Args)]
pub struct WalkArgs {
    /// Scheme file whose kernels drive the walk.
    #[arg(required_unless_present = "dtgraph", conflicts_with = "dtgraph")]
    pub scheme: Option<PathBuf>,
    /// Walk on a ball of Gamma(a, b): a,b,R[,c].
    #[arg(long, allow_hyphen_values = true)]
    pub dtgraph: Option<String>,
    /// Step distribution over relations, comma separated.
    #[arg(long)]
    pub mu: String,
    /// Number of steps of every trial.
    #[arg(long)]
    pub steps: usize,
    /// Number of independent trials.
    #[arg(long, default_value_t = 100_000)]
    pub trials: usize,
    /// Starting point (the root for balls).
    #[arg(long, default_value_t = 0)]
    pub start: usize,
    /// Also propagate the exact law through the kernels and compare.
    #[arg(long)]
    pub exact: bool,
    /// Largest accepted total variation distance.
    #[arg(long, default_value_t = 0.02)]
    pub tv_tol: f64,
}
