use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use swirl_core::{DistributionKind, PatternFamily};

#[derive(Parser, Debug)]
#[command(
    name = "swirl",
    version,
    about = "Structured random-matrix ensembles: simulation, trace identities, exact moments"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Monte Carlo spectral simulation; writes eigs.csv, hist.csv, summary.json.
    Simulate(SimulateArgs),
    /// Verify the swirl trace identities on a seeded draw; emits JSON lines.
    TraceCheck(TraceCheckArgs),
    /// Exact limiting even moment by matching enumeration and nullity counting.
    MomentsExact(MomentsExactArgs),
    /// Per-matching audit: pairs, odd-even flag, nullity; emits CSV.
    PartitionAudit(PartitionAuditArgs),
    /// Link-pattern structure scan over an (N, s, t) grid; emits CSV.
    CosetCount(CosetCountArgs),
    /// Exact finite-N expected trace of a matrix power.
    Oracle(OracleArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DistArg {
    Normal,
    Rademacher,
}

impl DistArg {
    pub fn kind(self) -> DistributionKind {
        match self {
            DistArg::Normal => DistributionKind::StandardNormal,
            DistArg::Rademacher => DistributionKind::Rademacher,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            DistArg::Normal => "normal",
            DistArg::Rademacher => "rademacher",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum EnsembleArg {
    CirculantHankel,
    CirculantToeplitz,
    Exchange,
    ConcentricEven,
    /// Alias for the concentric even family: sw(A, J) with A circulant Toeplitz.
    HankelSwirl,
    Link,
}

impl EnsembleArg {
    pub fn family(self) -> PatternFamily {
        match self {
            EnsembleArg::CirculantHankel => PatternFamily::CirculantHankel,
            EnsembleArg::CirculantToeplitz => PatternFamily::CirculantToeplitz,
            EnsembleArg::Exchange => PatternFamily::Exchange,
            EnsembleArg::ConcentricEven | EnsembleArg::HankelSwirl => PatternFamily::ConcentricEven,
            EnsembleArg::Link => PatternFamily::LinkST,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            EnsembleArg::CirculantHankel => "circulant-hankel",
            EnsembleArg::CirculantToeplitz => "circulant-toeplitz",
            EnsembleArg::Exchange => "exchange",
            EnsembleArg::ConcentricEven => "concentric-even",
            EnsembleArg::HankelSwirl => "hankel-swirl",
            EnsembleArg::Link => "link",
        }
    }
}

#[derive(Parser, Debug)]
pub struct SimulateArgs {
    #[arg(long, value_enum)]
    pub ensemble: EnsembleArg,
    /// Base dimension N.
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = DistArg::Normal)]
    pub dist: DistArg,
    /// Link slope s (link ensemble only).
    #[arg(long)]
    pub s: Option<i64>,
    /// Link slope t (link ensemble only).
    #[arg(long)]
    pub t: Option<i64>,
    /// Use the symmetrized two-condition link relation.
    #[arg(long, default_value_t = false)]
    pub symmetric_link: bool,
    /// Output directory for eigs.csv, hist.csv, summary.json.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Parser, Debug)]
pub struct TraceCheckArgs {
    #[arg(long, value_enum, default_value_t = EnsembleArg::HankelSwirl)]
    pub ensemble: EnsembleArg,
    #[arg(long)]
    pub n: usize,
    /// Check powers 1..=k.
    #[arg(long, default_value_t = 4)]
    pub k: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = DistArg::Normal)]
    pub dist: DistArg,
    /// Iterated swirl depth.
    #[arg(long, default_value_t = 2)]
    pub ell: usize,
    #[arg(long)]
    pub s: Option<i64>,
    #[arg(long)]
    pub t: Option<i64>,
    #[arg(long, default_value_t = false)]
    pub symmetric_link: bool,
    /// Relative-error pass threshold.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Output file for JSON lines (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Parser, Debug)]
pub struct MomentsExactArgs {
    /// Half-order: computes the limiting moment M_{2k}.
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Parser, Debug)]
pub struct PartitionAuditArgs {
    /// Half-order: audits the matchings of {1, ..., 2k}.
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Parser, Debug)]
pub struct CosetCountArgs {
    /// Single N (overrides the range).
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 2)]
    pub n_min: usize,
    #[arg(long, default_value_t = 16)]
    pub n_max: usize,
    /// Pin s (otherwise scan 0..N).
    #[arg(long)]
    pub s: Option<i64>,
    /// Pin t (otherwise scan 0..N).
    #[arg(long)]
    pub t: Option<i64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Parser, Debug)]
pub struct OracleArgs {
    #[arg(long)]
    pub n: usize,
    /// Matrix power whose expected trace is computed exactly.
    #[arg(long)]
    pub power: usize,
    #[arg(long, value_enum, default_value_t = DistArg::Normal)]
    pub dist: DistArg,
    #[arg(long)]
    pub out: Option<PathBuf>,
}
