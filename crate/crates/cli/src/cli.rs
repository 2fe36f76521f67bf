use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use golflab::Strategy;
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(name = "golflab", version, about = "Golf particle system: simulation, exact laws, oracle checks")]
pub struct Cli {
    /// Worker threads for trial loops (0 = all cores). Output does not depend on it.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,

    /// Master seed.
    #[arg(long, global = true, env = "GOLFLAB_SEED", default_value_t = 0)]
    pub seed: u64,

    /// Write the output to this file (plus a run manifest next to it).
    #[arg(long, global = true)]
    pub emit: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Monte Carlo runs of golf, parking or the windowed line model.
    #[command(subcommand)]
    Simulate(Simulate),
    /// Exact and closed-form laws.
    #[command(subcommand)]
    Exact(Exact),
    /// Oracle-versus-formula suite; exit status 1 on the first mismatch.
    Verify(VerifyArgs),
    /// Scans and finite-size checks.
    #[command(subcommand)]
    Experiment(Experiment),
    /// Re-run the command recorded in a manifest and compare output digests.
    #[serde(skip)]
    Replay {
        manifest: PathBuf,
    },
}

fn default_walk() -> Strategy {
    Strategy::pwalk(1, 2)
}

#[derive(Debug, Clone, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Simulate {
    Golf(GolfArgs),
    Parking(ParkingArgs),
    Line(LineArgs),
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct GolfArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub balls: usize,
    #[arg(long)]
    pub holes: usize,
    /// `pwalk:<p>`, `dir:<q>`, `nearest` or `parity`.
    #[arg(long, default_value_t = default_walk())]
    pub strategy: Strategy,
    /// With one trial the final state is printed as JSON, otherwise one CSV row of blocks per trial.
    #[arg(long, default_value_t = 1)]
    pub trials: usize,
    /// Record every walk (single trial only).
    #[arg(long)]
    pub logged: bool,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ParkingArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub cars: usize,
    #[arg(long, default_value_t = default_walk())]
    pub strategy: Strategy,
    #[arg(long, default_value_t = 1)]
    pub trials: usize,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct LineArgs {
    #[arg(long)]
    pub db: f64,
    #[arg(long)]
    pub dt: f64,
    /// Window `-width..=width`.
    #[arg(long)]
    pub width: usize,
    #[arg(long, default_value_t = default_walk())]
    pub strategy: Strategy,
}

#[derive(Debug, Clone, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Exact {
    /// Law of the remaining hole set on the cycle.
    Cycle {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        balls: usize,
        #[arg(long)]
        holes: usize,
    },
    /// Law of the free slots after parking.
    Parking {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        cars: usize,
    },
    /// Remaining-hole law for a uniform arrangement of the census of a
    /// multiplicity vector (`-1` hole, `0` empty, `j > 0` balls).
    Multiball {
        #[arg(long, allow_hyphen_values = true)]
        multiplicity: String,
        #[arg(long, value_enum, default_value_t = Convention::Closing)]
        convention: Convention,
    },
    /// Block law on Z when `d_b + d_t = 1`: masses of `Delta_index = 2b` for `b = 0..=max_b`.
    Zlaw {
        #[arg(long)]
        db: f64,
        #[arg(long)]
        dt: f64,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        index: i64,
        #[arg(long, default_value_t = 10)]
        max_b: u64,
    },
    /// Law of the origin block on Z for general densities: masses of `Delta_0 = l` for `l = 0..=max_l`.
    Zgeneral {
        #[arg(long)]
        db: f64,
        #[arg(long)]
        dt: f64,
        #[arg(long, default_value_t = 20)]
        max_l: u64,
    },
    /// Moments of the sparse-case limit density, and its value at `--x` if given.
    Sparse {
        #[arg(long)]
        balls: usize,
        #[arg(long)]
        holes: usize,
        /// Comma-separated point of the simplex.
        #[arg(long, value_delimiter = ',')]
        x: Option<Vec<f64>>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Convention {
    /// `1/(b+1)` per interval.
    Closing,
    /// `1/b` per interval.
    Literal,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 6)]
    pub max_n: usize,
    /// Two walk parameters, e.g. `1/2,1/3`.
    #[arg(long)]
    pub p_pair: Option<String>,
    /// Corrupt a closed form on purpose (negative control).
    #[arg(long, value_enum, hide = true)]
    pub mutate: Option<MutationArg>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MutationArg {
    DropSurvivalFactor,
}

#[derive(Debug, Clone, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Phase(PhaseArgs),
    Sparse(SparseArgs),
    Parking(ParkingScanArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegimeArg {
    Linear,
    Critical,
    Super,
    Sub,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct PhaseArgs {
    #[arg(long, value_enum)]
    pub regime: RegimeArg,
    /// `n_l / n` in the linear regime.
    #[arg(long, default_value_t = 0.5)]
    pub a: f64,
    /// `n_l / sqrt(n)` in the critical regime.
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    /// Single size; in the critical regime this gives the per-trial profile.
    #[arg(long, conflicts_with = "ns")]
    pub n: Option<usize>,
    /// Comma-separated size grid.
    #[arg(long, value_delimiter = ',')]
    pub ns: Option<Vec<usize>>,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long, default_value_t = default_walk())]
    pub strategy: Strategy,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SparseArgs {
    #[arg(long)]
    pub balls: usize,
    #[arg(long)]
    pub holes: usize,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
    #[arg(long, default_value_t = default_walk())]
    pub strategy: Strategy,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ParkingScanArgs {
    #[arg(long, default_value_t = 0.5)]
    pub a: f64,
    #[arg(long, value_delimiter = ',')]
    pub ns: Vec<usize>,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long, default_value_t = default_walk())]
    pub strategy: Strategy,
}
