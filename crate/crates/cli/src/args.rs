use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use btiepi_core::Formulation;

/// Binary tree inequalities for summed start-up costs.
#[derive(Debug, Parser)]
#[command(name = "btiepi", version, about)]
pub struct Cli {
    /// Indent JSON output.
    #[arg(long, global = true)]
    pub pretty: bool,
    /// Cap on worker threads.
    #[arg(long, global = true, value_parser = clap::value_parser!(usize))]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

/// Start-up cost model and time grid shared by most commands.
#[derive(Debug, Args)]
pub struct CostArgs {
    /// `exp:V,f,LAMBDA` or `table:L1:C1,L2:C2,...` (the table starts at 0:0).
    #[arg(long)]
    pub cost: String,
    /// Comma-separated period lengths; unit lengths when absent.
    #[arg(long)]
    pub delta: Option<String>,
    /// Offline time before the first period.
    #[arg(long, default_value_t = 0.0)]
    pub pre: f64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Separate a point (u, c) from the epigraph of summed start-up costs.
    Separate {
        /// Comma-separated values in [0, 1].
        #[arg(long, allow_hyphen_values = true)]
        u: String,
        #[arg(long, allow_hyphen_values = true)]
        c: f64,
        #[command(flatten)]
        cost: CostArgs,
    },
    /// Evaluate the convex envelope at u.
    Envelope {
        #[arg(long, allow_hyphen_values = true)]
        u: String,
        /// Also print the tree and coefficients attaining the value.
        #[arg(long)]
        certify: bool,
        #[command(flatten)]
        cost: CostArgs,
    },
    /// Cartesian tree of a vector.
    Tree {
        #[arg(long, allow_hyphen_values = true)]
        u: String,
    },
    /// Count or list the rank-labeled binary trees on n nodes.
    Trees {
        #[arg(long)]
        n: usize,
        #[arg(long, conflicts_with = "list")]
        count: bool,
        #[arg(long)]
        list: bool,
    },
    /// Count distinct tree inequalities and confirm them as facets.
    Facets {
        #[arg(long = "T")]
        periods: usize,
        /// Include the confirmed count and duplicate pairs.
        #[arg(long)]
        detail: bool,
        #[command(flatten)]
        cost: CostArgs,
    },
    /// Brute-force verification reports.
    Oracle {
        #[arg(value_enum)]
        check: OracleCheck,
        #[arg(long = "T")]
        periods: usize,
        /// Seed for the sampled checks.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of random points for the sampled checks.
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[command(flatten)]
        cost: CostArgs,
    },
    /// Build a unit commitment model and write it in LP format.
    Build {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_parser = parse_formulation)]
        formulation: Formulation,
        /// CSV file replacing the instance demand.
        #[arg(long)]
        demand: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Integrality gap of a formulation's relaxation.
    Gap {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_parser = parse_formulation)]
        formulation: Formulation,
        #[arg(long)]
        demand: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OracleCheck {
    Validity,
    Equality,
    Irredundancy,
    Separation,
    Hull,
}

fn parse_formulation(s: &str) -> Result<Formulation, String> {
    s.parse().map_err(|e: btiepi_core::Error| e.to_string())
}
