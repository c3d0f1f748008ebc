use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hopsched::{EnergyConfig, Execution, SolverConfig};

#[derive(Debug, Parser)]
#[command(name = "hopsched", version, about = "Project scheduling by energy minimization")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a project file and report its size and optimal makespan.
    Validate { project: PathBuf },
    /// Run the dynamics on a project file and write the schedule.
    Solve(SolveArgs),
    /// Critical path analysis as JSON.
    Cpm {
        project: PathBuf,
        /// Write the JSON here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a random project network.
    Generate(GenerateArgs),
    /// Run the benchmark table and write a report.
    Bench(BenchArgs),
    /// Median solve time against network size.
    Scaling(ScalingArgs),
}

#[derive(Debug, Clone, Args)]
pub struct SolverFlags {
    /// Step size.
    #[arg(long, default_value_t = 0.01)]
    pub alpha: f64,
    #[arg(long, default_value_t = 5000)]
    pub max_iters: usize,
    /// Convergence threshold on the largest start-time change.
    #[arg(long, default_value_t = 1e-4)]
    pub tol: f64,
    /// Consecutive iterations below `--tol` needed to stop.
    #[arg(long, default_value_t = 10)]
    pub tol_window: usize,
    /// Return the raw dynamics output without the feasibility repair.
    #[arg(long)]
    pub no_repair: bool,
    /// Worker threads; 1 runs everything sequentially.
    #[arg(long)]
    pub jobs: Option<usize>,
}

impl SolverFlags {
    pub fn execution(&self) -> Execution {
        match self.jobs {
            Some(1) => Execution::Sequential,
            _ => Execution::default(),
        }
    }

    pub fn solver(&self) -> SolverConfig {
        SolverConfig {
            alpha: self.alpha,
            max_iters: self.max_iters,
            tol: self.tol,
            tol_window: self.tol_window,
            repair: !self.no_repair,
            execution: self.execution(),
            ..SolverConfig::default()
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct EnergyFlags {
    /// Weight of the start-time sum.
    #[arg(long, default_value_t = hopsched::energy::DEFAULT_BETA)]
    pub beta: f64,
    /// Deadline; overrides the project file.
    #[arg(long)]
    pub deadline: Option<f64>,
    /// Resource capacity; overrides the project file.
    #[arg(long)]
    pub resource_max: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub lambda_deadline: f64,
    #[arg(long, default_value_t = 1.0)]
    pub lambda_resource: f64,
    /// Sampling step of the resource profile.
    #[arg(long, default_value_t = 1.0)]
    pub grid_dt: f64,
}

impl EnergyFlags {
    pub fn energy(&self, deadline: Option<f64>, resource_max: Option<f64>) -> EnergyConfig {
        EnergyConfig {
            beta: self.beta,
            deadline: self.deadline.or(deadline),
            resource_max: self.resource_max.or(resource_max),
            lambda_deadline: self.lambda_deadline,
            lambda_resource: self.lambda_resource,
            grid_dt: self.grid_dt,
        }
    }
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    pub project: PathBuf,
    #[command(flatten)]
    pub solver: SolverFlags,
    #[command(flatten)]
    pub energy: EnergyFlags,
    /// Initial start times (a schedule file); zeros by default.
    #[arg(long)]
    pub init: Option<PathBuf>,
    /// Schedule output path.
    #[arg(long, default_value = "schedule.json")]
    pub out: PathBuf,
    /// Print the resolved configuration as JSON and exit.
    #[arg(long)]
    pub print_config: bool,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long)]
    pub tasks: usize,
    /// Exact number of edges.
    #[arg(long, conflicts_with = "edge_prob", required_unless_present = "edge_prob")]
    pub edges: Option<usize>,
    /// Independent probability of each forward edge.
    #[arg(long)]
    pub edge_prob: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1.0)]
    pub dur_min: f64,
    #[arg(long, default_value_t = 10.0)]
    pub dur_max: f64,
    #[arg(long, requires = "demand_max")]
    pub demand_min: Option<f64>,
    #[arg(long, requires = "demand_min")]
    pub demand_max: Option<f64>,
    /// Deadline stored in the project constraints.
    #[arg(long)]
    pub deadline: Option<f64>,
    /// Resource capacity stored in the project constraints.
    #[arg(long)]
    pub resource_max: Option<f64>,
    /// Output path; stdout if absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Both,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Instances per row.
    #[arg(long, default_value_t = 20)]
    pub runs: usize,
    /// Table rows to run (1-based), comma separated; all by default.
    #[arg(long, value_delimiter = ',')]
    pub rows: Vec<usize>,
    /// Base seed; row k uses seeds base + k*runs onwards.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Comma-separated beta values tried per row.
    #[arg(long, value_delimiter = ',')]
    pub beta_sweep: Vec<f64>,
    #[command(flatten)]
    pub solver: SolverFlags,
    #[arg(long, default_value_t = 1.0)]
    pub lambda_deadline: f64,
    #[arg(long, default_value_t = 1.0)]
    pub lambda_resource: f64,
    #[arg(long, default_value_t = 1.0)]
    pub grid_dt: f64,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    #[arg(long, default_value = "bench.csv")]
    pub out: PathBuf,
    /// Print the resolved configuration as JSON and exit.
    #[arg(long)]
    pub print_config: bool,
}

#[derive(Debug, Args)]
pub struct ScalingArgs {
    /// Network sizes, ascending, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "100,250,500,1000")]
    pub sizes: Vec<usize>,
    #[arg(long, default_value_t = 2.9)]
    pub edges_per_task: f64,
    /// Seeds per size; the median is reported.
    #[arg(long, default_value_t = 3)]
    pub seeds: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = hopsched::energy::DEFAULT_BETA)]
    pub beta: f64,
    #[command(flatten)]
    pub solver: SolverFlags,
    #[arg(long, default_value = "scaling.csv")]
    pub out: PathBuf,
}
