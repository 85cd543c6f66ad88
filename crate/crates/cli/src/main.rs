//! `ergm`: fit, simulate, assess and select exponential random graph models
//! of brain networks.

mod commands;
mod table;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ergm_core::{Error, ErrorClass};

#[derive(Parser, Debug)]
#[command(name = "ergm", version, about = "Exponential random graph models for brain networks")]
pub struct Cli {
    /// Master random seed, recorded in every output document [default: the
    /// control file's seed, else 0].
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Worker threads for parallel chains and fits [default: all cores].
    #[arg(long, global = true, env = "ERGM_THREADS")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Estimate model parameters for one network.
    Fit(FitArgs),
    /// Draw networks from a model at given parameters.
    Simulate(SimulateArgs),
    /// Goodness of fit of a fitted model; writes a plot-data document.
    Gof(GofArgs),
    /// Run a model-selection procedure.
    Select(SelectArgs),
    /// Compare two groups of parameter profiles term by term.
    Compare(CompareArgs),
    /// Threshold a weighted connectivity matrix at a target small-world
    /// propensity.
    Threshold(ThresholdArgs),
    /// Descriptive metrics of one network.
    Metrics(MetricsArgs),
    /// Start the HTTP job service.
    Serve(ServeArgs),
}

#[derive(Args, Debug, Clone)]
pub struct NetworkArgs {
    /// Adjacency matrix or edge list.
    #[arg(long)]
    pub network: PathBuf,
    /// Input format.
    #[arg(long, default_value = "auto", value_parser = ["auto", "matrix", "edgelist"])]
    pub format: String,
    /// CSV of node attributes (`node,<name>` header).
    #[arg(long)]
    pub attrs: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct ControlArgs {
    /// JSON file of job settings, as accepted by the service's `control`
    /// field. Flags given on the command line take precedence.
    #[arg(long)]
    pub control: Option<PathBuf>,
    /// MCMC burn-in proposals.
    #[arg(long)]
    pub burn_in: Option<u64>,
    /// Proposals between retained networks.
    #[arg(long)]
    pub interval: Option<u64>,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
pub enum MethodArg {
    Mple,
    Mcmc,
    Exact,
}

#[derive(Args, Debug)]
pub struct FitArgs {
    #[command(flatten)]
    pub network: NetworkArgs,
    /// Comma-separated terms, e.g. `edges,gwesp:0.75,gwnsp:0.75`.
    #[arg(long)]
    pub terms: String,
    #[arg(long, value_enum, default_value_t = MethodArg::Mcmc)]
    pub method: MethodArg,
    /// Decay for weighted terms given without one.
    #[arg(long, default_value_t = 0.75)]
    pub tau: f64,
    /// Networks sampled per estimation iteration.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Bridges for the log-likelihood; 0 skips it.
    #[arg(long)]
    pub bridges: Option<usize>,
    #[command(flatten)]
    pub control: ControlArgs,
    /// Fit document path [default: stdout].
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[arg(long)]
    pub terms: String,
    /// Comma-separated parameters in term order.
    #[arg(long, allow_hyphen_values = true)]
    pub theta: String,
    #[arg(long)]
    pub nodes: usize,
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    #[arg(long, default_value_t = 0.75)]
    pub tau: f64,
    /// CSV of node attributes.
    #[arg(long)]
    pub attrs: Option<PathBuf>,
    #[command(flatten)]
    pub control: ControlArgs,
    /// Directory for the summary document and sampled edge lists.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct GofArgs {
    /// Fit document.
    #[arg(long)]
    pub fit: PathBuf,
    #[command(flatten)]
    pub network: NetworkArgs,
    /// Simulated networks.
    #[arg(long)]
    pub samples: Option<usize>,
    #[command(flatten)]
    pub control: ControlArgs,
    /// Plot-data document path.
    #[arg(long)]
    pub out: PathBuf,
    /// Also write the full report here.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
pub enum SelectMethodArg {
    Pvalue,
    Aic,
    Graphical,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
pub enum StrategyArg {
    Stepwise,
    Exhaustive,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
pub enum LikelihoodArg {
    Bridge,
    Exact,
}

#[derive(Args, Debug)]
pub struct SelectArgs {
    #[arg(long, value_enum)]
    pub method: SelectMethodArg,
    #[command(flatten)]
    pub network: NetworkArgs,
    /// Candidate terms [default: every term category].
    #[arg(long)]
    pub candidates: Option<String>,
    /// Explicit models for graphical ranking, separated by `;`.
    #[arg(long)]
    pub models: Option<String>,
    /// Attribute for the nodematch candidate.
    #[arg(long)]
    pub attribute: Option<String>,
    #[arg(long, default_value_t = 0.75)]
    pub tau: f64,
    /// Significance level for backward p-value selection.
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long, value_enum, default_value_t = StrategyArg::Stepwise)]
    pub strategy: StrategyArg,
    /// Log-likelihood source for AIC.
    #[arg(long, value_enum, default_value_t = LikelihoodArg::Bridge)]
    pub likelihood: LikelihoodArg,
    #[command(flatten)]
    pub control: ControlArgs,
    /// Selection trace document path [default: stdout].
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
pub enum VarianceArg {
    Welch,
    Pooled,
}

#[derive(Args, Debug)]
#[command(group = clap::ArgGroup::new("input").required(true).args(["group_a", "summary"]))]
pub struct CompareArgs {
    /// Fit documents of group A.
    #[arg(long, num_args = 1.., requires = "group_b")]
    pub group_a: Vec<PathBuf>,
    /// Fit documents of group B.
    #[arg(long, num_args = 1.., requires = "group_a")]
    pub group_b: Vec<PathBuf>,
    /// CSV with `term,mean_a,se_a,n_a,mean_b,se_b,n_b`.
    #[arg(long, conflicts_with_all = ["group_a", "group_b"])]
    pub summary: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = VarianceArg::Welch)]
    pub variance: VarianceArg,
    /// Also write the comparison document here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ThresholdArgs {
    /// Symmetric weight matrix (whitespace or comma separated).
    #[arg(long)]
    pub matrix: PathBuf,
    /// Target small-world propensity S; the target mean degree is n^(1/S).
    #[arg(long)]
    pub s: f64,
    /// Threshold absolute values of the weights.
    #[arg(long)]
    pub absolute: bool,
    /// Threshold document path.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write the thresholded network as an edge list.
    #[arg(long)]
    pub edges: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct MetricsArgs {
    #[command(flatten)]
    pub network: NetworkArgs,
    /// Also write the metrics document here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ServeArgs {
    #[arg(long, default_value_t = 8080)]
    pub port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    pub host: std::net::IpAddr,
    /// Jobs run at once.
    #[arg(long, default_value_t = 2)]
    pub workers: usize,
    /// Directory where finished result documents are also written.
    #[arg(long)]
    pub results_dir: Option<PathBuf>,
}

fn exit_code(class: ErrorClass) -> u8 {
    match class {
        ErrorClass::Usage => 2,
        ErrorClass::Data | ErrorClass::Model => 3,
        ErrorClass::Convergence => 4,
        ErrorClass::Internal => 5,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error[internal/threads]: {e}");
            return ExitCode::from(5);
        }
    }
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let e: Error = e;
            eprintln!("error[{}/{}]: {e}", e.class().as_str(), e.code());
            ExitCode::from(exit_code(e.class()))
        }
    }
}
