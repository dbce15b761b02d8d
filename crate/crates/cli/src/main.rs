mod commands;
mod output;

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

/// Geometry of Killing submersions: metric inspection, surface residual
/// sweeps, Hopf cylinders and the verification suite.
#[derive(Debug, Parser)]
#[command(name = "killsub", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// r, G, grad r and the Ricci tensor at points of a metric.
    Info(InfoArgs),
    /// Gauss/Codazzi identities and biharmonicity of a surface on a grid.
    CheckSurface(SurfaceArgs),
    /// Hopf cylinders over base curves.
    #[command(subcommand)]
    Hopf(HopfCommand),
    /// Runs the full numerical verification suite.
    VerifyPaper(VerifyArgs),
}

#[derive(Debug, Subcommand)]
pub enum HopfCommand {
    /// Checks the Hopf cylinder over one base curve.
    Check(HopfCheckArgs),
    /// Finds the biharmonic parallels of `dt² + f(t)² dθ²` with constant bundle curvature r.
    Example(ExampleArgs),
}

#[derive(Debug, Clone, Args)]
pub struct MetricArgs {
    /// Canonical model with base curvature C and bundle curvature MU.
    #[arg(long, num_args = 2, value_names = ["C", "MU"], allow_negative_numbers = true)]
    pub bcv: Option<Vec<f64>>,
    /// Conformal factor λ(x, y).
    #[arg(long)]
    pub lambda: Option<String>,
    /// Coefficient a(x, y) (default 0).
    #[arg(long)]
    pub a: Option<String>,
    /// Coefficient b(x, y) (default 0).
    #[arg(long)]
    pub b: Option<String>,
    /// Base domain XMIN XMAX YMIN YMAX.
    #[arg(long, num_args = 4, value_names = ["XMIN", "XMAX", "YMIN", "YMAX"], allow_negative_numbers = true)]
    pub domain: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Expect {
    Pass,
    Fail,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Write to this file instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct InfoArgs {
    #[command(flatten)]
    pub metric: MetricArgs,
    /// A single base point.
    #[arg(long, num_args = 2, value_names = ["X", "Y"], allow_negative_numbers = true, conflicts_with = "grid")]
    pub at: Option<Vec<f64>>,
    /// Cell centres of an N×M grid over the domain.
    #[arg(long, num_args = 2, value_names = ["N", "M"])]
    pub grid: Option<Vec<usize>>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SurfaceArgs {
    #[command(flatten)]
    pub metric: MetricArgs,
    /// Immersion "X;Y;Z" in the parameters u, v.
    #[arg(long, conflicts_with = "graph", required_unless_present = "graph")]
    pub surface: Option<String>,
    /// Graph z = h(x, y).
    #[arg(long)]
    pub graph: Option<String>,
    /// Parameter domain UMIN UMAX VMIN VMAX (default -0.5 0.5 -0.5 0.5).
    #[arg(long, num_args = 4, value_names = ["UMIN", "UMAX", "VMIN", "VMAX"], allow_negative_numbers = true)]
    pub param_domain: Option<Vec<f64>>,
    /// Cell centres of an N×M grid over the parameter domain.
    #[arg(long, num_args = 2, value_names = ["N", "M"], default_values_t = [3usize, 3])]
    pub grid: Vec<usize>,
    /// Uniform tolerance for every check.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Only run checks whose name contains NAME.
    #[arg(long, value_name = "NAME")]
    pub only: Option<String>,
    #[arg(long, value_enum)]
    pub expect: Option<Expect>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct HopfCheckArgs {
    #[command(flatten)]
    pub metric: MetricArgs,
    /// Base curve "x(t);y(t)".
    #[arg(long, conflicts_with_all = ["circle", "circle_kg"])]
    pub curve: Option<String>,
    /// Parameter interval of --curve (default 0 2π).
    #[arg(long, num_args = 2, value_names = ["T0", "T1"], allow_negative_numbers = true)]
    pub interval: Option<Vec<f64>>,
    /// Anticlockwise circle of this Euclidean radius about the origin.
    #[arg(long, conflicts_with = "circle_kg")]
    pub circle: Option<f64>,
    /// Centred circle with this geodesic curvature.
    #[arg(long, allow_negative_numbers = true)]
    pub circle_kg: Option<f64>,
    #[arg(long, default_value_t = killsub::hopf::DEFAULT_SAMPLES)]
    pub samples: usize,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, value_enum)]
    pub expect: Option<Expect>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ExampleArgs {
    /// Warping function f(t).
    #[arg(long)]
    pub f: String,
    /// Constant bundle curvature.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub r: f64,
    #[arg(long, num_args = 2, value_names = ["T0", "T1"], allow_negative_numbers = true, required = true)]
    pub interval: Vec<f64>,
    #[arg(long, default_value_t = killsub::hopf::DEFAULT_SAMPLES)]
    pub samples: usize,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, value_enum)]
    pub expect: Option<Expect>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Replace every tolerance of the suite.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Only run criteria whose name contains NAME.
    #[arg(long, value_name = "NAME")]
    pub only: Option<String>,
    #[arg(long, default_value_t = killsub::verify::DEFAULT_SEED)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code().clamp(0, 255) as u8);
        }
    };
    match commands::run(&cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
