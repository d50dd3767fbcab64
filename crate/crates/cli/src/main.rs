use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ndhermite::{WindowAnchor, WindowBoundary};

mod commands;
mod io;

use io::CliError;

/// Multivariate Hermite interpolation on rectilinear grids.
#[derive(Parser, Debug)]
#[command(name = "ndhermite", version, about)]
struct Cli {
    /// Worker threads for batch evaluation (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build the global interpolant of an HGRID file and check it against its data.
    Build(BuildArgs),
    /// Evaluate an interpolant (global or spline) at CSV points.
    Eval(EvalArgs),
    /// Sample an interpolant along a plane through a 3D grid.
    Resample(ResampleArgs),
    /// Cascaded division of a polynomial by the grid's axis annihilators.
    Divide(DivideArgs),
    /// Check interpolation conditions or spline continuity.
    Verify(VerifyArgs),
    /// RMSE of an interpolant against an analytic test function.
    Compare(CompareArgs),
}

#[derive(Args, Debug, Clone)]
pub struct WindowOpts {
    /// Spline window sizes, one per axis; without it the global interpolant is used.
    #[arg(long, value_delimiter = ',')]
    window: Option<Vec<usize>>,
    /// Centring of odd windows: round (nearest node) or floor (node at or below).
    #[arg(long, default_value = "round")]
    odd_anchor: WindowAnchor,
    /// Window handling at the grid edges: clamp or truncate.
    #[arg(long, default_value = "clamp")]
    boundary: WindowBoundary,
}

#[derive(Args, Debug)]
pub struct BuildArgs {
    /// HGRID JSON input.
    grid: PathBuf,
    /// Use exact rational arithmetic.
    #[arg(long)]
    exact: bool,
    /// Write the factored interpolant JSON here.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Include the expanded polynomial in the output.
    #[arg(long)]
    expanded: bool,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    /// HGRID JSON input.
    grid: PathBuf,
    /// CSV of query points with header x1,...,xn.
    points: PathBuf,
    #[arg(long)]
    exact: bool,
    #[command(flatten)]
    window: WindowOpts,
    /// Extra derivative column, e.g. `--deriv 1,0`; repeatable.
    #[arg(long)]
    deriv: Vec<String>,
    /// Drop points outside the grid instead of flagging them.
    #[arg(long)]
    skip_outside: bool,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SourceOpts {
    /// HGRID JSON input.
    #[arg(long, conflicts_with = "function")]
    grid: Option<PathBuf>,
    /// Built-in name (exp2d, gauss2d, gauss3d, sinmix3d) or expression in x1..xn.
    #[arg(long)]
    function: Option<String>,
    /// Axis ranges `lo:hi` (one per axis) for `--function`.
    #[arg(long, value_delimiter = ',')]
    axes: Option<Vec<String>>,
    /// Grid spacing for `--function`.
    #[arg(long)]
    grid_step: Option<f64>,
    /// Multiplicity per axis for `--function`.
    #[arg(long, value_delimiter = ',')]
    mult: Option<Vec<u32>>,
}

#[derive(Args, Debug)]
pub struct ResampleArgs {
    #[command(flatten)]
    source: SourceOpts,
    #[command(flatten)]
    window: WindowOpts,
    /// A point on the plane.
    #[arg(long, value_delimiter = ',', default_value = "10.5,10.5,10.5")]
    point: Vec<f64>,
    /// Unit normal of the plane.
    #[arg(long, value_delimiter = ',', default_value = "0.7071067811865476,0,0.7071067811865476")]
    normal: Vec<f64>,
    /// x1 parameter range `lo:hi`.
    #[arg(long, default_value = "1:18")]
    x1: String,
    /// x2 parameter range `lo:hi`.
    #[arg(long, default_value = "1:18")]
    x2: String,
    /// Spacing of the plane lattice.
    #[arg(long, default_value_t = 0.1)]
    step: f64,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct DivideArgs {
    /// Polynomial JSON `{"n", "terms": [{"e", "c"}]}`.
    poly: PathBuf,
    /// Grid JSON (axes and mult; point data is ignored).
    grid: PathBuf,
    #[arg(long)]
    exact: bool,
    /// Division order as a permutation of 1..n.
    #[arg(long, value_delimiter = ',')]
    order: Option<Vec<usize>>,
    /// Print the Groebner basis of the grid ideal instead of dividing.
    #[arg(long)]
    groebner: bool,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// HGRID JSON input.
    grid: PathBuf,
    #[arg(long)]
    exact: bool,
    /// Check spline continuity at every shared node instead of the global conditions.
    #[arg(long, requires = "window")]
    continuity: bool,
    #[command(flatten)]
    window: WindowOpts,
    /// Random probes per shared node.
    #[arg(long, default_value_t = 16)]
    probes: usize,
    /// Highest cross-axis derivative order to report (default: ν − 1 at the node).
    #[arg(long)]
    orders: Option<u32>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CompareArgs {
    #[command(flatten)]
    source: SourceOpts,
    #[command(flatten)]
    window: WindowOpts,
    /// Sample lattice counts per axis (default: the function's preset).
    #[arg(long, value_delimiter = ',')]
    lattice: Option<Vec<usize>>,
    /// Sample the oblique plane instead of a volume lattice (3D only).
    #[arg(long)]
    plane: bool,
    /// Also report the multilinear baseline on the same grid.
    #[arg(long)]
    baseline: bool,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::input(format!("cannot configure {n} threads: {e}")))?;
    }
    match cli.command {
        Command::Build(a) => commands::build(a),
        Command::Eval(a) => commands::eval(a),
        Command::Resample(a) => commands::resample(a),
        Command::Divide(a) => commands::divide(a),
        Command::Verify(a) => commands::verify(a),
        Command::Compare(a) => commands::compare(a),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
