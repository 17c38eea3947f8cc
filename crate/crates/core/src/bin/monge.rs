use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use monge_core::filter::JacobianMode;
use monge_core::harness::{
    convergence_study, emit_solution, solve_single, write_report, write_study, ExampleName, OutputFormat, RunConfig,
    SchemeKind,
};
use monge_core::Error;

/// Environment variable that caps the number of worker threads.
const THREADS_ENV: &str = "MONGE_THREADS";

#[derive(Parser)]
#[command(name = "monge", version, about = "Monotone and filtered Monge-Ampere solvers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Clone)]
struct SolverArgs {
    /// Overrides the filter scale sqrt(h) + dtheta/10.
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long, default_value_t = 1e-9)]
    delta: f64,
    /// Residual max-norm stopping tolerance.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, default_value_t = 50)]
    max_iter: usize,
    /// Use the exact filtered Jacobian instead of the modified one.
    #[arg(long)]
    exact_jacobian: bool,
    /// Center value of the cone source: stencil or ball.
    #[arg(long, default_value = "stencil")]
    cone_mass: String,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one problem and write its report.
    Solve {
        #[arg(long)]
        example: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        width: u32,
        #[arg(long, default_value = "filtered")]
        scheme: String,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "json")]
        format: String,
        /// Also write the solution as x,y,u,gx,gy CSV.
        #[arg(long)]
        solution: Option<PathBuf>,
    },
    /// Run a convergence study over stencil widths, grid sizes and schemes.
    Study {
        #[arg(long)]
        example: String,
        #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
        widths: Vec<u32>,
        /// Comma-separated grid sizes; an empty list gives an empty table.
        #[arg(long, default_value = "31,63,127,255,361")]
        ns: String,
        #[arg(long, value_delimiter = ',', default_value = "monotone,filtered")]
        schemes: Vec<String>,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long)]
        out: PathBuf,
        /// Output format; defaults to the extension of --out (json or csv).
        #[arg(long)]
        format: Option<String>,
    },
}

fn base_config(
    example: ExampleName,
    n: usize,
    width: u32,
    scheme: SchemeKind,
    args: &SolverArgs,
) -> Result<RunConfig, Error> {
    let mut c = RunConfig::new(example, n, width, scheme);
    c.cone_mass = args.cone_mass.parse()?;
    c.epsilon = args.epsilon;
    c.delta = args.delta;
    c.solver.residual_tol = args.tol;
    c.solver.max_iter = args.max_iter;
    if args.exact_jacobian {
        c.jacobian = JacobianMode::Exact;
    }
    Ok(c)
}

fn parse_list(text: &str) -> Result<Vec<usize>, Error> {
    text.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse()
                .map_err(|_| Error::Config(format!("'{t}' is not a grid size")))
        })
        .collect()
}

fn format_for(path: &std::path::Path, explicit: Option<&str>) -> Result<OutputFormat, Error> {
    match explicit {
        Some(f) => f.parse(),
        None => Ok(match path.extension().and_then(|e| e.to_str()) {
            Some("csv") => OutputFormat::Csv,
            _ => OutputFormat::Json,
        }),
    }
}

/// Outcome of a command: success, or a failure with its exit code.
enum Failure {
    Config(Error),
    Solver(String),
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Solve {
            example,
            n,
            width,
            scheme,
            solver,
            out,
            format,
            solution,
        } => {
            let example: ExampleName = example.parse().map_err(Failure::Config)?;
            let scheme: SchemeKind = scheme.parse().map_err(Failure::Config)?;
            let format: OutputFormat = format.parse().map_err(Failure::Config)?;
            let config = base_config(example, n, width, scheme, &solver).map_err(Failure::Config)?;
            config.validate().map_err(Failure::Config)?;
            let output = solve_single(&config).map_err(|e| {
                if e.is_config() {
                    Failure::Config(e)
                } else {
                    Failure::Solver(e.to_string())
                }
            })?;
            write_report(&output.report, &out, format).map_err(|e| Failure::Solver(e.to_string()))?;
            if let (Some(path), Some(grid)) = (solution, output.grid.as_ref()) {
                emit_solution(&output.solution, grid, &path).map_err(|e| Failure::Solver(e.to_string()))?;
            }
            if !output.report.converged {
                return Err(Failure::Solver(format!(
                    "Newton stopped ({:?}) at residual {:.3e}",
                    output.report.termination, output.report.residual_norm
                )));
            }
            Ok(())
        }
        Command::Study {
            example,
            widths,
            ns,
            schemes,
            solver,
            out,
            format,
        } => {
            let example: ExampleName = example.parse().map_err(Failure::Config)?;
            let schemes = schemes
                .iter()
                .map(|s| s.parse::<SchemeKind>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(Failure::Config)?;
            let format = format_for(&out, format.as_deref()).map_err(Failure::Config)?;
            let ns = parse_list(&ns).map_err(Failure::Config)?;
            let base = base_config(example, 31, 2, SchemeKind::Filtered, &solver).map_err(Failure::Config)?;
            base.solver.validate().map_err(Failure::Config)?;
            let rows = convergence_study(example, &widths, &ns, &schemes, &base);
            write_study(&rows, &out, format).map_err(|e| Failure::Solver(e.to_string()))?;
            Ok(())
        }
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var(THREADS_ENV).ok().and_then(|v| v.parse::<usize>().ok()) {
        // Fails only if a pool already exists, which cannot happen this early.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(e)) => {
            println!("{}", json!({ "error": "config", "message": e.to_string() }));
            ExitCode::from(2)
        }
        Err(Failure::Solver(msg)) => {
            println!("{}", json!({ "error": "solver", "message": msg }));
            ExitCode::from(1)
        }
    }
}
