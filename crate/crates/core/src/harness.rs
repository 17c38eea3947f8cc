//! Single runs, convergence studies and machine-readable reports.

use std::fmt;
use std::fs::File;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::eikonal::eikonal_filtered_solve;
use crate::error::{Error, Result};
use crate::filter::{epsilon_rule, BranchFractions, FilterParams, FilteredScheme, JacobianMode};
use crate::grid::{DirectionSet, Grid};
use crate::operators::{max_abs_diff, GridFunction, MonotoneParams, MonotoneScheme, Scheme, StandardScheme};
use crate::problems::{make_example_for_stencil, ConeMass, Example};
use crate::solver::{initial_guess, newton_solve, SolveReport, SolverConfig, Termination};

/// Problems selectable from the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExampleName {
    C2,
    C1,
    Blowup,
    Cone,
    Eikonal1d,
}

impl ExampleName {
    pub fn as_str(self) -> &'static str {
        match self {
            ExampleName::C2 => "c2",
            ExampleName::C1 => "c1",
            ExampleName::Blowup => "blowup",
            ExampleName::Cone => "cone",
            ExampleName::Eikonal1d => "eikonal1d",
        }
    }

    pub fn two_dimensional(self) -> Option<Example> {
        match self {
            ExampleName::C2 => Some(Example::C2),
            ExampleName::C1 => Some(Example::C1),
            ExampleName::Blowup => Some(Example::Blowup),
            ExampleName::Cone => Some(Example::Cone),
            ExampleName::Eikonal1d => None,
        }
    }
}

impl From<Example> for ExampleName {
    fn from(e: Example) -> Self {
        match e {
            Example::C2 => ExampleName::C2,
            Example::C1 => ExampleName::C1,
            Example::Blowup => ExampleName::Blowup,
            Example::Cone => ExampleName::Cone,
        }
    }
}

impl fmt::Display for ExampleName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExampleName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "eikonal1d" {
            return Ok(ExampleName::Eikonal1d);
        }
        s.parse::<Example>().map(Into::into).map_err(|_| {
            Error::Config(format!(
                "unknown example '{s}' (expected c2, c1, blowup, cone or eikonal1d)"
            ))
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SchemeKind {
    Monotone,
    Filtered,
}

impl SchemeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SchemeKind::Monotone => "monotone",
            SchemeKind::Filtered => "filtered",
        }
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SchemeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "monotone" => Ok(SchemeKind::Monotone),
            "filtered" => Ok(SchemeKind::Filtered),
            other => Err(Error::Config(format!("unknown scheme '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            other => Err(Error::Config(format!("unknown output format '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub example: ExampleName,
    pub n: usize,
    pub width: u32,
    pub scheme: SchemeKind,
    /// Overrides the `sqrt(h) + dtheta/10` filter scale.
    pub epsilon: Option<f64>,
    pub delta: f64,
    pub jacobian: JacobianMode,
    /// Center value of the cone's source; ignored by the other examples.
    pub cone_mass: ConeMass,
    pub solver: SolverConfig,
}

impl RunConfig {
    pub fn new(example: ExampleName, n: usize, width: u32, scheme: SchemeKind) -> Self {
        RunConfig {
            example,
            n,
            width,
            scheme,
            epsilon: None,
            delta: MonotoneParams::DEFAULT_DELTA,
            jacobian: JacobianMode::Modified,
            cone_mass: ConeMass::default(),
            solver: SolverConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.solver.validate()?;
        if let Some(e) = self.epsilon {
            FilterParams::new(e)?;
        }
        MonotoneParams::new(self.delta)?;
        match self.example {
            ExampleName::Eikonal1d => {
                if self.n < 5 || self.n.is_multiple_of(2) {
                    return Err(Error::Config(format!("eikonal1d needs an odd n >= 5, got {}", self.n)));
                }
            }
            ExampleName::Cone if self.n.is_multiple_of(2) => {
                return Err(Error::Config(format!("cone example needs an odd n, got {}", self.n)));
            }
            _ => {}
        }
        if self.example != ExampleName::Eikonal1d {
            Grid::new(self.n)?;
            DirectionSet::new(self.width)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub config: RunConfig,
    pub h: f64,
    pub dtheta: Option<f64>,
    pub epsilon: Option<f64>,
    pub max_error: Option<f64>,
    pub iterations: usize,
    pub wall_time: f64,
    pub residual_norm: f64,
    pub converged: bool,
    pub termination: Termination,
    pub residual_history: Vec<f64>,
    pub step_lengths: Vec<f64>,
    /// Branch shares over interior nodes at the final iterate (filtered runs).
    pub filter: Option<BranchFractions>,
}

/// A finished run: the report plus the computed solution.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub report: RunReport,
    pub grid: Option<Grid>,
    pub solution: Vec<f64>,
}

/// Builds the problem and scheme described by `config`, solves it and measures
/// the error against the exact solution when one is known.
pub fn solve_single(config: &RunConfig) -> Result<RunOutput> {
    config.validate()?;
    let Some(example) = config.example.two_dimensional() else {
        return solve_eikonal(config);
    };
    let grid = Grid::new(config.n)?;
    let dirs = DirectionSet::new(config.width)?;
    let problem = make_example_for_stencil(example, &grid, &dirs, config.cone_mass)?;
    let params = MonotoneParams::new(config.delta)?;
    let monotone = MonotoneScheme::new(&grid, &dirs, &problem, params);
    let u0 = initial_guess(&problem, &grid, config.solver.linear_tol)?;

    let (u, solve, epsilon, filter) = match config.scheme {
        SchemeKind::Monotone => {
            let (u, rep) = newton_solve(&monotone, &u0, &config.solver)?;
            (u, rep, None, None)
        }
        SchemeKind::Filtered => {
            let eps = config.epsilon.unwrap_or_else(|| epsilon_rule(grid.h(), dirs.dtheta()));
            let params = FilterParams::new(eps)?.with_jacobian(config.jacobian);
            let scheme = FilteredScheme::new(monotone, StandardScheme::new(&grid, &problem), params)?;
            let (u, rep) = newton_solve(&scheme, &u0, &config.solver)?;
            let args = scheme.arguments(&u);
            let fractions = BranchFractions::from_arguments(grid.interior_nodes().map(|k| args[k]));
            (u, rep, Some(eps), Some(fractions))
        }
    };
    let max_error = problem.sample_exact(&grid).map(|exact| u.max_abs_diff(&exact));
    Ok(RunOutput {
        report: report(
            config,
            grid.h(),
            Some(dirs.dtheta()),
            epsilon,
            max_error,
            &solve,
            filter,
        ),
        grid: Some(grid),
        solution: u.into_vec(),
    })
}

fn solve_eikonal(config: &RunConfig) -> Result<RunOutput> {
    let sol = eikonal_filtered_solve(config.n)?;
    let h = 2.0 / (config.n - 1) as f64;
    let fractions = BranchFractions::from_arguments(sol.filter_arguments());
    let rep = RunReport {
        config: *config,
        h,
        dtheta: None,
        epsilon: Some(h),
        max_error: Some(sol.max_error),
        iterations: sol.iterations,
        wall_time: 0.0,
        residual_norm: sol.residual_norm,
        converged: true,
        termination: Termination::Converged,
        residual_history: vec![sol.residual_norm],
        step_lengths: Vec::new(),
        filter: Some(fractions),
    };
    Ok(RunOutput {
        report: rep,
        grid: None,
        solution: sol.u,
    })
}

fn report(
    config: &RunConfig,
    h: f64,
    dtheta: Option<f64>,
    epsilon: Option<f64>,
    max_error: Option<f64>,
    solve: &SolveReport,
    filter: Option<BranchFractions>,
) -> RunReport {
    RunReport {
        config: *config,
        h,
        dtheta,
        epsilon,
        max_error,
        iterations: solve.iterations,
        wall_time: solve.wall_time,
        residual_norm: solve.final_residual(),
        converged: solve.converged,
        termination: solve.termination,
        residual_history: solve.residual_history.clone(),
        step_lengths: solve.step_lengths.clone(),
        filter,
    }
}

/// Runs one configuration and returns its report.
pub fn run_single(config: &RunConfig) -> Result<RunReport> {
    solve_single(config).map(|out| out.report)
}

/// One row of a convergence table. Column order is fixed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyRow {
    pub example: ExampleName,
    pub scheme: SchemeKind,
    pub width: u32,
    pub n: usize,
    pub h: f64,
    pub dtheta: Option<f64>,
    pub epsilon: Option<f64>,
    pub max_error: Option<f64>,
    pub iterations: Option<usize>,
    pub wall_time: Option<f64>,
    pub converged: bool,
    /// Observed order against the previous row of the same scheme and width,
    /// when the grid was refined by a factor of two.
    pub order: Option<f64>,
    pub error: Option<String>,
}

impl StudyRow {
    fn from_report(rep: &RunReport) -> Self {
        StudyRow {
            example: rep.config.example,
            scheme: rep.config.scheme,
            width: rep.config.width,
            n: rep.config.n,
            h: rep.h,
            dtheta: rep.dtheta,
            epsilon: rep.epsilon,
            max_error: rep.max_error,
            iterations: Some(rep.iterations),
            wall_time: Some(rep.wall_time),
            converged: rep.converged,
            order: None,
            error: None,
        }
    }

    fn failed(config: &RunConfig, err: &Error) -> Self {
        StudyRow {
            example: config.example,
            scheme: config.scheme,
            width: config.width,
            n: config.n,
            h: 1.0 / (config.n.max(2) - 1) as f64,
            dtheta: DirectionSet::new(config.width).ok().map(|d| d.dtheta()),
            epsilon: None,
            max_error: None,
            iterations: None,
            wall_time: None,
            converged: false,
            order: None,
            error: Some(err.to_string()),
        }
    }
}

/// True when going from `n` to `m` nodes halves the spacing of the benchmark
/// sequence 31, 63, 127, 255 (`m = 2n + 1`) or of an exact halving (`m = 2n - 1`).
pub fn is_refinement_pair(n: usize, m: usize) -> bool {
    m == 2 * n + 1 || m + 1 == 2 * n
}

/// Observed order `ln(e1/e2) / ln(h1/h2)`; equals `log2(e1/e2)` for an exact halving.
pub fn observed_order(e1: f64, h1: f64, e2: f64, h2: f64) -> f64 {
    (e1 / e2).ln() / (h1 / h2).ln()
}

/// Runs the cross product of schemes, widths and grid sizes for one example.
/// Rows are ordered by scheme, then width, then `n`, whatever order they finish in.
pub fn convergence_study(
    example: ExampleName,
    widths: &[u32],
    ns: &[usize],
    schemes: &[SchemeKind],
    base: &RunConfig,
) -> Vec<StudyRow> {
    let configs: Vec<RunConfig> = schemes
        .iter()
        .flat_map(|&scheme| {
            widths.iter().flat_map(move |&width| {
                ns.iter().map(move |&n| RunConfig {
                    example,
                    n,
                    width,
                    scheme,
                    ..*base
                })
            })
        })
        .collect();
    let mut rows: Vec<StudyRow> = configs
        .par_iter()
        .map(|c| match run_single(c) {
            Ok(rep) => StudyRow::from_report(&rep),
            Err(e) => StudyRow::failed(c, &e),
        })
        .collect();
    fill_orders(&mut rows);
    rows
}

fn fill_orders(rows: &mut [StudyRow]) {
    for k in 1..rows.len() {
        let (prev, cur) = (&rows[k - 1], &rows[k]);
        if prev.scheme != cur.scheme || prev.width != cur.width || !is_refinement_pair(prev.n, cur.n) {
            continue;
        }
        if let (Some(e1), Some(e2)) = (prev.max_error, cur.max_error) {
            if e1 > 0.0 && e2 > 0.0 {
                rows[k].order = Some(observed_order(e1, prev.h, e2, cur.h));
            }
        }
    }
}

const STUDY_HEADER: [&str; 13] = [
    "example",
    "scheme",
    "width",
    "n",
    "h",
    "dtheta",
    "epsilon",
    "max_error",
    "iterations",
    "wall_time",
    "converged",
    "order",
    "error",
];

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(ToString::to_string).unwrap_or_default()
}

/// Writes study rows as CSV with a fixed header.
pub fn write_study_csv<W: Write>(rows: &[StudyRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(STUDY_HEADER)?;
    for r in rows {
        w.write_record([
            r.example.to_string(),
            r.scheme.to_string(),
            r.width.to_string(),
            r.n.to_string(),
            r.h.to_string(),
            opt(&r.dtheta),
            opt(&r.epsilon),
            opt(&r.max_error),
            opt(&r.iterations),
            opt(&r.wall_time),
            r.converged.to_string(),
            opt(&r.order),
            r.error.clone().unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// JSON document for a study.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StudyReport {
    pub rows: Vec<StudyRow>,
}

pub fn write_study(rows: &[StudyRow], path: &Path, format: OutputFormat) -> Result<()> {
    let file = File::create(path)?;
    match format {
        OutputFormat::Csv => write_study_csv(rows, file),
        OutputFormat::Json => {
            serde_json::to_writer_pretty(file, &StudyReport { rows: rows.to_vec() })?;
            Ok(())
        }
    }
}

pub fn write_report(report: &RunReport, path: &Path, format: OutputFormat) -> Result<()> {
    let file = File::create(path)?;
    match format {
        OutputFormat::Csv => write_study_csv(&[StudyRow::from_report(report)], file),
        OutputFormat::Json => {
            serde_json::to_writer_pretty(file, report)?;
            Ok(())
        }
    }
}

/// Writes `x,y,u,gx,gy` rows, one per node, with centered-difference gradients
/// at interior nodes and empty gradient fields on the boundary. Floats use the
/// shortest representation that parses back to the same value.
pub fn write_solution_csv<W: Write>(u: &[f64], grid: &Grid, out: W) -> Result<()> {
    if u.len() != grid.len() {
        return Err(Error::LengthMismatch {
            expected: grid.len(),
            actual: u.len(),
        });
    }
    let n = grid.n();
    let two_h = 2.0 * grid.h();
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x", "y", "u", "gx", "gy"])?;
    for k in 0..grid.len() {
        let (x, y) = grid.xy(k);
        let (gx, gy) = if grid.is_interior(k) {
            (
                ((u[k + 1] - u[k - 1]) / two_h).to_string(),
                ((u[k + n] - u[k - n]) / two_h).to_string(),
            )
        } else {
            (String::new(), String::new())
        };
        w.write_record([x.to_string(), y.to_string(), u[k].to_string(), gx, gy])?;
    }
    w.flush()?;
    Ok(())
}

pub fn emit_solution(u: &[f64], grid: &Grid, path: &Path) -> Result<()> {
    write_solution_csv(u, grid, File::create(path)?)
}

/// Reads back the `u` column of a solution file.
pub fn read_solution_csv<R: std::io::Read>(input: R) -> Result<Vec<f64>> {
    let mut r = csv::Reader::from_reader(input);
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let v = rec
            .get(2)
            .ok_or_else(|| Error::Config("solution row without a u column".into()))?;
        out.push(
            v.parse::<f64>()
                .map_err(|e| Error::Config(format!("bad value '{v}': {e}")))?,
        );
    }
    Ok(out)
}

/// Error between a solution and the exact one at every node.
pub fn max_error(u: &[f64], exact: &[f64]) -> f64 {
    max_abs_diff(u, exact)
}

/// Max-norm of a grid function's residual under an arbitrary scheme.
pub fn residual_norm<S: Scheme + ?Sized>(scheme: &S, u: &GridFunction) -> f64 {
    crate::operators::max_norm(&scheme.residual(u))
}
