//! Damped Newton iteration and the Poisson initializer.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::linalg::{dirichlet_laplacian, sparse_linear_solve};
use crate::operators::{max_norm, GridFunction, Scheme};
use crate::problems::Problem;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Stop once the residual max-norm is at or below this value.
    pub residual_tol: f64,
    pub max_iter: usize,
    /// Step length multiplier applied after a rejected trial step.
    pub backtrack: f64,
    pub min_step: f64,
    /// Relative residual required of each linear solve.
    pub linear_tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            residual_tol: 1e-8,
            max_iter: 50,
            backtrack: 0.5,
            min_step: 2f64.powi(-20),
            linear_tol: 1e-10,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.residual_tol > 0.0) {
            return Err(Error::Config(format!(
                "residual tolerance must be positive, got {}",
                self.residual_tol
            )));
        }
        if self.max_iter < 1 {
            return Err(Error::Config("max_iter must be at least 1".into()));
        }
        if !(self.backtrack > 0.0 && self.backtrack < 1.0) {
            return Err(Error::Config(format!(
                "backtracking factor must lie in (0, 1), got {}",
                self.backtrack
            )));
        }
        if !(self.min_step > 0.0 && self.min_step <= 1.0) {
            return Err(Error::Config(format!(
                "minimum step must lie in (0, 1], got {}",
                self.min_step
            )));
        }
        if !(self.linear_tol > 0.0) {
            return Err(Error::Config(format!(
                "linear tolerance must be positive, got {}",
                self.linear_tol
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Converged,
    MaxIterations,
    /// No step length down to `min_step` reduced the residual.
    LineSearchStalled,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub iterations: usize,
    /// Residual max-norm at the start and after every accepted step.
    pub residual_history: Vec<f64>,
    /// Step lengths of the accepted steps.
    pub step_lengths: Vec<f64>,
    pub wall_time: f64,
    pub converged: bool,
    pub termination: Termination,
}

impl SolveReport {
    pub fn final_residual(&self) -> f64 {
        *self.residual_history.last().expect("history is never empty")
    }
}

/// Newton's method with backtracking on the residual max-norm. A trial step is
/// accepted when it does not increase the max-norm.
pub fn newton_solve<S: Scheme + ?Sized>(
    scheme: &S,
    u0: &[f64],
    config: &SolverConfig,
) -> Result<(GridFunction, SolveReport)> {
    config.validate()?;
    if u0.len() != scheme.len() {
        return Err(Error::LengthMismatch {
            expected: scheme.len(),
            actual: u0.len(),
        });
    }
    let start = Instant::now();
    let mut u = u0.to_vec();
    let mut residual = scheme.residual(&u);
    let mut norm = max_norm(&residual);
    if !norm.is_finite() {
        return Err(Error::NonFinite { iteration: 0 });
    }
    let mut history = vec![norm];
    let mut steps = Vec::new();
    let mut termination = Termination::MaxIterations;

    for _ in 0..config.max_iter {
        if norm <= config.residual_tol {
            termination = Termination::Converged;
            break;
        }
        let ev = scheme.eval(&u);
        let rhs: Vec<f64> = ev.residual.iter().map(|r| -r).collect();
        let step = sparse_linear_solve(&ev.jacobian, &rhs, config.linear_tol)?;

        let mut lambda = 1.0;
        let accepted = loop {
            let trial: Vec<f64> = u.iter().zip(&step).map(|(x, s)| x + lambda * s).collect();
            let r = scheme.residual(&trial);
            let n = max_norm(&r);
            if n.is_finite() && n <= norm {
                break Some((trial, r, n));
            }
            lambda *= config.backtrack;
            if lambda < config.min_step {
                break None;
            }
        };
        match accepted {
            Some((trial, r, n)) => {
                u = trial;
                residual = r;
                norm = n;
                history.push(norm);
                steps.push(lambda);
            }
            None => {
                termination = Termination::LineSearchStalled;
                break;
            }
        }
    }
    if norm <= config.residual_tol {
        termination = Termination::Converged;
    }
    debug_assert_eq!(residual.len(), u.len());
    let report = SolveReport {
        iterations: steps.len(),
        residual_history: history,
        step_lengths: steps,
        wall_time: start.elapsed().as_secs_f64(),
        converged: termination == Termination::Converged,
        termination,
    };
    Ok((GridFunction::new(u), report))
}

/// Convex starting guess: the discrete Poisson problem `Lap u = 2 sqrt(f)` with
/// Dirichlet data `g`. A function with equal Hessian eigenvalues has
/// `det D2u = (Lap u)^2 / 4`, so this source matches `f` at umbilic points.
pub fn initial_guess(problem: &Problem, grid: &Grid, linear_tol: f64) -> Result<GridFunction> {
    let source = problem.sample_source(grid);
    let boundary = problem.sample_boundary(grid);
    let rhs: Vec<f64> = (0..grid.len())
        .map(|k| {
            if grid.is_boundary(k) {
                boundary[k]
            } else {
                2.0 * source[k].max(0.0).sqrt()
            }
        })
        .collect();
    let u = sparse_linear_solve(&dirichlet_laplacian(grid), &rhs, linear_tol)?;
    Ok(GridFunction::new(u))
}
