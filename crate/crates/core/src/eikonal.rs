//! One-dimensional model problem `|u'| = 1` on `[-1, 1]` with `u(+-1) = 1`.
//!
//! Its viscosity solution is `|x|`. The upwind scheme is monotone and first
//! order, the centered scheme is second order but admits spurious solutions;
//! the filtered combination switches between them with scale `h`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filter::{filter_s, filter_s_prime};
use crate::operators::{max_abs_diff, Scheme, SchemeEval};
use crate::solver::{newton_solve, SolverConfig};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Eikonal1DProblem {
    n: usize,
    h: f64,
}

impl Eikonal1DProblem {
    pub fn new(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::Config(format!("need at least 3 nodes, got {n}")));
        }
        Ok(Eikonal1DProblem {
            n,
            h: 2.0 / (n - 1) as f64,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn x(&self, i: usize) -> f64 {
        -1.0 + 2.0 * i as f64 / (self.n - 1) as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.x(i)).collect()
    }

    pub fn exact(&self) -> Vec<f64> {
        self.nodes().into_iter().map(f64::abs).collect()
    }
}

const BOUNDARY_VALUE: f64 = 1.0;

/// Upwind residual `max((u+ - u)/h, (u- - u)/h) - 1`; boundary rows `u - 1`.
pub fn eikonal_monotone(u: &[f64], h: f64) -> Vec<f64> {
    residual(u, |i| upwind(u, i, h))
}

/// Centered residual `|u+ - u-| / (2h) - 1`; boundary rows `u - 1`.
pub fn eikonal_accurate(u: &[f64], h: f64) -> Vec<f64> {
    residual(u, |i| centered(u, i, h))
}

/// Filtered residual `F_M + h S((F_A - F_M) / h)`.
pub fn eikonal_filtered(u: &[f64], h: f64) -> Vec<f64> {
    residual(u, |i| {
        let m = upwind(u, i, h);
        let a = centered(u, i, h);
        m + h * filter_s((a - m) / h)
    })
}

fn residual(u: &[f64], interior: impl Fn(usize) -> f64) -> Vec<f64> {
    let n = u.len();
    (0..n)
        .map(|i| {
            if i == 0 || i == n - 1 {
                u[i] - BOUNDARY_VALUE
            } else {
                interior(i)
            }
        })
        .collect()
}

#[inline]
fn upwind(u: &[f64], i: usize, h: f64) -> f64 {
    ((u[i + 1] - u[i]) / h).max((u[i - 1] - u[i]) / h) - 1.0
}

#[inline]
fn centered(u: &[f64], i: usize, h: f64) -> f64 {
    (u[i + 1] - u[i - 1]).abs() / (2.0 * h) - 1.0
}

/// Which 1D discretization to drive with Newton's method.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EikonalScheme {
    Monotone,
    Accurate,
    Filtered,
}

/// A 1D scheme on a fixed grid, usable with [`newton_solve`].
#[derive(Debug, Clone, Copy)]
pub struct Eikonal1D {
    pub problem: Eikonal1DProblem,
    pub scheme: EikonalScheme,
}

impl Eikonal1D {
    fn upwind_row(&self, u: &[f64], i: usize, scale: f64, jac: &mut Vec<(usize, usize, f64)>) {
        let h = self.problem.h;
        let nb = if u[i + 1] >= u[i - 1] { i + 1 } else { i - 1 };
        jac.push((i, nb, scale / h));
        jac.push((i, i, -scale / h));
    }

    fn centered_row(&self, u: &[f64], i: usize, scale: f64, jac: &mut Vec<(usize, usize, f64)>) {
        let h = self.problem.h;
        let s = if u[i + 1] >= u[i - 1] { 1.0 } else { -1.0 };
        jac.push((i, i + 1, scale * s / (2.0 * h)));
        jac.push((i, i - 1, -scale * s / (2.0 * h)));
    }
}

impl Scheme for Eikonal1D {
    fn len(&self) -> usize {
        self.problem.n
    }

    fn residual(&self, u: &[f64]) -> Vec<f64> {
        let h = self.problem.h;
        match self.scheme {
            EikonalScheme::Monotone => eikonal_monotone(u, h),
            EikonalScheme::Accurate => eikonal_accurate(u, h),
            EikonalScheme::Filtered => eikonal_filtered(u, h),
        }
    }

    fn eval(&self, u: &[f64]) -> SchemeEval {
        let h = self.problem.h;
        let n = u.len();
        let mut jac = Vec::with_capacity(4 * n);
        jac.push((0, 0, 1.0));
        jac.push((n - 1, n - 1, 1.0));
        for i in 1..n - 1 {
            match self.scheme {
                EikonalScheme::Monotone => self.upwind_row(u, i, 1.0, &mut jac),
                EikonalScheme::Accurate => self.centered_row(u, i, 1.0, &mut jac),
                EikonalScheme::Filtered => {
                    let arg = (centered(u, i, h) - upwind(u, i, h)) / h;
                    let sp = filter_s_prime(arg);
                    if sp != 1.0 {
                        self.upwind_row(u, i, 1.0 - sp, &mut jac);
                    }
                    if sp > 0.0 {
                        self.centered_row(u, i, sp, &mut jac);
                    }
                }
            }
        }
        SchemeEval {
            residual: self.residual(u),
            jacobian: jac,
        }
    }
}

/// Fixed-point sweeps on the explicit upwind form `u = max(u+, u-) - h`,
/// started from the boundary value. Converges to the discrete monotone solution.
pub fn eikonal_fixed_point(problem: &Eikonal1DProblem, max_sweeps: usize) -> Result<Vec<f64>> {
    let n = problem.n;
    let h = problem.h;
    let mut u = vec![BOUNDARY_VALUE; n];
    for _ in 0..max_sweeps {
        let mut change: f64 = 0.0;
        let order: Vec<usize> = (1..n - 1).chain((1..n - 1).rev()).collect();
        for i in order {
            let v = u[i + 1].max(u[i - 1]) - h;
            let v = v.min(u[i]);
            change = change.max((v - u[i]).abs());
            u[i] = v;
        }
        if change == 0.0 {
            return Ok(u);
        }
    }
    Err(Error::NotConverged(format!(
        "upwind fixed point not reached in {max_sweeps} sweeps"
    )))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EikonalSolution {
    pub x: Vec<f64>,
    pub u: Vec<f64>,
    pub max_error: f64,
    pub iterations: usize,
    pub residual_norm: f64,
    /// True when Newton failed and the upwind fixed point was used to restart it.
    pub used_fallback: bool,
}

impl EikonalSolution {
    /// Max error against `|x|` over nodes with `|x| >= cutoff`.
    pub fn error_away_from_kink(&self, cutoff: f64) -> f64 {
        self.x
            .iter()
            .zip(&self.u)
            .filter(|(x, _)| x.abs() >= cutoff)
            .map(|(x, u)| (u - x.abs()).abs())
            .fold(0.0, f64::max)
    }

    /// Fraction of interior nodes where the filter selects each branch.
    pub fn filter_arguments(&self) -> Vec<f64> {
        let n = self.u.len();
        let h = 2.0 / (n - 1) as f64;
        (1..n - 1)
            .map(|i| (centered(&self.u, i, h) - upwind(&self.u, i, h)) / h)
            .collect()
    }
}

/// Solves the filtered 1D scheme with Newton's method, starting from the
/// convex guess `x^2`. If Newton fails, it is restarted from the upwind fixed
/// point.
pub fn eikonal_filtered_solve(n: usize) -> Result<EikonalSolution> {
    if n < 5 || n.is_multiple_of(2) {
        return Err(Error::Config(format!(
            "1D eikonal demo needs an odd node count >= 5, got {n}"
        )));
    }
    let problem = Eikonal1DProblem::new(n)?;
    let scheme = Eikonal1D {
        problem,
        scheme: EikonalScheme::Filtered,
    };
    let config = SolverConfig {
        residual_tol: 1e-12,
        max_iter: 4 * n,
        ..SolverConfig::default()
    };
    let x = problem.nodes();
    let u0: Vec<f64> = x.iter().map(|x| x * x).collect();

    let (u, report, used_fallback) = match newton_solve(&scheme, &u0, &config) {
        Ok((u, rep)) if rep.converged => (u, rep, false),
        _ => {
            let start = eikonal_fixed_point(&problem, 4 * n)?;
            let (u, rep) = newton_solve(&scheme, &start, &config)?;
            (u, rep, true)
        }
    };
    if !report.converged {
        return Err(Error::NotConverged(format!(
            "filtered 1D solve stopped at residual {:.3e}",
            report.final_residual()
        )));
    }
    let exact = problem.exact();
    Ok(EikonalSolution {
        max_error: max_abs_diff(&u, &exact),
        x,
        iterations: report.iterations,
        residual_norm: report.final_residual(),
        u: u.into_vec(),
        used_fallback,
    })
}
