//! Finite difference solvers for the Dirichlet problem of the Monge-Ampere
//! equation `det(D^2 u) = f` on the unit square.
//!
//! * [`grid`]: uniform grids, lattice direction sets and boundary-truncated stencil arms.
//! * [`operators`]: the monotone wide-stencil scheme and the standard 9-point scheme.
//! * [`filter`]: the filtered combination of the two and its modified Jacobian.
//! * [`solver`]: damped Newton iteration with sparse LU solves.
//! * [`problems`] and [`eikonal`]: benchmark problems.
//! * [`harness`]: single runs, convergence studies and report writers.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::len_without_is_empty)]

pub mod eikonal;
pub mod error;
pub mod filter;
pub mod grid;
pub mod harness;
pub mod linalg;
pub mod operators;
pub mod problems;
pub mod solver;

pub use error::{Error, Result};
pub use filter::{epsilon_rule, filter_s, filter_s_prime, filtered_eval, FilterParams, FilteredScheme, JacobianMode};
pub use grid::{DirectionSet, Grid, LatticeDirection, OrthogonalBasis, StencilArms};
pub use harness::{convergence_study, run_single, solve_single, RunConfig, RunReport, SchemeKind};
pub use operators::{GridFunction, MonotoneParams, MonotoneScheme, Scheme, SchemeEval, StandardScheme};
pub use problems::{make_example, make_example_for_grid, make_example_for_stencil, ConeMass, Example, Problem};
pub use solver::{initial_guess, newton_solve, SolveReport, SolverConfig};
