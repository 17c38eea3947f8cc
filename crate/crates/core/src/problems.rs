//! Benchmark Dirichlet problems for `det(D^2 u) = f` on the unit square.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{DirectionSet, Grid};

/// Scalar field on the plane.
pub type Field = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Center of the square, where the radial examples are centered.
pub const CENTER: (f64, f64) = (0.5, 0.5);

/// The four two-dimensional benchmarks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Example {
    /// Smooth radial solution `exp(|x - x0|^2 / 2)`.
    C2,
    /// `C^1` solution that vanishes on a disk of radius 0.2.
    C1,
    /// Gradient blows up at the corner `(1, 1)`.
    Blowup,
    /// The cone `|x - x0|` with a point mass smeared over one cell.
    Cone,
}

impl Example {
    pub const ALL: [Example; 4] = [Example::C2, Example::C1, Example::Blowup, Example::Cone];

    pub fn name(self) -> &'static str {
        match self {
            Example::C2 => "c2",
            Example::C1 => "c1",
            Example::Blowup => "blowup",
            Example::Cone => "cone",
        }
    }
}

impl fmt::Display for Example {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Example {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "c2" => Ok(Example::C2),
            "c1" => Ok(Example::C1),
            "blowup" => Ok(Example::Blowup),
            "cone" => Ok(Example::Cone),
            other => Err(Error::Config(format!("unknown example '{other}'"))),
        }
    }
}

/// Dirichlet problem data: source `f`, boundary data `g` and, when known, the
/// exact solution.
#[derive(Clone)]
pub struct Problem {
    pub name: String,
    pub f: Field,
    pub g: Field,
    pub exact: Option<Field>,
}

impl fmt::Debug for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Problem")
            .field("name", &self.name)
            .field("exact", &self.exact.is_some())
            .finish()
    }
}

impl Problem {
    pub fn new(
        name: impl Into<String>,
        f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        g: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Problem {
            name: name.into(),
            f: Arc::new(f),
            g: Arc::new(g),
            exact: None,
        }
    }

    /// Problem whose boundary data is the restriction of a known solution.
    pub fn with_solution(
        name: impl Into<String>,
        f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        exact: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        let exact: Field = Arc::new(exact);
        Problem {
            name: name.into(),
            f: Arc::new(f),
            g: exact.clone(),
            exact: Some(exact),
        }
    }

    pub fn f(&self, x: f64, y: f64) -> f64 {
        (self.f)(x, y)
    }

    pub fn g(&self, x: f64, y: f64) -> f64 {
        (self.g)(x, y)
    }

    pub fn exact(&self, x: f64, y: f64) -> Option<f64> {
        self.exact.as_ref().map(|u| u(x, y))
    }

    /// Exact solution sampled at every node.
    pub fn sample_exact(&self, grid: &Grid) -> Option<Vec<f64>> {
        self.exact.as_ref().map(|u| grid.sample(|x, y| u(x, y)))
    }

    /// Source sampled at interior nodes; boundary entries are zero and never read.
    pub fn sample_source(&self, grid: &Grid) -> Vec<f64> {
        (0..grid.len())
            .map(|k| {
                if grid.is_interior(k) {
                    let (x, y) = grid.xy(k);
                    self.f(x, y)
                } else {
                    0.0
                }
            })
            .collect()
    }

    /// Boundary data sampled at boundary nodes; interior entries are zero.
    pub fn sample_boundary(&self, grid: &Grid) -> Vec<f64> {
        (0..grid.len())
            .map(|k| {
                if grid.is_boundary(k) {
                    let (x, y) = grid.xy(k);
                    self.g(x, y)
                } else {
                    0.0
                }
            })
            .collect()
    }
}

/// How the cone's unit point mass `4` is spread at the center node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConeMass {
    /// `4 / h^2` on the ball of radius `h/2`, i.e. the mass divided by one cell area.
    Ball,
    /// The value the monotone operator takes on the exact cone at the center,
    /// `4 / (h^2 |nu|^2)` with `|nu|` the longest stencil direction. The
    /// discrete solution then has its vertex at the exact height.
    #[default]
    Stencil,
}

impl ConeMass {
    pub fn as_str(self) -> &'static str {
        match self {
            ConeMass::Ball => "ball",
            ConeMass::Stencil => "stencil",
        }
    }

    /// Source value at the center node for spacing `h` and a stencil whose
    /// longest direction has squared length `max_norm2`.
    pub fn center_value(self, h: f64, max_norm2: i32) -> f64 {
        match self {
            ConeMass::Ball => 4.0 / (h * h),
            ConeMass::Stencil => 4.0 / (h * h * f64::from(max_norm2)),
        }
    }
}

impl FromStr for ConeMass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ball" => Ok(ConeMass::Ball),
            "stencil" => Ok(ConeMass::Stencil),
            other => Err(Error::Config(format!(
                "unknown cone mass '{other}' (expected ball or stencil)"
            ))),
        }
    }
}

fn dist2_center(x: f64, y: f64) -> f64 {
    let (dx, dy) = (x - CENTER.0, y - CENTER.1);
    dx * dx + dy * dy
}

/// Builds a benchmark problem. `h` is only used by the cone, whose point mass
/// is averaged over the ball of radius `h/2`.
pub fn make_example(example: Example, h: f64) -> Result<Problem> {
    let problem = match example {
        Example::C2 => Problem::with_solution(
            "c2",
            |x, y| {
                let r2 = dist2_center(x, y);
                (1.0 + r2) * r2.exp()
            },
            |x, y| (dist2_center(x, y) / 2.0).exp(),
        ),
        Example::C1 => Problem::with_solution(
            "c1",
            |x, y| {
                let r = dist2_center(x, y).sqrt();
                // Zero on the whole disk r <= 0.2, including the center.
                if r <= 0.2 {
                    0.0
                } else {
                    1.0 - 0.2 / r
                }
            },
            |x, y| {
                let s = (dist2_center(x, y).sqrt() - 0.2).max(0.0);
                0.5 * s * s
            },
        ),
        Example::Blowup => Problem::with_solution(
            "blowup",
            |x, y| {
                let s = 2.0 - x * x - y * y;
                2.0 / (s * s)
            },
            |x, y| -(2.0 - x * x - y * y).max(0.0).sqrt(),
        ),
        Example::Cone => {
            return make_cone(h, ConeMass::Ball.center_value(h, 1));
        }
    };
    Ok(problem)
}

/// The cone `|x - x0|` with source `center_mass` on the ball of radius `h/2`
/// and zero elsewhere.
pub fn make_cone(h: f64, center_mass: f64) -> Result<Problem> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::Config(format!("cone needs a positive spacing, got {h}")));
    }
    if !(center_mass >= 0.0 && center_mass.is_finite()) {
        return Err(Error::Config(format!(
            "cone mass must be finite and nonnegative, got {center_mass}"
        )));
    }
    let radius = h / 2.0;
    Ok(Problem::with_solution(
        "cone",
        move |x, y| {
            if dist2_center(x, y).sqrt() <= radius {
                center_mass
            } else {
                0.0
            }
        },
        |x, y| dist2_center(x, y).sqrt(),
    ))
}

/// Builds a benchmark problem for a specific grid, rejecting grids where the
/// cone's point mass would not sit on a node.
pub fn make_example_for_grid(example: Example, grid: &Grid) -> Result<Problem> {
    if example == Example::Cone && grid.n().is_multiple_of(2) {
        return Err(Error::Config(format!(
            "cone example needs an odd grid size so the center is a node, got n = {}",
            grid.n()
        )));
    }
    make_example(example, grid.h())
}

/// Like [`make_example_for_grid`], with the cone's center value chosen by
/// `mass` for the given stencil.
pub fn make_example_for_stencil(example: Example, grid: &Grid, dirs: &DirectionSet, mass: ConeMass) -> Result<Problem> {
    let problem = make_example_for_grid(example, grid)?;
    if example != Example::Cone {
        return Ok(problem);
    }
    make_cone(grid.h(), mass.center_value(grid.h(), dirs.max_norm2()))
}
