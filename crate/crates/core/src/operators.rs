//! Discrete Monge-Ampere operators.
//!
//! Both schemes return the residual at every node together with the sparse
//! Jacobian as `(row, col, value)` triplets. Boundary rows are the Dirichlet
//! condition `u - g`.

use std::ops::{Deref, DerefMut};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{stencil_arms, ArmEnd, DirectionSet, Grid, LatticeDirection, StencilArms};
use crate::problems::Problem;

/// One real value per grid node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GridFunction(Vec<f64>);

impl GridFunction {
    pub fn new(values: Vec<f64>) -> Self {
        GridFunction(values)
    }

    pub fn from_fn(grid: &Grid, f: impl Fn(f64, f64) -> f64) -> Self {
        GridFunction(grid.sample(f))
    }

    pub fn zeros(len: usize) -> Self {
        GridFunction(vec![0.0; len])
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn max_abs_diff(&self, other: &[f64]) -> f64 {
        max_abs_diff(&self.0, other)
    }
}

impl Deref for GridFunction {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl DerefMut for GridFunction {
    fn deref_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }
}

impl From<Vec<f64>> for GridFunction {
    fn from(v: Vec<f64>) -> Self {
        GridFunction(v)
    }
}

pub(crate) fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn max_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Residual and Jacobian of a scheme at one state. Duplicate `(row, col)`
/// triplets are summed.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SchemeEval {
    pub residual: Vec<f64>,
    pub jacobian: Vec<(usize, usize, f64)>,
}

impl SchemeEval {
    pub fn len(&self) -> usize {
        self.residual.len()
    }

    pub fn is_empty(&self) -> bool {
        self.residual.is_empty()
    }

    /// Dense copy of one Jacobian row, with duplicates summed.
    pub fn jacobian_row(&self, row: usize) -> Vec<(usize, f64)> {
        let mut out: Vec<(usize, f64)> = Vec::new();
        for &(r, c, v) in &self.jacobian {
            if r != row {
                continue;
            }
            match out.iter_mut().find(|(col, _)| *col == c) {
                Some(entry) => entry.1 += v,
                None => out.push((c, v)),
            }
        }
        out.sort_by_key(|e| e.0);
        out
    }
}

/// A discretization that can be driven by Newton's method.
pub trait Scheme: Sync {
    /// Number of unknowns.
    fn len(&self) -> usize;

    fn residual(&self, u: &[f64]) -> Vec<f64>;

    fn eval(&self, u: &[f64]) -> SchemeEval;
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonotoneParams {
    /// Floor applied to directional second differences.
    pub delta: f64,
}

impl MonotoneParams {
    pub const DEFAULT_DELTA: f64 = 1e-9;

    pub fn new(delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::Config(format!("delta must be positive, got {delta}")));
        }
        Ok(MonotoneParams { delta })
    }
}

impl Default for MonotoneParams {
    fn default() -> Self {
        MonotoneParams {
            delta: Self::DEFAULT_DELTA,
        }
    }
}

/// Value read at the end of an arm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ArmValue {
    Unknown(usize),
    /// Dirichlet data sampled on the boundary.
    Known(f64),
}

impl ArmValue {
    #[inline]
    fn read(self, u: &[f64]) -> f64 {
        match self {
            ArmValue::Unknown(k) => u[k],
            ArmValue::Known(v) => v,
        }
    }
}

/// Three-point second difference
/// `w+ (u+ - u0) + w- (u- - u0)` with `w+- = 2 / ((t+ + t-) t+-)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondDifference {
    pub center: usize,
    pub plus: ArmValue,
    pub minus: ArmValue,
    pub w_plus: f64,
    pub w_minus: f64,
}

impl SecondDifference {
    pub fn new(node: usize, arms: &StencilArms, g: impl Fn(f64, f64) -> f64) -> Self {
        let (tp, tm) = (arms.tplus(), arms.tminus());
        let end = |e: ArmEnd| match e {
            ArmEnd::Node(k) => ArmValue::Unknown(k),
            ArmEnd::Boundary { x, y } => ArmValue::Known(g(x, y)),
        };
        let (w_plus, w_minus) = if tp == tm {
            let w = 1.0 / (tp * tp);
            (w, w)
        } else {
            let s = 2.0 / (tp + tm);
            (s / tp, s / tm)
        };
        SecondDifference {
            center: node,
            plus: end(arms.plus.end),
            minus: end(arms.minus.end),
            w_plus,
            w_minus,
        }
    }

    #[inline]
    pub fn apply(&self, u: &[f64]) -> f64 {
        let u0 = u[self.center];
        self.w_plus * (self.plus.read(u) - u0) + self.w_minus * (self.minus.read(u) - u0)
    }

    /// Linear weights on the unknowns (center first).
    pub fn coefficients(&self) -> Vec<(usize, f64)> {
        let mut out = vec![(self.center, -(self.w_plus + self.w_minus))];
        if let ArmValue::Unknown(k) = self.plus {
            out.push((k, self.w_plus));
        }
        if let ArmValue::Unknown(k) = self.minus {
            out.push((k, self.w_minus));
        }
        out
    }

    /// Adds `scale * d(D)/du` to `row` of the triplet list.
    #[inline]
    fn push_jacobian(&self, row: usize, scale: f64, jac: &mut Vec<(usize, usize, f64)>) {
        jac.push((row, self.center, -scale * (self.w_plus + self.w_minus)));
        if let ArmValue::Unknown(k) = self.plus {
            jac.push((row, k, scale * self.w_plus));
        }
        if let ArmValue::Unknown(k) = self.minus {
            jac.push((row, k, scale * self.w_minus));
        }
    }
}

/// Second difference of `u` along the arms of `node`, with boundary ends read
/// from `g`. Returns the value and the weights on the unknowns.
pub fn directional_second_difference(
    u: &[f64],
    node: usize,
    arms: &StencilArms,
    g: impl Fn(f64, f64) -> f64,
) -> (f64, Vec<(usize, f64)>) {
    let d = SecondDifference::new(node, arms, g);
    (d.apply(u), d.coefficients())
}

/// Value of one basis term `max(D1,d) max(D2,d) + min(D1,d) + min(D2,d)` and its
/// partial derivatives with respect to `D1` and `D2`.
#[inline]
fn basis_term(d1: f64, d2: f64, delta: f64) -> (f64, f64, f64) {
    let (m1, m2) = (d1.max(delta), d2.max(delta));
    let value = m1 * m2 + d1.min(delta) + d2.min(delta);
    let g1 = if d1 >= delta { m2 } else { 1.0 };
    let g2 = if d2 >= delta { m1 } else { 1.0 };
    (value, g1, g2)
}

/// Monotone wide-stencil scheme
/// `min over bases of [max(D1,d) max(D2,d) + min(D1,d) + min(D2,d)] - f`.
///
/// Nodes whose arms all stay inside the grid use plain index offsets; the
/// arms of the remaining nodes, within `width` of the boundary, are tabulated.
pub struct MonotoneScheme {
    grid: Grid,
    directions: Vec<[LatticeDirection; 2]>,
    delta: f64,
    source: Vec<f64>,
    boundary: Vec<f64>,
    near: Vec<u32>,
    near_diffs: Vec<SecondDifference>,
}

const FAR: u32 = u32::MAX;

impl MonotoneScheme {
    pub fn new(grid: &Grid, dirs: &DirectionSet, problem: &Problem, params: MonotoneParams) -> Self {
        let directions: Vec<_> = dirs.bases().iter().map(|b| b.directions()).collect();
        let width = dirs.width() as usize;
        let n = grid.n();
        let mut near = vec![FAR; grid.len()];
        let mut near_diffs = Vec::new();
        let g = |x: f64, y: f64| problem.g(x, y);
        for node in grid.interior_nodes() {
            let (i, j) = grid.ij(node);
            let far = i > width && j > width && i + width < n - 1 && j + width < n - 1;
            if far {
                continue;
            }
            near[node] =
                u32::try_from(near_diffs.len() / (2 * directions.len())).expect("near-boundary table too large");
            for pair in &directions {
                for nu in pair {
                    let arms = stencil_arms(grid, node, *nu).expect("interior node");
                    near_diffs.push(SecondDifference::new(node, &arms, g));
                }
            }
        }
        MonotoneScheme {
            grid: *grid,
            directions,
            delta: params.delta,
            source: problem.sample_source(grid),
            boundary: problem.sample_boundary(grid),
            near,
            near_diffs,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Second difference along direction `k` (0 or 1) of basis `b` at an interior node.
    #[inline]
    fn diff(&self, node: usize, b: usize, k: usize) -> SecondDifference {
        match self.near[node] {
            FAR => {
                let nu = self.directions[b][k];
                let off = nu.p as isize + nu.q as isize * self.grid.n() as isize;
                let h = self.grid.h();
                let w = 1.0 / (f64::from(nu.p * nu.p + nu.q * nu.q) * h * h);
                SecondDifference {
                    center: node,
                    plus: ArmValue::Unknown((node as isize + off) as usize),
                    minus: ArmValue::Unknown((node as isize - off) as usize),
                    w_plus: w,
                    w_minus: w,
                }
            }
            slot => self.near_diffs[(slot as usize * self.directions.len() + b) * 2 + k],
        }
    }

    /// Discrete operator at an interior node: value, active basis and its two differences.
    #[inline]
    fn operator_at(&self, u: &[f64], node: usize) -> (f64, usize, f64, f64) {
        let mut best = (f64::INFINITY, 0, 0.0, 0.0);
        for b in 0..self.directions.len() {
            let d1 = self.diff(node, b, 0).apply(u);
            let d2 = self.diff(node, b, 1).apply(u);
            let (v, _, _) = basis_term(d1, d2, self.delta);
            // Strict comparison keeps the lowest index among ties.
            if v < best.0 {
                best = (v, b, d1, d2);
            }
        }
        best
    }

    /// Discrete Monge-Ampere operator (without the source) at every interior
    /// node; boundary entries are zero.
    pub fn operator(&self, u: &[f64]) -> Vec<f64> {
        (0..self.grid.len())
            .map(|k| {
                if self.grid.is_interior(k) {
                    self.operator_at(u, k).0
                } else {
                    0.0
                }
            })
            .collect()
    }

    /// Index of the minimizing basis at an interior node.
    pub fn active_basis(&self, u: &[f64], node: usize) -> usize {
        self.operator_at(u, node).1
    }

    fn evaluate(&self, u: &[f64], mut jac: Option<&mut Vec<(usize, usize, f64)>>) -> Vec<f64> {
        assert_eq!(u.len(), self.grid.len(), "grid function length");
        let mut residual = vec![0.0; u.len()];
        for (k, r) in residual.iter_mut().enumerate() {
            if self.grid.is_boundary(k) {
                *r = u[k] - self.boundary[k];
                if let Some(jac) = jac.as_deref_mut() {
                    jac.push((k, k, 1.0));
                }
                continue;
            }
            let (value, b, d1, d2) = self.operator_at(u, k);
            *r = value - self.source[k];
            if let Some(jac) = jac.as_deref_mut() {
                let (_, g1, g2) = basis_term(d1, d2, self.delta);
                self.diff(k, b, 0).push_jacobian(k, g1, jac);
                self.diff(k, b, 1).push_jacobian(k, g2, jac);
            }
        }
        residual
    }
}

impl Scheme for MonotoneScheme {
    fn len(&self) -> usize {
        self.grid.len()
    }

    fn residual(&self, u: &[f64]) -> Vec<f64> {
        self.evaluate(u, None)
    }

    fn eval(&self, u: &[f64]) -> SchemeEval {
        let mut jacobian = Vec::with_capacity(u.len() * 5);
        let residual = self.evaluate(u, Some(&mut jacobian));
        SchemeEval { residual, jacobian }
    }
}

/// Standard centered discretization `Dxx Dyy - Dxy^2 - f` on the 9-point stencil.
pub struct StandardScheme {
    grid: Grid,
    source: Vec<f64>,
    boundary: Vec<f64>,
}

impl StandardScheme {
    pub fn new(grid: &Grid, problem: &Problem) -> Self {
        StandardScheme {
            grid: *grid,
            source: problem.sample_source(grid),
            boundary: problem.sample_boundary(grid),
        }
    }

    /// `(Dxx, Dyy, Dxy)` at an interior node.
    #[inline]
    pub fn derivatives(&self, u: &[f64], k: usize) -> (f64, f64, f64) {
        let n = self.grid.n();
        let h2 = self.grid.h() * self.grid.h();
        let dxx = (u[k + 1] + u[k - 1] - 2.0 * u[k]) / h2;
        let dyy = (u[k + n] + u[k - n] - 2.0 * u[k]) / h2;
        let dxy = (u[k + n + 1] + u[k - n - 1] - u[k - n + 1] - u[k + n - 1]) / (4.0 * h2);
        (dxx, dyy, dxy)
    }

    fn evaluate(&self, u: &[f64], mut jac: Option<&mut Vec<(usize, usize, f64)>>) -> Vec<f64> {
        assert_eq!(u.len(), self.grid.len(), "grid function length");
        let n = self.grid.n();
        let h2 = self.grid.h() * self.grid.h();
        let mut residual = vec![0.0; u.len()];
        for (k, r) in residual.iter_mut().enumerate() {
            if self.grid.is_boundary(k) {
                *r = u[k] - self.boundary[k];
                if let Some(jac) = jac.as_deref_mut() {
                    jac.push((k, k, 1.0));
                }
                continue;
            }
            let (dxx, dyy, dxy) = self.derivatives(u, k);
            *r = dxx * dyy - dxy * dxy - self.source[k];
            if let Some(jac) = jac.as_deref_mut() {
                let (ax, ay, axy) = (dyy / h2, dxx / h2, -2.0 * dxy / (4.0 * h2));
                jac.push((k, k, -2.0 * (ax + ay)));
                jac.push((k, k + 1, ax));
                jac.push((k, k - 1, ax));
                jac.push((k, k + n, ay));
                jac.push((k, k - n, ay));
                jac.push((k, k + n + 1, axy));
                jac.push((k, k - n - 1, axy));
                jac.push((k, k - n + 1, -axy));
                jac.push((k, k + n - 1, -axy));
            }
        }
        residual
    }
}

impl Scheme for StandardScheme {
    fn len(&self) -> usize {
        self.grid.len()
    }

    fn residual(&self, u: &[f64]) -> Vec<f64> {
        self.evaluate(u, None)
    }

    fn eval(&self, u: &[f64]) -> SchemeEval {
        let mut jacobian = Vec::with_capacity(u.len() * 9);
        let residual = self.evaluate(u, Some(&mut jacobian));
        SchemeEval { residual, jacobian }
    }
}

fn check_len(grid: &Grid, u: &[f64]) -> Result<()> {
    if u.len() != grid.len() {
        return Err(Error::LengthMismatch {
            expected: grid.len(),
            actual: u.len(),
        });
    }
    Ok(())
}

/// One-shot evaluation of the monotone scheme.
pub fn monotone_ma_eval(
    u: &[f64],
    problem: &Problem,
    grid: &Grid,
    dirs: &DirectionSet,
    params: MonotoneParams,
) -> Result<SchemeEval> {
    check_len(grid, u)?;
    Ok(MonotoneScheme::new(grid, dirs, problem, params).eval(u))
}

/// One-shot evaluation of the standard scheme.
pub fn standard_ma_eval(u: &[f64], problem: &Problem, grid: &Grid) -> Result<SchemeEval> {
    check_len(grid, u)?;
    Ok(StandardScheme::new(grid, problem).eval(u))
}
