//! Uniform grids on the unit square, lattice direction sets and stencil arms.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform `n x n` lattice on `[0,1]^2` with spacing `h = 1/(n-1)`.
///
/// Nodes are numbered `i + j*n`, with `i` running along `x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    n: usize,
    h: f64,
}

impl Grid {
    pub fn new(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::Config(format!("grid needs at least 3 nodes per side, got {n}")));
        }
        Ok(Grid {
            n,
            h: 1.0 / (n - 1) as f64,
        })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn h(&self) -> f64 {
        self.h
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n * self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        i + j * self.n
    }

    #[inline]
    pub fn ij(&self, node: usize) -> (usize, usize) {
        (node % self.n, node / self.n)
    }

    /// Coordinates of a lattice point given in grid units.
    #[inline]
    pub fn coord(&self, i: usize) -> f64 {
        i as f64 / (self.n - 1) as f64
    }

    #[inline]
    pub fn xy(&self, node: usize) -> (f64, f64) {
        let (i, j) = self.ij(node);
        (self.coord(i), self.coord(j))
    }

    #[inline]
    pub fn is_boundary(&self, node: usize) -> bool {
        let (i, j) = self.ij(node);
        i == 0 || j == 0 || i == self.n - 1 || j == self.n - 1
    }

    #[inline]
    pub fn is_interior(&self, node: usize) -> bool {
        !self.is_boundary(node)
    }

    pub fn interior_mask(&self) -> Vec<bool> {
        (0..self.len()).map(|k| self.is_interior(k)).collect()
    }

    pub fn interior_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(move |&k| self.is_interior(k))
    }

    pub fn boundary_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(move |&k| self.is_boundary(k))
    }

    pub fn interior_count(&self) -> usize {
        (self.n - 2) * (self.n - 2)
    }

    /// Samples `f` at every node.
    pub fn sample(&self, f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
        (0..self.len())
            .map(|k| {
                let (x, y) = self.xy(k);
                f(x, y)
            })
            .collect()
    }
}

fn gcd(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Primitive lattice vector `(p, q)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LatticeDirection {
    pub p: i32,
    pub q: i32,
}

impl LatticeDirection {
    pub fn new(p: i32, q: i32) -> Result<Self> {
        if (p, q) == (0, 0) || gcd(p.unsigned_abs(), q.unsigned_abs()) != 1 {
            return Err(Error::Config(format!(
                "({p}, {q}) is not a primitive lattice direction"
            )));
        }
        Ok(LatticeDirection { p, q })
    }

    /// Left normal `(-q, p)`.
    pub fn perp(&self) -> Self {
        LatticeDirection { p: -self.q, q: self.p }
    }

    pub fn norm(&self) -> f64 {
        f64::from(self.p).hypot(f64::from(self.q))
    }

    /// Largest coordinate magnitude, i.e. the stencil width this direction needs.
    pub fn width(&self) -> u32 {
        self.p.unsigned_abs().max(self.q.unsigned_abs())
    }

    pub fn angle(&self) -> f64 {
        f64::from(self.q).atan2(f64::from(self.p))
    }

    pub fn dot(&self, other: &Self) -> i32 {
        self.p * other.p + self.q * other.q
    }
}

/// A pair of orthogonal lattice directions, `nu2 = nu1.perp()`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrthogonalBasis {
    pub nu1: LatticeDirection,
    pub nu2: LatticeDirection,
}

impl OrthogonalBasis {
    pub fn from_first(nu1: LatticeDirection) -> Self {
        OrthogonalBasis { nu1, nu2: nu1.perp() }
    }

    pub fn directions(&self) -> [LatticeDirection; 2] {
        [self.nu1, self.nu2]
    }
}

/// The finite family of orthogonal bases available to a stencil of a given width.
///
/// One basis is stored per class under `nu <-> -nu` and `nu1 <-> nu2`: `nu1` has
/// `p > 0, q >= 0`, so its angle lies in `[0, pi/2)`. Bases are sorted by that
/// angle, which puts the axis basis first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionSet {
    width: u32,
    bases: Vec<OrthogonalBasis>,
    dtheta: f64,
}

impl DirectionSet {
    pub const MAX_WIDTH: u32 = 3;

    pub fn new(width: u32) -> Result<Self> {
        if !(1..=Self::MAX_WIDTH).contains(&width) {
            return Err(Error::Config(format!("stencil width must be 1, 2 or 3, got {width}")));
        }
        let w = width as i32;
        let mut firsts: Vec<LatticeDirection> = (1..=w)
            .flat_map(|p| (0..=w).map(move |q| (p, q)))
            .filter_map(|(p, q)| LatticeDirection::new(p, q).ok())
            .collect();
        firsts.sort_by(|a, b| a.angle().total_cmp(&b.angle()));

        let mut angles: Vec<f64> = firsts.iter().map(LatticeDirection::angle).collect();
        angles.push(FRAC_PI_2);
        let dtheta = angles.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);

        Ok(DirectionSet {
            width,
            bases: firsts.into_iter().map(OrthogonalBasis::from_first).collect(),
            dtheta,
        })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn bases(&self) -> &[OrthogonalBasis] {
        &self.bases
    }

    /// Largest angular gap between consecutive stencil directions.
    pub fn dtheta(&self) -> f64 {
        self.dtheta
    }

    /// Largest squared length `p^2 + q^2` among the stencil directions.
    pub fn max_norm2(&self) -> i32 {
        self.bases
            .iter()
            .flat_map(|b| b.directions())
            .map(|d| d.dot(&d))
            .max()
            .unwrap_or(1)
    }

    /// Nodes touched at an interior point by all arms of all bases, center included.
    pub fn stencil_points(&self) -> usize {
        4 * self.bases.len() + 1
    }
}

/// Where a stencil arm ends.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ArmEnd {
    /// An interior grid node, where the unknown is read.
    Node(usize),
    /// A point on the boundary of the square, where Dirichlet data is sampled.
    Boundary { x: f64, y: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Arm {
    /// Distance from the center node (physical units).
    pub length: f64,
    pub end: ArmEnd,
}

impl Arm {
    pub fn is_boundary(&self) -> bool {
        matches!(self.end, ArmEnd::Boundary { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StencilArms {
    pub plus: Arm,
    pub minus: Arm,
}

impl StencilArms {
    pub fn tplus(&self) -> f64 {
        self.plus.length
    }

    pub fn tminus(&self) -> f64 {
        self.minus.length
    }

    pub fn plus_is_boundary(&self) -> bool {
        self.plus.is_boundary()
    }

    pub fn minus_is_boundary(&self) -> bool {
        self.minus.is_boundary()
    }
}

/// Arms of the centered second difference along `nu` at an interior node.
///
/// An arm whose endpoint `x +- nu h` leaves the square is cut at the first
/// boundary crossing. Any endpoint on the boundary, cut or not, is reported as
/// [`ArmEnd::Boundary`].
pub fn stencil_arms(grid: &Grid, node: usize, nu: LatticeDirection) -> Result<StencilArms> {
    if !grid.is_interior(node) {
        return Err(Error::NotInterior(node));
    }
    let (i, j) = grid.ij(node);
    let plus = arm(grid, i as i64, j as i64, i64::from(nu.p), i64::from(nu.q), nu.norm());
    let minus = arm(grid, i as i64, j as i64, -i64::from(nu.p), -i64::from(nu.q), nu.norm());
    Ok(StencilArms { plus, minus })
}

/// Walks from `(i, j)` along `(dp, dq)` in grid units. The fraction of the full
/// step that stays inside the square is kept as an exact rational `num/den`.
fn arm(grid: &Grid, i: i64, j: i64, dp: i64, dq: i64, norm: f64) -> Arm {
    let last = grid.n() as i64 - 1;
    // Fraction of the step before crossing the lines `0` or `last` along one axis.
    let limit = |pos: i64, d: i64| -> Option<(i64, i64)> {
        match d.signum() {
            1 => Some((last - pos, d)),
            -1 => Some((pos, -d)),
            _ => None,
        }
    };
    let (mut num, mut den) = (1_i64, 1_i64);
    for (n2, d2) in [limit(i, dp), limit(j, dq)].into_iter().flatten() {
        if n2 * den < num * d2 {
            (num, den) = (n2, d2);
        }
    }
    let length = num as f64 / den as f64 * norm * grid.h();

    // End point in grid units is (i*den + dp*num) / den; exact when it hits 0 or last.
    let xe = i * den + dp * num;
    let ye = j * den + dq * num;
    let on_boundary = xe == 0 || ye == 0 || xe == last * den || ye == last * den;
    let end = if on_boundary {
        let scale = (den * last) as f64;
        ArmEnd::Boundary {
            x: xe as f64 / scale,
            y: ye as f64 / scale,
        }
    } else {
        debug_assert_eq!(den, 1);
        ArmEnd::Node(grid.index(xe as usize, ye as usize))
    };
    Arm { length, end }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;
    use std::f64::consts::{FRAC_PI_4, PI};

    /// Independent enumeration: every primitive vector in the `[-w, w]^2` box,
    /// angles folded into `[0, pi)`, gaps measured cyclically.
    fn brute_force_dtheta(w: i32) -> f64 {
        let mut angles: Vec<f64> = Vec::new();
        for p in -w..=w {
            for q in -w..=w {
                if (p, q) == (0, 0) || gcd(p.unsigned_abs(), q.unsigned_abs()) != 1 {
                    continue;
                }
                let a = f64::from(q).atan2(f64::from(p)).rem_euclid(PI);
                if !angles.iter().any(|b| (a - b).abs() < 1e-12) {
                    angles.push(a);
                }
            }
        }
        angles.sort_by(f64::total_cmp);
        let mut gap = PI - angles[angles.len() - 1] + angles[0];
        for w in angles.windows(2) {
            gap = gap.max(w[1] - w[0]);
        }
        gap
    }

    #[test]
    fn small_grid() {
        let g = Grid::new(3).unwrap();
        assert_eq!(g.h(), 0.5);
        assert_eq!(g.len(), 9);
        assert_eq!(g.interior_nodes().collect::<Vec<_>>(), vec![4]);
    }

    #[test]
    fn center_is_a_node_for_n31() {
        let g = Grid::new(31).unwrap();
        assert!((g.h() - 1.0 / 30.0).abs() < 1e-16);
        assert_eq!(g.xy(g.index(15, 15)), (0.5, 0.5));
        assert!((g.h() * 30.0 - 1.0).abs() <= f64::EPSILON);
    }

    #[test]
    fn rejects_tiny_grid() {
        assert!(Grid::new(2).is_err());
    }

    #[test]
    fn boundary_classification() {
        let g = Grid::new(5).unwrap();
        let b: Vec<_> = g.boundary_nodes().collect();
        assert_eq!(b.len(), 16);
        assert_eq!(g.interior_count(), 9);
        assert!(g.is_boundary(g.index(0, 2)));
        assert!(g.is_interior(g.index(1, 3)));
    }

    #[test]
    fn lattice_direction_validation() {
        assert!(LatticeDirection::new(0, 0).is_err());
        assert!(LatticeDirection::new(2, 2).is_err());
        assert!(LatticeDirection::new(-2, 4).is_err());
        let d = LatticeDirection::new(2, -3).unwrap();
        assert_eq!(d.dot(&d.perp()), 0);
        assert_eq!(d.perp(), LatticeDirection { p: 3, q: 2 });
    }

    #[test]
    fn width_one_bases() {
        let d = DirectionSet::new(1).unwrap();
        let got: Vec<_> = d.bases().iter().map(|b| (b.nu1.p, b.nu1.q, b.nu2.p, b.nu2.q)).collect();
        assert_eq!(got, vec![(1, 0, 0, 1), (1, 1, -1, 1)]);
        assert!((d.dtheta() - FRAC_PI_4).abs() < 1e-15);
    }

    #[test]
    fn width_two_angles() {
        let d = DirectionSet::new(2).unwrap();
        let mut angles: Vec<f64> = d
            .bases()
            .iter()
            .flat_map(|b| b.directions())
            .map(|v| v.angle().rem_euclid(PI))
            .filter(|a| *a <= FRAC_PI_2 + 1e-12)
            .collect();
        angles.sort_by(f64::total_cmp);
        let expect = [0.0, 0.5f64.atan(), FRAC_PI_4, 2f64.atan(), FRAC_PI_2];
        assert_eq!(angles.len(), expect.len());
        for (a, e) in angles.iter().zip(expect) {
            assert!((a - e).abs() < 1e-14);
        }
        assert!((d.dtheta() - 0.5f64.atan()).abs() < 1e-15);
    }

    #[test]
    fn dtheta_matches_enumeration() {
        for (w, exact) in [(1, FRAC_PI_4), (2, 0.5f64.atan()), (3, (1.0f64 / 3.0).atan())] {
            let d = DirectionSet::new(w).unwrap();
            assert!((d.dtheta() - brute_force_dtheta(w as i32)).abs() < 1e-14);
            assert!((d.dtheta() - exact).abs() < 1e-15);
        }
        assert!(DirectionSet::new(1).unwrap().dtheta() > DirectionSet::new(2).unwrap().dtheta());
        assert!(DirectionSet::new(2).unwrap().dtheta() > DirectionSet::new(3).unwrap().dtheta());
    }

    #[test]
    fn rejects_bad_width() {
        assert!(DirectionSet::new(0).is_err());
        assert!(DirectionSet::new(4).is_err());
    }

    #[test]
    fn footprint_sizes() {
        for (w, count) in [(1, 9), (2, 17), (3, 33)] {
            let d = DirectionSet::new(w).unwrap();
            let mut pts = HashSet::new();
            pts.insert((0, 0));
            for b in d.bases() {
                for v in b.directions() {
                    pts.insert((v.p, v.q));
                    pts.insert((-v.p, -v.q));
                }
            }
            assert_eq!(pts.len(), count);
            assert_eq!(d.stencil_points(), count);
        }
    }

    #[test]
    fn every_primitive_direction_is_covered() {
        for w in 1..=3 {
            let d = DirectionSet::new(w).unwrap();
            let covered: HashSet<(i32, i32)> = d
                .bases()
                .iter()
                .flat_map(|b| b.directions())
                .flat_map(|v| [(v.p, v.q), (-v.p, -v.q)])
                .collect();
            let wi = w as i32;
            for p in -wi..=wi {
                for q in -wi..=wi {
                    if LatticeDirection::new(p, q).is_ok() {
                        assert!(covered.contains(&(p, q)), "width {w} misses ({p},{q})");
                    }
                }
            }
        }
    }

    #[test]
    fn full_arms_far_from_boundary() {
        let g = Grid::new(11).unwrap();
        let node = g.index(5, 5);
        let arms = stencil_arms(&g, node, LatticeDirection::new(1, 1).unwrap()).unwrap();
        let t = 2f64.sqrt() * 0.1;
        assert!((arms.tplus() - t).abs() < 1e-15 && (arms.tminus() - t).abs() < 1e-15);
        assert_eq!(arms.plus.end, ArmEnd::Node(g.index(6, 6)));
        assert_eq!(arms.minus.end, ArmEnd::Node(g.index(4, 4)));
    }

    #[test]
    fn diagonal_arm_lands_on_corner() {
        let g = Grid::new(11).unwrap();
        let h = g.h();
        let arms = stencil_arms(&g, g.index(1, 1), LatticeDirection::new(1, 1).unwrap()).unwrap();
        assert!((arms.tminus() - 2f64.sqrt() * h).abs() < 1e-15);
        assert!(arms.minus_is_boundary());
        assert_eq!(arms.minus.end, ArmEnd::Boundary { x: 0.0, y: 0.0 });
        assert!(!arms.plus_is_boundary());
    }

    #[test]
    fn axis_arm_lands_on_edge() {
        let g = Grid::new(11).unwrap();
        let arms = stencil_arms(&g, g.index(1, 5), LatticeDirection::new(1, 0).unwrap()).unwrap();
        assert!((arms.tminus() - g.h()).abs() < 1e-16);
        assert_eq!(arms.minus.end, ArmEnd::Boundary { x: 0.0, y: 0.5 });
    }

    #[test]
    fn knight_arm_is_truncated() {
        // (h, 0.5) - h*(2,1) leaves through x = 0 halfway along the step.
        let g = Grid::new(11).unwrap();
        let h = g.h();
        let arms = stencil_arms(&g, g.index(1, 5), LatticeDirection::new(2, 1).unwrap()).unwrap();
        assert!((arms.tminus() - 5f64.sqrt() * h / 2.0).abs() < 1e-15);
        match arms.minus.end {
            ArmEnd::Boundary { x, y } => {
                assert_eq!(x, 0.0);
                assert!((y - (0.5 - h / 2.0)).abs() < 1e-15);
            }
            other => panic!("expected boundary end, got {other:?}"),
        }
        assert!((arms.tplus() - 5f64.sqrt() * h).abs() < 1e-15);
    }

    #[test]
    fn arms_reject_boundary_node() {
        let g = Grid::new(5).unwrap();
        assert!(stencil_arms(&g, 0, LatticeDirection::new(1, 0).unwrap()).is_err());
    }

    #[test]
    fn all_arms_valid() {
        for w in 1..=3 {
            let d = DirectionSet::new(w).unwrap();
            let g = Grid::new(9).unwrap();
            for node in g.interior_nodes() {
                let (x0, y0) = g.xy(node);
                for b in d.bases() {
                    for nu in b.directions() {
                        let arms = stencil_arms(&g, node, nu).unwrap();
                        for (arm, s) in [(arms.plus, 1.0), (arms.minus, -1.0)] {
                            assert!(arm.length > 0.0 && arm.length <= nu.norm() * g.h() + 1e-15);
                            let (x, y) = match arm.end {
                                ArmEnd::Node(k) => g.xy(k),
                                ArmEnd::Boundary { x, y } => {
                                    assert!(x == 0.0 || x == 1.0 || y == 0.0 || y == 1.0);
                                    (x, y)
                                }
                            };
                            assert!((0.0..=1.0).contains(&x) && (0.0..=1.0).contains(&y));
                            // End point sits on the ray at the reported distance.
                            let ex = x0 + s * arm.length * f64::from(nu.p) / nu.norm();
                            let ey = y0 + s * arm.length * f64::from(nu.q) / nu.norm();
                            assert!((ex - x).abs() < 1e-14 && (ey - y).abs() < 1e-14);
                        }
                    }
                }
            }
        }
    }
}
