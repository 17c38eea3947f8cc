//! Sparse linear solves for Newton steps and the Poisson initializer.

use faer::prelude::Solve;
use faer::sparse::{SparseColMat, Triplet};
use faer::Col;

use crate::error::{Error, Result};
use crate::grid::Grid;

/// Refinement sweeps attempted when the first LU solve misses the tolerance.
const MAX_REFINEMENT: usize = 3;

fn residual_norm(triplets: &[(usize, usize, f64)], x: &[f64], rhs: &[f64]) -> f64 {
    let mut r = rhs.to_vec();
    for &(i, j, v) in triplets {
        r[i] -= v * x[j];
    }
    norm2(&r)
}

pub(crate) fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Solves `J x = rhs` for a square sparse `J` given as triplets (duplicates
/// summed), guaranteeing `|J x - rhs|_2 <= linear_tol |rhs|_2`.
///
/// Uses a sparse LU factorization with a fill-reducing ordering, followed by
/// iterative refinement when needed. The factorization runs sequentially so
/// results are reproducible bit for bit.
pub fn sparse_linear_solve(triplets: &[(usize, usize, f64)], rhs: &[f64], linear_tol: f64) -> Result<Vec<f64>> {
    let n = rhs.len();
    if let Some(&(i, j, _)) = triplets.iter().find(|(i, j, _)| *i >= n || *j >= n) {
        return Err(Error::LinearSolve(format!("entry ({i}, {j}) outside a {n}x{n} system")));
    }
    if triplets.iter().any(|t| !t.2.is_finite()) || rhs.iter().any(|v| !v.is_finite()) {
        return Err(Error::LinearSolve("non-finite matrix or right-hand side".into()));
    }
    let rhs_norm = norm2(rhs);
    if rhs_norm == 0.0 {
        return Ok(vec![0.0; n]);
    }

    let entries: Vec<Triplet<usize, usize, f64>> = triplets.iter().map(|&(i, j, v)| Triplet::new(i, j, v)).collect();
    let mat = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &entries)
        .map_err(|e| Error::LinearSolve(format!("{e:?}")))?;
    let lu = mat
        .sp_lu()
        .map_err(|e| Error::LinearSolve(format!("factorization failed: {e:?}")))?;

    let b = Col::<f64>::from_fn(n, |i| rhs[i]);
    let sol = lu.solve(&b);
    let mut x: Vec<f64> = (0..n).map(|i| sol[i]).collect();
    let mut res = residual_norm(triplets, &x, rhs);
    for _ in 0..MAX_REFINEMENT {
        if res <= linear_tol * rhs_norm {
            break;
        }
        let mut r = rhs.to_vec();
        for &(i, j, v) in triplets {
            r[i] -= v * x[j];
        }
        let rc = Col::<f64>::from_fn(n, |i| r[i]);
        let dx = lu.solve(&rc);
        for (i, xi) in x.iter_mut().enumerate() {
            *xi += dx[i];
        }
        res = residual_norm(triplets, &x, rhs);
    }
    if !(res <= linear_tol * rhs_norm) || x.iter().any(|v| !v.is_finite()) {
        return Err(Error::LinearSolve(format!(
            "relative residual {:.3e} above tolerance {linear_tol:.1e} (singular or ill-conditioned system)",
            res / rhs_norm
        )));
    }
    Ok(x)
}

/// Five-point Laplacian on interior rows and identity on boundary rows.
pub fn dirichlet_laplacian(grid: &Grid) -> Vec<(usize, usize, f64)> {
    let n = grid.n();
    let h2 = grid.h() * grid.h();
    let mut t = Vec::with_capacity(grid.len() * 5);
    for k in 0..grid.len() {
        if grid.is_boundary(k) {
            t.push((k, k, 1.0));
            continue;
        }
        t.push((k, k, -4.0 / h2));
        for nb in [k + 1, k - 1, k + n, k - n] {
            t.push((k, nb, 1.0 / h2));
        }
    }
    t
}
