//! Filtered combination of the monotone and accurate schemes.
//!
//! The filtered residual is `F_M + eps * S((F_A - F_M) / eps)`, where `S` is the
//! identity near zero and vanishes for `|x| >= 2`. Where the two schemes agree
//! to within `eps` the accurate scheme is used; where they disagree by more
//! than `2 eps` the monotone scheme is used.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operators::{Scheme, SchemeEval};

/// Tent-shaped filter: identity on `[-1, 1]`, linear back to zero on
/// `1 <= |x| <= 2`, zero beyond.
#[inline]
pub fn filter_s(x: f64) -> f64 {
    let a = x.abs();
    if a <= 1.0 {
        x
    } else if a <= 2.0 {
        x.signum() * (2.0 - a)
    } else {
        0.0
    }
}

/// Derivative of [`filter_s`]. At the kinks `|x| = 1` and `|x| = 2` the value
/// of the inner branch is returned.
#[inline]
pub fn filter_s_prime(x: f64) -> f64 {
    let a = x.abs();
    if a <= 1.0 {
        1.0
    } else if a <= 2.0 {
        -1.0
    } else {
        0.0
    }
}

/// Filter scale `sqrt(h) + dtheta / 10`.
pub fn epsilon_rule(h: f64, dtheta: f64) -> f64 {
    h.sqrt() + dtheta / 10.0
}

/// How the Jacobian of the filtered scheme is assembled.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum JacobianMode {
    /// `(1 - S') J_M + max(S', 0) J_A`.
    #[default]
    Modified,
    /// `(1 - S') J_M + S' J_A`, which can be ill-conditioned.
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FilterParams {
    pub epsilon: f64,
    pub jacobian: JacobianMode,
}

impl FilterParams {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::Config(format!("epsilon must be positive, got {epsilon}")));
        }
        Ok(FilterParams {
            epsilon,
            jacobian: JacobianMode::Modified,
        })
    }

    pub fn with_jacobian(mut self, mode: JacobianMode) -> Self {
        self.jacobian = mode;
        self
    }

    /// Weights `(monotone, accurate)` applied to the two Jacobian rows.
    #[inline]
    pub fn row_weights(&self, arg: f64) -> (f64, f64) {
        let sp = filter_s_prime(arg);
        match self.jacobian {
            JacobianMode::Modified => (1.0 - sp, sp.max(0.0)),
            JacobianMode::Exact => (1.0 - sp, sp),
        }
    }
}

fn check_same_len(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            expected: a.len(),
            actual: b.len(),
        });
    }
    Ok(())
}

/// Filter arguments `(F_A - F_M) / eps` at every node.
pub fn filter_arguments(mono: &[f64], acc: &[f64], epsilon: f64) -> Result<Vec<f64>> {
    check_same_len(mono, acc)?;
    Ok(mono.iter().zip(acc).map(|(m, a)| (a - m) / epsilon).collect())
}

fn filtered_residual(mono: &[f64], acc: &[f64], epsilon: f64) -> Vec<f64> {
    mono.iter()
        .zip(acc)
        .map(|(m, a)| m + epsilon * filter_s((a - m) / epsilon))
        .collect()
}

/// Combines monotone and accurate evaluations into the filtered residual and
/// its (modified or exact) Jacobian.
pub fn filtered_eval(mono: &SchemeEval, acc: &SchemeEval, params: FilterParams) -> Result<SchemeEval> {
    check_same_len(&mono.residual, &acc.residual)?;
    let eps = params.epsilon;
    let weights: Vec<(f64, f64)> = mono
        .residual
        .iter()
        .zip(&acc.residual)
        .map(|(m, a)| params.row_weights((a - m) / eps))
        .collect();

    let mut jacobian = Vec::with_capacity(mono.jacobian.len() + acc.jacobian.len());
    for &(r, c, v) in &mono.jacobian {
        let w = weights[r].0;
        if w != 0.0 {
            jacobian.push((r, c, w * v));
        }
    }
    for &(r, c, v) in &acc.jacobian {
        let w = weights[r].1;
        if w != 0.0 {
            jacobian.push((r, c, w * v));
        }
    }
    Ok(SchemeEval {
        residual: filtered_residual(&mono.residual, &acc.residual, eps),
        jacobian,
    })
}

/// Share of nodes on each branch of the filter.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct BranchFractions {
    /// `|arg| <= 1`: the accurate scheme is used as is.
    pub accurate: f64,
    /// `|arg| >= 2`: the monotone scheme is used as is.
    pub monotone: f64,
    pub blend: f64,
}

impl BranchFractions {
    pub fn from_arguments(args: impl IntoIterator<Item = f64>) -> Self {
        let (mut acc, mut mono, mut blend, mut total) = (0usize, 0usize, 0usize, 0usize);
        for a in args {
            let a = a.abs();
            total += 1;
            if a <= 1.0 {
                acc += 1;
            } else if a >= 2.0 {
                mono += 1;
            } else {
                blend += 1;
            }
        }
        if total == 0 {
            return BranchFractions::default();
        }
        let t = total as f64;
        BranchFractions {
            accurate: acc as f64 / t,
            monotone: mono as f64 / t,
            blend: blend as f64 / t,
        }
    }
}

/// Filtered scheme built from a monotone and an accurate scheme on the same grid.
pub struct FilteredScheme<M, A> {
    pub monotone: M,
    pub accurate: A,
    pub params: FilterParams,
}

impl<M: Scheme, A: Scheme> FilteredScheme<M, A> {
    pub fn new(monotone: M, accurate: A, params: FilterParams) -> Result<Self> {
        if monotone.len() != accurate.len() {
            return Err(Error::LengthMismatch {
                expected: monotone.len(),
                actual: accurate.len(),
            });
        }
        Ok(FilteredScheme {
            monotone,
            accurate,
            params,
        })
    }

    pub fn arguments(&self, u: &[f64]) -> Vec<f64> {
        let m = self.monotone.residual(u);
        let a = self.accurate.residual(u);
        m.iter().zip(&a).map(|(m, a)| (a - m) / self.params.epsilon).collect()
    }
}

impl<M: Scheme, A: Scheme> Scheme for FilteredScheme<M, A> {
    fn len(&self) -> usize {
        self.monotone.len()
    }

    fn residual(&self, u: &[f64]) -> Vec<f64> {
        let m = self.monotone.residual(u);
        let a = self.accurate.residual(u);
        filtered_residual(&m, &a, self.params.epsilon)
    }

    fn eval(&self, u: &[f64]) -> SchemeEval {
        let m = self.monotone.eval(u);
        let a = self.accurate.eval(u);
        filtered_eval(&m, &a, self.params).expect("schemes share a grid")
    }
}
