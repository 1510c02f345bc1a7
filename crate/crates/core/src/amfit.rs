//! SVD-free replacement for singular value thresholding.
//!
//! `svt(Z, mu)` is the product `U V` of any minimizer of
//!
//! ```text
//! 1/2 ||U V - Z||^2 + mu/2 (||U||^2 + ||V||^2),   U: m x r,  V: r x n
//! ```
//!
//! as long as `r` is at least the rank of `svt(Z, mu)`. Each block is an
//! exact ridge solve against an `r x r` Gram matrix shifted by `mu`, so the
//! alternating scheme only needs Cholesky factorizations of small systems.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Cholesky, Matrix};
use crate::rng::standard_normal;

#[derive(Debug, Clone, PartialEq)]
pub struct FactorPair {
    u: Matrix,
    v: Matrix,
}

impl FactorPair {
    pub fn new(u: Matrix, v: Matrix) -> Result<Self> {
        if u.cols() != v.rows() {
            return Err(Error::dim("factor pair", u.shape(), v.shape()));
        }
        if !u.all_finite() || !v.all_finite() {
            return Err(Error::InvalidArgument("factor pair has non-finite entries".into()));
        }
        Ok(FactorPair { u, v })
    }

    /// Independent Gaussian entries scaled by `1/sqrt(r)`.
    pub fn random<R: Rng + ?Sized>(rows: usize, cols: usize, rank: usize, rng: &mut R) -> Self {
        let scale = 1.0 / (rank as f64).sqrt();
        let u = Matrix::from_fn(rows, rank, |_, _| scale * standard_normal(rng));
        let v = Matrix::from_fn(rank, cols, |_, _| scale * standard_normal(rng));
        FactorPair { u, v }
    }

    pub fn u(&self) -> &Matrix {
        &self.u
    }

    pub fn v(&self) -> &Matrix {
        &self.v
    }

    pub fn into_parts(self) -> (Matrix, Matrix) {
        (self.u, self.v)
    }

    /// Factor rank budget `r`.
    pub fn rank(&self) -> usize {
        self.u.cols()
    }

    pub fn outer_shape(&self) -> (usize, usize) {
        (self.u.rows(), self.v.cols())
    }

    pub fn product(&self) -> Matrix {
        self.u.matmul(&self.v).expect("inner dimensions agree by construction")
    }

    pub fn is_zero(&self) -> bool {
        self.u.is_zero() || self.v.is_zero()
    }
}

/// How many alternating passes to run per outer iteration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InnerPolicy {
    /// Exactly `passes` alternating passes.
    Fixed { passes: usize },
    /// Stop once `||U'V' - UV|| / max(||UV||, 1) <= eps`, or after
    /// `max_inner` passes.
    Tolerance { eps: f64, max_inner: usize },
    /// `start` passes, plus one more every `every` outer iterations.
    Increasing { start: usize, every: usize },
}

impl Default for InnerPolicy {
    fn default() -> Self {
        InnerPolicy::Fixed { passes: 1 }
    }
}

impl InnerPolicy {
    /// Tolerance-controlled policy used throughout the experiments:
    /// `eps = 1e-4`, at most 20 passes.
    pub const EPSILON_DEFAULT: InnerPolicy = InnerPolicy::Tolerance { eps: 1e-4, max_inner: 20 };

    /// Resolves the policy at outer iteration `k` (0-based).
    pub fn at_iteration(&self, k: usize) -> InnerStop {
        match *self {
            InnerPolicy::Fixed { passes } => InnerStop::Passes(passes),
            InnerPolicy::Tolerance { eps, max_inner } => InnerStop::Tolerance { eps, max_inner },
            InnerPolicy::Increasing { start, every } => InnerStop::Passes(start + k / every.max(1)),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            InnerPolicy::Fixed { passes } => passes >= 1,
            InnerPolicy::Tolerance { eps, max_inner } => eps >= 0.0 && max_inner >= 1,
            InnerPolicy::Increasing { start, every } => start >= 1 && every >= 1,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!("invalid inner policy {self:?}")))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InnerStop {
    Passes(usize),
    Tolerance { eps: f64, max_inner: usize },
}

/// `1/2 ||U V - Z||^2 + mu/2 (||U||^2 + ||V||^2)`
pub fn inner_objective(z: &Matrix, pair: &FactorPair, mu: f64) -> f64 {
    let fit = (&pair.product() - z).frobenius_norm();
    let nu = pair.u.frobenius_norm();
    let nv = pair.v.frobenius_norm();
    0.5 * fit * fit + 0.5 * mu * (nu * nu + nv * nv)
}

fn shifted(mut gram: Matrix, mu: f64) -> Matrix {
    for i in 0..gram.rows() {
        gram.set(i, i, gram.get(i, i) + mu);
    }
    gram
}

/// `U = Z V^T (V V^T + mu I)^{-1}`
pub fn update_u(z: &Matrix, v: &Matrix, mu: f64) -> Result<Matrix> {
    let rhs = z.matmul_nt(v)?;
    let gram = shifted(v.matmul_nt(v)?, mu);
    Cholesky::factor(&gram)?.solve_right(&rhs)
}

/// `V = (U^T U + mu I)^{-1} U^T Z`
pub fn update_v(z: &Matrix, u: &Matrix, mu: f64) -> Result<Matrix> {
    let rhs = u.matmul_tn(z)?;
    let gram = shifted(u.matmul_tn(u)?, mu);
    Cholesky::factor(&gram)?.solve(&rhs)
}

#[derive(Debug, Clone)]
pub struct InnerResult {
    pub pair: FactorPair,
    pub iterations: usize,
    /// `U V` of the returned pair.
    pub product: Matrix,
}

/// Alternating minimization from `start`, stopped according to `stop`.
pub fn inner_solve(z: &Matrix, mu: f64, start: FactorPair, stop: InnerStop) -> Result<InnerResult> {
    if !(mu > 0.0) {
        return Err(Error::InvalidArgument(format!("inner shift must be positive, got {mu}")));
    }
    if start.outer_shape() != z.shape() {
        return Err(Error::dim("inner_solve", start.outer_shape(), z.shape()));
    }
    let FactorPair { mut u, mut v } = start;
    match stop {
        InnerStop::Passes(passes) => {
            for _ in 0..passes {
                u = update_u(z, &v, mu)?;
                v = update_v(z, &u, mu)?;
            }
            let product = u.matmul(&v)?;
            Ok(InnerResult { pair: FactorPair { u, v }, iterations: passes, product })
        }
        InnerStop::Tolerance { eps, max_inner } => {
            let mut product = u.matmul(&v)?;
            let mut iterations = 0;
            while iterations < max_inner {
                u = update_u(z, &v, mu)?;
                v = update_v(z, &u, mu)?;
                iterations += 1;
                let next = u.matmul(&v)?;
                let change = (&next - &product).frobenius_norm() / product.frobenius_norm().max(1.0);
                product = next;
                if change <= eps {
                    break;
                }
            }
            Ok(InnerResult { pair: FactorPair { u, v }, iterations, product })
        }
    }
}
