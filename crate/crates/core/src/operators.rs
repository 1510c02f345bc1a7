//! Observation operators and the weighted least-squares loss
//! `f(X) = 1/2 ||(Psi(X) - F) ⊙ W||^2`.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::linalg::{hadamard, singular_values, spectral_norm, Matrix};

/// Linear map from the `rows x cols` unknown to the observation space.
#[derive(Debug, Clone, PartialEq)]
pub enum ObservationOp {
    Identity { rows: usize, cols: usize },
    /// Keeps the entries where `mask` is 1.
    EntryMask { mask: Matrix },
    /// `sensing * vec(X)` where `vec` stacks columns; the codomain is `d x 1`.
    DenseSensing { sensing: Matrix, rows: usize, cols: usize },
}

impl ObservationOp {
    pub fn identity(rows: usize, cols: usize) -> Self {
        ObservationOp::Identity { rows, cols }
    }

    pub fn entry_mask(mask: Matrix) -> Result<Self> {
        if let Some(pos) = mask.as_slice().iter().position(|&v| v != 0.0 && v != 1.0) {
            return Err(Error::InvalidArgument(format!(
                "mask entry ({}, {}) is not 0 or 1",
                pos / mask.cols(),
                pos % mask.cols()
            )));
        }
        Ok(ObservationOp::EntryMask { mask })
    }

    pub fn dense_sensing(sensing: Matrix, rows: usize, cols: usize) -> Result<Self> {
        if sensing.cols() != rows * cols {
            return Err(Error::dim("dense_sensing", sensing.shape(), (rows, cols)));
        }
        Ok(ObservationOp::DenseSensing { sensing, rows, cols })
    }

    pub fn domain_shape(&self) -> (usize, usize) {
        match self {
            ObservationOp::Identity { rows, cols } => (*rows, *cols),
            ObservationOp::EntryMask { mask } => mask.shape(),
            ObservationOp::DenseSensing { rows, cols, .. } => (*rows, *cols),
        }
    }

    pub fn codomain_shape(&self) -> (usize, usize) {
        match self {
            ObservationOp::DenseSensing { sensing, .. } => (sensing.rows(), 1),
            _ => self.domain_shape(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ObservationOp::Identity { .. } => "identity",
            ObservationOp::EntryMask { .. } => "entry_mask",
            ObservationOp::DenseSensing { .. } => "dense_sensing",
        }
    }

    pub fn apply(&self, x: &Matrix) -> Result<Matrix> {
        if x.shape() != self.domain_shape() {
            return Err(Error::dim("apply", x.shape(), self.domain_shape()));
        }
        match self {
            ObservationOp::Identity { .. } => Ok(x.clone()),
            ObservationOp::EntryMask { mask } => hadamard(mask, x),
            ObservationOp::DenseSensing { sensing, .. } => {
                Ok(Matrix::column(sensing.matvec(x.vec_columns().as_slice())))
            }
        }
    }

    pub fn adjoint(&self, r: &Matrix) -> Result<Matrix> {
        if r.shape() != self.codomain_shape() {
            return Err(Error::dim("adjoint", r.shape(), self.codomain_shape()));
        }
        match self {
            ObservationOp::Identity { .. } => Ok(r.clone()),
            ObservationOp::EntryMask { mask } => hadamard(mask, r),
            ObservationOp::DenseSensing { sensing, rows, cols } => {
                Matrix::from_column_stack(&sensing.matvec_t(r.as_slice()), *rows, *cols)
            }
        }
    }

    /// Operator norm used in the Lipschitz bound. Masks and the identity
    /// count as 1.
    pub fn norm_bound(&self) -> f64 {
        match self {
            ObservationOp::DenseSensing { sensing, .. } => spectral_norm(sensing),
            _ => 1.0,
        }
    }
}

/// One recovery instance `min_X 1/2 ||(Psi(X) - F) ⊙ W||^2 + tau ||X||_*`.
#[derive(Debug, Clone)]
pub struct Problem {
    op: ObservationOp,
    observed: Matrix,
    weights: Matrix,
    weights_sq: Matrix,
    tau: f64,
    op_norm: OnceLock<f64>,
}

impl Problem {
    pub fn new(op: ObservationOp, observed: Matrix, weights: Matrix, tau: f64) -> Result<Self> {
        let codomain = op.codomain_shape();
        if observed.shape() != codomain {
            return Err(Error::dim("problem observation", observed.shape(), codomain));
        }
        if weights.shape() != codomain {
            return Err(Error::dim("problem weights", weights.shape(), codomain));
        }
        if weights.as_slice().iter().any(|&w| w < 0.0) {
            return Err(Error::InvalidArgument("weights must be nonnegative".into()));
        }
        if weights.is_zero() {
            return Err(Error::DegenerateProblem("weight matrix is identically zero".into()));
        }
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::InvalidArgument(format!("tau must be positive and finite, got {tau}")));
        }
        let weights_sq = hadamard(&weights, &weights)?;
        Ok(Problem { op, observed, weights, weights_sq, tau, op_norm: OnceLock::new() })
    }

    /// Same data with a different regularization weight; keeps the cached
    /// operator norm.
    pub fn with_tau(&self, tau: f64) -> Result<Self> {
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::InvalidArgument(format!("tau must be positive and finite, got {tau}")));
        }
        Ok(Problem { tau, ..self.clone() })
    }

    pub fn op(&self) -> &ObservationOp {
        &self.op
    }

    pub fn observed(&self) -> &Matrix {
        &self.observed
    }

    pub fn weights(&self) -> &Matrix {
        &self.weights
    }

    /// `W ⊙ W`
    pub fn weights_sq(&self) -> &Matrix {
        &self.weights_sq
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn domain_shape(&self) -> (usize, usize) {
        self.op.domain_shape()
    }

    fn weighted_residual(&self, x: &Matrix) -> Result<Matrix> {
        let residual = &self.op.apply(x)? - &self.observed;
        hadamard(&residual, &self.weights_sq)
    }

    /// `f(X)`
    pub fn loss(&self, x: &Matrix) -> Result<f64> {
        let residual = &self.op.apply(x)? - &self.observed;
        let weighted = hadamard(&residual, &self.weights)?;
        let norm = weighted.frobenius_norm();
        Ok(0.5 * norm * norm)
    }

    /// `Psi^*((Psi(X) - F) ⊙ W̃)`
    pub fn gradient(&self, x: &Matrix) -> Result<Matrix> {
        self.op.adjoint(&self.weighted_residual(x)?)
    }

    /// `L = ||Psi||^2 * max W̃`.
    pub fn lipschitz_bound(&self) -> Result<f64> {
        let max_w = self.weights_sq.max();
        if !(max_w > 0.0) {
            return Err(Error::DegenerateProblem("weight matrix is identically zero".into()));
        }
        let norm = *self.op_norm.get_or_init(|| self.op.norm_bound());
        if !(norm > 0.0) {
            return Err(Error::DegenerateProblem("observation operator is zero".into()));
        }
        Ok(norm * norm * max_w)
    }

    /// `f(X) + tau ||X||_*`; needs an SVD, so solvers only call it for traces.
    pub fn objective(&self, x: &Matrix) -> Result<f64> {
        Ok(self.loss(x)? + self.tau * nuclear_norm(x)?)
    }
}

pub fn nuclear_norm(x: &Matrix) -> Result<f64> {
    Ok(singular_values(x)?.iter().sum())
}
