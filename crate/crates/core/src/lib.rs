//! Weighted low-rank matrix recovery without per-iteration SVDs.
//!
//! The model is
//!
//! ```text
//! min_X  1/2 ||(Psi(X) - F) ⊙ W||^2 + tau ||X||_*
//! ```
//!
//! solved by inertial proximal gradient steps whose nuclear-norm prox is
//! replaced by a few alternating ridge solves on a factorization `X = U V`
//! ([`solver::prograamme_solve`]), optionally shrinking the factor rank as the
//! iterates settle on the rank of the solution. SVD-based proximal gradient and
//! FISTA-type baselines ([`solver::pgd_solve`]) share the same outer loop.

pub mod amfit;
pub mod bench;
pub mod error;
pub mod io;
pub mod linalg;
pub mod operators;
pub mod problems;
pub mod prox;
pub mod rng;
pub mod solver;

pub use error::{Error, Result};
pub use linalg::Matrix;
pub use operators::{ObservationOp, Problem};
pub use solver::{Algorithm, SolveTrace, SolverConfig};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
