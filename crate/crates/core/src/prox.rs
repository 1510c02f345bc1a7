//! Proximal maps: entrywise soft-thresholding and singular value
//! thresholding.

use crate::error::Result;
use crate::linalg::{thin_svd, Matrix};

#[inline]
pub fn soft_threshold_scalar(s: f64, gamma: f64) -> f64 {
    (s.abs() - gamma).max(0.0) * s.signum()
}

pub fn soft_threshold(s: &Matrix, gamma: f64) -> Matrix {
    debug_assert!(gamma >= 0.0);
    s.map(|v| soft_threshold_scalar(v, gamma))
}

/// Result of [`svt_with_rank`]: the thresholded matrix and how many singular
/// values survived.
#[derive(Debug, Clone)]
pub struct SvtOutput {
    pub matrix: Matrix,
    pub rank: usize,
}

/// `argmin_X gamma ||X||_* + 1/2 ||X - Z||^2`. Singular values equal to
/// `gamma` are mapped to zero.
pub fn svt(z: &Matrix, gamma: f64) -> Result<Matrix> {
    Ok(svt_with_rank(z, gamma)?.matrix)
}

pub fn svt_with_rank(z: &Matrix, gamma: f64) -> Result<SvtOutput> {
    debug_assert!(gamma >= 0.0);
    let svd = thin_svd(z)?;
    let rank = svd.values.iter().filter(|&&s| s > gamma).count();
    let matrix = svd.reconstruct_with(|s| (s - gamma).max(0.0));
    Ok(SvtOutput { matrix, rank })
}
