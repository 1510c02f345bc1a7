//! Seeded synthetic instances and evaluation metrics.
//!
//! Every instance draws its randomness from independent named streams of one
//! seed ([`crate::rng`]), so changing, say, the weight model leaves the ground
//! truth and the noise untouched.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{frobenius_norm, singular_values, Matrix};
use crate::operators::{ObservationOp, Problem};
use crate::rng::{gaussian_matrix, seeded, standard_normal, Stream};

fn default_magnitude() -> f64 {
    50.0
}

/// Additive corruption `E`, generated on the observation space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NoiseModel {
    /// `eta * S`, `S` standard normal on a random support of
    /// `floor(sparsity * len)` entries and `eta = eta_factor * max_ij |L_ij|`.
    GaussianScaled { eta_factor: f64, sparsity: f64 },
    /// Uniform values in `[-magnitude, magnitude]` on a random support of
    /// `floor(sparsity * len)` entries.
    SparseLarge {
        sparsity: f64,
        #[serde(default = "default_magnitude")]
        magnitude: f64,
    },
    /// Dense i.i.d. `N(0, sigma^2)`.
    AdditiveGaussian { sigma: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightModel {
    AllOnes,
    /// Integers drawn uniformly from `w_min..=w_max`.
    UniformInt { w_min: u64, w_max: u64 },
    /// Exactly `floor(fraction * len)` random entries get a weight drawn
    /// uniformly from `[w_min, w_max]`; all others are 1.
    LargeOnSupport { fraction: f64, w_min: f64, w_max: f64 },
}

/// JSON-serializable description of a synthetic instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub m: usize,
    pub n: usize,
    pub rank: usize,
    pub noise: NoiseModel,
    #[serde(default = "default_weights")]
    pub weights: WeightModel,
    /// Observed fraction for completion problems.
    #[serde(default)]
    pub mask: Option<f64>,
    /// Observe exactly `round(mask * m * n)` entries instead of including each
    /// entry independently.
    #[serde(default)]
    pub exact_mask_count: bool,
    /// Number of Gaussian measurements `d` for compressed sensing.
    #[serde(default)]
    pub sensing_rows: Option<usize>,
    #[serde(default)]
    pub seed: u64,
}

fn default_weights() -> WeightModel {
    WeightModel::AllOnes
}

fn check_fraction(name: &str, value: f64) -> Result<()> {
    if value > 0.0 && value < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidSpec(format!("{name} must lie in (0,1), got {value}")))
    }
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.n == 0 {
            return Err(Error::InvalidSpec(format!("dimensions must be positive, got {}x{}", self.m, self.n)));
        }
        if self.rank == 0 || self.rank >= self.m.min(self.n) {
            return Err(Error::InvalidSpec(format!(
                "rank must satisfy 0 < rank < min(m, n) = {}, got {}",
                self.m.min(self.n),
                self.rank
            )));
        }
        match self.noise {
            NoiseModel::GaussianScaled { eta_factor, sparsity } => {
                check_fraction("noise sparsity", sparsity)?;
                if !(eta_factor >= 0.0 && eta_factor.is_finite()) {
                    return Err(Error::InvalidSpec(format!("eta_factor must be nonnegative, got {eta_factor}")));
                }
            }
            NoiseModel::SparseLarge { sparsity, magnitude } => {
                check_fraction("noise sparsity", sparsity)?;
                if !(magnitude > 0.0 && magnitude.is_finite()) {
                    return Err(Error::InvalidSpec(format!("noise magnitude must be positive, got {magnitude}")));
                }
            }
            NoiseModel::AdditiveGaussian { sigma } => {
                if !(sigma >= 0.0 && sigma.is_finite()) {
                    return Err(Error::InvalidSpec(format!("sigma must be nonnegative, got {sigma}")));
                }
            }
        }
        match self.weights {
            WeightModel::AllOnes => {}
            WeightModel::UniformInt { w_min, w_max } => {
                if w_min > w_max || w_max == 0 {
                    return Err(Error::InvalidSpec(format!(
                        "integer weights need w_min <= w_max and w_max >= 1, got [{w_min}, {w_max}]"
                    )));
                }
            }
            WeightModel::LargeOnSupport { fraction, w_min, w_max } => {
                check_fraction("weight support fraction", fraction)?;
                if !(w_min >= 0.0 && w_min <= w_max && w_max.is_finite()) {
                    return Err(Error::InvalidSpec(format!(
                        "support weights need 0 <= w_min <= w_max, got [{w_min}, {w_max}]"
                    )));
                }
            }
        }
        if let Some(omega) = self.mask {
            if !(omega > 0.0 && omega <= 1.0) {
                return Err(Error::InvalidSpec(format!("mask fraction must lie in (0,1], got {omega}")));
            }
        }
        if let Some(d) = self.sensing_rows {
            if d == 0 {
                return Err(Error::InvalidSpec("sensing_rows must be positive".into()));
            }
            if self.mask.is_some() {
                return Err(Error::InvalidSpec("a spec cannot combine a mask with dense sensing".into()));
            }
        }
        Ok(())
    }

    /// Shape of `F`, `W` and the noise.
    pub fn observation_shape(&self) -> (usize, usize) {
        match self.sensing_rows {
            Some(d) => (d, 1),
            None => (self.m, self.n),
        }
    }
}

/// A generated instance; `tau` is chosen later through [`SyntheticInstance::problem`].
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticInstance {
    pub spec: SyntheticSpec,
    pub op: ObservationOp,
    pub observed: Matrix,
    pub weights: Matrix,
    pub ground_truth: Matrix,
    /// The additive corruption `E` in `F = Psi(L) + E`.
    pub noise: Matrix,
}

impl SyntheticInstance {
    pub fn problem(&self, tau: f64) -> Result<Problem> {
        Problem::new(self.op.clone(), self.observed.clone(), self.weights.clone(), tau)
    }

    /// `||E||_F`
    pub fn noise_norm(&self) -> f64 {
        self.noise.frobenius_norm()
    }

    /// The binary mask, for completion instances.
    pub fn mask(&self) -> Option<&Matrix> {
        match &self.op {
            ObservationOp::EntryMask { mask } => Some(mask),
            _ => None,
        }
    }
}

/// `count` distinct indices out of `0..len`, via a seeded shuffle.
fn random_support<R: Rng + ?Sized>(rng: &mut R, len: usize, count: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..len).collect();
    idx.shuffle(rng);
    idx.truncate(count);
    idx.sort_unstable();
    idx
}

fn support_count(fraction: f64, len: usize) -> usize {
    (fraction * len as f64).floor() as usize
}

fn make_noise(spec: &SyntheticSpec, truth: &Matrix) -> Matrix {
    let (rows, cols) = spec.observation_shape();
    let len = rows * cols;
    let mut noise_rng = seeded(spec.seed, Stream::Noise);
    let mut data = vec![0.0; len];
    match spec.noise {
        NoiseModel::AdditiveGaussian { sigma } => {
            for v in &mut data {
                *v = sigma * standard_normal(&mut noise_rng);
            }
        }
        NoiseModel::GaussianScaled { eta_factor, sparsity } => {
            let eta = eta_factor * truth.max_abs();
            let support = random_support(&mut seeded(spec.seed, Stream::Support), len, support_count(sparsity, len));
            for i in support {
                data[i] = eta * standard_normal(&mut noise_rng);
            }
        }
        NoiseModel::SparseLarge { sparsity, magnitude } => {
            let support = random_support(&mut seeded(spec.seed, Stream::Support), len, support_count(sparsity, len));
            for i in support {
                data[i] = noise_rng.gen_range(-magnitude..=magnitude);
            }
        }
    }
    Matrix::new(rows, cols, data).expect("noise is finite by construction")
}

fn make_weights(spec: &SyntheticSpec) -> Matrix {
    let (rows, cols) = spec.observation_shape();
    let mut rng = seeded(spec.seed, Stream::Weights);
    match spec.weights {
        WeightModel::AllOnes => Matrix::ones(rows, cols),
        WeightModel::UniformInt { w_min, w_max } => {
            Matrix::from_fn(rows, cols, |_, _| rng.gen_range(w_min..=w_max) as f64)
        }
        WeightModel::LargeOnSupport { fraction, w_min, w_max } => {
            let len = rows * cols;
            let mut data = vec![1.0; len];
            for i in random_support(&mut rng, len, support_count(fraction, len)) {
                data[i] = if w_min == w_max { w_min } else { rng.gen_range(w_min..=w_max) };
            }
            Matrix::new(rows, cols, data).expect("weights are finite by construction")
        }
    }
}

fn make_mask(spec: &SyntheticSpec, omega: f64) -> Matrix {
    let (m, n) = (spec.m, spec.n);
    let mut rng = seeded(spec.seed, Stream::Mask);
    if spec.exact_mask_count {
        let count = ((omega * (m * n) as f64).round() as usize).max(1);
        let mut data = vec![0.0; m * n];
        for i in random_support(&mut rng, m * n, count) {
            data[i] = 1.0;
        }
        Matrix::new(m, n, data).expect("mask is finite")
    } else {
        Matrix::from_fn(m, n, |_, _| if rng.gen::<f64>() < omega { 1.0 } else { 0.0 })
    }
}

/// Builds `L = A B` with standard normal `A` (m x r) and `B` (r x n), the
/// observation operator, `F = Psi(L) + E` and `W`.
pub fn generate(spec: &SyntheticSpec) -> Result<SyntheticInstance> {
    spec.validate()?;
    let mut truth_rng = seeded(spec.seed, Stream::Truth);
    let a = gaussian_matrix(&mut truth_rng, spec.m, spec.rank);
    let b = gaussian_matrix(&mut truth_rng, spec.rank, spec.n);
    let truth = a.matmul(&b)?;

    let op = if let Some(d) = spec.sensing_rows {
        let scale = 1.0 / (d as f64).sqrt();
        let mut rng = seeded(spec.seed, Stream::Sensing);
        let sensing = Matrix::from_fn(d, spec.m * spec.n, |_, _| scale * standard_normal(&mut rng));
        ObservationOp::dense_sensing(sensing, spec.m, spec.n)?
    } else if let Some(omega) = spec.mask {
        let mask = make_mask(spec, omega);
        if mask.is_zero() {
            return Err(Error::InvalidSpec(format!("mask fraction {omega} observed no entries")));
        }
        ObservationOp::entry_mask(mask)?
    } else {
        ObservationOp::identity(spec.m, spec.n)
    };

    let noise = make_noise(spec, &truth);
    let observed = &op.apply(&truth)? + &noise;
    let weights = make_weights(spec);
    Ok(SyntheticInstance { spec: spec.clone(), op, observed, weights, ground_truth: truth, noise })
}

/// `||F - X|| / sqrt(mn)`
pub fn rmse(f: &Matrix, x: &Matrix) -> Result<f64> {
    if f.shape() != x.shape() {
        return Err(Error::dim("rmse", f.shape(), x.shape()));
    }
    Ok((f - x).frobenius_norm() / (f.len() as f64).sqrt())
}

/// `||(F - X) ⊙ W|| / ||W||` inside the observations, or
/// `||(F - X) ⊙ (1 - W)|| / ||1 - W||` outside them.
pub fn fidelity(f: &Matrix, x: &Matrix, w: &Matrix, inside: bool) -> Result<f64> {
    if f.shape() != x.shape() {
        return Err(Error::dim("fidelity", f.shape(), x.shape()));
    }
    if f.shape() != w.shape() {
        return Err(Error::dim("fidelity", f.shape(), w.shape()));
    }
    let selector = if inside {
        w.clone()
    } else {
        if w.as_slice().iter().any(|&v| v != 0.0 && v != 1.0) {
            return Err(Error::InvalidArgument("the outside fidelity needs a binary selector".into()));
        }
        w.map(|v| 1.0 - v)
    };
    let norm = selector.frobenius_norm();
    if norm == 0.0 {
        let side = if inside { "W" } else { "1 - W" };
        return Err(Error::UndefinedMetric(format!("fidelity selector {side} is zero")));
    }
    Ok(frobenius_norm(&(f - x).hadamard(&selector)?) / norm)
}

/// `sigma_1(W) / sigma_min(W)`; infinite when `W` is numerically singular.
pub fn weight_condition_number(w: &Matrix) -> Result<f64> {
    let s = singular_values(w)?;
    let top = s[0];
    let bottom = *s.last().expect("matrices are nonempty");
    if top == 0.0 || bottom <= top * f64::EPSILON * w.rows().max(w.cols()) as f64 {
        Ok(f64::INFINITY)
    } else {
        Ok(top / bottom)
    }
}

/// Weight maxima used for the condition-number study.
pub const CONDITION_SWEEP_MAXIMA: [u64; 11] =
    [10, 50, 100, 500, 1000, 5000, 10_000, 50_000, 100_000, 5_000_000, 10_000_000];

#[derive(Debug, Clone)]
pub struct SweepEntry {
    pub w_max: u64,
    pub instance: SyntheticInstance,
    pub kappa: f64,
}

/// One instance per weight maximum, with integer weights in `1..=w_max`.
/// Everything but the weights is shared across the sweep.
pub fn condition_number_sweep(base: &SyntheticSpec, max_weights: &[u64]) -> Result<Vec<SweepEntry>> {
    match base.weights {
        WeightModel::UniformInt { w_min: 1, .. } => {}
        other => {
            return Err(Error::InvalidSpec(format!(
                "the condition sweep needs integer weights with w_min = 1, got {other:?}"
            )))
        }
    }
    max_weights
        .iter()
        .map(|&w_max| {
            let spec = SyntheticSpec { weights: WeightModel::UniformInt { w_min: 1, w_max }, ..base.clone() };
            let instance = generate(&spec)?;
            let kappa = weight_condition_number(&instance.weights)?;
            Ok(SweepEntry { w_max, instance, kappa })
        })
        .collect()
}
