//! Plain-text artifacts: matrices as header-less CSV and a JSON manifest that
//! records the shape of every file in a problem directory.
//!
//! Values are written with Rust's shortest round-trip formatting, so reading
//! a file back reproduces the matrix bit for bit.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::operators::{ObservationOp, Problem};
use crate::problems::{SyntheticInstance, SyntheticSpec};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const OBSERVED_FILE: &str = "F.csv";
pub const WEIGHTS_FILE: &str = "W.csv";
pub const MASK_FILE: &str = "mask.csv";
pub const TRUTH_FILE: &str = "ground_truth.csv";
pub const SENSING_FILE: &str = "sensing.csv";
pub const NOISE_FILE: &str = "noise.csv";

pub fn write_matrix_csv(path: &Path, m: &Matrix) -> Result<()> {
    let mut writer = csv::WriterBuilder::new().has_headers(false).from_path(path)?;
    for i in 0..m.rows() {
        writer.write_record(m.row(i).iter().map(|v| v.to_string()))?;
    }
    writer.flush()?;
    Ok(())
}

pub fn read_matrix_csv(path: &Path) -> Result<Matrix> {
    let mut reader = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_path(path)?;
    let mut data = Vec::new();
    let mut cols = None;
    let mut rows = 0;
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        match cols {
            None => cols = Some(record.len()),
            Some(c) if c != record.len() => {
                return Err(Error::Parse(format!(
                    "{}: row {} has {} fields, expected {c}",
                    path.display(),
                    i + 1,
                    record.len()
                )))
            }
            _ => {}
        }
        for (j, field) in record.iter().enumerate() {
            let value: f64 = field.parse().map_err(|_| {
                Error::Parse(format!("{}: bad number {field:?} at row {}, column {}", path.display(), i + 1, j + 1))
            })?;
            data.push(value);
        }
        rows += 1;
    }
    let cols = cols.ok_or_else(|| Error::Parse(format!("{}: empty matrix file", path.display())))?;
    Matrix::new(rows, cols, data)
}

/// Reads a matrix and checks it against the shape recorded in the manifest.
pub fn read_matrix_checked(path: &Path, expected: (usize, usize)) -> Result<Matrix> {
    let m = read_matrix_csv(path)?;
    if m.shape() != expected {
        return Err(Error::dim("matrix file vs manifest", m.shape(), expected));
    }
    Ok(m)
}

/// Everything needed to rebuild a generated problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemManifest {
    pub version: String,
    pub seed: u64,
    pub spec: SyntheticSpec,
    /// Observation operator kind: `identity`, `entry_mask` or `dense_sensing`.
    pub operator: String,
    /// Domain shape `(m, n)` of the unknown.
    pub domain: (usize, usize),
    /// File name to `(rows, cols)`.
    pub files: BTreeMap<String, (usize, usize)>,
    /// `||E||_F` of the generated noise, used by the tau presets.
    pub noise_norm: f64,
}

/// Writes `F.csv`, `W.csv`, `ground_truth.csv`, `noise.csv`, `mask.csv` or
/// `sensing.csv` when present, and the manifest.
pub fn write_problem_dir(dir: &Path, inst: &SyntheticInstance) -> Result<ProblemManifest> {
    fs::create_dir_all(dir)?;
    let mut files = BTreeMap::new();
    let mut put = |name: &str, m: &Matrix| -> Result<()> {
        write_matrix_csv(&dir.join(name), m)?;
        files.insert(name.to_string(), m.shape());
        Ok(())
    };
    put(OBSERVED_FILE, &inst.observed)?;
    put(WEIGHTS_FILE, &inst.weights)?;
    put(TRUTH_FILE, &inst.ground_truth)?;
    put(NOISE_FILE, &inst.noise)?;
    match &inst.op {
        ObservationOp::EntryMask { mask } => put(MASK_FILE, mask)?,
        ObservationOp::DenseSensing { sensing, .. } => put(SENSING_FILE, sensing)?,
        ObservationOp::Identity { .. } => {}
    }
    let manifest = ProblemManifest {
        version: crate::VERSION.to_string(),
        seed: inst.spec.seed,
        spec: inst.spec.clone(),
        operator: inst.op.name().to_string(),
        domain: inst.op.domain_shape(),
        files,
        noise_norm: inst.noise_norm(),
    };
    fs::write(dir.join(MANIFEST_FILE), serde_json::to_string_pretty(&manifest)?)?;
    Ok(manifest)
}

/// A problem read back from disk, with `tau` still open.
#[derive(Debug, Clone)]
pub struct LoadedProblem {
    pub manifest: ProblemManifest,
    pub op: ObservationOp,
    pub observed: Matrix,
    pub weights: Matrix,
    pub ground_truth: Option<Matrix>,
    pub noise: Option<Matrix>,
}

impl LoadedProblem {
    /// `||E||_F` from `noise.csv`, falling back to the manifest value.
    pub fn noise_norm(&self) -> f64 {
        self.noise.as_ref().map_or(self.manifest.noise_norm, Matrix::frobenius_norm)
    }

    pub fn problem(&self, tau: f64) -> Result<Problem> {
        Problem::new(self.op.clone(), self.observed.clone(), self.weights.clone(), tau)
    }
}

pub fn read_manifest(dir: &Path) -> Result<ProblemManifest> {
    let text = fs::read_to_string(dir.join(MANIFEST_FILE))?;
    Ok(serde_json::from_str(&text)?)
}

pub fn read_problem_dir(dir: &Path) -> Result<LoadedProblem> {
    let manifest = read_manifest(dir)?;
    let shape_of = |name: &str| -> Result<(usize, usize)> {
        manifest
            .files
            .get(name)
            .copied()
            .ok_or_else(|| Error::Parse(format!("manifest does not list {name}")))
    };
    let load = |name: &str| -> Result<Matrix> { read_matrix_checked(&dir.join(name), shape_of(name)?) };
    let (m, n) = manifest.domain;
    let op = match manifest.operator.as_str() {
        "identity" => ObservationOp::identity(m, n),
        "entry_mask" => ObservationOp::entry_mask(load(MASK_FILE)?)?,
        "dense_sensing" => ObservationOp::dense_sensing(load(SENSING_FILE)?, m, n)?,
        other => return Err(Error::Parse(format!("unknown operator {other:?} in manifest"))),
    };
    if op.domain_shape() != manifest.domain {
        return Err(Error::dim("operator domain vs manifest", op.domain_shape(), manifest.domain));
    }
    let observed = load(OBSERVED_FILE)?;
    let weights = load(WEIGHTS_FILE)?;
    let ground_truth = if manifest.files.contains_key(TRUTH_FILE) { Some(load(TRUTH_FILE)?) } else { None };
    if let Some(truth) = &ground_truth {
        if truth.shape() != manifest.domain {
            return Err(Error::dim("ground truth vs domain", truth.shape(), manifest.domain));
        }
    }
    let noise = if manifest.files.contains_key(NOISE_FILE) { Some(load(NOISE_FILE)?) } else { None };
    if let Some(noise) = &noise {
        if noise.shape() != observed.shape() {
            return Err(Error::dim("noise vs F", noise.shape(), observed.shape()));
        }
    }
    if observed.shape() != op.codomain_shape() {
        return Err(Error::dim("F vs operator codomain", observed.shape(), op.codomain_shape()));
    }
    if weights.shape() != observed.shape() {
        return Err(Error::dim("W vs F", weights.shape(), observed.shape()));
    }
    Ok(LoadedProblem { manifest, op, observed, weights, ground_truth, noise })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{generate, NoiseModel, WeightModel};
    use crate::rng::{gaussian_matrix, seeded, Stream};

    fn spec() -> SyntheticSpec {
        SyntheticSpec {
            m: 12,
            n: 9,
            rank: 2,
            noise: NoiseModel::AdditiveGaussian { sigma: 0.1 },
            weights: WeightModel::UniformInt { w_min: 1, w_max: 4 },
            mask: Some(0.5),
            exact_mask_count: false,
            sensing_rows: None,
            seed: 5,
        }
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let m = gaussian_matrix(&mut seeded(1, Stream::Truth), 7, 4).scale(1e-7);
        let path = dir.path().join("m.csv");
        write_matrix_csv(&path, &m).unwrap();
        assert_eq!(read_matrix_csv(&path).unwrap(), m);
    }

    #[test]
    fn malformed_csv_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        fs::write(&path, "1,2\n3\n").unwrap();
        assert!(matches!(read_matrix_csv(&path), Err(Error::Parse(_) | Error::Csv(_))));
        fs::write(&path, "1,x\n").unwrap();
        assert!(matches!(read_matrix_csv(&path), Err(Error::Parse(_))));
        fs::write(&path, "").unwrap();
        assert!(read_matrix_csv(&path).is_err());
        assert!(matches!(read_matrix_checked(&dir.path().join("missing.csv"), (1, 1)), Err(Error::Csv(_) | Error::Io(_))));
    }

    #[test]
    fn problem_dir_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let inst = generate(&spec()).unwrap();
        let manifest = write_problem_dir(dir.path(), &inst).unwrap();
        assert_eq!(manifest.files.len(), 5);
        let loaded = read_problem_dir(dir.path()).unwrap();
        assert_eq!(loaded.manifest, manifest);
        assert_eq!(loaded.observed, inst.observed);
        assert_eq!(loaded.op, inst.op);
        assert_eq!(loaded.ground_truth.as_ref(), Some(&inst.ground_truth));
        assert_eq!(loaded.manifest.noise_norm, inst.noise_norm());
        assert_eq!(loaded.noise_norm(), inst.noise_norm());
    }

    #[test]
    fn sensing_dir_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let inst = generate(&SyntheticSpec { mask: None, sensing_rows: Some(20), ..spec() }).unwrap();
        write_problem_dir(dir.path(), &inst).unwrap();
        assert_eq!(read_problem_dir(dir.path()).unwrap().op, inst.op);
    }

    #[test]
    fn shape_mismatch_is_a_dimension_error() {
        let dir = tempfile::tempdir().unwrap();
        let inst = generate(&spec()).unwrap();
        write_problem_dir(dir.path(), &inst).unwrap();
        write_matrix_csv(&dir.path().join(WEIGHTS_FILE), &Matrix::ones(3, 3)).unwrap();
        assert!(matches!(read_problem_dir(dir.path()), Err(Error::Dimension { .. })));
    }
}
