//! Random compression matrices and their application to points and sets.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::dataset::{LabeledPoint, SupportSet};
use crate::error::{Error, Result};
use crate::linalg;
use crate::rng;

/// Entry distribution of a generated matrix.
///
/// All three random ensembles are isotropic with unit entry variance, so the
/// usual `1/sqrt(m)` scaling gives `E ||Qx||^2 = ||x||^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Ensemble {
    /// Standard normal entries.
    Gaussian,
    /// Entries `+1` or `-1`, equiprobable.
    Rademacher,
    /// Entries uniform on `[-sqrt(3), sqrt(3)]`.
    Uniform,
    /// Entries supplied by the caller (loaded from CSV or built in code).
    Explicit,
}

impl FromStr for Ensemble {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gaussian" => Ok(Self::Gaussian),
            "rademacher" => Ok(Self::Rademacher),
            "uniform" => Ok(Self::Uniform),
            "explicit" => Ok(Self::Explicit),
            other => Err(Error::UnknownEnsemble(other.into())),
        }
    }
}

impl fmt::Display for Ensemble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Self::Gaussian => "gaussian",
            Self::Rademacher => "rademacher",
            Self::Uniform => "uniform",
            Self::Explicit => "explicit",
        };
        f.write_str(name)
    }
}

/// A dense `m x n` compression matrix with its generation provenance.
///
/// `scaled` records whether the stored entries already include the
/// `1/sqrt(m)` factor. The matrix is immutable; `apply` and `apply_set` are
/// pure.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionMatrix {
    entries: Vec<f64>, // row-major, m rows of n
    m: usize,
    n: usize,
    ensemble: Ensemble,
    seed: u64,
    scaled: bool,
}

impl ProjectionMatrix {
    /// Generate an `m x n` matrix with i.i.d. entries from the given
    /// ensemble, deterministically for a fixed seed. Entries are drawn in
    /// row-major order; when `scaled` is set each entry is divided by
    /// `sqrt(m)` as it is drawn, so the scaled and unscaled matrices from
    /// the same seed agree entry-for-entry up to that division.
    pub fn generate(m: usize, n: usize, ensemble: Ensemble, seed: u64, scaled: bool) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::InvalidConfig(format!(
                "matrix dimensions must be at least 1x1, got {m}x{n}"
            )));
        }
        if ensemble == Ensemble::Explicit {
            return Err(Error::InvalidConfig(
                "explicit matrices are loaded or built, not generated".into(),
            ));
        }
        let mut gen = rng::seeded(seed);
        let root_m = (m as f64).sqrt();
        let sqrt3 = 3.0f64.sqrt();
        let mut entries = Vec::with_capacity(m * n);
        for _ in 0..m * n {
            let e: f64 = match ensemble {
                Ensemble::Gaussian => gen.sample(StandardNormal),
                Ensemble::Rademacher => {
                    if gen.random::<bool>() {
                        1.0
                    } else {
                        -1.0
                    }
                }
                Ensemble::Uniform => gen.random::<f64>() * (2.0 * sqrt3) - sqrt3,
                Ensemble::Explicit => unreachable!(),
            };
            entries.push(if scaled { e / root_m } else { e });
        }
        Ok(Self {
            entries,
            m,
            n,
            ensemble,
            seed,
            scaled,
        })
    }

    /// Wrap caller-supplied rows as an explicit matrix.
    pub fn explicit(rows: Vec<Vec<f64>>) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map(|r| r.len()).unwrap_or(0);
        if m == 0 || n == 0 {
            return Err(Error::InvalidConfig(
                "an explicit matrix needs at least one row and one column".into(),
            ));
        }
        let mut entries = Vec::with_capacity(m * n);
        for row in &rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: row.len(),
                });
            }
            for v in row {
                if !v.is_finite() {
                    return Err(Error::InvalidConfig("matrix entries must be finite".into()));
                }
                entries.push(*v);
            }
        }
        Ok(Self {
            entries,
            m,
            n,
            ensemble: Ensemble::Explicit,
            seed: 0,
            scaled: true,
        })
    }

    /// The `n x n` identity as an explicit matrix.
    pub fn identity(n: usize) -> Self {
        let mut rows = vec![vec![0.0; n]; n];
        for (i, row) in rows.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        Self::explicit(rows).expect("identity is a valid explicit matrix")
    }

    /// Load an explicit matrix from CSV: m rows, n numeric columns, no
    /// header.
    pub fn load_csv(path: &Path) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_path(path)
            .map_err(|e| csv_io(e, path))?;
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for (i, record) in reader.records().enumerate() {
            let row = i + 1;
            let record = record.map_err(|e| Error::Parse {
                path: path.to_path_buf(),
                row,
                column: "<record>".into(),
                message: e.to_string(),
            })?;
            let mut values = Vec::with_capacity(record.len());
            for (c, raw) in record.iter().enumerate() {
                let v: f64 = raw.parse().map_err(|_| Error::Parse {
                    path: path.to_path_buf(),
                    row,
                    column: format!("{}", c + 1),
                    message: format!("malformed numeric cell {raw:?}"),
                })?;
                values.push(v);
            }
            rows.push(values);
        }
        if rows.is_empty() {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                row: 0,
                column: "<file>".into(),
                message: "matrix file contains no rows".into(),
            });
        }
        Self::explicit(rows)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn ensemble(&self) -> Ensemble {
        self.ensemble
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn is_scaled(&self) -> bool {
        self.scaled
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// Inner product of columns `a` and `b`.
    pub(crate) fn column_dot(&self, a: usize, b: usize) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.m {
            acc += self.entries[i * self.n + a] * self.entries[i * self.n + b];
        }
        acc
    }

    /// Compress a single vector: `Qx`.
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: x.len(),
            });
        }
        Ok((0..self.m).map(|i| linalg::dot(self.row(i), x)).collect())
    }

    /// Compress every point of a set; labels are copied unchanged.
    pub fn apply_set(&self, set: &SupportSet) -> Result<SupportSet> {
        if set.dim() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: set.dim(),
            });
        }
        let mut points = Vec::with_capacity(set.len());
        for p in set.points() {
            points.push(LabeledPoint::new(self.apply(p.coords())?, p.label())?);
        }
        SupportSet::new(points)
    }
}

fn csv_io(err: csv::Error, path: &Path) -> Error {
    match err.into_kind() {
        csv::ErrorKind::Io(source) => Error::Io {
            path: path.to_path_buf(),
            source,
        },
        other => Error::Parse {
            path: path.to_path_buf(),
            row: 0,
            column: "<file>".into(),
            message: format!("{other:?}"),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scaled_rademacher_entries_are_half() {
        let q = ProjectionMatrix::generate(4, 4, Ensemble::Rademacher, 11, true).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert!(q.entry(i, j).abs() == 0.5, "entry {}", q.entry(i, j));
            }
        }
    }

    #[test]
    fn gaussian_mean_within_five_standard_errors() {
        // mn = 10^4 entries, fixed seed; SE of the empirical mean is
        // 1/sqrt(mn) = 0.01 for unit-variance entries.
        let q = ProjectionMatrix::generate(100, 100, Ensemble::Gaussian, 2024, false).unwrap();
        let mean: f64 = q.entries().iter().sum::<f64>() / 1e4;
        assert!(mean.abs() < 5.0 * 0.01, "mean {mean}");
    }

    #[test]
    fn uniform_entries_live_in_range() {
        let q = ProjectionMatrix::generate(20, 20, Ensemble::Uniform, 5, false).unwrap();
        let s3 = 3.0f64.sqrt();
        assert!(q.entries().iter().all(|v| (-s3..=s3).contains(v)));
    }

    #[test]
    fn generation_is_deterministic() {
        let a = ProjectionMatrix::generate(7, 13, Ensemble::Gaussian, 9, true).unwrap();
        let b = ProjectionMatrix::generate(7, 13, Ensemble::Gaussian, 9, true).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn scaled_equals_unscaled_over_root_m() {
        for ensemble in [Ensemble::Gaussian, Ensemble::Rademacher, Ensemble::Uniform] {
            let scaled = ProjectionMatrix::generate(9, 5, ensemble, 31, true).unwrap();
            let unscaled = ProjectionMatrix::generate(9, 5, ensemble, 31, false).unwrap();
            let root_m = 3.0;
            for (a, b) in scaled.entries().iter().zip(unscaled.entries()) {
                assert_eq!(a.to_bits(), (b / root_m).to_bits());
            }
        }
    }

    #[test]
    fn identity_apply_is_identity() {
        let q = ProjectionMatrix::identity(3);
        let x = vec![1.5, -2.0, 0.25];
        assert_eq!(q.apply(&x).unwrap(), x);
    }

    #[test]
    fn zero_matrix_maps_to_zero() {
        let q = ProjectionMatrix::explicit(vec![vec![0.0; 3]; 2]).unwrap();
        assert_eq!(q.apply(&[1.0, 2.0, 3.0]).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn basis_vector_extracts_column() {
        let q = ProjectionMatrix::generate(4, 3, Ensemble::Gaussian, 17, false).unwrap();
        let e1 = vec![1.0, 0.0, 0.0];
        let col: Vec<f64> = (0..4).map(|i| q.entry(i, 0)).collect();
        assert_eq!(q.apply(&e1).unwrap(), col);
    }

    #[test]
    fn apply_rejects_dimension_mismatch() {
        let q = ProjectionMatrix::identity(3);
        assert!(matches!(
            q.apply(&[1.0, 2.0]),
            Err(Error::DimensionMismatch { expected: 3, got: 2 })
        ));
    }

    #[test]
    fn apply_set_matches_pointwise_apply() {
        use crate::dataset::{GenConfig, generate_separable};
        let (set, _) = generate_separable(&GenConfig::new(6, 10, 0.5, 4.0, 21)).unwrap();
        let q = ProjectionMatrix::generate(3, 6, Ensemble::Uniform, 77, true).unwrap();
        let compressed = q.apply_set(&set).unwrap();
        assert_eq!(compressed.len(), set.len());
        assert_eq!(compressed.dim(), 3);
        for (orig, comp) in set.points().iter().zip(compressed.points()) {
            assert_eq!(comp.label(), orig.label());
            assert_eq!(comp.coords(), q.apply(orig.coords()).unwrap().as_slice());
        }
    }

    #[test]
    fn ensemble_parsing_roundtrips() {
        for name in ["gaussian", "rademacher", "uniform", "explicit"] {
            let e: Ensemble = name.parse().unwrap();
            assert_eq!(e.to_string(), name);
        }
        assert!(matches!(
            "fourier".parse::<Ensemble>(),
            Err(Error::UnknownEnsemble(_))
        ));
    }

    #[test]
    fn explicit_csv_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("q.csv");
        std::fs::write(&path, "1,0,0\n0,0.5,0\n").unwrap();
        let q = ProjectionMatrix::load_csv(&path).unwrap();
        assert_eq!(q.m(), 2);
        assert_eq!(q.n(), 3);
        assert_eq!(q.ensemble(), Ensemble::Explicit);
        assert_eq!(q.entry(1, 1), 0.5);
    }
}
