//! Labeled point sets: the finite stand-in for the support of a
//! data-generating distribution, plus CSV persistence and a seeded generator
//! for separable synthetic data.
//!
//! The CSV layout is `x1,...,xn,y` with a header row, features printed with
//! 17 significant digits (lossless for `f64`), and labels written as `1` or
//! `-1`.

use std::fmt;
use std::path::Path;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::rng;

/// A feature vector with a binary label in `{+1, -1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledPoint {
    x: Vec<f64>,
    y: i8,
}

impl LabeledPoint {
    pub fn new(x: Vec<f64>, y: i8) -> Result<Self> {
        if y != 1 && y != -1 {
            return Err(Error::InvalidConfig(format!(
                "label must be +1 or -1, got {y}"
            )));
        }
        if x.is_empty() {
            return Err(Error::InvalidConfig("point has no coordinates".into()));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig(
                "point coordinates must be finite".into(),
            ));
        }
        Ok(Self { x, y })
    }

    pub fn coords(&self) -> &[f64] {
        &self.x
    }

    pub fn label(&self) -> i8 {
        self.y
    }
}

/// A nonempty, dimension-consistent collection of labeled points.
///
/// Points with label `+1` stand in for the positive support, points with
/// label `-1` for the negative support. The set is immutable after
/// construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportSet {
    points: Vec<LabeledPoint>,
    dim: usize,
}

impl SupportSet {
    pub fn new(points: Vec<LabeledPoint>) -> Result<Self> {
        let dim = match points.first() {
            Some(p) => p.coords().len(),
            None => {
                return Err(Error::InvalidConfig(
                    "a support set must contain at least one point".into(),
                ))
            }
        };
        for p in &points {
            if p.coords().len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: p.coords().len(),
                });
            }
        }
        Ok(Self { points, dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    /// Always false: emptiness is rejected at construction.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn points(&self) -> &[LabeledPoint] {
        &self.points
    }

    /// Coordinate slices of every point, label ignored.
    pub fn coordinates(&self) -> Vec<&[f64]> {
        self.points.iter().map(|p| p.coords()).collect()
    }

    /// Coordinate slices of the points with the given label.
    pub fn class_points(&self, label: i8) -> Vec<&[f64]> {
        self.points
            .iter()
            .filter(|p| p.label() == label)
            .map(|p| p.coords())
            .collect()
    }

    pub fn positives(&self) -> impl Iterator<Item = &LabeledPoint> {
        self.points.iter().filter(|p| p.label() == 1)
    }

    pub fn negatives(&self) -> impl Iterator<Item = &LabeledPoint> {
        self.points.iter().filter(|p| p.label() == -1)
    }

    /// Largest point norm, `max ||x||`.
    pub fn radius(&self) -> f64 {
        self.points
            .iter()
            .map(|p| linalg::norm(p.coords()))
            .fold(0.0, f64::max)
    }

    /// Largest number of nonzero coordinates, `max ||x||_0`.
    pub fn max_sparsity(&self) -> usize {
        self.points
            .iter()
            .map(|p| linalg::sparsity(p.coords()))
            .max()
            .unwrap_or(0)
    }
}

/// A separating hyperplane `(w, b)` under the functional-margin-1
/// convention: the set is separable by `(w, b)` when
/// `y (<w, x> + b) >= 1` for every point, and the geometric margin is
/// `1 / ||w||`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hyperplane {
    pub w: Vec<f64>,
    pub b: f64,
}

impl Hyperplane {
    pub fn new(w: Vec<f64>, b: f64) -> Result<Self> {
        if w.iter().any(|v| !v.is_finite()) || !b.is_finite() {
            return Err(Error::InvalidConfig(
                "hyperplane coefficients must be finite".into(),
            ));
        }
        if linalg::norm_sq(&w) == 0.0 {
            return Err(Error::InvalidConfig(
                "hyperplane normal must be nonzero".into(),
            ));
        }
        Ok(Self { w, b })
    }

    pub fn dim(&self) -> usize {
        self.w.len()
    }

    pub fn w_norm(&self) -> f64 {
        linalg::norm(&self.w)
    }

    /// Geometric margin `1 / ||w||`.
    pub fn margin(&self) -> f64 {
        1.0 / self.w_norm()
    }
}

impl fmt::Display for Hyperplane {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(w: {:?}, b: {})", self.w, self.b)
    }
}

/// Configuration for [`generate_separable`].
#[derive(Debug, Clone)]
pub struct GenConfig {
    /// Ambient dimension n.
    pub dim: usize,
    /// Points generated per class.
    pub count_per_class: usize,
    /// Target geometric margin; the planted hyperplane has `||w0|| = 1/margin`.
    pub margin: f64,
    /// Radius cap: every generated point satisfies `||x|| <= radius`.
    /// Must be at least `1/margin`; values well above that keep the
    /// rejection rate low (roughly `radius >= margin * sqrt(dim)` once the
    /// dimension grows).
    pub radius: f64,
    /// Optional sparsity cap `||x||_0 <= s`.
    pub sparsity: Option<usize>,
    /// Stream seed; identical configurations produce identical sets.
    pub seed: u64,
    /// Offset of the planted hyperplane. Defaults to 0.
    pub bias: f64,
}

impl GenConfig {
    pub fn new(dim: usize, count_per_class: usize, margin: f64, radius: f64, seed: u64) -> Self {
        Self {
            dim,
            count_per_class,
            margin,
            radius,
            sparsity: None,
            seed,
            bias: 0.0,
        }
    }

    pub fn with_sparsity(mut self, s: usize) -> Self {
        self.sparsity = Some(s);
        self
    }

    pub fn with_bias(mut self, b: f64) -> Self {
        self.bias = b;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::InvalidConfig("dimension must be at least 1".into()));
        }
        if self.count_per_class == 0 {
            return Err(Error::InvalidConfig(
                "count per class must be at least 1".into(),
            ));
        }
        if !(self.margin > 0.0) || !self.margin.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "margin must be positive and finite, got {}",
                self.margin
            )));
        }
        if !self.radius.is_finite() || self.radius < 1.0 / self.margin {
            return Err(Error::InvalidConfig(format!(
                "radius {} is below 1/margin = {}; the classes cannot fit",
                self.radius,
                1.0 / self.margin
            )));
        }
        if !self.bias.is_finite() {
            return Err(Error::InvalidConfig("bias must be finite".into()));
        }
        if let Some(s) = self.sparsity {
            if s == 0 || s > self.dim {
                return Err(Error::InvalidConfig(format!(
                    "sparsity {s} must lie in 1..=dim ({})",
                    self.dim
                )));
            }
        }
        Ok(())
    }
}

/// Draw cap per requested point before the sampler reports a stall.
const MAX_DRAWS_PER_POINT: usize = 1_000_000;

/// Synthesize a separable labeled set together with the planted hyperplane.
///
/// The planted normal `w0` is sampled uniformly on the sphere and scaled to
/// `||w0|| = 1/margin`; candidate points are drawn uniformly from the radius
/// ball (restricted to a random coordinate support when a sparsity cap is
/// set), labeled by the sign of `<w0, x> + b`, and rejected while
/// `|<w0, x> + b| < 1`. Rejection keeps the functional-margin constraint
/// exact rather than approximate. Deterministic for a fixed seed.
pub fn generate_separable(cfg: &GenConfig) -> Result<(SupportSet, Hyperplane)> {
    cfg.validate()?;
    let mut gen = rng::seeded(cfg.seed);

    // Planted normal, ||w0|| = 1/margin.
    let mut w0 = loop {
        let v: Vec<f64> = (0..cfg.dim).map(|_| gen.sample(StandardNormal)).collect();
        let n = linalg::norm(&v);
        if n > 0.0 {
            break v.iter().map(|c| c / n).collect::<Vec<f64>>();
        }
    };
    let inv_margin = 1.0 / cfg.margin;
    for c in &mut w0 {
        *c *= inv_margin;
    }
    let plane = Hyperplane::new(w0, cfg.bias)?;

    let target = cfg.count_per_class;
    let mut positives: Vec<Vec<f64>> = Vec::with_capacity(target);
    let mut negatives: Vec<Vec<f64>> = Vec::with_capacity(target);
    let mut points: Vec<LabeledPoint> = Vec::with_capacity(2 * target);
    let max_draws = MAX_DRAWS_PER_POINT.saturating_mul(2 * target);

    let mut draws = 0usize;
    while positives.len() < target || negatives.len() < target {
        if draws >= max_draws {
            return Err(Error::InvalidConfig(format!(
                "rejection sampling stalled after {draws} draws; \
                 increase the radius relative to the margin"
            )));
        }
        draws += 1;

        let x = match cfg.sparsity {
            Some(s) if s < cfg.dim => sample_sparse_ball(&mut gen, cfg.dim, s, cfg.radius),
            _ => sample_ball(&mut gen, cfg.dim, cfg.radius),
        };
        let value = linalg::dot(&plane.w, &x) + plane.b;
        if value >= 1.0 && positives.len() < target {
            positives.push(x.clone());
            points.push(LabeledPoint::new(x, 1)?);
        } else if value <= -1.0 && negatives.len() < target {
            negatives.push(x.clone());
            points.push(LabeledPoint::new(x, -1)?);
        }
    }

    Ok((SupportSet::new(points)?, plane))
}

/// Uniform sample from the ball of the given radius.
fn sample_ball<R: Rng>(gen: &mut R, dim: usize, radius: f64) -> Vec<f64> {
    let mut dir = loop {
        let v: Vec<f64> = (0..dim).map(|_| gen.sample(StandardNormal)).collect();
        let n = linalg::norm(&v);
        if n > 0.0 {
            break v.iter().map(|c| c / n).collect::<Vec<f64>>();
        }
    };
    let u: f64 = gen.random();
    let r = radius * u.powf(1.0 / dim as f64);
    for c in &mut dir {
        *c *= r;
    }
    dir
}

/// Uniform sample from an s-dimensional ball placed on a random coordinate
/// support of size s.
fn sample_sparse_ball<R: Rng>(gen: &mut R, dim: usize, s: usize, radius: f64) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..dim).collect();
    for i in 0..s {
        let j = gen.random_range(i..dim);
        idx.swap(i, j);
    }
    let values = sample_ball(gen, s, radius);
    let mut x = vec![0.0; dim];
    for (slot, v) in idx[..s].iter().zip(values) {
        x[*slot] = v;
    }
    x
}

/// Write a set as CSV: header `x1,...,xn,y`, features with 17 significant
/// digits, labels as `1` / `-1`.
pub fn save_csv(set: &SupportSet, path: &Path) -> Result<()> {
    let io_err = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut writer = csv::Writer::from_path(path).map_err(|e| map_csv_io(e, path))?;

    let mut header: Vec<String> = (1..=set.dim()).map(|i| format!("x{i}")).collect();
    header.push("y".into());
    writer.write_record(&header).map_err(|e| map_csv_io(e, path))?;

    for point in set.points() {
        let mut record: Vec<String> = point.coords().iter().map(|v| format_value(*v)).collect();
        record.push(point.label().to_string());
        writer.write_record(&record).map_err(|e| map_csv_io(e, path))?;
    }
    writer.flush().map_err(io_err)?;
    Ok(())
}

/// 17 significant digits: lossless decimal form for `f64`.
fn format_value(v: f64) -> String {
    format!("{v:.16e}")
}

/// Load a set from CSV. The header must contain a column named `y` holding
/// `+1`/`-1` labels; every other column is a numeric feature, kept in file
/// order. Row order is preserved.
pub fn load_csv(path: &Path) -> Result<SupportSet> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| map_csv_io(e, path))?;

    let headers = reader.headers().map_err(|e| map_csv_io(e, path))?.clone();
    let label_col = headers.iter().position(|h| h == "y").ok_or_else(|| Error::Parse {
        path: path.to_path_buf(),
        row: 0,
        column: "y".into(),
        message: "no label column named \"y\" in the header".into(),
    })?;
    let feature_cols: Vec<usize> = (0..headers.len()).filter(|c| *c != label_col).collect();
    if feature_cols.is_empty() {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            row: 0,
            column: "header".into(),
            message: "no feature columns".into(),
        });
    }

    let mut points = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            row,
            column: "<record>".into(),
            message: e.to_string(),
        })?;
        if record.len() != headers.len() {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                row,
                column: "<record>".into(),
                message: format!(
                    "expected {} fields, got {}",
                    headers.len(),
                    record.len()
                ),
            });
        }

        let mut coords = Vec::with_capacity(feature_cols.len());
        for &c in &feature_cols {
            let raw = &record[c];
            let value: f64 = raw.parse().map_err(|_| Error::Parse {
                path: path.to_path_buf(),
                row,
                column: headers[c].to_string(),
                message: format!("malformed numeric cell {raw:?}"),
            })?;
            if !value.is_finite() {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    row,
                    column: headers[c].to_string(),
                    message: format!("non-finite value {raw:?}"),
                });
            }
            coords.push(value);
        }

        let raw_label = &record[label_col];
        let label: i64 = raw_label
            .strip_prefix('+')
            .unwrap_or(raw_label)
            .parse()
            .map_err(|_| Error::InvalidLabel {
                path: path.to_path_buf(),
                row,
                value: raw_label.to_string(),
            })?;
        let y = match label {
            1 => 1i8,
            -1 => -1i8,
            _ => {
                return Err(Error::InvalidLabel {
                    path: path.to_path_buf(),
                    row,
                    value: raw_label.to_string(),
                })
            }
        };
        points.push(LabeledPoint::new(coords, y)?);
    }

    if points.is_empty() {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            row: 0,
            column: "<file>".into(),
            message: "file contains no data rows".into(),
        });
    }
    SupportSet::new(points)
}

fn map_csv_io(err: csv::Error, path: &Path) -> Error {
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
    use std::io::Write;

    fn tmpfile(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f.flush().unwrap();
        f
    }

    #[test]
    fn load_two_points() {
        let f = tmpfile("x1,x2,y\n1,0,+1\n-1,0,-1\n");
        let set = load_csv(f.path()).unwrap();
        assert_eq!(set.dim(), 2);
        assert_eq!(set.len(), 2);
        assert_eq!(set.points()[0].coords(), &[1.0, 0.0]);
        assert_eq!(set.points()[0].label(), 1);
        assert_eq!(set.points()[1].label(), -1);
        assert_eq!(set.positives().count(), 1);
        assert_eq!(set.negatives().count(), 1);
    }

    #[test]
    fn load_rejects_invalid_label() {
        let f = tmpfile("x1,y\n1,0\n");
        match load_csv(f.path()) {
            Err(Error::InvalidLabel { row, value, .. }) => {
                assert_eq!(row, 1);
                assert_eq!(value, "0");
            }
            other => panic!("expected invalid label error, got {other:?}"),
        }
    }

    #[test]
    fn load_rejects_malformed_cell() {
        let f = tmpfile("x1,x2,y\n1,zap,1\n");
        match load_csv(f.path()) {
            Err(Error::Parse { row, column, .. }) => {
                assert_eq!(row, 1);
                assert_eq!(column, "x2");
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn load_rejects_empty_file() {
        let f = tmpfile("x1,y\n");
        assert!(load_csv(f.path()).is_err());
    }

    #[test]
    fn empty_set_is_rejected() {
        assert!(SupportSet::new(vec![]).is_err());
    }

    #[test]
    fn save_writes_header_plus_rows() {
        let set = SupportSet::new(vec![
            LabeledPoint::new(vec![1.0, 0.5], 1).unwrap(),
            LabeledPoint::new(vec![-1.0, 0.25], -1).unwrap(),
        ])
        .unwrap();
        let f = tempfile::NamedTempFile::new().unwrap();
        save_csv(&set, f.path()).unwrap();
        let content = std::fs::read_to_string(f.path()).unwrap();
        let lines: Vec<&str> = content.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[0], "x1,x2,y");
        assert!(lines[1].ends_with(",1"));
        assert!(lines[2].ends_with(",-1"));
    }

    #[test]
    fn roundtrip_is_bitwise_lossless() {
        let values = [
            0.1,
            -3.25,
            1.0 / 3.0,
            f64::MIN_POSITIVE,
            5e-324,
            -0.0,
            1.7976931348623157e308,
            9.869604401089358,
        ];
        let points: Vec<LabeledPoint> = values
            .chunks(2)
            .enumerate()
            .map(|(i, c)| LabeledPoint::new(c.to_vec(), if i % 2 == 0 { 1 } else { -1 }).unwrap())
            .collect();
        let set = SupportSet::new(points).unwrap();
        let f = tempfile::NamedTempFile::new().unwrap();
        save_csv(&set, f.path()).unwrap();
        let loaded = load_csv(f.path()).unwrap();
        assert_eq!(loaded.len(), set.len());
        for (a, b) in loaded.points().iter().zip(set.points()) {
            assert_eq!(a.label(), b.label());
            for (va, vb) in a.coords().iter().zip(b.coords()) {
                assert_eq!(va.to_bits(), vb.to_bits(), "{va} vs {vb}");
            }
        }
    }

    #[test]
    fn generator_respects_contract() {
        let cfg = GenConfig::new(2, 1, 1.0, 2.0, 7);
        let (set, plane) = generate_separable(&cfg).unwrap();
        assert_eq!(set.len(), 2);
        // Independent margin audit.
        for p in set.points() {
            let v: f64 = p
                .coords()
                .iter()
                .zip(&plane.w)
                .map(|(a, b)| a * b)
                .sum::<f64>()
                + plane.b;
            assert!(p.label() as f64 * v >= 1.0 - 1e-12, "margin violated: {v}");
        }
        assert!((plane.w_norm() - 1.0).abs() < 1e-12);
        assert!(set.radius() <= cfg.radius + 1e-12);
    }

    #[test]
    fn generator_respects_sparsity() {
        let cfg = GenConfig::new(10, 5, 0.5, 4.0, 3).with_sparsity(3);
        let (set, _) = generate_separable(&cfg).unwrap();
        assert!(set.max_sparsity() <= 3);
        assert_eq!(set.positives().count(), 5);
        assert_eq!(set.negatives().count(), 5);
    }

    #[test]
    fn generator_is_deterministic() {
        let cfg = GenConfig::new(6, 8, 0.4, 6.0, 99).with_sparsity(4);
        let (a, pa) = generate_separable(&cfg).unwrap();
        let (b, pb) = generate_separable(&cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(pa, pb);
    }

    #[test]
    fn generator_rejects_infeasible_radius() {
        let cfg = GenConfig::new(2, 1, 0.5, 1.0, 7); // radius < 1/margin = 2
        assert!(generate_separable(&cfg).is_err());
    }
}
