//! Geometric distortion audits for compression matrices: inner-product and
//! squared-distance distortion over a finite point set, the conversions
//! between the two, exact restricted isometry constants at desk scale, and a
//! Monte Carlo Gaussian width estimate.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg;
use crate::projection::ProjectionMatrix;
use crate::rng;

use rand_distr::StandardNormal;

use rand::Rng;

/// One measured distortion value together with the pair attaining it
/// (lexicographically smallest index pair on ties).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistortionMeasurement {
    pub value: f64,
    pub argmax: (usize, usize),
}

/// Full audit of a matrix over a point set.
///
/// `eta_ip` is the exact supremum of `|<Qx, Qx'> - <x, x'>|` over all
/// unordered pairs including `x = x'`; `eta_sd` is the analogue for squared
/// distances. Including the diagonal in `eta_ip` matters: it is what makes
/// norm preservation part of the audit, and it is what guarantees
/// `eta_sd <= 4 * eta_ip`.
#[derive(Debug, Clone, Serialize)]
pub struct DistortionReport {
    pub eta_ip: f64,
    pub eta_sd: f64,
    pub argmax_ip: (usize, usize),
    pub argmax_sd: (usize, usize),
    pub n: usize,
    pub m: usize,
    pub set_size: usize,
}

/// Exact restricted isometry constant obtained by exhaustive support
/// enumeration.
#[derive(Debug, Clone, Serialize)]
pub struct RipEstimate {
    pub s: usize,
    pub delta_s: f64,
    pub method: &'static str,
    pub supports_examined: u64,
}

/// Monte Carlo estimate of the Gaussian width of a point set.
#[derive(Debug, Clone, Serialize)]
pub struct GaussianWidthEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub trials: usize,
    pub seed: u64,
}

fn check_points<P: AsRef<[f64]>>(q: &ProjectionMatrix, points: &[P]) -> Result<()> {
    if points.is_empty() {
        return Err(Error::InvalidConfig("point set must be nonempty".into()));
    }
    for p in points {
        if p.as_ref().len() != q.n() {
            return Err(Error::DimensionMismatch {
                expected: q.n(),
                got: p.as_ref().len(),
            });
        }
    }
    Ok(())
}

/// Largest inner-product deviation `|<Qx, Qx'> - <x, x'>|` over all pairs
/// of the set, diagonal pairs included.
pub fn inner_product_distortion<P: AsRef<[f64]>>(
    q: &ProjectionMatrix,
    points: &[P],
) -> Result<DistortionMeasurement> {
    check_points(q, points)?;
    let compressed: Vec<Vec<f64>> = points
        .iter()
        .map(|p| q.apply(p.as_ref()))
        .collect::<Result<_>>()?;

    let mut best = DistortionMeasurement {
        value: f64::NEG_INFINITY,
        argmax: (0, 0),
    };
    for i in 0..points.len() {
        for j in i..points.len() {
            let dev = (linalg::dot(&compressed[i], &compressed[j])
                - linalg::dot(points[i].as_ref(), points[j].as_ref()))
            .abs();
            if dev > best.value {
                best = DistortionMeasurement {
                    value: dev,
                    argmax: (i, j),
                };
            }
        }
    }
    Ok(best)
}

/// Largest squared-distance deviation `| ||Qx - Qx'||^2 - ||x - x'||^2 |`
/// over all pairs of the set. Diagonal pairs contribute zero.
pub fn squared_distance_distortion<P: AsRef<[f64]>>(
    q: &ProjectionMatrix,
    points: &[P],
) -> Result<DistortionMeasurement> {
    check_points(q, points)?;
    let compressed: Vec<Vec<f64>> = points
        .iter()
        .map(|p| q.apply(p.as_ref()))
        .collect::<Result<_>>()?;

    let mut best = DistortionMeasurement {
        value: f64::NEG_INFINITY,
        argmax: (0, 0),
    };
    for i in 0..points.len() {
        for j in i..points.len() {
            let dev = (linalg::distance_sq(&compressed[i], &compressed[j])
                - linalg::distance_sq(points[i].as_ref(), points[j].as_ref()))
            .abs();
            if dev > best.value {
                best = DistortionMeasurement {
                    value: dev,
                    argmax: (i, j),
                };
            }
        }
    }
    Ok(best)
}

/// Measure both distortions and assemble the report.
pub fn measure<P: AsRef<[f64]>>(q: &ProjectionMatrix, points: &[P]) -> Result<DistortionReport> {
    let ip = inner_product_distortion(q, points)?;
    let sd = squared_distance_distortion(q, points)?;
    Ok(DistortionReport {
        eta_ip: ip.value,
        eta_sd: sd.value,
        argmax_ip: ip.argmax,
        argmax_sd: sd.argmax,
        n: q.n(),
        m: q.m(),
        set_size: points.len(),
    })
}

/// An eta-inner-product-preserving matrix is `4 eta`-squared-distance
/// preserving over the same set: expand
/// `||Qx - Qx'||^2 = <Qx,Qx> + <Qx',Qx'> - 2<Qx,Qx'>` and bound each of the
/// three deviations by eta.
pub fn sd_bound_from_ip(eta_ip: f64) -> Result<f64> {
    if eta_ip < 0.0 {
        return Err(Error::Domain(format!("distortion must be >= 0, got {eta_ip}")));
    }
    Ok(4.0 * eta_ip)
}

/// An eta-squared-distance-preserving matrix is `1.5 eta`-inner-product
/// preserving over any set that contains the origin — the polarization
/// identity `<x,x'> = (||x-0||^2 + ||x'-0||^2 - ||x-x'||^2) / 2` uses three
/// pairwise distances, each distorted by at most eta.
///
/// The origin membership is the hypothesis of the conversion, so it is
/// checked exactly: some point must have all coordinates equal to zero.
pub fn ip_bound_from_sd<P: AsRef<[f64]>>(eta_sd: f64, points: &[P]) -> Result<f64> {
    if eta_sd < 0.0 {
        return Err(Error::Domain(format!("distortion must be >= 0, got {eta_sd}")));
    }
    let has_origin = points
        .iter()
        .any(|p| p.as_ref().iter().all(|v| *v == 0.0));
    if !has_origin {
        return Err(Error::Domain(
            "origin required: the set must contain the zero vector".into(),
        ));
    }
    Ok(1.5 * eta_sd)
}

/// Inner-product distortion bound for s-sparse sets of radius R:
/// `delta_2s * R^2`.
pub fn ip_bound_from_rip(delta_2s: f64, radius: f64) -> Result<f64> {
    if delta_2s < 0.0 || radius < 0.0 {
        return Err(Error::Domain(format!(
            "restricted isometry constant and radius must be >= 0, got {delta_2s} and {radius}"
        )));
    }
    Ok(delta_2s * radius * radius)
}

/// Cap on the number of enumerated supports.
pub const RIP_SUPPORT_CAP: u64 = 1_000_000;

/// Exact order-s restricted isometry constant of `q`:
/// `max_{|S| = s} || Q_S^T Q_S - I ||_2`, by enumerating every size-s
/// support (smaller supports are dominated by their supersets) and taking
/// the spectral deviation of each s x s Gram block.
///
/// Certifying restricted isometry is intractable in general; exhaustive
/// enumeration is exact at desk scale, which is the point of this routine.
/// Supports are refused beyond [`RIP_SUPPORT_CAP`].
pub fn rip_constant_exact(q: &ProjectionMatrix, s: usize) -> Result<RipEstimate> {
    let n = q.n();
    if s == 0 || s > n {
        return Err(Error::Domain(format!(
            "sparsity order must lie in 1..=n ({n}), got {s}"
        )));
    }
    if !binomial_within(n, s, RIP_SUPPORT_CAP) {
        return Err(Error::EnumerationCap {
            n,
            s,
            cap: RIP_SUPPORT_CAP,
        });
    }

    let mut delta = 0.0f64;
    let mut examined = 0u64;
    let mut support: Vec<usize> = (0..s).collect();
    let mut gram = vec![0.0f64; s * s];
    loop {
        for a in 0..s {
            for b in a..s {
                let mut v = q.column_dot(support[a], support[b]);
                if a == b {
                    v -= 1.0;
                }
                gram[a * s + b] = v;
                gram[b * s + a] = v;
            }
        }
        let dev = linalg::symmetric_spectral_norm(gram.clone(), s);
        if dev > delta {
            delta = dev;
        }
        examined += 1;
        if !next_combination(&mut support, n) {
            break;
        }
    }

    Ok(RipEstimate {
        s,
        delta_s: delta,
        method: "exact-enumeration",
        supports_examined: examined,
    })
}

/// True when C(n, s) <= cap, computed without overflow.
fn binomial_within(n: usize, s: usize, cap: u64) -> bool {
    let s = s.min(n - s);
    let mut c: u128 = 1;
    for i in 1..=s {
        c = c * (n - s + i) as u128 / i as u128;
        if c > cap as u128 {
            return false;
        }
    }
    true
}

/// Advance `comb` to the next size-k subset of `0..n` in lexicographic
/// order; false once exhausted.
fn next_combination(comb: &mut [usize], n: usize) -> bool {
    let k = comb.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if comb[i] != i + n - k {
            comb[i] += 1;
            for j in i + 1..k {
                comb[j] = comb[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Monte Carlo estimate of the Gaussian width
/// `E_g [ sup_{x in A} <g, x> ]` with standard normal `g`, reporting the
/// sample mean and its standard error. Deterministic per seed.
pub fn gaussian_width_mc<P: AsRef<[f64]>>(
    points: &[P],
    trials: usize,
    seed: u64,
) -> Result<GaussianWidthEstimate> {
    if points.is_empty() {
        return Err(Error::InvalidConfig("point set must be nonempty".into()));
    }
    if trials == 0 {
        return Err(Error::InvalidConfig("trials must be at least 1".into()));
    }
    let dim = points[0].as_ref().len();
    for p in points {
        if p.as_ref().len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: p.as_ref().len(),
            });
        }
    }

    let mut gen = rng::seeded(seed);
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..trials {
        let g: Vec<f64> = (0..dim).map(|_| gen.sample(StandardNormal)).collect();
        let sup = points
            .iter()
            .map(|p| linalg::dot(&g, p.as_ref()))
            .fold(f64::NEG_INFINITY, f64::max);
        sum += sup;
        sum_sq += sup * sup;
    }
    let mean = sum / trials as f64;
    let std_error = if trials >= 2 {
        let var = (sum_sq - sum * sum / trials as f64) / (trials as f64 - 1.0);
        (var.max(0.0) / trials as f64).sqrt()
    } else {
        0.0
    };
    Ok(GaussianWidthEstimate {
        mean,
        std_error,
        trials,
        seed,
    })
}
