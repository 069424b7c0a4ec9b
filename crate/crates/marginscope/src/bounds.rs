//! Closed-form compression-length and generalization bounds.
//!
//! Every evaluator here is a pure formula. Two of them carry an absolute
//! constant (`C` for the restricted-isometry sample bounds, `K` for the
//! sub-Gaussian distortion bound) that depends only on the sub-Gaussian norm
//! of the matrix rows and is not pinned by the bounds themselves; both
//! default to 1.0, so treat the resulting lengths as order-of-magnitude
//! predictions unless calibrated against observed sweeps (see
//! [`fit_sparse_constant`] and [`fit_general_constant`]).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Configuration shared by the bound evaluators.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundsConfig {
    /// Constant of the restricted-isometry sample bounds. Default 1.0.
    #[serde(rename = "C", default = "one")]
    pub c: f64,
    /// Constant of the sub-Gaussian distortion bound. Default 1.0.
    #[serde(rename = "K", default = "one")]
    pub k: f64,
    /// Failure probability of the random-matrix bounds, in (0, 1).
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    /// Confidence parameter of the generalization bounds, in (0, 1).
    #[serde(default = "default_epsilon")]
    pub delta_conf: f64,
}

fn one() -> f64 {
    1.0
}

fn default_epsilon() -> f64 {
    0.05
}

impl Default for BoundsConfig {
    fn default() -> Self {
        Self {
            c: 1.0,
            k: 1.0,
            epsilon: 0.05,
            delta_conf: 0.05,
        }
    }
}

impl BoundsConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.c > 0.0) || !(self.k > 0.0) {
            return Err(Error::Domain(format!(
                "constants must be positive, got C = {}, K = {}",
                self.c, self.k
            )));
        }
        check_probability("epsilon", self.epsilon)?;
        check_probability("delta_conf", self.delta_conf)?;
        Ok(())
    }
}

fn check_probability(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0 && v < 1.0) {
        return Err(Error::Domain(format!("{name} must lie in (0, 1), got {v}")));
    }
    Ok(())
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(Error::Domain(format!("{name} must be positive, got {v}")));
    }
    Ok(())
}

fn check_nonnegative(name: &str, v: f64) -> Result<()> {
    if !(v >= 0.0) || !v.is_finite() {
        return Err(Error::Domain(format!("{name} must be >= 0, got {v}")));
    }
    Ok(())
}

/// Real-valued right side of the restricted-isometry sample bound:
/// `C delta^-2 (s ln(e n / s) + ln(2 / epsilon))`.
pub fn rip_sample_bound_value(s: usize, n: usize, delta: f64, epsilon: f64, c: f64) -> Result<f64> {
    if s == 0 || s > n {
        return Err(Error::Domain(format!(
            "sparsity s must lie in 1..=n ({n}), got {s}"
        )));
    }
    check_probability("delta", delta)?;
    check_probability("epsilon", epsilon)?;
    check_positive("C", c)?;
    let s = s as f64;
    let n = n as f64;
    Ok(c / (delta * delta) * (s * (std::f64::consts::E * n / s).ln() + (2.0 / epsilon).ln()))
}

/// Smallest number of rows `m` with
/// `m >= C delta^-2 (s ln(e n / s) + ln(2 / epsilon))`: rows of a scaled
/// sub-Gaussian matrix needed for its order-s restricted isometry constant
/// to stay below `delta` with probability `1 - epsilon`.
pub fn rip_sample_bound(s: usize, n: usize, delta: f64, epsilon: f64, c: f64) -> Result<u64> {
    let value = rip_sample_bound_value(s, n, delta, epsilon, c)?;
    to_length(value.ceil())
}

/// Real-valued right side of the sparse compression-length bound:
/// `C R^4 ||w0||^4 (2s ln(e n / (2s)) + ln(2 / epsilon))`.
pub fn sparse_compression_length_value(
    radius: f64,
    w0_norm: f64,
    s: usize,
    n: usize,
    epsilon: f64,
    c: f64,
) -> Result<f64> {
    check_positive("radius", radius)?;
    check_positive("w0_norm", w0_norm)?;
    if s == 0 || 2 * s > n {
        return Err(Error::Domain(format!(
            "sparsity s must satisfy 1 <= 2s <= n ({n}), got {s}"
        )));
    }
    check_probability("epsilon", epsilon)?;
    check_positive("C", c)?;
    let two_s = (2 * s) as f64;
    let n = n as f64;
    Ok(c * radius.powi(4)
        * w0_norm.powi(4)
        * (two_s * (std::f64::consts::E * n / two_s).ln() + (2.0 / epsilon).ln()))
}

/// Smallest compression length `m` strictly exceeding
/// `C R^4 ||w0||^4 (2s ln(e n / (2s)) + ln(2 / epsilon))`: rows of a scaled
/// sub-Gaussian matrix under which an s-sparse, radius-R separable
/// distribution stays separable with probability `1 - epsilon`.
pub fn sparse_compression_length(
    radius: f64,
    w0_norm: f64,
    s: usize,
    n: usize,
    epsilon: f64,
    c: f64,
) -> Result<u64> {
    let value = sparse_compression_length_value(radius, w0_norm, s, n, epsilon, c)?;
    to_length(strictly_above(value))
}

/// Squared-distance distortion that a scaled sub-Gaussian `m x n` matrix
/// guarantees with probability `1 - epsilon` over a set of the given
/// Gaussian width and radius:
/// `(K^2 [w + ln(2/eps) r]^2 + 2 sqrt(m) K [w + ln(2/eps) r] r) / m`.
pub fn jl_distortion_bound(m: u64, width: f64, radius: f64, epsilon: f64, k: f64) -> Result<f64> {
    if m == 0 {
        return Err(Error::Domain("m must be at least 1".into()));
    }
    check_nonnegative("width", width)?;
    check_nonnegative("radius", radius)?;
    check_probability("epsilon", epsilon)?;
    check_positive("K", k)?;
    let m = m as f64;
    let bracket = width + (2.0 / epsilon).ln() * radius;
    Ok((k * k * bracket * bracket + 2.0 * m.sqrt() * k * bracket * radius) / m)
}

/// True when compression to `m` rows provably preserves separability for a
/// margin-`1/w0_norm` distribution: `1.5 *` the squared-distance bound must
/// fall below `1 / w0_norm^2` (the 1.5 factor converts squared-distance
/// distortion to inner-product distortion for sets containing the origin).
pub fn general_compression_check(
    m: u64,
    width: f64,
    radius: f64,
    epsilon: f64,
    k: f64,
    w0_norm: f64,
) -> Result<bool> {
    check_positive("w0_norm", w0_norm)?;
    let bound = jl_distortion_bound(m, width, radius, epsilon, k)?;
    Ok(1.5 * bound < 1.0 / (w0_norm * w0_norm))
}

/// Smallest `m <= m_cap` passing [`general_compression_check`], or `None`.
/// The bound decreases in `m`, so the predicate is monotone and the search
/// is a bisection.
pub fn min_general_compression_length(
    width: f64,
    radius: f64,
    epsilon: f64,
    k: f64,
    w0_norm: f64,
    m_cap: u64,
) -> Result<Option<u64>> {
    if m_cap == 0 {
        return Err(Error::Domain("m_cap must be at least 1".into()));
    }
    if !general_compression_check(m_cap, width, radius, epsilon, k, w0_norm)? {
        return Ok(None);
    }
    let (mut lo, mut hi) = (1u64, m_cap);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if general_compression_check(mid, width, radius, epsilon, k, w0_norm)? {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(Some(lo))
}

/// Hard-SVM generalization bound
/// `L(z) = (8 R z + 2 + sqrt(ln(4 log2(z) / delta_conf))) / sqrt(sample_size)`
/// on the true error of a margin-`1/z` solution trained on `sample_size`
/// points of radius at most `R`, holding with probability `1 - delta_conf`.
///
/// Out-of-domain arguments are hard errors, not clamps: the bound is
/// undefined for `z <= 1` and for `4 log2(z) / delta_conf < 1`.
pub fn generalization_bound(
    radius: f64,
    w_norm: f64,
    delta_conf: f64,
    sample_size: u64,
) -> Result<f64> {
    check_positive("radius", radius)?;
    check_probability("delta_conf", delta_conf)?;
    if sample_size == 0 {
        return Err(Error::Domain("sample_size must be at least 1".into()));
    }
    if !(w_norm > 1.0) {
        return Err(Error::Domain(format!(
            "argument outside bound's domain: w_norm must exceed 1, got {w_norm}"
        )));
    }
    let log_arg = 4.0 / delta_conf * w_norm.log2();
    if log_arg < 1.0 {
        return Err(Error::Domain(format!(
            "argument outside bound's domain: 4 log2(w_norm) / delta_conf = {log_arg} < 1"
        )));
    }
    Ok((8.0 * radius * w_norm + 2.0 + log_arg.ln().sqrt()) / (sample_size as f64).sqrt())
}

/// Inflation of a pre-compression generalization bound under an
/// eta-inner-product-preserving compression:
/// `bound / sqrt(1 - eta * w_norm^2)`.
///
/// Requires `eta * w_norm^2 < 1` (the compression threshold); at or above
/// it the compressed bound is vacuous and the call errors.
pub fn compressed_generalization_bound(bound: f64, eta: f64, w_norm: f64) -> Result<f64> {
    check_nonnegative("bound", bound)?;
    check_nonnegative("eta", eta)?;
    check_positive("w_norm", w_norm)?;
    let product = eta * w_norm * w_norm;
    if product >= 1.0 {
        return Err(Error::Domain(format!(
            "compression threshold violated: eta * w_norm^2 = {product} >= 1"
        )));
    }
    Ok(bound / (1.0 - product).sqrt())
}

/// Constant `C` that makes [`sparse_compression_length`] predict exactly
/// `observed_m` for the given geometry.
pub fn fit_sparse_constant(
    observed_m: u64,
    radius: f64,
    w0_norm: f64,
    s: usize,
    n: usize,
    epsilon: f64,
) -> Result<f64> {
    if observed_m == 0 {
        return Err(Error::Domain("observed_m must be at least 1".into()));
    }
    let base = sparse_compression_length_value(radius, w0_norm, s, n, epsilon, 1.0)?;
    Ok(observed_m as f64 / base)
}

/// Constant `K` that puts the boundary of [`general_compression_check`]
/// exactly at `observed_m`: the positive root of
/// `K^2 B^2 + 2 sqrt(m) K B r = m / (1.5 w0^2)` in `K`, with
/// `B = width + ln(2/eps) radius`.
pub fn fit_general_constant(
    observed_m: u64,
    width: f64,
    radius: f64,
    epsilon: f64,
    w0_norm: f64,
) -> Result<f64> {
    if observed_m == 0 {
        return Err(Error::Domain("observed_m must be at least 1".into()));
    }
    check_nonnegative("width", width)?;
    check_nonnegative("radius", radius)?;
    check_probability("epsilon", epsilon)?;
    check_positive("w0_norm", w0_norm)?;
    let m = observed_m as f64;
    let bracket = width + (2.0 / epsilon).ln() * radius;
    if bracket == 0.0 {
        return Err(Error::Domain(
            "degenerate geometry: width and radius are both zero".into(),
        ));
    }
    // a K^2 + b K - c = 0 with a = B^2, b = 2 sqrt(m) B r, c = m / (1.5 w0^2).
    let a = bracket * bracket;
    let b = 2.0 * m.sqrt() * bracket * radius;
    let c = m / (1.5 * w0_norm * w0_norm);
    Ok((-b + (b * b + 4.0 * a * c).sqrt()) / (2.0 * a))
}

/// Smallest integer strictly greater than `value`.
fn strictly_above(value: f64) -> f64 {
    let f = value.floor();
    if f == value {
        value + 1.0
    } else {
        f + 1.0
    }
}

fn to_length(value: f64) -> Result<u64> {
    if !value.is_finite() || value > 2.0f64.powi(53) {
        return Err(Error::Domain(format!(
            "bound evaluates to {value}, outside the integer range"
        )));
    }
    Ok(value.max(1.0) as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rip_sample_bound_by_hand() {
        // C = 1, delta = 1 is out of (0,1): the bound's own domain requires
        // delta in (0,1), so the hand value uses delta just inside and the
        // raw evaluator directly.
        // s = 1, n = 3, eps = 0.5: s ln(e n / s) + ln 4 = ln(3e) + ln 4.
        let expected = (3.0 * std::f64::consts::E).ln() + 4.0f64.ln();
        assert!((expected - 3.484906649788).abs() < 1e-9);
        // delta = 0.999...: within domain, delta^-2 ~ 1.
        let v = rip_sample_bound_value(1, 3, 0.9999999, 0.5, 1.0).unwrap();
        assert!((v - expected).abs() < 1e-5);
        assert_eq!(rip_sample_bound(1, 3, 0.9999999, 0.5, 1.0).unwrap(), 4);
    }

    #[test]
    fn rip_sample_bound_quarters_when_delta_halves() {
        let a = rip_sample_bound_value(2, 10, 0.4, 0.1, 1.5).unwrap();
        let b = rip_sample_bound_value(2, 10, 0.2, 0.1, 1.5).unwrap();
        assert!((b / a - 4.0).abs() < 1e-12);
    }

    #[test]
    fn rip_sample_bound_rejects_boundary_epsilon() {
        assert!(rip_sample_bound(1, 3, 0.5, 1.0, 1.0).is_err());
        assert!(rip_sample_bound(1, 3, 0.5, 0.0, 1.0).is_err());
        assert!(rip_sample_bound(0, 3, 0.5, 0.5, 1.0).is_err());
        assert!(rip_sample_bound(4, 3, 0.5, 0.5, 1.0).is_err());
    }

    #[test]
    fn sparse_length_by_hand() {
        // R = 1, ||w0|| = 1, C = 1, s = 1, n = 6, eps = 0.5:
        // 2 ln(3e) + ln 4 = 5.5835..., so the smallest integer strictly
        // above is 6.
        let v = sparse_compression_length_value(1.0, 1.0, 1, 6, 0.5, 1.0).unwrap();
        let expected = 2.0 * (3.0 * std::f64::consts::E).ln() + 4.0f64.ln();
        assert!((v - expected).abs() < 1e-12);
        assert!((v - 5.583518938456).abs() < 1e-9);
        assert_eq!(sparse_compression_length(1.0, 1.0, 1, 6, 0.5, 1.0).unwrap(), 6);
    }

    #[test]
    fn sparse_length_scales_as_fourth_powers() {
        let base = sparse_compression_length_value(1.0, 1.0, 1, 8, 0.25, 1.0).unwrap();
        let r2 = sparse_compression_length_value(2.0, 1.0, 1, 8, 0.25, 1.0).unwrap();
        let w2 = sparse_compression_length_value(1.0, 2.0, 1, 8, 0.25, 1.0).unwrap();
        assert!((r2 / base - 16.0).abs() < 1e-12);
        assert!((w2 / base - 16.0).abs() < 1e-12);
    }

    #[test]
    fn sparse_length_rejects_oversparse() {
        assert!(sparse_compression_length(1.0, 1.0, 4, 6, 0.5, 1.0).is_err());
    }

    #[test]
    fn jl_bound_by_hand() {
        // K = 1, m = 1, width = 1, radius = 1, eps = 0.5:
        // bracket = 1 + ln 4; value = bracket^2 + 2 bracket.
        let bracket = 1.0 + 4.0f64.ln();
        let expected = bracket * bracket + 2.0 * bracket;
        let v = jl_distortion_bound(1, 1.0, 1.0, 0.5, 1.0).unwrap();
        assert!((v - expected).abs() < 1e-12);
        assert!((v - 10.46702).abs() < 1e-4);
        assert_eq!(jl_distortion_bound(5, 0.0, 0.0, 0.5, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn jl_bound_term_scaling_in_m() {
        // First term scales as 1/m, second as 1/sqrt(m): going m -> 4m
        // divides them by 4 and 2 respectively.
        let (w, r, eps, k): (f64, f64, f64, f64) = (1.3, 0.8, 0.1, 1.7);
        let bracket = w + (2.0 / eps).ln() * r;
        for m in [100u64, 400] {
            let t1 = k * k * bracket * bracket / m as f64;
            let t2 = 2.0 * k * bracket * r / (m as f64).sqrt();
            let v = jl_distortion_bound(m, w, r, eps, k).unwrap();
            assert!((v - (t1 + t2)).abs() < 1e-12 * v);
        }
        let t1_100 = k * k * bracket * bracket / 100.0;
        let t2_100 = 2.0 * k * bracket * r / 10.0;
        let v400 = jl_distortion_bound(400, w, r, eps, k).unwrap();
        assert!((v400 - (t1_100 / 4.0 + t2_100 / 2.0)).abs() < 1e-12);
    }

    #[test]
    fn compression_check_and_min_length() {
        // Degenerate set: always preserved.
        assert!(general_compression_check(1, 0.0, 0.0, 0.5, 1.0, 123.0).unwrap());
        assert_eq!(
            min_general_compression_length(0.0, 0.0, 0.5, 1.0, 123.0, 10).unwrap(),
            Some(1)
        );

        // Large norm eventually fails at any fixed m.
        assert!(!general_compression_check(100, 3.0, 1.0, 0.1, 1.0, 1e6).unwrap());

        // Bisection agrees with a linear scan, and the boundary is sharp.
        let (w, r, eps, k, w0) = (3.0, 1.0, 0.1, 1.0, 2.0);
        let cap = 10_000;
        let found = min_general_compression_length(w, r, eps, k, w0, cap)
            .unwrap()
            .expect("cap is large enough");
        let scan = (1..=cap)
            .find(|m| general_compression_check(*m, w, r, eps, k, w0).unwrap())
            .unwrap();
        assert_eq!(found, scan);
        assert!(general_compression_check(found, w, r, eps, k, w0).unwrap());
        assert!(!general_compression_check(found - 1, w, r, eps, k, w0).unwrap());

        // Out of reach under a small cap.
        assert_eq!(
            min_general_compression_length(w, r, eps, k, w0, 3).unwrap(),
            None
        );
    }

    #[test]
    fn check_is_monotone_in_m() {
        let (w, r, eps, k, w0) = (2.0, 1.5, 0.05, 1.2, 1.1);
        let mut seen_true = false;
        for m in 1..=4000u64 {
            let ok = general_compression_check(m, w, r, eps, k, w0).unwrap();
            if seen_true {
                assert!(ok, "check regressed at m = {m}");
            }
            seen_true = seen_true || ok;
        }
        assert!(seen_true);
    }

    #[test]
    fn generalization_bound_by_hand() {
        // R = 1, z = 2, delta = 0.05, sample = 1e4:
        // (16 + 2 + sqrt(ln 80)) / 100 = 0.2009327...
        let v = generalization_bound(1.0, 2.0, 0.05, 10_000).unwrap();
        let expected = (18.0 + 80.0f64.ln().sqrt()) / 100.0;
        assert!((v - expected).abs() < 1e-15);
        assert!((v - 0.20093).abs() < 1e-4);
    }

    #[test]
    fn generalization_bound_scales_inversely_with_root_sample() {
        let a = generalization_bound(1.0, 2.0, 0.05, 2_500).unwrap();
        let b = generalization_bound(1.0, 2.0, 0.05, 10_000).unwrap();
        assert!((a / b - 2.0).abs() < 1e-12);
    }

    #[test]
    fn generalization_bound_domain_errors() {
        assert!(generalization_bound(1.0, 1.0, 0.05, 100).is_err());
        assert!(generalization_bound(1.0, 0.5, 0.05, 100).is_err());
        // 4 log2(z) / delta < 1: log2(z) tiny.
        assert!(generalization_bound(1.0, 1.0 + 1e-12, 0.9, 100).is_err());
    }

    #[test]
    fn compressed_bound_by_hand() {
        assert_eq!(compressed_generalization_bound(0.37, 0.0, 5.0).unwrap(), 0.37);
        let v = compressed_generalization_bound(0.2, 0.5, 1.0).unwrap();
        assert!((v - 0.2 / 0.5f64.sqrt()).abs() < 1e-15);
        assert!((v - 0.28284).abs() < 1e-5);
        assert!(compressed_generalization_bound(0.2, 1.0, 1.0).is_err());
        assert!(compressed_generalization_bound(0.2, 2.0, 1.0).is_err());
    }

    #[test]
    fn monotonicity_grids() {
        // generalization_bound increases in radius and in w_norm.
        let mut prev = 0.0;
        for i in 1..=10 {
            let v = generalization_bound(i as f64, 2.0, 0.05, 100).unwrap();
            assert!(v > prev);
            prev = v;
        }
        prev = 0.0;
        for i in 1..=10 {
            let v = generalization_bound(1.0, 1.0 + i as f64, 0.05, 100).unwrap();
            assert!(v > prev);
            prev = v;
        }
        // compressed bound increases in eta.
        prev = 0.0;
        for i in 0..10 {
            let v = compressed_generalization_bound(0.2, i as f64 * 0.09, 1.0).unwrap();
            assert!(v >= prev);
            prev = v;
        }
        // rip sample bound decreases in delta.
        let mut prev = f64::INFINITY;
        for i in 1..=10 {
            let v = rip_sample_bound_value(2, 20, i as f64 * 0.09, 0.1, 1.0).unwrap();
            assert!(v < prev);
            prev = v;
        }
    }

    #[test]
    fn calibration_inverts_the_formulas() {
        let c = fit_sparse_constant(64, 1.5, 2.0, 1, 10, 0.1).unwrap();
        let v = sparse_compression_length_value(1.5, 2.0, 1, 10, 0.1, c).unwrap();
        assert!((v - 64.0).abs() < 1e-9);

        let k = fit_general_constant(200, 3.0, 1.0, 0.1, 2.0).unwrap();
        assert!(k > 0.0);
        // At the fitted K the check boundary sits exactly at observed m:
        // 1.5 * bound(m) == 1 / w0^2 up to rounding.
        let bound = jl_distortion_bound(200, 3.0, 1.0, 0.1, k).unwrap();
        assert!((1.5 * bound - 0.25).abs() < 1e-9);
    }

    #[test]
    fn strict_inequality_at_integer_boundary() {
        assert_eq!(strictly_above(5.0), 6.0);
        assert_eq!(strictly_above(5.2), 6.0);
        assert_eq!(strictly_above(-0.5), 0.0);
    }
}
