//! Small dense vector helpers shared across the crate.
//!
//! Everything operates on plain `&[f64]` slices; the point sets and matrices
//! in this crate are desk-scale, so there is no need for a heavyweight
//! linear-algebra backend.

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm_sq(a: &[f64]) -> f64 {
    dot(a, a)
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    norm_sq(a).sqrt()
}

pub(crate) fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub(crate) fn distance_sq(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let d = x - y;
            d * d
        })
        .sum()
}

/// Number of nonzero coordinates.
pub(crate) fn sparsity(a: &[f64]) -> usize {
    a.iter().filter(|v| **v != 0.0).count()
}

/// Spectral norm (largest eigenvalue magnitude) of a dense symmetric matrix,
/// computed by cyclic Jacobi rotations.
///
/// `a` is row-major `dim * dim` scratch space and is destroyed. Iteration
/// stops once the off-diagonal Frobenius mass drops below `1e-12` of the
/// matrix norm, which leaves the eigenvalues accurate to well under a
/// relative `1e-10`.
pub(crate) fn symmetric_spectral_norm(mut a: Vec<f64>, dim: usize) -> f64 {
    assert_eq!(a.len(), dim * dim, "matrix buffer must be dim*dim");
    if dim == 0 {
        return 0.0;
    }
    if dim == 1 {
        return a[0].abs();
    }

    let frobenius = norm(&a);
    if frobenius == 0.0 {
        return 0.0;
    }
    let off_tol = 1e-12 * frobenius;

    for _sweep in 0..100 {
        let mut off_sq = 0.0;
        for p in 0..dim {
            for q in (p + 1)..dim {
                off_sq += 2.0 * a[p * dim + q] * a[p * dim + q];
            }
        }
        if off_sq.sqrt() <= off_tol {
            break;
        }

        for p in 0..dim {
            for q in (p + 1)..dim {
                let apq = a[p * dim + q];
                if apq == 0.0 {
                    continue;
                }
                let tau = (a[q * dim + q] - a[p * dim + p]) / (2.0 * apq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    1.0 / (tau - (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                // A <- J^T A J on the (p, q) plane.
                for k in 0..dim {
                    let akp = a[k * dim + p];
                    let akq = a[k * dim + q];
                    a[k * dim + p] = c * akp - s * akq;
                    a[k * dim + q] = s * akp + c * akq;
                }
                for k in 0..dim {
                    let apk = a[p * dim + k];
                    let aqk = a[q * dim + k];
                    a[p * dim + k] = c * apk - s * aqk;
                    a[q * dim + k] = s * apk + c * aqk;
                }
            }
        }
    }

    (0..dim).map(|i| a[i * dim + i].abs()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spectral_norm_of_diagonal() {
        let a = vec![2.0, 0.0, 0.0, 0.0, -3.0, 0.0, 0.0, 0.0, 0.5];
        assert_eq!(symmetric_spectral_norm(a, 3), 3.0);
    }

    #[test]
    fn spectral_norm_of_zero() {
        assert_eq!(symmetric_spectral_norm(vec![0.0; 16], 4), 0.0);
    }

    #[test]
    fn spectral_norm_matches_2x2_closed_form() {
        // Symmetric [[a, b], [b, d]]: eigenvalues (a+d)/2 +- sqrt(((a-d)/2)^2 + b^2).
        let cases = [(1.0, 0.5, -2.0), (3.0, -1.25, 0.75), (0.0, 2.0, 0.0)];
        for (a, b, d) in cases {
            let mid = (a + d) / 2.0;
            let rad = (((a - d) / 2.0f64).powi(2) + b * b).sqrt();
            let expected = (mid + rad).abs().max((mid - rad).abs());
            let got = symmetric_spectral_norm(vec![a, b, b, d], 2);
            assert!(
                (got - expected).abs() <= 1e-12 * expected.max(1.0),
                "got {got}, expected {expected}"
            );
        }
    }

    #[test]
    fn spectral_norm_dominates_rayleigh_quotients() {
        // ||A|| >= |x^T A x| / ||x||^2 for every x.
        let dim = 5;
        let mut a = vec![0.0; dim * dim];
        // Deterministic symmetric fill.
        for i in 0..dim {
            for j in i..dim {
                let v = ((i * 7 + j * 3) as f64 * 0.37).sin();
                a[i * dim + j] = v;
                a[j * dim + i] = v;
            }
        }
        let norm_a = symmetric_spectral_norm(a.clone(), dim);
        for trial in 0..20 {
            let x: Vec<f64> = (0..dim).map(|i| ((trial * 13 + i) as f64 * 0.91).cos()).collect();
            let mut ax = vec![0.0; dim];
            for i in 0..dim {
                for j in 0..dim {
                    ax[i] += a[i * dim + j] * x[j];
                }
            }
            let rayleigh = dot(&x, &ax).abs() / norm_sq(&x);
            assert!(norm_a + 1e-10 >= rayleigh);
        }
    }
}
