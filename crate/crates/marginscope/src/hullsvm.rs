//! Geometric hard-SVM machinery.
//!
//! The maximum-margin hyperplane of a separable labeled set is recovered
//! from the nearest pair of points between the convex hulls of the two
//! classes: with `u` the nearest point of the positive hull and `v` of the
//! negative hull,
//!
//! ```text
//! w = 2 (u - v) / ||u - v||^2        b = 1 - 2 <u - v, u> / ||u - v||^2
//! ```
//!
//! has functional margin 1 on the set and norm `2 / delta`, where `delta`
//! is the hull distance. The nearest pair is computed by Frank-Wolfe with
//! pairwise steps on `min ||u - v||^2` over the product of the two hulls;
//! the solver needs only vertex queries, keeps the convex-combination
//! weights that certify hull membership, and terminates on the standard
//! linear-minimization duality gap of the difference-of-hulls problem.

use microlp::{ComparisonOp, OptimizationDirection, Problem};
use serde::Serialize;

use crate::dataset::{Hyperplane, SupportSet};
use crate::error::{Error, Result};
use crate::linalg;
use crate::projection::ProjectionMatrix;

/// Default iteration budget for [`nearest_hull_points`].
pub const DEFAULT_MAX_ITERS: usize = 200_000;

/// Relative separation floor: the classes count as numerically
/// intersecting once `delta^2 <= 1e-12 * max ||x||^2`.
const SEPARATION_FLOOR_REL: f64 = 1e-12;

/// Witness weights below this threshold are zeroed and the rest
/// renormalized, keeping certificates clean.
const WEIGHT_PRUNE: f64 = 1e-14;

/// Per-block gap certificate required on top of the user gap tolerance:
/// each block gap must fall below `1e-12 * delta^2`, which certifies the
/// functional margin of the constructed hyperplane to within `1e-12` of 1.
const REL_MARGIN_TOL: f64 = 1e-12;

/// Iterations without gap improvement after which the solver accepts a
/// floating-point floor (only once the user gap tolerance is already met).
const STALL_LIMIT: usize = 512;

/// Default duality-gap tolerance on `delta^2` for a given set.
pub fn default_gap_tolerance(set: &SupportSet) -> f64 {
    let r2 = set.radius() * set.radius();
    1e-10 * r2.max(1.0)
}

/// Nearest pair of points between the class hulls, with the convex
/// combination weights expressing each point over its class and a duality
/// gap certificate on `delta^2`.
#[derive(Debug, Clone, Serialize)]
pub struct HullWitness {
    /// Nearest point of the positive hull.
    pub x_plus: Vec<f64>,
    /// Nearest point of the negative hull.
    pub x_minus: Vec<f64>,
    /// Hull distance `||x_plus - x_minus||`.
    pub delta: f64,
    /// Convex weights over the positive class points, in class order.
    pub coeffs_plus: Vec<f64>,
    /// Convex weights over the negative class points, in class order.
    pub coeffs_minus: Vec<f64>,
    /// Certified bound on `delta^2 - delta_optimal^2`.
    pub certified_gap: f64,
}

/// Outcome of the LP separability oracle.
#[derive(Debug, Clone)]
pub struct SeparabilityDecision {
    pub separable: bool,
    /// A hyperplane with functional margin >= 1 - 1e-9 when separable.
    pub hyperplane: Option<Hyperplane>,
    /// Optimal value of the feasibility program: zero iff separable.
    pub infeasibility: f64,
}

/// How compatible a vector is with a set under a matrix: the smallest `c`
/// with `|<Qw, Qx> - <w, x>| <= c * eta` over the set, against the
/// guaranteed bound `||w||^2`.
#[derive(Debug, Clone, Serialize)]
pub struct CompatibilityReport {
    pub c_measured: f64,
    /// `||w||^2`, the bound that holds when `w` is the hull solution.
    pub c_bound: f64,
    /// Index of the point attaining the largest deviation.
    pub argmax_index: usize,
    /// Set when `eta = 0` forced the +infinity sentinel in `c_measured`.
    pub eta_degenerate: bool,
}

struct BlockState<'a> {
    pts: Vec<&'a [f64]>,
    weights: Vec<f64>,
    point: Vec<f64>,
}

impl<'a> BlockState<'a> {
    fn new(pts: Vec<&'a [f64]>) -> Self {
        let mut weights = vec![0.0; pts.len()];
        weights[0] = 1.0;
        let point = pts[0].to_vec();
        Self {
            pts,
            weights,
            point,
        }
    }

    /// Recompute the hull point from its weights and renormalize drifted
    /// weight mass.
    fn resync(&mut self) {
        let total: f64 = self.weights.iter().sum();
        if total > 0.0 && total != 1.0 {
            for w in &mut self.weights {
                *w /= total;
            }
        }
        let dim = self.point.len();
        self.point = vec![0.0; dim];
        for (w, p) in self.weights.iter().zip(&self.pts) {
            if *w != 0.0 {
                for (acc, v) in self.point.iter_mut().zip(*p) {
                    *acc += w * v;
                }
            }
        }
    }

    /// Zero weights below the pruning threshold, renormalize, resync.
    fn prune(&mut self) {
        for w in &mut self.weights {
            if *w < WEIGHT_PRUNE {
                *w = 0.0;
            }
        }
        self.resync();
    }
}

/// Scan one block: vertex minimizing `<p, x>`, vertex maximizing `<p, x>`,
/// and the maximizer restricted to the active set (ties break to the lowest
/// index).
struct BlockScan {
    min_idx: usize,
    min_val: f64,
    max_idx: usize,
    max_val: f64,
    active_min_idx: usize,
    active_min_val: f64,
    active_max_idx: usize,
    active_max_val: f64,
}

fn scan_block(p: &[f64], block: &BlockState<'_>) -> BlockScan {
    let mut scan = BlockScan {
        min_idx: 0,
        min_val: f64::INFINITY,
        max_idx: 0,
        max_val: f64::NEG_INFINITY,
        active_min_idx: 0,
        active_min_val: f64::INFINITY,
        active_max_idx: 0,
        active_max_val: f64::NEG_INFINITY,
    };
    for (i, x) in block.pts.iter().enumerate() {
        let v = linalg::dot(p, x);
        if v < scan.min_val {
            scan.min_val = v;
            scan.min_idx = i;
        }
        if v > scan.max_val {
            scan.max_val = v;
            scan.max_idx = i;
        }
        if block.weights[i] > 0.0 {
            if v < scan.active_min_val {
                scan.active_min_val = v;
                scan.active_min_idx = i;
            }
            if v > scan.active_max_val {
                scan.active_max_val = v;
                scan.active_max_idx = i;
            }
        }
    }
    scan
}

/// Nearest points of the two class hulls.
///
/// `tol` is the absolute tolerance for the duality gap on `delta^2` (see
/// [`default_gap_tolerance`] for the default); `max_iters` caps the
/// Frank-Wolfe iterations. On convergence the witness satisfies
/// `certified_gap <= tol`, and additionally each per-block gap is driven
/// below `1e-12 * delta^2` so that the hyperplane built from the witness
/// has functional margin 1 up to that relative error.
///
/// Errors with [`Error::NotSeparable`] when the hulls intersect or come
/// within the numerical separation floor, and with
/// [`Error::IterationLimit`] (carrying the best witness) when the gap
/// tolerance is not reached.
pub fn nearest_hull_points(set: &SupportSet, tol: f64, max_iters: usize) -> Result<HullWitness> {
    let pos_pts = set.class_points(1);
    let neg_pts = set.class_points(-1);
    if pos_pts.is_empty() {
        return Err(Error::EmptyClass { label: 1 });
    }
    if neg_pts.is_empty() {
        return Err(Error::EmptyClass { label: -1 });
    }
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(Error::InvalidConfig(format!(
            "gap tolerance must be positive and finite, got {tol}"
        )));
    }

    let radius_sq = set.radius() * set.radius();
    let floor = SEPARATION_FLOOR_REL * radius_sq;

    let mut plus = BlockState::new(pos_pts);
    let mut minus = BlockState::new(neg_pts);

    let mut best_gap = f64::INFINITY;
    let mut since_improvement = 0usize;
    let mut converged = false;
    let mut iters_used = 0usize;

    for iter in 0..max_iters {
        iters_used = iter + 1;
        if iter % 128 == 127 {
            plus.resync();
            minus.resync();
        }

        let p = linalg::sub(&plus.point, &minus.point);
        let delta_sq = linalg::norm_sq(&p);
        if delta_sq <= floor {
            return Err(Error::NotSeparable {
                delta_sq,
                floor,
            });
        }

        let scan_p = scan_block(&p, &plus);
        let scan_m = scan_block(&p, &minus);
        let dp_u = linalg::dot(&p, &plus.point);
        let dp_v = linalg::dot(&p, &minus.point);

        // Block gaps of the difference-of-hulls problem at (u, v).
        let gap_u = 2.0 * (dp_u - scan_p.min_val);
        let gap_v = 2.0 * (scan_m.max_val - dp_v);
        let gap = (gap_u + gap_v).max(0.0);

        if gap < best_gap {
            best_gap = gap;
            since_improvement = 0;
        } else {
            since_improvement += 1;
        }

        let margin_certified =
            gap_u <= REL_MARGIN_TOL * delta_sq && gap_v <= REL_MARGIN_TOL * delta_sq;
        if gap <= tol && margin_certified {
            converged = true;
            break;
        }
        // Gap already certified but the margin refinement hit the
        // floating-point floor: accept.
        if gap <= tol && since_improvement > STALL_LIMIT {
            converged = true;
            break;
        }

        // Pairwise step on the block with the larger pairwise gap: move
        // weight from the away vertex onto the Frank-Wolfe vertex.
        let pw_u = scan_p.active_max_val - scan_p.min_val;
        let pw_v = scan_m.max_val - scan_m.active_min_val;

        let stepped = if pw_u >= pw_v {
            step_block(&mut plus, &p, scan_p.min_idx, scan_p.active_max_idx, false)
                || step_block(&mut minus, &p, scan_m.max_idx, scan_m.active_min_idx, true)
        } else {
            step_block(&mut minus, &p, scan_m.max_idx, scan_m.active_min_idx, true)
                || step_block(&mut plus, &p, scan_p.min_idx, scan_p.active_max_idx, false)
        };
        if !stepped {
            // No block can progress; treat as converged if the gap
            // certificate already holds.
            converged = gap <= tol;
            break;
        }
    }

    plus.prune();
    minus.prune();

    let p = linalg::sub(&plus.point, &minus.point);
    let delta_sq = linalg::norm_sq(&p);
    if delta_sq <= floor {
        return Err(Error::NotSeparable { delta_sq, floor });
    }

    // Final certificate on the returned, pruned witness.
    let scan_p = scan_block(&p, &plus);
    let scan_m = scan_block(&p, &minus);
    let gap_u = 2.0 * (linalg::dot(&p, &plus.point) - scan_p.min_val);
    let gap_v = 2.0 * (scan_m.max_val - linalg::dot(&p, &minus.point));
    let certified_gap = (gap_u + gap_v).max(0.0);

    let witness = HullWitness {
        x_plus: plus.point,
        x_minus: minus.point,
        delta: delta_sq.sqrt(),
        coeffs_plus: plus.weights,
        coeffs_minus: minus.weights,
        certified_gap,
    };

    if !converged && certified_gap > tol {
        return Err(Error::IterationLimit {
            iters: iters_used,
            gap: certified_gap,
            tol,
            witness: Box::new(witness),
        });
    }
    Ok(witness)
}

/// Nearest hull points under the default tolerance and iteration budget.
pub fn nearest_hull_points_default(set: &SupportSet) -> Result<HullWitness> {
    nearest_hull_points(set, default_gap_tolerance(set), DEFAULT_MAX_ITERS)
}

/// Exact line-search pairwise step on one block. `toward_max` selects the
/// descent orientation (the negative block moves toward its maximizing
/// vertex). Returns false when the block cannot progress.
fn step_block(
    block: &mut BlockState<'_>,
    p: &[f64],
    fw_idx: usize,
    away_idx: usize,
    toward_max: bool,
) -> bool {
    if fw_idx == away_idx {
        return false;
    }
    let t_max = block.weights[away_idx];
    if t_max <= 0.0 {
        return false;
    }
    let fw = block.pts[fw_idx];
    let away = block.pts[away_idx];
    let d: Vec<f64> = fw.iter().zip(away).map(|(a, b)| a - b).collect();
    let dd = linalg::norm_sq(&d);
    if dd == 0.0 {
        return false;
    }
    // Minimize ||p + t d||^2 (positive block) or ||p - t d||^2 (negative).
    let pd = linalg::dot(p, &d);
    let t_star = if toward_max { pd / dd } else { -pd / dd };
    if t_star <= 0.0 {
        return false;
    }
    let t = t_star.min(t_max);
    for (acc, v) in block.point.iter_mut().zip(&d) {
        *acc += t * v;
    }
    block.weights[fw_idx] += t;
    block.weights[away_idx] = if t == t_max {
        0.0
    } else {
        block.weights[away_idx] - t
    };
    true
}

/// Maximum-margin hyperplane from a hull witness:
/// `w = 2 (x_plus - x_minus) / delta^2`, `b = 1 - 2 <x_plus - x_minus, x_plus> / delta^2`,
/// so that `||w|| = 2 / delta`.
pub fn construct_hyperplane(witness: &HullWitness) -> Result<Hyperplane> {
    let diff = linalg::sub(&witness.x_plus, &witness.x_minus);
    let d_sq = linalg::norm_sq(&diff);
    if d_sq == 0.0 {
        return Err(Error::InvalidConfig(
            "degenerate witness: hull points coincide".into(),
        ));
    }
    let scale = 2.0 / d_sq;
    let w: Vec<f64> = diff.iter().map(|v| v * scale).collect();
    let b = 1.0 - scale * linalg::dot(&diff, &witness.x_plus);
    Hyperplane::new(w, b)
}

/// Smallest signed margin `y (<w, x> + b)` over the set. The set is
/// separable by `(w, b)` in the functional-margin-1 convention exactly when
/// this is at least 1.
pub fn functional_margin(h: &Hyperplane, set: &SupportSet) -> Result<f64> {
    if h.dim() != set.dim() {
        return Err(Error::DimensionMismatch {
            expected: set.dim(),
            got: h.dim(),
        });
    }
    Ok(margin_scan(&h.w, h.b, set))
}

/// Margin scan that tolerates a zero normal (used on compressed images of
/// hyperplanes, which can vanish).
pub(crate) fn margin_scan(w: &[f64], b: f64, set: &SupportSet) -> f64 {
    set.points()
        .iter()
        .map(|p| p.label() as f64 * (linalg::dot(w, p.coords()) + b))
        .fold(f64::INFINITY, f64::min)
}

/// LP feasibility oracle for linear separability, independent of the hull
/// solver: minimize `xi >= 0` subject to `y (<w, x> + b) + xi >= 1`. The
/// optimum is zero exactly when some hyperplane attains functional margin 1.
/// The returned decision is certified by a direct margin audit of the LP
/// solution rather than by the solver's objective alone.
pub fn is_separable_lp(set: &SupportSet) -> SeparabilityDecision {
    let n = set.dim();
    let mut problem = Problem::new(OptimizationDirection::Minimize);
    let free = (f64::NEG_INFINITY, f64::INFINITY);
    let w_vars: Vec<_> = (0..n).map(|_| problem.add_var(0.0, free)).collect();
    let b_var = problem.add_var(0.0, free);
    let xi_var = problem.add_var(1.0, (0.0, f64::INFINITY));

    for p in set.points() {
        let y = p.label() as f64;
        let mut terms: Vec<_> = p
            .coords()
            .iter()
            .enumerate()
            .map(|(j, v)| (w_vars[j], y * v))
            .collect();
        terms.push((b_var, y));
        terms.push((xi_var, 1.0));
        problem.add_constraint(&terms, ComparisonOp::Ge, 1.0);
    }

    let solution = problem
        .solve()
        .expect("the feasibility program is always feasible and bounded");
    let infeasibility = solution.objective();
    let w: Vec<f64> = w_vars.iter().map(|v| solution[*v]).collect();
    let b = solution[b_var];

    let margin = margin_scan(&w, b, set);
    let separable = margin >= 1.0 - 1e-9;
    let hyperplane = if separable {
        Hyperplane::new(w, b).ok()
    } else {
        None
    };
    SeparabilityDecision {
        separable,
        hyperplane,
        infeasibility,
    }
}

/// Smallest `c` such that `|<Qw, Qx> - <w, x>| <= c * eta` over the set,
/// with `eta` supplied by the caller (normally the measured inner-product
/// distortion over the same set). When `eta` is zero the report carries 0
/// for a zero deviation and the +infinity sentinel (flagged) otherwise.
pub fn compatibility_constant(
    q: &ProjectionMatrix,
    w: &[f64],
    set: &SupportSet,
    eta: f64,
) -> Result<CompatibilityReport> {
    if set.dim() != q.n() {
        return Err(Error::DimensionMismatch {
            expected: q.n(),
            got: set.dim(),
        });
    }
    if !(eta >= 0.0) {
        return Err(Error::Domain(format!("eta must be >= 0, got {eta}")));
    }
    let qw = q.apply(w)?;

    let mut max_dev = f64::NEG_INFINITY;
    let mut argmax_index = 0usize;
    for (i, p) in set.points().iter().enumerate() {
        let qx = q.apply(p.coords())?;
        let dev = (linalg::dot(&qw, &qx) - linalg::dot(w, p.coords())).abs();
        if dev > max_dev {
            max_dev = dev;
            argmax_index = i;
        }
    }

    let (c_measured, eta_degenerate) = if eta > 0.0 {
        (max_dev / eta, false)
    } else if max_dev == 0.0 {
        (0.0, false)
    } else {
        (f64::INFINITY, true)
    };

    Ok(CompatibilityReport {
        c_measured,
        c_bound: linalg::norm_sq(w),
        argmax_index,
        eta_degenerate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{generate_separable, GenConfig, LabeledPoint};
    use crate::distortion::inner_product_distortion;
    use crate::projection::Ensemble;

    fn set_of(plus: &[&[f64]], minus: &[&[f64]]) -> SupportSet {
        let mut pts = Vec::new();
        for p in plus {
            pts.push(LabeledPoint::new(p.to_vec(), 1).unwrap());
        }
        for p in minus {
            pts.push(LabeledPoint::new(p.to_vec(), -1).unwrap());
        }
        SupportSet::new(pts).unwrap()
    }

    #[test]
    fn singleton_hulls() {
        let set = set_of(&[&[1.0, 0.0]], &[&[-1.0, 0.0]]);
        let w = nearest_hull_points_default(&set).unwrap();
        assert_eq!(w.x_plus, vec![1.0, 0.0]);
        assert_eq!(w.x_minus, vec![-1.0, 0.0]);
        assert_eq!(w.delta, 2.0);
        assert_eq!(w.coeffs_plus, vec![1.0]);
        assert_eq!(w.coeffs_minus, vec![1.0]);
    }

    #[test]
    fn nearest_points_of_two_segments() {
        // Segments [(0,2),(2,0)] and [(0,-2),(-2,0)] are parallel: the
        // nearest pair is attained along a continuum (the midpoints (1,1)
        // and (-1,-1) are one representative), but delta = 2 sqrt(2), the
        // difference vector (2,2), and the resulting hyperplane are unique.
        // Cross-checked with a fine grid scan over both segments.
        let set = set_of(&[&[0.0, 2.0], &[2.0, 0.0]], &[&[0.0, -2.0], &[-2.0, 0.0]]);
        let w = nearest_hull_points_default(&set).unwrap();

        let mut grid_best = f64::INFINITY;
        let steps = 2000;
        for i in 0..=steps {
            let t = i as f64 / steps as f64;
            let a = [2.0 * t, 2.0 - 2.0 * t];
            for j in 0..=steps {
                let s = j as f64 / steps as f64;
                let b = [-2.0 * s, -2.0 + 2.0 * s];
                let d = ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt();
                grid_best = grid_best.min(d);
            }
        }

        let expected = 2.0 * 2.0f64.sqrt();
        assert!((w.delta - expected).abs() < 1e-9, "delta {}", w.delta);
        assert!((grid_best - expected).abs() < 1e-5);
        assert!((w.x_plus[0] - w.x_minus[0] - 2.0).abs() < 1e-9);
        assert!((w.x_plus[1] - w.x_minus[1] - 2.0).abs() < 1e-9);

        let h = construct_hyperplane(&w).unwrap();
        assert!((h.w[0] - 0.5).abs() < 1e-12 && (h.w[1] - 0.5).abs() < 1e-12);
        assert!(h.b.abs() < 1e-12);
    }

    #[test]
    fn coincident_points_are_not_separable() {
        let set = set_of(&[&[1.0, 0.0]], &[&[1.0, 0.0]]);
        assert!(matches!(
            nearest_hull_points_default(&set),
            Err(Error::NotSeparable { .. })
        ));
    }

    #[test]
    fn witness_weights_reconstruct_hull_points() {
        let (set, _) = generate_separable(&GenConfig::new(8, 30, 0.3, 7.0, 5)).unwrap();
        let w = nearest_hull_points_default(&set).unwrap();

        let sum_p: f64 = w.coeffs_plus.iter().sum();
        let sum_m: f64 = w.coeffs_minus.iter().sum();
        assert!((sum_p - 1.0).abs() < 1e-12);
        assert!((sum_m - 1.0).abs() < 1e-12);
        assert!(w.coeffs_plus.iter().all(|c| *c >= 0.0));
        assert!(w.coeffs_minus.iter().all(|c| *c >= 0.0));

        let pos = set.class_points(1);
        let mut rebuilt = vec![0.0; set.dim()];
        for (c, x) in w.coeffs_plus.iter().zip(&pos) {
            for (acc, v) in rebuilt.iter_mut().zip(*x) {
                *acc += c * v;
            }
        }
        for (a, b) in rebuilt.iter().zip(&w.x_plus) {
            assert!((a - b).abs() < 1e-10);
        }
        assert!(
            (linalg::norm(&linalg::sub(&w.x_plus, &w.x_minus)) - w.delta).abs() < 1e-12
        );
    }

    #[test]
    fn hyperplane_from_axis_witness() {
        let witness = HullWitness {
            x_plus: vec![1.0, 0.0],
            x_minus: vec![-1.0, 0.0],
            delta: 2.0,
            coeffs_plus: vec![1.0],
            coeffs_minus: vec![1.0],
            certified_gap: 0.0,
        };
        let h = construct_hyperplane(&witness).unwrap();
        assert_eq!(h.w, vec![1.0, 0.0]);
        assert_eq!(h.b, 0.0);
    }

    #[test]
    fn hyperplane_from_diagonal_witness() {
        let witness = HullWitness {
            x_plus: vec![1.0, 1.0],
            x_minus: vec![-1.0, -1.0],
            delta: 8.0f64.sqrt(),
            coeffs_plus: vec![1.0],
            coeffs_minus: vec![1.0],
            certified_gap: 0.0,
        };
        let h = construct_hyperplane(&witness).unwrap();
        assert_eq!(h.w, vec![0.5, 0.5]);
        assert_eq!(h.b, 0.0);
    }

    #[test]
    fn norm_times_delta_is_two() {
        let (set, _) = generate_separable(&GenConfig::new(5, 20, 0.7, 3.0, 11)).unwrap();
        let w = nearest_hull_points_default(&set).unwrap();
        let h = construct_hyperplane(&w).unwrap();
        assert!((h.w_norm() * w.delta - 2.0).abs() < 1e-12);
    }

    #[test]
    fn functional_margin_by_hand() {
        let set = set_of(&[&[1.0, 0.0]], &[&[-1.0, 0.0]]);
        let h = Hyperplane::new(vec![1.0, 0.0], 0.0).unwrap();
        assert_eq!(functional_margin(&h, &set).unwrap(), 1.0);

        let flipped = set_of(&[&[-1.0, 0.0]], &[&[1.0, 0.0]]);
        assert_eq!(functional_margin(&h, &flipped).unwrap(), -1.0);
    }

    #[test]
    fn constructed_hyperplane_separates_its_set() {
        for seed in 0..10 {
            let cfg = GenConfig::new(4 + (seed as usize % 5), 15, 0.4, 6.0, seed);
            let (set, _) = generate_separable(&cfg).unwrap();
            let w = nearest_hull_points_default(&set).unwrap();
            let h = construct_hyperplane(&w).unwrap();
            let margin = functional_margin(&h, &set).unwrap();
            assert!(margin >= 1.0 - 1e-9, "seed {seed}: margin {margin}");
        }
    }

    #[test]
    fn lp_oracle_accepts_generated_sets() {
        let (set, _) = generate_separable(&GenConfig::new(6, 12, 0.5, 4.0, 42)).unwrap();
        let decision = is_separable_lp(&set);
        assert!(decision.separable);
        let h = decision.hyperplane.unwrap();
        assert!(functional_margin(&h, &set).unwrap() >= 1.0 - 1e-9);
    }

    #[test]
    fn lp_oracle_rejects_identical_classes() {
        let set = set_of(&[&[1.0, 2.0]], &[&[1.0, 2.0]]);
        let decision = is_separable_lp(&set);
        assert!(!decision.separable);
        assert!(decision.hyperplane.is_none());
        assert!(decision.infeasibility > 0.5);
    }

    #[test]
    fn identity_matrix_is_perfectly_compatible() {
        let (set, _) = generate_separable(&GenConfig::new(4, 8, 0.5, 4.0, 9)).unwrap();
        let q = ProjectionMatrix::identity(4);
        let r = compatibility_constant(&q, &[1.0, 0.0, 0.0, 0.0], &set, 0.5).unwrap();
        assert_eq!(r.c_measured, 0.0);
        assert!(!r.eta_degenerate);
    }

    #[test]
    fn set_members_are_one_compatible() {
        // For w drawn from the set itself, c = 1 works by definition of the
        // inner-product distortion.
        let (set, _) = generate_separable(&GenConfig::new(5, 10, 0.4, 5.0, 23)).unwrap();
        let q = ProjectionMatrix::generate(3, 5, Ensemble::Gaussian, 7, true).unwrap();
        let eta = inner_product_distortion(&q, &set.coordinates()).unwrap().value;
        for p in set.points() {
            let r = compatibility_constant(&q, p.coords(), &set, eta).unwrap();
            assert!(r.c_measured <= 1.0 + 1e-12, "c = {}", r.c_measured);
        }
    }

    #[test]
    fn zero_eta_with_deviation_is_flagged() {
        let set = set_of(&[&[1.0, 0.0]], &[&[-1.0, 0.0]]);
        let q = ProjectionMatrix::explicit(vec![vec![2.0, 0.0], vec![0.0, 2.0]]).unwrap();
        let r = compatibility_constant(&q, &[1.0, 0.0], &set, 0.0).unwrap();
        assert!(r.c_measured.is_infinite());
        assert!(r.eta_degenerate);
    }

    #[test]
    fn hull_solution_meets_compatibility_bound() {
        let (set, _) = generate_separable(&GenConfig::new(6, 20, 0.5, 4.0, 77)).unwrap();
        let witness = nearest_hull_points_default(&set).unwrap();
        let h = construct_hyperplane(&witness).unwrap();
        let q = ProjectionMatrix::generate(4, 6, Ensemble::Rademacher, 13, true).unwrap();
        let eta = inner_product_distortion(&q, &set.coordinates()).unwrap().value;
        let r = compatibility_constant(&q, &h.w, &set, eta).unwrap();
        assert!(
            r.c_measured <= r.c_bound + 1e-9,
            "c {} vs bound {}",
            r.c_measured,
            r.c_bound
        );
    }
}
