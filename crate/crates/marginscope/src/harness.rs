//! End-to-end verification and sweep orchestration.
//!
//! [`verify`] runs the whole pipeline on one (set, matrix) pair: fit the
//! hull hyperplane, measure the inner-product distortion, build the
//! compressed hyperplane, and audit every margin inequality along the way.
//! [`sweep`] repeats that over a grid of compression lengths with derived
//! sub-seeds and aggregates preservation statistics.

use std::io::Write;

use serde::Serialize;

use crate::bounds;
use crate::dataset::{generate_separable, GenConfig, Hyperplane};
use crate::dataset::SupportSet;
use crate::distortion::{gaussian_width_mc, inner_product_distortion};
use crate::error::{Error, Result};
use crate::hullsvm::{
    construct_hyperplane, functional_margin, is_separable_lp, margin_scan,
    nearest_hull_points_default,
};
use crate::projection::{Ensemble, ProjectionMatrix};
use crate::rng;

/// Outcome of a verification run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// Distortion below the threshold and the constructed compressed
    /// hyperplane separates the compressed set.
    Preserved,
    /// Distortion at or above `1 / ||w*||^2`; preservation is not implied
    /// (the compressed set may still be separable — see `lp_separable`).
    ThresholdExceeded,
    /// Distortion below the threshold yet the constructed hyperplane fails
    /// to separate. This would contradict the margin-preservation
    /// guarantee; it should never occur.
    Counterexample,
}

/// Checks that apply when the caller supplies prior knowledge `(w0, b0)`.
#[derive(Debug, Clone, Serialize)]
pub struct PriorChecks {
    /// Functional margin of the prior on the set; the prior is valid when
    /// this is at least 1.
    pub prior_margin: f64,
    pub w0_norm: f64,
    /// Threshold `1 / ||w0||^2` from the prior.
    pub threshold: f64,
    /// `||w*|| <= ||w0|| + 1e-9` (None when the prior is invalid).
    pub norm_dominated: Option<bool>,
    /// `delta >= 2 / ||w0|| - 1e-9` (None when the prior is invalid).
    pub hull_distance_dominates: Option<bool>,
}

/// Full record of one verification run.
#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    /// Measured inner-product distortion over the uncompressed set.
    pub eta_ip: f64,
    /// Preservation threshold `1 / ||w*||^2`.
    pub threshold: f64,
    pub w_star: Vec<f64>,
    pub b_star: f64,
    /// Hull distance; `||w*|| * delta = 2`.
    pub delta: f64,
    pub w_star_norm: f64,
    pub certified_gap: f64,
    /// Functional margin of `(w*, b*)` on the original set (>= 1 up to
    /// solver tolerance).
    pub margin_before: f64,
    /// Functional margin of `(Q w*, b*)` on the compressed set; guaranteed
    /// at least `margin_floor`.
    pub margin_compressed_raw: f64,
    /// `1 - eta_ip * ||w*||^2`, the guaranteed floor for the raw compressed
    /// margin.
    pub margin_floor: f64,
    /// The rescaled hyperplane `(Q w* , b*) / (1 - eta ||w*||^2)`; present
    /// only below threshold.
    pub compressed_hyperplane: Option<Hyperplane>,
    /// Functional margin of the rescaled hyperplane on the compressed set;
    /// at least 1 below threshold.
    pub margin_compressed: Option<f64>,
    /// LP separability of the compressed set, attached when the threshold
    /// is exceeded.
    pub lp_separable: Option<bool>,
    pub prior: Option<PriorChecks>,
    pub verdict: Verdict,
}

/// Margin-audit tolerance used by the verdict.
pub const MARGIN_TOL: f64 = 1e-9;

/// Verify margin preservation of `set` under `q`, optionally against prior
/// knowledge `(w0, b0)`.
///
/// Pipeline: nearest hull points -> hull hyperplane `(w*, b*)` -> measured
/// inner-product distortion eta -> compressed margins. Below the threshold
/// `eta < 1 / ||w*||^2` the rescaled hyperplane
/// `(Q w*, b*) / (1 - eta ||w*||^2)` must reach functional margin 1 on the
/// compressed set (up to [`MARGIN_TOL`]); at or above the threshold the
/// report is still produced, with the LP oracle's separability decision
/// attached.
pub fn verify(
    set: &SupportSet,
    q: &ProjectionMatrix,
    prior: Option<&Hyperplane>,
) -> Result<VerificationReport> {
    let witness = nearest_hull_points_default(set)?;
    let h = construct_hyperplane(&witness)?;
    let w_star_norm = h.w_norm();
    let norm_sq = w_star_norm * w_star_norm;
    let threshold = 1.0 / norm_sq;

    let eta = inner_product_distortion(q, &set.coordinates())?.value;
    let margin_before = functional_margin(&h, set)?;

    let compressed = q.apply_set(set)?;
    let qw = q.apply(&h.w)?;
    let margin_compressed_raw = margin_scan(&qw, h.b, &compressed);
    let margin_floor = 1.0 - eta * norm_sq;

    let below_threshold = eta < threshold;
    let (compressed_hyperplane, margin_compressed, lp_separable, verdict) = if below_threshold {
        let denom = 1.0 - eta * norm_sq;
        let w_bar: Vec<f64> = qw.iter().map(|v| v / denom).collect();
        let b_bar = h.b / denom;
        let margin = margin_scan(&w_bar, b_bar, &compressed);
        let verdict = if margin >= 1.0 - MARGIN_TOL {
            Verdict::Preserved
        } else {
            Verdict::Counterexample
        };
        let plane = Hyperplane::new(w_bar, b_bar).ok();
        (plane, Some(margin), None, verdict)
    } else {
        let lp = is_separable_lp(&compressed);
        (None, None, Some(lp.separable), Verdict::ThresholdExceeded)
    };

    let prior = match prior {
        Some(p) => {
            let prior_margin = functional_margin(p, set)?;
            let w0_norm = p.w_norm();
            let valid = prior_margin >= 1.0;
            Some(PriorChecks {
                prior_margin,
                w0_norm,
                threshold: 1.0 / (w0_norm * w0_norm),
                norm_dominated: valid.then(|| w_star_norm <= w0_norm + MARGIN_TOL),
                hull_distance_dominates: valid
                    .then(|| witness.delta >= 2.0 / w0_norm - MARGIN_TOL),
            })
        }
        None => None,
    };

    Ok(VerificationReport {
        eta_ip: eta,
        threshold,
        w_star: h.w,
        b_star: h.b,
        delta: witness.delta,
        w_star_norm,
        certified_gap: witness.certified_gap,
        margin_before,
        margin_compressed_raw,
        margin_floor,
        compressed_hyperplane,
        margin_compressed,
        lp_separable,
        prior,
        verdict,
    })
}

/// Sweep configuration: a synthetic dataset, an ensemble, and a grid of
/// compression lengths with repetitions.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub gen: GenConfig,
    pub ensemble: Ensemble,
    pub m_list: Vec<usize>,
    pub repetitions: usize,
    /// Seed of the matrix stream; per-(m, repetition) sub-seeds are derived
    /// from it.
    pub seed: u64,
    /// Failure probability used for the predicted compression length.
    pub epsilon: f64,
    /// Distortion-bound constant used for the predicted length.
    pub k: f64,
    /// Monte Carlo trials for the Gaussian width estimate.
    pub width_trials: usize,
}

impl SweepConfig {
    pub fn new(gen: GenConfig, ensemble: Ensemble, m_list: Vec<usize>, repetitions: usize, seed: u64) -> Self {
        Self {
            gen,
            ensemble,
            m_list,
            repetitions,
            seed,
            epsilon: 0.05,
            k: 1.0,
            width_trials: 1_000,
        }
    }
}

/// Aggregated results for one compression length.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub m: usize,
    pub repetitions: usize,
    /// Fraction of repetitions with measured eta below `1 / ||w*||^2`.
    pub threshold_fraction: f64,
    /// Fraction of repetitions where the LP oracle confirms the compressed
    /// set separable. At least `threshold_fraction`: the threshold is
    /// sufficient, not necessary.
    pub separable_fraction: f64,
    pub mean_eta: f64,
    pub max_eta: f64,
    /// Below-threshold repetitions whose constructed hyperplane failed the
    /// margin audit. Always zero.
    pub counterexamples: usize,
}

/// Results of a full sweep.
#[derive(Debug, Clone, Serialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub w_star_norm: f64,
    pub w0_norm: f64,
    pub delta: f64,
    /// Measured Gaussian width of the generated set.
    pub gaussian_width: f64,
    pub radius: f64,
    /// Compression length predicted by the general-position bound with the
    /// configured `K`, capped at twice the largest swept m.
    pub predicted_m: Option<u64>,
    /// `K` calibrated so the predicted length matches the smallest swept m
    /// whose separable fraction reaches `1 - epsilon`.
    pub calibrated_k: Option<f64>,
    pub seed: u64,
}

/// Run a sweep: for each `m` and repetition, draw a scaled matrix with the
/// derived sub-seed, compress, measure, and audit. Deterministic for a
/// fixed configuration.
pub fn sweep(cfg: &SweepConfig) -> Result<SweepResult> {
    if cfg.m_list.is_empty() {
        return Err(Error::InvalidConfig("m_list must be nonempty".into()));
    }
    if cfg.repetitions == 0 {
        return Err(Error::InvalidConfig("repetitions must be at least 1".into()));
    }

    let (set, w0) = generate_separable(&cfg.gen)?;
    let witness = nearest_hull_points_default(&set)?;
    let h = construct_hyperplane(&witness)?;
    let norm_sq = h.w_norm() * h.w_norm();
    let threshold = 1.0 / norm_sq;
    let points = set.coordinates();

    let mut rows = Vec::with_capacity(cfg.m_list.len());
    for &m in &cfg.m_list {
        let mut threshold_hits = 0usize;
        let mut separable_hits = 0usize;
        let mut counterexamples = 0usize;
        let mut eta_sum = 0.0;
        let mut eta_max = 0.0f64;

        for rep in 0..cfg.repetitions {
            let sub = rng::subseed(cfg.seed, &[m as u64, rep as u64]);
            let q = ProjectionMatrix::generate(m, set.dim(), cfg.ensemble, sub, true)?;
            let eta = inner_product_distortion(&q, &points)?.value;
            eta_sum += eta;
            eta_max = eta_max.max(eta);

            let compressed = q.apply_set(&set)?;
            if eta < threshold {
                threshold_hits += 1;
                let denom = 1.0 - eta * norm_sq;
                let qw = q.apply(&h.w)?;
                let w_bar: Vec<f64> = qw.iter().map(|v| v / denom).collect();
                let margin = margin_scan(&w_bar, h.b / denom, &compressed);
                if margin < 1.0 - MARGIN_TOL {
                    counterexamples += 1;
                }
            }
            if is_separable_lp(&compressed).separable {
                separable_hits += 1;
            }
        }

        rows.push(SweepRow {
            m,
            repetitions: cfg.repetitions,
            threshold_fraction: threshold_hits as f64 / cfg.repetitions as f64,
            separable_fraction: separable_hits as f64 / cfg.repetitions as f64,
            mean_eta: eta_sum / cfg.repetitions as f64,
            max_eta: eta_max,
            counterexamples,
        });
    }

    let width_seed = rng::subseed(cfg.seed, &[u64::MAX]);
    let width = gaussian_width_mc(&points, cfg.width_trials, width_seed)?.mean;
    let radius = set.radius();
    let m_cap = cfg.m_list.iter().max().copied().unwrap_or(1) as u64 * 2;
    let predicted_m = bounds::min_general_compression_length(
        width,
        radius,
        cfg.epsilon,
        cfg.k,
        w0.w_norm(),
        m_cap.max(1),
    )?;

    let calibrated_k = rows
        .iter()
        .find(|r| r.separable_fraction >= 1.0 - cfg.epsilon)
        .map(|r| {
            bounds::fit_general_constant(r.m as u64, width, radius, cfg.epsilon, w0.w_norm())
        })
        .transpose()?;

    Ok(SweepResult {
        rows,
        w_star_norm: h.w_norm(),
        w0_norm: w0.w_norm(),
        delta: witness.delta,
        gaussian_width: width,
        radius,
        predicted_m,
        calibrated_k,
        seed: cfg.seed,
    })
}

/// Output format for report emission.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(Self::Json),
            "csv" => Ok(Self::Csv),
            other => Err(Error::InvalidConfig(format!(
                "unknown format {other:?}: expected json or csv"
            ))),
        }
    }
}

/// Serialize a verification report. Verification reports are JSON-only;
/// field order is fixed by the struct definition, so equal reports produce
/// byte-identical output.
pub fn emit_verification(
    report: &VerificationReport,
    format: ReportFormat,
    out: &mut dyn Write,
) -> Result<()> {
    match format {
        ReportFormat::Json => write_json(report, out),
        ReportFormat::Csv => Err(Error::InvalidConfig(
            "verification reports are emitted as JSON only".into(),
        )),
    }
}

/// Serialize a sweep result: JSON for the full record, CSV for the per-m
/// rows (one line per swept length, stable column order).
pub fn emit_sweep(result: &SweepResult, format: ReportFormat, out: &mut dyn Write) -> Result<()> {
    match format {
        ReportFormat::Json => write_json(result, out),
        ReportFormat::Csv => {
            let io = |source| Error::Io {
                path: "<writer>".into(),
                source,
            };
            writeln!(
                out,
                "m,repetitions,threshold_fraction,separable_fraction,mean_eta,max_eta,counterexamples"
            )
            .map_err(io)?;
            for r in &result.rows {
                writeln!(
                    out,
                    "{},{},{},{},{},{},{}",
                    r.m,
                    r.repetitions,
                    r.threshold_fraction,
                    r.separable_fraction,
                    r.mean_eta,
                    r.max_eta,
                    r.counterexamples
                )
                .map_err(io)?;
            }
            Ok(())
        }
    }
}

fn write_json<T: Serialize>(value: &T, out: &mut dyn Write) -> Result<()> {
    let io = |source| Error::Io {
        path: "<writer>".into(),
        source,
    };
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::InvalidConfig(format!("serialization failed: {e}")))?;
    out.write_all(text.as_bytes()).map_err(io)?;
    out.write_all(b"\n").map_err(io)?;
    Ok(())
}
