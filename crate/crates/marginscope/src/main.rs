//! Command-line front end: thin argument parsing and dispatch around the
//! library. Subcommands mirror the library pipeline: `gen`, `fit`,
//! `compress`, `audit`, `verify`, `sweep`, `bounds`.
//!
//! Exit codes: 0 on success, 1 on contract errors, 2 when a verification
//! counterexample is reported (which would falsify the margin-preservation
//! guarantee and should never occur).

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use marginscope::bounds;
use marginscope::dataset::{self, GenConfig, Hyperplane};
use marginscope::distortion;
use marginscope::error::{Error, Result};
use marginscope::harness::{self, ReportFormat, SweepConfig, Verdict};
use marginscope::hullsvm;
use marginscope::projection::{Ensemble, ProjectionMatrix};

#[derive(Parser)]
#[command(name = "marginscope", version, about = "Margin preservation under linear compression")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Seed for whatever randomness the subcommand uses (decimal 64-bit).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Report format where both are supported.
    #[arg(long, global = true, default_value = "json")]
    format: String,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a separable synthetic dataset as CSV.
    Gen {
        /// Ambient dimension.
        #[arg(long)]
        n: usize,
        /// Points per class.
        #[arg(long = "per-class")]
        per_class: usize,
        /// Target geometric margin.
        #[arg(long)]
        margin: f64,
        /// Radius cap (must be at least 1/margin).
        #[arg(long)]
        radius: f64,
        /// Optional sparsity cap per point.
        #[arg(long)]
        sparsity: Option<usize>,
        /// Offset of the planted hyperplane.
        #[arg(long, default_value_t = 0.0)]
        bias: f64,
        /// Where to write the dataset CSV.
        #[arg(long = "data-out")]
        data_out: PathBuf,
    },
    /// Fit the maximum-margin hyperplane from the class hulls.
    Fit {
        #[arg(long)]
        data: PathBuf,
        /// Duality-gap tolerance on delta^2 (default 1e-10 max(1, max||x||^2)).
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long = "max-iters", default_value_t = hullsvm::DEFAULT_MAX_ITERS)]
        max_iters: usize,
    },
    /// Compress a dataset with a matrix and write the result as CSV.
    Compress {
        #[arg(long)]
        data: PathBuf,
        #[command(flatten)]
        matrix: MatrixArgs,
        /// Where to write the compressed CSV.
        #[arg(long = "data-out")]
        data_out: PathBuf,
    },
    /// Measure inner-product and squared-distance distortion.
    Audit {
        #[arg(long)]
        data: PathBuf,
        #[command(flatten)]
        matrix: MatrixArgs,
    },
    /// End-to-end margin-preservation verification.
    Verify {
        #[arg(long)]
        data: PathBuf,
        #[command(flatten)]
        matrix: MatrixArgs,
        /// Optional prior hyperplane as JSON {"w": [...], "b": ...}.
        #[arg(long)]
        prior: Option<PathBuf>,
    },
    /// Sweep compression lengths over a synthetic dataset.
    Sweep {
        #[arg(long)]
        n: usize,
        #[arg(long = "per-class")]
        per_class: usize,
        #[arg(long)]
        margin: f64,
        #[arg(long)]
        radius: f64,
        #[arg(long)]
        sparsity: Option<usize>,
        #[arg(long, default_value_t = 0.0)]
        bias: f64,
        /// Seed of the generated dataset (the global --seed drives the
        /// matrix stream).
        #[arg(long = "data-seed", default_value_t = 1)]
        data_seed: u64,
        #[arg(long)]
        ensemble: String,
        /// Comma-separated compression lengths.
        #[arg(long = "m-list", value_delimiter = ',', required = true)]
        m_list: Vec<usize>,
        #[arg(long, default_value_t = 20)]
        repetitions: usize,
        #[arg(long, default_value_t = 0.05)]
        epsilon: f64,
        #[arg(long, default_value_t = 1.0)]
        k: f64,
        #[arg(long = "width-trials", default_value_t = 1000)]
        width_trials: usize,
    },
    /// Evaluate every applicable closed-form bound from a JSON config.
    Bounds {
        /// JSON file with keys C, K, epsilon, delta_conf, R, s, n, w0_norm,
        /// width, radius, sample_size, m_cap.
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Args)]
struct MatrixArgs {
    /// Explicit matrix CSV (m rows, n columns, no header).
    #[arg(long)]
    matrix: Option<PathBuf>,
    /// Random ensemble: gaussian, rademacher, or uniform.
    #[arg(long)]
    ensemble: Option<String>,
    /// Compressed dimension for a generated matrix.
    #[arg(long)]
    m: Option<usize>,
    /// Skip the 1/sqrt(m) scaling when generating.
    #[arg(long)]
    unscaled: bool,
}

impl MatrixArgs {
    fn build(&self, n: usize, seed: u64) -> Result<ProjectionMatrix> {
        match (&self.matrix, &self.ensemble, self.m) {
            (Some(path), None, None) => ProjectionMatrix::load_csv(path),
            (None, Some(name), Some(m)) => {
                let ensemble: Ensemble = name.parse()?;
                ProjectionMatrix::generate(m, n, ensemble, seed, !self.unscaled)
            }
            _ => Err(Error::InvalidConfig(
                "pass either --matrix <csv>, or --ensemble <name> with --m <rows>".into(),
            )),
        }
    }
}

#[derive(Serialize)]
struct GenMeta<'a> {
    n: usize,
    per_class: usize,
    margin: f64,
    radius: f64,
    sparsity: Option<usize>,
    bias: f64,
    seed: u64,
    w0: &'a [f64],
    b0: f64,
    w0_norm: f64,
    measured_radius: f64,
    measured_sparsity: usize,
    data_out: &'a Path,
}

#[derive(Serialize)]
struct CompressMeta<'a> {
    m: usize,
    n: usize,
    ensemble: String,
    seed: u64,
    scaled: bool,
    points: usize,
    data_out: &'a Path,
}

#[derive(Serialize)]
struct FitReport<'a> {
    w: &'a [f64],
    b: f64,
    delta: f64,
    margin: f64,
    certified_gap: f64,
    support_weights: SupportWeights<'a>,
}

#[derive(Serialize)]
struct SupportWeights<'a> {
    plus: &'a [f64],
    minus: &'a [f64],
}

/// Bounds applicable to one configuration; entries are null when their
/// hypotheses do not apply (for example no sparsity given, or the length
/// cap too small).
#[derive(Serialize)]
struct BoundsReport {
    rip_sample_bound: Option<u64>,
    rip_target_delta: Option<f64>,
    sparse_compression_length: Option<u64>,
    min_general_compression_length: Option<u64>,
    eta_sd_bound_at_min_length: Option<f64>,
    eta_ip_bound_at_min_length: Option<f64>,
    generalization_bound: Option<f64>,
    compressed_generalization_bound: Option<f64>,
    notes: Vec<String>,
}

#[derive(serde::Deserialize)]
struct BoundsInput {
    #[serde(flatten)]
    config: bounds::BoundsConfig,
    #[serde(rename = "R")]
    r: f64,
    s: Option<usize>,
    n: usize,
    w0_norm: f64,
    width: f64,
    radius: f64,
    sample_size: u64,
    m_cap: u64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let format: ReportFormat = cli.format.parse()?;
    match cli.command {
        Command::Gen {
            n,
            per_class,
            margin,
            radius,
            sparsity,
            bias,
            data_out,
        } => {
            let mut cfg = GenConfig::new(n, per_class, margin, radius, cli.seed).with_bias(bias);
            cfg.sparsity = sparsity;
            let (set, plane) = dataset::generate_separable(&cfg)?;
            dataset::save_csv(&set, &data_out)?;
            let meta = GenMeta {
                n,
                per_class,
                margin,
                radius,
                sparsity,
                bias,
                seed: cli.seed,
                w0: &plane.w,
                b0: plane.b,
                w0_norm: plane.w_norm(),
                measured_radius: set.radius(),
                measured_sparsity: set.max_sparsity(),
                data_out: &data_out,
            };
            emit_json(&meta, &cli.out)?;
            Ok(ExitCode::SUCCESS)
        }

        Command::Fit {
            data,
            tol,
            max_iters,
        } => {
            let set = dataset::load_csv(&data)?;
            let tol = tol.unwrap_or_else(|| hullsvm::default_gap_tolerance(&set));
            let witness = hullsvm::nearest_hull_points(&set, tol, max_iters)?;
            let h = hullsvm::construct_hyperplane(&witness)?;
            let report = FitReport {
                w: &h.w,
                b: h.b,
                delta: witness.delta,
                margin: h.margin(),
                certified_gap: witness.certified_gap,
                support_weights: SupportWeights {
                    plus: &witness.coeffs_plus,
                    minus: &witness.coeffs_minus,
                },
            };
            emit_json(&report, &cli.out)?;
            Ok(ExitCode::SUCCESS)
        }

        Command::Compress {
            data,
            matrix,
            data_out,
        } => {
            let set = dataset::load_csv(&data)?;
            let q = matrix.build(set.dim(), cli.seed)?;
            let compressed = q.apply_set(&set)?;
            dataset::save_csv(&compressed, &data_out)?;
            let meta = CompressMeta {
                m: q.m(),
                n: q.n(),
                ensemble: q.ensemble().to_string(),
                seed: q.seed(),
                scaled: q.is_scaled(),
                points: compressed.len(),
                data_out: &data_out,
            };
            emit_json(&meta, &cli.out)?;
            Ok(ExitCode::SUCCESS)
        }

        Command::Audit { data, matrix } => {
            let set = dataset::load_csv(&data)?;
            let q = matrix.build(set.dim(), cli.seed)?;
            let report = distortion::measure(&q, &set.coordinates())?;
            emit_json(&report, &cli.out)?;
            Ok(ExitCode::SUCCESS)
        }

        Command::Verify {
            data,
            matrix,
            prior,
        } => {
            let set = dataset::load_csv(&data)?;
            let q = matrix.build(set.dim(), cli.seed)?;
            let prior = match prior {
                Some(path) => Some(load_prior(&path)?),
                None => None,
            };
            let report = harness::verify(&set, &q, prior.as_ref())?;
            with_output(&cli.out, |w| harness::emit_verification(&report, format, w))?;
            Ok(if report.verdict == Verdict::Counterexample {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            })
        }

        Command::Sweep {
            n,
            per_class,
            margin,
            radius,
            sparsity,
            bias,
            data_seed,
            ensemble,
            m_list,
            repetitions,
            epsilon,
            k,
            width_trials,
        } => {
            let mut gen = GenConfig::new(n, per_class, margin, radius, data_seed).with_bias(bias);
            gen.sparsity = sparsity;
            let mut cfg = SweepConfig::new(gen, ensemble.parse()?, m_list, repetitions, cli.seed);
            cfg.epsilon = epsilon;
            cfg.k = k;
            cfg.width_trials = width_trials;
            let result = harness::sweep(&cfg)?;
            with_output(&cli.out, |w| harness::emit_sweep(&result, format, w))?;
            Ok(if result.rows.iter().any(|r| r.counterexamples > 0) {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            })
        }

        Command::Bounds { config } => {
            let raw = fs::read_to_string(&config).map_err(|source| Error::Io {
                path: config.clone(),
                source,
            })?;
            let input: BoundsInput = serde_json::from_str(&raw).map_err(|e| Error::Parse {
                path: config.clone(),
                row: 0,
                column: "<json>".into(),
                message: e.to_string(),
            })?;
            let report = evaluate_bounds(&input)?;
            emit_json(&report, &cli.out)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn evaluate_bounds(input: &BoundsInput) -> Result<BoundsReport> {
    input.config.validate()?;
    let cfg = &input.config;
    let mut notes = Vec::new();

    // Separability needs inner-product distortion below 1/||w0||^2; for
    // s-sparse radius-R data that translates to a restricted isometry
    // target of 1 / (R^2 ||w0||^2).
    let rip_target = 1.0 / (input.r * input.r * input.w0_norm * input.w0_norm);
    let (rip_sample, rip_target_delta) = match input.s {
        Some(s) if rip_target < 1.0 => {
            let m = bounds::rip_sample_bound(2 * s, input.n, rip_target, cfg.epsilon, cfg.c)
                .map(Some)
                .unwrap_or_else(|e| {
                    notes.push(format!("rip_sample_bound not applicable: {e}"));
                    None
                });
            (m, Some(rip_target))
        }
        Some(_) => {
            notes.push(format!(
                "rip_sample_bound not applicable: target delta {rip_target} is not below 1"
            ));
            (None, Some(rip_target))
        }
        None => (None, None),
    };

    let sparse_length = match input.s {
        Some(s) => {
            bounds::sparse_compression_length(input.r, input.w0_norm, s, input.n, cfg.epsilon, cfg.c)
                .map(Some)
                .unwrap_or_else(|e| {
                    notes.push(format!("sparse_compression_length not applicable: {e}"));
                    None
                })
        }
        None => None,
    };

    let min_length = bounds::min_general_compression_length(
        input.width,
        input.radius,
        cfg.epsilon,
        cfg.k,
        input.w0_norm,
        input.m_cap,
    )?;
    if min_length.is_none() {
        notes.push(format!(
            "no compression length up to m_cap = {} passes the general check",
            input.m_cap
        ));
    }
    let (eta_sd_at_min, eta_ip_at_min) = match min_length {
        Some(m) => {
            let sd = bounds::jl_distortion_bound(m, input.width, input.radius, cfg.epsilon, cfg.k)?;
            (Some(sd), Some(1.5 * sd))
        }
        None => (None, None),
    };

    let gen_bound = bounds::generalization_bound(
        input.r,
        input.w0_norm,
        cfg.delta_conf,
        input.sample_size,
    )
    .map(Some)
    .unwrap_or_else(|e| {
        notes.push(format!("generalization_bound not applicable: {e}"));
        None
    });

    let compressed_bound = match (gen_bound, eta_ip_at_min) {
        (Some(l), Some(eta)) => bounds::compressed_generalization_bound(l, eta, input.w0_norm)
            .map(Some)
            .unwrap_or_else(|e| {
                notes.push(format!("compressed_generalization_bound not applicable: {e}"));
                None
            }),
        _ => None,
    };

    Ok(BoundsReport {
        rip_sample_bound: rip_sample,
        rip_target_delta,
        sparse_compression_length: sparse_length,
        min_general_compression_length: min_length,
        eta_sd_bound_at_min_length: eta_sd_at_min,
        eta_ip_bound_at_min_length: eta_ip_at_min,
        generalization_bound: gen_bound,
        compressed_generalization_bound: compressed_bound,
        notes,
    })
}

fn load_prior(path: &Path) -> Result<Hyperplane> {
    let raw = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let plane: Hyperplane = serde_json::from_str(&raw).map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        row: 0,
        column: "<json>".into(),
        message: e.to_string(),
    })?;
    // Re-validate through the constructor.
    Hyperplane::new(plane.w, plane.b)
}

fn emit_json<T: Serialize>(value: &T, out: &Option<PathBuf>) -> Result<()> {
    with_output(out, |w| {
        let text = serde_json::to_string_pretty(value)
            .map_err(|e| Error::InvalidConfig(format!("serialization failed: {e}")))?;
        w.write_all(text.as_bytes()).and_then(|_| w.write_all(b"\n")).map_err(|source| Error::Io {
            path: "<writer>".into(),
            source,
        })
    })
}

fn with_output<F>(out: &Option<PathBuf>, f: F) -> Result<()>
where
    F: FnOnce(&mut dyn Write) -> Result<()>,
{
    match out {
        Some(path) => {
            let mut file = fs::File::create(path).map_err(|source| Error::Io {
                path: path.clone(),
                source,
            })?;
            f(&mut file)
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            f(&mut lock)
        }
    }
}
