//! Margin preservation of linearly separable data under linear compression.
//!
//! A linearly separable point set stays separable after compression by a
//! matrix `Q` whenever the inner-product distortion that `Q` introduces over
//! the set is smaller than the squared margin of the data. This crate makes
//! every ingredient of that statement executable:
//!
//! - [`dataset`]: labeled point sets, CSV persistence, and a seeded
//!   generator for separable synthetic data with planted margin, radius,
//!   and sparsity.
//! - [`projection`]: sub-Gaussian random compression matrices (gaussian,
//!   rademacher, uniform ensembles) and explicit user matrices.
//! - [`distortion`]: exact inner-product / squared-distance distortion over
//!   a finite set, conversions between the two, exact restricted isometry
//!   constants by support enumeration, and Monte Carlo Gaussian width.
//! - [`hullsvm`]: the maximum-margin hyperplane built from the nearest pair
//!   of points between the class hulls (Frank-Wolfe with pairwise steps),
//!   an independent LP separability oracle, and the compatibility audit
//!   that links hull geometry to compression.
//! - [`bounds`]: closed-form compression-length and generalization bounds.
//! - [`harness`]: end-to-end verification and compression-length sweeps
//!   with reproducible seeds and JSON/CSV reports.
//!
//! Start with `examples/verify_preservation.rs` for the full pipeline on a
//! synthetic set, or the `marginscope` binary for the same flows on CSV
//! files.

pub mod bounds;
pub mod dataset;
pub mod distortion;
pub mod error;
pub mod harness;
pub mod hullsvm;
pub mod projection;

mod linalg;
mod rng;

pub use error::{Error, Result};
pub use rng::{seeded, subseed};
