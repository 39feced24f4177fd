//! Recovery of structured signals from quantized measurements
//! `y = Q(A x - τ)` by projected gradient descent.
//!
//! - [`quantizer`]: sign, uniform, saturated and general level quantizers.
//! - [`sensing`]: Gaussian / Rademacher ensembles with uniform dither,
//!   measurements and corruption.
//! - [`signal`]: sparse, low-rank and ℓ1-ball structure sets with their
//!   projections, generators and restricted dual norms.
//! - [`pgd`]: the one-sided ℓ1 loss, its gradients and the recovery loop.
//! - [`oracles`]: Hamming distance minimization over nets and Monte-Carlo
//!   separation probabilities.
//! - [`harness`] and [`report`]: seeded experiment sweeps, slope fits, CSV
//!   and SVG output.

pub mod error;
pub mod harness;
pub mod oracles;
pub mod pgd;
pub mod quantizer;
pub mod report;
pub mod rng;
pub mod sensing;
pub mod signal;
pub mod verify;

pub use error::{QcsError, Result};
pub use harness::{
    fit_slope, run_experiment, run_experiments, ExperimentPlan, ExperimentResult, Family, SlopeFit, TrialRecord,
};
pub use pgd::{pgd_recover, Init, PgdConfig, Recovery};
pub use quantizer::{QuantizerKind, QuantizerSpec};
pub use sensing::{corrupt, hamming, DenseMatrix, DitherKind, MatrixKind, SensingInstance};
pub use signal::{project_norm, SignalModel, Structure};
