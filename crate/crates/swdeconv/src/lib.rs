//! Robust frequency-domain deconvolution.
//!
//! The toolkit recovers a deterministic signal x from circular-convolution
//! measurements y = h conv x + noise. Work happens bin by bin in the unitary
//! DFT domain: the headline estimator normalizes each measured bin by the
//! noise level, zeroes bins whose magnitude could plausibly be noise alone,
//! and applies a data-driven shrinkage to the inverse-filter output on the
//! bins that survive. Alongside it live classical baselines, a closed-form
//! per-bin MSE prediction, noise-level estimation, and a reproducible
//! Monte-Carlo benchmark harness.
//!
//! Modules:
//! - [`spectral`]: unitary DFT, inverse with symmetry checking, convolution
//! - [`estimators`]: thresholding estimator, baselines, fixed-point view
//! - [`analysis`]: closed-form MSE prediction and the special functions it needs
//! - [`noise`]: synthetic noise generation and robust noise-level estimation
//! - [`bench`]: benchmark signals, filters, and the Monte-Carlo driver
//!
//! All numeric code is generic over [`scalar::Scalar`] (`f32` or `f64`);
//! the documented accuracy contracts apply to `f64`, and the crate root
//! exports concrete aliases for the common instantiations.

pub mod analysis;
pub mod bench;
pub mod error;
pub mod estimators;
pub mod noise;
pub mod scalar;
pub mod spectral;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// f64 instantiations: the forms every accuracy contract is stated for.
pub type TimeSignal64 = spectral::TimeSignal<f64>;
pub type Spectrum64 = spectral::Spectrum<f64>;
pub type DeconvProblem64 = estimators::DeconvProblem<f64>;
pub type EstimateResult64 = estimators::EstimateResult<f64>;
pub type BenchConfig64 = bench::BenchConfig<f64>;
pub type BenchResult64 = bench::BenchResult<f64>;

/// f32 instantiations for space-constrained callers.
pub type TimeSignal32 = spectral::TimeSignal<f32>;
pub type Spectrum32 = spectral::Spectrum<f32>;
