//! Synthetic noise generation and data-driven noise-level estimation.
//!
//! Generation covers three zero-mean families calibrated to an exact target
//! variance. Streams are fully deterministic: a ChaCha12 generator is seeded
//! from the spec's 64-bit seed, and independent substreams for parallel
//! trials come from the generator's stream counter, so results do not depend
//! on scheduling or thread count.
//!
//! Estimation works on the measured spectrum: the noise level from the
//! median absolute deviation of the bin components (robust to sparse signal
//! bins), the signal power from the residual bin energy.

use crate::error::{Error, Result};
use crate::scalar::{as_f64, c, Scalar};
use crate::spectral::{Spectrum, TimeSignal};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use std::str::FromStr;

/// Scale factor turning a Gaussian MAD into a standard deviation:
/// 1/Phi^-1(3/4), conventionally rounded to 1.4826.
pub const MAD_TO_SIGMA: f64 = 1.4826;

/// Noise family of the generated time-domain samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseFamily {
    Gaussian,
    Laplace,
    Uniform,
}

impl std::fmt::Display for NoiseFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            NoiseFamily::Gaussian => write!(f, "gaussian"),
            NoiseFamily::Laplace => write!(f, "laplace"),
            NoiseFamily::Uniform => write!(f, "uniform"),
        }
    }
}

impl FromStr for NoiseFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gaussian" | "normal" => Ok(NoiseFamily::Gaussian),
            "laplace" => Ok(NoiseFamily::Laplace),
            "uniform" => Ok(NoiseFamily::Uniform),
            other => Err(Error::InvalidParameter {
                name: "family",
                reason: format!("unknown noise family {other:?} (gaussian|laplace|uniform)"),
            }),
        }
    }
}

/// Everything needed to generate a reproducible noise stream.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec<T: Scalar> {
    pub family: NoiseFamily,
    /// Target variance of the time-domain samples.
    pub sigma_v2: T,
    pub seed: u64,
}

/// Draws n i.i.d. samples on substream 0; see [`generate_noise_substream`].
pub fn generate_noise<T: Scalar>(spec: &NoiseSpec<T>, n: usize) -> Result<TimeSignal<T>> {
    generate_noise_substream(spec, n, 0)
}

/// Draws n i.i.d. zero-mean samples with variance sigma_v2 from the spec's
/// family, on an explicit substream.
///
/// Substreams are realized through ChaCha12's 64-bit stream counter: the
/// generator is seeded from `spec.seed` and positioned on `substream`, so
/// (seed, substream, family, n) fully determine the output bit for bit.
pub fn generate_noise_substream<T: Scalar>(
    spec: &NoiseSpec<T>,
    n: usize,
    substream: u64,
) -> Result<TimeSignal<T>> {
    if !spec.sigma_v2.is_finite() || spec.sigma_v2 <= T::zero() {
        return Err(Error::InvalidParameter {
            name: "sigma_v2",
            reason: format!("variance must be finite and > 0, got {}", as_f64(spec.sigma_v2)),
        });
    }
    if n < 2 {
        return Err(Error::InvalidParameter {
            name: "n",
            reason: format!("need at least 2 samples, got {n}"),
        });
    }
    let mut rng = ChaCha12Rng::seed_from_u64(spec.seed);
    rng.set_stream(substream);

    let sigma = spec.sigma_v2.sqrt();
    let half = c::<T>(0.5);
    let samples: Vec<T> = match spec.family {
        NoiseFamily::Gaussian => (0..n)
            .map(|_| sigma * T::standard_normal(&mut rng))
            .collect(),
        NoiseFamily::Laplace => {
            // Inverse CDF with scale b = sigma/sqrt(2), so the variance
            // 2 b^2 hits sigma_v2 exactly.
            let b = sigma * c::<T>(std::f64::consts::FRAC_1_SQRT_2);
            (0..n)
                .map(|_| {
                    let mut u = T::unit_uniform(&mut rng);
                    while u == T::zero() {
                        u = T::unit_uniform(&mut rng);
                    }
                    let center = u - half;
                    let mag = T::one() - (center.abs() + center.abs());
                    -b * center.signum() * mag.ln()
                })
                .collect()
        }
        NoiseFamily::Uniform => {
            // Half-width a = sqrt(3 sigma_v2) gives variance a^2/3 = sigma_v2.
            let a = (c::<T>(3.0) * spec.sigma_v2).sqrt();
            let two = c::<T>(2.0);
            (0..n)
                .map(|_| a * (two * T::unit_uniform(&mut rng) - T::one()))
                .collect()
        }
    };
    TimeSignal::new(samples)
}

/// Robust noise-level estimate from a measured spectrum:
/// sigma_hat = (MAD_TO_SIGMA/sqrt 2) * (MAD(Re Y) + MAD(Im Y)), where
/// MAD(u) = median(|u - median(u)|). Needs at least 4 bins.
///
/// All N bins enter unweighted, including the real ones; their deviation
/// from the complex-bin statistics contributes O(1/N). Returns the standard
/// deviation; square it for a white PSD.
pub fn estimate_sigma_v<T: Scalar>(y: &Spectrum<T>) -> Result<T> {
    if y.len() < 4 {
        return Err(Error::InvalidParameter {
            name: "Y",
            reason: format!("need at least 4 bins, got {}", y.len()),
        });
    }
    let re: Vec<T> = y.bins().iter().map(|b| b.re).collect();
    let im: Vec<T> = y.bins().iter().map(|b| b.im).collect();
    let mad_sum = mad(&re) + mad(&im);
    if mad_sum == T::zero() {
        return Err(Error::DegenerateData {
            reason: "all bins identical in both components; no noise scale visible".into(),
        });
    }
    Ok(c::<T>(MAD_TO_SIGMA * std::f64::consts::FRAC_1_SQRT_2) * mad_sum)
}

/// Residual signal-power estimate: max(mean |Y|^2 - sigma_v2_hat, floor)
/// with floor = 1e-12 * mean |Y|^2, so a noise-dominated spectrum yields a
/// tiny positive power instead of a negative one.
pub fn estimate_px<T: Scalar>(y: &Spectrum<T>, sigma_v2_hat: T) -> Result<T> {
    if !sigma_v2_hat.is_finite() || sigma_v2_hat < T::zero() {
        return Err(Error::InvalidParameter {
            name: "sigma_v2_hat",
            reason: format!("must be finite and >= 0, got {}", as_f64(sigma_v2_hat)),
        });
    }
    let n = T::from_usize(y.len()).expect("length fits scalar");
    let py = y.bins().iter().fold(T::zero(), |acc, b| acc + b.norm_sqr()) / n;
    let floor = c::<T>(1e-12) * py;
    Ok((py - sigma_v2_hat).max(floor))
}

fn mad<T: Scalar>(xs: &[T]) -> T {
    let m = median_of(xs.to_vec());
    let dev: Vec<T> = xs.iter().map(|&x| (x - m).abs()).collect();
    median_of(dev)
}

fn median_of<T: Scalar>(mut v: Vec<T>) -> T {
    v.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) * c::<T>(0.5)
    }
}
