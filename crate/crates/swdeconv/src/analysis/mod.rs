//! Closed-form mean-squared-error prediction for the thresholding estimator.
//!
//! For each bin the prediction blends two regimes. Far below the detection
//! threshold the bin is almost surely zeroed, so the error is the signal
//! energy plus a small false-alarm term proportional to the effective noise
//! level. Far above it the bin almost surely survives, and the error splits
//! into a miss term and an inversion-noise term weighted by the survival
//! probability. In between, a linear blend on the dB axis connects the two.

pub mod special;

use crate::error::{Error, Result};
use crate::scalar::{as_f64, c, Scalar};
use crate::spectral::{is_real_bin, Spectrum};
pub use special::{bessel_i0, bessel_k1, gaussian_q, marcum_q1};

/// Default half-width, in dB of per-bin output SNR, of the blend window
/// between the low- and high-SNR prediction formulas.
pub const DEFAULT_TAU_DB: f64 = 6.0;

/// Per-bin quantities the MSE prediction is computed from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinContext<T: Scalar> {
    /// Squared magnitude of the true signal bin.
    pub x_abs2: T,
    /// Effective noise level after inversion: Sv[k] / |H[k]|^2.
    pub sigma_eff2: T,
    /// Output SNR of the bin: x_abs2 / sigma_eff2.
    pub snr_out: T,
    /// Whether the bin is constrained to be real for real signals.
    pub is_real_bin: bool,
}

impl<T: Scalar> BinContext<T> {
    /// Builds a context; requires x_abs2 >= 0 and sigma_eff2 > 0, both finite.
    pub fn new(x_abs2: T, sigma_eff2: T, is_real_bin: bool) -> Result<Self> {
        if !x_abs2.is_finite() || x_abs2 < T::zero() {
            return Err(Error::InvalidParameter {
                name: "x_abs2",
                reason: format!("must be finite and >= 0, got {}", as_f64(x_abs2)),
            });
        }
        if !sigma_eff2.is_finite() || sigma_eff2 <= T::zero() {
            return Err(Error::InvalidParameter {
                name: "sigma_eff2",
                reason: format!("must be finite and > 0, got {}", as_f64(sigma_eff2)),
            });
        }
        Ok(Self { x_abs2, sigma_eff2, snr_out: x_abs2 / sigma_eff2, is_real_bin })
    }
}

/// Which prediction formula produced a bin's MSE.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Low,
    Interpolated,
    High,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Regime::Low => write!(f, "low"),
            Regime::Interpolated => write!(f, "interpolated"),
            Regime::High => write!(f, "high"),
        }
    }
}

/// Predicted per-bin MSE together with everything that went into it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MsePrediction<T: Scalar> {
    pub mse: T,
    pub regime: Regime,
    /// Probability that the bin magnitude exceeds the detection threshold.
    pub p: T,
    /// Low-SNR formula value: x_abs2 plus the false-alarm noise term.
    pub eps_low2: T,
    /// High-SNR formula value: miss term plus surviving-noise term.
    pub eps_high2: T,
    /// Blend weight on the low-SNR formula; present only when interpolating.
    pub f_tau: Option<T>,
    pub tau_db: T,
}

/// Total prediction across a spectrum plus the per-bin breakdown.
#[derive(Debug, Clone)]
pub struct TotalMsePrediction<T: Scalar> {
    pub total: T,
    pub bins: Vec<MsePrediction<T>>,
}

/// False-alarm output energy on a pure-noise complex bin, in units of
/// sigma_eff^2: with w the squared normalized magnitude (unit-mean
/// exponential), rho = E[(w - 2 + sqrt(w^2 - 4w)) / 2; w > 4]. Closed form:
/// 3/2 e^-4 + e^-2 K1(2).
pub fn rho<T: Scalar>() -> T {
    let e2 = (-2.0f64).exp();
    c(1.5 * (-4.0f64).exp() + e2 * special::bessel_k1::<f64>(2.0).expect("2 > 0"))
}

/// Real-bin counterpart of [`rho`]: with v standard normal,
/// varrho = E[(v^2 - 2 + sqrt(v^4 - 4 v^2)) / 2; |v| > 2]. Closed form:
/// e^-2 (1/2 + sqrt(2/pi)) - Q(2).
pub fn varrho<T: Scalar>() -> T {
    let e2 = (-2.0f64).exp();
    c(e2 * (0.5 + (2.0 / std::f64::consts::PI).sqrt()) - gaussian_q::<f64>(2.0))
}

/// The pair of false-alarm constants used by the low-SNR formula.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constants<T: Scalar> {
    pub rho: T,
    pub varrho: T,
}

impl<T: Scalar> Constants<T> {
    pub fn get() -> Self {
        Self { rho: rho(), varrho: varrho() }
    }
}

/// Probability that a bin with the given output SNR survives thresholding.
///
/// Complex bins follow a Rice law, real bins a shifted Gaussian pair.
/// snr_out must be finite and >= 0.
pub fn threshold_probability<T: Scalar>(snr_out: T, real_bin: bool) -> Result<T> {
    let snr = as_f64(snr_out);
    if !snr.is_finite() || snr < 0.0 {
        return Err(Error::InvalidParameter {
            name: "snr_out",
            reason: format!("must be finite and >= 0, got {snr}"),
        });
    }
    let p = if real_bin {
        let s = snr.sqrt();
        gaussian_q::<f64>(2.0 - s) + gaussian_q::<f64>(2.0 + s)
    } else {
        special::marcum_q1::<f64>((2.0 * snr).sqrt(), 2.0 * std::f64::consts::SQRT_2)?
    };
    Ok(c(p))
}

/// Closed-form MSE prediction for one bin.
///
/// tau_db sets the blend window: below -tau_db of output SNR the low
/// formula is used, above +tau_db the high formula, with a linear dB-domain
/// blend in between (weight 1 at -tau_db, 0 at +tau_db, inclusive).
pub fn predicted_mse_bin<T: Scalar>(
    ctx: &BinContext<T>,
    tau_db: T,
) -> Result<MsePrediction<T>> {
    let tau = as_f64(tau_db);
    if !tau.is_finite() || tau <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "tau_db",
            reason: format!("blend half-width must be finite and > 0, got {tau}"),
        });
    }
    let p = threshold_probability(ctx.snr_out, ctx.is_real_bin)?;
    let fa = if ctx.is_real_bin { varrho::<T>() } else { rho::<T>() };
    let eps_low2 = ctx.x_abs2 + fa * ctx.sigma_eff2;
    let eps_high2 = (T::one() - p) * ctx.x_abs2 + p * ctx.sigma_eff2;

    let snr_db = 10.0 * as_f64(ctx.snr_out).log10();
    let (mse, regime, f_tau) = if snr_db < -tau {
        (eps_low2, Regime::Low, None)
    } else if snr_db > tau {
        (eps_high2, Regime::High, None)
    } else {
        let f = c::<T>(0.5 * (1.0 - snr_db / tau));
        (f * eps_low2 + (T::one() - f) * eps_high2, Regime::Interpolated, Some(f))
    };
    Ok(MsePrediction { mse, regime, p, eps_low2, eps_high2, f_tau, tau_db })
}

/// Minimum achievable per-bin MSE with the true signal known:
/// x_abs2 * sigma_eff2 / (x_abs2 + sigma_eff2), evaluated in a form that is
/// stable when the two magnitudes are wildly different.
pub fn mmse_bin<T: Scalar>(ctx: &BinContext<T>) -> T {
    let x = ctx.x_abs2;
    let s = ctx.sigma_eff2;
    if x == T::zero() {
        return T::zero();
    }
    if x <= s {
        x / (T::one() + x / s)
    } else {
        s / (T::one() + s / x)
    }
}

/// Sums [`predicted_mse_bin`] over a whole spectrum.
///
/// sigma_eff2 is derived per bin as sv[k] / |h[k]|^2; every filter bin must
/// therefore be nonzero, and every sv[k] strictly positive.
pub fn predicted_mse_total<T: Scalar>(
    x: &Spectrum<T>,
    h: &Spectrum<T>,
    sv: &[T],
    tau_db: T,
) -> Result<TotalMsePrediction<T>> {
    let n = x.len();
    if h.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: h.len() });
    }
    if sv.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: sv.len() });
    }
    let mut bins = Vec::with_capacity(n);
    let mut total = T::zero();
    for k in 0..n {
        if !sv[k].is_finite() || sv[k] <= T::zero() {
            return Err(Error::InvalidPsd { bin: k });
        }
        let hmag2 = h.bins()[k].norm_sqr();
        if hmag2 == T::zero() {
            return Err(Error::SingularFilter { bin: k, magnitude: 0.0, tol: 0.0 });
        }
        let ctx = BinContext::new(
            x.bins()[k].norm_sqr(),
            sv[k] / hmag2,
            is_real_bin(k, n),
        )?;
        let pred = predicted_mse_bin(&ctx, tau_db)?;
        total += pred.mse;
        bins.push(pred);
    }
    Ok(TotalMsePrediction { total, bins })
}
