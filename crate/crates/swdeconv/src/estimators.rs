//! Per-bin spectral estimators for the deconvolution problem Y = H X + V.
//!
//! The headline estimator normalizes each bin by its noise level,
//! Z[k] = Y[k]/sqrt(Sv[k]), zeroes bins with |Z| <= 2 (indistinguishable
//! from pure noise), and on surviving bins shrinks the inverse-filter
//! output by (1 + sqrt(1 - 4/|Z|^2))/2. That closed form is the limit of a
//! scalar fixed-point iteration exposed separately for inspection. The
//! classical baselines (least squares, Tikhonov, a tunable Wiener variant)
//! and the oracle Wiener filter share the same problem container.

use crate::error::{Error, Result};
use crate::scalar::{as_f64, c, Scalar};
use crate::spectral::Spectrum;
use num_complex::Complex;

/// h_tol = H_TOL_FACTOR * max_k |H[k]|: below this magnitude a filter bin
/// is treated as singular wherever inversion is required.
pub const H_TOL_FACTOR: f64 = 1e-12;

/// Default iteration cap for [`fixed_point_iterate`].
pub const FIXED_POINT_MAX_ITER: usize = 10_000;

/// Default convergence tolerance for [`fixed_point_iterate`].
pub const FIXED_POINT_TOL: f64 = 1e-12;

/// Detection threshold on |Z|: below or at it a bin is zeroed.
const THRESHOLD_MAG: f64 = 2.0;

/// One deconvolution instance: measured spectrum, filter response, and
/// per-bin noise PSD, all of length N.
#[derive(Debug, Clone, PartialEq)]
pub struct DeconvProblem<T: Scalar> {
    y: Spectrum<T>,
    h: Spectrum<T>,
    sv: Vec<T>,
    h_tol: T,
}

impl<T: Scalar> DeconvProblem<T> {
    /// Validates lengths and requires every Sv[k] finite and > 0.
    pub fn new(y: Spectrum<T>, h: Spectrum<T>, sv: Vec<T>) -> Result<Self> {
        let n = y.len();
        if h.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: h.len() });
        }
        if sv.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: sv.len() });
        }
        for (k, &s) in sv.iter().enumerate() {
            if !s.is_finite() || s <= T::zero() {
                return Err(Error::InvalidPsd { bin: k });
            }
        }
        let h_tol = c::<T>(H_TOL_FACTOR) * h.max_abs();
        Ok(Self { y, h, sv, h_tol })
    }

    /// Convenience constructor for white noise: Sv[k] = sigma_v2 at every bin.
    pub fn with_white_noise(y: Spectrum<T>, h: Spectrum<T>, sigma_v2: T) -> Result<Self> {
        let n = y.len();
        Self::new(y, h, vec![sigma_v2; n])
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn y(&self) -> &Spectrum<T> {
        &self.y
    }

    pub fn h(&self) -> &Spectrum<T> {
        &self.h
    }

    pub fn sv(&self) -> &[T] {
        &self.sv
    }

    /// Singularity tolerance in effect for this problem.
    pub fn h_tol(&self) -> T {
        self.h_tol
    }
}

/// Per-bin decision record emitted alongside the estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinDiagnostics<T: Scalar> {
    /// |Z[k]| = |Y[k]| / sqrt(Sv[k]).
    pub z_abs: T,
    /// Whether |Z[k]| > 2 (strict).
    pub above_threshold: bool,
    /// Applied gain: 0 when zeroed, in (1/2, 1] when kept.
    pub shrinkage: T,
    /// Estimated per-bin output SNR, |Z[k]|^2.
    pub snr_out_hat: T,
}

/// Estimate plus its per-bin diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateResult<T: Scalar> {
    pub x_hat: Spectrum<T>,
    pub diagnostics: Vec<BinDiagnostics<T>>,
}

/// Thresholding estimator.
///
/// Bins with |Z| <= 2 output exactly zero. Surviving bins output
/// (Y/H) (1 + sqrt(1 - 4/|Z|^2))/2; this product form involves no
/// small-denominator subtraction and preserves the phase of Y/H. The filter
/// magnitude only needs to clear h_tol at surviving bins.
pub fn sw_estimate<T: Scalar>(p: &DeconvProblem<T>) -> Result<EstimateResult<T>> {
    let n = p.len();
    let four = c::<T>(THRESHOLD_MAG * THRESHOLD_MAG);
    let half = c::<T>(0.5);
    let mut bins = Vec::with_capacity(n);
    let mut diagnostics = Vec::with_capacity(n);
    for k in 0..n {
        let y = p.y.bins()[k];
        let snr_out_hat = y.norm_sqr() / p.sv[k];
        let z_abs = snr_out_hat.sqrt();
        if snr_out_hat <= four {
            bins.push(Complex::new(T::zero(), T::zero()));
            diagnostics.push(BinDiagnostics {
                z_abs,
                above_threshold: false,
                shrinkage: T::zero(),
                snr_out_hat,
            });
        } else {
            let h = p.h.bins()[k];
            let hmag = h.norm();
            if hmag <= p.h_tol {
                return Err(Error::SingularFilter {
                    bin: k,
                    magnitude: as_f64(hmag),
                    tol: as_f64(p.h_tol),
                });
            }
            let shrinkage = half * (T::one() + (T::one() - four / snr_out_hat).sqrt());
            bins.push((y / h).scale(shrinkage));
            diagnostics.push(BinDiagnostics {
                z_abs,
                above_threshold: true,
                shrinkage,
                snr_out_hat,
            });
        }
    }
    Ok(EstimateResult { x_hat: Spectrum::from_raw(bins), diagnostics })
}

/// Trace of the scalar magnitude recursion behind the estimator.
#[derive(Debug, Clone, PartialEq)]
pub struct FixedPointTrace<T: Scalar> {
    /// gamma_0, gamma_1, ...: reciprocal-magnitude iterates, monotonically
    /// nondecreasing.
    pub iterates: Vec<T>,
    pub converged: bool,
    /// Finite limit when converged; None marks divergence (the estimate is
    /// zero because 1/gamma -> 0).
    pub limit: Option<T>,
}

/// Runs gamma_{t+1} = alpha (1 + beta^2 gamma_t^2) from gamma_0 = alpha,
/// where alpha = |H|/|Y| and beta^2 = Sv/|H|^2 for the given bin.
///
/// The recursion converges iff alpha^2 beta^2 < 1/4 (equivalently |Z| > 2);
/// 1/limit is then the estimate magnitude. Divergence is declared once an
/// iterate exceeds 1/tol; convergence once successive iterates agree within
/// tol * max(1, gamma). Hitting max_iter with neither is a no-decision
/// error. sv_bin = 0 is the noise-free case and converges immediately.
pub fn fixed_point_iterate<T: Scalar>(
    y_bin: Complex<T>,
    h_bin: Complex<T>,
    sv_bin: T,
    max_iter: usize,
    tol: T,
) -> Result<FixedPointTrace<T>> {
    let ymag = y_bin.norm();
    let hmag = h_bin.norm();
    if !ymag.is_finite() || ymag <= T::zero() {
        return Err(Error::InvalidParameter {
            name: "y_bin",
            reason: "iteration needs finite |Y| > 0".into(),
        });
    }
    if !hmag.is_finite() || hmag <= T::zero() {
        return Err(Error::InvalidParameter {
            name: "h_bin",
            reason: "iteration needs finite |H| > 0".into(),
        });
    }
    if !sv_bin.is_finite() || sv_bin < T::zero() {
        return Err(Error::InvalidParameter {
            name: "sv_bin",
            reason: format!("noise power must be finite and >= 0, got {}", as_f64(sv_bin)),
        });
    }
    if !tol.is_finite() || tol <= T::zero() {
        return Err(Error::InvalidParameter {
            name: "tol",
            reason: format!("tolerance must be finite and > 0, got {}", as_f64(tol)),
        });
    }
    if max_iter == 0 {
        return Err(Error::InvalidParameter {
            name: "max_iter",
            reason: "need at least one iteration".into(),
        });
    }

    let alpha = hmag / ymag;
    let beta2 = sv_bin / (hmag * hmag);
    let cap = tol.recip();
    let mut iterates = vec![alpha];
    let mut gamma = alpha;
    for _ in 0..max_iter {
        let next = alpha * (T::one() + beta2 * gamma * gamma);
        iterates.push(next);
        if next > cap {
            return Ok(FixedPointTrace { iterates, converged: false, limit: None });
        }
        if (next - gamma).abs() <= tol * T::one().max(next) {
            return Ok(FixedPointTrace { iterates, converged: true, limit: Some(next) });
        }
        gamma = next;
    }
    Err(Error::NoDecision { iterations: max_iter })
}

/// Plain inverse filtering: x_hat[k] = Y[k]/H[k]. Every bin must clear h_tol.
pub fn ls_estimate<T: Scalar>(p: &DeconvProblem<T>) -> Result<Spectrum<T>> {
    let mut bins = Vec::with_capacity(p.len());
    for k in 0..p.len() {
        let h = p.h.bins()[k];
        let hmag = h.norm();
        if hmag <= p.h_tol {
            return Err(Error::SingularFilter {
                bin: k,
                magnitude: as_f64(hmag),
                tol: as_f64(p.h_tol),
            });
        }
        bins.push(p.y.bins()[k] / h);
    }
    Ok(Spectrum::from_raw(bins))
}

/// Tikhonov-regularized inversion with signal-power guess px:
/// x_hat[k] = Y[k] conj(H[k]) / (|H[k]|^2 + Sv[k]/px).
///
/// The denominator is strictly positive, so zero filter bins output zero
/// without error.
pub fn tik_estimate<T: Scalar>(p: &DeconvProblem<T>, px: T) -> Result<Spectrum<T>> {
    if !px.is_finite() || px <= T::zero() {
        return Err(Error::InvalidParameter {
            name: "px",
            reason: format!("signal power must be finite and > 0, got {}", as_f64(px)),
        });
    }
    let mut bins = Vec::with_capacity(p.len());
    for k in 0..p.len() {
        let h = p.h.bins()[k];
        let denom = h.norm_sqr() + p.sv[k] / px;
        bins.push((p.y.bins()[k] * h.conj()).scale(denom.recip()));
    }
    Ok(Spectrum::from_raw(bins))
}

/// Wiener-style inversion driven by the measured bin SNR with a
/// noise-control knob q >= 1:
/// snr_i[k] = max(|Z[k]|^2 - 1, 0), x_hat[k] = (Y[k]/H[k]) / (1 + q/snr_i[k]),
/// with the snr_i = 0 limit giving exactly zero. Every bin must clear h_tol.
pub fn mw_estimate<T: Scalar>(p: &DeconvProblem<T>, q: T) -> Result<Spectrum<T>> {
    if !q.is_finite() || q < T::one() {
        return Err(Error::InvalidParameter {
            name: "q",
            reason: format!("noise-control parameter must be >= 1, got {}", as_f64(q)),
        });
    }
    let mut bins = Vec::with_capacity(p.len());
    for k in 0..p.len() {
        let h = p.h.bins()[k];
        let hmag = h.norm();
        if hmag <= p.h_tol {
            return Err(Error::SingularFilter {
                bin: k,
                magnitude: as_f64(hmag),
                tol: as_f64(p.h_tol),
            });
        }
        let y = p.y.bins()[k];
        let snr_i = (y.norm_sqr() / p.sv[k] - T::one()).max(T::zero());
        if snr_i == T::zero() {
            bins.push(Complex::new(T::zero(), T::zero()));
        } else {
            let gain = (T::one() + q / snr_i).recip();
            bins.push((y / h).scale(gain));
        }
    }
    Ok(Spectrum::from_raw(bins))
}

/// Unrealizable per-bin Wiener benchmark that sees the true signal:
/// x_hat[k] = Y[k] conj(H[k]) |X[k]|^2 / (|H[k]|^2 |X[k]|^2 + Sv[k]).
///
/// The fused quotient handles zero-signal bins (output exactly zero) and
/// zero filter bins without special cases; Sv > 0 keeps it well defined.
pub fn mmse_oracle_estimate<T: Scalar>(
    x_true: &Spectrum<T>,
    p: &DeconvProblem<T>,
) -> Result<Spectrum<T>> {
    if x_true.len() != p.len() {
        return Err(Error::DimensionMismatch { expected: p.len(), got: x_true.len() });
    }
    let mut bins = Vec::with_capacity(p.len());
    for k in 0..p.len() {
        let h = p.h.bins()[k];
        let xa2 = x_true.bins()[k].norm_sqr();
        let denom = h.norm_sqr() * xa2 + p.sv[k];
        bins.push((p.y.bins()[k] * h.conj()).scale(xa2 / denom));
    }
    Ok(Spectrum::from_raw(bins))
}

/// Squared spectral distance sum_k |x_true[k] - x_hat[k]|^2 for one
/// realization; equals the time-domain squared error by unitarity.
pub fn empirical_mse<T: Scalar>(x_true: &Spectrum<T>, x_hat: &Spectrum<T>) -> Result<T> {
    if x_true.len() != x_hat.len() {
        return Err(Error::DimensionMismatch { expected: x_true.len(), got: x_hat.len() });
    }
    let mut acc = T::zero();
    for (a, b) in x_true.bins().iter().zip(x_hat.bins()) {
        acc += (*a - *b).norm_sqr();
    }
    Ok(acc)
}
