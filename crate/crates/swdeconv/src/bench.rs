//! Reproducible Monte-Carlo benchmark harness.
//!
//! Builds test problems from a small family of closed-form spectra and a
//! one-parameter filter bank, sweeps average output SNR over a grid, and
//! accumulates empirical MSE per estimation method alongside the analytical
//! prediction. Results are deterministic for a fixed configuration: every
//! trial draws from its own counter-derived RNG substream and the reduction
//! over trials is sequential, so thread count does not affect the output.

use num_complex::Complex;
use rayon::prelude::*;

use crate::analysis::predicted_mse_total;
use crate::error::{Error, Result};
use crate::estimators::{
    empirical_mse, ls_estimate, mmse_oracle_estimate, mw_estimate, sw_estimate, tik_estimate,
    DeconvProblem,
};
use crate::noise::{estimate_px, estimate_sigma_v, generate_noise_substream, NoiseFamily, NoiseSpec};
use crate::scalar::{as_f64, c, Scalar};
use crate::spectral::{principal_frequency, unitary_dft, Spectrum};

/// Default width parameter for the built-in spectra.
pub const DEFAULT_DELTA: f64 = 1.5;

/// Default Wiener-style overshrinkage exponent used when none is given.
pub const MW_DEFAULT_Q: f64 = 2.0;

/// Built-in test spectrum families.
///
/// All built-ins are real, even in frequency, and hence describe real time
/// signals.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignalKind {
    /// Band-limited plateau: a rectangle smoothed by a triangle, evaluated on
    /// a dilated frequency axis. Flat at `2*pi` near DC, smooth roll-off, and
    /// exactly zero outside a narrow band.
    X1,
    /// Gaussian bell `exp(-delta * w_k^2)` on the principal frequency axis.
    /// Strictly positive everywhere but decays fast.
    X2,
    /// Sparse comb: unit mass at bins `8*l` and `n - 8*l` for `l = 1..=4`,
    /// zero elsewhere.
    X3,
    /// Caller-provided spectrum, passed through unchanged.
    Custom,
}

impl std::fmt::Display for SignalKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            SignalKind::X1 => "x1",
            SignalKind::X2 => "x2",
            SignalKind::X3 => "x3",
            SignalKind::Custom => "custom",
        };
        f.write_str(name)
    }
}

impl std::str::FromStr for SignalKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "x1" => Ok(SignalKind::X1),
            "x2" => Ok(SignalKind::X2),
            "x3" => Ok(SignalKind::X3),
            "custom" => Ok(SignalKind::Custom),
            _ => Err(Error::InvalidParameter {
                name: "signal",
                reason: format!("unknown signal kind `{s}` (expected x1, x2, x3, or custom)"),
            }),
        }
    }
}

/// Recipe for the true spectrum of a benchmark problem.
#[derive(Debug, Clone)]
pub struct SignalSpec<T: Scalar> {
    pub kind: SignalKind,
    /// Number of frequency bins.
    pub n: usize,
    /// Width parameter for the built-in spectra; ignored for `Custom`.
    pub delta: T,
    /// Spectrum used when `kind` is `Custom`; ignored otherwise.
    pub custom: Option<Spectrum<T>>,
}

impl<T: Scalar> SignalSpec<T> {
    /// Built-in spectrum with the default width parameter.
    pub fn builtin(kind: SignalKind, n: usize) -> Self {
        SignalSpec { kind, n, delta: c(DEFAULT_DELTA), custom: None }
    }

    /// Caller-provided spectrum.
    pub fn custom(spectrum: Spectrum<T>) -> Self {
        let n = spectrum.len();
        SignalSpec { kind: SignalKind::Custom, n, delta: c(DEFAULT_DELTA), custom: Some(spectrum) }
    }
}

/// Cumulative integral of the unit triangle bump on [-1, 1].
fn triangle_cdf(x: f64) -> f64 {
    if x <= -1.0 {
        0.0
    } else if x <= 0.0 {
        0.5 * (x + 1.0) * (x + 1.0)
    } else if x <= 1.0 {
        1.0 - 0.5 * (1.0 - x) * (1.0 - x)
    } else {
        1.0
    }
}

/// Materializes the spectrum described by `spec`.
///
/// Built-ins require `n >= 16`; the sparse comb additionally requires
/// `8 * 4 < n / 2` so that its mirrored bins stay distinct. A `Custom` spec
/// must carry a spectrum whose length matches `n`.
pub fn make_signal<T: Scalar>(spec: &SignalSpec<T>) -> Result<Spectrum<T>> {
    if spec.kind == SignalKind::Custom {
        let spectrum = spec.custom.as_ref().ok_or(Error::InvalidParameter {
            name: "custom",
            reason: "signal kind is `custom` but no spectrum was provided".to_string(),
        })?;
        if spectrum.len() != spec.n {
            return Err(Error::DimensionMismatch { expected: spec.n, got: spectrum.len() });
        }
        return Ok(spectrum.clone());
    }

    let n = spec.n;
    if n < 16 {
        return Err(Error::InvalidParameter {
            name: "n",
            reason: format!("built-in spectra need at least 16 bins, got {n}"),
        });
    }
    let delta = as_f64(spec.delta);
    if !(delta.is_finite() && delta > 0.0) {
        return Err(Error::InvalidParameter {
            name: "delta",
            reason: format!("width parameter must be finite and positive, got {}", spec.delta),
        });
    }

    let mut values = vec![Complex::new(T::zero(), T::zero()); n];
    match spec.kind {
        SignalKind::X1 => {
            // Rectangle of half-width pi convolved with a triangle of
            // half-width delta, scaled so the plateau sits at 2*pi, then
            // sampled on the dilated axis 6 * delta * w_k. Closed form via
            // the triangle CDF.
            fill_even(&mut values, |w| {
                let omega = 6.0 * delta * w;
                let hi = triangle_cdf((omega + std::f64::consts::PI) / delta);
                let lo = triangle_cdf((omega - std::f64::consts::PI) / delta);
                2.0 * std::f64::consts::PI * (hi - lo)
            });
        }
        SignalKind::X2 => {
            fill_even(&mut values, |w| (-delta * w * w).exp());
        }
        SignalKind::X3 => {
            // Mirrored bins must stay below the half rate and distinct.
            if 2 * 8 * 4 >= n {
                return Err(Error::InvalidParameter {
                    name: "n",
                    reason: format!("sparse comb needs 8 * 4 < n / 2, got n = {n}"),
                });
            }
            for l in 1..=4usize {
                values[8 * l] = Complex::new(T::one(), T::zero());
                values[n - 8 * l] = Complex::new(T::one(), T::zero());
            }
        }
        SignalKind::Custom => unreachable!(),
    }
    Spectrum::new(values)
}

/// Evaluates a real, even function of the principal frequency on bins
/// `0..=n/2` and mirrors the rest, so the spectrum is even bit-for-bit.
fn fill_even<T: Scalar>(values: &mut [Complex<T>], f: impl Fn(f64) -> f64) {
    let n = values.len();
    for k in 0..=n / 2 {
        let w = as_f64(principal_frequency::<T>(k, n));
        values[k] = Complex::new(c(f(w)), T::zero());
    }
    for k in n / 2 + 1..n {
        values[k] = values[n - k];
    }
}

/// Recipe for the one-parameter filter bank.
#[derive(Debug, Clone, Copy)]
pub struct FilterSpec<T: Scalar> {
    /// Pole location; must satisfy `|alpha| < 1`. Positive values give a
    /// low-pass response, negative values a high-pass one, zero the identity.
    pub alpha: T,
    pub n: usize,
}

/// Frequency response `H[k] = (1 - alpha) / (1 - alpha * exp(-i w_k))`.
///
/// `H[0] = 1` exactly for every admissible `alpha`; the magnitude is monotone
/// in `|w_k|` and reaches its other extreme, `(1 - alpha) / (1 + alpha)`, at
/// the half rate. For positive poles that extreme is the minimum (low-pass),
/// for negative poles the maximum (high-pass).
pub fn make_filter<T: Scalar>(spec: &FilterSpec<T>) -> Result<Spectrum<T>> {
    if spec.n < 2 {
        return Err(Error::InvalidParameter {
            name: "n",
            reason: format!("filter needs at least 2 bins, got {}", spec.n),
        });
    }
    let alpha = as_f64(spec.alpha);
    if !(alpha.is_finite() && alpha.abs() < 1.0) {
        return Err(Error::InvalidParameter {
            name: "alpha",
            reason: format!("pole must satisfy |alpha| < 1, got {}", spec.alpha),
        });
    }
    let n = spec.n;
    let values = (0..n)
        .map(|k| {
            let w = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
            let denom = Complex::new(1.0 - alpha * w.cos(), alpha * w.sin());
            let h = Complex::new(1.0 - alpha, 0.0) / denom;
            Complex::new(c(h.re), c(h.im))
        })
        .collect();
    Spectrum::new(values)
}

/// Mean per-bin output SNR `(1/N) * sum |H X|^2 / sv` for white noise of
/// per-bin power `sv`.
pub fn avg_output_snr<T: Scalar>(x: &Spectrum<T>, h: &Spectrum<T>, sigma_v2: T) -> Result<T> {
    if x.len() != h.len() {
        return Err(Error::DimensionMismatch { expected: x.len(), got: h.len() });
    }
    if !(sigma_v2.is_finite() && sigma_v2 > T::zero()) {
        return Err(Error::InvalidPsd { bin: 0 });
    }
    let mut acc = T::zero();
    for (xk, hk) in x.bins().iter().zip(h.bins()) {
        acc += (xk * hk).norm_sqr();
    }
    Ok(acc / (sigma_v2 * c(x.len() as f64)))
}

/// Solves for the white-noise power that achieves a target average output
/// SNR in decibels. The signal must have nonzero energy through the filter.
pub fn solve_sigma_for_snr<T: Scalar>(
    x: &Spectrum<T>,
    h: &Spectrum<T>,
    target_snr_db: T,
) -> Result<T> {
    if x.len() != h.len() {
        return Err(Error::DimensionMismatch { expected: x.len(), got: h.len() });
    }
    if !target_snr_db.is_finite() {
        return Err(Error::InvalidParameter {
            name: "target_snr_db",
            reason: format!("target SNR must be finite, got {target_snr_db}"),
        });
    }
    let mut power = T::zero();
    for (xk, hk) in x.bins().iter().zip(h.bins()) {
        power += (xk * hk).norm_sqr();
    }
    power /= c(x.len() as f64);
    if power <= T::zero() {
        return Err(Error::InvalidParameter {
            name: "signal",
            reason: "signal has zero energy through the filter; SNR is undefined".to_string(),
        });
    }
    let exponent = as_f64(target_snr_db) / 10.0;
    Ok(power / c(10f64.powf(exponent)))
}

/// Estimation methods the harness can run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method<T: Scalar> {
    /// Blind thresholding estimator.
    Sw,
    /// Plain inverse filter.
    Ls,
    /// Regularized inverse using the data-estimated signal power.
    Tik,
    /// Regularized inverse using the true mean signal power.
    TikOracle,
    /// Wiener-style overshrinkage with exponent `q >= 1`.
    Mw(T),
    /// Per-bin oracle that knows the true spectrum.
    MmseOracle,
}

impl<T: Scalar> std::fmt::Display for Method<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Method::Sw => f.write_str("sw"),
            Method::Ls => f.write_str("ls"),
            Method::Tik => f.write_str("tik"),
            Method::TikOracle => f.write_str("tik_oracle"),
            Method::Mw(q) => write!(f, "mw(q={q})"),
            Method::MmseOracle => f.write_str("mmse_oracle"),
        }
    }
}

impl<T: Scalar> std::str::FromStr for Method<T> {
    type Err = Error;

    /// Accepts `sw`, `ls`, `tik`, `tik_oracle`, `mmse_oracle`, `mw` (default
    /// exponent), or `mw(<q>)`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        match s.as_str() {
            "sw" => return Ok(Method::Sw),
            "ls" => return Ok(Method::Ls),
            "tik" => return Ok(Method::Tik),
            "tik_oracle" => return Ok(Method::TikOracle),
            "mmse_oracle" => return Ok(Method::MmseOracle),
            "mw" => return Ok(Method::Mw(c(MW_DEFAULT_Q))),
            _ => {}
        }
        let inner = s
            .strip_prefix("mw(")
            .and_then(|rest| rest.strip_suffix(')'))
            .map(|body| body.strip_prefix("q=").unwrap_or(body));
        if let Some(body) = inner {
            let q: f64 = body.parse().map_err(|_| Error::InvalidParameter {
                name: "method",
                reason: format!("cannot parse overshrinkage exponent in `{s}`"),
            })?;
            if !(q.is_finite() && q >= 1.0) {
                return Err(Error::InvalidParameter {
                    name: "method",
                    reason: format!("overshrinkage exponent must be >= 1, got {q}"),
                });
            }
            return Ok(Method::Mw(c(q)));
        }
        Err(Error::InvalidParameter {
            name: "method",
            reason: format!("unknown method `{s}`"),
        })
    }
}

/// Full description of a benchmark run.
#[derive(Debug, Clone)]
pub struct BenchConfig<T: Scalar> {
    pub signal: SignalSpec<T>,
    pub filter: FilterSpec<T>,
    pub noise_family: NoiseFamily,
    /// Base RNG seed; each (grid point, trial) pair derives its own substream.
    pub seed: u64,
    /// Target average output SNRs in decibels, one grid point each.
    pub snr_grid_db: Vec<T>,
    /// Monte-Carlo trials per grid point.
    pub trials: usize,
    pub methods: Vec<Method<T>>,
    /// When false, every method replaces the true noise power with a robust
    /// estimate recomputed from each trial's observation.
    pub noise_known: bool,
    /// Half-width in dB of the blended region of the MSE prediction.
    pub tau_db: T,
}

/// One (grid point, method) cell of a finished run.
#[derive(Debug, Clone)]
pub struct BenchRow<T: Scalar> {
    /// Target average output SNR for this grid point, in dB.
    pub snr_avg_db: T,
    pub method: Method<T>,
    /// Mean empirical MSE over the trials.
    pub mse: T,
    /// Standard error of that mean (zero when there is a single trial).
    pub stderr: T,
    /// Analytical total MSE; populated only for the thresholding estimator.
    pub predicted_mse: Option<T>,
}

/// Outcome of `run_bench`: one row per (grid point, method), in the order
/// the grid and method lists were given.
#[derive(Debug, Clone)]
pub struct BenchResult<T: Scalar> {
    pub config: BenchConfig<T>,
    pub rows: Vec<BenchRow<T>>,
}

fn db10(x: f64) -> f64 {
    10.0 * x.log10()
}

impl<T: Scalar> BenchResult<T> {
    /// Renders the rows as CSV with a header line. The last column is empty
    /// for methods without an analytical prediction.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("snr_avg_db,method,mse,mse_db,stderr,predicted_mse_db\n");
        for row in &self.rows {
            let mse = as_f64(row.mse);
            let predicted = row
                .predicted_mse
                .map(|p| format!("{:.6}", db10(as_f64(p))))
                .unwrap_or_default();
            out.push_str(&format!(
                "{},{},{:e},{:.6},{:e},{}\n",
                row.snr_avg_db,
                row.method,
                row.mse,
                db10(mse),
                row.stderr,
                predicted
            ));
        }
        out
    }

    /// Renders the full run, configuration included, as a JSON document.
    /// Contains no timestamps or environment data, so identical runs yield
    /// identical bytes.
    pub fn to_json(&self) -> String {
        let cfg = &self.config;
        let signal = serde_json::json!({
            "kind": cfg.signal.kind.to_string(),
            "n": cfg.signal.n,
            "delta": as_f64(cfg.signal.delta),
        });
        let config = serde_json::json!({
            "signal": signal,
            "filter": { "alpha": as_f64(cfg.filter.alpha), "n": cfg.filter.n },
            "noise_family": cfg.noise_family.to_string(),
            "seed": cfg.seed,
            "snr_grid_db": cfg.snr_grid_db.iter().map(|s| as_f64(*s)).collect::<Vec<_>>(),
            "trials": cfg.trials,
            "methods": cfg.methods.iter().map(|m| m.to_string()).collect::<Vec<_>>(),
            "noise_known": cfg.noise_known,
            "tau_db": as_f64(cfg.tau_db),
        });
        let rows: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|row| {
                serde_json::json!({
                    "snr_avg_db": as_f64(row.snr_avg_db),
                    "method": row.method.to_string(),
                    "mse": as_f64(row.mse),
                    "mse_db": db10(as_f64(row.mse)),
                    "stderr": as_f64(row.stderr),
                    "predicted_mse_db": row.predicted_mse.map(|p| db10(as_f64(p))),
                })
            })
            .collect();
        let doc = serde_json::json!({ "config": config, "rows": rows });
        serde_json::to_string_pretty(&doc).expect("benchmark JSON serialization cannot fail")
    }
}

/// Applies one method to one observed trial.
fn run_method<T: Scalar>(
    method: Method<T>,
    problem: &DeconvProblem<T>,
    x_true: &Spectrum<T>,
    px_data: T,
    px_true: T,
) -> Result<Spectrum<T>> {
    match method {
        Method::Sw => Ok(sw_estimate(problem)?.x_hat),
        Method::Ls => ls_estimate(problem),
        Method::Tik => tik_estimate(problem, px_data),
        Method::TikOracle => tik_estimate(problem, px_true),
        Method::Mw(q) => mw_estimate(problem, q),
        Method::MmseOracle => mmse_oracle_estimate(x_true, problem),
    }
}

/// Runs the full Monte-Carlo sweep described by `config`.
///
/// For every grid point the white-noise power is solved from the target SNR,
/// then `trials` independent observations are formed and every requested
/// method is applied to each. Trials run in parallel but are reduced in
/// index order, so results are independent of thread count. The analytical
/// prediction attached to thresholding rows always uses the true noise
/// power, even when the estimators themselves work with an estimated one.
pub fn run_bench<T: Scalar>(config: &BenchConfig<T>) -> Result<BenchResult<T>> {
    let x = make_signal(&config.signal)?;
    let h = make_filter(&config.filter)?;
    if x.len() != h.len() {
        return Err(Error::DimensionMismatch { expected: x.len(), got: h.len() });
    }
    if config.trials == 0 {
        return Err(Error::InvalidParameter {
            name: "trials",
            reason: "at least one trial is required".to_string(),
        });
    }
    if config.methods.is_empty() {
        return Err(Error::InvalidParameter {
            name: "methods",
            reason: "at least one method is required".to_string(),
        });
    }
    if config.snr_grid_db.is_empty() {
        return Err(Error::InvalidParameter {
            name: "snr_grid_db",
            reason: "the SNR grid is empty".to_string(),
        });
    }
    let tau = as_f64(config.tau_db);
    if !(tau.is_finite() && tau > 0.0) {
        return Err(Error::InvalidParameter {
            name: "tau_db",
            reason: format!("blend half-width must be finite and positive, got {}", config.tau_db),
        });
    }

    let n = x.len();
    let hx: Vec<Complex<T>> =
        x.bins().iter().zip(h.bins()).map(|(xk, hk)| xk * hk).collect();
    let mut px_true = T::zero();
    for xk in x.bins() {
        px_true += xk.norm_sqr();
    }
    px_true /= c(n as f64);

    let mut rows = Vec::with_capacity(config.snr_grid_db.len() * config.methods.len());
    for (grid_idx, &snr_db) in config.snr_grid_db.iter().enumerate() {
        let sigma_v2 = solve_sigma_for_snr(&x, &h, snr_db)?;
        let noise_spec = NoiseSpec {
            family: config.noise_family,
            sigma_v2,
            seed: config.seed,
        };

        // Index-ordered collection keeps the later reduction bit-stable.
        let per_trial: Vec<Vec<T>> = (0..config.trials)
            .into_par_iter()
            .map(|trial| -> Result<Vec<T>> {
                let substream = ((grid_idx as u64) << 32) | trial as u64;
                let noise = generate_noise_substream(&noise_spec, n, substream)?;
                let v_spec = unitary_dft(&noise);
                let y_values: Vec<Complex<T>> = hx
                    .iter()
                    .zip(v_spec.bins())
                    .map(|(s, v)| s + v)
                    .collect();
                let y = Spectrum::from_raw(y_values);

                let sv_used = if config.noise_known {
                    sigma_v2
                } else {
                    let sigma_hat = estimate_sigma_v(&y)?;
                    sigma_hat * sigma_hat
                };
                let px_data = estimate_px(&y, sv_used)?;
                let problem = DeconvProblem::with_white_noise(y, h.clone(), sv_used)?;

                let mut mses = Vec::with_capacity(config.methods.len());
                for &method in &config.methods {
                    let x_hat = run_method(method, &problem, &x, px_data, px_true)?;
                    mses.push(empirical_mse(&x, &x_hat)?);
                }
                Ok(mses)
            })
            .collect::<Result<Vec<_>>>()?;

        let predicted = {
            let sv = vec![sigma_v2; n];
            predicted_mse_total(&x, &h, &sv, config.tau_db)?.total
        };

        for (m_idx, &method) in config.methods.iter().enumerate() {
            let trials_t = c::<T>(config.trials as f64);
            let mut mean = T::zero();
            for trial in &per_trial {
                mean += trial[m_idx];
            }
            mean /= trials_t;
            let stderr = if config.trials > 1 {
                let mut var = T::zero();
                for trial in &per_trial {
                    let d = trial[m_idx] - mean;
                    var += d * d;
                }
                var /= c::<T>((config.trials - 1) as f64);
                (var / trials_t).sqrt()
            } else {
                T::zero()
            };
            rows.push(BenchRow {
                snr_avg_db: snr_db,
                method,
                mse: mean,
                stderr,
                predicted_mse: (method == Method::Sw).then_some(predicted),
            });
        }
    }

    Ok(BenchResult { config: config.clone(), rows })
}
