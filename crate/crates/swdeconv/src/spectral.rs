//! Unitary DFT transforms and circular convolution.
//!
//! Both transform directions carry the 1/sqrt(N) factor, so energy is
//! preserved exactly (Parseval) and the convolution theorem picks up a
//! sqrt(N): dft(a conv b) = sqrt(N) * dft(a) .* dft(b). Mixed normalization
//! conventions are the classic silent bug in frequency-domain code, so every
//! routine states its scaling and the tests pin it against direct summation.

use crate::error::{Error, Result};
use crate::scalar::{as_f64, c, Scalar};
use num_complex::Complex;
use rustfft::FftPlanner;

/// Relative imaginary residue above which a spectrum is rejected as not
/// describing a real signal.
pub const IMAG_RESIDUE_LIMIT: f64 = 1e-6;

/// Real-valued time-domain sample sequence of length >= 2.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSignal<T: Scalar> {
    samples: Vec<T>,
}

impl<T: Scalar> TimeSignal<T> {
    /// Wraps samples after checking length >= 2 and finiteness.
    pub fn new(samples: Vec<T>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::InvalidParameter {
                name: "samples",
                reason: format!("need at least 2 samples, got {}", samples.len()),
            });
        }
        for (i, s) in samples.iter().enumerate() {
            if !s.is_finite() {
                return Err(Error::NonFinite { what: "time signal", index: i });
            }
        }
        Ok(Self { samples })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[T] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<T> {
        self.samples
    }
}

/// Complex spectrum of length >= 2, indexed by DFT bin.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum<T: Scalar> {
    bins: Vec<Complex<T>>,
}

impl<T: Scalar> Spectrum<T> {
    /// Wraps bins after checking length >= 2 and finiteness.
    pub fn new(bins: Vec<Complex<T>>) -> Result<Self> {
        if bins.len() < 2 {
            return Err(Error::InvalidParameter {
                name: "bins",
                reason: format!("need at least 2 bins, got {}", bins.len()),
            });
        }
        for (i, b) in bins.iter().enumerate() {
            if !b.re.is_finite() || !b.im.is_finite() {
                return Err(Error::NonFinite { what: "spectrum", index: i });
            }
        }
        Ok(Self { bins })
    }

    pub(crate) fn from_raw(bins: Vec<Complex<T>>) -> Self {
        Self { bins }
    }

    pub fn len(&self) -> usize {
        self.bins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bins.is_empty()
    }

    pub fn bins(&self) -> &[Complex<T>] {
        &self.bins
    }

    pub fn into_bins(self) -> Vec<Complex<T>> {
        self.bins
    }

    /// Largest bin magnitude; zero for the all-zero spectrum.
    pub fn max_abs(&self) -> T {
        self.bins.iter().map(|b| b.norm()).fold(T::zero(), T::max)
    }
}

/// True for bins whose value is real for every real input signal:
/// bin 0 always, and bin N/2 when N is even.
pub fn is_real_bin(k: usize, n: usize) -> bool {
    k == 0 || (n % 2 == 0 && k == n / 2)
}

/// Angular frequency of bin k reduced to the principal interval (-pi, pi].
pub fn principal_frequency<T: Scalar>(k: usize, n: usize) -> T {
    let num = if 2 * k <= n { k as f64 } else { k as f64 - n as f64 };
    c(std::f64::consts::TAU * num / n as f64)
}

/// Unitary DFT: bins[k] = (1/sqrt N) sum_n x[n] e^{-j 2pi nk/N}.
pub fn unitary_dft<T: Scalar>(signal: &TimeSignal<T>) -> Spectrum<T> {
    let n = signal.len();
    let mut buf: Vec<Complex<T>> = signal
        .samples()
        .iter()
        .map(|&s| Complex::new(s, T::zero()))
        .collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let scale = T::from_usize(n).expect("length fits scalar").sqrt().recip();
    for b in &mut buf {
        *b = b.scale(scale);
    }
    Spectrum::from_raw(buf)
}

/// Inverse unitary DFT of a conjugate-symmetric spectrum.
#[derive(Debug, Clone)]
pub struct InverseDft<T: Scalar> {
    /// Real part of the reconstruction.
    pub signal: TimeSignal<T>,
    /// max |imag| / max |value| of the complex reconstruction; how far the
    /// input was from conjugate symmetry (0 for exactly symmetric input).
    pub imag_residue: T,
}

/// Inverse unitary DFT: x[n] = (1/sqrt N) sum_k bins[k] e^{+j 2pi nk/N}.
///
/// Returns the real part along with the relative imaginary residue; inputs
/// whose residue exceeds [`IMAG_RESIDUE_LIMIT`] are rejected because they do
/// not describe a real signal.
pub fn inverse_dft<T: Scalar>(spectrum: &Spectrum<T>) -> Result<InverseDft<T>> {
    let n = spectrum.len();
    let mut buf = spectrum.bins().to_vec();
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
    // rustfft's inverse is unnormalized; 1/sqrt(N) makes the pair unitary.
    let scale = T::from_usize(n).expect("length fits scalar").sqrt().recip();
    for b in &mut buf {
        *b = b.scale(scale);
    }

    let peak = buf.iter().map(|v| v.norm()).fold(T::zero(), T::max);
    let worst_imag = buf.iter().map(|v| v.im.abs()).fold(T::zero(), T::max);
    let residue = if peak > T::zero() { worst_imag / peak } else { T::zero() };
    if as_f64(residue) > IMAG_RESIDUE_LIMIT {
        return Err(Error::NotConjugateSymmetric { residue: as_f64(residue) });
    }

    let signal = TimeSignal::new(buf.into_iter().map(|v| v.re).collect())?;
    Ok(InverseDft { signal, imag_residue: residue })
}

/// Circular convolution of equal-length real signals:
/// out[i] = sum_m a[m] b[(i - m) mod N], computed through the FFT.
pub fn circular_convolve<T: Scalar>(
    a: &TimeSignal<T>,
    b: &TimeSignal<T>,
) -> Result<TimeSignal<T>> {
    let n = a.len();
    if b.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: b.len() });
    }
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(n);
    let mut fa: Vec<Complex<T>> =
        a.samples().iter().map(|&s| Complex::new(s, T::zero())).collect();
    let mut fb: Vec<Complex<T>> =
        b.samples().iter().map(|&s| Complex::new(s, T::zero())).collect();
    fft.process(&mut fa);
    fft.process(&mut fb);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x *= *y;
    }
    planner.plan_fft_inverse(n).process(&mut fa);
    // fft and ifft are both unnormalized here, so ifft(fft(a) fft(b)) = N conv.
    let scale = T::from_usize(n).expect("length fits scalar").recip();
    // Real inputs give a real product up to rounding; drop the imaginary dust.
    TimeSignal::new(fa.into_iter().map(|v| v.re * scale).collect())
}
