//! Reference implementations for tests: direct O(N^2) transforms, adaptive
//! quadrature, and small statistics helpers.
//!
//! Everything here favors obviousness over speed so it can serve as an
//! independent oracle for the optimized library code. f64 only.

use num_complex::Complex64;
use std::f64::consts::TAU;

/// Unitary DFT by direct summation: bins[k] = (1/sqrt N) sum_n x[n] e^{-j 2pi nk/N}.
pub fn dft_direct(x: &[Complex64]) -> Vec<Complex64> {
    let n = x.len();
    let scale = 1.0 / (n as f64).sqrt();
    (0..n)
        .map(|k| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, &xj) in x.iter().enumerate() {
                let phase = -TAU * (j as f64) * (k as f64) / (n as f64);
                acc += xj * Complex64::new(phase.cos(), phase.sin());
            }
            acc * scale
        })
        .collect()
}

/// Inverse unitary DFT by direct summation.
pub fn idft_direct(bins: &[Complex64]) -> Vec<Complex64> {
    let n = bins.len();
    let scale = 1.0 / (n as f64).sqrt();
    (0..n)
        .map(|j| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, &bk) in bins.iter().enumerate() {
                let phase = TAU * (j as f64) * (k as f64) / (n as f64);
                acc += bk * Complex64::new(phase.cos(), phase.sin());
            }
            acc * scale
        })
        .collect()
}

/// Promotes a real sequence to complex samples.
pub fn to_complex(x: &[f64]) -> Vec<Complex64> {
    x.iter().map(|&v| Complex64::new(v, 0.0)).collect()
}

/// Circular convolution by the double sum: c[n] = sum_m a[m] b[(n-m) mod N].
pub fn convolve_direct(a: &[f64], b: &[f64]) -> Vec<f64> {
    let n = a.len();
    assert_eq!(n, b.len(), "oracle requires equal lengths");
    (0..n)
        .map(|i| {
            let mut acc = 0.0;
            for (m, &am) in a.iter().enumerate() {
                acc += am * b[(i + n - m) % n];
            }
            acc
        })
        .collect()
}

/// Adaptive Simpson quadrature of `f` over [a, b] to absolute tolerance `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(&f, a, b, fa, fm, fb, whole, tol, 48)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
}

/// Sample mean and standard error of the mean.
pub fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    assert!(xs.len() >= 2, "need at least two samples");
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Median by sorting a copy. NaN-free input assumed.
pub fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).expect("NaN in median input"));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}
