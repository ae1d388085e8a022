//! Acceptance gate: ten numbered end-to-end checks, each printing one
//! verdict line of the form `[acceptance] criterion N: PASS/FAIL - ...`.
//! Run `cargo test --test acceptance -- --nocapture` to see every line;
//! a failing criterion always surfaces its line in the panic output.
//!
//! Criterion 2 encodes the documented high-SNR excess-risk claim verbatim
//! and is expected to fail: the measured excess over the oracle floor is
//! twice the claimed value (see the regression test pinning the factor of
//! two in the library's oracle suite, and README.md "Known issues").

use std::fs;
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

use swdeconv::analysis::{
    predicted_mse_bin, rho, threshold_probability, varrho, BinContext, DEFAULT_TAU_DB,
};
use swdeconv::bench::{run_bench, BenchConfig, FilterSpec, Method, SignalKind, SignalSpec};
use swdeconv::estimators::{
    fixed_point_iterate, mmse_oracle_estimate, sw_estimate, FIXED_POINT_MAX_ITER,
    FIXED_POINT_TOL,
};
use swdeconv::noise::NoiseFamily;
use swdeconv::{DeconvProblem64, Spectrum64};

// ---------------------------------------------------------------------------
// Shared plumbing.
// ---------------------------------------------------------------------------

fn report(number: u32, name: &str, outcome: Result<String, String>) {
    match outcome {
        Ok(details) => println!("[acceptance] criterion {number} ({name}): PASS - {details}"),
        Err(details) => {
            println!("[acceptance] criterion {number} ({name}): FAIL - {details}");
            panic!("criterion {number} ({name}) failed: {details}");
        }
    }
}

fn db(ratio: f64) -> f64 {
    10.0 * ratio.log10()
}

fn normal(rng: &mut ChaCha12Rng) -> f64 {
    rng.sample(StandardNormal)
}

/// Circularly symmetric complex Gaussian with unit total variance.
fn cn_unit(rng: &mut ChaCha12Rng) -> Complex64 {
    let half = std::f64::consts::FRAC_1_SQRT_2;
    Complex64::new(half * normal(rng), half * normal(rng))
}

fn ones(n: usize) -> Spectrum64 {
    Spectrum64::new(vec![Complex64::new(1.0, 0.0); n]).unwrap()
}

fn mean_sq_err(x_true: Complex64, x_hat: &Spectrum64) -> f64 {
    let n = x_hat.len();
    x_hat.bins().iter().map(|b| (b - x_true).norm_sqr()).sum::<f64>() / n as f64
}

fn sw_config(kind: SignalKind, seed: u64, grid: &[f64], noise_known: bool) -> BenchConfig<f64> {
    BenchConfig {
        signal: SignalSpec::builtin(kind, 100),
        filter: FilterSpec { alpha: 0.25, n: 100 },
        noise_family: NoiseFamily::Gaussian,
        seed,
        snr_grid_db: grid.to_vec(),
        trials: 1000,
        methods: vec![Method::Sw],
        noise_known,
        tau_db: DEFAULT_TAU_DB,
    }
}

// ---------------------------------------------------------------------------
// Criteria.
// ---------------------------------------------------------------------------

/// With no signal present and unit effective noise, the empirical per-bin
/// MSE must land on the false-alarm constant rho, i.e. 13.3 dB below the
/// plain inverse filter's MSE of one.
#[test]
fn criterion_01_pure_noise_floor_matches_the_false_alarm_constant() {
    let start = Instant::now();
    let trials = 100_000;
    let mut rng = ChaCha12Rng::seed_from_u64(101);
    let y = Spectrum64::new((0..trials).map(|_| cn_unit(&mut rng)).collect()).unwrap();
    let problem = DeconvProblem64::with_white_noise(y, ones(trials), 1.0).unwrap();
    let ls_mse = mean_sq_err(Complex64::new(0.0, 0.0), problem.y());
    let sw_mse = mean_sq_err(
        Complex64::new(0.0, 0.0),
        &sw_estimate(&problem).unwrap().x_hat,
    );
    let floor = rho::<f64>();
    let dev_db = db(sw_mse / floor);
    let below_ls_db = db(ls_mse / sw_mse);
    let elapsed = start.elapsed();

    let details = format!(
        "per-bin mse {sw_mse:.5} vs rho {floor:.5} ({dev_db:+.3} dB), \
         {below_ls_db:.2} dB below inverse filtering, {trials} trials in {elapsed:.2?}"
    );
    let ok = dev_db.abs() <= 0.3
        && (below_ls_db - 13.3).abs() <= 0.5
        && elapsed < Duration::from_secs(10);
    report(1, "pure-noise floor", if ok { Ok(details) } else { Err(details) });
}

/// Documented high-SNR claim, taken at face value: the excess of the
/// thresholding estimator's MSE over the oracle floor should equal
/// sigma_eff^2 / SNR_out within 30%. The measured excess is twice that at
/// every tested SNR, so this criterion fails; the factor of two is pinned
/// by a dedicated regression test in the library's oracle suite.
#[test]
fn criterion_02_high_snr_excess_over_the_oracle_floor() {
    let start = Instant::now();
    let trials = 100_000;
    let mut rng = ChaCha12Rng::seed_from_u64(202);
    let mut ratios = Vec::new();
    for snr_db in [20.0f64, 30.0, 40.0] {
        let snr = 10f64.powf(snr_db / 10.0);
        let x = Complex64::new(snr.sqrt(), 0.0);
        let y = Spectrum64::new((0..trials).map(|_| x + cn_unit(&mut rng)).collect()).unwrap();
        let x_true = Spectrum64::new(vec![x; trials]).unwrap();
        let problem = DeconvProblem64::with_white_noise(y, ones(trials), 1.0).unwrap();
        // Common noise draws for both estimators keep the gap estimate tight.
        let sw_mse = mean_sq_err(x, &sw_estimate(&problem).unwrap().x_hat);
        let oracle_mse = mean_sq_err(x, &mmse_oracle_estimate(&x_true, &problem).unwrap());
        ratios.push((snr_db, (sw_mse - oracle_mse) * snr));
    }
    let elapsed = start.elapsed();

    let measured = ratios
        .iter()
        .map(|(s, r)| format!("{r:.3} at {s:.0} dB"))
        .collect::<Vec<_>>()
        .join(", ");
    let details = format!(
        "excess in units of sigma_eff^2/SNR: {measured} (claim: 1.0 within 30%), \
         {trials} trials per point in {elapsed:.2?}"
    );
    let ok = ratios.iter().all(|(_, r)| (r - 1.0).abs() <= 0.30)
        && elapsed < Duration::from_secs(30);
    report(2, "high-SNR excess", if ok { Ok(details) } else { Err(details) });
}

/// Above threshold the magnitude recursion must converge to the closed-form
/// shrinkage; below threshold it must blow past 1e12 while the closed form
/// returns an exact zero.
#[test]
fn criterion_03_fixed_point_agrees_with_the_closed_form() {
    let start = Instant::now();
    let mut rng = ChaCha12Rng::seed_from_u64(303);
    let tau = std::f64::consts::TAU;

    // Random bin with normalized magnitude z: |Y| = z sqrt(sv), random
    // phases, filter magnitude log-uniform in [10^-0.5, 10^0.5].
    let draw = |rng: &mut ChaCha12Rng, z: f64| {
        let sv = 10f64.powf(rng.gen::<f64>() * 2.0 - 1.0);
        let hmag = 10f64.powf(rng.gen::<f64>() - 0.5);
        let y = Complex64::from_polar(z * sv.sqrt(), rng.gen::<f64>() * tau);
        let h = Complex64::from_polar(hmag, rng.gen::<f64>() * tau);
        (y, h, sv)
    };

    let mut worst_rel = 0.0f64;
    for _ in 0..1000 {
        let z = 2.05 * (rng.gen::<f64>() * (40.0f64 / 2.05).ln()).exp();
        let (y, h, sv) = draw(&mut rng, z);
        let trace = fixed_point_iterate(y, h, sv, FIXED_POINT_MAX_ITER, FIXED_POINT_TOL).unwrap();
        if !trace.converged {
            report(3, "fixed-point equivalence", Err(format!("diverged at z = {z}")));
        }
        let gamma = trace.limit.unwrap();
        // The converged iterate is the reciprocal magnitude; map the closed
        // form into the same variable before comparing.
        let shrink = 0.5 * (1.0 + (1.0 - 4.0 / (z * z)).sqrt());
        let closed = h.norm() / (y.norm() * shrink);
        worst_rel = worst_rel.max((gamma - closed).abs() / closed.max(1.0));
    }

    let mut divergent = Vec::with_capacity(1000);
    let mut min_last = f64::INFINITY;
    for _ in 0..1000 {
        let z = 0.05 + rng.gen::<f64>() * 1.90;
        let (y, h, sv) = draw(&mut rng, z);
        let trace = fixed_point_iterate(y, h, sv, FIXED_POINT_MAX_ITER, FIXED_POINT_TOL).unwrap();
        if trace.converged {
            report(3, "fixed-point equivalence", Err(format!("converged at z = {z}")));
        }
        min_last = min_last.min(*trace.iterates.last().unwrap());
        divergent.push((y, h, sv));
    }
    let (ys, hs): (Vec<_>, Vec<_>) = divergent.iter().map(|(y, h, _)| (*y, *h)).unzip();
    let svs: Vec<f64> = divergent.iter().map(|(_, _, sv)| *sv).collect();
    let problem = DeconvProblem64::new(
        Spectrum64::new(ys).unwrap(),
        Spectrum64::new(hs).unwrap(),
        svs,
    )
    .unwrap();
    let all_zero = sw_estimate(&problem)
        .unwrap()
        .x_hat
        .bins()
        .iter()
        .all(|b| b.re == 0.0 && b.im == 0.0);
    let elapsed = start.elapsed();

    let details = format!(
        "1000 convergent bins within {worst_rel:.2e} of the closed form, \
         1000 divergent bins all passed {min_last:.1e} > 1e12 and estimate to zero, {elapsed:.2?}"
    );
    let ok = worst_rel <= 1e-10
        && min_last > 1e12
        && all_zero
        && elapsed < Duration::from_secs(5);
    report(3, "fixed-point equivalence", if ok { Ok(details) } else { Err(details) });
}

/// Per-bin MSE prediction against Monte-Carlo truth over two 20-point
/// sweeps (noise level at fixed signal, signal level at fixed noise): every
/// point within 1.5 dB, with the worst gaps inside the blend band.
#[test]
fn criterion_04_prediction_tracks_the_empirical_curve() {
    let start = Instant::now();
    let trials = 10_000;
    let mut rng = ChaCha12Rng::seed_from_u64(404);
    let grid: Vec<f64> = (0..20).map(|i| -20.0 + 40.0 * i as f64 / 19.0).collect();

    let mut worst = (0.0f64, 0.0f64, "");
    let mut worst_in_band = 0.0f64;
    let mut worst_out_band = 0.0f64;
    for &snr_db in &grid {
        let snr = 10f64.powf(snr_db / 10.0);
        for (label, x_abs, sigma2) in [
            ("noise sweep", 1.0, 1.0 / snr),
            ("signal sweep", snr.sqrt(), 1.0),
        ] {
            let x = Complex64::new(x_abs, 0.0);
            let s = sigma2.sqrt();
            let y = Spectrum64::new(
                (0..trials).map(|_| x + cn_unit(&mut rng).scale(s)).collect(),
            )
            .unwrap();
            let problem = DeconvProblem64::with_white_noise(y, ones(trials), sigma2).unwrap();
            let empirical = mean_sq_err(x, &sw_estimate(&problem).unwrap().x_hat);
            let ctx = BinContext::new(x_abs * x_abs, sigma2, false).unwrap();
            let predicted = predicted_mse_bin(&ctx, DEFAULT_TAU_DB).unwrap().mse;
            let gap = db(empirical / predicted).abs();
            if gap > worst.0 {
                worst = (gap, snr_db, label);
            }
            if snr_db.abs() <= DEFAULT_TAU_DB {
                worst_in_band = worst_in_band.max(gap);
            } else {
                worst_out_band = worst_out_band.max(gap);
            }
        }
    }
    let elapsed = start.elapsed();

    let details = format!(
        "worst |gap| {:.2} dB on the {} at {:+.1} dB output SNR; \
         blend band max {:.2} dB, outside {:.2} dB; {} trials per point in {:.2?}",
        worst.0, worst.2, worst.1, worst_in_band, worst_out_band, trials, elapsed
    );
    // Outside the blend band the fit must not be the worst spot unless the
    // whole curve is already tight.
    let ok = worst.0 <= 1.5
        && worst_out_band <= worst_in_band.max(1.0)
        && elapsed < Duration::from_secs(300);
    report(4, "prediction fidelity", if ok { Ok(details) } else { Err(details) });
}

/// Detection probability: pure-noise exceedance equals e^-4, and the SNR
/// bisected from the analytic curve to give p = 0.5 reproduces 0.5 under
/// Monte-Carlo, both within three standard errors at 1e6 draws.
#[test]
fn criterion_05_threshold_probability_matches_monte_carlo() {
    let draws = 1_000_000usize;
    let mut rng = ChaCha12Rng::seed_from_u64(505);

    let hits = (0..draws)
        .filter(|_| cn_unit(&mut rng).norm_sqr() > 4.0)
        .count();
    let p_hat = hits as f64 / draws as f64;
    let p0 = (-4.0f64).exp();
    let se0 = (p0 * (1.0 - p0) / draws as f64).sqrt();

    let (mut lo, mut hi) = (0.5f64, 50.0f64);
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if threshold_probability::<f64>(mid, false).unwrap() < 0.5 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let root = 0.5 * (lo + hi);
    let amp = Complex64::new(root.sqrt(), 0.0);
    let hits_at_root = (0..draws)
        .filter(|_| (amp + cn_unit(&mut rng)).norm_sqr() > 4.0)
        .count();
    let p_root = hits_at_root as f64 / draws as f64;
    let se_root = (0.25 / draws as f64).sqrt();

    let details = format!(
        "pure noise {p_hat:.5} vs e^-4 {p0:.5} ({:+.2} se); \
         p = 0.5 at output SNR {root:.4} ({:.2} dB), monte-carlo there {p_root:.4} ({:+.2} se)",
        (p_hat - p0) / se0,
        db(root),
        (p_root - 0.5) / se_root,
    );
    let ok = (p_hat - p0).abs() <= 3.0 * se0
        && root > 3.0
        && root < 4.0
        && (p_root - 0.5).abs() <= 3.0 * se_root;
    report(5, "threshold probability", if ok { Ok(details) } else { Err(details) });
}

/// Full-harness ordering on the band-limited and sparse test spectra: the
/// thresholding estimator must beat inverse filtering, oracle-regularized
/// inversion, and overshrinkage at every grid point from 5 dB up, by more
/// than three summed standard errors, with at least 5 dB peak gain over
/// plain inversion.
#[test]
fn criterion_06_benchmark_ordering() {
    let start = Instant::now();
    let grid = [0.0, 5.0, 10.0, 15.0, 20.0];
    let mut peak_gain = f64::NEG_INFINITY;
    let mut violations = Vec::new();
    for kind in [SignalKind::X1, SignalKind::X3] {
        let mut config = sw_config(kind, 606, &grid, true);
        config.methods = vec![Method::Sw, Method::Ls, Method::TikOracle, Method::Mw(2.0)];
        let result = run_bench(&config).unwrap();
        for &snr in &grid {
            let row = |name: &str| {
                result
                    .rows
                    .iter()
                    .find(|r| r.snr_avg_db == snr && r.method.to_string() == name)
                    .unwrap()
            };
            let sw = row("sw");
            let ls = row("ls");
            peak_gain = peak_gain.max(db(ls.mse / sw.mse));
            if snr < 5.0 {
                continue;
            }
            for name in ["ls", "tik_oracle", "mw(q=2)"] {
                let other = row(name);
                let margin = other.mse - sw.mse;
                let needed = 3.0 * (sw.stderr + other.stderr);
                if margin <= needed {
                    violations.push(format!(
                        "{kind} at {snr} dB vs {name}: margin {margin:.3e} <= {needed:.3e}"
                    ));
                }
            }
        }
    }
    let elapsed = start.elapsed();

    let details = if violations.is_empty() {
        format!(
            "lowest MSE at every point from 5 dB up on both spectra, \
             peak gain over inverse filtering {peak_gain:.1} dB, {elapsed:.2?}"
        )
    } else {
        format!("{}; peak gain {peak_gain:.1} dB, {elapsed:.2?}", violations.join("; "))
    };
    let ok = violations.is_empty() && peak_gain >= 5.0 && elapsed < Duration::from_secs(600);
    report(6, "benchmark ordering", if ok { Ok(details) } else { Err(details) });
}

/// The 1.5 dB prediction bound must survive non-Gaussian time-domain noise:
/// Laplace and uniform families, all three built-in spectra, length 100.
#[test]
fn criterion_07_prediction_holds_for_non_gaussian_noise() {
    let start = Instant::now();
    let grid = [-5.0, 0.0, 5.0, 10.0, 15.0, 20.0, 25.0];
    let mut worst = (0.0f64, String::new());
    for family in [NoiseFamily::Laplace, NoiseFamily::Uniform] {
        for kind in [SignalKind::X1, SignalKind::X2, SignalKind::X3] {
            let mut config = sw_config(kind, 707, &grid, true);
            config.noise_family = family;
            let result = run_bench(&config).unwrap();
            for r in &result.rows {
                let gap = db(r.mse / r.predicted_mse.unwrap()).abs();
                if gap > worst.0 {
                    worst = (gap, format!("{family} noise on {kind} at {} dB", r.snr_avg_db));
                }
            }
        }
    }
    let elapsed = start.elapsed();

    let details = format!(
        "worst |empirical - predicted| gap {:.2} dB ({}), {elapsed:.2?}",
        worst.0, worst.1
    );
    let ok = worst.0 <= 1.5;
    report(7, "non-Gaussian robustness", if ok { Ok(details) } else { Err(details) });
}

/// Replacing the true noise level with the robust spectral estimate must
/// cost at most 1.5 dB on the band-limited and sparse spectra, and at most
/// 7 dB anywhere on the smooth low-pass spectrum.
#[test]
fn criterion_08_estimated_noise_tracks_the_known_noise_run() {
    let start = Instant::now();
    let grid = [0.0, 5.0, 10.0, 15.0, 20.0];
    let mut worst_tight = (0.0f64, String::new());
    let mut worst_smooth = f64::NEG_INFINITY;
    for kind in [SignalKind::X1, SignalKind::X2, SignalKind::X3] {
        let known = run_bench(&sw_config(kind, 808, &grid, true)).unwrap();
        let unknown = run_bench(&sw_config(kind, 808, &grid, false)).unwrap();
        for (k, u) in known.rows.iter().zip(&unknown.rows) {
            let delta = db(u.mse / k.mse);
            if kind == SignalKind::X2 {
                worst_smooth = worst_smooth.max(delta);
            } else if delta.abs() > worst_tight.0 {
                worst_tight = (delta.abs(), format!("{kind} at {} dB", k.snr_avg_db));
            }
        }
    }
    let elapsed = start.elapsed();

    let details = format!(
        "band-limited/sparse worst shift {:.2} dB ({}); \
         smooth spectrum worst degradation {worst_smooth:.2} dB, {elapsed:.2?}",
        worst_tight.0, worst_tight.1
    );
    let ok = worst_tight.0 <= 1.5 && worst_smooth <= 7.0;
    report(8, "estimated-noise path", if ok { Ok(details) } else { Err(details) });
}

/// The two false-alarm constants against their published digits and
/// against direct quadrature of their defining integrals.
#[test]
fn criterion_09_false_alarm_constants() {
    let r = rho::<f64>();
    let vr = varrho::<f64>();
    let quad_r = testkit::integrate(
        |w| 0.5 * (w - 2.0 + (w * w - 4.0 * w).sqrt()) * (-w).exp(),
        4.0,
        60.0,
        1e-12,
    );
    let pdf = |v: f64| (-0.5 * v * v).exp() / (2.0 * std::f64::consts::PI).sqrt();
    // Both tails of |v| > 2 contribute equally; doubling cancels the half
    // in the squared estimator output, leaving a single one-sided integral.
    let quad_vr = testkit::integrate(
        |v| (v * v - 2.0 + (v.powi(4) - 4.0 * v * v).sqrt()) * pdf(v),
        2.0,
        14.0,
        1e-12,
    );

    let details = format!(
        "rho {r:.6} (quadrature gap {:.1e}), varrho {vr:.6} (quadrature gap {:.1e})",
        (r - quad_r).abs(),
        (vr - quad_vr).abs(),
    );
    let ok = (r - 0.0464).abs() <= 5e-4
        && (vr - 0.1529).abs() <= 5e-4
        && (r - quad_r).abs() <= 1e-6
        && (vr - quad_vr).abs() <= 1e-6;
    report(9, "false-alarm constants", if ok { Ok(details) } else { Err(details) });
}

/// Same seed, same bytes: the benchmark command across different thread
/// counts, and the estimate command across repeated runs.
#[test]
fn criterion_10_reruns_are_byte_identical() {
    let dir = std::env::temp_dir().join(format!("swdeconv-acceptance-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    let path = |name: &str| dir.join(name);
    let run = |args: &[&str], threads: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_swdeconv"))
            .args(args)
            .env("RAYON_NUM_THREADS", threads)
            .output()
            .unwrap();
        assert!(
            out.status.success(),
            "command {args:?} failed: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    };
    let bytes = |p: &PathBuf| fs::read(p).unwrap();

    for (tag, threads) in [("a", "4"), ("b", "1")] {
        run(
            &[
                "bench",
                "--signal",
                "x3",
                "--n",
                "80",
                "--alpha",
                "0.25",
                "--seed",
                "424",
                "--snr-grid",
                "0,10,20",
                "--trials",
                "64",
                "--methods",
                "sw,ls",
                "--out-csv",
                path(&format!("bench_{tag}.csv")).to_str().unwrap(),
                "--out-json",
                path(&format!("bench_{tag}.json")).to_str().unwrap(),
            ],
            threads,
        );
    }
    let bench_csv_ok = bytes(&path("bench_a.csv")) == bytes(&path("bench_b.csv"));
    let bench_json_ok = bytes(&path("bench_a.json")) == bytes(&path("bench_b.json"));

    let mut y_csv = String::from("n,value\n");
    let mut h_csv = String::from("n,value\n");
    for t in 0..32 {
        let tf = t as f64;
        y_csv.push_str(&format!("{t},{}\n", (0.3 * tf).sin() + 0.1 * (2.2 * tf).cos()));
        h_csv.push_str(&format!("{t},{}\n", 0.5f64.powi(t)));
    }
    fs::write(path("y.csv"), &y_csv).unwrap();
    fs::write(path("h.csv"), &h_csv).unwrap();
    for tag in ["a", "b"] {
        run(
            &[
                "estimate",
                "--y",
                path("y.csv").to_str().unwrap(),
                "--h",
                path("h.csv").to_str().unwrap(),
                "--noise",
                "auto",
                "--out-dir",
                path(&format!("est_{tag}")).to_str().unwrap(),
            ],
            "4",
        );
    }
    let estimate_ok = ["xhat_spectrum.csv", "xhat_time.csv", "diagnostics.csv"]
        .iter()
        .all(|f| bytes(&path(&format!("est_a/{f}"))) == bytes(&path(&format!("est_b/{f}"))));

    let details = format!(
        "bench csv identical across 4 vs 1 threads: {bench_csv_ok}, json: {bench_json_ok}; \
         estimate outputs identical across reruns: {estimate_ok}"
    );
    let ok = bench_csv_ok && bench_json_ok && estimate_ok;
    report(10, "byte-identical reruns", if ok { Ok(details) } else { Err(details) });
}
