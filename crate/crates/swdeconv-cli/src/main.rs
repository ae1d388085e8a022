//! Command-line front end: estimation, prediction, signal generation, and
//! benchmarking over stable CSV/JSON file formats.

mod io;

use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand};
use swdeconv::analysis::{predicted_mse_total, DEFAULT_TAU_DB};
use swdeconv::bench::{
    make_filter, make_signal, run_bench, BenchConfig, FilterSpec, Method, SignalKind, SignalSpec,
    DEFAULT_DELTA,
};
use swdeconv::estimators::{sw_estimate, DeconvProblem};
use swdeconv::noise::{estimate_sigma_v, NoiseFamily};
use swdeconv::spectral::{inverse_dft, unitary_dft, Spectrum};

use io::{CliError, LoadedSignal, Result};

#[derive(Parser)]
#[command(name = "swdeconv", version, about = "Robust frequency-domain deconvolution toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Deconvolve an observation with the blind thresholding estimator.
    Estimate(EstimateArgs),
    /// Compute the analytical per-bin MSE prediction for a known problem.
    Predict(PredictArgs),
    /// Write a built-in test signal or filter to CSV files.
    Gen(GenArgs),
    /// Run the Monte-Carlo benchmark sweep.
    Bench(BenchArgs),
}

#[derive(Args)]
#[command(group(ArgGroup::new("noise_source").required(true).args(["sv", "sv_file", "noise"])))]
struct EstimateArgs {
    /// Observed signal: time-domain CSV (n,value) or spectrum CSV (k,re,im).
    #[arg(long)]
    y: PathBuf,
    /// Filter: impulse-response CSV (n,value) or frequency-response CSV (k,re,im).
    #[arg(long)]
    h: PathBuf,
    /// White noise power per frequency bin.
    #[arg(long)]
    sv: Option<f64>,
    /// Per-bin noise power CSV (k,value).
    #[arg(long)]
    sv_file: Option<PathBuf>,
    /// `auto`: estimate the noise level from the observation itself.
    #[arg(long)]
    noise: Option<String>,
    /// Directory for the spectrum, time-domain, and diagnostics outputs.
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args)]
#[command(group(ArgGroup::new("noise_source").required(true).args(["sv", "sv_file"])))]
struct PredictArgs {
    /// True signal: time-domain CSV (n,value) or spectrum CSV (k,re,im).
    #[arg(long)]
    x: PathBuf,
    /// Filter: impulse-response CSV (n,value) or frequency-response CSV (k,re,im).
    #[arg(long)]
    h: PathBuf,
    /// White noise power per frequency bin.
    #[arg(long)]
    sv: Option<f64>,
    /// Per-bin noise power CSV (k,value).
    #[arg(long)]
    sv_file: Option<PathBuf>,
    /// Half-width in dB of the regime interpolation band.
    #[arg(long, default_value_t = DEFAULT_TAU_DB)]
    tau_db: f64,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
#[command(group(ArgGroup::new("target").required(true).args(["signal", "filter"])))]
struct GenArgs {
    /// Built-in signal to generate: x1, x2, or x3.
    #[arg(long)]
    signal: Option<String>,
    /// Generate the one-pole filter instead of a signal.
    #[arg(long)]
    filter: bool,
    /// Number of bins.
    #[arg(long, default_value_t = 100)]
    n: usize,
    /// Width parameter for the built-in signals.
    #[arg(long, default_value_t = DEFAULT_DELTA)]
    delta: f64,
    /// Filter pole; |alpha| < 1.
    #[arg(long, default_value_t = 0.25)]
    alpha: f64,
    /// Directory for the spectrum and time-domain outputs.
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    /// Built-in signal: x1, x2, or x3.
    #[arg(long, default_value = "x1")]
    signal: String,
    /// Number of bins.
    #[arg(long, default_value_t = 100)]
    n: usize,
    /// Width parameter for the built-in signals.
    #[arg(long, default_value_t = DEFAULT_DELTA)]
    delta: f64,
    /// Filter pole; |alpha| < 1.
    #[arg(long, default_value_t = 0.25)]
    alpha: f64,
    /// Time-domain noise family: gaussian, laplace, or uniform.
    #[arg(long, default_value = "gaussian")]
    noise: String,
    /// Base RNG seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Comma-separated target average output SNRs in dB.
    #[arg(long, value_delimiter = ',', default_value = "0,5,10,15,20")]
    snr_grid: Vec<f64>,
    /// Monte-Carlo trials per grid point.
    #[arg(long, default_value_t = 100)]
    trials: usize,
    /// Comma-separated methods: sw, ls, tik, tik_oracle, mw, mw(<q>), mmse_oracle.
    #[arg(long, value_delimiter = ',', default_value = "sw,ls")]
    methods: Vec<String>,
    /// Replace the true noise power with a per-trial robust estimate.
    #[arg(long)]
    estimate_noise: bool,
    /// Half-width in dB of the regime interpolation band.
    #[arg(long, default_value_t = DEFAULT_TAU_DB)]
    tau_db: f64,
    /// CSV output path.
    #[arg(long)]
    out_csv: Option<PathBuf>,
    /// JSON output path.
    #[arg(long)]
    out_json: Option<PathBuf>,
}

fn main() {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Estimate(args) => cmd_estimate(args),
        Command::Predict(args) => cmd_predict(args),
        Command::Gen(args) => cmd_gen(args),
        Command::Bench(args) => cmd_bench(args),
    };
    if let Err(e) = outcome {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}

/// Loads a signal file as a spectrum, transforming time-domain input.
fn load_as_spectrum(path: &std::path::Path) -> Result<Spectrum<f64>> {
    match io::read_signal_file(path)? {
        LoadedSignal::Spectrum(s) => Ok(s),
        LoadedSignal::Time(t) => Ok(unitary_dft(&t)),
    }
}

/// Loads a filter file as a frequency response. Time-domain input is an
/// impulse response, whose frequency response carries an extra sqrt(N)
/// relative to the unitary transform.
fn load_filter_response(path: &std::path::Path) -> Result<Spectrum<f64>> {
    match io::read_signal_file(path)? {
        LoadedSignal::Spectrum(s) => Ok(s),
        LoadedSignal::Time(t) => {
            let root_n = (t.len() as f64).sqrt();
            let bins = unitary_dft(&t).bins().iter().map(|z| z * root_n).collect();
            Ok(Spectrum::new(bins)?)
        }
    }
}

/// Resolves the three noise flags into a per-bin power vector, a config
/// descriptor, and any extra provenance lines.
fn resolve_noise(
    sv: Option<f64>,
    sv_file: Option<&PathBuf>,
    noise: Option<&str>,
    y: &Spectrum<f64>,
) -> Result<(Vec<f64>, String, Vec<String>)> {
    if let Some(sv) = sv {
        return Ok((vec![sv; y.len()], format!("sv={sv}"), Vec::new()));
    }
    if let Some(path) = sv_file {
        let values = io::read_psd_file(path)?;
        return Ok((values, format!("sv_file={}", path.display()), Vec::new()));
    }
    match noise {
        Some("auto") => {
            let sigma_hat = estimate_sigma_v(y)?;
            let extra = vec![format!("sigma_v_hat = {sigma_hat}")];
            Ok((vec![sigma_hat * sigma_hat; y.len()], "noise=auto".to_string(), extra))
        }
        Some(other) => Err(CliError::Usage(format!(
            "--noise only accepts `auto`, got `{other}`; use --sv or --sv-file for known levels"
        ))),
        None => unreachable!("clap enforces exactly one noise source"),
    }
}

fn cmd_estimate(args: EstimateArgs) -> Result<()> {
    let y = load_as_spectrum(&args.y)?;
    let h = load_filter_response(&args.h)?;
    let (sv, noise_desc, extra) =
        resolve_noise(args.sv, args.sv_file.as_ref(), args.noise.as_deref(), &y)?;

    let config_line = format!(
        "estimate y={} h={} {noise_desc}",
        args.y.display(),
        args.h.display()
    );
    let header = io::provenance(&config_line, &extra);

    let problem = DeconvProblem::new(y, h, sv)?;
    let result = sw_estimate(&problem)?;
    let reconstruction = inverse_dft(&result.x_hat)?;

    let mut time_header = extra.clone();
    time_header.push(format!("imag_residue = {}", reconstruction.imag_residue));

    let mut diag = io::provenance(&config_line, &extra);
    diag.push_str("k,z_abs,above_threshold,shrinkage,snr_out_hat\n");
    for (k, d) in result.diagnostics.iter().enumerate() {
        diag.push_str(&format!(
            "{k},{},{},{},{}\n",
            d.z_abs, d.above_threshold, d.shrinkage, d.snr_out_hat
        ));
    }

    io::write_file(
        &args.out_dir.join("xhat_spectrum.csv"),
        &io::spectrum_csv(&header, &result.x_hat),
    )?;
    io::write_file(
        &args.out_dir.join("xhat_time.csv"),
        &io::time_csv(
            &io::provenance(&config_line, &time_header),
            reconstruction.signal.samples(),
        ),
    )?;
    io::write_file(&args.out_dir.join("diagnostics.csv"), &diag)?;

    let kept = result.diagnostics.iter().filter(|d| d.above_threshold).count();
    println!(
        "estimated {} bins ({kept} above threshold); wrote {}",
        result.x_hat.len(),
        args.out_dir.display()
    );
    Ok(())
}

fn db10(x: f64) -> f64 {
    10.0 * x.log10()
}

fn cmd_predict(args: PredictArgs) -> Result<()> {
    let x = load_as_spectrum(&args.x)?;
    let h = load_filter_response(&args.h)?;
    let (sv, noise_desc, _) = resolve_noise(args.sv, args.sv_file.as_ref(), None, &x)?;

    let prediction = predicted_mse_total(&x, &h, &sv, args.tau_db)?;

    let config_line = format!(
        "predict x={} h={} {noise_desc} tau_db={}",
        args.x.display(),
        args.h.display(),
        args.tau_db
    );
    let mut out = io::provenance(&config_line, &[]);
    out.push_str("k,snr_out_db,regime,p,eps_low2,eps_high2,mse\n");
    for (k, bin) in prediction.bins.iter().enumerate() {
        let snr_out = (x.bins()[k] * h.bins()[k]).norm_sqr() / sv[k];
        out.push_str(&format!(
            "{k},{},{},{},{},{},{}\n",
            db10(snr_out),
            bin.regime,
            bin.p,
            bin.eps_low2,
            bin.eps_high2,
            bin.mse
        ));
    }
    out.push_str(&format!("total,,,,,,{}\n", prediction.total));
    io::write_file(&args.out, &out)?;

    println!("predicted total MSE {} ({} dB); wrote {}", prediction.total,
        db10(prediction.total), args.out.display());
    Ok(())
}

fn cmd_gen(args: GenArgs) -> Result<()> {
    if let Some(kind_str) = args.signal.as_deref() {
        let kind: SignalKind = kind_str.parse()?;
        if kind == SignalKind::Custom {
            return Err(CliError::Usage(
                "gen only produces the built-in signals x1, x2, x3".to_string(),
            ));
        }
        let spec = SignalSpec { kind, n: args.n, delta: args.delta, custom: None };
        let x = make_signal(&spec)?;
        let reconstruction = inverse_dft(&x)?;
        let config_line =
            format!("gen signal={kind} n={} delta={}", args.n, args.delta);
        let header = io::provenance(&config_line, &[]);
        let base = args.out_dir.join(format!("{kind}_spectrum.csv"));
        io::write_file(&base, &io::spectrum_csv(&header, &x))?;
        io::write_file(
            &args.out_dir.join(format!("{kind}_time.csv")),
            &io::time_csv(&header, reconstruction.signal.samples()),
        )?;
        println!("wrote {} and its time-domain counterpart", base.display());
    } else {
        let h = make_filter(&FilterSpec { alpha: args.alpha, n: args.n })?;
        // The frequency response carries sqrt(N) relative to the unitary
        // transform, so the impulse response is the inverse DFT over sqrt(N).
        let reconstruction = inverse_dft(&h)?;
        let root_n = (args.n as f64).sqrt();
        let impulse: Vec<f64> =
            reconstruction.signal.samples().iter().map(|s| s / root_n).collect();
        let config_line = format!("gen filter alpha={} n={}", args.alpha, args.n);
        let header = io::provenance(&config_line, &[]);
        let base = args.out_dir.join("filter_spectrum.csv");
        io::write_file(&base, &io::spectrum_csv(&header, &h))?;
        io::write_file(
            &args.out_dir.join("filter_time.csv"),
            &io::time_csv(&header, &impulse),
        )?;
        println!("wrote {} and its impulse response", base.display());
    }
    Ok(())
}

fn cmd_bench(args: BenchArgs) -> Result<()> {
    let kind: SignalKind = args.signal.parse()?;
    if kind == SignalKind::Custom {
        return Err(CliError::Usage(
            "bench runs on the built-in signals x1, x2, x3".to_string(),
        ));
    }
    let family: NoiseFamily = args.noise.parse()?;
    let methods = args
        .methods
        .iter()
        .map(|m| m.parse::<Method<f64>>())
        .collect::<swdeconv::Result<Vec<_>>>()?;

    let config = BenchConfig {
        signal: SignalSpec { kind, n: args.n, delta: args.delta, custom: None },
        filter: FilterSpec { alpha: args.alpha, n: args.n },
        noise_family: family,
        seed: args.seed,
        snr_grid_db: args.snr_grid.clone(),
        trials: args.trials,
        methods,
        noise_known: !args.estimate_noise,
        tau_db: args.tau_db,
    };
    let result = run_bench(&config)?;

    println!(
        "{:>10}  {:<14} {:>12}  {:>12}  {:>12}",
        "snr_db", "method", "mse_db", "stderr", "predicted_db"
    );
    for row in &result.rows {
        let predicted = row
            .predicted_mse
            .map(|p| format!("{:>12.3}", db10(p)))
            .unwrap_or_else(|| format!("{:>12}", "-"));
        println!(
            "{:>10}  {:<14} {:>12.3}  {:>12.3e}  {predicted}",
            row.snr_avg_db,
            row.method.to_string(),
            db10(row.mse),
            row.stderr
        );
    }

    let config_line = format!(
        "bench signal={kind} n={} delta={} alpha={} noise={family} seed={} trials={} \
         snr_grid={} methods={} noise_known={} tau_db={}",
        args.n,
        args.delta,
        args.alpha,
        args.seed,
        args.trials,
        args.snr_grid.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(","),
        config.methods.iter().map(|m| m.to_string()).collect::<Vec<_>>().join(","),
        config.noise_known,
        args.tau_db
    );
    if let Some(path) = &args.out_csv {
        let mut out = io::provenance(&config_line, &[]);
        out.push_str(&result.to_csv());
        io::write_file(path, &out)?;
        println!("wrote {}", path.display());
    }
    if let Some(path) = &args.out_json {
        io::write_file(path, &result.to_json())?;
        println!("wrote {}", path.display());
    }
    Ok(())
}
