//! File formats and error-to-exit-code mapping for the command-line tool.
//!
//! Two CSV layouts are used throughout: spectra as `k,re,im` and time-domain
//! or per-bin real series as `n,value` / `k,value`. Numbers are written with
//! the shortest representation that round-trips, and every output file starts
//! with `#`-prefixed provenance lines (tool version plus the fully resolved
//! configuration). Readers skip those lines, sniff the header to tell the two
//! layouts apart, and report parse failures with the offending line number.

use std::fmt;
use std::path::{Path, PathBuf};

use num_complex::Complex;
use swdeconv::spectral::{Spectrum, TimeSignal};

/// Exit code for malformed input: bad flags, unreadable files, CSV errors.
pub const EXIT_INVALID_INPUT: i32 = 2;
/// Exit code for numerical failures on well-formed input.
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug)]
pub enum CliError {
    /// Bad command-line usage that clap's own validation cannot catch.
    Usage(String),
    /// File could not be read or written.
    Io { path: PathBuf, source: std::io::Error },
    /// CSV content error, with a 1-based line number.
    Parse { path: PathBuf, line: usize, reason: String },
    /// Error propagated from the estimation library.
    Core(swdeconv::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(reason) => write!(f, "{reason}"),
            CliError::Io { path, source } => write!(f, "{}: {source}", path.display()),
            CliError::Parse { path, line, reason } => {
                write!(f, "{} line {line}: {reason}", path.display())
            }
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<swdeconv::Error> for CliError {
    fn from(e: swdeconv::Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    /// Maps the failure to the documented process exit code: 2 for invalid
    /// input, 3 for numerical failures on valid input.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io { .. } | CliError::Parse { .. } => {
                EXIT_INVALID_INPUT
            }
            CliError::Core(e) => match e {
                swdeconv::Error::SingularFilter { .. }
                | swdeconv::Error::NoDecision { .. }
                | swdeconv::Error::DegenerateData { .. } => EXIT_NUMERICAL,
                _ => EXIT_INVALID_INPUT,
            },
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

const SPECTRUM_HEADER: &str = "k,re,im";
const TIME_HEADER: &str = "n,value";
const PSD_HEADER: &str = "k,value";

/// Formats the provenance lines every output file begins with.
pub fn provenance(config_line: &str, extra: &[String]) -> String {
    let mut out = format!("# swdeconv {}\n# config: {config_line}\n", env!("CARGO_PKG_VERSION"));
    for line in extra {
        out.push_str("# ");
        out.push_str(line);
        out.push('\n');
    }
    out
}

/// Renders a spectrum as `k,re,im` rows under the given provenance block.
pub fn spectrum_csv(header: &str, spectrum: &Spectrum<f64>) -> String {
    let mut out = String::from(header);
    out.push_str(SPECTRUM_HEADER);
    out.push('\n');
    for (k, z) in spectrum.bins().iter().enumerate() {
        out.push_str(&format!("{k},{},{}\n", z.re, z.im));
    }
    out
}

/// Renders a real series as `n,value` rows under the given provenance block.
pub fn time_csv(header: &str, samples: &[f64]) -> String {
    let mut out = String::from(header);
    out.push_str(TIME_HEADER);
    out.push('\n');
    for (n, v) in samples.iter().enumerate() {
        out.push_str(&format!("{n},{v}\n"));
    }
    out
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
        }
    }
    std::fs::write(path, contents)
        .map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn read_to_string(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

/// A parsed input that may be in either domain.
#[derive(Debug)]
pub enum LoadedSignal {
    Time(TimeSignal<f64>),
    Spectrum(Spectrum<f64>),
}

fn parse_err(path: &Path, line: usize, reason: impl Into<String>) -> CliError {
    CliError::Parse { path: path.to_path_buf(), line, reason: reason.into() }
}

fn parse_f64(path: &Path, line: usize, field: &str) -> Result<f64> {
    field
        .trim()
        .parse()
        .map_err(|_| parse_err(path, line, format!("cannot parse `{field}` as a number")))
}

fn parse_index(path: &Path, line: usize, field: &str, expected: usize) -> Result<()> {
    let got: usize = field
        .trim()
        .parse()
        .map_err(|_| parse_err(path, line, format!("cannot parse `{field}` as an index")))?;
    if got != expected {
        return Err(parse_err(path, line, format!("expected index {expected}, found {got}")));
    }
    Ok(())
}

/// Data lines of a CSV file with 1-based line numbers, provenance skipped.
/// The first yielded line is the column header.
fn data_lines(contents: &str) -> impl Iterator<Item = (usize, &str)> {
    contents
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.starts_with('#') && !l.trim().is_empty())
}

/// Reads a signal file, sniffing the layout from its column header.
pub fn read_signal_file(path: &Path) -> Result<LoadedSignal> {
    let contents = read_to_string(path)?;
    let mut lines = data_lines(&contents);
    let (line_no, header) = lines
        .next()
        .ok_or_else(|| parse_err(path, 1, "file contains no data"))?;
    match header.trim() {
        SPECTRUM_HEADER => {
            let mut bins = Vec::new();
            for (line_no, line) in lines {
                let mut fields = line.split(',');
                let (k, re, im) = match (fields.next(), fields.next(), fields.next(), fields.next())
                {
                    (Some(k), Some(re), Some(im), None) => (k, re, im),
                    _ => return Err(parse_err(path, line_no, "expected 3 fields: k,re,im")),
                };
                parse_index(path, line_no, k, bins.len())?;
                let re = parse_f64(path, line_no, re)?;
                let im = parse_f64(path, line_no, im)?;
                bins.push(Complex::new(re, im));
            }
            Ok(LoadedSignal::Spectrum(Spectrum::new(bins)?))
        }
        TIME_HEADER => {
            let mut samples = Vec::new();
            for (line_no, line) in lines {
                let mut fields = line.split(',');
                let (n, v) = match (fields.next(), fields.next(), fields.next()) {
                    (Some(n), Some(v), None) => (n, v),
                    _ => return Err(parse_err(path, line_no, "expected 2 fields: n,value")),
                };
                parse_index(path, line_no, n, samples.len())?;
                samples.push(parse_f64(path, line_no, v)?);
            }
            Ok(LoadedSignal::Time(TimeSignal::new(samples)?))
        }
        other => Err(parse_err(
            path,
            line_no,
            format!("unrecognized header `{other}` (expected `{SPECTRUM_HEADER}` or `{TIME_HEADER}`)"),
        )),
    }
}

/// Reads a per-bin noise power file (`k,value` rows).
pub fn read_psd_file(path: &Path) -> Result<Vec<f64>> {
    let contents = read_to_string(path)?;
    let mut lines = data_lines(&contents);
    let (line_no, header) = lines
        .next()
        .ok_or_else(|| parse_err(path, 1, "file contains no data"))?;
    if header.trim() != PSD_HEADER {
        return Err(parse_err(
            path,
            line_no,
            format!("unrecognized header `{header}` (expected `{PSD_HEADER}`)"),
        ));
    }
    let mut values = Vec::new();
    for (line_no, line) in lines {
        let mut fields = line.split(',');
        let (k, v) = match (fields.next(), fields.next(), fields.next()) {
            (Some(k), Some(v), None) => (k, v),
            _ => return Err(parse_err(path, line_no, "expected 2 fields: k,value")),
        };
        parse_index(path, line_no, k, values.len())?;
        values.push(parse_f64(path, line_no, v)?);
    }
    Ok(values)
}
