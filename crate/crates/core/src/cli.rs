//! Command-line front end.

use std::fs::File;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::discretize::LambdaSign;
use crate::error::{Result, ZsError};
use crate::fcm::{self, DEFAULT_HALF_WIDTH};
use crate::nls::{self, EvolutionSetup, StructureCounter};
use crate::output::{self, ComparisonRow, Meta};
use crate::potentials::{PotentialSpec, PotentialTable};
use crate::spectrum::{self, ClassifierConfig, ConvergenceRecord};

/// Exit status for bad flags or inputs.
pub const EXIT_USAGE: i32 = 2;
/// Exit status for a numerical failure.
pub const EXIT_NUMERIC: i32 = 3;
/// Exit status for a file-system failure.
pub const EXIT_IO: i32 = 4;

pub fn exit_code(err: &ZsError) -> i32 {
    match err {
        ZsError::InvalidArgument(_) => EXIT_USAGE,
        ZsError::Io(_) => EXIT_IO,
        _ => EXIT_NUMERIC,
    }
}

#[derive(Debug, Parser)]
#[command(name = "zs", version, about = "Zakharov-Shabat spectra by mapped Chebyshev collocation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Full spectrum and classified discrete eigenvalues.
    Spectrum(SpectrumCmd),
    /// Eigenfunction at one discrete eigenvalue.
    Eigenfunction(EigenfunctionCmd),
    /// Error at a reference eigenvalue along (a, n) paths.
    Convergence(ConvergenceCmd),
    /// Chebyshev against Fourier collocation at matched sizes.
    CompareFcm(CompareCmd),
    /// Split-step evolution of the NLS equation.
    Evolve(EvolveCmd),
}

#[derive(Debug, Clone, Args)]
pub struct PotentialArgs {
    /// satsuma-yajima, semiclassical, solitonic, sech-phase, or file:PATH
    #[arg(long, default_value = "satsuma-yajima")]
    pub potential: String,
    /// Amplitude A of A sech(x).
    #[arg(long, default_value_t = 1.8)]
    pub amplitude: f64,
    /// Semiclassical parameter.
    #[arg(long, default_value_t = 0.1)]
    pub epsilon: f64,
    /// sech-phase: envelope width w in sech(w x).
    #[arg(long, default_value_t = 0.2)]
    pub width: f64,
    /// sech-phase: phase amplitude c.
    #[arg(long, default_value_t = 10.0)]
    pub phase_amplitude: f64,
    /// sech-phase: phase width v in c sech(v x).
    #[arg(long, default_value_t = 0.4)]
    pub phase_width: f64,
    /// Limit of a table potential at -inf, as RE,IM (default: first row).
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub limit_neg: Option<Complex64>,
    /// Limit of a table potential at +inf, as RE,IM (default: last row).
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub limit_pos: Option<Complex64>,
    /// Nonlinearity sign: 1 focusing, -1 defocusing.
    #[arg(long = "lambda", default_value_t = 1, allow_hyphen_values = true)]
    pub lambda: i32,
}

impl PotentialArgs {
    pub fn spec(&self) -> Result<PotentialSpec> {
        match self.potential.as_str() {
            "satsuma-yajima" => PotentialSpec::satsuma_yajima(self.amplitude),
            "semiclassical" => PotentialSpec::semiclassical(self.epsilon),
            "solitonic" => Ok(PotentialSpec::solitonic()),
            "sech-phase" => PotentialSpec::sech_phase(self.width, self.phase_amplitude, self.phase_width),
            other => match other.strip_prefix("file:") {
                Some(path) => self.table(Path::new(path)),
                None => Err(ZsError::invalid(format!("unknown potential '{other}'"))),
            },
        }
    }

    fn table(&self, path: &Path) -> Result<PotentialSpec> {
        let file = File::open(path).map_err(|e| {
            if e.kind() == io::ErrorKind::NotFound {
                ZsError::invalid(format!("potential table {} not found", path.display()))
            } else {
                ZsError::Io(e)
            }
        })?;
        let table = PotentialTable::parse(BufReader::new(file)).map_err(|e| match e {
            ZsError::InvalidArgument(msg) => ZsError::invalid(format!("{}: {msg}", path.display())),
            other => other,
        })?;
        let neg = self.limit_neg.unwrap_or(table.first_value());
        let pos = self.limit_pos.unwrap_or(table.last_value());
        Ok(PotentialSpec::tabulated(table, Some(neg), Some(pos)))
    }

    pub fn lambda_sign(&self) -> Result<LambdaSign> {
        LambdaSign::from_value(self.lambda)
    }

    fn steepness(&self, spec: &PotentialSpec, a: Option<f64>) -> Result<f64> {
        a.or(spec.default_steepness())
            .ok_or_else(|| ZsError::invalid("--a is required for custom potentials"))
    }
}

#[derive(Debug, Clone, Args)]
pub struct ClassifierArgs {
    #[arg(long, default_value_t = ClassifierConfig::default().tau_im)]
    pub tau_im: f64,
    #[arg(long, default_value_t = ClassifierConfig::default().delta_match)]
    pub delta_match: f64,
    #[arg(long, default_value_t = ClassifierConfig::default().merge_radius)]
    pub merge_radius: f64,
    #[arg(long, default_value_t = ClassifierConfig::default().max_residual)]
    pub max_residual: f64,
    /// Skip the second-resolution confirmation solve.
    #[arg(long)]
    pub no_confirm: bool,
}

impl ClassifierArgs {
    pub fn config(&self) -> Result<ClassifierConfig> {
        let c = ClassifierConfig {
            tau_im: self.tau_im,
            delta_match: self.delta_match,
            merge_radius: self.merge_radius,
            max_residual: self.max_residual,
            confirm: !self.no_confirm,
        };
        c.validate()?;
        Ok(c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output file; standard output when absent.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Omit the run metadata block from JSON output.
    #[arg(long)]
    pub no_meta: bool,
}

#[derive(Debug, Args)]
pub struct SpectrumCmd {
    #[command(flatten)]
    pub potential: PotentialArgs,
    #[arg(long, default_value_t = 200)]
    pub n: usize,
    /// Map steepness (default depends on the potential).
    #[arg(long)]
    pub a: Option<f64>,
    #[command(flatten)]
    pub classifier: ClassifierArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct EigenfunctionCmd {
    #[command(flatten)]
    pub potential: PotentialArgs,
    #[arg(long, default_value_t = 200)]
    pub n: usize,
    #[arg(long)]
    pub a: Option<f64>,
    /// Eigenvalue as RE,IM; snapped to the nearest computed one.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub k: Complex64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Route {
    #[value(name = "1")]
    One,
    #[value(name = "2")]
    Two,
    #[value(name = "3")]
    Three,
    All,
    /// Every (a, n) of the rectangle [0.1, 0.33] x [21, 251].
    Grid,
}

#[derive(Debug, Args)]
pub struct ConvergenceCmd {
    #[command(flatten)]
    pub potential: PotentialArgs,
    /// Reference eigenvalue as RE,IM (default: the topmost known one).
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub reference: Option<Complex64>,
    #[arg(long, value_enum, default_value_t = Route::All)]
    pub route: Route,
    /// Explicit path as a:n pairs, comma separated; overrides --route.
    #[arg(long)]
    pub path: Option<String>,
    /// Number of a values across the rectangle for --route grid.
    #[arg(long, default_value_t = 24)]
    pub a_steps: usize,
    #[command(flatten)]
    pub classifier: ClassifierArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct CompareCmd {
    #[command(flatten)]
    pub potential: PotentialArgs,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub reference: Option<Complex64>,
    /// Matched sizes (n = m); each must be even.
    #[arg(long, value_delimiter = ',', default_values_t = default_sizes())]
    pub sizes: Vec<usize>,
    #[arg(long)]
    pub a: Option<f64>,
    /// Fourier truncation half-width.
    #[arg(long, default_value_t = DEFAULT_HALF_WIDTH)]
    pub half_width: f64,
    #[command(flatten)]
    pub classifier: ClassifierArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

fn default_sizes() -> Vec<usize> {
    (16..=256).step_by(16).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FrameFormat {
    /// |q| per frame with an x header.
    Csv,
    /// Complex frames in the ZSEV binary layout.
    Bin,
}

#[derive(Debug, Args)]
pub struct EvolveCmd {
    #[command(flatten)]
    pub potential: PotentialArgs,
    #[arg(long, default_value_t = 20.0)]
    pub half_width: f64,
    #[arg(long, default_value_t = 512)]
    pub m: usize,
    #[arg(long, default_value_t = 6.0)]
    pub t_end: f64,
    #[arg(long, default_value_t = nls::DEFAULT_DT)]
    pub dt: f64,
    #[arg(long, default_value_t = nls::DEFAULT_STRIDE)]
    pub stride: usize,
    /// Peak threshold of the structure counter, relative to max |q|.
    #[arg(long, default_value_t = StructureCounter::default().threshold)]
    pub peak_threshold: f64,
    /// Minimum peak separation of the structure counter, in cells.
    #[arg(long, default_value_t = StructureCounter::default().min_separation)]
    pub peak_separation: usize,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FrameFormat::Csv)]
    pub format: FrameFormat,
}

/// `RE,IM`, or a single real number.
pub fn parse_complex(s: &str) -> std::result::Result<Complex64, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |p: &str| p.parse::<f64>().map_err(|_| format!("'{p}' is not a number"));
    let z = match parts.as_slice() {
        [re] => Complex64::new(num(re)?, 0.0),
        [re, im] => Complex64::new(num(re)?, num(im)?),
        _ => return Err(format!("expected RE,IM, got '{s}'")),
    };
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(format!("'{s}' is not finite"))
    }
}

fn parse_path(s: &str) -> Result<Vec<(f64, usize)>> {
    s.split(',')
        .map(|pair| {
            let (a, n) = pair
                .split_once(':')
                .ok_or_else(|| ZsError::invalid(format!("path entry '{pair}' is not a:n")))?;
            let a = a.trim().parse::<f64>().map_err(|_| ZsError::invalid(format!("bad a in '{pair}'")))?;
            let n = n.trim().parse::<usize>().map_err(|_| ZsError::invalid(format!("bad n in '{pair}'")))?;
            Ok((a, n))
        })
        .collect()
}

/// Outcome printed as the one-line summary.
#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub line: String,
}

struct Emitter<'a> {
    out: &'a OutputArgs,
    start: Instant,
}

impl Emitter<'_> {
    fn meta(&self) -> Option<Meta> {
        (!self.out.no_meta).then(|| Meta {
            elapsed_s: self.start.elapsed().as_secs_f64(),
        })
    }

    fn emit(&self, text: &str) -> Result<()> {
        emit_bytes(self.out.output.as_deref(), text.as_bytes())
    }
}

fn emit_bytes(path: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match path {
        Some(p) => output::write_atomic(p, bytes),
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(bytes)?;
            stdout.flush()?;
            Ok(())
        }
    }
}

/// Whether the summary line should go to stderr (data occupies stdout).
pub fn summary_to_stderr(cli: &Cli) -> bool {
    match &cli.command {
        Command::Spectrum(c) => c.out.output.is_none(),
        Command::Eigenfunction(c) => c.out.output.is_none(),
        Command::Convergence(c) => c.out.output.is_none(),
        Command::CompareFcm(c) => c.out.output.is_none(),
        Command::Evolve(c) => c.output.is_none(),
    }
}

pub fn run(cli: &Cli) -> Result<Summary> {
    let start = Instant::now();
    let line = match &cli.command {
        Command::Spectrum(c) => run_spectrum(c, start)?,
        Command::Eigenfunction(c) => run_eigenfunction(c, start)?,
        Command::Convergence(c) => run_convergence(c, start)?,
        Command::CompareFcm(c) => run_compare(c, start)?,
        Command::Evolve(c) => run_evolve(c, start)?,
    };
    Ok(Summary { line })
}

fn elapsed(start: Instant) -> String {
    format!("{:.2}s", start.elapsed().as_secs_f64())
}

fn run_spectrum(c: &SpectrumCmd, start: Instant) -> Result<String> {
    let spec = c.potential.spec()?;
    let sign = c.potential.lambda_sign()?;
    let a = c.potential.steepness(&spec, c.a)?;
    let config = c.classifier.config()?;
    let result = spectrum::compute_spectrum_with(&spec, c.n, a, sign, &config)?;
    let e = Emitter { out: &c.out, start };
    let text = match c.out.format {
        Format::Json => output::spectrum_json(&result, e.meta()),
        Format::Csv => output::spectrum_csv(&result),
    };
    e.emit(&text)?;
    Ok(format!(
        "discrete={} upper={} max_residual={:.3e} elapsed={}",
        result.discrete_k.len(),
        result.upper().len(),
        result.max_residual(),
        elapsed(start)
    ))
}

fn run_eigenfunction(c: &EigenfunctionCmd, start: Instant) -> Result<String> {
    let spec = c.potential.spec()?;
    let sign = c.potential.lambda_sign()?;
    let a = c.potential.steepness(&spec, c.a)?;
    let ef = spectrum::eigenfunction(&spec, c.n, a, sign, c.k)?;
    let e = Emitter { out: &c.out, start };
    let text = match c.out.format {
        Format::Json => output::eigenfunction_json(&ef, e.meta()),
        Format::Csv => output::eigenfunction_csv(&ef),
    };
    e.emit(&text)?;
    Ok(format!(
        "k={:.12}{:+.12}i residual={:.3e} elapsed={}",
        ef.k.re,
        ef.k.im,
        ef.residual,
        elapsed(start)
    ))
}

fn reference_for(spec: &PotentialSpec, given: Option<Complex64>) -> Result<Complex64> {
    given
        .or_else(|| spec.known_upper_eigenvalues().and_then(|v| v.first().copied()))
        .ok_or_else(|| ZsError::invalid("--reference is required for this potential"))
}

/// `steps` evenly spaced a values on `[0.1, 0.33]` crossed with n = 21..=251 step 10.
pub fn grid_path(steps: usize) -> Result<Vec<(f64, usize)>> {
    if steps < 2 {
        return Err(ZsError::invalid("--a-steps must be at least 2"));
    }
    let mut path = Vec::new();
    for i in 0..steps {
        let a = 0.1 + (0.33 - 0.1) * i as f64 / (steps - 1) as f64;
        for n in (21..=251).step_by(10) {
            path.push((a, n));
        }
    }
    Ok(path)
}

fn run_convergence(c: &ConvergenceCmd, start: Instant) -> Result<String> {
    let spec = c.potential.spec()?;
    let sign = c.potential.lambda_sign()?;
    let config = c.classifier.config()?;
    let reference = reference_for(&spec, c.reference)?;
    let [r1, r2, r3] = spectrum::default_routes();
    let paths: Vec<(String, Vec<(f64, usize)>)> = match (&c.path, c.route) {
        (Some(p), _) => vec![("path".into(), parse_path(p)?)],
        (None, Route::One) => vec![("1".into(), r1)],
        (None, Route::Two) => vec![("2".into(), r2)],
        (None, Route::Three) => vec![("3".into(), r3)],
        (None, Route::All) => vec![("1".into(), r1), ("2".into(), r2), ("3".into(), r3)],
        (None, Route::Grid) => vec![("grid".into(), grid_path(c.a_steps)?)],
    };
    for (_, path) in &paths {
        for &(a, n) in path {
            if n < spectrum::MIN_NODES {
                return Err(ZsError::invalid(format!("path point n={n} is below {}", spectrum::MIN_NODES)));
            }
            crate::mapping::DomainMap::new(a)?;
        }
    }
    let records = paths
        .into_iter()
        .map(|(name, path)| Ok((name, spectrum::convergence_study(&spec, &path, reference, sign, &config)?)))
        .collect::<Result<Vec<(String, ConvergenceRecord)>>>()?;
    let e = Emitter { out: &c.out, start };
    let text = match c.out.format {
        Format::Json => output::convergence_json(&records, e.meta()),
        Format::Csv => output::convergence_csv(&records),
    };
    e.emit(&text)?;
    let points: usize = records.iter().map(|(_, r)| r.points.len()).sum();
    let best = records
        .iter()
        .flat_map(|(_, r)| r.errors())
        .fold(f64::INFINITY, f64::min);
    Ok(format!("points={points} min_error={best:.3e} elapsed={}", elapsed(start)))
}

fn run_compare(c: &CompareCmd, start: Instant) -> Result<String> {
    let spec = c.potential.spec()?;
    let sign = c.potential.lambda_sign()?;
    let a = c.potential.steepness(&spec, c.a)?;
    let config = c.classifier.config()?;
    let reference = reference_for(&spec, c.reference)?;
    if c.sizes.is_empty() {
        return Err(ZsError::invalid("--sizes is empty"));
    }
    for &s in &c.sizes {
        if s < 8 || s % 2 != 0 {
            return Err(ZsError::invalid(format!("size {s} must be even and >= 8")));
        }
    }
    fcm::FourierGrid::new(c.half_width, 8)?;
    let rows = c
        .sizes
        .par_iter()
        .map(|&size| {
            let cheb = spectrum::compute_spectrum_with(&spec, size, a, sign, &config)?;
            let fourier = fcm::fcm_spectrum(&spec, c.half_width, size, sign)?;
            Ok(ComparisonRow {
                size,
                chebyshev_error: tracked_error(&cheb, reference),
                fcm_error: tracked_error(&fourier, reference),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let e = Emitter { out: &c.out, start };
    let text = match c.out.format {
        Format::Json => output::comparison_json(reference, a, c.half_width, &rows, e.meta()),
        Format::Csv => output::comparison_csv(&rows),
    };
    e.emit(&text)?;
    let wins = rows.iter().filter(|r| r.chebyshev_error <= r.fcm_error).count();
    Ok(format!(
        "sizes={} chebyshev_not_worse={} elapsed={}",
        rows.len(),
        wins,
        elapsed(start)
    ))
}

fn tracked_error(result: &spectrum::SpectrumResult, reference: Complex64) -> f64 {
    result.tracked_error(reference).map_or(f64::INFINITY, |(e, _)| e)
}

fn run_evolve(c: &EvolveCmd, start: Instant) -> Result<String> {
    let spec = c.potential.spec()?;
    if c.potential.lambda_sign()? != LambdaSign::Focusing {
        return Err(ZsError::invalid("evolve integrates the focusing equation only"));
    }
    if !(c.peak_threshold.is_finite() && c.peak_threshold > 0.0 && c.peak_threshold <= 1.0) {
        return Err(ZsError::invalid("--peak-threshold must lie in (0, 1]"));
    }
    let setup = EvolutionSetup {
        half_width: c.half_width,
        m: c.m,
        t_end: c.t_end,
        dt: c.dt,
        stride: c.stride,
        initial: spec,
    };
    setup.validate()?;
    let result = nls::evolve(&setup)?;
    let mut bytes = Vec::new();
    match c.format {
        FrameFormat::Csv => result.write_csv(&mut bytes)?,
        FrameFormat::Bin => result.write_binary(&mut bytes)?,
    }
    emit_bytes(c.output.as_deref(), &bytes)?;
    let counter = StructureCounter {
        threshold: c.peak_threshold,
        min_separation: c.peak_separation,
    };
    Ok(format!(
        "frames={} mass_drift={:.3e} structures={} elapsed={}",
        result.times.len(),
        result.mass_drift(),
        counter.count_field(&result.last_frame()),
        elapsed(start)
    ))
}
