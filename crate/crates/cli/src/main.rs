use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use cone_runge::approx::{runge_experiment, SamplerConfig};
use cone_runge::clifford::PRODUCT_TABLE;
use cone_runge::runge::{analyze_domain_grid, analyze_grids};
use cone_runge::selftest::{basis_index, run_selftest};
use cone_runge::stem::{RationalSliceFunction, SliceFunction, SlicePolynomial};
use cone_runge::topology::{rasterize_on, DomainSpec, GridFrame};
use cone_runge::Error;

const EXIT_SELFTEST: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_NOT_NESTED: u8 = 3;
const EXIT_PARITY: u8 = 4;

#[derive(Parser)]
#[command(
    name = "cone-runge",
    version,
    about = "Slice analysis on the quadratic cone of Cl(0,3): Runge pairs, Betti numbers and approximation experiments"
)]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct GlobalOpts {
    /// Seed for all sampling.
    #[arg(long, global = true, env = "CONE_RUNGE_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Override the resolution (cells per unit) of every domain spec.
    #[arg(long, global = true)]
    resolution: Option<f64>,
    /// Write PGM previews of the rasterised domains into this directory.
    #[arg(long, global = true, value_name = "DIR")]
    emit_pgm: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Run the algebra and cone identity suites.
    Selftest {
        /// Number of random samples.
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        /// Flip the sign of one product-table entry, e.g. `e1,e2`.
        #[arg(long, hide = true, value_name = "A,B")]
        corrupt_table: Option<String>,
    },
    /// Topology and Betti numbers of one domain.
    Analyze { domain: PathBuf },
    /// Runge-pair report for D ⊆ D1.
    Pair { d: PathBuf, d1: PathBuf },
    /// Approximation experiment for a pair and a function.
    Approx {
        /// JSON object `{"D": spec, "D1": spec}`.
        pair: PathBuf,
        /// JSON function definition.
        function: PathBuf,
        /// Degrees, e.g. `0..40` or `0,5,10`.
        #[arg(long, default_value = "0..40")]
        degrees: String,
        /// Minimum number of plane samples.
        #[arg(long, default_value_t = 400)]
        samples: usize,
        /// Number of sampled imaginary units.
        #[arg(long, default_value_t = 16)]
        units: usize,
        /// Also write the error curve as CSV.
        #[arg(long, value_name = "FILE")]
        csv: Option<PathBuf>,
    },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PairSpec {
    #[serde(rename = "D")]
    d: DomainSpec,
    #[serde(rename = "D1")]
    d1: DomainSpec,
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum FunctionSpec {
    Polynomial(SlicePolynomial),
    Rational(RationalSliceFunction),
}

#[derive(Serialize)]
struct ErrorReport {
    error: String,
    message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    file: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pointer: Option<String>,
}

struct Failure {
    code: u8,
    report: ErrorReport,
}

impl Failure {
    fn input(kind: &str, message: String, file: Option<&Path>, pointer: Option<String>) -> Self {
        Failure {
            code: EXIT_INPUT,
            report: ErrorReport {
                error: kind.into(),
                message,
                file: file.map(|p| p.display().to_string()),
                pointer,
            },
        }
    }

    fn from_core(e: Error, file: Option<&Path>, prefix: &str) -> Self {
        let (code, kind, pointer) = match &e {
            Error::NotNested { .. } => (EXIT_NOT_NESTED, "not_nested", None),
            Error::ParityViolation { .. } => (EXIT_PARITY, "parity_violation", None),
            Error::InvalidSpec { pointer, .. } => (
                EXIT_INPUT,
                "invalid_spec",
                Some(format!("{prefix}{pointer}")),
            ),
            Error::FeatureTooThin { index, .. } => (
                EXIT_INPUT,
                "feature_too_thin",
                Some(format!("{prefix}/shapes/{index}")),
            ),
            Error::ResolutionTooLow { .. } => (
                EXIT_INPUT,
                "resolution_too_low",
                Some(format!("{prefix}/resolution")),
            ),
            Error::EmptyWindow => (EXIT_INPUT, "empty_window", Some(format!("{prefix}/window"))),
            _ => (EXIT_INPUT, "invalid_input", None),
        };
        Failure {
            code,
            report: ErrorReport {
                error: kind.into(),
                message: e.to_string(),
                file: file.map(|p| p.display().to_string()),
                pointer,
            },
        }
    }
}

type CliResult<T> = Result<T, Failure>;

fn json_pointer(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for seg in path.iter() {
        match seg {
            Segment::Seq { index } => out.push_str(&format!("/{index}")),
            Segment::Map { key } => {
                out.push_str(&format!("/{}", key.replace('~', "~0").replace('/', "~1")))
            }
            Segment::Enum { variant } => out.push_str(&format!("/{variant}")),
            Segment::Unknown => {}
        }
    }
    out
}

fn load<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path).map_err(|e| {
        Failure::input(
            "io",
            format!("cannot read {}: {e}", path.display()),
            Some(path),
            None,
        )
    })?;
    let mut de = serde_json::Deserializer::from_str(&text);
    serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let pointer = json_pointer(e.path());
        Failure::input("schema", e.inner().to_string(), Some(path), Some(pointer))
    })
}

fn apply_resolution(spec: &mut DomainSpec, g: &GlobalOpts) {
    if let Some(r) = g.resolution {
        spec.resolution = r;
    }
}

fn emit(value: &impl Serialize, text: impl FnOnce() -> String, format: Format) {
    let out = match format {
        Format::Json => serde_json::to_string_pretty(value).expect("serialisable report") + "\n",
        Format::Text => text(),
    };
    let _ = std::io::stdout().lock().write_all(out.as_bytes());
}

fn write_pgm(dir: &Option<PathBuf>, name: &str, grid: &cone_runge::DomainGrid) -> CliResult<()> {
    if let Some(dir) = dir {
        fs::create_dir_all(dir)
            .and_then(|_| grid.write_pgm(&dir.join(name)))
            .map_err(|e| {
                Failure::input(
                    "io",
                    format!("cannot write {}: {e}", dir.join(name).display()),
                    None,
                    None,
                )
            })?;
    }
    Ok(())
}

fn parse_degrees(s: &str) -> CliResult<Vec<usize>> {
    let bad = || {
        Failure::input(
            "arguments",
            format!("invalid degree list `{s}`"),
            None,
            None,
        )
    };
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if let Some((a, b)) = part.split_once("..") {
            let a: usize = a.parse().map_err(|_| bad())?;
            let b: usize = b.trim_start_matches('=').parse().map_err(|_| bad())?;
            if b < a {
                return Err(bad());
            }
            out.extend(a..=b);
        } else {
            out.push(part.parse().map_err(|_| bad())?);
        }
    }
    if out.is_empty() {
        return Err(bad());
    }
    Ok(out)
}

fn cmd_selftest(g: &GlobalOpts, samples: usize, corrupt: Option<String>) -> CliResult<u8> {
    let mut table = PRODUCT_TABLE;
    if let Some(spec) = corrupt {
        let parts: Vec<_> = spec.split(',').map(str::trim).collect();
        let idx: Option<Vec<usize>> = parts.iter().map(|p| basis_index(p)).collect();
        match idx.as_deref() {
            Some([a, b]) => table = table.with_flipped_sign(*a, *b),
            _ => {
                return Err(Failure::input(
                    "arguments",
                    format!("invalid table entry `{spec}`"),
                    None,
                    None,
                ))
            }
        }
    }
    let report = run_selftest(&table, samples, g.seed);
    emit(&report, || report.render_text(), g.format);
    Ok(if report.passed { 0 } else { EXIT_SELFTEST })
}

fn cmd_analyze(g: &GlobalOpts, path: &Path) -> CliResult<u8> {
    let mut spec: DomainSpec = load(path)?;
    apply_resolution(&mut spec, g);
    let grid = cone_runge::rasterize(&spec).map_err(|e| Failure::from_core(e, Some(path), ""))?;
    write_pgm(&g.emit_pgm, "domain.pgm", &grid)?;
    let report = analyze_domain_grid(&grid).map_err(|e| Failure::from_core(e, Some(path), ""))?;
    emit(&report, || report.render_text(), g.format);
    Ok(0)
}

fn rasterize_both(
    g: &GlobalOpts,
    d: &DomainSpec,
    d1: &DomainSpec,
    files: (&Path, &Path),
    prefixes: (&str, &str),
) -> CliResult<(cone_runge::DomainGrid, cone_runge::DomainGrid)> {
    // Validate each spec on its own first so errors point at the right file.
    d.validate()
        .map_err(|e| Failure::from_core(e, Some(files.0), prefixes.0))?;
    d1.validate()
        .map_err(|e| Failure::from_core(e, Some(files.1), prefixes.1))?;
    let frame = GridFrame::from_window(d.union_window(d1), d.resolution.max(d1.resolution))
        .map_err(|e| Failure::from_core(e, None, ""))?;
    let gd =
        rasterize_on(d, frame).map_err(|e| Failure::from_core(e, Some(files.0), prefixes.0))?;
    let gd1 =
        rasterize_on(d1, frame).map_err(|e| Failure::from_core(e, Some(files.1), prefixes.1))?;
    write_pgm(&g.emit_pgm, "D.pgm", &gd)?;
    write_pgm(&g.emit_pgm, "D1.pgm", &gd1)?;
    Ok((gd, gd1))
}

fn cmd_pair(g: &GlobalOpts, dp: &Path, d1p: &Path) -> CliResult<u8> {
    let mut d: DomainSpec = load(dp)?;
    let mut d1: DomainSpec = load(d1p)?;
    apply_resolution(&mut d, g);
    apply_resolution(&mut d1, g);
    let (gd, gd1) = rasterize_both(g, &d, &d1, (dp, d1p), ("", ""))?;
    let report = analyze_grids(&gd, &gd1).map_err(|e| Failure::from_core(e, None, ""))?;
    emit(&report, || report.render_text(), g.format);
    Ok(0)
}

fn cmd_approx(
    g: &GlobalOpts,
    pair_path: &Path,
    f_path: &Path,
    degrees: &str,
    samples: usize,
    units: usize,
    csv: &Option<PathBuf>,
) -> CliResult<u8> {
    let degrees = parse_degrees(degrees)?;
    let mut pair: PairSpec = load(pair_path)?;
    apply_resolution(&mut pair.d, g);
    apply_resolution(&mut pair.d1, g);
    let f = match load::<FunctionSpec>(f_path)? {
        FunctionSpec::Polynomial(p) => SliceFunction::polynomial(p),
        FunctionSpec::Rational(r) => SliceFunction::rational(r),
    };
    // Rasterise up front so spec errors carry pointers into the pair file.
    rasterize_both(g, &pair.d, &pair.d1, (pair_path, pair_path), ("/D", "/D1"))?;
    let config = SamplerConfig {
        plane_samples: samples,
        unit_samples: units,
        seed: g.seed,
        ..SamplerConfig::default()
    };
    let record = runge_experiment(&pair.d, &pair.d1, &f, &degrees, &config)
        .map_err(|e| Failure::from_core(e, Some(pair_path), ""))?;
    if let Some(path) = csv {
        fs::write(path, record.to_csv()).map_err(|e| {
            Failure::input(
                "io",
                format!("cannot write {}: {e}", path.display()),
                None,
                None,
            )
        })?;
    }
    emit(&record, || record.render_text(), g.format);
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let g = &cli.global;
    let result = match cli.command {
        Command::Selftest {
            samples,
            corrupt_table,
        } => cmd_selftest(g, samples, corrupt_table),
        Command::Analyze { domain } => cmd_analyze(g, &domain),
        Command::Pair { d, d1 } => cmd_pair(g, &d, &d1),
        Command::Approx {
            pair,
            function,
            degrees,
            samples,
            units,
            csv,
        } => cmd_approx(g, &pair, &function, &degrees, samples, units, &csv),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!(
                "{}",
                serde_json::to_string(&f.report).expect("serialisable error")
            );
            ExitCode::from(f.code)
        }
    }
}
