use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use matjul::classify::{classify_matrix, ClassifyParams};
use matjul::format::{format_complex, parse_matrix, parse_polynomial};
use matjul::green::{boettcher_matrix, boettcher_series, green_direct, green_matrix_with_budget, OmegaDomain};
use matjul::render::{self, ImageFormat, RenderJob};
use matjul::scalar::DEFAULT_BUDGET;
use matjul::slice::SliceSpec;
use matjul::verify::{suite_names, verify_with_workers};
use matjul::{Mat2, Polynomial};

#[derive(Parser)]
#[command(name = "matjul", version, about = "Polynomial dynamics on 2x2 complex matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fatou/Julia stratum of a matrix, printed as JSON.
    Classify {
        #[command(flatten)]
        point: PointArgs,
        /// Radius of the neighbour ring around each eigenvalue (0 disables it).
        #[arg(long, default_value_t = 1e-3)]
        band: f64,
    },
    /// Matrix Green function.
    Green {
        #[command(flatten)]
        point: PointArgs,
        /// Use `n` steps of direct iteration instead of the eigenvalue route.
        #[arg(long, value_name = "N")]
        direct: Option<usize>,
        #[arg(long)]
        json: bool,
    },
    /// Matrix Böttcher coordinate.
    Boettcher {
        #[command(flatten)]
        point: PointArgs,
        /// Evaluate the truncated Laurent series of this order instead.
        #[arg(long, value_name = "N")]
        series: Option<usize>,
        /// Domain radius; defaults to the Böttcher radius of the polynomial.
        #[arg(long)]
        radius: Option<f64>,
        #[arg(long)]
        json: bool,
    },
    /// Render a slice to PGM or CSV.
    Render {
        #[arg(long, allow_hyphen_values = true, value_parser = parse_poly_arg)]
        poly: Polynomial,
        #[arg(long, value_name = "JSON")]
        slice_file: PathBuf,
        #[arg(long, value_enum, default_value_t = QuantityArg::Classification)]
        quantity: QuantityArg,
        #[arg(long, value_enum)]
        format: Option<FormatArg>,
        #[arg(long, default_value_t = DEFAULT_BUDGET as u64, value_parser = clap::value_parser!(u64).range(1..))]
        budget: u64,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        workers: WorkerArgs,
    },
    /// Run the randomized verification suites and write a CSV report.
    Verify {
        /// Suite name, or `all`.
        #[arg(long, default_value = "all", value_parser = parse_suite)]
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Samples per property; defaults vary by property.
        #[arg(long)]
        count: Option<usize>,
        /// Report path; the report is always echoed to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        workers: WorkerArgs,
    },
}

#[derive(Args)]
struct PointArgs {
    /// Ascending coefficients (`"0,0,1"` is z^2), JSON pairs, or `@file.json`.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_poly_arg)]
    poly: Polynomial,
    /// Row-major `"a;b;c;d"`, JSON, or `@file.json`.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_matrix_arg)]
    matrix: Mat2,
    #[arg(long, default_value_t = DEFAULT_BUDGET as u64, value_parser = clap::value_parser!(u64).range(1..))]
    budget: u64,
}

#[derive(Args)]
struct WorkerArgs {
    /// Worker threads (0 uses every core).
    #[arg(long, env = "MATJUL_JOBS", default_value_t = 0)]
    jobs: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum QuantityArg {
    Classification,
    Green,
    EscapeTime,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Pgm,
    Csv,
}

fn inline_or_file(text: &str) -> Result<String, String> {
    match text.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path).map_err(|e| format!("{path}: {e}")),
        None => Ok(text.to_string()),
    }
}

fn parse_poly_arg(text: &str) -> Result<Polynomial, String> {
    parse_polynomial(&inline_or_file(text)?).map_err(|e| e.to_string())
}

fn parse_matrix_arg(text: &str) -> Result<Mat2, String> {
    parse_matrix(&inline_or_file(text)?).map_err(|e| e.to_string())
}

fn parse_suite(text: &str) -> Result<String, String> {
    let names = suite_names();
    if text == "all" || names.contains(&text) {
        Ok(text.to_string())
    } else {
        Err(format!("expected `all` or one of: {}", names.join(", ")))
    }
}

fn format_matrix(m: &Mat2) -> String {
    m.entries().map(format_complex).join(";")
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Classify { point, band } => {
            let mut params = ClassifyParams::with_budget(point.budget as usize);
            params.band = band;
            let verdict = classify_matrix(&point.poly, &point.matrix, &params);
            println!("{}", serde_json::to_string_pretty(&verdict)?);
        }
        Command::Green { point, direct, json } => {
            let g = match direct {
                Some(n) => green_direct(&point.poly, &point.matrix, n),
                None => green_matrix_with_budget(&point.poly, &point.matrix, point.budget as usize),
            };
            if json {
                println!("{}", serde_json::to_string_pretty(&g)?);
            } else {
                println!("{:.6}", g.value);
            }
        }
        Command::Boettcher {
            point,
            series,
            radius,
            json,
        } => {
            let phi = match series {
                Some(n) => boettcher_series(&point.poly, &point.matrix, n)?,
                None => {
                    let omega = match radius {
                        Some(r) => OmegaDomain::new(&point.poly, r)?,
                        None => OmegaDomain::for_polynomial(&point.poly),
                    };
                    boettcher_matrix(&point.poly, &point.matrix, &omega)?
                }
            };
            if json {
                println!("{}", serde_json::to_string(&phi)?);
            } else {
                println!("{}", format_matrix(&phi));
            }
        }
        Command::Render {
            poly,
            slice_file,
            quantity,
            format,
            budget,
            out,
            workers,
        } => {
            let text = std::fs::read_to_string(&slice_file)
                .with_context(|| format!("reading {}", slice_file.display()))?;
            let slice = SliceSpec::from_json(&text)?;
            let format = match format {
                Some(FormatArg::Pgm) => ImageFormat::Pgm,
                Some(FormatArg::Csv) => ImageFormat::Csv,
                None if out.extension().is_some_and(|e| e == "csv") => ImageFormat::Csv,
                None => ImageFormat::Pgm,
            };
            let quantity = match quantity {
                QuantityArg::Classification => render::Quantity::Classification,
                QuantityArg::Green => render::Quantity::Green,
                QuantityArg::EscapeTime => render::Quantity::EscapeTime,
            };
            let job = RenderJob {
                poly,
                slice,
                quantity,
                params: ClassifyParams::with_budget(budget as usize),
                format,
                output: Some(out.clone()),
            };
            render::run(&job, workers.jobs).with_context(|| format!("rendering to {}", out.display()))?;
        }
        Command::Verify {
            suite,
            seed,
            count,
            out,
            workers,
        } => {
            let report = verify_with_workers(&suite, seed, count, workers.jobs)?;
            let csv = report.to_csv();
            if let Some(path) = &out {
                std::fs::write(path, &csv).with_context(|| format!("writing {}", path.display()))?;
            }
            print!("{csv}");
            if !report.passed() {
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
