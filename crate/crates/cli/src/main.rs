use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use innerlab::config::{load_config, BlaschkeChoice, ExperimentConfig};
use innerlab::dynamics;
use innerlab::emit::{emit_report, read_reports, ReportFormat};
use innerlab::grid::Grid;
use innerlab::norms::norm_summary;
use innerlab::series::synthesize_partial_sums;
use innerlab::verify::{all_hard_checks_pass, run_suite, CheckKind, Suite, VerificationReport};
use innerlab::{Error, FiniteBlaschkeProduct};
use num_complex::Complex64;

#[derive(Parser)]
#[command(name = "innerlab", version, about = "Series of iterates of finite Blaschke products")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print f^n(z).
    Eval {
        /// Test function name (f1..f4) or a JSON file with {"zeros": .., "rotation": ..}.
        #[arg(long = "f")]
        function: String,
        /// Point of the closed disc, e.g. 0.3+0.2i.
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        #[arg(long, default_value_t = 1)]
        n: usize,
    },
    /// Write partial sums F_c on the configured grid, one file per checkpoint.
    Series {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum, default_value_t = FieldFormat::Csv)]
        format: FieldFormat,
        #[arg(long, value_enum, default_value_t = GridChoice::Boundary)]
        grid: GridChoice,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Compute the norms of F_N and write them as JSON.
    Norms {
        #[arg(long)]
        config: PathBuf,
        /// Output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a suite of registered checks.
    Verify {
        #[arg(long, default_value = "all")]
        suite: SuiteArg,
        /// Configuration file; the built-in default when absent.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        plot_dir: Option<PathBuf>,
    },
    /// Render a JSON report file into CSV and plot data.
    Report {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        plot_dir: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FieldFormat {
    Csv,
    Binary,
}

#[derive(Clone, Copy, ValueEnum)]
enum GridChoice {
    Boundary,
    Disk,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Identities,
    Inequalities,
    Experiments,
    All,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Self {
        match s {
            SuiteArg::Identities => Suite::Identities,
            SuiteArg::Inequalities => Suite::Inequalities,
            SuiteArg::Experiments => Suite::Experiments,
            SuiteArg::All => Suite::All,
        }
    }
}

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_IO: u8 = 3;

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Io(_) => EXIT_IO,
        Error::NumericalDegeneracy(_) | Error::NonTermination { .. } => EXIT_CHECK_FAILED,
        _ => EXIT_USAGE,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    configure_threads();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("innerlab: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

/// `INNERLAB_THREADS` caps the worker pool.
fn configure_threads() {
    if let Some(n) = std::env::var("INNERLAB_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|n| *n > 0)
    {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn run(command: Command) -> Result<u8, Error> {
    match command {
        Command::Eval { function, z, n } => {
            let f = resolve_function(&function)?;
            let z: Complex64 = z
                .trim()
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("cannot parse {z:?} as a complex number")))?;
            let w = dynamics::iterate(&f, n, z)?;
            println!("{}", format_complex(w));
            Ok(0)
        }
        Command::Series {
            config,
            format,
            grid,
            out_dir,
        } => {
            let config = load_config(&config)?;
            let f = config.blaschke_product()?;
            let grid = match grid {
                GridChoice::Boundary => Grid::Boundary(config.boundary_grid),
                GridChoice::Disk => Grid::Disk(config.disk_grid),
            };
            let fields = synthesize_partial_sums(
                &f,
                &config.coefficients,
                &grid,
                config.truncation,
                &config.effective_checkpoints(),
            )?;
            create_dir(&out_dir)?;
            for field in fields {
                let ext = match format {
                    FieldFormat::Csv => "csv",
                    FieldFormat::Binary => "bin",
                };
                let path = out_dir.join(format!("partial_sum_n{}.{ext}", field.n));
                let file = fs::File::create(&path).map_err(|e| io_error(&path, e))?;
                let writer = BufWriter::new(file);
                match format {
                    FieldFormat::Csv => field.write_csv(writer)?,
                    FieldFormat::Binary => field.write_binary(writer)?,
                }
            }
            Ok(0)
        }
        Command::Norms { config, out } => {
            let config = load_config(&config)?;
            let f = config.blaschke_product()?;
            let norms = norm_summary(
                &f,
                &config.coefficients,
                config.truncation,
                &config.boundary_grid,
                &config.disk_grid,
            )?;
            let mut text = serde_json::to_string_pretty(&norms).expect("norms serialize");
            text.push('\n');
            match out {
                Some(path) => fs::write(&path, text).map_err(|e| io_error(&path, e))?,
                None => print!("{text}"),
            }
            Ok(0)
        }
        Command::Verify {
            suite,
            config,
            out,
            csv,
            plot_dir,
        } => {
            let config = match config {
                Some(path) => load_config(&path)?,
                None => ExperimentConfig::default(),
            };
            let reports = run_suite(&config, suite.into())?;
            if reports.is_empty() {
                return Err(Error::InvalidArgument("no registered check selected".into()));
            }
            print_summary(&reports);
            let out = out.or_else(|| config.output.json.clone());
            let csv = csv.or_else(|| config.output.csv.clone());
            let plot_dir = plot_dir.or_else(|| config.output.plotdata_dir.clone());
            write_outputs(&reports, out.as_deref(), csv.as_deref(), plot_dir.as_deref())?;
            Ok(if all_hard_checks_pass(&reports) {
                0
            } else {
                EXIT_CHECK_FAILED
            })
        }
        Command::Report {
            input,
            csv,
            plot_dir,
        } => {
            let reports = read_reports(&input)?;
            if reports.is_empty() {
                return Err(Error::InvalidArgument(format!("{} holds no reports", input.display())));
            }
            if csv.is_none() && plot_dir.is_none() {
                print!("{}", innerlab::emit::render_csv(&reports));
            }
            write_outputs(&reports, None, csv.as_deref(), plot_dir.as_deref())?;
            Ok(0)
        }
    }
}

fn resolve_function(arg: &str) -> Result<FiniteBlaschkeProduct, Error> {
    if let Some(f) = innerlab::named_test_function(arg) {
        return Ok(f);
    }
    let path = Path::new(arg);
    let text = fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    let choice: BlaschkeChoice = serde_json::from_str(&text)
        .map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))?;
    choice.build()
}

fn write_outputs(
    reports: &[VerificationReport],
    json: Option<&Path>,
    csv: Option<&Path>,
    plot_dir: Option<&Path>,
) -> Result<(), Error> {
    if let Some(path) = json {
        emit_report(reports, ReportFormat::Json, path)?;
    }
    if let Some(path) = csv {
        emit_report(reports, ReportFormat::Csv, path)?;
    }
    if let Some(dir) = plot_dir {
        emit_report(reports, ReportFormat::Plotdata, dir)?;
    }
    Ok(())
}

fn print_summary(reports: &[VerificationReport]) {
    for r in reports {
        let status = match (r.pass, r.kind) {
            (true, _) => "PASS",
            (false, CheckKind::Signature) => "FAIL (signature)",
            (false, CheckKind::Hard) => "FAIL",
        };
        println!("{:<28} {:<16} margin {:.3e}", r.check_id, status, r.margin);
    }
}

/// `re+imi`, with negative zero printed as zero.
fn format_complex(z: Complex64) -> String {
    let clean = |x: f64| if x == 0.0 { 0.0 } else { x };
    let (re, im) = (clean(z.re), clean(z.im));
    if im < 0.0 {
        format!("{re}-{}i", -im)
    } else {
        format!("{re}+{im}i")
    }
}

fn create_dir(dir: &Path) -> Result<(), Error> {
    fs::create_dir_all(dir).map_err(|e| io_error(dir, e))
}

fn io_error(path: &Path, e: std::io::Error) -> Error {
    Error::Io(format!("{}: {e}", path.display()))
}
