//! `btq`: runs convergence experiments for Berezin-Toeplitz quantization of
//! the sphere and writes the tables as CSV or JSON.
//!
//! Exit codes: 0 all checks passed, 1 a check failed (the report is still
//! written), 2 usage or parse error, 3 capacity or convention-ledger error.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use btq::lab::{
    calibrate_with, coherent_run_at_max, cross_check_run, load_ledger, save_ledger, thm1_run, thm2_run, thm3_run,
    tuynman_run, LabSettings, RunOutcome, DEFAULT_MAX_LEVEL,
};
use btq::symbol::parse;
use btq::{Error, Execution, KahlerConventions, Symbol};
use clap::{Parser, ValueEnum};

const LEDGER_ENV: &str = "BTQ_LEDGER";
const DEFAULT_LEDGER: &str = "btq-conventions.json";

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Experiment {
    /// ‖T_f‖ against the sup norm of f
    Thm1,
    /// ‖m i[T_f, T_g] − T_{f,g}‖
    Thm2,
    /// star-product residual of order --order
    Thm3,
    /// prequantum operator against i T_{f − Δf/2m}
    Tuynman,
    /// coherent-state expectation at a maximiser of |f|
    Coherent,
    /// agreement of the three Toeplitz constructions
    Crosscheck,
    /// derive the sign conventions and write the ledger
    Calibrate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "btq", version, about = "Semiclassical convergence experiments on the quantized sphere")]
struct Cli {
    experiment: Experiment,
    /// first symbol, a polynomial in x1, x2, x3
    #[arg(long = "f", value_name = "EXPR")]
    f: Option<String>,
    /// second symbol for thm2 and thm3
    #[arg(long = "g", value_name = "EXPR")]
    g: Option<String>,
    /// strictly increasing levels
    #[arg(long, value_name = "LIST", value_delimiter = ',', default_value = "8,16,32,64,128")]
    levels: Vec<u32>,
    /// levels used for the rate fit (default: upper half of --levels)
    #[arg(long, value_name = "LIST", value_delimiter = ',')]
    window: Option<Vec<u32>>,
    /// output file, written atomically (default: standard output)
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// extra quadrature degrees on both axes
    #[arg(long, value_name = "INT", default_value_t = 0)]
    margin: usize,
    /// recorded in the report
    #[arg(long, value_name = "INT", default_value_t = 0)]
    seed: u64,
    /// calibrate and write the ledger if it does not exist
    #[arg(long)]
    auto_calibrate: bool,
    #[arg(long, value_name = "INT", default_value_t = DEFAULT_MAX_LEVEL)]
    max_level: u32,
    /// expansion order for thm3 (1 or 2)
    #[arg(long, value_name = "N", default_value_t = 2, value_parser = clap::value_parser!(u32).range(1..=2))]
    order: u32,
    /// run every level on the calling thread
    #[arg(long)]
    sequential: bool,
}

/// A diagnostic together with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self { code: 2, message: message.into() }
    }

    fn ledger(message: impl Into<String>) -> Self {
        Self { code: 3, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Capacity { .. } | Error::UnderResolved(_) => 3,
            Error::CalibrationAmbiguous(_) => 1,
            _ => 2,
        };
        Self { code, message: e.to_string() }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("btq: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn ledger_path() -> PathBuf {
    std::env::var_os(LEDGER_ENV).map_or_else(|| PathBuf::from(DEFAULT_LEDGER), PathBuf::from)
}

fn settings(cli: &Cli) -> LabSettings {
    let s = LabSettings {
        margin: cli.margin,
        window: cli.window.clone(),
        max_level: cli.max_level,
        seed: Some(cli.seed),
        ..LabSettings::default()
    };
    if cli.sequential {
        s.with_execution(Execution::Sequential)
    } else {
        s
    }
}

fn symbol(text: Option<&str>, flag: &str) -> Result<Symbol, Failure> {
    let text = text.ok_or_else(|| Failure::usage(format!("--{flag} is required for this experiment")))?;
    parse(text).map_err(|e| {
        let mut f = Failure::from(e);
        f.message = format!("--{flag} {text:?}: {}", f.message);
        f
    })
}

fn conventions(cli: &Cli, base: &LabSettings) -> Result<KahlerConventions, Failure> {
    let path = ledger_path();
    if path.exists() {
        return load_ledger(&path).map_err(|e| {
            Failure::ledger(format!("{e}; delete it and run `btq calibrate` to rebuild it"))
        });
    }
    if !cli.auto_calibrate {
        return Err(Failure::ledger(format!(
            "no convention ledger at {}; run `btq calibrate` or pass --auto-calibrate",
            path.display()
        )));
    }
    let cal = calibrate_with(base)?;
    save_ledger(&path, &cal.conventions)?;
    eprintln!("btq: wrote convention ledger {}", path.display());
    Ok(cal.conventions)
}

fn run(cli: &Cli) -> Result<u8, Failure> {
    let base = settings(cli);
    if cli.experiment == Experiment::Calibrate {
        let cal = calibrate_with(&base)?;
        let path = ledger_path();
        save_ledger(&path, &cal.conventions)?;
        eprintln!("btq: wrote convention ledger {}", path.display());
        let mut text = serde_json::to_string_pretty(&cal.conventions).expect("conventions serialize");
        text.push('\n');
        emit(cli.out.as_deref(), &text)?;
        return Ok(0);
    }

    let f = symbol(cli.f.as_deref(), "f")?;
    let g = match cli.experiment {
        Experiment::Thm2 | Experiment::Thm3 => Some(symbol(cli.g.as_deref(), "g")?),
        _ => None,
    };
    let settings = base.clone().with_conventions(conventions(cli, &base)?);
    let levels = &cli.levels;
    let outcome: RunOutcome = match cli.experiment {
        Experiment::Thm1 => thm1_run(&f, levels, &settings)?,
        Experiment::Thm2 => thm2_run(&f, g.as_ref().expect("g parsed"), levels, &settings)?,
        Experiment::Thm3 => thm3_run(&f, g.as_ref().expect("g parsed"), levels, cli.order, &settings)?,
        Experiment::Tuynman => tuynman_run(&f, levels, &settings)?,
        Experiment::Coherent => coherent_run_at_max(&f, levels, &settings)?,
        Experiment::Crosscheck => cross_check_run(&f, levels, &settings)?,
        Experiment::Calibrate => unreachable!("handled above"),
    };
    let text = match cli.format {
        Format::Csv => outcome.report.to_csv(),
        Format::Json => outcome.report.to_json(),
    };
    emit(cli.out.as_deref(), &text)?;
    for failure in &outcome.failures {
        eprintln!("btq: check failed: {failure}");
    }
    Ok(if outcome.passed() { 0 } else { 1 })
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| Failure::usage(format!("writing standard output: {e}")))
        }
        Some(path) => write_atomic(path, text).map_err(|e| Failure::usage(format!("writing {}: {e}", path.display()))),
    }
}

fn write_atomic(path: &Path, text: &str) -> std::io::Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = dir.join(format!(".{name}.tmp{}", std::process::id()));
    let result = (|| {
        let mut file = fs::File::create(&tmp)?;
        file.write_all(text.as_bytes())?;
        file.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result
}
