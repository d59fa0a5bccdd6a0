//! `rdecay`: parameter sweeps, figure data and the self-check battery.

mod config;

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rindler_decay::states::Family;
use rindler_decay::sweep::{
    boundary_surface, evaluate, fig1_panels, max_deviation, parse_axis, parse_families, with_jobs,
    write_boundary_csv, write_csv, MethodSet, SweepSpec, DEVIATION_THRESHOLD, SURFACE_GRID,
};
use rindler_decay::{verify, Error};

use config::Config;

const DEFAULT_FAMILY: &str = "both";
const DEFAULT_ALPHA: &str = "0.1:0.9:9";
const DEFAULT_R: &str = "0";
const DEFAULT_P: &str = "0:1:11";
const DEFAULT_METHODS: &str = "eigen,xstate,closed";

#[derive(Parser, Debug)]
#[command(
    name = "rdecay",
    version,
    about = "Two-qubit entanglement under amplitude damping with an accelerated observer"
)]
struct Cli {
    /// Settings file of key=value lines (keys: family, alpha, r, p, methods,
    /// out, jobs, allow_degenerate). Flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Worker threads for grid evaluation [default: all cores].
    #[arg(long, global = true, value_name = "N", value_parser = clap::value_parser!(u16).range(1..))]
    jobs: Option<u16>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate concurrence on an (alpha, r, P) grid and write CSV.
    Sweep(SweepArgs),
    /// Concurrence-versus-P curves, one CSV per (family, r) panel.
    Fig1(DirArgs),
    /// Zero-concurrence boundary surfaces over a 50x50 (r, P) grid.
    Fig2(DirArgs),
    /// Run the invariant battery and print a per-check table.
    Verify,
}

/// Axis values are a comma list (`0.1,0.5,1/sqrt(2)`) or a grid `min:max:count`.
/// Constants `pi`, `k*pi/d` and `sqrt(x)` are understood.
#[derive(Args, Debug)]
struct SweepArgs {
    /// theta1, theta2 or both [default: both]
    #[arg(long)]
    family: Option<String>,
    /// State parameter values [default: 0.1:0.9:9]
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
    /// Acceleration parameter values in [0, pi/4] [default: 0]
    #[arg(long)]
    r: Option<String>,
    /// Decay probability values in [0, 1] [default: 0:1:11]
    #[arg(long)]
    p: Option<String>,
    /// Any of eigen, xstate, closed, or all [default: eigen,xstate,closed]
    #[arg(long)]
    methods: Option<String>,
    /// Output CSV path, `-` for stdout [default: -]
    #[arg(long)]
    out: Option<PathBuf>,
    /// Accept the product states alpha = 0 and alpha = +-1.
    #[arg(long)]
    allow_degenerate: bool,
}

#[derive(Args, Debug)]
struct DirArgs {
    /// Output directory, created if missing [default: .]
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug)]
pub enum AppError {
    Usage(String),
    Io(String),
    Verify(String),
}

impl AppError {
    fn exit_code(&self) -> u8 {
        match self {
            AppError::Verify(_) => 1,
            AppError::Usage(_) => 2,
            AppError::Io(_) => 3,
        }
    }
}

impl From<Error> for AppError {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(_) | Error::Csv(_) => AppError::Io(e.to_string()),
            _ => AppError::Usage(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let (AppError::Usage(msg) | AppError::Io(msg) | AppError::Verify(msg)) = &e;
            eprintln!("rdecay: {msg}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<(), AppError> {
    let config = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    let jobs = match cli.jobs {
        Some(n) => Some(n as usize),
        None => config
            .get("jobs")
            .map(|s| match s.parse::<usize>() {
                Ok(n) if n > 0 => Ok(n),
                _ => Err(AppError::Usage(format!(
                    "jobs: expected a positive integer, got {s:?}"
                ))),
            })
            .transpose()?,
    };

    match cli.command {
        Command::Sweep(args) => cmd_sweep(args, &config, jobs),
        Command::Fig1(args) => cmd_fig1(&out_dir(args, &config), jobs),
        Command::Fig2(args) => cmd_fig2(&out_dir(args, &config)),
        Command::Verify => cmd_verify(jobs),
    }
}

fn setting<'a>(
    flag: &'a Option<String>,
    config: &'a Config,
    key: &str,
    default: &'a str,
) -> &'a str {
    flag.as_deref()
        .or_else(|| config.get(key))
        .unwrap_or(default)
}

fn out_dir(args: DirArgs, config: &Config) -> PathBuf {
    args.out
        .or_else(|| config.get("out").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}

fn sweep_spec(args: &SweepArgs, config: &Config) -> Result<SweepSpec, AppError> {
    let allow_degenerate = args.allow_degenerate
        || match config.get("allow_degenerate") {
            None => false,
            Some(v) => v.parse::<bool>().map_err(|_| {
                AppError::Usage(format!(
                    "allow_degenerate: expected true or false, got {v:?}"
                ))
            })?,
        };
    let axis = |name: &str, flag: &Option<String>, default| -> Result<Vec<f64>, AppError> {
        let text = setting(flag, config, name, default);
        parse_axis(text).map_err(|e| AppError::Usage(format!("--{name} {text:?}: {e}")))
    };
    let family = setting(&args.family, config, "family", DEFAULT_FAMILY);
    let methods = setting(&args.methods, config, "methods", DEFAULT_METHODS);
    Ok(SweepSpec {
        families: parse_families(family).map_err(|e| AppError::Usage(format!("--family: {e}")))?,
        alphas: axis("alpha", &args.alpha, DEFAULT_ALPHA)?,
        rs: axis("r", &args.r, DEFAULT_R)?,
        ps: axis("p", &args.p, DEFAULT_P)?,
        methods: methods
            .parse::<MethodSet>()
            .map_err(|e| AppError::Usage(format!("--methods: {e}")))?,
        allow_degenerate,
    })
}

fn cmd_sweep(args: SweepArgs, config: &Config, jobs: Option<usize>) -> Result<(), AppError> {
    let spec = sweep_spec(&args, config)?;
    let out = args
        .out
        .clone()
        .or_else(|| config.get("out").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("-"));

    // validate before touching the output path
    spec.points()?;
    let rows = with_jobs(jobs, || evaluate(&spec))?;

    if out.as_os_str() == "-" {
        write_csv(&rows, io::stdout().lock())?;
    } else {
        write_csv(&rows, create(&out)?)?;
    }

    let worst = max_deviation(&rows);
    eprintln!(
        "sweep: {} rows, max cross-method deviation {worst:.3e} (threshold {DEVIATION_THRESHOLD:.0e})",
        rows.len()
    );
    if worst > DEVIATION_THRESHOLD {
        return Err(AppError::Verify(format!(
            "methods disagree by {worst:.3e}, above {DEVIATION_THRESHOLD:.0e}"
        )));
    }
    Ok(())
}

fn cmd_fig1(dir: &Path, jobs: Option<usize>) -> Result<(), AppError> {
    ensure_dir(dir)?;
    let mut worst = 0.0_f64;
    for (name, spec) in fig1_panels() {
        let rows = with_jobs(jobs, || evaluate(&spec))?;
        worst = worst.max(max_deviation(&rows));
        let path = dir.join(&name);
        write_csv(&rows, create(&path)?)?;
        eprintln!("fig1: wrote {} ({} rows)", path.display(), rows.len());
    }
    if worst > DEVIATION_THRESHOLD {
        return Err(AppError::Verify(format!(
            "methods disagree by {worst:.3e}, above {DEVIATION_THRESHOLD:.0e}"
        )));
    }
    Ok(())
}

fn cmd_fig2(dir: &Path) -> Result<(), AppError> {
    ensure_dir(dir)?;
    for family in Family::ALL {
        let samples = boundary_surface(family, SURFACE_GRID)?;
        let path = dir.join(format!("fig2_{family}_boundary.csv"));
        write_boundary_csv(&samples, create(&path)?)?;
        eprintln!("fig2: wrote {} ({} samples)", path.display(), samples.len());
    }
    Ok(())
}

fn cmd_verify(jobs: Option<usize>) -> Result<(), AppError> {
    let outcomes = with_jobs(jobs, verify::run_all);
    let width = outcomes.iter().map(|o| o.name.len()).max().unwrap_or(0);
    let mut stdout = io::stdout().lock();
    let mut write_table = || -> io::Result<()> {
        for o in &outcomes {
            let status = if o.passed { "PASS" } else { "FAIL" };
            writeln!(stdout, "{status}  {:<width$}  {}", o.name, o.detail)?;
        }
        stdout.flush()
    };
    write_table().map_err(|e| AppError::Io(format!("writing report: {e}")))?;

    let failed: Vec<&str> = outcomes
        .iter()
        .filter(|o| !o.passed)
        .map(|o| o.name)
        .collect();
    eprintln!(
        "verify: {}/{} checks passed",
        outcomes.len() - failed.len(),
        outcomes.len()
    );
    if failed.is_empty() {
        Ok(())
    } else {
        Err(AppError::Verify(format!(
            "failed checks: {}",
            failed.join(", ")
        )))
    }
}

fn ensure_dir(dir: &Path) -> Result<(), AppError> {
    fs::create_dir_all(dir).map_err(|e| AppError::Io(format!("creating {}: {e}", dir.display())))
}

fn create(path: &Path) -> Result<BufWriter<File>, AppError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| AppError::Io(format!("creating {}: {e}", path.display())))
}
