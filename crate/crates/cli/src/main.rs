//! `lagflow` command-line driver.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lagflow::config::SimConfig;
use lagflow::diagnostics::assert_conservation;
use lagflow::diagnostics::Tolerances;
use lagflow::simulate::{run, sensitivity, sensitivity_direction, viscosity_sweep};
use lagflow::snapshot::write_atomic;
use lagflow::verify::{summary_table, Verifier, CHECKS};
use lagflow::Error;

#[derive(Parser)]
#[command(name = "lagflow", version, about = "Lagrangian flow maps for 2D Euler and Euler-alpha on the torus")]
struct Cli {
    /// Only print warnings and errors
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one simulation and write diagnostics and snapshots
    Simulate(RunArgs),
    /// Compare viscous Euler-alpha runs with the inviscid one
    Sweep(RunArgs),
    /// Finite-difference sensitivity of the final state to the initial velocity
    Sensitivity(RunArgs),
    /// Run the invariant and acceptance suite
    Verify {
        /// Run only checks whose names start with one of these comma-separated prefixes
        #[arg(long)]
        only: Option<String>,
        /// List the check names and exit
        #[arg(long)]
        list: bool,
    },
}

#[derive(Args)]
struct RunArgs {
    /// TOML configuration file
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides `output.dir`)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed of the random initial condition (overrides `ic.seed`)
    #[arg(long)]
    seed: Option<u64>,
}

enum Failure {
    Usage(String),
    Assertion(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_usage() {
            Failure::Usage(e.to_string())
        } else {
            Failure::Runtime(e.to_string())
        }
    }
}

impl RunArgs {
    fn load(&self) -> Result<SimConfig, Failure> {
        let mut cfg = SimConfig::load(&self.config).map_err(|e| Failure::Usage(e.to_string()))?;
        if let Some(seed) = self.seed {
            cfg.ic.seed = seed;
        }
        if let Some(out) = &self.out {
            cfg.output.dir = Some(out.clone());
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn out_dir(&self, cfg: &SimConfig) -> PathBuf {
        cfg.output.dir.clone().unwrap_or_else(|| PathBuf::from("."))
    }
}

fn write_text(path: &Path, text: &str) -> Result<(), Failure> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(|e| Failure::Runtime(format!("{}: {e}", parent.display())))?;
    }
    write_atomic(path, |w| std::io::Write::write_all(w, text.as_bytes())).map_err(Failure::from)
}

fn simulate(args: &RunArgs) -> Result<(), Failure> {
    let mut cfg = args.load()?;
    cfg.output.dir = Some(args.out_dir(&cfg));
    let out = run(&cfg)?;
    let params = cfg.params();
    let report = assert_conservation(&out.diagnostics, params.model, params.nu, &Tolerances::default());
    print!("{}", report.to_table());
    log::info!("wrote {} files to {}", out.files.len(), args.out_dir(&cfg).display());
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Assertion("conservation tolerances exceeded".into()))
    }
}

fn sweep(args: &RunArgs) -> Result<(), Failure> {
    let cfg = args.load()?;
    let dir = args.out_dir(&cfg);
    let nus = cfg.sweep_or_default().nus;
    let table = viscosity_sweep(&cfg, &nus)?;
    write_text(&dir.join("sweep.csv"), &table.to_csv())?;
    print!("{}", table.to_csv());
    println!("eta_sup slope {:.3}, monotone {}", table.slope(|r| r.eta_sup), table.monotone());
    Ok(())
}

fn sensitivity_cmd(args: &RunArgs) -> Result<(), Failure> {
    let cfg = args.load()?;
    let dir = args.out_dir(&cfg);
    let grid = cfg.build_grid()?;
    let eps = cfg.sensitivity_or_default().eps;
    let v = sensitivity_direction(&cfg, &grid)?;
    let mut quiet = cfg.clone();
    quiet.output.dir = None;
    let report = sensitivity(&quiet, &v, &[eps, eps / 2.0, eps / 4.0, eps / 8.0])?;
    write_text(&dir.join("sensitivity.csv"), &report.to_csv())?;
    print!("{}", report.to_csv());
    Ok(())
}

fn verify(only: Option<&str>, list: bool) -> Result<(), Failure> {
    if list {
        for c in CHECKS {
            println!("{c}");
        }
        return Ok(());
    }
    if let Some(f) = only {
        if !f.split(',').all(|p| CHECKS.iter().any(|c| c.starts_with(p.trim()))) {
            return Err(Failure::Usage(format!("no check matches {f:?}; see `lagflow verify --list`")));
        }
    }
    let checks = Verifier::new().run_all(only);
    print!("{}", summary_table(&checks));
    match checks.iter().filter(|c| !c.passed).count() {
        0 => Ok(()),
        k => Err(Failure::Assertion(format!("{k} check(s) failed"))),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.quiet { log::LevelFilter::Warn } else { log::LevelFilter::Info };
    env_logger::Builder::new().filter_level(level).format_timestamp(None).init();
    let result = match &cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Sweep(a) => sweep(a),
        Command::Sensitivity(a) => sensitivity_cmd(a),
        Command::Verify { only, list } => verify(only.as_deref(), *list),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Assertion(msg)) => {
            eprintln!("lagflow: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("lagflow: error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("lagflow: {msg}");
            ExitCode::from(2)
        }
    }
}
