use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use zstab::{CliError, CliResult, RunRecord, ScenarioConfig, SchemeChoice};

#[derive(Parser)]
#[command(
    name = "zstab",
    version,
    about = "Moving-conductor FEM runs, peak-error sweeps and Z-domain identity checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Scenario config (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Overrides the scheme selection of the config.
    #[arg(long, value_enum)]
    scheme: Option<SchemeChoice>,
}

#[derive(Subcommand)]
enum Command {
    /// 1D solves: nodal a_y and element b_x per scheme and Peclet number.
    #[command(name = "run-1d")]
    Run1d(Common),
    /// 2D sheet solves: centreline and full-field CSVs.
    #[command(name = "run-2d")]
    Run2d(Common),
    /// Measured vs closed-form peak error over a Peclet sweep.
    #[command(name = "sweep-error")]
    SweepError(Common),
    /// Exact proofs of the stencil identities and transfer-function checks.
    Verify {
        /// Accepted for uniformity; the checks do not depend on a scenario.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Directory for verify_report.txt.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Accepted for uniformity; both schemes are always checked.
        #[arg(long, value_enum)]
        scheme: Option<SchemeChoice>,
        /// Negative control: perturb the named stencil polynomial.
        #[arg(long, hide = true)]
        perturb: Option<String>,
    },
}

fn run(
    c: &Common,
    f: fn(&ScenarioConfig, Option<SchemeChoice>, &Path) -> CliResult<RunRecord>,
) -> CliResult<()> {
    let config = ScenarioConfig::load(&c.config)?;
    let record = f(&config, c.scheme, &c.out)?;
    print!("{}", record.summary());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run1d(c) => run(c, zstab::run_1d),
        Command::Run2d(c) => run(c, zstab::run_2d),
        Command::SweepError(c) => run(c, zstab::sweep_error),
        Command::Verify {
            config, out, perturb, ..
        } => config
            .as_deref()
            .map(ScenarioConfig::load)
            .transpose()
            .and_then(|_| zstab::verify(perturb.as_deref(), out.as_deref(), &mut std::io::stdout())),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &CliError) -> u8 {
    e.exit_code() as u8
}
