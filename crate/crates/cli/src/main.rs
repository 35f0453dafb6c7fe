use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand, ValueEnum};
use rocketbvp::solver::CertificateMode;
use rocketbvp_cli::run::{
    output_dir, run_scenario, write_outputs, Certificates, Overrides, EXIT_INPUT, EXIT_NOT_CERTIFIED, EXIT_OK,
};
use rocketbvp_cli::scenario::ScenarioFile;
use rocketbvp_cli::sweep::{parse_range, run_sweep, sweep_values, write_rows, SweepParam};
use serde::Serialize;

/// Two-point boundary value solver for a variable-mass rocket.
///
/// Exit codes: 0 success, 1 bad input, 2 no convergence, 3 oracle
/// disagreement, 4 existence not certified.
#[derive(Debug, Parser)]
#[command(name = "rocketbvp", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve a scenario, cross-check it and write the trajectory and report.
    Solve {
        file: PathBuf,
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        damping: Option<f64>,
        /// Output directory; defaults to $ROCKETBVP_OUT, then the working directory.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Record the wall-clock time in the report.
        #[arg(long)]
        stamp: bool,
    },
    /// Print both existence certificates without solving.
    Certify {
        file: PathBuf,
        /// Which verdict decides the exit code.
        #[arg(long, value_enum, default_value_t = Mode::Rigorous)]
        mode: Mode,
    },
    /// Solve the scenario for a range of one parameter and print a CSV summary.
    Sweep {
        file: PathBuf,
        /// One of A, C_D, burn_rate, c, x1.
        #[arg(long)]
        param: String,
        /// LO:HI
        #[arg(long, allow_hyphen_values = true)]
        range: String,
        #[arg(long)]
        steps: usize,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    Paper,
    Rigorous,
}

impl From<Mode> for CertificateMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Paper => CertificateMode::PaperLiteral,
            Mode::Rigorous => CertificateMode::CorrectedRigorous,
        }
    }
}

#[derive(Serialize)]
struct CertifyOutput<'a> {
    label: String,
    selected_mode: CertificateMode,
    certificates: &'a Certificates,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match dispatch(cli.command) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INPUT as u8)
        }
    }
}

fn load(path: &Path) -> anyhow::Result<(ScenarioFile, String)> {
    let file = ScenarioFile::load(path)?;
    let label = file.label_or(path);
    Ok((file, label))
}

fn dispatch(command: Command) -> anyhow::Result<i32> {
    match command {
        Command::Solve {
            file,
            grid,
            tol,
            damping,
            out,
            stamp,
        } => {
            let (mut scenario, label) = load(&file)?;
            Overrides { grid, tol, damping }.apply(&mut scenario);
            scenario.to_config()?;
            let mut outcome = run_scenario(scenario, label)?;
            if stamp {
                let now = SystemTime::now().duration_since(UNIX_EPOCH)?.as_secs();
                outcome.report.generated_at_unix = Some(now);
            }
            for path in write_outputs(&output_dir(out), &outcome)? {
                println!("{}", path.display());
            }
            let r = &outcome.report;
            eprintln!(
                "converged={} iterations={} certified(paper)={} certified(rigorous)={} exit={}",
                r.solve.converged,
                r.solve.iterations,
                r.certificates.paper_literal.verdict_overall,
                r.certificates.corrected_rigorous.verdict_overall,
                r.exit_code
            );
            Ok(outcome.exit_code())
        }
        Command::Certify { file, mode } => {
            let (scenario, label) = load(&file)?;
            let config = scenario.to_config()?;
            let certificates = Certificates::compute(&config)?;
            let selected: CertificateMode = mode.into();
            let verdict = certificates.get(selected).verdict_overall;
            let output = CertifyOutput {
                label,
                selected_mode: selected,
                certificates: &certificates,
            };
            let mut stdout = std::io::stdout().lock();
            serde_json::to_writer_pretty(&mut stdout, &output)?;
            writeln!(stdout)?;
            Ok(if verdict { EXIT_OK } else { EXIT_NOT_CERTIFIED })
        }
        Command::Sweep {
            file,
            param,
            range,
            steps,
        } => {
            let param: SweepParam = param.parse()?;
            let (lo, hi) = parse_range(&range)?;
            let (scenario, _) = load(&file)?;
            scenario.to_config()?;
            let rows = run_sweep(&scenario, param, &sweep_values(lo, hi, steps));
            write_rows(std::io::stdout().lock(), &rows)?;
            Ok(EXIT_OK)
        }
    }
}
