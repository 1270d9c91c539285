use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use qew_cli::{config, load_scenario, run, run_scenario, run_sweep, CliError, Format, Report};

#[derive(Parser)]
#[command(name = "qew", version, about = "Verify quasi-Einstein metrics, profiles and estimates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Jsonl,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file.
    Run {
        config: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: FormatArg,
    },
    /// Run a shoot scenario over a range of shooting parameters.
    Sweep {
        config: PathBuf,
        /// Only `shoot_param` is supported.
        #[arg(long, default_value = "shoot_param")]
        param: String,
        /// `a:b:steps`
        #[arg(long, allow_hyphen_values = true)]
        range: String,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: FormatArg,
    },
}

fn execute(cli: Cli) -> Result<(Report, Vec<u8>), CliError> {
    let env_tol = config::parse_env_tol(std::env::var("QEW_TOL").ok().as_deref())?;
    let fmt = |f: FormatArg| match f {
        FormatArg::Text => Format::Text,
        FormatArg::Jsonl => Format::JsonLines,
    };
    match cli.command {
        Command::Run { config, out, format } => {
            let scenario = load_scenario(&config, env_tol)?;
            run_scenario(&scenario, &out, fmt(format))
        }
        Command::Sweep { config, param, range, out, format } => {
            if param != "shoot_param" {
                return Err(CliError::Schema(format!("--param: only shoot_param can be swept, got {param:?}")));
            }
            let values = run::parse_range(&range)?;
            let scenario = load_scenario(&config, env_tol)?;
            run_sweep(&scenario, &values, &out, fmt(format))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok((report, bytes)) => {
            let _ = std::io::stdout().write_all(&bytes);
            if report.overall() {
                ExitCode::SUCCESS
            } else {
                eprintln!("qew: exit=1 kind=check-failed reason=failing checks: {}", report.failing().join(","));
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("qew: exit={} {}", e.exit_code(), e.one_line());
            ExitCode::from(e.exit_code())
        }
    }
}
