use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use linarg_cli::{parse_config, run, CliError, Command, Format};

#[derive(Parser)]
#[command(
    name = "linarg",
    version,
    about = "Simulate and analyse difference equations with linear arguments"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write the artifact here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Fmt>,
    /// Overrides `[run] seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Iterate the equation and check the envelope bound.
    Simulate,
    /// Reduce the order through the candidate root.
    Reduce,
    /// Evaluate the attractivity criteria.
    Check,
    /// Classify the tanh equation over a range of `a`.
    Scan,
    /// Check the Banach-algebra axioms on random samples.
    Axioms,
}

#[derive(ValueEnum, Clone, Copy)]
enum Fmt {
    Csv,
    Json,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn execute(cli: &Cli) -> Result<i32, CliError> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::Config("--config PATH is required".into()))?;
    let text =
        std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut config = parse_config(&text)?;
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    let command = match cli.command {
        Cmd::Simulate => Command::Simulate,
        Cmd::Reduce => Command::Reduce,
        Cmd::Check => Command::Check,
        Cmd::Scan => Command::Scan,
        Cmd::Axioms => Command::Axioms,
    };
    let format = cli.format.map(|f| match f {
        Fmt::Csv => Format::Csv,
        Fmt::Json => Format::Json,
    });
    let outcome = run(command, &config, format)?;
    match &cli.out {
        Some(out) => {
            std::fs::write(out, &outcome.artifact)
                .map_err(|e| CliError::Config(format!("cannot write {}: {e}", out.display())))?;
            print!("{}", outcome.report);
        }
        None => {
            print!("{}", outcome.artifact);
            eprint!("{}", outcome.report);
        }
    }
    Ok(outcome.exit_code)
}
