use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use voros_cli::{run, CliError, RunConfig, TaskKind, TASK_SCHEMAS};

#[derive(Parser)]
#[command(
    name = "voros",
    version,
    about = "Spectral solvers: Bethe roots, exact WKB, TBA and Voros spectra"
)]
#[command(after_long_help = TASK_SCHEMAS)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a JSON config file ("-" reads stdin).
    #[command(after_long_help = TASK_SCHEMAS)]
    Run {
        config: PathBuf,
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
    /// Shooting eigenvalues of a potential.
    Schrodinger {
        /// Potential as JSON, e.g. '{"variant": "AbsLinear"}'.
        #[arg(long)]
        potential: String,
        #[arg(long, value_enum, default_value = "full-line")]
        bc: Bc,
        /// Number of levels, starting from the ground state.
        #[arg(long)]
        levels: usize,
        #[arg(long)]
        outer_radius: Option<f64>,
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
    /// Print the config schema of every task.
    Schemas,
}

#[derive(Clone, Copy, ValueEnum)]
enum Bc {
    Dirichlet,
    Neumann,
    FullLine,
}

impl Bc {
    fn name(self) -> &'static str {
        match self {
            Bc::Dirichlet => "dirichlet",
            Bc::Neumann => "neumann",
            Bc::FullLine => "full_line",
        }
    }
}

fn load(path: &Path) -> Result<RunConfig, CliError> {
    if path.as_os_str() == "-" {
        let text = std::io::read_to_string(std::io::stdin())?;
        RunConfig::from_json(&text)
    } else {
        RunConfig::from_path(path)
    }
}

fn execute(cli: Cli) -> Result<(), CliError> {
    let (config, dir) = match cli.command {
        Command::Schemas => {
            print!("{TASK_SCHEMAS}");
            return Ok(());
        }
        Command::Run { config, output_dir } => (load(&config)?, output_dir),
        Command::Schrodinger {
            potential,
            bc,
            levels,
            outer_radius,
            output_dir,
        } => {
            let potential: serde_json::Value = serde_json::from_str(&potential)
                .map_err(|e| CliError::Config(format!("--potential: {e}")))?;
            let params = json!({
                "potential": potential,
                "bc": {"origin": bc.name(), "outer_radius": outer_radius},
                "levels": levels,
            });
            (RunConfig::new(TaskKind::Schrodinger, params), output_dir)
        }
    };
    let outcome = run(&config, dir.as_deref())?;
    for a in &outcome.artifacts {
        println!("{}", outcome.output_dir.join(&a.file).display());
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("voros: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
