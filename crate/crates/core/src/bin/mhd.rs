use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use mhdfem::cli::{self, exit_code, parse_config, RunConfig};
use mhdfem::forms::Scheme;
use mhdfem::Error;

#[derive(Parser)]
#[command(name = "mhd", about = "Structure-preserving MHD solver")]
struct Args {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one simulation from a config file.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Convergence study of the 2D manufactured solution.
    Mms {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        levels: Vec<u32>,
    },
    /// 3D structure-preservation experiment.
    Preset3d {
        #[arg(long, value_enum)]
        density: Density,
        #[arg(long, value_enum)]
        scheme: SchemeArg,
        #[arg(long)]
        upwind: bool,
        /// Cubes per side.
        #[arg(long, default_value_t = 8)]
        n: usize,
        #[arg(long, default_value = "out")]
        output: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Density {
    Variable,
    Constant,
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    #[value(name = "A")]
    A,
    #[value(name = "B")]
    B,
}

fn load(path: &PathBuf) -> Result<RunConfig, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))?;
    parse_config(&text)
}

fn run(cfg: &RunConfig) -> Result<(), Error> {
    let summary = cli::cmd_run(cfg)?;
    let last = summary.records.last().expect("initial row");
    println!(
        "{} steps, t = {}, energy = {:e}; wrote {}",
        summary.records.len() - 1,
        last.t,
        last.energy,
        summary.csv.display()
    );
    Ok(())
}

fn main() -> ExitCode {
    let args = Args::parse();
    let result = match args.cmd {
        Cmd::Run { config } => load(&config).and_then(|cfg| run(&cfg)),
        Cmd::Mms { config, levels } => load(&config).and_then(|cfg| {
            let report = cli::cmd_mms(&cfg, &levels)?;
            print!("{}", report.text());
            Ok(())
        }),
        Cmd::Preset3d {
            density,
            scheme,
            upwind,
            n,
            output,
        } => {
            let scheme = match scheme {
                SchemeArg::A => Scheme::A,
                SchemeArg::B => Scheme::B,
            };
            run(&cli::preset_config(matches!(density, Density::Variable), scheme, upwind, n, output))
        }
    };
    match result {
        Ok(()) => ExitCode::from(cli::EXIT_OK as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
