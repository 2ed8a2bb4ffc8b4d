use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use arrvar::classifier::CaseId;
use arrvar::io::parse_input;
use arrvar::par::{with_jobs, Execution};
use arrvar::report::{run_command, Command};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Output {
    Text,
    Json,
}

#[derive(Parser, Debug)]
#[command(name = "arrvar", version, about = "Arrangement varieties X(A,P,Σ): Cox rings, fans, singularities")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// worker threads for sweeps (1 runs sequentially)
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[arg(long, global = true, value_enum, default_value = "text")]
    output: Output,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Class group, degrees, relations, honesty and K-primality of R(A,P)
    Ring { file: PathBuf },
    /// X-faces, smoothness, divisor class cones and the Fano property
    Variety { file: PathBuf },
    /// The tropical fan and the cone types of Σ
    Trop {
        file: PathBuf,
        /// use the coarsest structure (connected flats) instead of chains of flats
        #[arg(long)]
        coarsen_trop: bool,
    },
    /// Elementary cones, discrepancies and the anticanonical complex
    Acomplex { file: PathBuf },
    /// Singularity type and Gorenstein index
    Singtype { file: PathBuf },
    /// −K_X against the ample cone
    Fano { file: PathBuf },
    /// Bounded search for canonical Fano honestly special threefolds
    Classify {
        #[arg(long)]
        picard: Option<usize>,
        #[arg(long)]
        isotropy: Option<u32>,
        /// one of 1a, 1b, 2a, 2b, 2c
        #[arg(long)]
        case: Option<CaseId>,
    },
    /// One member of the smooth product family
    Product {
        #[arg(long)]
        k1: usize,
        #[arg(long)]
        k2: usize,
        /// comma-separated a-vector of length k2
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        a: Vec<i64>,
    },
    /// Decomposition of A and honesty
    Decompose { file: PathBuf },
}

fn run(cli: Cli) -> Result<String> {
    let (file, command) = match cli.command {
        Cmd::Ring { file } => (Some(file), Command::Ring),
        Cmd::Variety { file } => (Some(file), Command::Variety),
        Cmd::Trop { file, coarsen_trop } => (Some(file), Command::Trop { coarsen: coarsen_trop }),
        Cmd::Acomplex { file } => (Some(file), Command::AComplex),
        Cmd::Singtype { file } => (Some(file), Command::SingType),
        Cmd::Fano { file } => (Some(file), Command::Fano),
        Cmd::Decompose { file } => (Some(file), Command::Decompose),
        Cmd::Classify { picard, isotropy, case } => (None, Command::Classify { picard, isotropy, case }),
        Cmd::Product { k1, k2, a } => {
            if a.is_empty() {
                bail!("--a is required");
            }
            (None, Command::Product { k1, k2, a })
        }
    };
    let spec = match &file {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            Some(parse_input(&text).with_context(|| format!("parsing {}", path.display()))?)
        }
        None => None,
    };
    let exec = if cli.jobs == Some(1) { Execution::Sequential } else { Execution::Parallel };
    let report = with_jobs(cli.jobs, || run_command(spec.as_ref(), &command, exec))?;
    Ok(match cli.output {
        Output::Text => report.to_text(),
        Output::Json => report.to_json() + "\n",
    })
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
