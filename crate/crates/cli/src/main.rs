//! `fusionlab`: construct, verify and classify modular data from the shell.

mod catalog;
mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use fusionlab::modular_data::MdLevel;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("budget exhausted: {0}")]
    Budget(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Verification(_) => 2,
            CliError::Budget(_) => 3,
            CliError::Input(_) | CliError::Io(_) | CliError::Json(_) => 4,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "fusionlab",
    version,
    about = "Exact modular data, modular invariants and NIM-reps"
)]
pub struct Cli {
    /// Catalog directory (default: $FUSIONLAB_HOME, else ./fusionlab-catalog)
    #[arg(long, global = true)]
    pub home: Option<PathBuf>,
    /// Cap on worker threads
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Print the stored JSON document instead of a text report
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build modular data, verify it and store it in the catalog
    Construct(ConstructArgs),
    /// Re-verify a stored datum
    Verify {
        name: String,
        #[arg(long, default_value = "1-4")]
        md_level: MdLevel,
    },
    /// Enumerate all modular invariants of a stored datum
    ClassifyMi {
        name: String,
        #[arg(long, default_value_t = fusionlab::invariants::DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Search NIM-reps of a stored datum
    Nimrep(NimRepArgs),
    /// Galois action, parities and the congruence property
    Galois { name: String },
    /// Fusion coefficients N_ab^c for all c
    Fusion { name: String, a: String, b: String },
    /// DOT fusion graph of a stored NIM-rep
    Graph {
        /// name of a stored NIM-rep list
        name: String,
        #[arg(long)]
        label: String,
        /// which NIM-rep of the list
        #[arg(long, default_value_t = 0)]
        index: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List catalog contents
    List,
}

#[derive(Debug, Args)]
pub struct ConstructArgs {
    /// even positive-definite Gram matrix, e.g. "[[2]]", or A<r> / E8
    #[arg(long, group = "source")]
    pub lattice: Option<String>,
    /// affine algebra "A,rank,level"
    #[arg(long, group = "source")]
    pub affine: Option<String>,
    /// quantum double of a group: cyclic:N, dihedral:M, symmetric:N,
    /// quaternion, an inline multiplication table or a JSON file with one
    #[arg(long, group = "source")]
    pub group: Option<String>,
    /// built-in fixture (m27, m27-reconstructed)
    #[arg(long, group = "source")]
    pub fixture: Option<String>,
    /// catalog name (derived from the source by default)
    #[arg(long)]
    pub name: Option<String>,
    /// store data that fails verification, with the failures recorded
    #[arg(long)]
    pub allow_invalid: bool,
    /// axioms to verify beyond MD1–MD4: 1-4, 5, 6 or 2prime
    #[arg(long, default_value = "1-4")]
    pub md_level: MdLevel,
}

#[derive(Debug, Args)]
pub struct NimRepArgs {
    pub name: String,
    /// search all irreducible NIM-reps of this dimension
    #[arg(long, group = "mode")]
    pub dim: Option<usize>,
    /// search NIM-reps with these exponents (comma-separated labels)
    #[arg(long, group = "mode")]
    pub exponents: Option<String>,
    /// search at every Tr(M) of the stored invariants and pair them up
    #[arg(long = "match", group = "mode")]
    pub match_invariants: bool,
    #[arg(long, default_value_t = 2_000_000)]
    pub budget: u64,
    /// reject NIM-reps that miss a mandatory exponent
    #[arg(long)]
    pub strict_mandatory: bool,
    /// catalog name for the result
    #[arg(long = "as")]
    pub save_as: Option<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(4);
        }
    }
    match commands::run(&cli) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err((text, e)) => {
            print!("{text}");
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
