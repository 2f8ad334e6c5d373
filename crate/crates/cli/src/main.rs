use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use stasheff_cli::commands::{self, Method, Outcome, RetractSource, TransferOptions};
use stasheff_cli::document::{parse_document, Document, InputError};
use stasheff_cli::EXIT_INPUT;

#[derive(Parser)]
#[command(name = "stasheff", version, about = "Exact transfer of A-infinity algebras along deformation retracts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the structure, retract and transfer data of a document.
    Check { file: PathBuf },
    /// Transfer the structure of a document to the homology of its complex.
    Transfer {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = MethodArg::Both)]
        method: MethodArg,
        /// Highest arity to transfer; defaults to the document's truncation.
        #[arg(long)]
        arity: Option<usize>,
        /// Retract to transfer along; defaults to the document's own, else `auto`.
        #[arg(long, value_enum)]
        retract: Option<RetractArg>,
        /// Write the input together with the transferred data to this file.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run every checker on a seeded random corpus and under sign mutations.
    Selftest {
        #[arg(long, default_value_t = 25)]
        corpus_size: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 5)]
        arity: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Kernels,
    Hpl,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum RetractArg {
    Auto,
    Document,
}

fn load(path: &Path) -> Result<Document, InputError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| InputError { location: path.display().to_string(), message: e.to_string() })?;
    parse_document(&text)
}

fn run(cli: Cli) -> Result<Outcome, InputError> {
    match cli.command {
        Command::Check { file } => commands::check(&load(&file)?),
        Command::Transfer { file, method, arity, retract, output } => {
            let method = match method {
                MethodArg::Kernels => Method::Kernels,
                MethodArg::Hpl => Method::Hpl,
                MethodArg::Both => Method::Both,
            };
            let retract = retract.map(|r| match r {
                RetractArg::Auto => RetractSource::Auto,
                RetractArg::Document => RetractSource::Document,
            });
            let outcome = commands::transfer(&load(&file)?, TransferOptions { method, arity, retract })?;
            if let (Some(path), Some(doc)) = (output, &outcome.document) {
                std::fs::write(&path, doc.to_json())
                    .map_err(|e| InputError { location: path.display().to_string(), message: e.to_string() })?;
            }
            Ok(outcome)
        }
        Command::Selftest { corpus_size, seed, arity } => commands::selftest(corpus_size, seed, arity),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(outcome) => {
            print!("{}", outcome.report);
            ExitCode::from(outcome.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_INPUT as u8)
        }
    }
}
