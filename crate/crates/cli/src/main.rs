//! `protofsm` — infer, evaluate, diff, determinize, and seed-convert
//! protocol state machines.

mod commands;
mod config;
mod dot;
mod table;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use protofsm::embed::EmbedError;
use protofsm::eval::EvalError;
use protofsm::filter::FilterError;
use protofsm::fsm::FsmError;
use protofsm::infer::InferError;
use protofsm::llm::LlmError;
use protofsm::seeds::SeedError;

/// Exit-code contract: 0 success, 2 config error, 3 repository/filter
/// error, 4 inference failure, 5 backend/credential error, 6
/// evaluation/input error.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Repo(String),
    Inference(String),
    Backend(String),
    Input(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Repo(_) => 3,
            CliError::Inference(_) => 4,
            CliError::Backend(_) => 5,
            CliError::Input(_) => 6,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Config(m)
            | CliError::Repo(m)
            | CliError::Inference(m)
            | CliError::Backend(m)
            | CliError::Input(m) => m,
        }
    }
}

impl From<FilterError> for CliError {
    fn from(e: FilterError) -> Self {
        CliError::Repo(e.to_string())
    }
}

impl From<FsmError> for CliError {
    fn from(e: FsmError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<SeedError> for CliError {
    fn from(e: SeedError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<LlmError> for CliError {
    fn from(e: LlmError) -> Self {
        match e {
            LlmError::Config(m) => CliError::Config(m),
            other => CliError::Backend(other.to_string()),
        }
    }
}

impl From<EmbedError> for CliError {
    fn from(e: EmbedError) -> Self {
        match e {
            EmbedError::Io { .. } | EmbedError::IndexFormat(_) => CliError::Input(e.to_string()),
            other => CliError::Backend(other.to_string()),
        }
    }
}

impl From<InferError> for CliError {
    fn from(e: InferError) -> Self {
        match e {
            InferError::Config(m) | InferError::Template(m) => CliError::Config(m),
            InferError::Llm(inner) => inner.into(),
            InferError::Embed(inner) => inner.into(),
            InferError::Filter(inner) => inner.into(),
            InferError::Segment(inner) => CliError::Config(inner.to_string()),
            stage_failed @ InferError::StageFailed { .. } => {
                CliError::Inference(stage_failed.to_string())
            }
        }
    }
}

#[derive(Parser)]
#[command(
    name = "protofsm",
    version,
    about = "Protocol state machine inference and analysis pipeline"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    /// Run configuration file (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Override the configured output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Locate the state-machine module, segment and embed it, and persist
    /// the vector index.
    Index {
        #[command(flatten)]
        common: ConfigArgs,
        /// Also write a chunk manifest for debugging.
        #[arg(long)]
        dump_chunks: bool,
    },
    /// Run the staged inference and write fsm.json plus report.json.
    Infer {
        #[command(flatten)]
        common: ConfigArgs,
        /// Override the chat backend (remote or fixture).
        #[arg(long)]
        backend: Option<String>,
        /// Fixture book for the fixture backend.
        #[arg(long)]
        fixtures: Option<PathBuf>,
        /// Override consensus iterations.
        #[arg(long)]
        iterations: Option<u32>,
        /// Build the index first instead of loading it.
        #[arg(long)]
        build_index: bool,
        /// Load the index from this path instead of the default.
        #[arg(long)]
        index: Option<PathBuf>,
        /// Also emit a DOT rendering of the inferred FSM.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Score an inferred FSM against a ground-truth file.
    Eval {
        /// Inferred FSM document.
        #[arg(long)]
        fsm: PathBuf,
        /// Ground-truth FSM document (may carry an "aliases" map).
        #[arg(long)]
        ground_truth: PathBuf,
        /// Write eval.json here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare two FSM documents.
    Diff {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        /// Write diff.json here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Determinize an FSM document via subset construction.
    Determinize {
        #[arg(long)]
        fsm: PathBuf,
        /// Output document path (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also emit a DOT rendering of the result.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Derive transition-covering seed files for a stateful fuzzer.
    Seeds {
        #[arg(long)]
        fsm: PathBuf,
        /// Directory of payload templates, one file per message type.
        #[arg(long)]
        templates: PathBuf,
        /// Output directory for seed files and the manifest.
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Index { common, dump_chunks } => commands::index::run(&common, dump_chunks),
        Command::Infer {
            common,
            backend,
            fixtures,
            iterations,
            build_index,
            index,
            dot,
        } => commands::infer::run(
            &common,
            backend.as_deref(),
            fixtures.as_deref(),
            iterations,
            build_index,
            index.as_deref(),
            dot.as_deref(),
        ),
        Command::Eval {
            fsm,
            ground_truth,
            out,
        } => commands::eval::run(&fsm, &ground_truth, out.as_deref()),
        Command::Diff { a, b, out } => commands::diff::run(&a, &b, out.as_deref()),
        Command::Determinize { fsm, out, dot } => {
            commands::determinize::run(&fsm, out.as_deref(), dot.as_deref())
        }
        Command::Seeds {
            fsm,
            templates,
            out,
        } => commands::seeds::run(&fsm, &templates, &out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(error) => {
            eprintln!("error: {}", error.message());
            ExitCode::from(error.exit_code())
        }
    }
}
