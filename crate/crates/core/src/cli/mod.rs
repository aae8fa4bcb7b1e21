//! Command-line front end: task files in, JSON reports out.
//!
//! Exit codes: 0 when every certificate passes, 1 when a property fails, 2 on usage
//! or input errors.

pub mod run;
pub mod task;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::Value;

use crate::error::{Error, Result};

pub use run::{filtered_module, run, Report, TOOL, VERSION};
pub use task::{corpus_root, default_window, parse_spec, Command, EmbeddingSpec, ModuleSource, MorphismSpec, TaskSpec, Tier, CORPUS_ENV};

#[derive(Debug, Parser)]
#[command(name = "ctrlmod", version, about = "Window certificates for controlled modules over group rings")]
pub struct Cli {
    #[command(subcommand)]
    pub command: CliCommand,
}

#[derive(Debug, Subcommand)]
pub enum CliCommand {
    /// Run one task file and print its report.
    Run(RunArgs),
    /// Inspect the module corpus.
    Corpus {
        #[command(subcommand)]
        action: CorpusAction,
    },
}

#[derive(Debug, Subcommand)]
pub enum CorpusAction {
    /// Print the corpus manifest.
    List,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
}

#[derive(Debug, clap::Args)]
pub struct RunArgs {
    /// Task file (JSON).
    pub task: PathBuf,
    /// Override the window radius.
    #[arg(long)]
    pub window: Option<u32>,
    /// Override the sampling seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads for sampled checks.
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Write the resolution chain of a resolve task to this path.
    #[arg(long)]
    pub emit_chain: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Record wall-clock timings in the report.
    #[arg(long)]
    pub timings: bool,
}

/// Reads the corpus manifest.
pub fn corpus_manifest(root: &Path) -> Result<Value> {
    let path = root.join("manifest.json");
    let text = std::fs::read_to_string(&path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::InvalidTask(format!("{}: {e}", path.display())))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn run_command(args: &RunArgs) -> Result<Report> {
    if let Some(j) = args.jobs {
        // Ignored when a pool already exists, as in tests running several tasks.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(j.max(1)).build_global();
    }
    let mut task = parse_spec(&args.task)?;
    if let Some(w) = args.window {
        task.window = Some(w);
    }
    if let Some(s) = args.seed {
        task.seed = s;
    }
    task.validate()?;
    let report = run(&task, args.timings)?;
    let text = report.to_pretty();
    match args.output.as_ref().or(task.output.as_ref().map(PathBuf::from).as_ref()) {
        Some(p) => write_text(p, &text)?,
        None => {
            let _ = std::io::stdout().write_all(text.as_bytes());
        }
    }
    if let (Some(p), Some(chain)) = (&args.emit_chain, &report.chain) {
        write_text(p, &(serde_json::to_string_pretty(chain).expect("chain serializes") + "\n"))?;
    }
    Ok(report)
}

/// Parses `args` (including the program name) and runs; returns the exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let outcome = match &cli.command {
        CliCommand::Run(a) => run_command(a).map(|r| r.exit_code()),
        CliCommand::Corpus { action: CorpusAction::List } => corpus_manifest(&corpus_root()).map(|m| {
            println!("{}", serde_json::to_string_pretty(&m).expect("manifest serializes"));
            0
        }),
    };
    outcome.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        2
    })
}
