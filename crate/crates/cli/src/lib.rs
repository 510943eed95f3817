//! Command line front end: reads a model description, runs the pipeline and
//! prints a text or JSON report.
//!
//! Exit codes: 0 success, 1 parse or schema error, 2 algebra validation
//! failure, 3 window too small.

use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

pub mod document;
pub mod error;
pub mod library;
pub mod pipeline;
pub mod render;

pub use document::{InputDocument, VariantSpec};
pub use error::{CliError, ExitStatus};
pub use pipeline::Settings;

#[derive(Debug, Parser)]
#[command(name = "bautlab", version, about = "Rational models of Baut(p) for principal bundles")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Validate,
    Report,
    Compare,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the model, the structure algebra and the twisting cochain.
    Validate(Args),
    /// Compute homology of the assembled model.
    Report(Args),
    /// Compare the simplified and the reduced full model.
    Compare(Args),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, clap::Args)]
pub struct Args {
    /// Input file (JSON, or TOML by extension), or the name of a built-in model.
    pub file: PathBuf,
    #[arg(long)]
    pub max_degree: Option<i32>,
    #[arg(long, value_enum)]
    pub variant: Option<VariantSpec>,
    /// Use reduced chains (the based variant).
    #[arg(long)]
    pub reduced: bool,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
    /// Extra degrees computed beyond --max-degree.
    #[arg(long, default_value = "+2", allow_hyphen_values = true)]
    pub trust_margin: i32,
}

impl Args {
    pub fn settings(&self) -> Settings {
        Settings {
            max_degree: self.max_degree,
            variant: self.variant,
            reduced: self.reduced,
            trust_margin: self.trust_margin,
        }
    }
}

/// What to print and how to exit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub status: ExitStatus,
}

fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

pub fn execute(command: &Command) -> Result<Outcome, CliError> {
    let (args, kind) = match command {
        Command::Validate(a) => (a, Kind::Validate),
        Command::Report(a) => (a, Kind::Report),
        Command::Compare(a) => (a, Kind::Compare),
    };
    let doc = document::load(&args.file)?;
    run(&doc, kind, &args.settings(), args.format)
}

pub fn run(doc: &InputDocument, kind: Kind, settings: &Settings, format: Format) -> Result<Outcome, CliError> {
    let start = Instant::now();
    let (mut stdout, status) = match kind {
        Kind::Validate => {
            let v = pipeline::validate(doc, settings)?;
            let status = if v.valid { ExitStatus::Ok } else { ExitStatus::Validation };
            (if format == Format::Json { json(&v) } else { render::validate(&v) }, status)
        }
        Kind::Report => {
            let r = pipeline::report(doc, settings)?;
            (if format == Format::Json { json(&r) } else { render::report(&r) }, r.status())
        }
        Kind::Compare => {
            let c = pipeline::compare(doc, settings)?;
            (if format == Format::Json { json(&c) } else { render::compare(&c) }, c.status())
        }
    };
    if format == Format::Text {
        stdout.push_str(&format!("time: {:.3} s\n", start.elapsed().as_secs_f64()));
    }
    Ok(Outcome { stdout, status })
}
