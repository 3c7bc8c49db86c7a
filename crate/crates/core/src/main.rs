use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use twistres::cli::{execute, Format, Overrides, RunOptions};

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Text,
    Json,
}

/// Twisted tensor products, their resolutions, and the homology they compute.
#[derive(Parser)]
#[command(version, about)]
struct Args {
    /// Problem file (TOML); without it only --task entries run.
    #[arg(long, value_name = "PATH")]
    input: Option<PathBuf>,
    /// Task to run, e.g. preset:weyl or hochschild:PW; repeatable, replaces the file's list.
    #[arg(long = "task", value_name = "NAME")]
    tasks: Vec<String>,
    /// Truncation degree N for exactness windows and cohomology.
    #[arg(long, value_name = "INT")]
    cutoff: Option<u32>,
    /// Seed for the randomized samples.
    #[arg(long, value_name = "INT")]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value = "text")]
    format: OutputFormat,
    /// Add per-task wall-clock times to the report.
    #[arg(long)]
    timings: bool,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let text = match &args.input {
        Some(p) => match std::fs::read_to_string(p) {
            Ok(t) => Some(t),
            Err(e) => {
                eprintln!("error: cannot read {}: {e}", p.display());
                return ExitCode::from(2);
            }
        },
        None => None,
    };
    let ov = Overrides { tasks: args.tasks, cutoff: args.cutoff, seed: args.seed };
    let format = match args.format {
        OutputFormat::Text => Format::Text,
        OutputFormat::Json => Format::Json,
    };
    let (out, code) = execute(text.as_deref(), &ov, format, RunOptions { timings: args.timings });
    if code == 2 {
        eprint!("{out}");
    } else {
        let _ = std::io::stdout().write_all(out.as_bytes());
    }
    ExitCode::from(code as u8)
}
