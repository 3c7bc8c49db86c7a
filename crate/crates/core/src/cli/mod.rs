//! Batch driver: a problem file in, a report out.

mod checks;
pub mod config;
mod presets;
pub mod report;
mod run;

#[cfg(test)]
mod tests;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

pub use config::{parse_config, Preset, ProblemConfig, Task, PRESET_NAMES};
pub use report::{Check, ConfigEcho, DimRow, DimTable, Report, TaskRecord, TaskStatus};

use crate::Error;

pub const TOOL: &str = env!("CARGO_PKG_NAME");
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, Default)]
pub struct RunOptions {
    /// Record wall-clock time per task (makes reports non-reproducible).
    pub timings: bool,
}

fn echo(cfg: &ProblemConfig) -> ConfigEcho {
    ConfigEcho {
        field: cfg.field.characteristic(),
        seed: cfg.seed,
        cutoff: cfg.cutoff,
        algebras: cfg.algebras.iter().map(|(n, a)| format!("{n} = {} ({})", a.algebra.name(), a.kind)).collect(),
        twists: cfg.twists.iter().map(|(n, t)| format!("{n} = {} on {} ⊗ {}", t.kind, t.left, t.right)).collect(),
        resolutions: cfg
            .resolutions
            .iter()
            .map(|(n, r)| {
                let lift = r.lift.as_ref().map_or(String::new(), |(t, s)| {
                    format!(", {} lift of {t}", if *s == crate::resolutions::LiftSide::Left { "left" } else { "right" })
                });
                format!("{n} = {} of {}{lift}", r.family.name(), r.algebra)
            })
            .collect(),
        products: cfg
            .products
            .iter()
            .map(|(n, p)| match p {
                config::ProductDef::Twisted { bimodule, left, right, twist, .. } => {
                    format!("{n} = {} product of {left} and {right} under {twist}", if *bimodule { "bimodule" } else { "one-sided" })
                }
                config::ProductDef::OreModule { base, var, .. } => format!("{n} = ore module resolution over {base}[{var}; δ]"),
            })
            .collect(),
        tasks: cfg.tasks.iter().map(|t| t.to_string()).collect(),
    }
}

fn panic_message(p: Box<dyn std::any::Any + Send>) -> String {
    p.downcast_ref::<&str>()
        .map(|s| s.to_string())
        .or_else(|| p.downcast_ref::<String>().cloned())
        .unwrap_or_else(|| "unknown panic".into())
}

/// Runs every task in order. Failures become task records; a task whose prerequisites (twist
/// check, resolution verification, product construction) failed earlier is skipped.
pub fn run(cfg: &ProblemConfig, opts: RunOptions) -> Report {
    let mut session = run::Session::new(cfg);
    let mut tasks = Vec::new();
    for task in &cfg.tasks {
        let mut rec = TaskRecord::new(task.to_string());
        if let Some(reason) = session.blocked(task) {
            rec.status = TaskStatus::Skipped;
            rec.message = Some(reason);
            tasks.push(rec);
            continue;
        }
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(|| match task {
            Task::Preset(p) => presets::run_preset(p, &mut rec, cfg.seed),
            _ => session.run_task(task, &mut rec),
        }));
        let error = match outcome {
            Ok(Ok(())) => None,
            Ok(Err(e)) => Some(e.to_string()),
            Err(p) => Some(format!("internal error: {}", panic_message(p))),
        };
        rec.finish(error);
        if opts.timings {
            rec.timing_ms = Some(start.elapsed().as_millis() as u64);
        }
        if rec.status == TaskStatus::Fail {
            session.mark_failed(task);
        }
        tasks.push(rec);
    }
    let status = if tasks.iter().any(|t| matches!(t.status, TaskStatus::Fail | TaskStatus::Skipped)) {
        TaskStatus::Fail
    } else if tasks.iter().any(|t| t.status == TaskStatus::Unstable) {
        TaskStatus::Unstable
    } else {
        TaskStatus::Pass
    };
    Report { tool: TOOL.into(), version: VERSION.into(), config: echo(cfg), tasks, status }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Text,
    Json,
}

/// Command-line overrides applied on top of the problem file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub tasks: Vec<String>,
    pub cutoff: Option<u32>,
    pub seed: Option<u64>,
}

/// Parses `text` (if any), applies the overrides, and validates the resulting task list.
pub fn load(text: Option<&str>, ov: &Overrides) -> Result<ProblemConfig, Error> {
    let mut cfg = match text {
        Some(t) => parse_config(t)?,
        None => ProblemConfig::default(),
    };
    if let Some(c) = ov.cutoff {
        if c == 0 {
            return Err(Error::Validation("cutoff must be at least 1".into()));
        }
        cfg.cutoff = c;
    }
    if let Some(s) = ov.seed {
        cfg.seed = s;
    }
    if !ov.tasks.is_empty() {
        cfg.tasks = ov
            .tasks
            .iter()
            .map(|s| {
                let t = Task::parse(s)?;
                config::check_target(&t, &cfg.twists, &cfg.resolutions, &cfg.products)?;
                Ok(t)
            })
            .collect::<Result<_, Error>>()?;
    }
    Ok(cfg)
}

/// Renders the report; returns it with the process exit code (2 for configuration errors).
pub fn execute(text: Option<&str>, ov: &Overrides, format: Format, opts: RunOptions) -> (String, i32) {
    match load(text, ov) {
        Err(e) => (format!("error: {e}\n"), 2),
        Ok(cfg) => {
            let report = run(&cfg, opts);
            let out = match format {
                Format::Text => report.to_text(),
                Format::Json => report.to_json(),
            };
            (out, report.exit_code())
        }
    }
}
