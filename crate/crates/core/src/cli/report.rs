//! Task records and their two renderings. Text and JSON are produced from the same structs, so
//! they carry the same content.

use std::fmt::Write as _;

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TaskStatus {
    Pass,
    Fail,
    /// Every check passed but some truncated quantity did not stabilize.
    Unstable,
    /// Not run because a task it depends on failed.
    Skipped,
}

impl TaskStatus {
    fn tag(self) -> &'static str {
        match self {
            TaskStatus::Pass => "PASS",
            TaskStatus::Fail => "FAIL",
            TaskStatus::Unstable => "UNSTABLE",
            TaskStatus::Skipped => "SKIPPED",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DimRow {
    /// Homological degree.
    pub n: usize,
    /// Internal degree (weight), when the table is split by it.
    pub degree: Option<i64>,
    pub dim: usize,
    /// `exact`, `stable`, `unstable`, or `window<=W` for truncated exactness tables.
    pub stability: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DimTable {
    pub title: String,
    pub rows: Vec<DimRow>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TaskRecord {
    pub task: String,
    pub status: TaskStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
    pub checks: Vec<Check>,
    pub tables: Vec<DimTable>,
    pub violations: Vec<String>,
    pub notes: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<u64>,
}

/// Violations kept per record; the count of dropped ones is noted.
const MAX_VIOLATIONS: usize = 20;

impl TaskRecord {
    pub fn new(task: impl Into<String>) -> Self {
        TaskRecord {
            task: task.into(),
            status: TaskStatus::Pass,
            message: None,
            checks: Vec::new(),
            tables: Vec::new(),
            violations: Vec::new(),
            notes: Vec::new(),
            timing_ms: None,
        }
    }

    pub fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) -> bool {
        self.checks.push(Check { name: name.into(), passed, detail: detail.into() });
        passed
    }

    pub fn table(&mut self, title: impl Into<String>, rows: Vec<DimRow>) {
        self.tables.push(DimTable { title: title.into(), rows });
    }

    pub fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    pub fn violations<I: IntoIterator<Item = String>>(&mut self, context: &str, items: I) {
        let mut dropped = 0;
        for v in items {
            if self.violations.len() < MAX_VIOLATIONS {
                self.violations.push(format!("{context}: {v}"));
            } else {
                dropped += 1;
            }
        }
        if dropped > 0 {
            self.note(format!("{dropped} further violations of {context} not listed"));
        }
    }

    /// Status from the recorded content: an error or failed check fails the task.
    pub fn finish(&mut self, error: Option<String>) {
        let failed = error.is_some() || self.checks.iter().any(|c| !c.passed);
        let unstable = self.tables.iter().flat_map(|t| &t.rows).any(|r| r.stability == "unstable");
        self.message = error.or(self.message.take());
        self.status = if failed {
            TaskStatus::Fail
        } else if unstable {
            TaskStatus::Unstable
        } else {
            TaskStatus::Pass
        };
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConfigEcho {
    pub field: u64,
    pub seed: u64,
    pub cutoff: u32,
    pub algebras: Vec<String>,
    pub twists: Vec<String>,
    pub resolutions: Vec<String>,
    pub products: Vec<String>,
    pub tasks: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub config: ConfigEcho,
    pub tasks: Vec<TaskRecord>,
    pub status: TaskStatus,
}

impl Report {
    /// 0 when every task passed or is only unstable, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.tasks.iter().all(|t| matches!(t.status, TaskStatus::Pass | TaskStatus::Unstable)) {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let c = &self.config;
        let _ = writeln!(s, "{} {}", self.tool, self.version);
        let _ = writeln!(s, "field: {}  seed: {}  cutoff: {}", c.field, c.seed, c.cutoff);
        for (what, items) in [("algebras", &c.algebras), ("twists", &c.twists), ("resolutions", &c.resolutions), ("products", &c.products)]
        {
            for i in items {
                let _ = writeln!(s, "{what}: {i}");
            }
        }
        let _ = writeln!(s, "tasks: {}", if c.tasks.is_empty() { "(none)".to_string() } else { c.tasks.join(", ") });
        for t in &self.tasks {
            let _ = writeln!(s);
            let _ = write!(s, "[{}] {}", t.status.tag(), t.task);
            if let Some(ms) = t.timing_ms {
                let _ = write!(s, "  ({ms} ms)");
            }
            let _ = writeln!(s);
            if let Some(m) = &t.message {
                let _ = writeln!(s, "  message: {m}");
            }
            for ch in &t.checks {
                let _ = writeln!(s, "  {} {}: {}", if ch.passed { "ok  " } else { "FAIL" }, ch.name, ch.detail);
            }
            for tab in &t.tables {
                let _ = writeln!(s, "  table {}", tab.title);
                let _ = writeln!(s, "    {:>3} {:>7} {:>6}  stability", "n", "degree", "dim");
                for r in &tab.rows {
                    let deg = r.degree.map_or("-".to_string(), |d| d.to_string());
                    let _ = writeln!(s, "    {:>3} {:>7} {:>6}  {}", r.n, deg, r.dim, r.stability);
                }
            }
            for v in &t.violations {
                let _ = writeln!(s, "  violation: {v}");
            }
            for n in &t.notes {
                let _ = writeln!(s, "  note: {n}");
            }
        }
        let _ = writeln!(s);
        let _ = writeln!(s, "status: {}", self.status.tag());
        s
    }
}
