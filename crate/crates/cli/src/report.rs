use std::fmt::Write as _;

use fhlab::addcat::Skeleton;
use serde::Serialize;
use serde_json::Value;

use crate::config::Task;

#[derive(Clone, Debug, Serialize)]
pub struct SkeletonInfo {
    pub p: u32,
    pub gens: Vec<String>,
    pub k: usize,
    pub objects: usize,
}

impl SkeletonInfo {
    pub fn of(sk: &Skeleton) -> Self {
        let spec = sk.spec();
        SkeletonInfo {
            p: spec.p,
            gens: spec.generators.iter().map(|g| g.to_string()).collect(),
            k: spec.k,
            objects: sk.objects().len(),
        }
    }
}

/// `ok`: everything was evaluated inside the skeleton. `virtual`: a formula
/// functor was evaluated at objects past `K`, listed in `objects`.
#[derive(Clone, Debug, Default, Serialize)]
pub struct Guard {
    pub status: &'static str,
    pub objects: Vec<String>,
}

impl Guard {
    pub fn ok() -> Self {
        Guard { status: "ok", objects: Vec::new() }
    }

    pub fn beyond(objects: Vec<String>) -> Self {
        if objects.is_empty() {
            Guard::ok()
        } else {
            Guard { status: "virtual", objects }
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Assertion {
    pub name: String,
    pub holds: bool,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

impl Assertion {
    pub fn new(name: impl Into<String>, holds: bool) -> Self {
        Assertion { name: name.into(), holds, detail: String::new() }
    }

    pub fn with(name: impl Into<String>, holds: bool, detail: impl Into<String>) -> Self {
        Assertion { name: name.into(), holds, detail: detail.into() }
    }
}

/// What a task computed, before it is wrapped into a report.
pub struct Outcome {
    pub skeleton: Option<SkeletonInfo>,
    pub guard: Guard,
    pub assertions: Vec<Assertion>,
    pub result: Value,
}

#[derive(Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub version: &'static str,
    pub task: Task,
    pub seed: u64,
    pub skeleton: Option<SkeletonInfo>,
    pub guard: Guard,
    pub ok: bool,
    pub assertions: Vec<Assertion>,
    pub failures: Vec<String>,
    pub result: Value,
    pub timestamp: u64,
}

impl Report {
    pub fn new(task: Task, seed: u64, out: Outcome) -> Self {
        let failures: Vec<String> = out.assertions.iter().filter(|a| !a.holds).map(|a| a.name.clone()).collect();
        let timestamp = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map_or(0, |d| d.as_secs());
        Report {
            tool: "fhlab",
            version: env!("CARGO_PKG_VERSION"),
            task,
            seed,
            skeleton: out.skeleton,
            guard: out.guard,
            ok: failures.is_empty(),
            assertions: out.assertions,
            failures,
            result: out.result,
            timestamp,
        }
    }

    /// The text table, derived from the JSON form.
    pub fn text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "task      {}", self.task.name());
        if let Some(sk) = &self.skeleton {
            let _ = writeln!(s, "skeleton  p={} gens=[{}] K={} ({} objects)", sk.p, sk.gens.join(", "), sk.k, sk.objects);
        }
        let _ = write!(s, "guard     {}", self.guard.status);
        if !self.guard.objects.is_empty() {
            let _ = write!(s, " at {}", self.guard.objects.join(", "));
        }
        s.push('\n');
        if let Value::Object(m) = &self.result {
            for (k, v) in m {
                let _ = writeln!(s, "{k:<24}{}", compact(v));
            }
        }
        for a in &self.assertions {
            let mark = if a.holds { "PASS" } else { "FAIL" };
            let _ = write!(s, "{mark}  {}", a.name);
            if !a.detail.is_empty() {
                let _ = write!(s, ": {}", a.detail);
            }
            s.push('\n');
        }
        s
    }
}

fn compact(v: &Value) -> String {
    let t = v.to_string();
    if t.len() > 100 {
        format!("{}...", &t[..t.char_indices().take_while(|(i, _)| *i < 97).last().map_or(0, |(i, c)| i + c.len_utf8())])
    } else {
        t
    }
}
