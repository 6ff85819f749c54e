use std::fmt::Write as _;
use std::time::Duration;

use serde::Serialize;
use serde_json::{json, Map, Value};
use tautring::algebra::CacheStats;

pub const SCHEMA: &str = "tautring-report/1";

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub detail: Value,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool) -> Self {
        Check {
            name: name.into(),
            passed,
            detail: Value::Null,
        }
    }

    pub fn with(mut self, detail: Value) -> Self {
        self.detail = detail;
        self
    }
}

/// What every subcommand produces. `meta` varies between runs; everything
/// else is a pure function of the inputs.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub command: String,
    pub inputs: Value,
    pub checks: Vec<Check>,
    pub summary: Map<String, Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub meta: Option<Value>,
}

impl Report {
    pub fn new(command: &str, inputs: Value) -> Self {
        Report {
            schema: SCHEMA,
            command: command.into(),
            inputs,
            checks: Vec::new(),
            summary: Map::new(),
            meta: None,
        }
    }

    pub fn check(&mut self, c: Check) -> &mut Self {
        self.checks.push(c);
        self
    }

    pub fn set(&mut self, key: &str, value: impl Serialize) -> &mut Self {
        self.summary
            .insert(key.into(), serde_json::to_value(value).expect("serializable"));
        self
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn finish(&mut self, elapsed: Duration, cache: Option<CacheStats>) {
        self.summary.insert("passed".into(), Value::Bool(self.passed()));
        let mut meta = json!({ "elapsed_ms": elapsed.as_millis() as u64 });
        if let Some(c) = cache {
            meta["cache"] = serde_json::to_value(c).expect("serializable");
        }
        self.meta = Some(meta);
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}  {}", self.command, compact(&self.inputs));
        for c in &self.checks {
            let mark = if c.passed { "PASS" } else { "FAIL" };
            if c.detail.is_null() {
                let _ = writeln!(out, "  [{mark}] {}", c.name);
            } else {
                let _ = writeln!(out, "  [{mark}] {}  {}", c.name, compact(&c.detail));
            }
        }
        let width = self.summary.keys().map(|k| k.len()).max().unwrap_or(0);
        for (k, v) in &self.summary {
            let _ = writeln!(out, "  {k:<width$}  {}", compact(v));
        }
        if let Some(meta) = &self.meta {
            let _ = writeln!(out, "  ({})", compact(meta));
        }
        out
    }
}

fn compact(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}
