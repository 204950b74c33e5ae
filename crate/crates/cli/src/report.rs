use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{Map, Value};

/// Output of one command. Field names are stable; `--format structured`
/// prints this struct as JSON.
#[derive(Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub inputs: BTreeMap<String, String>,
    pub verdict: String,
    pub details: Map<String, Value>,
    /// Re-checkable text artifacts (certificates, witnesses, traces) in the
    /// library's file formats.
    pub artifacts: BTreeMap<String, String>,
    pub timing_ms: f64,
    pub version: String,
}

impl Report {
    pub fn new(command: &str) -> Report {
        Report {
            command: command.into(),
            inputs: BTreeMap::new(),
            verdict: String::new(),
            details: Map::new(),
            artifacts: BTreeMap::new(),
            timing_ms: 0.0,
            version: env!("CARGO_PKG_VERSION").into(),
        }
    }

    pub fn input(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.inputs.insert(key.into(), value.to_string());
        self
    }

    pub fn detail(&mut self, key: &str, value: impl Serialize) -> &mut Self {
        let v = serde_json::to_value(value).expect("report values serialize");
        self.details.insert(key.into(), v);
        self
    }

    pub fn artifact(&mut self, key: &str, text: String) -> &mut Self {
        self.artifacts.insert(key.into(), text);
        self
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "command: {}", self.command);
        for (k, v) in &self.inputs {
            let _ = writeln!(s, "input {k}: {v}");
        }
        let _ = writeln!(s, "verdict: {}", self.verdict);
        for (k, v) in &self.details {
            let shown = match v {
                Value::String(x) => x.clone(),
                other => other.to_string(),
            };
            let _ = writeln!(s, "{k}: {shown}");
        }
        let _ = writeln!(s, "time: {:.3} ms", self.timing_ms);
        let _ = writeln!(s, "version: {}", self.version);
        for (k, v) in &self.artifacts {
            let _ = writeln!(s, "--- {k} ---");
            s.push_str(v);
            if !v.ends_with('\n') {
                s.push('\n');
            }
        }
        s
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
