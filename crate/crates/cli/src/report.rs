use serde_json::{Map, Value};
use std::time::Duration;

/// Line-oriented `key: value` report ending in a `verdict:` line.
pub struct Report {
    command: String,
    fields: Vec<(String, Value)>,
    verdict: String,
    exit: i32,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report {
            command: command.to_string(),
            fields: Vec::new(),
            verdict: String::new(),
            exit: 0,
        }
    }

    pub fn field(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.fields.push((key.to_string(), Value::String(value.to_string())));
        self
    }

    pub fn list<S: ToString>(&mut self, key: &str, items: impl IntoIterator<Item = S>) -> &mut Self {
        let items = items.into_iter().map(|s| Value::String(s.to_string())).collect();
        self.fields.push((key.to_string(), Value::Array(items)));
        self
    }

    /// A definite answer exits 0, UNKNOWN exits 2.
    pub fn verdict(&mut self, verdict: impl ToString) -> &mut Self {
        self.verdict = verdict.to_string();
        self.exit = if self.verdict == "UNKNOWN" { 2 } else { 0 };
        self
    }

    pub fn exit_code(&self) -> i32 {
        self.exit
    }

    pub fn render(&self, elapsed: Duration, json: bool) -> String {
        let wall = format!("{:.3}", elapsed.as_secs_f64() * 1e3);
        if json {
            let mut obj = Map::new();
            obj.insert("command".into(), Value::String(self.command.clone()));
            for (k, v) in &self.fields {
                obj.insert(k.clone(), v.clone());
            }
            obj.insert("wall_ms".into(), Value::String(wall));
            obj.insert("verdict".into(), Value::String(self.verdict.clone()));
            return serde_json::to_string_pretty(&Value::Object(obj)).expect("json") + "\n";
        }
        let mut out = format!("command: {}\n", self.command);
        for (k, v) in &self.fields {
            match v {
                Value::Array(items) => {
                    out.push_str(&format!("{k}_count: {}\n", items.len()));
                    for item in items {
                        out.push_str(&format!("{k}: {}\n", item.as_str().unwrap_or_default()));
                    }
                }
                other => out.push_str(&format!("{k}: {}\n", other.as_str().unwrap_or_default())),
            }
        }
        out.push_str(&format!("wall_ms: {wall}\nverdict: {}\n", self.verdict));
        out
    }
}
