use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

/// Outcome of one command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: Vec<String>,
    pub status: Status,
    pub results: Value,
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl Report {
    pub fn new(status: Status, results: Value) -> Self {
        Self { command: std::env::args().collect(), status, results, tolerances: BTreeMap::new(), seed: None }
    }

    pub fn pass_if(ok: bool, results: Value) -> Self {
        Self::new(if ok { Status::Pass } else { Status::Fail }, results)
    }

    pub fn tolerance(mut self, name: &str, value: f64) -> Self {
        self.tolerances.insert(name.to_owned(), value);
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    /// Indented `key: value` lines; leaves are written in their JSON form so
    /// every number of the JSON report appears verbatim.
    pub fn to_human(&self) -> String {
        let mut out = String::new();
        writeln!(out, "command: {}", self.command.join(" ")).unwrap();
        writeln!(out, "status: {}", if self.passed() { "pass" } else { "fail" }).unwrap();
        if let Some(seed) = self.seed {
            writeln!(out, "seed: {seed}").unwrap();
        }
        if !self.tolerances.is_empty() {
            writeln!(out, "tolerances:").unwrap();
            for (k, v) in &self.tolerances {
                writeln!(out, "  {k}: {}", Value::from(*v)).unwrap();
            }
        }
        writeln!(out, "results:").unwrap();
        write_value(&mut out, &self.results, 1);
        out
    }
}

fn is_flat(v: &Value) -> bool {
    match v {
        Value::Array(items) => items.iter().all(|i| !i.is_object() && (!i.is_array() || is_flat_row(i))),
        Value::Object(_) => false,
        _ => true,
    }
}

fn is_flat_row(v: &Value) -> bool {
    v.as_array().is_some_and(|items| items.iter().all(|i| !i.is_array() && !i.is_object()))
}

fn write_value(out: &mut String, v: &Value, depth: usize) {
    let pad = "  ".repeat(depth);
    match v {
        Value::Object(map) => {
            for (k, item) in map {
                if is_flat(item) {
                    writeln!(out, "{pad}{k}: {item}").unwrap();
                } else {
                    writeln!(out, "{pad}{k}:").unwrap();
                    write_value(out, item, depth + 1);
                }
            }
        }
        Value::Array(items) => {
            for (i, item) in items.iter().enumerate() {
                if is_flat(item) {
                    writeln!(out, "{pad}[{i}]: {item}").unwrap();
                } else {
                    writeln!(out, "{pad}[{i}]:").unwrap();
                    write_value(out, item, depth + 1);
                }
            }
        }
        leaf => writeln!(out, "{pad}{leaf}").unwrap(),
    }
}
