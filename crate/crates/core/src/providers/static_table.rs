//! Expert-provided value tables keyed by path patterns.
//!
//! File format: a JSON array of `{"path": "<pattern>", "values": [...]}`
//! records. `*` in a pattern matches any run of characters.

use std::path::Path;

use regex::Regex;
use serde::Deserialize;
use serde_json::Value as Json;

use super::ProviderError;
use crate::decompose::Component;
use crate::value::Value;

#[derive(Debug, Deserialize)]
struct Row {
    path: String,
    values: Vec<Json>,
}

#[derive(Debug, Clone)]
struct Entry {
    pattern: Regex,
    values: Vec<Json>,
}

#[derive(Debug, Clone, Default)]
pub struct StaticTable {
    entries: Vec<Entry>,
}

impl StaticTable {
    pub fn from_json_str(text: &str, source: &str) -> Result<Self, ProviderError> {
        let rows: Vec<Json> = serde_json::from_str(text).map_err(|e| ProviderError::UnreadableFile {
            file: source.to_string(),
            message: e.to_string(),
        })?;
        let mut entries = Vec::with_capacity(rows.len());
        for (i, raw) in rows.into_iter().enumerate() {
            let row: Row = serde_json::from_value(raw).map_err(|_| ProviderError::NonRecordEntry {
                file: source.to_string(),
                index: Some(i),
            })?;
            entries.push(Entry {
                pattern: glob(&row.path),
                values: row.values,
            });
        }
        Ok(StaticTable { entries })
    }

    pub fn load(path: &Path) -> Result<Self, ProviderError> {
        let label = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|e| ProviderError::UnreadableFile {
            file: label.clone(),
            message: e.to_string(),
        })?;
        Self::from_json_str(&text, &label)
    }

    /// Builds a table from exact paths.
    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, Vec<Value>)>) -> Self {
        StaticTable {
            entries: pairs
                .into_iter()
                .map(|(p, vs)| Entry {
                    pattern: glob(p),
                    values: vs.iter().map(Value::to_json).collect(),
                })
                .collect(),
        }
    }

    /// Raw values of every entry whose pattern matches, in table order.
    pub fn lookup(&self, path: &str) -> Vec<&Json> {
        self.entries
            .iter()
            .filter(|e| e.pattern.is_match(path))
            .flat_map(|e| e.values.iter())
            .collect()
    }
}

fn glob(pattern: &str) -> Regex {
    let body = pattern
        .split('*')
        .map(regex::escape)
        .collect::<Vec<_>>()
        .join(".*");
    Regex::new(&format!("^{body}$")).expect("escaped pattern")
}

/// Table values for `c` that fit its kind and refinements; misfits are
/// dropped with a warning.
pub fn static_values(c: &Component, table: &StaticTable) -> Vec<Value> {
    let Some(kind) = c.primitive_kind() else {
        return Vec::new();
    };
    let mut out = Vec::new();
    for raw in table.lookup(c.path.as_str()) {
        match kind.coerce_json(raw) {
            Some(v) if c.accepts(&v) => {
                if !out.contains(&v) {
                    out.push(v);
                }
            }
            _ => log::warn!("static value {raw} does not fit {} ({kind})", c.path),
        }
    }
    out
}
