//! Mock data dumps: ingestion, prompt rendering and direct value extraction.

use std::path::Path;

use serde_json::{Map, Value as Json};

use super::ProviderError;
use crate::decompose::Component;
use crate::value::Value;

#[derive(Debug, Clone, PartialEq)]
pub struct MockRecord {
    pub source: String,
    pub fields: Map<String, Json>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct MockDataset {
    pub records: Vec<MockRecord>,
}

impl MockDataset {
    /// Parses one dump: a JSON array of flat objects with primitive values.
    pub fn from_json_str(text: &str, source: &str) -> Result<Self, ProviderError> {
        let parsed: Json = serde_json::from_str(text).map_err(|e| ProviderError::UnreadableFile {
            file: source.to_string(),
            message: e.to_string(),
        })?;
        let Json::Array(entries) = parsed else {
            return Err(ProviderError::NonRecordEntry {
                file: source.to_string(),
                index: None,
            });
        };
        let mut records = Vec::with_capacity(entries.len());
        for (i, entry) in entries.into_iter().enumerate() {
            let bad = || ProviderError::NonRecordEntry {
                file: source.to_string(),
                index: Some(i),
            };
            let Json::Object(fields) = entry else {
                return Err(bad());
            };
            let flat = fields.iter().all(|(k, v)| {
                !k.is_empty() && matches!(v, Json::Bool(_) | Json::Number(_) | Json::String(_))
            });
            if !flat {
                return Err(bad());
            }
            records.push(MockRecord {
                source: source.to_string(),
                fields,
            });
        }
        Ok(MockDataset { records })
    }

    pub fn merge(&mut self, other: MockDataset) {
        self.records.extend(other.records);
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// The records as a pretty JSON array, in ingestion order, labels omitted.
    pub fn render(&self) -> String {
        let arr: Vec<Json> = self
            .records
            .iter()
            .map(|r| Json::Object(r.fields.clone()))
            .collect();
        serde_json::to_string_pretty(&arr).expect("json")
    }
}

/// Reads and unions every record file.
pub fn ingest_mock_data<P: AsRef<Path>>(files: &[P]) -> Result<MockDataset, ProviderError> {
    let mut all = MockDataset::default();
    for f in files {
        let f = f.as_ref();
        let label = f.display().to_string();
        let text = std::fs::read_to_string(f).map_err(|e| ProviderError::UnreadableFile {
            file: label.clone(),
            message: e.to_string(),
        })?;
        all.merge(MockDataset::from_json_str(&text, &label)?);
    }
    Ok(all)
}

/// Values from record fields named like the component's last field
/// (case-insensitive, the parameter name for a bare primitive parameter) that fit the component's kind and refinements.
pub fn mock_values(c: &Component, mock: &MockDataset) -> Vec<Value> {
    if c.kind.is_synthetic() {
        return Vec::new();
    }
    let Some(kind) = c.primitive_kind() else {
        return Vec::new();
    };
    // A primitive parameter has no field segment; its name plays that role.
    let field = c.path.last_field().unwrap_or(c.path.root());
    let mut out: Vec<Value> = Vec::new();
    for r in &mock.records {
        for (k, v) in &r.fields {
            if !k.eq_ignore_ascii_case(field) {
                continue;
            }
            if let Some(val) = kind.coerce_json(v) {
                if c.accepts(&val) && !out.contains(&val) {
                    out.push(val);
                }
            }
        }
    }
    out
}
