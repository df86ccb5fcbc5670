//! Primitive kinds and the primitive values that inhabit them.

use std::fmt;
use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

static UUID_RE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"^[0-9a-fA-F]{8}-[0-9a-fA-F]{4}-[0-9a-fA-F]{4}-[0-9a-fA-F]{4}-[0-9a-fA-F]{12}$")
        .unwrap()
});

// Lenient on the seconds field: mock dumps in the wild carry `19:34:17:00Z`.
static DATETIME_RE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"^\d{4}-\d{2}-\d{2}T\d{2}:\d{2}(:\d{2}){0,2}(\.\d+)?(Z|[+-]\d{2}:?\d{2})?$").unwrap()
});

/// The builtin scalar types of the specification language.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PrimitiveKind {
    Bool,
    Nat,
    Int,
    BigNat,
    BigInt,
    Float,
    String,
    #[serde(rename = "UUID")]
    Uuid,
    DateTime,
}

impl PrimitiveKind {
    pub const ALL: [PrimitiveKind; 9] = [
        PrimitiveKind::Bool,
        PrimitiveKind::Nat,
        PrimitiveKind::Int,
        PrimitiveKind::BigNat,
        PrimitiveKind::BigInt,
        PrimitiveKind::Float,
        PrimitiveKind::String,
        PrimitiveKind::Uuid,
        PrimitiveKind::DateTime,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PrimitiveKind::Bool => "Bool",
            PrimitiveKind::Nat => "Nat",
            PrimitiveKind::Int => "Int",
            PrimitiveKind::BigNat => "BigNat",
            PrimitiveKind::BigInt => "BigInt",
            PrimitiveKind::Float => "Float",
            PrimitiveKind::String => "String",
            PrimitiveKind::Uuid => "UUID",
            PrimitiveKind::DateTime => "DateTime",
        }
    }

    /// Resolves a source-level type name. `UUIDv4` is accepted as a synonym.
    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "Bool" => PrimitiveKind::Bool,
            "Nat" => PrimitiveKind::Nat,
            "Int" => PrimitiveKind::Int,
            "BigNat" => PrimitiveKind::BigNat,
            "BigInt" => PrimitiveKind::BigInt,
            "Float" => PrimitiveKind::Float,
            "String" => PrimitiveKind::String,
            "UUID" | "UUIDv4" => PrimitiveKind::Uuid,
            "DateTime" => PrimitiveKind::DateTime,
            _ => return None,
        })
    }

    pub fn is_numeric(self) -> bool {
        matches!(
            self,
            PrimitiveKind::Nat
                | PrimitiveKind::Int
                | PrimitiveKind::BigNat
                | PrimitiveKind::BigInt
                | PrimitiveKind::Float
        )
    }

    pub fn is_integral(self) -> bool {
        self.is_numeric() && self != PrimitiveKind::Float
    }

    pub fn is_unsigned(self) -> bool {
        matches!(self, PrimitiveKind::Nat | PrimitiveKind::BigNat)
    }

    pub fn is_textual(self) -> bool {
        matches!(
            self,
            PrimitiveKind::String | PrimitiveKind::Uuid | PrimitiveKind::DateTime
        )
    }

    /// True iff `v` is a well-formed inhabitant of this kind.
    pub fn admits(self, v: &Value) -> bool {
        match (self, v) {
            (PrimitiveKind::Bool, Value::Bool(_)) => true,
            (PrimitiveKind::Int | PrimitiveKind::BigInt, Value::Int(_)) => true,
            (PrimitiveKind::Nat | PrimitiveKind::BigNat, Value::Int(i)) => *i >= 0,
            (PrimitiveKind::Float, Value::Float(f)) => f.is_finite(),
            (PrimitiveKind::String, Value::Str(_)) => true,
            (PrimitiveKind::Uuid, Value::Str(s)) => UUID_RE.is_match(s),
            (PrimitiveKind::DateTime, Value::Str(s)) => DATETIME_RE.is_match(s),
            _ => false,
        }
    }

    /// Converts a loosely-typed JSON scalar into a value of this kind, or
    /// `None` when the JSON does not denote one.
    pub fn coerce_json(self, json: &serde_json::Value) -> Option<Value> {
        use serde_json::Value as J;
        let v = match (self, json) {
            (PrimitiveKind::Bool, J::Bool(b)) => Value::Bool(*b),
            (k, J::Number(n)) if k.is_integral() => Value::Int(n.as_i64()?),
            (PrimitiveKind::Float, J::Number(n)) => Value::Float(n.as_f64()?),
            (k, J::String(s)) if k.is_textual() => Value::Str(s.clone()),
            _ => return None,
        };
        self.admits(&v).then_some(v)
    }
}

impl fmt::Display for PrimitiveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A primitive value. Integral kinds share `Int`; textual kinds share `Str`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Bool(bool),
    Int(i64),
    Float(f64),
    Str(String),
}

impl Value {
    /// Canonical text used for ordering, dedup keys and suite files.
    pub fn canonical(&self) -> String {
        match self {
            Value::Bool(b) => b.to_string(),
            Value::Int(i) => i.to_string(),
            Value::Float(x) => format_float(*x),
            Value::Str(s) => serde_json::to_string(s).expect("string serialization"),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Value::Bool(b) => (*b).into(),
            Value::Int(i) => (*i).into(),
            Value::Float(x) => serde_json::Number::from_f64(*x)
                .map(serde_json::Value::Number)
                .unwrap_or(serde_json::Value::Null),
            Value::Str(s) => s.clone().into(),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Int(i) => Some(*i as f64),
            Value::Float(x) => Some(*x),
            _ => None,
        }
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            Value::Int(i) => Some(*i),
            _ => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            Value::Str(s) => Some(s),
            _ => None,
        }
    }

    /// Rendering for URL query strings and route templates: strings bare.
    pub fn plain(&self) -> String {
        match self {
            Value::Str(s) => s.clone(),
            other => other.canonical(),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical())
    }
}

pub(crate) fn format_float(x: f64) -> String {
    if x.is_finite() && x.fract() == 0.0 && x.abs() < 1e15 {
        format!("{x:.1}")
    } else {
        format!("{x}")
    }
}
