use std::fmt;

use regex::Regex;
use thiserror::Error;

use crate::value::{format_float, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompareOp {
    Lt,
    Le,
    Eq,
    Ge,
    Gt,
}

impl CompareOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CompareOp::Lt => "<",
            CompareOp::Le => "<=",
            CompareOp::Eq => "==",
            CompareOp::Ge => ">=",
            CompareOp::Gt => ">",
        }
    }

    fn holds(self, lhs: f64, rhs: f64) -> bool {
        match self {
            CompareOp::Lt => lhs < rhs,
            CompareOp::Le => lhs <= rhs,
            CompareOp::Eq => lhs == rhs,
            CompareOp::Ge => lhs >= rhs,
            CompareOp::Gt => lhs > rhs,
        }
    }
}

/// A numeric literal as written: `100n` (Nat), `100` / `100i` (Int), `1.5`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NumBound {
    Nat(i64),
    Int(i64),
    Float(f64),
}

impl NumBound {
    pub fn as_f64(self) -> f64 {
        match self {
            NumBound::Nat(i) | NumBound::Int(i) => i as f64,
            NumBound::Float(x) => x,
        }
    }
}

impl fmt::Display for NumBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NumBound::Nat(i) => write!(f, "{i}n"),
            NumBound::Int(i) => write!(f, "{i}"),
            NumBound::Float(x) => f.write_str(&format_float(*x)),
        }
    }
}

/// A regex refinement. Matching is whole-string.
#[derive(Debug, Clone)]
pub struct RegexPattern {
    source: String,
    compiled: Regex,
}

impl RegexPattern {
    pub fn new(source: &str) -> Result<Self, regex::Error> {
        let compiled = Regex::new(&format!("^(?:{source})$"))?;
        Ok(RegexPattern {
            source: source.to_string(),
            compiled,
        })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn is_match(&self, s: &str) -> bool {
        self.compiled.is_match(s)
    }
}

impl PartialEq for RegexPattern {
    fn eq(&self, other: &Self) -> bool {
        self.source == other.source
    }
}

/// A decidable predicate narrowing an alias's primitive value set.
#[derive(Debug, Clone, PartialEq)]
pub enum Refinement {
    Compare { op: CompareOp, bound: NumBound },
    Regex(RegexPattern),
}

#[derive(Debug, Error, PartialEq)]
pub enum RefinementError {
    #[error("refinement `{refinement}` cannot be evaluated on {value}")]
    KindMismatch { refinement: String, value: String },
}

impl Refinement {
    pub fn eval(&self, v: &Value) -> Result<bool, RefinementError> {
        match (self, v) {
            (Refinement::Compare { op, bound }, Value::Int(_) | Value::Float(_)) => {
                let lhs = v.as_f64().expect("numeric");
                Ok(op.holds(lhs, bound.as_f64()))
            }
            (Refinement::Regex(re), Value::Str(s)) => Ok(re.is_match(s)),
            _ => Err(RefinementError::KindMismatch {
                refinement: self.to_string(),
                value: v.canonical(),
            }),
        }
    }

    /// The numeric interval this refinement allows, as `(lo, hi)` inclusive
    /// bounds with `None` for unbounded. Strict bounds are tightened by
    /// `step` (1 for integral kinds).
    pub(crate) fn interval(&self, step: f64) -> (Option<f64>, Option<f64>) {
        match self {
            Refinement::Compare { op, bound } => {
                let b = bound.as_f64();
                match op {
                    CompareOp::Lt => (None, Some(b - step)),
                    CompareOp::Le => (None, Some(b)),
                    CompareOp::Eq => (Some(b), Some(b)),
                    CompareOp::Ge => (Some(b), None),
                    CompareOp::Gt => (Some(b + step), None),
                }
            }
            Refinement::Regex(_) => (None, None),
        }
    }
}

impl fmt::Display for Refinement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Refinement::Compare { op, bound } => write!(f, "$value {} {}", op.symbol(), bound),
            Refinement::Regex(re) => write!(f, "/{}/", re.source().replace('/', "\\/")),
        }
    }
}
