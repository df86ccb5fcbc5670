use chrono::DateTime;
use rand::distr::Distribution;
use rand::{Rng, RngExt};

use super::{ProviderError, SeededRng};
use crate::decompose::{Component, ComponentKind};
use crate::spec::Refinement;
use crate::value::{PrimitiveKind, Value};

const ATTEMPTS_PER_VALUE: usize = 1000;
const NAT_WINDOW: (f64, f64) = (0.0, 10_000.0);
const INT_WINDOW: (f64, f64) = (-10_000.0, 10_000.0);
const WINDOW_WIDTH: f64 = 20_000.0;
const LATEST_EPOCH_SECS: i64 = 4_102_444_800; // 2100-01-01
const ALNUM: &[u8] = b"abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789";

/// Up to `n` distinct values for `c`: kind boundary values first, then
/// uniform draws from the stream keyed by the component's path. Every value
/// passes the component's refinements. Finite domains (Bool, synthetic
/// components) may yield fewer than `n`.
pub fn random_values(c: &Component, rng: &SeededRng, n: usize) -> Result<Vec<Value>, ProviderError> {
    let kind = match &c.kind {
        ComponentKind::Primitive(k) => *k,
        _ => return Ok(c.values.iter().take(n).cloned().collect()),
    };
    let mut stream = rng.stream_for(c.path.as_str());
    let sampler = Sampler::new(kind, &c.refinements);

    let mut out: Vec<Value> = Vec::new();
    for b in boundary_values(kind) {
        if out.len() < n && c.accepts(&b) && !out.contains(&b) {
            out.push(b);
        }
    }
    'slots: while out.len() < n {
        for _ in 0..ATTEMPTS_PER_VALUE {
            let v = sampler.draw(&mut stream);
            if c.accepts(&v) && !out.contains(&v) {
                out.push(v);
                continue 'slots;
            }
        }
        break;
    }
    if out.is_empty() {
        return Err(ProviderError::RefinementUnsatisfiable(c.path.to_string()));
    }
    Ok(out)
}

pub(crate) fn boundary_values(kind: PrimitiveKind) -> Vec<Value> {
    match kind {
        PrimitiveKind::Bool => vec![Value::Bool(false), Value::Bool(true)],
        PrimitiveKind::Float => vec![Value::Float(0.0)],
        k if k.is_integral() => vec![Value::Int(0)],
        PrimitiveKind::String => vec![Value::Str(String::new())],
        PrimitiveKind::Uuid => vec![Value::Str("00000000-0000-0000-0000-000000000000".into())],
        PrimitiveKind::DateTime => vec![Value::Str("1970-01-01T00:00:00Z".into())],
        _ => unreachable!("all kinds covered"),
    }
}

enum Sampler {
    Bool,
    Integral(i64, i64),
    Float(f64, f64),
    Text(Option<rand_regex::Regex>),
    Uuid,
    DateTime,
}

impl Sampler {
    fn new(kind: PrimitiveKind, refinements: &[Refinement]) -> Self {
        match kind {
            PrimitiveKind::Bool => Sampler::Bool,
            k if k.is_numeric() => {
                let integral = k.is_integral();
                let default = if k.is_unsigned() { NAT_WINDOW } else { INT_WINDOW };
                let (lo, hi) = numeric_window(default, refinements, if integral { 1.0 } else { 1e-9 });
                if integral {
                    Sampler::Integral(lo.ceil() as i64, hi.floor() as i64)
                } else {
                    Sampler::Float(lo, hi)
                }
            }
            PrimitiveKind::Uuid => Sampler::Uuid,
            PrimitiveKind::DateTime => Sampler::DateTime,
            _ => Sampler::Text(refinements.iter().find_map(|r| match r {
                Refinement::Regex(re) => rand_regex::Regex::compile(re.source(), 8).ok(),
                _ => None,
            })),
        }
    }

    fn draw<R: Rng>(&self, rng: &mut R) -> Value {
        match self {
            Sampler::Bool => Value::Bool(rng.random()),
            Sampler::Integral(lo, hi) if lo <= hi => Value::Int(rng.random_range(*lo..=*hi)),
            Sampler::Integral(lo, _) => Value::Int(*lo),
            Sampler::Float(lo, hi) if lo < hi => {
                // Two decimals keep values readable and exactly representable in wire text.
                let x: f64 = rng.random_range(*lo..=*hi);
                Value::Float(((x * 100.0).round() / 100.0).clamp(*lo, *hi))
            }
            Sampler::Float(lo, _) => Value::Float(*lo),
            Sampler::Text(Some(re)) => Value::Str(re.sample(rng)),
            Sampler::Text(None) => {
                let len = rng.random_range(1..=12);
                Value::Str(
                    (0..len)
                        .map(|_| ALNUM[rng.random_range(0..ALNUM.len())] as char)
                        .collect(),
                )
            }
            Sampler::Uuid => {
                let mut b: [u8; 16] = rng.random();
                b[6] = (b[6] & 0x0f) | 0x40;
                b[8] = (b[8] & 0x3f) | 0x80;
                let h = hex::encode(b);
                Value::Str(format!(
                    "{}-{}-{}-{}-{}",
                    &h[0..8],
                    &h[8..12],
                    &h[12..16],
                    &h[16..20],
                    &h[20..32]
                ))
            }
            Sampler::DateTime => {
                let secs = rng.random_range(0..LATEST_EPOCH_SECS);
                let dt = DateTime::from_timestamp(secs, 0).expect("in range");
                Value::Str(dt.format("%Y-%m-%dT%H:%M:%SZ").to_string())
            }
        }
    }
}

/// Intersects the default sampling window with every numeric refinement.
/// A window pushed entirely outside the default is re-anchored at the
/// refinement's bound.
fn numeric_window(default: (f64, f64), refinements: &[Refinement], step: f64) -> (f64, f64) {
    let mut lo: Option<f64> = None;
    let mut hi: Option<f64> = None;
    for r in refinements {
        let (rlo, rhi) = r.interval(step);
        if let Some(x) = rlo {
            lo = Some(lo.map_or(x, |l: f64| l.max(x)));
        }
        if let Some(x) = rhi {
            hi = Some(hi.map_or(x, |h: f64| h.min(x)));
        }
    }
    match (lo, hi) {
        (Some(l), Some(h)) => (l, h),
        (Some(l), None) => {
            let lo = l.max(default.0);
            (lo, if lo > default.1 { lo + WINDOW_WIDTH } else { default.1 })
        }
        (None, Some(h)) => {
            let hi = h.min(default.1);
            (if hi < default.0 { hi - WINDOW_WIDTH } else { default.0 }, hi)
        }
        (None, None) => default,
    }
}
