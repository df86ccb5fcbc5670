//! Reconstruction of typed values from flat test assignments, and their
//! JSON wire form.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use serde_json::{Map, Value as Json};
use thiserror::Error;

use crate::combinator::TestCase;
use crate::decompose::{Component, ComponentContext, ComponentKind, ComponentPath, DecompositionConfig, Segment};
use crate::providers::{random_values, SeededRng};
use crate::spec::{ApiSig, ApiSpec, DeclBody, Refinement, TypeRef};
use crate::value::Value;

#[derive(Debug, Error, PartialEq)]
pub enum EmitError {
    #[error("no assignment for `{0}`")]
    MissingAssignment(String),
    #[error("value at `{0}` violates its refinement")]
    RefinementViolation(String),
    #[error("value at `{path}` is not a valid {expected}")]
    KindMismatch { path: String, expected: String },
    #[error("type `{0}` has no finite value")]
    NoTerminatingValue(String),
    #[error("unknown type `{0}`")]
    UnknownType(String),
}

#[derive(Debug, Clone, PartialEq)]
pub enum TypedValue {
    Prim(Value),
    Alias { name: String, inner: Box<TypedValue> },
    Entity { name: String, fields: Vec<(String, TypedValue)> },
    Variant { datatype: String, variant: String, fields: Vec<(String, TypedValue)> },
    List(Vec<TypedValue>),
    Map(Vec<(TypedValue, TypedValue)>),
}

impl TypedValue {
    /// Wire form: objects in field order, variants tagged with `"type"`,
    /// aliases transparent, maps as arrays of `[key, value]` pairs.
    pub fn to_json(&self) -> Json {
        match self {
            TypedValue::Prim(v) => v.to_json(),
            TypedValue::Alias { inner, .. } => inner.to_json(),
            TypedValue::Entity { fields, .. } => {
                Json::Object(fields.iter().map(|(k, v)| (k.clone(), v.to_json())).collect())
            }
            TypedValue::Variant { variant, fields, .. } => {
                let mut m = Map::new();
                m.insert("type".into(), Json::String(variant.clone()));
                for (k, v) in fields {
                    m.insert(k.clone(), v.to_json());
                }
                Json::Object(m)
            }
            TypedValue::List(xs) => Json::Array(xs.iter().map(TypedValue::to_json).collect()),
            TypedValue::Map(kvs) => Json::Array(
                kvs.iter()
                    .map(|(k, v)| Json::Array(vec![k.to_json(), v.to_json()]))
                    .collect(),
            ),
        }
    }

    /// Compact wire text.
    pub fn serialize(&self) -> String {
        self.to_json().to_string()
    }

    /// Field values only, e.g. `{-10, 32}`.
    pub fn compact(&self) -> String {
        fn join<'a>(it: impl Iterator<Item = &'a TypedValue>) -> String {
            it.map(TypedValue::compact).collect::<Vec<_>>().join(", ")
        }
        match self {
            TypedValue::Prim(v) => v.to_string(),
            TypedValue::Alias { inner, .. } => inner.compact(),
            TypedValue::Entity { fields, .. } => format!("{{{}}}", join(fields.iter().map(|f| &f.1))),
            TypedValue::Variant { variant, fields, .. } => {
                format!("{variant}{{{}}}", join(fields.iter().map(|f| &f.1)))
            }
            TypedValue::List(xs) => format!("[{}]", join(xs.iter())),
            TypedValue::Map(kvs) => format!(
                "[{}]",
                kvs.iter()
                    .map(|(k, v)| format!("{} => {}", k.compact(), v.compact()))
                    .collect::<Vec<_>>()
                    .join(", ")
            ),
        }
    }
}

impl fmt::Display for TypedValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let fields = |f: &mut fmt::Formatter<'_>, name: &str, fs: &[(String, TypedValue)]| {
            write!(f, "{name}{{")?;
            for (i, (k, v)) in fs.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{k}: {v}")?;
            }
            f.write_str("}")
        };
        match self {
            TypedValue::Prim(v) => write!(f, "{v}"),
            TypedValue::Alias { inner, .. } => write!(f, "{inner}"),
            TypedValue::Entity { name, fields: fs } => fields(f, name, fs),
            TypedValue::Variant { variant, fields: fs, .. } => fields(f, variant, fs),
            TypedValue::List(_) | TypedValue::Map(_) => f.write_str(&self.compact()),
        }
    }
}

/// Rebuilds typed values from test assignments, mirroring the decomposer's
/// traversal (including its depth bound) so every path lines up.
pub struct Reconstructor<'a> {
    spec: &'a ApiSpec,
    cfg: DecompositionConfig,
    first_values: HashMap<String, Value>,
}

enum Lookup<'a> {
    Test(&'a BTreeMap<String, Value>),
    /// Tail elements beyond the per-index components: every path reads the
    /// first value of the corresponding index-0 stratum.
    First,
}

struct Frame {
    refinements: Vec<Refinement>,
    via_alias: bool,
}

impl<'a> Reconstructor<'a> {
    /// `strata` are the filled components; only needed for tail filling.
    pub fn new(spec: &'a ApiSpec, cfg: DecompositionConfig, strata: &[Component]) -> Self {
        Reconstructor {
            spec,
            cfg,
            first_values: strata
                .iter()
                .filter_map(|c| Some((c.path.to_string(), c.values.first()?.clone())))
                .collect(),
        }
    }

    pub fn reconstruct(&self, t: &TestCase, ty: &TypeRef, root: &str) -> Result<TypedValue, EmitError> {
        let mut depth = HashMap::new();
        self.walk(
            ty,
            ComponentPath::new(root),
            Frame { refinements: Vec::new(), via_alias: false },
            &Lookup::Test(&t.assignments),
            &mut depth,
        )
    }

    /// One value per api parameter, in declaration order.
    pub fn reconstruct_params(&self, t: &TestCase, api: &ApiSig) -> Result<Vec<(String, TypedValue)>, EmitError> {
        api.params
            .iter()
            .map(|p| Ok((p.name.clone(), self.reconstruct(t, &p.ty, &p.name)?)))
            .collect()
    }

    fn get(&self, path: &ComponentPath, lookup: &Lookup) -> Result<Value, EmitError> {
        let key = path.as_str();
        let found = match lookup {
            Lookup::Test(a) => a.get(key),
            Lookup::First => self.first_values.get(key),
        };
        found
            .cloned()
            .ok_or_else(|| EmitError::MissingAssignment(key.to_string()))
    }

    fn walk(
        &self,
        ty: &TypeRef,
        path: ComponentPath,
        frame: Frame,
        lookup: &Lookup,
        depth: &mut HashMap<String, usize>,
    ) -> Result<TypedValue, EmitError> {
        match ty {
            TypeRef::Primitive(kind) => {
                let path = if frame.via_alias || path.segments().is_empty() {
                    path.child(Segment::Value)
                } else {
                    path
                };
                let v = self.get(&path, lookup)?;
                if !kind.admits(&v) {
                    return Err(EmitError::KindMismatch { path: path.to_string(), expected: kind.to_string() });
                }
                if !frame.refinements.iter().all(|r| r.eval(&v).unwrap_or(false)) {
                    return Err(EmitError::RefinementViolation(path.to_string()));
                }
                Ok(TypedValue::Prim(v))
            }
            TypeRef::List(elem) => {
                let len = self.length(&path, lookup)?;
                let mut xs = Vec::with_capacity(len);
                for i in 0..len {
                    let (p, l) = self.element(&path, i, lookup);
                    xs.push(self.walk(elem, p, Frame { refinements: Vec::new(), via_alias: false }, l, depth)?);
                }
                Ok(TypedValue::List(xs))
            }
            TypeRef::Map(k, v) => {
                let len = self.length(&path, lookup)?;
                let mut kvs = Vec::with_capacity(len);
                for i in 0..len {
                    let (p, l) = self.element(&path, i, lookup);
                    let kv = self.walk(k, p.child(Segment::Field("key".into())), Frame { refinements: Vec::new(), via_alias: false }, l, depth)?;
                    let vv = self.walk(v, p.child(Segment::Field("value".into())), Frame { refinements: Vec::new(), via_alias: false }, l, depth)?;
                    kvs.push((kv, vv));
                }
                Ok(TypedValue::Map(kvs))
            }
            TypeRef::Named(name) => {
                let decl = self.spec.decl(name).ok_or_else(|| EmitError::UnknownType(name.clone()))?;
                let seen = depth.get(name).copied().unwrap_or(0);
                if seen >= self.cfg.max_depth {
                    return minimal_value(self.spec, ty, &mut HashSet::new());
                }
                *depth.entry(name.clone()).or_default() += 1;
                let out = self.named(name, &decl.body, path, frame, lookup, depth);
                *depth.get_mut(name).expect("entered") -= 1;
                out
            }
        }
    }

    fn named(
        &self,
        name: &str,
        body: &DeclBody,
        path: ComponentPath,
        mut frame: Frame,
        lookup: &Lookup,
        depth: &mut HashMap<String, usize>,
    ) -> Result<TypedValue, EmitError> {
        let fresh = || Frame { refinements: Vec::new(), via_alias: false };
        match body {
            DeclBody::Alias { target, refinement } => {
                frame.via_alias = true;
                frame.refinements.extend(refinement.iter().cloned());
                Ok(TypedValue::Alias {
                    name: name.to_string(),
                    inner: Box::new(self.walk(target, path, frame, lookup, depth)?),
                })
            }
            DeclBody::ListOf(e) => self.walk(&TypeRef::List(Box::new(e.clone())), path, frame, lookup, depth),
            DeclBody::MapOf(k, v) => self.walk(
                &TypeRef::Map(Box::new(k.clone()), Box::new(v.clone())),
                path,
                frame,
                lookup,
                depth,
            ),
            DeclBody::Entity(fields) => {
                let mut out = Vec::with_capacity(fields.len());
                for f in fields {
                    let p = path.child(Segment::Field(f.name.clone()));
                    out.push((f.name.clone(), self.walk(&f.ty, p, fresh(), lookup, depth)?));
                }
                Ok(TypedValue::Entity { name: name.to_string(), fields: out })
            }
            DeclBody::Datatype(variants) => {
                let tag_path = path.child(Segment::TypeTag);
                let tag = self.get(&tag_path, lookup)?;
                let chosen = variants
                    .iter()
                    .find(|v| tag.as_str() == Some(v.name.as_str()))
                    .ok_or_else(|| EmitError::KindMismatch { path: tag_path.to_string(), expected: name.to_string() })?;
                let vpath = path.child(Segment::Variant(chosen.name.clone()));
                let mut out = Vec::with_capacity(chosen.fields.len());
                for f in &chosen.fields {
                    let p = vpath.child(Segment::Field(f.name.clone()));
                    out.push((f.name.clone(), self.walk(&f.ty, p, fresh(), lookup, depth)?));
                }
                Ok(TypedValue::Variant { datatype: name.to_string(), variant: chosen.name.clone(), fields: out })
            }
        }
    }

    fn length(&self, path: &ComponentPath, lookup: &Lookup) -> Result<usize, EmitError> {
        let p = path.child(Segment::Length);
        match self.get(&p, lookup)? {
            Value::Int(n) if n >= 0 => Ok(n as usize),
            _ => Err(EmitError::KindMismatch { path: p.to_string(), expected: "length".into() }),
        }
    }

    /// Path and lookup for element `i`; indices past the per-index
    /// components reuse index 0's first stratum values.
    fn element<'l>(&self, path: &ComponentPath, i: usize, lookup: &'l Lookup<'l>) -> (ComponentPath, &'l Lookup<'l>) {
        if i < self.cfg.max_len {
            (path.child(Segment::Index(i)), lookup)
        } else {
            (path.child(Segment::Index(0)), &Lookup::First)
        }
    }
}

/// Smallest finite value of `ty`: empty collections, the variant with the
/// fewest fields that terminates, and the first admissible primitive.
pub fn minimal_value(spec: &ApiSpec, ty: &TypeRef, visiting: &mut HashSet<String>) -> Result<TypedValue, EmitError> {
    minimal_with(spec, ty, Vec::new(), visiting)
}

fn minimal_with(
    spec: &ApiSpec,
    ty: &TypeRef,
    refinements: Vec<Refinement>,
    visiting: &mut HashSet<String>,
) -> Result<TypedValue, EmitError> {
    match ty {
        TypeRef::Primitive(kind) => {
            let probe = Component {
                path: ComponentPath::new("minimal"),
                kind: ComponentKind::Primitive(*kind),
                refinements,
                guards: Vec::new(),
                values: Vec::new(),
                sources: Vec::new(),
                context: ComponentContext::default(),
            };
            let v = random_values(&probe, &SeededRng::new(0), 1)
                .map_err(|_| EmitError::NoTerminatingValue(kind.to_string()))?;
            Ok(TypedValue::Prim(v[0].clone()))
        }
        TypeRef::List(_) => Ok(TypedValue::List(Vec::new())),
        TypeRef::Map(..) => Ok(TypedValue::Map(Vec::new())),
        TypeRef::Named(name) => {
            if !visiting.insert(name.clone()) {
                return Err(EmitError::NoTerminatingValue(name.clone()));
            }
            let decl = spec.decl(name).ok_or_else(|| EmitError::UnknownType(name.clone()))?;
            let out = match &decl.body {
                DeclBody::Alias { target, refinement } => {
                    let mut rs = refinements;
                    rs.extend(refinement.iter().cloned());
                    minimal_with(spec, target, rs, visiting).map(|inner| TypedValue::Alias {
                        name: name.clone(),
                        inner: Box::new(inner),
                    })
                }
                DeclBody::ListOf(_) => Ok(TypedValue::List(Vec::new())),
                DeclBody::MapOf(..) => Ok(TypedValue::Map(Vec::new())),
                DeclBody::Entity(fields) => fields
                    .iter()
                    .map(|f| Ok((f.name.clone(), minimal_value(spec, &f.ty, visiting)?)))
                    .collect::<Result<Vec<_>, EmitError>>()
                    .map(|fs| TypedValue::Entity { name: name.clone(), fields: fs }),
                DeclBody::Datatype(variants) => {
                    let mut order: Vec<_> = variants.iter().collect();
                    order.sort_by_key(|v| v.fields.len());
                    order
                        .into_iter()
                        .find_map(|v| {
                            let fs = v
                                .fields
                                .iter()
                                .map(|f| Ok((f.name.clone(), minimal_value(spec, &f.ty, visiting)?)))
                                .collect::<Result<Vec<_>, EmitError>>()
                                .ok()?;
                            Some(TypedValue::Variant { datatype: name.clone(), variant: v.name.clone(), fields: fs })
                        })
                        .ok_or_else(|| EmitError::NoTerminatingValue(name.clone()))
                }
            };
            visiting.remove(name);
            out
        }
    }
}
