//! Decomposition of structured parameter types into primitive components.
//!
//! Every leaf of a (length- and depth-bounded) type tree becomes a
//! [`Component`] identified by its path from the parameter root. Lists and
//! maps contribute a synthetic `@length` component and per-index element
//! components guarded by `@length > i`; datatypes contribute a synthetic
//! `@type` selector and per-variant components guarded by `@type = Variant`.
//! Guards accumulate through nesting, outermost first.

mod dump;
mod path;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use dump::dump_components;
pub use path::{ComponentPath, Segment};

use crate::spec::{ApiSig, ApiSpec, DeclBody, Refinement, TypeRef};
use crate::value::{PrimitiveKind, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionConfig {
    pub max_len: usize,
    pub max_depth: usize,
}

impl Default for DecompositionConfig {
    fn default() -> Self {
        DecompositionConfig {
            max_len: 3,
            max_depth: 3,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum DecomposeError {
    #[error("unsupported type `{0}`")]
    UnsupportedType(String),
    #[error("max_depth must be at least 1")]
    InvalidDepth,
    #[error("guard subject `{0}` is not assigned")]
    UnassignedGuardSubject(String),
}

#[derive(Debug, Clone, PartialEq)]
pub enum ComponentKind {
    Primitive(PrimitiveKind),
    /// Synthetic collection size with domain `0..=max`.
    Length { max: usize },
    /// Synthetic variant tag; enumerates the datatype's variant names.
    Selector(Vec<String>),
}

impl ComponentKind {
    pub fn is_synthetic(&self) -> bool {
        !matches!(self, ComponentKind::Primitive(_))
    }

    pub fn admits(&self, v: &Value) -> bool {
        match self {
            ComponentKind::Primitive(k) => k.admits(v),
            ComponentKind::Length { max } => {
                matches!(v, Value::Int(n) if *n >= 0 && *n as usize <= *max)
            }
            ComponentKind::Selector(vs) => matches!(v, Value::Str(s) if vs.contains(s)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GuardRelation {
    SizeGreaterThan(usize),
    SelectorEquals(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Guard {
    pub subject: ComponentPath,
    pub relation: GuardRelation,
}

impl Guard {
    /// Evaluates the guard against the subject's assigned value.
    pub fn holds_for(&self, v: &Value) -> bool {
        match (&self.relation, v) {
            (GuardRelation::SizeGreaterThan(i), Value::Int(n)) => *n > *i as i64,
            (GuardRelation::SelectorEquals(name), Value::Str(s)) => s == name,
            _ => false,
        }
    }
}

impl std::fmt::Display for Guard {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.relation {
            GuardRelation::SizeGreaterThan(i) => write!(f, "{} > {}", self.subject, i),
            GuardRelation::SelectorEquals(v) => write!(f, "{} = {}", self.subject, v),
        }
    }
}

/// Where a component sits in the source types; feeds prompt construction.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ComponentContext {
    /// Nearest field (or parameter) name on the path.
    pub field: String,
    /// Entity, variant or alias that owns the field.
    pub enclosing: String,
    /// Declarations traversed from the parameter root, in order.
    pub trail: Vec<String>,
}

/// Where a value provider's output for a component came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Domain,
    Random,
    Static,
    Mock,
    Llm,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Component {
    pub path: ComponentPath,
    pub kind: ComponentKind,
    pub refinements: Vec<Refinement>,
    pub guards: Vec<Guard>,
    /// Strata. Synthetic components are born with their full domain.
    pub values: Vec<Value>,
    /// Provenance per entry of `values`.
    pub sources: Vec<Source>,
    pub context: ComponentContext,
}

impl Component {
    /// True iff `v` has the right kind and passes every refinement.
    pub fn accepts(&self, v: &Value) -> bool {
        self.kind.admits(v)
            && self
                .refinements
                .iter()
                .all(|r| r.eval(v).unwrap_or(false))
    }

    pub fn primitive_kind(&self) -> Option<PrimitiveKind> {
        match self.kind {
            ComponentKind::Primitive(k) => Some(k),
            _ => None,
        }
    }
}

/// A point where a recursive type was cut off by the depth bound.
#[derive(Debug, Clone, PartialEq)]
pub struct Cut {
    pub path: ComponentPath,
    pub ty: TypeRef,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Decomposition {
    pub components: Vec<Component>,
    pub cuts: Vec<Cut>,
}

impl Decomposition {
    pub fn extend(&mut self, other: Decomposition) {
        self.components.extend(other.components);
        self.cuts.extend(other.cuts);
    }

    pub fn find(&self, path: &str) -> Option<&Component> {
        self.components.iter().find(|c| c.path.to_string() == path)
    }
}

/// Decomposes one type at `root`.
pub fn get_components(
    spec: &ApiSpec,
    ty: &TypeRef,
    root: ComponentPath,
    cfg: &DecompositionConfig,
) -> Result<Decomposition, DecomposeError> {
    if cfg.max_depth == 0 {
        return Err(DecomposeError::InvalidDepth);
    }
    let mut walker = Walker {
        spec,
        cfg,
        out: Decomposition::default(),
        depth: HashMap::new(),
    };
    let field = root.root().to_string();
    walker.walk(
        ty,
        root,
        Frame {
            guards: Vec::new(),
            trail: Vec::new(),
            field,
            enclosing: String::new(),
            refinements: Vec::new(),
            via_alias: false,
        },
    )?;
    Ok(walker.out)
}

/// Decomposes every parameter of an api into one pooled component space.
pub fn decompose_api(
    spec: &ApiSpec,
    api: &ApiSig,
    cfg: &DecompositionConfig,
) -> Result<Decomposition, DecomposeError> {
    let mut all = Decomposition::default();
    for p in &api.params {
        all.extend(get_components(
            spec,
            &p.ty,
            ComponentPath::new(&p.name),
            cfg,
        )?);
    }
    Ok(all)
}

/// True iff every guard of `c` holds under `assignment`.
///
/// Guards are checked outermost first, so a failing outer guard answers
/// `false` before any inner subject (which would be unassigned) is looked
/// at.
pub fn feasible(
    assignment: &HashMap<String, Value>,
    c: &Component,
) -> Result<bool, DecomposeError> {
    for g in &c.guards {
        let key = g.subject.to_string();
        let Some(v) = assignment.get(&key) else {
            return Err(DecomposeError::UnassignedGuardSubject(key));
        };
        if !g.holds_for(v) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone)]
struct Frame {
    guards: Vec<Guard>,
    trail: Vec<String>,
    field: String,
    enclosing: String,
    refinements: Vec<Refinement>,
    via_alias: bool,
}

struct Walker<'a> {
    spec: &'a ApiSpec,
    cfg: &'a DecompositionConfig,
    out: Decomposition,
    depth: HashMap<String, usize>,
}

impl Walker<'_> {
    fn walk(&mut self, ty: &TypeRef, path: ComponentPath, frame: Frame) -> Result<(), DecomposeError> {
        match ty {
            TypeRef::Primitive(kind) => {
                let path = if frame.via_alias || path.segments().is_empty() {
                    path.child(Segment::Value)
                } else {
                    path
                };
                self.out.components.push(Component {
                    path,
                    kind: ComponentKind::Primitive(*kind),
                    refinements: frame.refinements,
                    guards: frame.guards,
                    values: Vec::new(),
                    sources: Vec::new(),
                    context: ComponentContext {
                        field: frame.field,
                        enclosing: frame.enclosing,
                        trail: frame.trail,
                    },
                });
                Ok(())
            }
            TypeRef::List(elem) => self.collection(&path, frame, |w, idx_path, f| {
                w.walk(elem, idx_path, f)
            }),
            TypeRef::Map(key, value) => self.collection(&path, frame, |w, idx_path, f| {
                let mut kf = f.clone();
                kf.field = "key".into();
                w.walk(key, idx_path.child(Segment::Field("key".into())), kf)?;
                let mut vf = f;
                vf.field = "value".into();
                w.walk(value, idx_path.child(Segment::Field("value".into())), vf)
            }),
            TypeRef::Named(name) => {
                let Some(decl) = self.spec.decl(name) else {
                    return Err(DecomposeError::UnsupportedType(name.clone()));
                };
                let seen = self.depth.get(name).copied().unwrap_or(0);
                if seen >= self.cfg.max_depth {
                    self.out.cuts.push(Cut {
                        path,
                        ty: ty.clone(),
                    });
                    return Ok(());
                }
                *self.depth.entry(name.clone()).or_default() += 1;
                let mut frame = frame;
                frame.trail.push(name.clone());
                let result = self.named(name, &decl.body, path, frame);
                *self.depth.get_mut(name).expect("entered") -= 1;
                result
            }
        }
    }

    fn named(
        &mut self,
        name: &str,
        body: &DeclBody,
        path: ComponentPath,
        mut frame: Frame,
    ) -> Result<(), DecomposeError> {
        match body {
            DeclBody::Alias { target, refinement } => {
                frame.via_alias = true;
                if frame.enclosing.is_empty() {
                    frame.enclosing = name.to_string();
                }
                frame.refinements.extend(refinement.iter().cloned());
                self.walk(target, path, frame)
            }
            DeclBody::ListOf(elem) => self.walk(&TypeRef::List(Box::new(elem.clone())), path, frame),
            DeclBody::MapOf(k, v) => self.walk(
                &TypeRef::Map(Box::new(k.clone()), Box::new(v.clone())),
                path,
                frame,
            ),
            DeclBody::Entity(fields) => {
                for f in fields {
                    let mut ff = frame.clone();
                    ff.field = f.name.clone();
                    ff.enclosing = name.to_string();
                    ff.refinements.clear();
                    ff.via_alias = false;
                    self.walk(&f.ty, path.child(Segment::Field(f.name.clone())), ff)?;
                }
                Ok(())
            }
            DeclBody::Datatype(variants) => {
                let selector = path.child(Segment::TypeTag);
                let names: Vec<String> = variants.iter().map(|v| v.name.clone()).collect();
                self.out.components.push(Component {
                    path: selector.clone(),
                    kind: ComponentKind::Selector(names.clone()),
                    refinements: Vec::new(),
                    guards: frame.guards.clone(),
                    values: names.into_iter().map(Value::Str).collect(),
                    sources: vec![Source::Domain; variants.len()],
                    context: ComponentContext {
                        field: frame.field.clone(),
                        enclosing: name.to_string(),
                        trail: frame.trail.clone(),
                    },
                });
                for v in variants {
                    let vpath = path.child(Segment::Variant(v.name.clone()));
                    for f in &v.fields {
                        let mut ff = frame.clone();
                        ff.guards.push(Guard {
                            subject: selector.clone(),
                            relation: GuardRelation::SelectorEquals(v.name.clone()),
                        });
                        ff.field = f.name.clone();
                        ff.enclosing = v.name.clone();
                        ff.refinements.clear();
                        ff.via_alias = false;
                        self.walk(&f.ty, vpath.child(Segment::Field(f.name.clone())), ff)?;
                    }
                }
                Ok(())
            }
        }
    }

    fn collection(
        &mut self,
        path: &ComponentPath,
        frame: Frame,
        mut element: impl FnMut(&mut Self, ComponentPath, Frame) -> Result<(), DecomposeError>,
    ) -> Result<(), DecomposeError> {
        let len_path = path.child(Segment::Length);
        let max = self.cfg.max_len;
        self.out.components.push(Component {
            path: len_path.clone(),
            kind: ComponentKind::Length { max },
            refinements: Vec::new(),
            guards: frame.guards.clone(),
            values: (0..=max as i64).map(Value::Int).collect(),
            sources: vec![Source::Domain; max + 1],
            context: ComponentContext {
                field: frame.field.clone(),
                enclosing: frame.enclosing.clone(),
                trail: frame.trail.clone(),
            },
        });
        for i in 0..max {
            let mut f = frame.clone();
            f.guards.push(Guard {
                subject: len_path.clone(),
                relation: GuardRelation::SizeGreaterThan(i),
            });
            f.refinements.clear();
            f.via_alias = false;
            element(self, path.child(Segment::Index(i)), f)?;
        }
        Ok(())
    }
}
