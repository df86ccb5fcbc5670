//! The API specification model and its text front end.
//!
//! A specification is a list of type declarations (aliases, entities,
//! datatypes, named collections) followed by api signatures. Parsing
//! resolves every type reference, so a successfully parsed [`ApiSpec`] never
//! dangles, although its type graph may be recursive.

mod parse;
mod print;
mod refine;

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

pub use parse::{parse_spec, ParseError};
pub use refine::{CompareOp, NumBound, Refinement, RefinementError, RegexPattern};

use crate::value::PrimitiveKind;

#[derive(Debug, Clone, PartialEq)]
pub enum TypeRef {
    Primitive(PrimitiveKind),
    Named(String),
    List(Box<TypeRef>),
    Map(Box<TypeRef>, Box<TypeRef>),
}

impl fmt::Display for TypeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypeRef::Primitive(k) => write!(f, "{k}"),
            TypeRef::Named(n) => f.write_str(n),
            TypeRef::List(e) => write!(f, "List<{e}>"),
            TypeRef::Map(k, v) => write!(f, "Map<{k}, {v}>"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    pub name: String,
    pub ty: TypeRef,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Variant {
    pub name: String,
    pub fields: Vec<Field>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum DeclBody {
    Alias {
        target: TypeRef,
        refinement: Option<Refinement>,
    },
    Entity(Vec<Field>),
    Datatype(Vec<Variant>),
    ListOf(TypeRef),
    MapOf(TypeRef, TypeRef),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TypeDecl {
    pub name: String,
    pub body: DeclBody,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verb {
    Get,
    Post,
    Put,
    Delete,
    Auth,
}

impl Verb {
    pub fn parse(s: &str) -> Option<Verb> {
        Some(match s {
            "GET" => Verb::Get,
            "POST" => Verb::Post,
            "PUT" => Verb::Put,
            "DELETE" => Verb::Delete,
            "AUTH" => Verb::Auth,
            _ => return None,
        })
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verb::Get => "GET",
            Verb::Post => "POST",
            Verb::Put => "PUT",
            Verb::Delete => "DELETE",
            Verb::Auth => "AUTH",
        }
    }

    /// The HTTP method on the wire. Authentication calls are POSTs.
    pub fn http_method(self) -> &'static str {
        match self {
            Verb::Auth => "POST",
            other => other.as_str(),
        }
    }
}

impl fmt::Display for Verb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Param {
    pub name: String,
    pub ty: TypeRef,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ApiSig {
    pub name: String,
    pub params: Vec<Param>,
    pub result: TypeRef,
    pub verb: Option<Verb>,
    pub route: Option<String>,
}

impl ApiSig {
    pub fn effective_verb(&self) -> Verb {
        self.verb.unwrap_or(Verb::Post)
    }

    pub fn effective_route(&self) -> String {
        self.route
            .clone()
            .unwrap_or_else(|| format!("/{}", self.name))
    }

    /// `api name(p: T, ...): R` without the body.
    pub fn signature(&self) -> String {
        let params = self
            .params
            .iter()
            .map(|p| format!("{}: {}", p.name, p.ty))
            .collect::<Vec<_>>()
            .join(", ");
        format!("api {}({}): {}", self.name, params, self.result)
    }
}

#[derive(Debug, Clone, Default)]
pub struct ApiSpec {
    pub decls: Vec<TypeDecl>,
    pub apis: Vec<ApiSig>,
    index: HashMap<String, usize>,
}

impl PartialEq for ApiSpec {
    fn eq(&self, other: &Self) -> bool {
        self.decls == other.decls && self.apis == other.apis
    }
}

impl ApiSpec {
    /// Builds a spec from already-validated parts. Prefer [`parse_spec`].
    pub(crate) fn from_parts(decls: Vec<TypeDecl>, apis: Vec<ApiSig>) -> Self {
        let index = decls
            .iter()
            .enumerate()
            .map(|(i, d)| (d.name.clone(), i))
            .collect();
        ApiSpec { decls, apis, index }
    }

    pub fn decl(&self, name: &str) -> Option<&TypeDecl> {
        self.index.get(name).map(|&i| &self.decls[i])
    }

    pub fn api(&self, name: &str) -> Option<&ApiSig> {
        self.apis.iter().find(|a| a.name == name)
    }

    /// Canonical source text; reparses to an equal spec.
    pub fn pretty(&self) -> String {
        print::pretty(self)
    }

    /// The primitive kind an alias chain bottoms out in, if any.
    pub fn underlying_primitive(&self, ty: &TypeRef) -> Option<PrimitiveKind> {
        let mut cur = ty;
        for _ in 0..=self.decls.len() {
            match cur {
                TypeRef::Primitive(k) => return Some(*k),
                TypeRef::Named(n) => match &self.decl(n)?.body {
                    DeclBody::Alias { target, .. } => cur = target,
                    _ => return None,
                },
                _ => return None,
            }
        }
        None
    }
}

impl TypeDecl {
    /// Single-line rendering, as embedded in generation prompts.
    pub fn one_line(&self) -> String {
        print::decl_one_line(self)
    }
}
