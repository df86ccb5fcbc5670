//! Recursive-descent parser for the `.bsqapi` declaration language.
//!
//! Accepted forms:
//!
//! ```text
//! type N = P;
//! type N = P & { invariant $value <= 100n };
//! type N = String of /[0-9]{5}/;
//! type N = List<T>;            type N = Map<K, V>;
//! entity N { field f: T; ... }
//! datatype N of A { ... } | B { ... } ;
//! @route GET /path
//! api name(p: T, ...): R;      // or with a `{ ... }` body, which is skipped
//! ```

use std::collections::{HashMap, HashSet};

use thiserror::Error;

use super::refine::{CompareOp, NumBound, Refinement, RegexPattern};
use super::{ApiSig, ApiSpec, DeclBody, Field, Param, TypeDecl, TypeRef, Variant, Verb};
use crate::value::PrimitiveKind;

#[derive(Debug, Error, PartialEq)]
pub enum ParseError {
    #[error("{line}:{col}: syntax error, expected {expected}")]
    Syntax {
        line: usize,
        col: usize,
        expected: String,
    },
    #[error("unresolved type `{0}`")]
    UnresolvedType(String),
    #[error("duplicate declaration `{0}`")]
    DuplicateDecl(String),
    #[error("duplicate variant `{variant}` in datatype `{datatype}`")]
    DuplicateVariant { datatype: String, variant: String },
    #[error("duplicate field `{field}` in `{owner}`")]
    DuplicateField { owner: String, field: String },
    #[error("duplicate parameter `{param}` in api `{api}`")]
    DuplicateParam { api: String, param: String },
    #[error("{line}:{col}: unsupported invariant: {detail}")]
    UnsupportedInvariant {
        line: usize,
        col: usize,
        detail: String,
    },
    #[error("invalid regex /{pattern}/: {message}")]
    InvalidRegex { pattern: String, message: String },
    #[error("alias `{0}` is defined in terms of itself")]
    CyclicAlias(String),
}

/// Parses and resolves a specification.
pub fn parse_spec(text: &str) -> Result<ApiSpec, ParseError> {
    let mut p = Parser::new(text);
    let (decls, apis) = p.spec()?;
    resolve(&decls, &apis)?;
    Ok(ApiSpec::from_parts(decls, apis))
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Parser { src, pos: 0 }
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn location(&self) -> (usize, usize) {
        let before = &self.src[..self.pos];
        let line = before.matches('\n').count() + 1;
        let col = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        (line, col)
    }

    fn err<T>(&self, expected: impl Into<String>) -> Result<T, ParseError> {
        let (line, col) = self.location();
        Err(ParseError::Syntax {
            line,
            col,
            expected: expected.into(),
        })
    }

    fn unsupported<T>(&self, detail: impl Into<String>) -> Result<T, ParseError> {
        let (line, col) = self.location();
        Err(ParseError::UnsupportedInvariant {
            line,
            col,
            detail: detail.into(),
        })
    }

    fn skip_trivia(&mut self) {
        loop {
            let rest = self.rest();
            let trimmed = rest.trim_start();
            self.pos += rest.len() - trimmed.len();
            if trimmed.starts_with("//") {
                self.pos += trimmed.find('\n').unwrap_or(trimmed.len());
            } else if trimmed.starts_with("/*") {
                self.pos += trimmed.find("*/").map_or(trimmed.len(), |i| i + 2);
            } else {
                break;
            }
        }
    }

    fn at_end(&mut self) -> bool {
        self.skip_trivia();
        self.rest().is_empty()
    }

    fn eat(&mut self, sym: &str) -> bool {
        self.skip_trivia();
        if self.rest().starts_with(sym) {
            self.pos += sym.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, sym: &str) -> Result<(), ParseError> {
        if self.eat(sym) {
            Ok(())
        } else {
            self.err(format!("`{sym}`"))
        }
    }

    fn peek_ident(&mut self) -> Option<&'a str> {
        self.skip_trivia();
        let rest = self.rest();
        let mut chars = rest.char_indices();
        match chars.next() {
            Some((_, c)) if c.is_alphabetic() || c == '_' => {}
            _ => return None,
        }
        let end = chars
            .find(|(_, c)| !(c.is_alphanumeric() || *c == '_'))
            .map_or(rest.len(), |(i, _)| i);
        Some(&rest[..end])
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek_ident() {
            Some(id) => {
                self.pos += id.len();
                Ok(id.to_string())
            }
            None => self.err("identifier"),
        }
    }

    fn eat_keyword(&mut self, kw: &str) -> bool {
        if self.peek_ident() == Some(kw) {
            self.pos += kw.len();
            true
        } else {
            false
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        if self.eat_keyword(kw) {
            Ok(())
        } else {
            self.err(format!("`{kw}`"))
        }
    }

    fn spec(&mut self) -> Result<(Vec<TypeDecl>, Vec<ApiSig>), ParseError> {
        let mut decls = Vec::new();
        let mut apis = Vec::new();
        while !self.at_end() {
            if self.rest().starts_with('@') {
                apis.push(self.annotated_api()?);
                continue;
            }
            match self.peek_ident() {
                Some("type") => decls.push(self.type_decl()?),
                Some("entity") => decls.push(self.entity()?),
                Some("datatype") => decls.push(self.datatype()?),
                Some("api") => apis.push(self.api(None, None)?),
                _ => return self.err("`type`, `entity`, `datatype`, `api` or `@route`"),
            }
        }
        Ok((decls, apis))
    }

    fn type_ref(&mut self) -> Result<TypeRef, ParseError> {
        let name = self.ident()?;
        match name.as_str() {
            "List" => {
                self.expect("<")?;
                let elem = self.type_ref()?;
                self.expect(">")?;
                Ok(TypeRef::List(Box::new(elem)))
            }
            "Map" => {
                self.expect("<")?;
                let key = self.type_ref()?;
                self.expect(",")?;
                let value = self.type_ref()?;
                self.expect(">")?;
                Ok(TypeRef::Map(Box::new(key), Box::new(value)))
            }
            _ => Ok(PrimitiveKind::from_name(&name)
                .map(TypeRef::Primitive)
                .unwrap_or(TypeRef::Named(name))),
        }
    }

    fn decl_name(&mut self) -> Result<String, ParseError> {
        let save = self.pos;
        let name = self.ident()?;
        if PrimitiveKind::from_name(&name).is_some() || name == "List" || name == "Map" {
            self.pos = save;
            return self.err("a declaration name (builtin type names are reserved)");
        }
        Ok(name)
    }

    fn type_decl(&mut self) -> Result<TypeDecl, ParseError> {
        self.expect_keyword("type")?;
        let name = self.decl_name()?;
        self.expect("=")?;
        let target = self.type_ref()?;
        let body = match target {
            TypeRef::List(elem) => DeclBody::ListOf(*elem),
            TypeRef::Map(k, v) => DeclBody::MapOf(*k, *v),
            target => {
                let refinement = if self.eat("&") {
                    Some(self.invariant_block(&target)?)
                } else if self.eat_keyword("of") {
                    if target != TypeRef::Primitive(PrimitiveKind::String) {
                        return self.unsupported("regex refinements apply to String only");
                    }
                    Some(self.regex_literal()?)
                } else {
                    None
                };
                DeclBody::Alias { target, refinement }
            }
        };
        self.expect(";")?;
        Ok(TypeDecl { name, body })
    }

    fn invariant_block(&mut self, target: &TypeRef) -> Result<Refinement, ParseError> {
        let kind = match target {
            TypeRef::Primitive(k) => *k,
            _ => return self.unsupported("invariants attach to primitive types only"),
        };
        self.expect("{")?;
        self.expect_keyword("invariant")?;
        self.skip_trivia();
        if !self.eat("$value") {
            return self.unsupported("only comparisons on `$value` are supported");
        }
        let op = self.compare_op()?;
        let bound = self.number()?;
        if !kind.is_numeric() {
            return self.unsupported(format!("numeric comparison on {kind}"));
        }
        self.eat(";");
        if !self.eat("}") {
            return self.unsupported("a single `$value <op> literal` comparison is supported");
        }
        Ok(Refinement::Compare { op, bound })
    }

    fn compare_op(&mut self) -> Result<CompareOp, ParseError> {
        // Longest match first.
        for (sym, op) in [
            ("===", CompareOp::Eq),
            ("==", CompareOp::Eq),
            ("<=", CompareOp::Le),
            (">=", CompareOp::Ge),
            ("<", CompareOp::Lt),
            (">", CompareOp::Gt),
            ("=", CompareOp::Eq),
        ] {
            if self.eat(sym) {
                return Ok(op);
            }
        }
        self.unsupported("expected a comparison operator")
    }

    fn number(&mut self) -> Result<NumBound, ParseError> {
        self.skip_trivia();
        let rest = self.rest();
        let mut end = 0;
        let bytes = rest.as_bytes();
        if end < bytes.len() && (bytes[end] == b'-' || bytes[end] == b'+') {
            end += 1;
        }
        let digits_start = end;
        while end < bytes.len() && (bytes[end].is_ascii_digit() || bytes[end] == b'.') {
            end += 1;
        }
        if end == digits_start {
            return self.unsupported("expected a numeric literal");
        }
        let text = &rest[..end];
        let suffix = bytes.get(end).copied();
        let bound = if text.contains('.') {
            let x: f64 = match text.parse() {
                Ok(x) => x,
                Err(_) => return self.err("numeric literal"),
            };
            if suffix == Some(b'f') {
                end += 1;
            }
            NumBound::Float(x)
        } else {
            let i: i64 = match text.parse() {
                Ok(i) => i,
                Err(_) => return self.err("integer literal"),
            };
            match suffix {
                Some(b'n') => {
                    end += 1;
                    if i < 0 {
                        return self.err("non-negative Nat literal");
                    }
                    NumBound::Nat(i)
                }
                Some(b'i') => {
                    end += 1;
                    NumBound::Int(i)
                }
                _ => NumBound::Int(i),
            }
        };
        self.pos += end;
        Ok(bound)
    }

    fn regex_literal(&mut self) -> Result<Refinement, ParseError> {
        self.skip_trivia();
        if !self.rest().starts_with('/') {
            return self.err("`/regex/`");
        }
        self.pos += 1;
        let mut source = String::new();
        let mut chars = self.rest().char_indices();
        let close = loop {
            match chars.next() {
                Some((_, '\\')) => match chars.next() {
                    Some((_, '/')) => source.push('/'),
                    Some((_, c)) => {
                        source.push('\\');
                        source.push(c);
                    }
                    None => break None,
                },
                Some((i, '/')) => break Some(i),
                Some((_, '\n')) | None => break None,
                Some((_, c)) => source.push(c),
            }
        };
        let Some(close) = close else {
            return self.err("closing `/` of regex literal");
        };
        self.pos += close + 1;
        RegexPattern::new(&source)
            .map(Refinement::Regex)
            .map_err(|e| ParseError::InvalidRegex {
                pattern: source,
                message: e.to_string(),
            })
    }

    /// `{ field a: T; b: U }` with optional `field` keyword and separators.
    fn field_block(&mut self) -> Result<Vec<Field>, ParseError> {
        self.expect("{")?;
        let mut fields = Vec::new();
        while !self.eat("}") {
            self.eat_keyword("field");
            let name = self.ident()?;
            self.expect(":")?;
            let ty = self.type_ref()?;
            fields.push(Field { name, ty });
            if !(self.eat(";") || self.eat(",")) {
                self.expect("}")?;
                break;
            }
        }
        Ok(fields)
    }

    fn entity(&mut self) -> Result<TypeDecl, ParseError> {
        self.expect_keyword("entity")?;
        let name = self.decl_name()?;
        let fields = self.field_block()?;
        self.eat(";");
        Ok(TypeDecl {
            name,
            body: DeclBody::Entity(fields),
        })
    }

    fn datatype(&mut self) -> Result<TypeDecl, ParseError> {
        self.expect_keyword("datatype")?;
        let name = self.decl_name()?;
        self.expect_keyword("of")?;
        let mut variants = Vec::new();
        loop {
            let vname = self.ident()?;
            let fields = self.field_block()?;
            variants.push(Variant {
                name: vname,
                fields,
            });
            if !self.eat("|") {
                break;
            }
        }
        self.expect(";")?;
        Ok(TypeDecl {
            name,
            body: DeclBody::Datatype(variants),
        })
    }

    fn annotated_api(&mut self) -> Result<ApiSig, ParseError> {
        self.expect("@route")?;
        let verb_text = self.ident()?;
        let Some(verb) = Verb::parse(&verb_text) else {
            return self.err("one of GET, POST, PUT, DELETE, AUTH");
        };
        self.skip_trivia();
        let rest = self.rest();
        let end = rest.find(char::is_whitespace).unwrap_or(rest.len());
        if end == 0 || !rest.starts_with('/') {
            return self.err("a route path starting with `/`");
        }
        let route = rest[..end].to_string();
        self.pos += end;
        self.api(Some(verb), Some(route))
    }

    fn api(&mut self, verb: Option<Verb>, route: Option<String>) -> Result<ApiSig, ParseError> {
        self.expect_keyword("api")?;
        let name = self.ident()?;
        self.expect("(")?;
        let mut params = Vec::new();
        if !self.eat(")") {
            loop {
                let pname = self.ident()?;
                self.expect(":")?;
                let ty = self.type_ref()?;
                params.push(Param { name: pname, ty });
                if self.eat(")") {
                    break;
                }
                self.expect(",")?;
            }
        }
        self.expect(":")?;
        let result = self.type_ref()?;
        self.skip_trivia();
        if self.rest().starts_with('{') {
            self.skip_body()?;
            self.eat(";");
        } else {
            self.expect(";")?;
        }
        Ok(ApiSig {
            name,
            params,
            result,
            verb,
            route,
        })
    }

    fn skip_body(&mut self) -> Result<(), ParseError> {
        let mut depth = 0usize;
        for (i, c) in self.rest().char_indices() {
            match c {
                '{' => depth += 1,
                '}' => {
                    depth -= 1;
                    if depth == 0 {
                        self.pos += i + 1;
                        return Ok(());
                    }
                }
                _ => {}
            }
        }
        self.pos = self.src.len();
        self.err("closing `}` of api body")
    }
}

fn resolve(decls: &[TypeDecl], apis: &[ApiSig]) -> Result<(), ParseError> {
    let mut names: HashMap<&str, &TypeDecl> = HashMap::new();
    for d in decls {
        if names.insert(&d.name, d).is_some() {
            return Err(ParseError::DuplicateDecl(d.name.clone()));
        }
    }

    fn check_ref(ty: &TypeRef, names: &HashMap<&str, &TypeDecl>) -> Result<(), ParseError> {
        match ty {
            TypeRef::Primitive(_) => Ok(()),
            TypeRef::Named(n) if names.contains_key(n.as_str()) => Ok(()),
            TypeRef::Named(n) => Err(ParseError::UnresolvedType(n.clone())),
            TypeRef::List(e) => check_ref(e, names),
            TypeRef::Map(k, v) => {
                check_ref(k, names)?;
                check_ref(v, names)
            }
        }
    }

    fn check_fields(
        owner: &str,
        fields: &[Field],
        names: &HashMap<&str, &TypeDecl>,
    ) -> Result<(), ParseError> {
        let mut seen = HashSet::new();
        for f in fields {
            if !seen.insert(f.name.as_str()) {
                return Err(ParseError::DuplicateField {
                    owner: owner.to_string(),
                    field: f.name.clone(),
                });
            }
            check_ref(&f.ty, names)?;
        }
        Ok(())
    }

    for d in decls {
        match &d.body {
            DeclBody::Alias { target, .. } => check_ref(target, &names)?,
            DeclBody::Entity(fields) => check_fields(&d.name, fields, &names)?,
            DeclBody::Datatype(variants) => {
                let mut seen = HashSet::new();
                for v in variants {
                    if !seen.insert(v.name.as_str()) {
                        return Err(ParseError::DuplicateVariant {
                            datatype: d.name.clone(),
                            variant: v.name.clone(),
                        });
                    }
                    check_fields(&v.name, &v.fields, &names)?;
                }
            }
            DeclBody::ListOf(e) => check_ref(e, &names)?,
            DeclBody::MapOf(k, v) => {
                check_ref(k, &names)?;
                check_ref(v, &names)?;
            }
        }
    }

    // Alias chains must bottom out in something other than an alias.
    for d in decls {
        let mut cur = d;
        let mut steps = 0;
        while let DeclBody::Alias {
            target: TypeRef::Named(next),
            ..
        } = &cur.body
        {
            cur = names[next.as_str()];
            steps += 1;
            if steps > decls.len() {
                return Err(ParseError::CyclicAlias(d.name.clone()));
            }
        }
    }

    for api in apis {
        let mut seen = HashSet::new();
        for p in &api.params {
            if !seen.insert(p.name.as_str()) {
                return Err(ParseError::DuplicateParam {
                    api: api.name.clone(),
                    param: p.name.clone(),
                });
            }
            check_ref(&p.ty, &names)?;
        }
        check_ref(&api.result, &names)?;
    }
    Ok(())
}
