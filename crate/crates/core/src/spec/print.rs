use std::fmt::Write;

use super::{ApiSpec, DeclBody, Field, Refinement, TypeDecl};

fn alias_rhs(target: &super::TypeRef, refinement: &Option<Refinement>) -> String {
    match refinement {
        None => target.to_string(),
        Some(r @ Refinement::Compare { .. }) => format!("{target} & {{ invariant {r} }}"),
        Some(r @ Refinement::Regex(_)) => format!("{target} of {r}"),
    }
}

fn inline_fields(fields: &[Field]) -> String {
    if fields.is_empty() {
        return "{ }".to_string();
    }
    let body: Vec<String> = fields
        .iter()
        .map(|f| format!("field {}: {};", f.name, f.ty))
        .collect();
    format!("{{ {} }}", body.join(" "))
}

pub(super) fn decl_one_line(d: &TypeDecl) -> String {
    match &d.body {
        DeclBody::Alias { target, refinement } => {
            format!("type {} = {};", d.name, alias_rhs(target, refinement))
        }
        DeclBody::ListOf(e) => format!("type {} = List<{}>;", d.name, e),
        DeclBody::MapOf(k, v) => format!("type {} = Map<{}, {}>;", d.name, k, v),
        DeclBody::Entity(fields) => format!("entity {} {}", d.name, inline_fields(fields)),
        DeclBody::Datatype(variants) => {
            let vs: Vec<String> = variants
                .iter()
                .map(|v| format!("{} {}", v.name, inline_fields(&v.fields)))
                .collect();
            format!("datatype {} of {};", d.name, vs.join(" | "))
        }
    }
}

pub(super) fn pretty(spec: &ApiSpec) -> String {
    let mut out = String::new();
    for d in &spec.decls {
        match &d.body {
            DeclBody::Entity(fields) => {
                writeln!(out, "entity {} {{", d.name).unwrap();
                for f in fields {
                    writeln!(out, "  field {}: {};", f.name, f.ty).unwrap();
                }
                out.push_str("}\n");
            }
            DeclBody::Datatype(variants) => {
                writeln!(out, "datatype {} of", d.name).unwrap();
                for (i, v) in variants.iter().enumerate() {
                    let sep = if i == 0 { "  " } else { "  | " };
                    writeln!(out, "{sep}{} {}", v.name, inline_fields(&v.fields)).unwrap();
                }
                out.push_str(";\n");
            }
            _ => {
                out.push_str(&decl_one_line(d));
                out.push('\n');
            }
        }
        out.push('\n');
    }
    for api in &spec.apis {
        if let Some(verb) = api.verb {
            writeln!(out, "@route {} {}", verb, api.effective_route()).unwrap();
        }
        writeln!(out, "{};", api.signature()).unwrap();
    }
    out
}
