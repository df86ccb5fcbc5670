//! Test-side generators and brute-force oracles shared by the integration
//! test targets. Nothing here calls into the combinator.

#![allow(dead_code)]

use std::collections::{BTreeMap, HashSet};

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value as Json;

use stratagen::decompose::{Component, GuardRelation};
use stratagen::emit::TypedValue;
use stratagen::spec::{ApiSpec, DeclBody, Refinement, TypeRef};
use stratagen::value::{PrimitiveKind, Value};

pub const WEATHER: &str = include_str!("../data/weather.bsqapi");
pub const PEOPLE: &str = include_str!("../data/people.json");

pub const PEOPLE_IDS: [&str; 4] = [
    "696f0b92-7477-4ced-a7ef-9e63038b9fc0",
    "bb4d6e69-5be2-488c-aef0-fc0627d40cf4",
    "55a62005-0c72-4dd2-a9a6-239d9008c828",
    "37f8a128-4a0b-423c-8be3-eb13bae56554",
];

const PRIMS: [&str; 6] = ["Bool", "Nat", "Int", "String", "Percentage", "Small"];

/// A random spec with one api `run`. Field types mix primitives, refined
/// aliases, lists, maps and datatypes (including lists of datatypes and
/// variants holding lists), so guards nest.
pub fn random_spec(rng: &mut ChaCha8Rng) -> String {
    let mut text = String::from(
        "type Percentage = Nat & { invariant $value <= 100n };\ntype Small = Int & { invariant $value > -3 };\n",
    );
    let prim = |rng: &mut ChaCha8Rng| PRIMS[rng.random_range(0..PRIMS.len())].to_string();
    let n_dt = rng.random_range(1..=2);
    for d in 0..n_dt {
        let n_var = rng.random_range(2..=3);
        let variants: Vec<String> = (0..n_var)
            .map(|v| {
                let body = match rng.random_range(0..4) {
                    0 => String::new(),
                    1 | 2 => format!("field f{v}: {};", prim(rng)),
                    _ => format!("field f{v}: List<{}>;", prim(rng)),
                };
                format!("V{d}x{v} {{ {body} }}")
            })
            .collect();
        text.push_str(&format!("datatype D{d} of {};\n", variants.join(" | ")));
    }
    let n_fields = rng.random_range(1..=3);
    let fields: Vec<String> = (0..n_fields)
        .map(|i| {
            let d = rng.random_range(0..n_dt);
            let ty = match rng.random_range(0..6) {
                0 | 1 => prim(rng),
                2 => format!("List<{}>", prim(rng)),
                3 => format!("D{d}"),
                4 => format!("List<D{d}>"),
                _ => format!("Map<String, {}>", prim(rng)),
            };
            format!("field g{i}: {ty};")
        })
        .collect();
    text.push_str(&format!("entity Root {{ {} }}\n", fields.join(" ")));
    if rng.random_bool(0.3) {
        text.push_str("api run(v: Root, w: Small): Bool;\n");
    } else {
        text.push_str("api run(v: Root): Bool;\n");
    }
    text
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn guard_holds(rel: &GuardRelation, v: &Value) -> bool {
    match (rel, v) {
        (GuardRelation::SizeGreaterThan(i), Value::Int(n)) => *n > *i as i64,
        (GuardRelation::SelectorEquals(name), Value::Str(s)) => s == name,
        _ => false,
    }
}

/// True iff exactly the components whose guards hold are assigned, and every
/// assigned value comes from the component's stratum.
pub fn valid_assignment(comps: &[Component], a: &BTreeMap<String, Value>) -> bool {
    if a.keys().any(|k| !comps.iter().any(|c| c.path.as_str() == k)) {
        return false;
    }
    comps.iter().all(|c| {
        let enabled = c
            .guards
            .iter()
            .all(|g| a.get(g.subject.as_str()).is_some_and(|v| guard_holds(&g.relation, v)));
        match a.get(c.path.as_str()) {
            Some(v) => enabled && c.values.contains(v),
            None => !enabled,
        }
    })
}

pub fn pair_key(p: &str, v: &Value, q: &str, w: &Value) -> String {
    if p <= q {
        format!("{p}={v:?}|{q}={w:?}")
    } else {
        format!("{q}={w:?}|{p}={v:?}")
    }
}

/// Every value pair that occurs together in some valid complete assignment,
/// found by enumerating all assignments (each component unassigned or set to
/// one of its values).
pub fn feasible_pairs(comps: &[Component]) -> HashSet<String> {
    let n = comps.len();
    let mut choice = vec![0usize; n];
    let mut out = HashSet::new();
    loop {
        let a: BTreeMap<String, Value> = comps
            .iter()
            .zip(&choice)
            .filter(|(_, &ch)| ch > 0)
            .map(|(c, &ch)| (c.path.to_string(), c.values[ch - 1].clone()))
            .collect();
        if valid_assignment(comps, &a) {
            out.extend(assignment_pairs(&a));
        }
        let mut i = 0;
        loop {
            if i == n {
                return out;
            }
            choice[i] += 1;
            if choice[i] <= comps[i].values.len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

pub fn assignment_pairs(a: &BTreeMap<String, Value>) -> Vec<String> {
    let entries: Vec<_> = a.iter().collect();
    let mut out = Vec::new();
    for i in 0..entries.len() {
        for j in i + 1..entries.len() {
            out.push(pair_key(entries[i].0, entries[i].1, entries[j].0, entries[j].1));
        }
    }
    out
}

/// Refinement violations at the leaves of `tv`, found by walking it
/// alongside its declared type.
pub fn refinement_violations(spec: &ApiSpec, ty: &TypeRef, tv: &TypedValue) -> Vec<String> {
    let mut out = Vec::new();
    walk_refinements(spec, ty, tv, &mut Vec::new(), &mut out);
    out
}

fn walk_refinements(
    spec: &ApiSpec,
    ty: &TypeRef,
    tv: &TypedValue,
    acc: &mut Vec<Refinement>,
    out: &mut Vec<String>,
) {
    match (ty, tv) {
        (TypeRef::Primitive(k), TypedValue::Prim(v)) => {
            if !k.admits(v) {
                out.push(format!("{v} is not a {k}"));
            }
            for r in acc.iter() {
                if r.eval(v) != Ok(true) {
                    out.push(format!("{v} fails {r}"));
                }
            }
        }
        (TypeRef::List(e), TypedValue::List(xs)) => {
            for x in xs {
                walk_refinements(spec, e, x, &mut Vec::new(), out);
            }
        }
        (TypeRef::Map(k, v), TypedValue::Map(kvs)) => {
            for (a, b) in kvs {
                walk_refinements(spec, k, a, &mut Vec::new(), out);
                walk_refinements(spec, v, b, &mut Vec::new(), out);
            }
        }
        (TypeRef::Named(n), _) => match (&spec.decl(n).expect("declared").body, tv) {
            (DeclBody::Alias { target, refinement }, TypedValue::Alias { inner, .. }) => {
                let mut acc = acc.clone();
                acc.extend(refinement.iter().cloned());
                walk_refinements(spec, target, inner, &mut acc, out);
            }
            (DeclBody::ListOf(e), _) => walk_refinements(spec, &TypeRef::List(Box::new(e.clone())), tv, acc, out),
            (DeclBody::MapOf(k, v), _) => walk_refinements(
                spec,
                &TypeRef::Map(Box::new(k.clone()), Box::new(v.clone())),
                tv,
                acc,
                out,
            ),
            (DeclBody::Entity(fields), TypedValue::Entity { fields: got, .. }) => {
                for (f, (name, v)) in fields.iter().zip(got) {
                    assert_eq!(&f.name, name);
                    walk_refinements(spec, &f.ty, v, &mut Vec::new(), out);
                }
            }
            (DeclBody::Datatype(vs), TypedValue::Variant { variant, fields: got, .. }) => {
                let decl = vs.iter().find(|v| &v.name == variant).expect("declared variant");
                for (f, (_, v)) in decl.fields.iter().zip(got) {
                    walk_refinements(spec, &f.ty, v, &mut Vec::new(), out);
                }
            }
            _ => out.push(format!("shape mismatch at {n}")),
        },
        _ => out.push(format!("shape mismatch: {ty} vs {tv}")),
    }
}

/// Type-directed decoder for the wire form.
pub fn decode(spec: &ApiSpec, ty: &TypeRef, json: &Json) -> Option<TypedValue> {
    match ty {
        TypeRef::Primitive(k) => decode_prim(*k, json),
        TypeRef::List(e) => json
            .as_array()?
            .iter()
            .map(|x| decode(spec, e, x))
            .collect::<Option<Vec<_>>>()
            .map(TypedValue::List),
        TypeRef::Map(k, v) => json
            .as_array()?
            .iter()
            .map(|pair| {
                let pair = pair.as_array()?;
                if pair.len() != 2 {
                    return None;
                }
                Some((decode(spec, k, &pair[0])?, decode(spec, v, &pair[1])?))
            })
            .collect::<Option<Vec<_>>>()
            .map(TypedValue::Map),
        TypeRef::Named(n) => match &spec.decl(n)?.body {
            DeclBody::Alias { target, .. } => Some(TypedValue::Alias {
                name: n.clone(),
                inner: Box::new(decode(spec, target, json)?),
            }),
            DeclBody::ListOf(e) => decode(spec, &TypeRef::List(Box::new(e.clone())), json),
            DeclBody::MapOf(k, v) => decode(spec, &TypeRef::Map(Box::new(k.clone()), Box::new(v.clone())), json),
            DeclBody::Entity(fields) => {
                let obj = json.as_object()?;
                if obj.len() != fields.len() {
                    return None;
                }
                let fs = fields
                    .iter()
                    .map(|f| Some((f.name.clone(), decode(spec, &f.ty, obj.get(&f.name)?)?)))
                    .collect::<Option<Vec<_>>>()?;
                Some(TypedValue::Entity { name: n.clone(), fields: fs })
            }
            DeclBody::Datatype(vs) => {
                let obj = json.as_object()?;
                let tag = obj.get("type")?.as_str()?;
                let var = vs.iter().find(|v| v.name == tag)?;
                if obj.len() != var.fields.len() + 1 {
                    return None;
                }
                let fs = var
                    .fields
                    .iter()
                    .map(|f| Some((f.name.clone(), decode(spec, &f.ty, obj.get(&f.name)?)?)))
                    .collect::<Option<Vec<_>>>()?;
                Some(TypedValue::Variant { datatype: n.clone(), variant: var.name.clone(), fields: fs })
            }
        },
    }
}

fn decode_prim(k: PrimitiveKind, json: &Json) -> Option<TypedValue> {
    let v = match json {
        Json::Bool(b) if k == PrimitiveKind::Bool => Value::Bool(*b),
        Json::Number(n) if k == PrimitiveKind::Float => Value::Float(n.as_f64()?),
        Json::Number(n) if k.is_integral() => Value::Int(n.as_i64()?),
        Json::String(s) if k.is_textual() => Value::Str(s.clone()),
        _ => return None,
    };
    k.admits(&v).then_some(TypedValue::Prim(v))
}
