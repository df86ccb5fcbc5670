//! Prompt assembly for LLM-backed value generation.
//!
//! A prompt is three blocks joined in a fixed order: the local block
//! (field, owning type, primitive kind), the global block (api signature,
//! component path, traversed declarations) and, when mock data is loaded,
//! the mock block. A fixed instruction tail closes the prompt.

use serde::Serialize;

use super::MockDataset;
use crate::decompose::Component;
use crate::spec::{ApiSig, ApiSpec};

const INSTRUCTIONS: &str = "\
Respond with the JSON array only: one flat array of literal values, with no \
surrounding text, keys or nesting. Pick values that fall into distinct \
partitions of the input space, including typical values, boundaries and \
edge cases.";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PromptContext {
    pub local: String,
    pub global: String,
    pub mock: Option<String>,
}

impl PromptContext {
    /// The text sent to the model.
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.local);
        out.push_str("\n\n");
        out.push_str(&self.global);
        if let Some(m) = &self.mock {
            out.push_str("\n\n");
            out.push_str(m);
        }
        out.push_str("\n\n");
        out.push_str(INSTRUCTIONS);
        out.push('\n');
        out
    }
}

pub fn build_prompt(
    c: &Component,
    spec: &ApiSpec,
    api: &ApiSig,
    mock: Option<&MockDataset>,
) -> PromptContext {
    let kind = c
        .primitive_kind()
        .map(|k| k.to_string())
        .unwrap_or_else(|| "Nat".into());
    let enclosing = if c.context.enclosing.is_empty() {
        kind.clone()
    } else {
        c.context.enclosing.clone()
    };
    let mut local = format!(
        "Given a field, named {} in a type named {}, with data type {}, generate a JSON array \
         containing ONLY test values strictly matching the specified data type and format, and \
         within acceptable ranges.",
        c.context.field, enclosing, kind
    );
    if !c.refinements.is_empty() {
        let rs: Vec<String> = c.refinements.iter().map(|r| r.to_string()).collect();
        local.push_str(&format!(" Every value must satisfy: {}.", rs.join(" and ")));
    }

    let mut seen = Vec::new();
    let mut defs = Vec::new();
    for name in &c.context.trail {
        if seen.contains(name) {
            continue;
        }
        seen.push(name.clone());
        if let Some(d) = spec.decl(name) {
            defs.push(d.one_line());
        }
    }
    let global = format!(
        "The API that this value is being generated for has the following signature:\n{}\n\n\
         The value is on the path:\n{}\n\n\
         The traversed type definitions are:\n{}",
        api.signature(),
        c.path,
        if defs.is_empty() {
            "(none)".to_string()
        } else {
            defs.join("\n")
        }
    );

    let mock = mock.map(|m| {
        format!(
            "Additionally, the codebase uses mocked data sources, sample mock data is given below. \
             You may use these values as appropriate to construct test inputs.\n{}",
            m.render()
        )
    });
    PromptContext { local, global, mock }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decompose::{decompose_api, DecompositionConfig};
    use crate::spec::parse_spec;

    const WEATHER: &str = include_str!("../../tests/data/weather.bsqapi");

    #[test]
    fn local_and_global_blocks() {
        let spec = parse_spec(WEATHER).unwrap();
        let api = &spec.apis[0];
        let d = decompose_api(&spec, api, &DecompositionConfig::default()).unwrap();
        let low = d.find("v.temp.low.value").unwrap();
        let ctx = build_prompt(low, &spec, api, None);
        for needle in ["named low", "type named TempRange", "data type Int"] {
            assert!(ctx.local.contains(needle), "{needle}");
        }
        assert!(ctx.global.contains("api recommendedActivities(v: Forecast): List<String>"));
        assert!(ctx.global.contains("v.temp.low.value"));
        let f = ctx.global.find("entity Forecast {").unwrap();
        let t = ctx.global.find("entity TempRange {").unwrap();
        let a = ctx.global.find("type Fahrenheit = Int;").unwrap();
        assert!(f < t && t < a);
        assert!(ctx.mock.is_none());

        let rendered = ctx.render();
        assert!(rendered.find("Given a field").unwrap() < rendered.find("The API").unwrap());
    }

    #[test]
    fn refinement_is_mentioned() {
        let spec = parse_spec(WEATHER).unwrap();
        let api = &spec.apis[0];
        let d = decompose_api(&spec, api, &DecompositionConfig::default()).unwrap();
        let p = d.find("v.hourlyPrecip[0].value").unwrap();
        let ctx = build_prompt(p, &spec, api, None);
        assert!(ctx.local.contains("$value <= 100n"));
        assert!(ctx.global.contains("type Percentage = Nat & { invariant $value <= 100n };"));
    }

    #[test]
    fn root_primitive_shows_alias_chain_only() {
        let spec = parse_spec(
            "type Percentage = Nat & { invariant $value <= 100n }; entity Unused { field x: Int; }
             api setLevel(level: Percentage): Bool;",
        )
        .unwrap();
        let api = &spec.apis[0];
        let d = decompose_api(&spec, api, &DecompositionConfig::default()).unwrap();
        let ctx = build_prompt(&d.components[0], &spec, api, None);
        let defs = ctx.global.split("The traversed type definitions are:\n").nth(1).unwrap();
        assert_eq!(defs, "type Percentage = Nat & { invariant $value <= 100n };");
        assert!(ctx.local.contains("named level in a type named Percentage"));
    }

    #[test]
    fn mock_block_embeds_records() {
        let spec = parse_spec("entity Person { field id: UUID; } api get(p: Person): Bool;").unwrap();
        let api = &spec.apis[0];
        let d = decompose_api(&spec, api, &DecompositionConfig::default()).unwrap();
        let mock = MockDataset::from_json_str(include_str!("../../tests/data/people.json"), "p").unwrap();
        let ctx = build_prompt(&d.components[0], &spec, api, Some(&mock));
        let block = ctx.mock.as_deref().unwrap();
        assert!(block.contains("696f0b92-7477-4ced-a7ef-9e63038b9fc0"));
        assert!(ctx.render().ends_with(&format!("{INSTRUCTIONS}\n")));
    }
}
