use super::{Component, ComponentKind};

fn kind_text(c: &Component) -> String {
    match &c.kind {
        ComponentKind::Primitive(k) => {
            let mut s = k.to_string();
            for r in &c.refinements {
                s.push_str(" & ");
                s.push_str(&r.to_string());
            }
            s
        }
        ComponentKind::Length { .. } => {
            let dom: Vec<String> = c.values.iter().map(|v| v.canonical()).collect();
            format!("Nat {{{}}}", dom.join(", "))
        }
        ComponentKind::Selector(vs) => format!("Selector {{{}}}", vs.join(", ")),
    }
}

/// One line per component: `PATH  KIND  {guards}`.
pub fn dump_components(components: &[Component]) -> String {
    let mut out = String::new();
    for c in components {
        let guards: Vec<String> = c.guards.iter().map(|g| g.to_string()).collect();
        out.push_str(&format!(
            "{}  {}  {{{}}}\n",
            c.path,
            kind_text(c),
            guards.join(" && ")
        ));
    }
    out
}
