use std::fmt;
use std::hash::{Hash, Hasher};

/// One step from a parameter root towards a primitive leaf.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Segment {
    /// `.name`
    Field(String),
    /// `[i]`
    Index(usize),
    /// `@length`
    Length,
    /// `@type`
    TypeTag,
    /// `@Name`
    Variant(String),
    /// `.value`: the primitive underneath an alias (or a bare root).
    Value,
}

impl fmt::Display for Segment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Segment::Field(n) => write!(f, ".{n}"),
            Segment::Index(i) => write!(f, "[{i}]"),
            Segment::Length => f.write_str("@length"),
            Segment::TypeTag => f.write_str("@type"),
            Segment::Variant(n) => write!(f, "@{n}"),
            Segment::Value => f.write_str(".value"),
        }
    }
}

/// A component's address. Identity is the rendered text.
#[derive(Debug, Clone)]
pub struct ComponentPath {
    root: String,
    segments: Vec<Segment>,
    rendered: String,
}

impl ComponentPath {
    pub fn new(root: &str) -> Self {
        ComponentPath {
            root: root.to_string(),
            segments: Vec::new(),
            rendered: root.to_string(),
        }
    }

    pub fn root(&self) -> &str {
        &self.root
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn as_str(&self) -> &str {
        &self.rendered
    }

    pub fn child(&self, seg: Segment) -> Self {
        let mut rendered = self.rendered.clone();
        rendered.push_str(&seg.to_string());
        let mut segments = self.segments.clone();
        segments.push(seg);
        ComponentPath {
            root: self.root.clone(),
            segments,
            rendered,
        }
    }

    /// The last named field on the path, skipping synthetic steps and the
    /// alias `.value`.
    pub fn last_field(&self) -> Option<&str> {
        self.segments.iter().rev().find_map(|s| match s {
            Segment::Field(n) => Some(n.as_str()),
            _ => None,
        })
    }

    pub fn ends_synthetic(&self) -> bool {
        matches!(
            self.segments.last(),
            Some(Segment::Length | Segment::TypeTag)
        )
    }

    /// Parses the rendered notation. `.value` parses as [`Segment::Value`].
    pub fn parse(text: &str) -> Option<Self> {
        let ident_end = |s: &str| {
            s.find(|c: char| !(c.is_alphanumeric() || c == '_'))
                .unwrap_or(s.len())
        };
        let end = ident_end(text);
        if end == 0 {
            return None;
        }
        let mut path = ComponentPath::new(&text[..end]);
        let mut rest = &text[end..];
        while !rest.is_empty() {
            let seg = if let Some(r) = rest.strip_prefix('.') {
                let n = ident_end(r);
                if n == 0 {
                    return None;
                }
                rest = &r[n..];
                match &r[..n] {
                    "value" => Segment::Value,
                    name => Segment::Field(name.to_string()),
                }
            } else if let Some(r) = rest.strip_prefix('[') {
                let close = r.find(']')?;
                let idx = r[..close].parse().ok()?;
                rest = &r[close + 1..];
                Segment::Index(idx)
            } else {
                let r = rest.strip_prefix('@')?;
                let n = ident_end(r);
                if n == 0 {
                    return None;
                }
                rest = &r[n..];
                match &r[..n] {
                    "length" => Segment::Length,
                    "type" => Segment::TypeTag,
                    name => Segment::Variant(name.to_string()),
                }
            };
            path = path.child(seg);
        }
        Some(path)
    }
}

impl PartialEq for ComponentPath {
    fn eq(&self, other: &Self) -> bool {
        self.rendered == other.rendered
    }
}

impl Eq for ComponentPath {}

impl Hash for ComponentPath {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.rendered.hash(state);
    }
}

impl fmt::Display for ComponentPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.rendered)
    }
}
