//! In-memory model.

use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use crate::diagnostic::Span;
use crate::metamodel::{ElementKind, SchemaVersion};

/// `true` if `s` matches `[A-Za-z_][A-Za-z0-9_]*`.
pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    In,
    Out,
    InOut,
}

impl Direction {
    pub const ALL: [Direction; 3] = [Direction::In, Direction::Out, Direction::InOut];

    pub fn as_str(self) -> &'static str {
        match self {
            Direction::In => "in",
            Direction::Out => "out",
            Direction::InOut => "inout",
        }
    }

    pub fn xml_literal(self) -> &'static str {
        match self {
            Direction::In => "IN",
            Direction::Out => "OUT",
            Direction::InOut => "INOUT",
        }
    }

    pub fn from_xml_literal(s: &str) -> Option<Direction> {
        Direction::ALL.into_iter().find(|d| d.xml_literal() == s)
    }

    pub fn can_send(self) -> bool {
        matches!(self, Direction::Out | Direction::InOut)
    }

    pub fn can_receive(self) -> bool {
        matches!(self, Direction::In | Direction::InOut)
    }
}

impl FromStr for Direction {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Direction::ALL.into_iter().find(|d| d.as_str() == s).ok_or(())
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A path of shortNames. Relative refs print dotted (`Pkg.SubsystemA`) and
/// are resolved through the enclosing scopes; absolute refs print as slash
/// paths (`/Pkg/SubsystemA`) and always start at a root.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QualifiedRef {
    pub segments: Vec<String>,
    pub absolute: bool,
}

impl QualifiedRef {
    pub fn relative<I, S>(segments: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        QualifiedRef {
            segments: segments.into_iter().map(Into::into).collect(),
            absolute: false,
        }
    }

    pub fn absolute<I, S>(segments: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        QualifiedRef {
            segments: segments.into_iter().map(Into::into).collect(),
            absolute: true,
        }
    }

    /// Parses `/A/B` into an absolute ref. Empty segments are rejected.
    pub fn parse_path(path: &str) -> Option<Self> {
        let rest = path.strip_prefix('/')?;
        let segments: Vec<&str> = rest.split('/').collect();
        segments
            .iter()
            .all(|s| is_identifier(s))
            .then(|| QualifiedRef::absolute(segments))
    }

    /// Parses `A.B` into a relative ref.
    pub fn parse_dotted(text: &str) -> Option<Self> {
        let segments: Vec<&str> = text.split('.').collect();
        segments
            .iter()
            .all(|s| is_identifier(s))
            .then(|| QualifiedRef::relative(segments))
    }

    pub fn dotted(&self) -> String {
        self.segments.join(".")
    }

    pub fn path(&self) -> String {
        let mut out = String::new();
        for s in &self.segments {
            out.push('/');
            out.push_str(s);
        }
        out
    }
}

impl fmt::Display for QualifiedRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.absolute {
            f.write_str(&self.path())
        } else {
            f.write_str(&self.dotted())
        }
    }
}

/// Connector endpoint: a port of the enclosing type (`port`) or a port of
/// one of its parts (`part.port`).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PortRef {
    pub part: Option<String>,
    pub port: String,
}

impl PortRef {
    pub fn parse(text: &str) -> Option<PortRef> {
        let segments: Vec<&str> = text.split('.').collect();
        if !segments.iter().all(|s| is_identifier(s)) {
            return None;
        }
        match segments.as_slice() {
            [port] => Some(PortRef {
                part: None,
                port: port.to_string(),
            }),
            [part, port] => Some(PortRef {
                part: Some(part.to_string()),
                port: port.to_string(),
            }),
            _ => None,
        }
    }
}

impl fmt::Display for PortRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.part {
            Some(part) => write!(f, "{part}.{}", self.port),
            None => f.write_str(&self.port),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum AttributeValue {
    Direction(Direction),
    Reference(QualifiedRef),
    Port(PortRef),
}

impl fmt::Display for AttributeValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AttributeValue::Direction(d) => d.fmt(f),
            AttributeValue::Reference(r) => r.fmt(f),
            AttributeValue::Port(p) => p.fmt(f),
        }
    }
}

/// Comments carried for the formatter. Ignored by model equality.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Comments {
    /// Full-line comments immediately before the construct.
    pub leading: Vec<String>,
    /// Comment on the same line after the construct's first line.
    pub trailing: Option<String>,
}

impl Comments {
    pub fn is_empty(&self) -> bool {
        self.leading.is_empty() && self.trailing.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Attribute {
    pub name: String,
    pub value: AttributeValue,
    pub span: Option<Span>,
    pub comments: Comments,
}

impl Attribute {
    pub fn new(name: impl Into<String>, value: AttributeValue) -> Self {
        Attribute {
            name: name.into(),
            value,
            span: None,
            comments: Comments::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Element {
    pub kind: ElementKind,
    pub short_name: String,
    /// In source order; names are unique within one element.
    pub attributes: Vec<Attribute>,
    pub children: Vec<Element>,
    /// Points at the shortName in the originating file.
    pub span: Option<Span>,
    /// Byte range between `{` and `}` when parsed from text.
    pub body: Option<Range<usize>>,
    pub comments: Comments,
    /// Comment after the closing brace, on the same line.
    pub closing_comment: Option<String>,
    /// Comments inside the body that precede no attribute or child.
    pub dangling_comments: Vec<String>,
}

impl Element {
    pub fn new(kind: ElementKind, short_name: impl Into<String>) -> Self {
        Element {
            kind,
            short_name: short_name.into(),
            attributes: Vec::new(),
            children: Vec::new(),
            span: None,
            body: None,
            comments: Comments::default(),
            closing_comment: None,
            dangling_comments: Vec::new(),
        }
    }

    pub fn with_attribute(mut self, name: &str, value: AttributeValue) -> Self {
        self.set_attribute(name, value);
        self
    }

    pub fn with_child(mut self, child: Element) -> Self {
        self.children.push(child);
        self
    }

    pub fn attribute(&self, name: &str) -> Option<&AttributeValue> {
        self.attributes.iter().find(|a| a.name == name).map(|a| &a.value)
    }

    /// Replaces the value of an existing attribute in place, or appends.
    pub fn set_attribute(&mut self, name: &str, value: AttributeValue) {
        match self.attributes.iter_mut().find(|a| a.name == name) {
            Some(attr) => attr.value = value,
            None => self.attributes.push(Attribute::new(name, value)),
        }
    }

    pub fn remove_attribute(&mut self, name: &str) -> Option<Attribute> {
        let idx = self.attributes.iter().position(|a| a.name == name)?;
        Some(self.attributes.remove(idx))
    }

    pub fn child(&self, name: &str) -> Option<&Element> {
        self.children.iter().find(|c| c.short_name == name)
    }

    pub fn direction(&self) -> Option<Direction> {
        match self.attribute("direction") {
            Some(AttributeValue::Direction(d)) => Some(*d),
            _ => None,
        }
    }

    /// True when the element prints in the short `Kind Name;` form.
    pub fn is_empty(&self) -> bool {
        self.attributes.is_empty() && self.children.is_empty() && self.dangling_comments.is_empty()
    }

    /// Number of elements in this subtree, including `self`.
    pub fn count(&self) -> usize {
        1 + self.children.iter().map(Element::count).sum::<usize>()
    }

    /// Pre-order walk.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a Element)) {
        f(self);
        for c in &self.children {
            c.walk(f);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Model {
    pub roots: Vec<Element>,
    pub version: SchemaVersion,
    /// Comments after the last root element.
    pub dangling_comments: Vec<String>,
}

impl Model {
    pub fn new(version: SchemaVersion) -> Self {
        Model {
            roots: Vec::new(),
            version,
            dangling_comments: Vec::new(),
        }
    }

    pub fn with_root(mut self, root: Element) -> Self {
        self.roots.push(root);
        self
    }

    pub fn element_count(&self) -> usize {
        self.roots.iter().map(Element::count).sum()
    }

    pub fn walk<'a>(&'a self, mut f: impl FnMut(&'a Element)) {
        for r in &self.roots {
            r.walk(&mut f);
        }
    }

    /// Follows an index path (child indices from the roots).
    pub fn at_path(&self, path: &[usize]) -> Option<&Element> {
        let (first, rest) = path.split_first()?;
        let mut current = self.roots.get(*first)?;
        for idx in rest {
            current = current.children.get(*idx)?;
        }
        Some(current)
    }
}

/// Deep structural equality: kinds, names, attribute sets (order-insensitive)
/// and children (order-sensitive). Spans, comments and version are ignored.
pub fn model_equal(a: &Model, b: &Model) -> bool {
    elements_equal(&a.roots, &b.roots)
}

fn elements_equal(a: &[Element], b: &[Element]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| element_equal(x, y))
}

pub fn element_equal(a: &Element, b: &Element) -> bool {
    a.kind == b.kind
        && a.short_name == b.short_name
        && a.attributes.len() == b.attributes.len()
        && a.attributes
            .iter()
            .all(|attr| b.attribute(&attr.name) == Some(&attr.value))
        && elements_equal(&a.children, &b.children)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn port(name: &str, d: Direction) -> Element {
        Element::new(ElementKind::FunctionFlowPort, name).with_attribute("direction", AttributeValue::Direction(d))
    }

    #[test]
    fn identifiers() {
        assert!(is_identifier("_a1"));
        assert!(is_identifier("pFDA"));
        assert!(!is_identifier("1a"));
        assert!(!is_identifier(""));
        assert!(!is_identifier("a-b"));
    }

    #[test]
    fn ref_forms() {
        let r = QualifiedRef::parse_path("/Pkg/SubsystemA").unwrap();
        assert!(r.absolute);
        assert_eq!(r.to_string(), "/Pkg/SubsystemA");
        assert_eq!(r.dotted(), "Pkg.SubsystemA");
        assert!(QualifiedRef::parse_path("Pkg/A").is_none());
        assert!(QualifiedRef::parse_path("/Pkg//A").is_none());
        assert_eq!(QualifiedRef::parse_dotted("A.B").unwrap().to_string(), "A.B");
        assert_eq!(PortRef::parse("sub1.out1").unwrap().to_string(), "sub1.out1");
        assert!(PortRef::parse("a.b.c").is_none());
    }

    #[test]
    fn equality_ignores_spans_and_attribute_order() {
        let a = Model::new(SchemaVersion::V2_2)
            .with_root(Element::new(ElementKind::EAPackage, "P").with_child(port("p", Direction::In)));
        let mut b = a.clone();
        b.roots[0].span = Some(Span::new(3, 4, 1, 20));
        b.roots[0].children[0].span = Some(Span::new(9, 9, 1, 99));
        assert!(model_equal(&a, &a));
        assert!(model_equal(&a, &b));

        let mut c = a.clone();
        c.roots[0].children[0].set_attribute("direction", AttributeValue::Direction(Direction::Out));
        assert!(!model_equal(&a, &c));

        let conn = |order: &[&str]| {
            let mut e = Element::new(ElementKind::FunctionConnector, "c");
            for name in order {
                e.set_attribute(
                    name,
                    AttributeValue::Port(PortRef::parse(&format!("x.{name}")).unwrap()),
                );
            }
            Model::new(SchemaVersion::V2_2).with_root(Element::new(ElementKind::EAPackage, "P").with_child(e))
        };
        assert!(model_equal(&conn(&["from", "to"]), &conn(&["to", "from"])));
    }

    #[test]
    fn child_order_matters() {
        let p = |names: &[&str]| {
            let mut e = Element::new(ElementKind::EAPackage, "P");
            for n in names {
                e.children.push(Element::new(ElementKind::EAPackage, *n));
            }
            Model::new(SchemaVersion::V2_2).with_root(e)
        };
        assert!(!model_equal(&p(&["A", "B"]), &p(&["B", "A"])));
    }
}
