//! EAXML reader and writer.
//!
//! Interchange contract:
//!
//! ```text
//! <?xml version="1.0" encoding="UTF-8"?>
//! <EAXML xmlns="http://east-adl.info/VERSION">
//!   <TOP-LEVEL-PACKAGES>
//!     <EA-PACKAGE>
//!       <SHORT-NAME>P</SHORT-NAME>
//!       <ELEMENTS> ... </ELEMENTS>
//!     </EA-PACKAGE>
//!   </TOP-LEVEL-PACKAGES>
//! </EAXML>
//! ```
//!
//! Every element starts with its `SHORT-NAME`, followed by attribute leaf
//! tags and then child containers. Children are grouped into `SUB-PACKAGES`,
//! `ELEMENTS`, `PORTS`, `PARTS` and `CONNECTORS` by kind; a container is
//! written once per run of consecutive children that share it, so child order
//! survives a round trip. Empty containers are omitted. Indentation is two
//! spaces. References are written as absolute slash paths and read back in
//! the shortest dotted form that resolves to the same element.

use quick_xml::escape::{escape, resolve_predefined_entity};
use quick_xml::events::Event;
use quick_xml::Reader;

use crate::diagnostic::{has_errors, Code, Diagnostic, Span};
use crate::metamodel::{supported_versions, ElementKind, SchemaVersion, ValueShape, NAMESPACE_PREFIX};
use crate::model::{Attribute, AttributeValue, Direction, Element, Model, PortRef, QualifiedRef};
use crate::resolve::{minimal_ref, resolve_in, unresolved};
use crate::validate::validate;

const ROOT: &str = "EAXML";
const TOP_LEVEL: &str = "TOP-LEVEL-PACKAGES";
const SHORT_NAME: &str = "SHORT-NAME";

/// Attribute name ↔ leaf tag.
const ATTRIBUTE_TAGS: &[(&str, &str)] = &[
    ("direction", "DIRECTION"),
    ("type", "TYPE-TREF"),
    ("hardwareComponent", "HARDWARE-COMPONENT-TREF"),
    ("from", "FROM-PORT-IREF"),
    ("to", "TO-PORT-IREF"),
];

pub fn attribute_tag(name: &str) -> Option<&'static str> {
    ATTRIBUTE_TAGS.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

fn attribute_for_tag(tag: &str) -> Option<&'static str> {
    ATTRIBUTE_TAGS.iter().find(|(_, t)| *t == tag).map(|(n, _)| *n)
}

/// Container tag that groups children of `kind`.
pub fn container_tag(kind: ElementKind) -> &'static str {
    match kind {
        ElementKind::EAPackage => "SUB-PACKAGES",
        ElementKind::DesignFunctionType
        | ElementKind::AnalysisFunctionType
        | ElementKind::HardwareComponentType
        | ElementKind::HardwareFunctionType => "ELEMENTS",
        ElementKind::FunctionFlowPort => "PORTS",
        ElementKind::DesignFunctionPrototype => "PARTS",
        ElementKind::FunctionConnector => "CONNECTORS",
    }
}

fn is_container_tag(tag: &str) -> bool {
    ElementKind::ALL.iter().any(|k| container_tag(*k) == tag)
}

// ---------------------------------------------------------------------------
// Version detection

/// Reads the schema version from the `xmlns` attribute on line 2. Nothing
/// past the second line is examined.
pub fn detect_version(xml: &str) -> Result<SchemaVersion, Diagnostic> {
    let line2 = xml.lines().nth(1).unwrap_or("");
    let line2_offset = xml.find('\n').map(|i| i + 1).unwrap_or(xml.len());
    let Some(attr_at) = line2.find("xmlns=\"") else {
        return Err(Diagnostic::new(
            Code::E005,
            Span::new(2, 1, 0, line2_offset.min(xml.len())),
            format!(
                "missing schema version: no xmlns on line 2; supported: {}",
                supported_versions()
            ),
        ));
    };
    let value_start = attr_at + "xmlns=\"".len();
    let value = line2[value_start..].split('"').next().unwrap_or("");
    let column = line2[..value_start].chars().count() as u32 + 1;
    let span = Span::new(2, column, value.chars().count() as u32, line2_offset + value_start);
    let Some(version) = value.strip_prefix(NAMESPACE_PREFIX) else {
        return Err(Diagnostic::new(
            Code::E005,
            span,
            format!(
                "unrecognized namespace '{value}'; expected {NAMESPACE_PREFIX}<version> with one of: {}",
                supported_versions()
            ),
        ));
    };
    SchemaVersion::parse(version).map_err(|e| Diagnostic::new(Code::E005, span, e.to_string()))
}

// ---------------------------------------------------------------------------
// Writer

struct Writer<'m> {
    roots: &'m [Element],
    out: String,
    errors: Vec<Diagnostic>,
}

impl<'m> Writer<'m> {
    fn line(&mut self, depth: usize, text: &str) {
        for _ in 0..depth {
            self.out.push_str("  ");
        }
        self.out.push_str(text);
        self.out.push('\n');
    }

    fn leaf(&mut self, depth: usize, tag: &str, value: &str) {
        let text = format!("<{tag}>{}</{tag}>", escape(value));
        self.line(depth, &text);
    }

    fn element(&mut self, e: &'m Element, depth: usize, chain: &mut Vec<&'m Element>) {
        let tag = e.kind.xml_tag();
        self.line(depth, &format!("<{tag}>"));
        self.leaf(depth + 1, SHORT_NAME, &e.short_name);
        chain.push(e);
        for attr in &e.attributes {
            self.attribute(e, attr, depth + 1, chain);
        }
        let mut open: Option<&'static str> = None;
        for child in &e.children {
            let container = container_tag(child.kind);
            if open != Some(container) {
                if let Some(prev) = open {
                    self.line(depth + 1, &format!("</{prev}>"));
                }
                self.line(depth + 1, &format!("<{container}>"));
                open = Some(container);
            }
            self.element(child, depth + 2, chain);
        }
        if let Some(prev) = open {
            self.line(depth + 1, &format!("</{prev}>"));
        }
        chain.pop();
        self.line(depth, &format!("</{tag}>"));
    }

    fn attribute(&mut self, owner: &Element, attr: &Attribute, depth: usize, chain: &[&'m Element]) {
        let span = attr.span.or(owner.span).unwrap_or_else(Span::start);
        let Some(tag) = attribute_tag(&attr.name) else {
            self.errors.push(Diagnostic::new(
                Code::E006,
                span,
                format!("attribute '{}' has no EAXML representation", attr.name),
            ));
            return;
        };
        match &attr.value {
            AttributeValue::Direction(d) => self.leaf(depth, tag, d.xml_literal()),
            AttributeValue::Reference(r) => {
                let want =
                    crate::metamodel::attribute_in_any_version(owner.kind, &attr.name).and_then(|spec| {
                        match spec.shape {
                            ValueShape::Reference(k) => Some(k),
                            _ => None,
                        }
                    });
                match resolve_in(self.roots, chain, r, want) {
                    Some(found) => {
                        let path = found.qualified().path();
                        self.leaf(depth, tag, &path);
                    }
                    None => self.errors.push(unresolved(self.roots, chain, r, want, span)),
                }
            }
            AttributeValue::Port(p) => self.leaf(depth, tag, &p.to_string()),
        }
    }
}

/// Serializes `model`. References must resolve, since they are written as
/// absolute paths; otherwise the E003 findings are returned instead.
pub fn to_eaxml(model: &Model) -> Result<String, Vec<Diagnostic>> {
    let mut w = Writer {
        roots: &model.roots,
        out: String::with_capacity(model.element_count() * 96 + 128),
        errors: Vec::new(),
    };
    w.out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    w.line(0, &format!("<{ROOT} xmlns=\"{}\">", model.version.namespace()));
    if !model.roots.is_empty() {
        w.line(1, &format!("<{TOP_LEVEL}>"));
        let mut chain = Vec::new();
        for root in &model.roots {
            w.element(root, 2, &mut chain);
        }
        w.line(1, &format!("</{TOP_LEVEL}>"));
    }
    w.line(0, &format!("</{ROOT}>"));
    if w.errors.is_empty() {
        Ok(w.out)
    } else {
        Err(w.errors)
    }
}

// ---------------------------------------------------------------------------
// Reader

/// A model read from EAXML.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub model: Model,
    /// Version declared by the file.
    pub version: SchemaVersion,
    /// Version mismatch, structural and validation findings.
    pub diagnostics: Vec<Diagnostic>,
}

struct LineIndex {
    starts: Vec<usize>,
}

impl LineIndex {
    fn new(text: &str) -> Self {
        let mut starts = vec![0];
        starts.extend(text.match_indices('\n').map(|(i, _)| i + 1));
        LineIndex { starts }
    }

    fn span(&self, text: &str, offset: usize, len: usize) -> Span {
        let offset = offset.min(text.len());
        let line = self.starts.partition_point(|s| *s <= offset) - 1;
        let start = self.starts[line];
        let column = text
            .get(start..offset)
            .map(|s| s.chars().count())
            .unwrap_or(offset - start);
        Span::new(line as u32 + 1, column as u32 + 1, len as u32, offset)
    }
}

enum Frame {
    Root,
    TopLevel,
    Element(Box<Element>),
    Container(String),
    Leaf { tag: String, text: String, span: Span },
    Skip,
}

struct XmlReader<'x> {
    xml: &'x str,
    lines: LineIndex,
    stack: Vec<Frame>,
    roots: Vec<Element>,
    diagnostics: Vec<Diagnostic>,
}

impl<'x> XmlReader<'x> {
    fn span(&self, offset: usize, len: usize) -> Span {
        self.lines.span(self.xml, offset, len)
    }

    fn unknown(&mut self, tag: &str, span: Span, inside: &str) {
        self.diagnostics.push(Diagnostic::new(
            Code::E006,
            span,
            format!("unknown or misplaced tag <{tag}> inside {inside}"),
        ));
        self.stack.push(Frame::Skip);
    }

    fn start(&mut self, tag: &str, offset: usize) -> Result<(), Diagnostic> {
        let span = self.span(offset, tag.chars().count() + 2);
        let context = match self.stack.last() {
            None => {
                if tag != ROOT {
                    return Err(Diagnostic::new(
                        Code::E001,
                        span,
                        format!("expected root element <{ROOT}>, found <{tag}>"),
                    ));
                }
                self.stack.push(Frame::Root);
                return Ok(());
            }
            Some(Frame::Skip) => {
                self.stack.push(Frame::Skip);
                return Ok(());
            }
            Some(Frame::Root) => {
                if tag == TOP_LEVEL {
                    self.stack.push(Frame::TopLevel);
                    return Ok(());
                }
                format!("<{ROOT}>")
            }
            Some(Frame::TopLevel) => {
                if tag == ElementKind::EAPackage.xml_tag() {
                    self.open_element(ElementKind::EAPackage, span);
                    return Ok(());
                }
                format!("<{TOP_LEVEL}>")
            }
            Some(Frame::Container(container)) => {
                if let Some(kind) = ElementKind::from_xml_tag(tag).filter(|k| container_tag(*k) == container) {
                    self.open_element(kind, span);
                    return Ok(());
                }
                format!("<{container}>")
            }
            Some(Frame::Element(e)) => {
                if tag == SHORT_NAME || attribute_for_tag(tag).is_some() {
                    self.stack.push(Frame::Leaf {
                        tag: tag.to_string(),
                        text: String::new(),
                        span,
                    });
                    return Ok(());
                }
                if is_container_tag(tag) {
                    self.stack.push(Frame::Container(tag.to_string()));
                    return Ok(());
                }
                format!("<{}>", e.kind.xml_tag())
            }
            Some(Frame::Leaf { tag: leaf, .. }) => format!("<{leaf}>"),
        };
        self.unknown(tag, span, &context);
        Ok(())
    }

    fn open_element(&mut self, kind: ElementKind, span: Span) {
        let mut e = Element::new(kind, "");
        e.span = Some(span);
        self.stack.push(Frame::Element(Box::new(e)));
    }

    fn parent_element(&mut self) -> Option<&mut Element> {
        self.stack.iter_mut().rev().find_map(|f| match f {
            Frame::Element(e) => Some(e.as_mut()),
            _ => None,
        })
    }

    fn end(&mut self) -> Result<(), Diagnostic> {
        match self.stack.pop() {
            Some(Frame::Element(e)) => {
                let e = *e;
                if e.short_name.is_empty() {
                    self.diagnostics.push(Diagnostic::new(
                        Code::E001,
                        e.span.unwrap_or_else(Span::start),
                        format!("<{}> has no <{SHORT_NAME}>", e.kind.xml_tag()),
                    ));
                }
                match self.stack.last() {
                    Some(Frame::TopLevel) => self.roots.push(e),
                    _ => {
                        if let Some(parent) = self.parent_element() {
                            parent.children.push(e);
                        }
                    }
                }
            }
            Some(Frame::Leaf { tag, text, span }) => self.leaf(&tag, text.trim(), span),
            _ => {}
        }
        Ok(())
    }

    fn leaf(&mut self, tag: &str, text: &str, span: Span) {
        let bad = |what: &str| Diagnostic::new(Code::E001, span, format!("invalid {what} '{text}' in <{tag}>"));
        if tag == SHORT_NAME {
            if !crate::model::is_identifier(text) {
                self.diagnostics.push(bad("shortName"));
            }
            if let Some(e) = self.parent_element() {
                e.short_name = text.to_string();
            }
            return;
        }
        let name = attribute_for_tag(tag).expect("leaf frames are only opened for known tags");
        let value = match name {
            "direction" => Direction::from_xml_literal(text).map(AttributeValue::Direction),
            "type" | "hardwareComponent" => QualifiedRef::parse_path(text).map(AttributeValue::Reference),
            _ => PortRef::parse(text).map(AttributeValue::Port),
        };
        let Some(value) = value else {
            let what = match name {
                "direction" => "direction",
                "type" | "hardwareComponent" => "reference path",
                _ => "port reference",
            };
            self.diagnostics.push(bad(what));
            return;
        };
        let Some(e) = self.parent_element() else {
            return;
        };
        if e.attribute(name).is_some() {
            let d = Diagnostic::new(Code::E004, span, format!("attribute '{name}' given more than once"));
            self.diagnostics.push(d);
            return;
        }
        e.attributes.push(Attribute {
            name: name.to_string(),
            value,
            span: Some(span),
            comments: Default::default(),
        });
    }

    fn text(&mut self, text: &str, offset: usize) {
        match self.stack.last_mut() {
            Some(Frame::Leaf { text: buf, .. }) => buf.push_str(text),
            Some(Frame::Skip) => {}
            _ if text.trim().is_empty() => {}
            _ => {
                let span = self.span(offset, text.trim().chars().count());
                self.diagnostics.push(Diagnostic::new(
                    Code::E001,
                    span,
                    format!("unexpected text '{}'", text.trim()),
                ));
            }
        }
    }
}

fn read_structure(xml: &str) -> Result<(Vec<Element>, Vec<Diagnostic>), Diagnostic> {
    let mut r = XmlReader {
        xml,
        lines: LineIndex::new(xml),
        stack: Vec::new(),
        roots: Vec::new(),
        diagnostics: Vec::new(),
    };
    let mut reader = Reader::from_str(xml);
    let malformed = |r: &XmlReader, pos: u64, message: String| {
        Diagnostic::new(Code::E001, r.span(pos as usize, 0), format!("malformed XML: {message}"))
    };
    loop {
        let before = reader.buffer_position() as usize;
        let event = match reader.read_event() {
            Ok(ev) => ev,
            Err(e) => return Err(malformed(&r, reader.error_position(), e.to_string())),
        };
        match event {
            Event::Start(s) => {
                let tag = String::from_utf8_lossy(s.name().as_ref()).into_owned();
                r.start(&tag, before)?;
            }
            Event::Empty(s) => {
                let tag = String::from_utf8_lossy(s.name().as_ref()).into_owned();
                r.start(&tag, before)?;
                r.end()?;
            }
            Event::End(_) => r.end()?,
            Event::Text(t) => {
                let text = t.decode().map_err(|e| malformed(&r, before as u64, e.to_string()))?;
                r.text(&text, before);
            }
            Event::CData(t) => {
                let text = String::from_utf8_lossy(&t).into_owned();
                r.text(&text, before);
            }
            Event::GeneralRef(g) => {
                let resolved = match g.resolve_char_ref() {
                    Ok(Some(c)) => c.to_string(),
                    _ => {
                        let name = g.decode().map_err(|e| malformed(&r, before as u64, e.to_string()))?;
                        match resolve_predefined_entity(&name) {
                            Some(s) => s.to_string(),
                            None => return Err(malformed(&r, before as u64, format!("unknown entity '&{name};'"))),
                        }
                    }
                };
                r.text(&resolved, before);
            }
            Event::Eof => break,
            Event::Decl(_) | Event::Comment(_) | Event::PI(_) | Event::DocType(_) => {}
        }
    }
    if !r.stack.is_empty() {
        return Err(malformed(
            &r,
            xml.len() as u64,
            "unexpected end of document".to_string(),
        ));
    }
    Ok((r.roots, r.diagnostics))
}

/// Rewrites absolute reference paths to the shortest dotted form that
/// resolves to the same element from where they are written.
fn relativize(model: &mut Model) {
    fn collect<'m>(
        roots: &'m [Element],
        e: &'m Element,
        index: &mut Vec<usize>,
        chain: &mut Vec<&'m Element>,
        out: &mut Vec<(Vec<usize>, usize, QualifiedRef)>,
    ) {
        chain.push(e);
        for (ai, attr) in e.attributes.iter().enumerate() {
            let AttributeValue::Reference(r) = &attr.value else {
                continue;
            };
            let want = crate::metamodel::attribute_in_any_version(e.kind, &attr.name).and_then(|s| match s.shape {
                ValueShape::Reference(k) => Some(k),
                _ => None,
            });
            let rel = match resolve_in(roots, &[], r, want) {
                Some(found) => minimal_ref(roots, chain, &found.path, want),
                None => QualifiedRef::relative(r.segments.iter().cloned()),
            };
            out.push((index.clone(), ai, rel));
        }
        for (ci, child) in e.children.iter().enumerate() {
            index.push(ci);
            collect(roots, child, index, chain, out);
            index.pop();
        }
        chain.pop();
    }

    let mut rewrites = Vec::new();
    for (ri, root) in model.roots.iter().enumerate() {
        collect(&model.roots, root, &mut vec![ri], &mut Vec::new(), &mut rewrites);
    }
    for (path, ai, rel) in rewrites {
        let mut e = &mut model.roots[path[0]];
        for ci in &path[1..] {
            e = &mut e.children[*ci];
        }
        e.attributes[ai].value = AttributeValue::Reference(rel);
    }
}

/// Loads an EAXML document. Fatal problems (undetectable version, malformed
/// XML) yield `Err`. A version different from `expected` is reported as E005
/// and the model is still returned, tagged with the declared version and
/// validated against it.
pub fn from_eaxml(xml: &str, expected: Option<SchemaVersion>) -> Result<Loaded, Vec<Diagnostic>> {
    let version = detect_version(xml).map_err(|d| vec![d])?;
    let (roots, mut diagnostics) = read_structure(xml).map_err(|d| vec![d])?;
    let mut model = Model {
        roots,
        version,
        dangling_comments: Vec::new(),
    };
    relativize(&mut model);
    if let Some(expected) = expected.filter(|e| *e != version) {
        let span = detect_span(xml);
        diagnostics.push(
            Diagnostic::new(
                Code::E005,
                span,
                format!("file declares schema {version} but tool expects {expected}; run migrate"),
            )
            .with_hint(format!(
                "convert it with `eatxt migrate --to {expected}` or import with --auto-migrate"
            )),
        );
    }
    if !has_errors(&diagnostics) {
        diagnostics.extend(validate(&model));
    }
    crate::diagnostic::sort_by_position(&mut diagnostics);
    Ok(Loaded {
        model,
        version,
        diagnostics,
    })
}

fn detect_span(xml: &str) -> Span {
    let line2_offset = xml.find('\n').map(|i| i + 1).unwrap_or(0);
    let line2 = xml[line2_offset..].lines().next().unwrap_or("");
    match line2.find("xmlns=\"") {
        Some(at) => {
            let start = at + "xmlns=\"".len();
            let len = line2[start..].split('"').next().unwrap_or("").chars().count();
            Span::new(
                2,
                line2[..start].chars().count() as u32 + 1,
                len as u32,
                line2_offset + start,
            )
        }
        None => Span::new(2, 1, 0, line2_offset),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::model_equal;
    use crate::parser::parse;

    const MINIMAL_22: &str = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<EAXML xmlns=\"http://east-adl.info/2.2\">\n  <TOP-LEVEL-PACKAGES>\n    <EA-PACKAGE>\n      <SHORT-NAME>P</SHORT-NAME>\n    </EA-PACKAGE>\n  </TOP-LEVEL-PACKAGES>\n</EAXML>\n";

    #[test]
    fn detects_versions() {
        let doc = |v: &str| {
            format!(
                "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<EAXML xmlns=\"http://east-adl.info/{v}\">\n</EAXML>\n"
            )
        };
        assert_eq!(detect_version(&doc("2.2")).unwrap(), SchemaVersion::V2_2);
        assert_eq!(detect_version(&doc("2.1.12")).unwrap(), SchemaVersion::V2_1_12);
        let err = detect_version(&doc("9.9")).unwrap_err();
        assert_eq!(err.code, Code::E005);
        assert_eq!(err.message, "unsupported schema version '9.9'; supported: 2.1.12, 2.2");
        assert_eq!(err.span.line, 2);
        assert_eq!(detect_version("<EAXML>").unwrap_err().code, Code::E005);
    }

    #[test]
    fn detection_ignores_the_body() {
        let xml = format!("{}<garbage", &MINIMAL_22[..MINIMAL_22.find("  <TOP").unwrap()]);
        assert_eq!(detect_version(&xml).unwrap(), SchemaVersion::V2_2);
    }

    #[test]
    fn minimal_document() {
        let (m, _) = parse("EAPackage P;", SchemaVersion::V2_2);
        let xml = to_eaxml(&m).unwrap();
        assert_eq!(xml, MINIMAL_22);
        assert_eq!(
            xml.lines().nth(1).unwrap(),
            "<EAXML xmlns=\"http://east-adl.info/2.2\">"
        );
        let loaded = from_eaxml(&xml, Some(SchemaVersion::V2_2)).unwrap();
        assert!(loaded.diagnostics.is_empty());
        assert!(model_equal(&loaded.model, &m));
    }

    #[test]
    fn type_ref_is_absolute_in_xml_and_minimal_in_text() {
        let src = "EAPackage P {\n    DesignFunctionType SubsystemA;\n    DesignFunctionType Top {\n        DesignFunctionPrototype sub {\n            type SubsystemA;\n        }\n    }\n}\n";
        let (m, d) = parse(src, SchemaVersion::V2_2);
        assert!(d.is_empty());
        let xml = to_eaxml(&m).unwrap();
        assert!(xml.contains("<TYPE-TREF>/P/SubsystemA</TYPE-TREF>"), "{xml}");
        let back = from_eaxml(&xml, None).unwrap();
        assert!(back.diagnostics.is_empty(), "{:?}", back.diagnostics);
        assert!(model_equal(&back.model, &m));
    }

    #[test]
    fn hardware_component_written_for_2_1_12() {
        let src = "EAPackage P { HardwareComponentType HC; HardwareFunctionType HF { hardwareComponent HC; } }";
        let (m, _) = parse(src, SchemaVersion::V2_1_12);
        let xml = to_eaxml(&m).unwrap();
        assert!(xml.contains("<HARDWARE-COMPONENT-TREF>/P/HC</HARDWARE-COMPONENT-TREF>"));
        assert!(xml.contains("xmlns=\"http://east-adl.info/2.1.12\""));

        let loaded = from_eaxml(&xml, Some(SchemaVersion::V2_2)).unwrap();
        assert_eq!(loaded.version, SchemaVersion::V2_1_12);
        assert_eq!(loaded.diagnostics.len(), 1);
        assert_eq!(loaded.diagnostics[0].code, Code::E005);
        assert_eq!(
            loaded.diagnostics[0].message,
            "file declares schema 2.1.12 but tool expects 2.2; run migrate"
        );

        let as_22 = xml.replace("2.1.12", "2.2");
        let loaded = from_eaxml(&as_22, Some(SchemaVersion::V2_2)).unwrap();
        assert_eq!(loaded.diagnostics.len(), 1);
        assert_eq!(loaded.diagnostics[0].code, Code::E006);
        assert!(loaded.diagnostics[0]
            .message
            .contains("attribute 'hardwareComponent' is not necessary for the current version"));
    }

    #[test]
    fn unresolved_reference_refuses_export() {
        let src = "EAPackage P { DesignFunctionType T { DesignFunctionPrototype x { type Missing; } } }";
        let (m, _) = parse(src, SchemaVersion::V2_2);
        let errs = to_eaxml(&m).unwrap_err();
        assert_eq!(errs[0].code, Code::E003);
    }

    #[test]
    fn interleaved_children_keep_order() {
        let src = "EAPackage P {\n    DesignFunctionType Leaf { FunctionFlowPort i { direction in; } }\n    DesignFunctionType T {\n        FunctionFlowPort a { direction in; }\n        DesignFunctionPrototype x { type Leaf; }\n        FunctionFlowPort b { direction out; }\n    }\n    EAPackage Sub;\n    DesignFunctionType U;\n}\n";
        let (m, d) = parse(src, SchemaVersion::V2_2);
        assert!(d.is_empty());
        let xml = to_eaxml(&m).unwrap();
        assert_eq!(xml.matches("<PORTS>").count(), 3);
        let back = from_eaxml(&xml, None).unwrap();
        assert!(back.diagnostics.is_empty(), "{:?}", back.diagnostics);
        assert!(model_equal(&back.model, &m));
    }

    #[test]
    fn malformed_xml_reports_position() {
        let xml = MINIMAL_22.replace("</EA-PACKAGE>", "</EA-PACKAG>");
        let errs = from_eaxml(&xml, None).unwrap_err();
        assert_eq!(errs[0].code, Code::E001);
        assert!(errs[0].span.line >= 5, "{:?}", errs[0]);
    }

    #[test]
    fn unknown_tag_is_e006_and_skipped() {
        let xml = MINIMAL_22.replace(
            "      <SHORT-NAME>P</SHORT-NAME>\n",
            "      <SHORT-NAME>P</SHORT-NAME>\n      <ADMIN-DATA><X>1</X></ADMIN-DATA>\n",
        );
        let loaded = from_eaxml(&xml, None).unwrap();
        assert_eq!(loaded.diagnostics.len(), 1);
        assert_eq!(loaded.diagnostics[0].code, Code::E006);
        assert_eq!(loaded.diagnostics[0].span.line, 6);
        assert_eq!(loaded.model.roots[0].short_name, "P");
    }

    #[test]
    fn entities_in_values() {
        let xml = MINIMAL_22.replace("<SHORT-NAME>P</SHORT-NAME>", "<SHORT-NAME>&#80;</SHORT-NAME>");
        let loaded = from_eaxml(&xml, None).unwrap();
        assert_eq!(loaded.model.roots[0].short_name, "P");
    }

    #[test]
    fn empty_model_document() {
        let xml = to_eaxml(&Model::new(SchemaVersion::V2_2)).unwrap();
        assert_eq!(
            xml,
            "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<EAXML xmlns=\"http://east-adl.info/2.2\">\n</EAXML>\n"
        );
        assert!(from_eaxml(&xml, None).unwrap().model.roots.is_empty());
    }
}
