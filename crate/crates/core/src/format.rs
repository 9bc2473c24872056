//! Canonical printer.
//!
//! Style: four spaces per level, `{` on the header line, one attribute or
//! child per line with attributes first, `Kind Name;` for empty elements, a
//! single trailing newline and no trailing whitespace. Comments are printed
//! where the parser attached them.

use crate::diagnostic::{has_errors, Diagnostic};
use crate::metamodel::SchemaVersion;
use crate::model::{Attribute, Element, Model};
use crate::parser::parse;

const INDENT: &str = "    ";

/// Prints `model` in canonical style. An empty model prints as `""`.
pub fn emit(model: &Model) -> String {
    let mut out = String::new();
    for root in &model.roots {
        emit_element(&mut out, root, 0);
    }
    for c in &model.dangling_comments {
        out.push_str(c);
        out.push('\n');
    }
    out
}

/// Parses and re-emits `source`. If parsing reports any error the input is
/// returned unchanged together with the diagnostics.
pub fn format(source: &str, version: SchemaVersion) -> (String, Vec<Diagnostic>) {
    let (model, diagnostics) = parse(source, version);
    if has_errors(&diagnostics) {
        return (source.to_string(), diagnostics);
    }
    (emit(&model), diagnostics)
}

fn indent(out: &mut String, level: usize) {
    for _ in 0..level {
        out.push_str(INDENT);
    }
}

fn line_with_comment(out: &mut String, comment: Option<&str>) {
    if let Some(c) = comment {
        out.push(' ');
        out.push_str(c);
    }
    out.push('\n');
}

fn leading(out: &mut String, comments: &[String], level: usize) {
    for c in comments {
        indent(out, level);
        out.push_str(c);
        out.push('\n');
    }
}

fn emit_attribute(out: &mut String, attr: &Attribute, level: usize) {
    leading(out, &attr.comments.leading, level);
    indent(out, level);
    out.push_str(&attr.name);
    out.push(' ');
    out.push_str(&attr.value.to_string());
    out.push(';');
    line_with_comment(out, attr.comments.trailing.as_deref());
}

fn emit_element(out: &mut String, e: &Element, level: usize) {
    leading(out, &e.comments.leading, level);
    indent(out, level);
    out.push_str(e.kind.keyword());
    out.push(' ');
    out.push_str(&e.short_name);
    if e.is_empty() {
        out.push(';');
        let joined = match (&e.comments.trailing, &e.closing_comment) {
            (Some(a), Some(b)) => Some(format!("{a} {b}")),
            (a, b) => a.clone().or_else(|| b.clone()),
        };
        line_with_comment(out, joined.as_deref());
        return;
    }
    out.push_str(" {");
    line_with_comment(out, e.comments.trailing.as_deref());
    for attr in &e.attributes {
        emit_attribute(out, attr, level + 1);
    }
    for child in &e.children {
        emit_element(out, child, level + 1);
    }
    leading(out, &e.dangling_comments, level + 1);
    indent(out, level);
    out.push('}');
    line_with_comment(out, e.closing_comment.as_deref());
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metamodel::ElementKind;
    use crate::model::{AttributeValue, Direction};

    #[test]
    fn nested_empty_package() {
        let m = Model::new(SchemaVersion::V2_2)
            .with_root(Element::new(ElementKind::EAPackage, "P").with_child(Element::new(ElementKind::EAPackage, "Q")));
        assert_eq!(emit(&m), "EAPackage P {\n    EAPackage Q;\n}\n");
    }

    #[test]
    fn empty_model() {
        assert_eq!(emit(&Model::new(SchemaVersion::V2_2)), "");
    }

    #[test]
    fn port_two_levels_down() {
        let m = Model::new(SchemaVersion::V2_2).with_root(
            Element::new(ElementKind::EAPackage, "P").with_child(
                Element::new(ElementKind::DesignFunctionType, "FDA").with_child(
                    Element::new(ElementKind::FunctionFlowPort, "speed")
                        .with_attribute("direction", AttributeValue::Direction(Direction::In)),
                ),
            ),
        );
        let expected = "\
EAPackage P {
    DesignFunctionType FDA {
        FunctionFlowPort speed {
            direction in;
        }
    }
}
";
        assert_eq!(emit(&m), expected);
    }

    #[test]
    fn normalizes_layout() {
        let (out, d) = format("EAPackage   P{EAPackage Q{}}", SchemaVersion::V2_2);
        assert!(d.is_empty());
        assert_eq!(out, "EAPackage P {\n    EAPackage Q;\n}\n");
        let (again, _) = format(&out, SchemaVersion::V2_2);
        assert_eq!(again, out);
    }

    #[test]
    fn leaves_broken_input_alone() {
        let src = "shortName P {\n  EAPackage   Q;\n}";
        let (out, d) = format(src, SchemaVersion::V2_2);
        assert_eq!(out, src);
        assert_eq!(d.len(), 1);
    }

    #[test]
    fn comments_survive() {
        let src = "// top\nEAPackage P{ // header\n// about Q\nEAPackage Q;   // q\n  // dangling\n}// end\n// eof";
        let (out, d) = format(src, SchemaVersion::V2_2);
        assert!(d.is_empty());
        let expected = "\
// top
EAPackage P { // header
    // about Q
    EAPackage Q; // q
    // dangling
} // end
// eof
";
        assert_eq!(out, expected);
        assert_eq!(format(&out, SchemaVersion::V2_2).0, out);
    }

    #[test]
    fn comment_in_empty_body_keeps_block_or_joins() {
        let (out, _) = format("EAPackage P { // a\n} // b\n", SchemaVersion::V2_2);
        assert_eq!(out, "EAPackage P; // a // b\n");
        assert_eq!(format(&out, SchemaVersion::V2_2).0, out);
        let (out, _) = format("EAPackage P {\n // inside\n}\n", SchemaVersion::V2_2);
        assert_eq!(out, "EAPackage P {\n    // inside\n}\n");
    }
}
