//! Code templates and fresh names.

use crate::format::emit;
use crate::metamodel::{ElementKind, MetamodelRegistry, SchemaVersion, ValueShape};
use crate::model::{AttributeValue, Direction, Element, Model, PortRef, QualifiedRef};

/// `<Kind><n>` for the smallest `n >= 1` not used by a child of `scope`.
pub fn fresh_name(scope: &Element, kind: ElementKind) -> String {
    fresh_name_among(&scope.children, kind)
}

/// Like [`fresh_name`], for an explicit sibling list (e.g. model roots).
pub fn fresh_name_among(siblings: &[Element], kind: ElementKind) -> String {
    let taken = |candidate: &str| siblings.iter().any(|s| s.short_name == candidate);
    (1..)
        .map(|n| format!("{}{n}", kind.keyword()))
        .find(|c| !taken(c))
        .expect("unbounded range")
}

fn placeholder(attr: &str, shape: ValueShape) -> AttributeValue {
    match shape {
        ValueShape::Direction => AttributeValue::Direction(Direction::In),
        ValueShape::Reference(_) => AttributeValue::Reference(QualifiedRef::relative([match attr {
            "type" => "Type",
            _ => "Target",
        }])),
        ValueShape::PortReference => AttributeValue::Port(PortRef {
            part: Some(if attr == "from" { "source" } else { "target" }.to_string()),
            port: "port".to_string(),
        }),
    }
}

fn skeleton(kind: ElementKind, name: &str) -> Element {
    let registry = MetamodelRegistry::for_version(SchemaVersion::latest());
    let mut e = Element::new(kind, name);
    for spec in registry.attributes_of(kind).iter().filter(|s| s.required) {
        e.set_attribute(spec.name, placeholder(spec.name, spec.shape));
    }
    e
}

/// Canonical skeleton for a new element: required attributes filled with
/// placeholder values, formatted like the formatter would.
pub fn expand_template(kind: ElementKind, name: &str) -> String {
    emit(&Model::new(SchemaVersion::latest()).with_root(skeleton(kind, name)))
}

/// Insert text used by completion: like [`expand_template`] without the
/// trailing newline, and with an open body for kinds that hold children.
pub fn completion_snippet(kind: ElementKind, name: &str, version: SchemaVersion) -> String {
    let e = skeleton(kind, name);
    let can_hold = !MetamodelRegistry::for_version(version)
        .children_of(Some(kind))
        .is_empty();
    if e.attributes.is_empty() && can_hold {
        format!("{} {name} {{\n    \n}}", kind.keyword())
    } else {
        let mut text = expand_template(kind, name);
        text.pop();
        text
    }
}
