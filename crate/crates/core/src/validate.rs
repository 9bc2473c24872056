//! Version-aware semantic checks.

use std::collections::HashSet;

use crate::diagnostic::{sort_by_position, Code, Diagnostic, Span};
use crate::metamodel::{versions_with_attribute, ElementKind, MetamodelRegistry, ValueShape};
use crate::model::{is_identifier, Attribute, AttributeValue, Element, Model, PortRef};
use crate::resolve::{resolve_in, resolve_port, unresolved};

/// All findings for `model` against its own schema version, ordered by span.
pub fn validate(model: &Model) -> Vec<Diagnostic> {
    let mut v = Validator {
        model,
        registry: MetamodelRegistry::for_version(model.version),
        out: Vec::new(),
    };
    v.siblings(&model.roots, &[]);
    let mut chain = Vec::new();
    for root in &model.roots {
        v.element(root, None, &mut chain);
    }
    sort_by_position(&mut v.out);
    v.out
}

struct Validator<'m> {
    model: &'m Model,
    registry: &'static MetamodelRegistry,
    out: Vec<Diagnostic>,
}

fn span_of(e: &Element) -> Span {
    e.span.unwrap_or_else(Span::start)
}

fn attr_span(a: &Attribute, owner: &Element) -> Span {
    a.span.unwrap_or_else(|| span_of(owner))
}

fn path_of(chain: &[&Element]) -> String {
    chain.iter().map(|e| format!("/{}", e.short_name)).collect()
}

impl<'m> Validator<'m> {
    fn push(&mut self, code: Code, span: Span, message: String) {
        self.out.push(Diagnostic::new(code, span, message));
    }

    fn siblings(&mut self, children: &'m [Element], chain: &[&'m Element]) {
        let mut seen = HashSet::new();
        for child in children {
            if !seen.insert(child.short_name.as_str()) {
                let place = if chain.is_empty() {
                    "at top level".to_string()
                } else {
                    format!("in {}", path_of(chain))
                };
                self.push(
                    Code::E004,
                    span_of(child),
                    format!("duplicate name '{}' {place}", child.short_name),
                );
            }
        }
    }

    fn element(&mut self, e: &'m Element, parent: Option<ElementKind>, chain: &mut Vec<&'m Element>) {
        let version = self.model.version;
        if !is_identifier(&e.short_name) {
            self.push(Code::E001, span_of(e), format!("invalid shortName '{}'", e.short_name));
        }
        if !self.registry.allows_child(parent, e.kind) {
            let message = match parent {
                None => format!(
                    "{} '{}' is not allowed at top level in schema {version}; expected EAPackage",
                    e.kind, e.short_name
                ),
                Some(p) => format!(
                    "{} '{}' is not allowed inside {p} in schema {version}",
                    e.kind, e.short_name
                ),
            };
            self.push(Code::E006, span_of(e), message);
        }

        chain.push(e);
        self.attributes(e, chain);
        self.siblings(&e.children, chain);
        for child in &e.children {
            self.element(child, Some(e.kind), chain);
        }
        chain.pop();
    }

    fn attributes(&mut self, e: &'m Element, chain: &[&'m Element]) {
        let version = self.model.version;
        let mut seen = HashSet::new();
        for attr in &e.attributes {
            let span = attr_span(attr, e);
            if !seen.insert(attr.name.as_str()) {
                self.push(
                    Code::E004,
                    span,
                    format!("attribute '{}' given more than once", attr.name),
                );
                continue;
            }
            let Some(spec) = self.registry.attribute(e.kind, &attr.name) else {
                let elsewhere = versions_with_attribute(e.kind, &attr.name);
                let message = if elsewhere.is_empty() {
                    format!(
                        "attribute '{}' is not defined for {} in schema {version}",
                        attr.name, e.kind
                    )
                } else {
                    let list: Vec<&str> = elsewhere.iter().map(|v| v.id()).collect();
                    format!(
                        "attribute '{}' is not necessary for the current version ({version}); {} only has it in schema {}",
                        attr.name,
                        e.kind,
                        list.join(", ")
                    )
                };
                self.push(Code::E006, span, message);
                continue;
            };
            match (spec.shape, &attr.value) {
                (ValueShape::Direction, AttributeValue::Direction(_)) => {}
                (ValueShape::Reference(kind), AttributeValue::Reference(r)) => {
                    if resolve_in(&self.model.roots, chain, r, Some(kind)).is_none() {
                        self.out.push(unresolved(&self.model.roots, chain, r, Some(kind), span));
                    }
                }
                (ValueShape::PortReference, AttributeValue::Port(p)) => {
                    if let Err(message) = resolve_port(&self.model.roots, chain, p) {
                        self.push(Code::E003, span, message);
                    }
                }
                (shape, _) => {
                    let expected = match shape {
                        ValueShape::Direction => "a direction (in, out, inout)".to_string(),
                        ValueShape::Reference(kind) => format!("a reference to a {kind}"),
                        ValueShape::PortReference => "a port reference".to_string(),
                    };
                    self.push(
                        Code::E006,
                        span,
                        format!("attribute '{}' of {} expects {expected}", attr.name, e.kind),
                    );
                }
            }
        }
        for spec in self.registry.attributes_of(e.kind) {
            if spec.required && e.attribute(spec.name).is_none() {
                self.push(
                    Code::E006,
                    span_of(e),
                    format!(
                        "{} '{}' is missing required attribute '{}' (schema {version})",
                        e.kind, e.short_name, spec.name
                    ),
                );
            }
        }
        if e.kind == ElementKind::FunctionConnector {
            self.connector_directions(e, chain);
        }
    }

    /// `from` must be able to send and `to` able to receive. For the enclosing
    /// type's own ports the roles flip: an `in` port feeds the inside.
    fn connector_directions(&mut self, e: &'m Element, chain: &[&'m Element]) {
        for (attr_name, sends) in [("from", true), ("to", false)] {
            let Some(attr) = e.attributes.iter().find(|a| a.name == attr_name) else {
                continue;
            };
            let AttributeValue::Port(endpoint) = &attr.value else {
                continue;
            };
            let Ok(port) = resolve_port(&self.model.roots, chain, endpoint) else {
                continue;
            };
            let Some(direction) = port.direction() else {
                continue;
            };
            let needs_send = sends == endpoint_is_part(endpoint);
            let ok = if needs_send {
                direction.can_send()
            } else {
                direction.can_receive()
            };
            if !ok {
                let expected = if needs_send { "out or inout" } else { "in or inout" };
                self.out.push(Diagnostic::new(
                    Code::W102,
                    attr_span(attr, e),
                    format!(
                        "connector '{}' uses '{endpoint}' ({direction}) as its '{attr_name}' endpoint; expected {expected}",
                        e.short_name
                    ),
                ));
            }
        }
    }
}

fn endpoint_is_part(p: &PortRef) -> bool {
    p.part.is_some()
}
