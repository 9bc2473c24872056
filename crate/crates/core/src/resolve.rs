//! Qualified names and cross-reference resolution.
//!
//! A relative reference is resolved by looking its first segment up in the
//! children of the scope element, then in each enclosing element outward, then
//! among the roots. The innermost level at which the whole path navigates (and,
//! for typed references, ends at an element of the expected kind) wins.
//! Absolute references start at the roots.

use crate::diagnostic::{Code, Diagnostic, Span};
use crate::metamodel::ElementKind;
use crate::model::{Element, Model, PortRef, QualifiedRef};

/// Where a reference is written.
#[derive(Debug, Clone, Copy)]
pub enum Scope<'m> {
    Root,
    Element(&'m Element),
}

/// A resolved target together with its absolute path of shortNames.
#[derive(Debug, Clone)]
pub struct Resolved<'m> {
    pub element: &'m Element,
    pub path: Vec<&'m str>,
}

impl Resolved<'_> {
    pub fn qualified(&self) -> QualifiedRef {
        QualifiedRef::absolute(self.path.iter().copied())
    }
}

/// The chain of elements from a root down to `target` (inclusive), found by
/// identity.
pub fn chain_to<'m>(model: &'m Model, target: &Element) -> Option<Vec<&'m Element>> {
    fn search<'m>(e: &'m Element, target: &Element, chain: &mut Vec<&'m Element>) -> bool {
        chain.push(e);
        if std::ptr::eq(e, target) || e.children.iter().any(|c| search(c, target, chain)) {
            return true;
        }
        chain.pop();
        false
    }
    let mut chain = Vec::new();
    model
        .roots
        .iter()
        .any(|r| search(r, target, &mut chain))
        .then_some(chain)
}

/// Absolute path of `element`, or `None` if it is not part of `model`.
pub fn qualified_name(model: &Model, element: &Element) -> Option<QualifiedRef> {
    chain_to(model, element).map(|chain| QualifiedRef::absolute(chain.iter().map(|e| e.short_name.as_str())))
}

fn navigate<'m>(start: &'m Element, rest: &[String], path: &mut Vec<&'m str>) -> Option<&'m Element> {
    let mut current = start;
    path.push(&current.short_name);
    for seg in rest {
        current = current.child(seg)?;
        path.push(&current.short_name);
    }
    Some(current)
}

fn try_level<'m>(
    candidates: &'m [Element],
    prefix: &[&'m Element],
    r: &QualifiedRef,
    want: Option<ElementKind>,
) -> Option<Resolved<'m>> {
    let (first, rest) = r.segments.split_first()?;
    candidates.iter().filter(|c| &c.short_name == first).find_map(|start| {
        let mut path: Vec<&str> = prefix.iter().map(|e| e.short_name.as_str()).collect();
        let element = navigate(start, rest, &mut path)?;
        want.is_none_or(|k| element.kind == k)
            .then_some(Resolved { element, path })
    })
}

/// Resolves `r` written inside the last element of `chain` (or at the root
/// when `chain` is empty).
pub fn resolve_in<'m>(
    roots: &'m [Element],
    chain: &[&'m Element],
    r: &QualifiedRef,
    want: Option<ElementKind>,
) -> Option<Resolved<'m>> {
    if !r.absolute {
        for depth in (0..chain.len()).rev() {
            let found = try_level(&chain[depth].children, &chain[..=depth], r, want);
            if found.is_some() {
                return found;
            }
        }
    }
    try_level(roots, &[], r, want)
}

/// E003 for a reference that did not resolve, naming the first segment that
/// could not be found.
pub fn unresolved(
    roots: &[Element],
    chain: &[&Element],
    r: &QualifiedRef,
    want: Option<ElementKind>,
    span: Span,
) -> Diagnostic {
    let mut failing = r.segments.first().cloned().unwrap_or_default();
    for n in 1..r.segments.len() {
        let prefix = QualifiedRef {
            segments: r.segments[..n].to_vec(),
            absolute: r.absolute,
        };
        if resolve_in(roots, chain, &prefix, None).is_some() {
            failing = r.segments[n].clone();
        } else {
            break;
        }
    }
    let whole_found = resolve_in(roots, chain, r, None);
    let message = match (want, whole_found) {
        (Some(kind), Some(found)) => format!(
            "cannot resolve '{r}' as {kind} ('{}' is a {})",
            found.qualified(),
            found.element.kind
        ),
        _ if r.segments.len() > 1 => format!("cannot resolve '{failing}' in '{r}'"),
        _ => format!("cannot resolve '{failing}'"),
    };
    Diagnostic::new(Code::E003, span, message)
}

/// Resolves a reference from `scope`. Untyped; see [`resolve_kind`].
pub fn resolve<'m>(model: &'m Model, r: &QualifiedRef, scope: Scope<'_>) -> Result<&'m Element, Diagnostic> {
    resolve_kind(model, r, scope, None)
}

pub fn resolve_kind<'m>(
    model: &'m Model,
    r: &QualifiedRef,
    scope: Scope<'_>,
    want: Option<ElementKind>,
) -> Result<&'m Element, Diagnostic> {
    let chain = match scope {
        Scope::Root => Vec::new(),
        Scope::Element(e) => chain_to(model, e).ok_or_else(|| {
            Diagnostic::new(
                Code::E003,
                Span::start(),
                format!("scope '{}' is not part of the model", e.short_name),
            )
        })?,
    };
    let span = match scope {
        Scope::Element(e) => e.span.unwrap_or_else(Span::start),
        Scope::Root => Span::start(),
    };
    resolve_in(&model.roots, &chain, r, want)
        .map(|found| found.element)
        .ok_or_else(|| unresolved(&model.roots, &chain, r, want, span))
}

/// Shortest dotted suffix of `target` that resolves back to `target` from the
/// scope `chain`. Falls back to the full path.
pub fn minimal_ref(roots: &[Element], chain: &[&Element], target: &[&str], want: Option<ElementKind>) -> QualifiedRef {
    for start in (0..target.len()).rev() {
        let candidate = QualifiedRef::relative(target[start..].iter().copied());
        if let Some(found) = resolve_in(roots, chain, &candidate, want) {
            if found.path == target {
                return candidate;
            }
        }
    }
    QualifiedRef::relative(target.iter().copied())
}

/// Resolves a connector endpoint. `chain` ends at the connector, so the
/// enclosing type is the element before it.
pub fn resolve_port<'m>(
    roots: &'m [Element],
    chain: &[&'m Element],
    endpoint: &PortRef,
) -> Result<&'m Element, String> {
    let owner = match chain.len() {
        n if n >= 2 => chain[n - 2],
        _ => return Err(format!("connector endpoint '{endpoint}' has no enclosing type")),
    };
    let holder = match &endpoint.part {
        None => owner,
        Some(part_name) => {
            let part = owner
                .children
                .iter()
                .find(|c| c.kind == ElementKind::DesignFunctionPrototype && &c.short_name == part_name)
                .ok_or_else(|| format!("cannot resolve '{part_name}' in '{endpoint}'"))?;
            let type_ref = match part.attribute("type") {
                Some(crate::model::AttributeValue::Reference(r)) => r,
                _ => return Err(format!("part '{part_name}' has no type")),
            };
            let mut part_chain = chain[..chain.len() - 1].to_vec();
            part_chain.push(part);
            resolve_in(roots, &part_chain, type_ref, Some(ElementKind::DesignFunctionType))
                .ok_or_else(|| format!("cannot resolve type of part '{part_name}'"))?
                .element
        }
    };
    holder
        .children
        .iter()
        .find(|c| c.kind == ElementKind::FunctionFlowPort && c.short_name == endpoint.port)
        .ok_or_else(|| format!("cannot resolve '{}' in '{endpoint}'", endpoint.port))
}
