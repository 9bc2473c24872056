//! Content assist at a byte offset.
//!
//! At the start of a statement the proposals are the element kinds the
//! metamodel allows in the enclosing body (as snippets with a fresh name)
//! plus the attribute names of the enclosing element. After an attribute
//! name they are the values that fit it: direction literals, references to
//! elements of the expected kind in their shortest resolving form, or
//! connector endpoints.

use crate::lexer::{lex, Token, TokenKind, TriviaKind};
use crate::metamodel::{attribute_in_any_version, ElementKind, MetamodelRegistry, SchemaVersion, ValueShape};
use crate::model::{AttributeValue, Direction, Element, Model};
use crate::parser::parse;
use crate::resolve::{minimal_ref, resolve_in};

use super::template::{completion_snippet, fresh_name_among};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompletionKind {
    /// An element skeleton.
    Template,
    /// An attribute name.
    Attribute,
    /// An enumeration literal.
    Literal,
    Reference,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompletionItem {
    pub label: String,
    pub insert_text: String,
    pub kind: CompletionKind,
}

impl CompletionItem {
    fn plain(label: impl Into<String>, kind: CompletionKind) -> Self {
        let label = label.into();
        CompletionItem {
            insert_text: label.clone(),
            label,
            kind,
        }
    }
}

fn is_boundary(t: Option<&Token<'_>>) -> bool {
    match t {
        None => true,
        Some(t) => matches!(t.kind, TokenKind::LBrace | TokenKind::RBrace | TokenKind::Semi),
    }
}

fn end_of(t: &Token<'_>) -> usize {
    t.span.offset + t.text.len()
}

/// Chain of real elements whose body encloses `offset`, outermost first.
fn enclosing<'m>(model: &'m Model, offset: usize) -> Vec<&'m Element> {
    let mut chain = Vec::new();
    let mut level: &'m [Element] = &model.roots;
    'descend: loop {
        for e in level {
            if let Some(body) = &e.body {
                if body.start <= offset && offset <= body.end {
                    chain.push(e);
                    level = &e.children;
                    continue 'descend;
                }
            }
        }
        return chain;
    }
}

/// Proposals at byte `offset` of `source`. Offsets past the end are clamped.
pub fn complete(source: &str, offset: usize, version: SchemaVersion) -> Vec<CompletionItem> {
    let mut offset = offset.min(source.len());
    while !source.is_char_boundary(offset) {
        offset -= 1;
    }
    let (tokens, _) = lex(source);

    // Inside a comment nothing is proposed.
    let in_comment = tokens.iter().flat_map(|t| &t.leading).any(|tr| {
        tr.kind == TriviaKind::Comment && tr.span.offset < offset && offset <= tr.span.offset + tr.text.len()
    });
    if in_comment {
        return Vec::new();
    }

    let before: Vec<&Token<'_>> = tokens
        .iter()
        .filter(|t| t.kind != TokenKind::Eof && end_of(t) <= offset)
        .collect();
    let (partial, settled) = match before.last() {
        Some(t) if t.kind.is_word() && end_of(t) == offset => (t.text, &before[..before.len() - 1]),
        _ => ("", &before[..]),
    };
    // A word that continues past the cursor is cut at the cursor.
    let partial = tokens
        .iter()
        .find(|t| t.kind.is_word() && t.span.offset < offset && offset < end_of(t))
        .map(|t| &t.text[..offset - t.span.offset])
        .unwrap_or(partial);

    let (model, _) = parse(source, version);
    let chain = enclosing(&model, offset);
    let registry = MetamodelRegistry::for_version(version);
    let container = chain.last().copied();

    // Trailing run of words and dots typed since the last boundary.
    let run_start = settled
        .iter()
        .rposition(|t| !(t.kind.is_word() || t.kind == TokenKind::Dot))
        .map_or(0, |i| i + 1);
    let run = &settled[run_start..];
    let boundary_before_run = is_boundary(run_start.checked_sub(1).map(|i| settled[i]));
    if !boundary_before_run {
        return Vec::new();
    }

    let mut items = if run.is_empty() {
        statement_items(&model, container, registry, version)
    } else {
        let Some(elem) = container else {
            return Vec::new();
        };
        let Some(spec) = attribute_in_any_version(elem.kind, run[0].text) else {
            return Vec::new();
        };
        let typed: String = run[1..].iter().map(|t| t.text).collect();
        let prefix = format!("{typed}{partial}");
        let mut values = value_items(&model, &chain, spec.shape);
        values.retain(|i| i.label.starts_with(&prefix));
        return values;
    };
    items.retain(|i| i.label.starts_with(partial));
    items
}

fn statement_items(
    model: &Model,
    container: Option<&Element>,
    registry: &MetamodelRegistry,
    version: SchemaVersion,
) -> Vec<CompletionItem> {
    let siblings = container.map_or(&model.roots[..], |e| &e.children[..]);
    let mut items: Vec<CompletionItem> = registry
        .children_of(container.map(|e| e.kind))
        .iter()
        .map(|&kind| CompletionItem {
            label: kind.keyword().to_string(),
            insert_text: completion_snippet(kind, &fresh_name_among(siblings, kind), version),
            kind: CompletionKind::Template,
        })
        .collect();
    if let Some(e) = container {
        for spec in registry.attributes_of(e.kind) {
            if e.attribute(spec.name).is_none() {
                items.push(CompletionItem {
                    label: spec.name.to_string(),
                    insert_text: format!("{} ", spec.name),
                    kind: CompletionKind::Attribute,
                });
            }
        }
    }
    items.sort_by(|a, b| a.label.cmp(&b.label));
    items
}

fn value_items(model: &Model, chain: &[&Element], shape: ValueShape) -> Vec<CompletionItem> {
    let mut items = match shape {
        ValueShape::Direction => Direction::ALL
            .iter()
            .map(|d| CompletionItem::plain(d.as_str(), CompletionKind::Literal))
            .collect(),
        ValueShape::Reference(kind) => reference_items(model, chain, kind),
        ValueShape::PortReference => port_items(model, chain),
    };
    items.sort_by(|a, b| a.label.cmp(&b.label));
    items.dedup();
    items
}

fn reference_items(model: &Model, chain: &[&Element], kind: ElementKind) -> Vec<CompletionItem> {
    let mut targets: Vec<Vec<&str>> = Vec::new();
    fn collect<'m>(level: &'m [Element], path: &mut Vec<&'m str>, kind: ElementKind, out: &mut Vec<Vec<&'m str>>) {
        for e in level {
            path.push(&e.short_name);
            if e.kind == kind {
                out.push(path.clone());
            }
            collect(&e.children, path, kind, out);
            path.pop();
        }
    }
    collect(&model.roots, &mut Vec::new(), kind, &mut targets);
    targets
        .iter()
        .filter_map(|path| {
            let r = minimal_ref(&model.roots, chain, path, Some(kind));
            let found = resolve_in(&model.roots, chain, &r, Some(kind))?;
            (found.path == *path).then(|| CompletionItem::plain(r.dotted(), CompletionKind::Reference))
        })
        .collect()
}

fn port_items(model: &Model, chain: &[&Element]) -> Vec<CompletionItem> {
    let Some(owner_index) = chain.len().checked_sub(2) else {
        return Vec::new();
    };
    let owner = chain[owner_index];
    let ports = |e: &Element| -> Vec<String> {
        e.children
            .iter()
            .filter(|c| c.kind == ElementKind::FunctionFlowPort)
            .map(|c| c.short_name.clone())
            .collect()
    };
    let mut items: Vec<CompletionItem> = ports(owner)
        .into_iter()
        .map(|p| CompletionItem::plain(p, CompletionKind::Reference))
        .collect();
    for part in owner
        .children
        .iter()
        .filter(|c| c.kind == ElementKind::DesignFunctionPrototype)
    {
        let Some(AttributeValue::Reference(r)) = part.attribute("type") else {
            continue;
        };
        let mut part_chain = chain[..=owner_index].to_vec();
        part_chain.push(part);
        if let Some(found) = resolve_in(&model.roots, &part_chain, r, Some(ElementKind::DesignFunctionType)) {
            for p in ports(found.element) {
                items.push(CompletionItem::plain(
                    format!("{}.{p}", part.short_name),
                    CompletionKind::Reference,
                ));
            }
        }
    }
    items
}
