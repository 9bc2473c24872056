//! Outline tree with expansion through prototype types.
//!
//! Each `DesignFunctionPrototype` gets synthetic children mirroring the
//! contents of its type, recursively. A type may occur only once on any
//! root-to-node path; a prototype whose type is already on the path is
//! marked `…(recursive)` and not expanded.
//!
//! Instance paths: packages and package-level types use their dotted
//! qualified name. Inside a type, paths are relative to that type, so a port
//! `out1` reached through prototype `pFDA` has the path `pFDA.out1`.

use serde::{Serialize, Serializer};

use crate::diagnostic::{Diagnostic, Span};
use crate::metamodel::ElementKind;
use crate::model::{AttributeValue, Element, Model};
use crate::resolve::{resolve_in, unresolved};

pub const RECURSIVE_SUFFIX: &str = " …(recursive)";

fn kind_name<S: Serializer>(kind: &ElementKind, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(kind.keyword())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OutlineNode {
    pub label: String,
    #[serde(serialize_with = "kind_name")]
    pub kind: ElementKind,
    pub path: String,
    pub synthetic: bool,
    #[serde(skip)]
    pub span: Option<Span>,
    pub children: Vec<OutlineNode>,
}

impl OutlineNode {
    pub fn is_recursive(&self) -> bool {
        self.label.ends_with(RECURSIVE_SUFFIX)
    }

    /// Pre-order walk.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a OutlineNode)) {
        f(self);
        for c in &self.children {
            c.walk(f);
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Outline {
    pub nodes: Vec<OutlineNode>,
    pub diagnostics: Vec<Diagnostic>,
}

impl Outline {
    pub fn walk<'a>(&'a self, mut f: impl FnMut(&'a OutlineNode)) {
        for n in &self.nodes {
            n.walk(&mut f);
        }
    }

    /// Indented text rendering, two spaces per level.
    pub fn render(&self) -> String {
        fn go(out: &mut String, n: &OutlineNode, level: usize) {
            for _ in 0..level {
                out.push_str("  ");
            }
            out.push_str(&n.label);
            out.push_str(" [");
            out.push_str(n.kind.keyword());
            if n.synthetic {
                out.push_str(", via type");
            }
            out.push_str("]\n");
            for c in &n.children {
                go(out, c, level + 1);
            }
        }
        let mut out = String::new();
        for n in &self.nodes {
            go(&mut out, n, 0);
        }
        out
    }
}

fn is_type(kind: ElementKind) -> bool {
    matches!(
        kind,
        ElementKind::DesignFunctionType
            | ElementKind::AnalysisFunctionType
            | ElementKind::HardwareComponentType
            | ElementKind::HardwareFunctionType
    )
}

struct Builder<'m> {
    roots: &'m [Element],
    max_depth: usize,
    diagnostics: Vec<Diagnostic>,
}

/// Real-model chain for an absolute path of names.
fn chain_for<'m>(roots: &'m [Element], path: &[&str]) -> Vec<&'m Element> {
    let mut chain = Vec::with_capacity(path.len());
    let mut level = roots;
    for name in path {
        let Some(e) = level.iter().find(|e| e.short_name == *name) else {
            break;
        };
        chain.push(e);
        level = &e.children;
    }
    chain
}

impl<'m> Builder<'m> {
    /// `chain` is the real-model chain ending at `e`. `types` holds the
    /// types on the current path. `prefix` is `None` outside any type.
    fn node(
        &mut self,
        e: &'m Element,
        chain: &mut Vec<&'m Element>,
        depth: usize,
        prefix: Option<&str>,
        types: &mut Vec<*const Element>,
        synthetic: bool,
    ) -> OutlineNode {
        let path = match prefix {
            None => chain
                .iter()
                .map(|e| e.short_name.as_str())
                .collect::<Vec<_>>()
                .join("."),
            Some("") => e.short_name.clone(),
            Some(p) => format!("{p}.{}", e.short_name),
        };
        let mut node = OutlineNode {
            label: e.short_name.clone(),
            kind: e.kind,
            path,
            synthetic,
            span: if synthetic { None } else { e.span },
            children: Vec::new(),
        };
        let deeper = depth < self.max_depth;

        let entered_type = is_type(e.kind) && !synthetic;
        if entered_type {
            types.push(e as *const Element);
        }
        let child_prefix = if is_type(e.kind) {
            Some(String::new())
        } else {
            prefix.map(|_| node.path.clone())
        };

        if deeper {
            for child in &e.children {
                chain.push(child);
                let c = self.node(child, chain, depth + 1, child_prefix.as_deref(), types, synthetic);
                chain.pop();
                node.children.push(c);
            }
        }

        if e.kind == ElementKind::DesignFunctionPrototype {
            self.expand(e, chain, depth, &mut node, types);
        }
        if entered_type {
            types.pop();
        }
        node
    }

    fn expand(
        &mut self,
        proto: &'m Element,
        chain: &[&'m Element],
        depth: usize,
        node: &mut OutlineNode,
        types: &mut Vec<*const Element>,
    ) {
        let Some(AttributeValue::Reference(r)) = proto.attribute("type") else {
            return;
        };
        let Some(found) = resolve_in(self.roots, chain, r, Some(ElementKind::DesignFunctionType)) else {
            let span = proto
                .attributes
                .iter()
                .find(|a| a.name == "type")
                .and_then(|a| a.span)
                .or(proto.span)
                .unwrap_or_else(Span::start);
            let d = unresolved(self.roots, chain, r, Some(ElementKind::DesignFunctionType), span);
            if !self.diagnostics.contains(&d) {
                self.diagnostics.push(d);
            }
            node.label = format!("{} : {r}", proto.short_name);
            return;
        };
        let ty = found.element;
        node.label = format!("{} : {}", proto.short_name, ty.short_name);
        if types.contains(&(ty as *const Element)) {
            node.label.push_str(RECURSIVE_SUFFIX);
            return;
        }
        if depth >= self.max_depth {
            return;
        }
        let mut type_chain = chain_for(self.roots, &found.path);
        types.push(ty as *const Element);
        let prefix = node.path.clone();
        for child in &ty.children {
            type_chain.push(child);
            let c = self.node(child, &mut type_chain, depth + 1, Some(&prefix), types, true);
            type_chain.pop();
            node.children.push(c);
        }
        types.pop();
    }
}

/// Outline of `model`, cut below `max_depth` levels (roots are level 1).
/// Unresolved prototype types are reported as E003 in the result.
pub fn outline(model: &Model, max_depth: usize) -> Outline {
    let mut b = Builder {
        roots: &model.roots,
        max_depth,
        diagnostics: Vec::new(),
    };
    if max_depth == 0 {
        return Outline::default();
    }
    let mut nodes = Vec::new();
    for root in &model.roots {
        let mut chain = vec![root];
        nodes.push(b.node(root, &mut chain, 1, None, &mut Vec::new(), false));
    }
    crate::diagnostic::sort_by_position(&mut b.diagnostics);
    Outline {
        nodes,
        diagnostics: b.diagnostics,
    }
}
