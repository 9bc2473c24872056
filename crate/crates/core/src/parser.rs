//! Recursive-descent parser for the textual notation.
//!
//! ```text
//! model     := element* ;
//! element   := KIND IDENT ( '{' (attribute | element)* '}' | ';' ) ;
//! attribute := ATTRNAME value ';' ;
//! value     := dotted-identifier | direction-literal ;
//! ```
//!
//! Attribute names are contextual: a word is an attribute only inside an
//! element whose kind declares it (in any registered version; validation
//! decides whether it is legal for the model's version). After an error the
//! parser skips to the next `;` or to the `}` that closes the construct.

use crate::diagnostic::{Code, Diagnostic, Span};
use crate::lexer::{lex, Token, TokenKind, TriviaKind};
use crate::metamodel::{attribute_in_any_version, ElementKind, MetamodelRegistry, SchemaVersion, ValueShape};
use crate::model::{Attribute, AttributeValue, Comments, Direction, Element, Model, PortRef, QualifiedRef};

/// The grammar accepted by [`parse`], in EBNF.
pub const GRAMMAR: &str = "\
model := element* ;
element := KIND IDENT ( '{' (attribute | element)* '}' | ';' ) ;
attribute := ATTRNAME value ';' ;
value := dotted-identifier | direction-literal ;
";

/// Edit distance (insertions, deletions, substitutions) over chars.
pub fn levenshtein(a: &str, b: &str) -> usize {
    let b: Vec<char> = b.chars().collect();
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut row = vec![0; b.len() + 1];
    for (i, ca) in a.chars().enumerate() {
        row[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(ca != *cb);
            row[j + 1] = sub.min(prev[j + 1] + 1).min(row[j] + 1);
        }
        std::mem::swap(&mut prev, &mut row);
    }
    prev[b.len()]
}

/// The candidate closest to `word`, if it is within distance 2 and no other
/// candidate is equally close.
pub fn keyword_suggest<'c>(word: &str, candidates: &[&'c str]) -> Option<&'c str> {
    let mut best: Option<(usize, &'c str)> = None;
    let mut tied = false;
    for c in candidates {
        let d = levenshtein(word, c);
        match best {
            Some((bd, _)) if d > bd => {}
            Some((bd, _)) if d == bd => tied = true,
            _ => {
                best = Some((d, c));
                tied = false;
            }
        }
    }
    match best {
        Some((d, c)) if d <= 2 && !tied => Some(c),
        _ => None,
    }
}

/// Parses `source` into a model tagged with `version`. Always returns a
/// (possibly partial) model; syntax problems are reported as E001/E002.
pub fn parse(source: &str, version: SchemaVersion) -> (Model, Vec<Diagnostic>) {
    let (tokens, diagnostics) = lex(source);
    let mut p = Parser {
        tokens,
        pos: 0,
        diagnostics,
        registry: MetamodelRegistry::for_version(version),
    };
    let body = p.items(None);
    debug_assert_eq!(p.peek().kind, TokenKind::Eof);
    let eof = p.pos;
    let model = Model {
        roots: body.children,
        version,
        dangling_comments: p.leading_comments(eof),
    };
    let mut diagnostics = p.diagnostics;
    diagnostics.sort_by_key(|d| (d.span.line, d.span.column));
    (model, diagnostics)
}

struct Parser<'a> {
    tokens: Vec<Token<'a>>,
    pos: usize,
    diagnostics: Vec<Diagnostic>,
    registry: &'static MetamodelRegistry,
}

#[derive(Default)]
struct Body {
    attributes: Vec<Attribute>,
    children: Vec<Element>,
}

fn comment_text(s: &str) -> String {
    s.trim_end().to_string()
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Token<'a> {
        &self.tokens[self.pos]
    }

    fn bump(&mut self) -> usize {
        let idx = self.pos;
        if self.tokens[idx].kind != TokenKind::Eof {
            self.pos += 1;
        }
        idx
    }

    fn error(&mut self, code: Code, span: Span, message: String) -> &mut Diagnostic {
        self.diagnostics.push(Diagnostic::new(code, span, message));
        self.diagnostics.last_mut().expect("just pushed")
    }

    /// A comment on the same line as the previous token, before any newline.
    fn trailing_comment(&self, idx: usize) -> Option<String> {
        if idx == 0 {
            return None;
        }
        for tr in &self.tokens[idx].leading {
            match tr.kind {
                TriviaKind::Comment => return Some(comment_text(tr.text)),
                TriviaKind::Whitespace if tr.text.contains('\n') => return None,
                _ => {}
            }
        }
        None
    }

    /// Comments before token `idx` that are not its predecessor's trailing
    /// comment.
    fn leading_comments(&self, idx: usize) -> Vec<String> {
        let skip = usize::from(self.trailing_comment(idx).is_some());
        self.tokens[idx]
            .leading
            .iter()
            .filter(|t| t.kind == TriviaKind::Comment)
            .skip(skip)
            .map(|t| comment_text(t.text))
            .collect()
    }

    /// Every comment in the trivia of tokens `from..=to`.
    fn interior_comments(&self, from: usize, to: usize) -> Vec<String> {
        self.tokens[from..=to]
            .iter()
            .flat_map(|t| t.leading.iter())
            .filter(|t| t.kind == TriviaKind::Comment)
            .map(|t| comment_text(t.text))
            .collect()
    }

    fn expected_here(&self, container: Option<ElementKind>) -> Vec<String> {
        let mut expected: Vec<String> = Vec::new();
        if let Some(kind) = container {
            expected.extend(self.registry.attributes_of(kind).iter().map(|a| a.name.to_string()));
        }
        expected.extend(
            self.registry
                .children_of(container)
                .iter()
                .map(|k| k.keyword().to_string()),
        );
        if container.is_some() {
            expected.push("'}'".to_string());
        }
        expected
    }

    /// Skips to just after the next `;` at this nesting level, or to just
    /// after the `}` closing a block opened while skipping, or to (but not
    /// past) a `}` that closes the enclosing block.
    fn recover(&mut self) {
        let mut depth = 0usize;
        loop {
            match self.peek().kind {
                TokenKind::Eof => return,
                TokenKind::Semi => {
                    self.bump();
                    if depth == 0 {
                        return;
                    }
                }
                TokenKind::LBrace => {
                    depth += 1;
                    self.bump();
                }
                TokenKind::RBrace => {
                    if depth == 0 {
                        return;
                    }
                    depth -= 1;
                    self.bump();
                    if depth == 0 {
                        return;
                    }
                }
                _ => {
                    self.bump();
                }
            }
        }
    }

    /// Items of a block (or of the whole file when `container` is `None`),
    /// up to but excluding the closing `}` / end of input.
    fn items(&mut self, container: Option<ElementKind>) -> Body {
        let mut body = Body::default();
        loop {
            let tok = self.peek().clone();
            match tok.kind {
                TokenKind::Eof => break,
                TokenKind::RBrace if container.is_some() => break,
                TokenKind::Keyword(kind) => {
                    if let Some(element) = self.element(kind) {
                        body.children.push(element);
                    }
                }
                TokenKind::AttrName if container.is_some_and(|k| attribute_in_any_version(k, tok.text).is_some()) => {
                    let owner = container.expect("guarded");
                    if let Some(attr) = self.attribute(owner) {
                        if body.attributes.iter().any(|a| a.name == attr.name) {
                            self.error(
                                Code::E004,
                                attr.span.unwrap_or(tok.span),
                                format!("attribute '{}' given more than once", attr.name),
                            );
                        } else {
                            body.attributes.push(attr);
                        }
                    }
                }
                TokenKind::Identifier | TokenKind::AttrName => {
                    let expected = self.expected_here(container);
                    let words: Vec<&str> = expected
                        .iter()
                        .map(String::as_str)
                        .filter(|w| !w.starts_with('\''))
                        .collect();
                    let suggestion = keyword_suggest(tok.text, &words).or(match words.as_slice() {
                        [only] => Some(*only),
                        _ => None,
                    });
                    let message = format!(
                        "unknown keyword '{}'; expected one of: {}",
                        tok.text,
                        expected.join(", ")
                    );
                    let d = self.error(Code::E002, tok.span, message);
                    if let Some(s) = suggestion {
                        let what = if ElementKind::from_keyword(s).is_some() {
                            "element keyword"
                        } else {
                            "attribute"
                        };
                        *d = d.clone().with_hint(format!("did you mean the {what} '{s}'?"));
                    }
                    self.recover();
                }
                TokenKind::RBrace => {
                    self.error(
                        Code::E001,
                        tok.span,
                        "unexpected '}' at top level; no block is open".to_string(),
                    );
                    self.bump();
                }
                _ => {
                    let expected = self.expected_here(container);
                    self.error(
                        Code::E001,
                        tok.span,
                        format!(
                            "unexpected {}; expected one of: {}",
                            tok.describe(),
                            expected.join(", ")
                        ),
                    );
                    self.recover();
                }
            }
        }
        body
    }

    fn element(&mut self, kind: ElementKind) -> Option<Element> {
        let start = self.bump();
        let name_tok = self.peek().clone();
        if !name_tok.kind.is_word() {
            self.error(
                Code::E001,
                name_tok.span,
                format!("expected a name after '{kind}', found {}", name_tok.describe()),
            );
            self.recover();
            return None;
        }
        self.bump();

        let mut element = Element::new(kind, name_tok.text);
        element.span = Some(name_tok.span);
        let mut leading = self.leading_comments(start);

        let opener = self.peek().clone();
        match opener.kind {
            TokenKind::Semi => {
                let idx = self.bump();
                leading.extend(self.interior_comments(start + 1, idx));
                element.comments = Comments {
                    leading,
                    trailing: self.trailing_comment(idx + 1),
                };
            }
            TokenKind::LBrace => {
                let idx = self.bump();
                leading.extend(self.interior_comments(start + 1, idx));
                element.comments = Comments {
                    leading,
                    trailing: self.trailing_comment(idx + 1),
                };
                let body = self.items(Some(kind));
                element.attributes = body.attributes;
                element.children = body.children;
                let close = self.peek().clone();
                let close_idx = self.pos;
                element.body = Some(opener.span.offset + 1..close.span.offset);
                element.dangling_comments = self.leading_comments(close_idx);
                if close.kind == TokenKind::RBrace {
                    self.bump();
                    element.closing_comment = self.trailing_comment(close_idx + 1);
                } else {
                    self.error(
                        Code::E001,
                        close.span,
                        format!(
                            "expected '}}' to close {kind} '{}', found end of input",
                            element.short_name
                        ),
                    );
                    element.dangling_comments.clear();
                }
            }
            _ => {
                self.error(
                    Code::E001,
                    opener.span,
                    format!(
                        "expected '{{' or ';' after {kind} '{}', found {}",
                        name_tok.text,
                        opener.describe()
                    ),
                );
                self.recover();
                return None;
            }
        }
        Some(element)
    }

    fn attribute(&mut self, owner: ElementKind) -> Option<Attribute> {
        let start = self.bump();
        let name_tok = self.tokens[start].clone();
        let spec = attribute_in_any_version(owner, name_tok.text).expect("caller checked");

        let value = match spec.shape {
            ValueShape::Direction => {
                let tok = self.peek().clone();
                match tok.text.parse::<Direction>() {
                    Ok(d) if tok.kind.is_word() => {
                        self.bump();
                        Some(AttributeValue::Direction(d))
                    }
                    _ => {
                        self.error(
                            Code::E001,
                            tok.span,
                            format!("unexpected {}; expected one of: in, out, inout", tok.describe()),
                        );
                        None
                    }
                }
            }
            ValueShape::Reference(_) => self
                .dotted(name_tok.text)
                .map(|segments| AttributeValue::Reference(QualifiedRef::relative(segments))),
            ValueShape::PortReference => {
                let first = self.peek().span;
                match self.dotted(name_tok.text) {
                    Some(segments) if segments.len() <= 2 => {
                        PortRef::parse(&segments.join(".")).map(AttributeValue::Port)
                    }
                    Some(_) => {
                        self.error(
                            Code::E001,
                            first,
                            format!("'{}' expects 'port' or 'part.port'", name_tok.text),
                        );
                        None
                    }
                    None => None,
                }
            }
        };
        let Some(value) = value else {
            self.recover();
            return None;
        };

        let semi = self.peek().clone();
        if semi.kind != TokenKind::Semi {
            self.error(
                Code::E001,
                semi.span,
                format!(
                    "expected ';' after attribute '{}', found {}",
                    name_tok.text,
                    semi.describe()
                ),
            );
            self.recover();
            return None;
        }
        let end = self.bump();
        let mut leading = self.leading_comments(start);
        leading.extend(self.interior_comments(start + 1, end));
        Some(Attribute {
            name: name_tok.text.to_string(),
            value,
            span: Some(name_tok.span),
            comments: Comments {
                leading,
                trailing: self.trailing_comment(end + 1),
            },
        })
    }

    fn dotted(&mut self, attr: &str) -> Option<Vec<String>> {
        let mut segments = Vec::new();
        loop {
            let tok = self.peek().clone();
            if !tok.kind.is_word() {
                self.error(
                    Code::E001,
                    tok.span,
                    format!("expected a reference after '{attr}', found {}", tok.describe()),
                );
                return None;
            }
            self.bump();
            segments.push(tok.text.to_string());
            if self.peek().kind != TokenKind::Dot {
                return Some(segments);
            }
            self.bump();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse22(src: &str) -> (Model, Vec<Diagnostic>) {
        parse(src, SchemaVersion::V2_2)
    }

    /// Brute-force Levenshtein: full DP matrix, written independently of the
    /// two-row version above.
    fn lev_matrix(a: &str, b: &str) -> usize {
        let a: Vec<char> = a.chars().collect();
        let b: Vec<char> = b.chars().collect();
        let mut m = vec![vec![0usize; b.len() + 1]; a.len() + 1];
        for (i, row) in m.iter_mut().enumerate() {
            row[0] = i;
        }
        for j in 0..=b.len() {
            m[0][j] = j;
        }
        for i in 1..=a.len() {
            for j in 1..=b.len() {
                let cost = if a[i - 1] == b[j - 1] { 0 } else { 1 };
                m[i][j] = *[m[i - 1][j] + 1, m[i][j - 1] + 1, m[i - 1][j - 1] + cost]
                    .iter()
                    .min()
                    .unwrap();
            }
        }
        m[a.len()][b.len()]
    }

    const KINDS: [&str; 8] = [
        "EAPackage",
        "DesignFunctionType",
        "AnalysisFunctionType",
        "HardwareComponentType",
        "HardwareFunctionType",
        "FunctionFlowPort",
        "DesignFunctionPrototype",
        "FunctionConnector",
    ];

    #[test]
    fn suggestions() {
        assert_eq!(lev_matrix("EAPackge", "EAPackage"), 1);
        assert_eq!(keyword_suggest("EAPackge", &KINDS), Some("EAPackage"));
        assert_eq!(keyword_suggest("EAPackage", &KINDS), Some("EAPackage"));
        assert!(KINDS.iter().all(|k| lev_matrix("zzzz", k) > 2));
        assert_eq!(keyword_suggest("zzzz", &KINDS), None);
        // two candidates equally close
        assert_eq!(keyword_suggest("ab", &["aa", "bb"]), None);
    }

    #[test]
    fn levenshtein_matches_matrix() {
        for a in ["", "a", "kitten", "EAPackage", "shortName", "sitting"] {
            for b in KINDS.iter().copied().chain(["", "sitting", "kitten"]) {
                assert_eq!(levenshtein(a, b), lev_matrix(a, b), "{a} vs {b}");
            }
        }
    }

    #[test]
    fn port_with_direction() {
        let (m, d) = parse22("EAPackage P { DesignFunctionType FDA { FunctionFlowPort speed { direction in; } } }");
        assert!(d.is_empty(), "{d:?}");
        let speed = &m.roots[0].children[0].children[0];
        assert_eq!(speed.short_name, "speed");
        assert_eq!(speed.direction(), Some(Direction::In));
    }

    #[test]
    fn short_name_instead_of_keyword() {
        let (_, d) = parse22("shortName P { }");
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].code, Code::E002);
        assert!(d[0].message.contains("expected one of: EAPackage"), "{}", d[0].message);
        assert_eq!(
            d[0].hint.as_deref(),
            Some("did you mean the element keyword 'EAPackage'?")
        );
        assert_eq!((d[0].span.line, d[0].span.column), (1, 1));
    }

    #[test]
    fn empty_element() {
        let (m, d) = parse22("EAPackage Empty;");
        assert!(d.is_empty());
        assert_eq!(m.roots.len(), 1);
        assert_eq!(m.roots[0].short_name, "Empty");
        assert!(m.roots[0].is_empty());
    }

    #[test]
    fn misspelled_keyword_gets_suggestion() {
        let (_, d) = parse22("EAPackage P { DesignFunctionTyp T; }");
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].code, Code::E002);
        assert_eq!(
            d[0].hint.as_deref(),
            Some("did you mean the element keyword 'DesignFunctionType'?")
        );
    }

    #[test]
    fn bad_attribute_keeps_siblings() {
        let src = "EAPackage P {\n DesignFunctionType A {\n  FunctionFlowPort x { direction sideways; }\n  FunctionFlowPort y { direction out; }\n }\n DesignFunctionType B;\n}";
        let (m, d) = parse22(src);
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].code, Code::E001);
        assert!(d[0].message.contains("in, out, inout"));
        let p = &m.roots[0];
        assert_eq!(p.children.len(), 2);
        assert_eq!(p.children[0].children.len(), 2);
        assert!(p.children[0].children[0].attributes.is_empty());
    }

    #[test]
    fn attribute_names_can_be_short_names() {
        let (m, d) =
            parse22("EAPackage type { DesignFunctionType direction { FunctionFlowPort from { direction in; } } }");
        assert!(d.is_empty(), "{d:?}");
        assert_eq!(m.roots[0].children[0].children[0].short_name, "from");
    }

    #[test]
    fn attribute_outside_its_kind_is_unknown() {
        let (_, d) = parse22("EAPackage P { direction in; }");
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].code, Code::E002);
    }

    #[test]
    fn hardware_component_parses_in_any_version() {
        let src = "EAPackage P { HardwareComponentType HC; HardwareFunctionType HF { hardwareComponent HC; } }";
        let (m, d) = parse22(src);
        assert!(d.is_empty());
        assert!(m.roots[0].children[1].attribute("hardwareComponent").is_some());
    }

    #[test]
    fn unclosed_block() {
        let (m, d) = parse22("EAPackage P {\n  EAPackage Q;\n");
        assert_eq!(d.len(), 1);
        assert!(d[0].message.contains("expected '}'"));
        assert_eq!(m.roots[0].children.len(), 1);
    }

    #[test]
    fn stray_closing_brace() {
        let (m, d) = parse22("EAPackage P; } EAPackage Q;");
        assert_eq!(d.len(), 1);
        assert_eq!(m.roots.len(), 2);
    }

    #[test]
    fn connector_endpoints() {
        let (m, d) = parse22("EAPackage P { DesignFunctionType T { FunctionConnector c { from a.o; to b; } } }");
        assert!(d.is_empty());
        let c = &m.roots[0].children[0].children[0];
        assert_eq!(c.attribute("from").unwrap().to_string(), "a.o");
        assert_eq!(c.attribute("to").unwrap().to_string(), "b");
        let (_, d) = parse22("EAPackage P { DesignFunctionType T { FunctionConnector c { from a.b.c; to b; } } }");
        assert_eq!(d.len(), 1);
    }

    #[test]
    fn comments_attach() {
        let src = "// top\nEAPackage P { // header\n    // about Q\n    EAPackage Q; // q\n    // dangling\n} // end\n// eof\n";
        let (m, d) = parse22(src);
        assert!(d.is_empty());
        let p = &m.roots[0];
        assert_eq!(p.comments.leading, vec!["// top"]);
        assert_eq!(p.comments.trailing.as_deref(), Some("// header"));
        assert_eq!(p.children[0].comments.leading, vec!["// about Q"]);
        assert_eq!(p.children[0].comments.trailing.as_deref(), Some("// q"));
        assert_eq!(p.dangling_comments, vec!["// dangling"]);
        assert_eq!(p.closing_comment.as_deref(), Some("// end"));
        assert_eq!(m.dangling_comments, vec!["// eof"]);
    }

    #[test]
    fn spans_within_source() {
        for src in ["EAPackage", "EAPackage P {", "{", "EAPackage P { type", "x"] {
            let (_, d) = parse22(src);
            assert!(!d.is_empty());
            for diag in d {
                assert!(diag.span.offset <= src.len(), "{src}: {diag:?}");
            }
        }
    }
}
