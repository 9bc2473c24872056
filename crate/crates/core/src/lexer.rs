//! Lossless lexer for `.eatxt` sources.
//!
//! Whitespace, `//` comments and skipped characters are kept as trivia on the
//! following token, so concatenating every token's trivia and text (the final
//! `Eof` token included) reproduces the input byte for byte.

use crate::diagnostic::{Code, Diagnostic, Span};
use crate::metamodel::{all_attribute_names, ElementKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    Keyword(ElementKind),
    Identifier,
    /// A word that names an attribute somewhere in the metamodel. Whether it
    /// is an attribute here depends on context.
    AttrName,
    LBrace,
    RBrace,
    Semi,
    Dot,
    Eof,
}

impl TokenKind {
    pub fn is_word(self) -> bool {
        matches!(
            self,
            TokenKind::Keyword(_) | TokenKind::Identifier | TokenKind::AttrName
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TriviaKind {
    Whitespace,
    Comment,
    /// Characters the lexer rejected (reported as E001).
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trivia<'a> {
    pub kind: TriviaKind,
    pub text: &'a str,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token<'a> {
    pub kind: TokenKind,
    pub text: &'a str,
    pub span: Span,
    pub leading: Vec<Trivia<'a>>,
}

impl Token<'_> {
    pub fn describe(&self) -> String {
        match self.kind {
            TokenKind::Eof => "end of input".to_string(),
            _ => format!("'{}'", self.text),
        }
    }
}

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
    line: u32,
    column: u32,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn peek2(&self) -> Option<char> {
        let mut it = self.src[self.pos..].chars();
        it.next();
        it.next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn mark(&self) -> (usize, u32, u32) {
        (self.pos, self.line, self.column)
    }

    fn span_from(&self, mark: (usize, u32, u32)) -> Span {
        let (start, line, column) = mark;
        let len = self.src[start..self.pos].chars().count() as u32;
        Span::new(line, column, len, start)
    }

    fn eat_while(&mut self, f: impl Fn(char) -> bool) {
        while self.peek().is_some_and(&f) {
            self.bump();
        }
    }
}

fn is_word_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_word_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

pub fn lex(source: &str) -> (Vec<Token<'_>>, Vec<Diagnostic>) {
    let attr_names: Vec<&str> = all_attribute_names().collect();
    let mut cur = Cursor {
        src: source,
        pos: 0,
        line: 1,
        column: 1,
    };
    let mut tokens = Vec::new();
    let mut diagnostics = Vec::new();
    let mut trivia = Vec::new();

    loop {
        let mark = cur.mark();
        let Some(c) = cur.peek() else {
            tokens.push(Token {
                kind: TokenKind::Eof,
                text: "",
                span: cur.span_from(mark),
                leading: std::mem::take(&mut trivia),
            });
            break;
        };

        let trivia_kind = if c.is_whitespace() {
            cur.eat_while(char::is_whitespace);
            Some(TriviaKind::Whitespace)
        } else if c == '/' && cur.peek2() == Some('/') {
            cur.eat_while(|c| c != '\n');
            Some(TriviaKind::Comment)
        } else {
            None
        };
        if let Some(kind) = trivia_kind {
            trivia.push(Trivia {
                kind,
                text: &source[mark.0..cur.pos],
                span: cur.span_from(mark),
            });
            continue;
        }

        let kind = match c {
            '{' => Some(TokenKind::LBrace),
            '}' => Some(TokenKind::RBrace),
            ';' => Some(TokenKind::Semi),
            '.' => Some(TokenKind::Dot),
            c if is_word_start(c) => {
                cur.eat_while(is_word_char);
                let word = &source[mark.0..cur.pos];
                Some(if let Some(kind) = ElementKind::from_keyword(word) {
                    TokenKind::Keyword(kind)
                } else if attr_names.contains(&word) {
                    TokenKind::AttrName
                } else {
                    TokenKind::Identifier
                })
            }
            _ => None,
        };
        match kind {
            Some(kind) => {
                if !kind.is_word() {
                    cur.bump();
                }
                tokens.push(Token {
                    kind,
                    text: &source[mark.0..cur.pos],
                    span: cur.span_from(mark),
                    leading: std::mem::take(&mut trivia),
                });
            }
            None => {
                cur.bump();
                let span = cur.span_from(mark);
                diagnostics.push(Diagnostic::new(
                    Code::E001,
                    span,
                    format!("unexpected character '{}'", c.escape_debug()),
                ));
                trivia.push(Trivia {
                    kind: TriviaKind::Skipped,
                    text: &source[mark.0..cur.pos],
                    span,
                });
            }
        }
    }
    (tokens, diagnostics)
}

/// Reassembles the source from tokens and trivia.
pub fn detokenize(tokens: &[Token<'_>]) -> String {
    let mut out = String::new();
    for t in tokens {
        for tr in &t.leading {
            out.push_str(tr.text);
        }
        out.push_str(t.text);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn kinds(src: &str) -> Vec<TokenKind> {
        lex(src).0.into_iter().map(|t| t.kind).collect()
    }

    #[test]
    fn simple_package() {
        assert_eq!(
            kinds("EAPackage P;"),
            vec![
                TokenKind::Keyword(ElementKind::EAPackage),
                TokenKind::Identifier,
                TokenKind::Semi,
                TokenKind::Eof
            ]
        );
    }

    #[test]
    fn comment_is_trivia() {
        let (tokens, diags) = lex("// note\n");
        assert!(diags.is_empty());
        assert_eq!(tokens.len(), 1);
        assert_eq!(tokens[0].kind, TokenKind::Eof);
        assert_eq!(tokens[0].leading[0].kind, TriviaKind::Comment);
        assert_eq!(tokens[0].leading[0].text, "// note");
    }

    #[test]
    fn unknown_character_is_skipped() {
        let (tokens, diags) = lex("EAPackage P @ ;");
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].code, Code::E001);
        assert_eq!((diags[0].span.line, diags[0].span.column), (1, 13));
        let k: Vec<TokenKind> = tokens.iter().map(|t| t.kind).collect();
        assert_eq!(
            k,
            vec![
                TokenKind::Keyword(ElementKind::EAPackage),
                TokenKind::Identifier,
                TokenKind::Semi,
                TokenKind::Eof
            ]
        );
    }

    #[test]
    fn attribute_names_are_marked() {
        assert_eq!(kinds("direction")[0], TokenKind::AttrName);
        assert_eq!(kinds("directions")[0], TokenKind::Identifier);
    }

    #[test]
    fn crlf_counts_as_one_line_break() {
        let (tokens, _) = lex("EAPackage P {\r\n    EAPackage Q;\r\n}\r\n");
        let q = tokens.iter().find(|t| t.text == "Q").unwrap();
        assert_eq!((q.span.line, q.span.column), (2, 15));
        let close = tokens.iter().find(|t| t.kind == TokenKind::RBrace).unwrap();
        assert_eq!((close.span.line, close.span.column), (3, 1));
    }

    #[test]
    fn columns_count_characters() {
        let (tokens, _) = lex("// ä\nEAPackage é");
        // 'é' is not a word character: skipped, with a span one char wide.
        let (_, diags) = lex("EAPackage é");
        assert_eq!(diags[0].span.column, 11);
        assert_eq!(diags[0].span.len, 1);
        assert_eq!(tokens[0].span.line, 2);
    }

    proptest! {
        #[test]
        fn lossless(src in "[ -~\t\r\n\u{e9}]{0,200}") {
            let (tokens, diags) = lex(&src);
            prop_assert_eq!(detokenize(&tokens), src.clone());
            for d in diags {
                prop_assert!(d.span.offset <= src.len());
            }
        }
    }
}
