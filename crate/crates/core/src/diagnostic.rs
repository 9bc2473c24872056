//! Diagnostics shared by every stage of the toolchain.

use std::fmt;

/// A location in a source file. Lines and columns are 1-based and count
/// characters; `offset` is the byte offset of the first character.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Span {
    pub line: u32,
    pub column: u32,
    pub len: u32,
    pub offset: usize,
}

impl Span {
    pub fn new(line: u32, column: u32, len: u32, offset: usize) -> Self {
        Span {
            line,
            column,
            len,
            offset,
        }
    }

    /// Start of file, used when a finding has no better anchor.
    pub fn start() -> Self {
        Span::new(1, 1, 0, 0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Severity {
    Error,
    Warning,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
        })
    }
}

/// Stable diagnostic codes. The string forms are part of the CLI contract.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Code {
    /// Syntax error.
    E001,
    /// Unknown keyword.
    E002,
    /// Unresolved reference.
    E003,
    /// Duplicate sibling name.
    E004,
    /// Schema version mismatch or unsupported version.
    E005,
    /// Element or attribute illegal for the schema version.
    E006,
    /// Attribute dropped by migration.
    W101,
    /// Connector direction mismatch.
    W102,
}

impl Code {
    pub fn as_str(self) -> &'static str {
        match self {
            Code::E001 => "E001",
            Code::E002 => "E002",
            Code::E003 => "E003",
            Code::E004 => "E004",
            Code::E005 => "E005",
            Code::E006 => "E006",
            Code::W101 => "W101",
            Code::W102 => "W102",
        }
    }

    pub fn severity(self) -> Severity {
        match self {
            Code::W101 | Code::W102 => Severity::Warning,
            _ => Severity::Error,
        }
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: Code,
    pub span: Span,
    pub message: String,
    pub hint: Option<String>,
}

impl Diagnostic {
    pub fn new(code: Code, span: Span, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: code.severity(),
            code,
            span,
            message: message.into(),
            hint: None,
        }
    }

    pub fn with_hint(mut self, hint: impl Into<String>) -> Self {
        self.hint = Some(hint.into());
        self
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }

    /// Renders `path:line:col: severity[code]: message`, plus a `hint:` line
    /// when a hint is present. No trailing newline.
    pub fn render(&self, path: &str) -> String {
        let mut out = format!(
            "{}:{}:{}: {}[{}]: {}",
            path, self.span.line, self.span.column, self.severity, self.code, self.message
        );
        if let Some(hint) = &self.hint {
            out.push_str("\n  hint: ");
            out.push_str(hint);
        }
        out
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}: {}[{}]: {}",
            self.span.line, self.span.column, self.severity, self.code, self.message
        )
    }
}

pub fn has_errors(diagnostics: &[Diagnostic]) -> bool {
    diagnostics.iter().any(Diagnostic::is_error)
}

/// Stable sort by position; ties keep insertion order.
pub fn sort_by_position(diagnostics: &mut [Diagnostic]) {
    diagnostics.sort_by_key(|d| (d.span.line, d.span.column));
}
