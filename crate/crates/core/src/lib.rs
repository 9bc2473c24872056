//! Textual notation, EAXML interchange and editor services for a subset of
//! the EAST-ADL metamodel.

pub mod diagnostic;
pub mod eaxml;
pub mod format;
pub mod lexer;
pub mod metamodel;
pub mod migrate;
pub mod model;
pub mod parser;
pub mod resolve;
pub mod services;
pub mod synth;
pub mod validate;

pub use diagnostic::{Code, Diagnostic, Severity, Span};
pub use eaxml::{detect_version, from_eaxml, to_eaxml, Loaded};
pub use format::{emit, format};
pub use metamodel::{ElementKind, MetamodelRegistry, SchemaVersion};
pub use migrate::{migrate, migrate_file, MigrationReport};
pub use model::{model_equal, Attribute, AttributeValue, Direction, Element, Model, PortRef, QualifiedRef};
pub use parser::{keyword_suggest, parse};
pub use resolve::{qualified_name, resolve, Scope};
pub use services::{complete, expand_template, fresh_name, outline, CompletionItem, Outline, OutlineNode};
pub use validate::validate;
