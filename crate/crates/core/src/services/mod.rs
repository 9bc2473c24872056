//! Editor services: outline, content assist and templates.

mod complete;
mod outline;
mod template;

pub use complete::{complete, CompletionItem, CompletionKind};
pub use outline::{outline, Outline, OutlineNode, RECURSIVE_SUFFIX};
pub use template::{completion_snippet, expand_template, fresh_name, fresh_name_among};
