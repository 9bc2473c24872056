//! Rule-based migration between registered schema versions.
//!
//! Rules run on the in-memory model. Every datum a rule removes is reported
//! as a W101 warning naming the element it was removed from.

use std::fmt;

use thiserror::Error;

use crate::diagnostic::{has_errors, Code, Diagnostic, Span};
use crate::eaxml::{from_eaxml, to_eaxml};
use crate::metamodel::{ElementKind, SchemaVersion};
use crate::model::{Element, Model};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RuleAction {
    DropAttribute(&'static str),
    RenameAttribute { old: &'static str, new: &'static str },
    DropElementKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MigrationRule {
    pub from: SchemaVersion,
    pub to: SchemaVersion,
    pub kind: ElementKind,
    pub action: RuleAction,
    pub note: &'static str,
}

impl fmt::Display for MigrationRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let action = match &self.action {
            RuleAction::DropAttribute(name) => format!("drop attribute '{name}'"),
            RuleAction::RenameAttribute { old, new } => format!("rename attribute '{old}' to '{new}'"),
            RuleAction::DropElementKind => "drop element".to_string(),
        };
        write!(f, "{} -> {}: {} on {}", self.from, self.to, action, self.kind)
    }
}

/// A rule application: which rule changed which element (by qualified name).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Applied {
    pub rule: MigrationRule,
    pub element: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MigrationReport {
    pub applied: Vec<Applied>,
    pub resulting_version: SchemaVersion,
    pub warnings: Vec<Diagnostic>,
}

impl MigrationReport {
    pub fn is_empty(&self) -> bool {
        self.applied.is_empty() && self.warnings.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MigrateError {
    #[error("no migration path from schema {from} to schema {to}")]
    NoPath { from: SchemaVersion, to: SchemaVersion },
}

struct RuleSet {
    from: &'static str,
    to: &'static str,
    rules: &'static [(ElementKind, RuleAction, &'static str)],
}

/// Registered rule sets, one per ordered version pair.
const RULE_SETS: &[RuleSet] = &[
    RuleSet {
        from: "2.1.12",
        to: "2.2",
        rules: &[(
            ElementKind::HardwareFunctionType,
            RuleAction::DropAttribute("hardwareComponent"),
            "HardwareFunctionType no longer references a HardwareComponent",
        )],
    },
    // Nothing to synthesize going back: the attribute is optional in 2.1.12.
    RuleSet {
        from: "2.2",
        to: "2.1.12",
        rules: &[],
    },
];

/// The rules taking `from` to `to`, or `None` when no path is registered.
pub fn rules_between(from: SchemaVersion, to: SchemaVersion) -> Option<Vec<MigrationRule>> {
    if from == to {
        return Some(Vec::new());
    }
    let set = RULE_SETS.iter().find(|s| s.from == from.id() && s.to == to.id())?;
    Some(
        set.rules
            .iter()
            .map(|(kind, action, note)| MigrationRule {
                from,
                to,
                kind: *kind,
                action: action.clone(),
                note,
            })
            .collect(),
    )
}

/// Migrates `model` to `target` with the registered rules.
pub fn migrate(model: &Model, target: SchemaVersion) -> Result<(Model, MigrationReport), MigrateError> {
    let rules = rules_between(model.version, target).ok_or(MigrateError::NoPath {
        from: model.version,
        to: target,
    })?;
    Ok(migrate_with(model, target, &rules))
}

/// Applies `rules` everywhere in `model` and tags the result with `target`.
pub fn migrate_with(model: &Model, target: SchemaVersion, rules: &[MigrationRule]) -> (Model, MigrationReport) {
    let mut out = model.clone();
    out.version = target;
    let mut report = MigrationReport {
        applied: Vec::new(),
        resulting_version: target,
        warnings: Vec::new(),
    };
    let mut path = String::new();
    out.roots = rewrite(std::mem::take(&mut out.roots), rules, target, &mut path, &mut report);
    (out, report)
}

fn rewrite(
    elements: Vec<Element>,
    rules: &[MigrationRule],
    target: SchemaVersion,
    path: &mut String,
    report: &mut MigrationReport,
) -> Vec<Element> {
    let mut kept = Vec::with_capacity(elements.len());
    for mut e in elements {
        let len = path.len();
        path.push('/');
        path.push_str(&e.short_name);
        let span = e.span.unwrap_or_else(Span::start);
        let mut dropped = false;
        let kind = e.kind;
        for rule in rules.iter().filter(|r| r.kind == kind) {
            match &rule.action {
                RuleAction::DropAttribute(name) => {
                    if e.remove_attribute(name).is_some() {
                        report.warnings.push(Diagnostic::new(
                            Code::W101,
                            span,
                            format!("dropped '{name}' on {path} (not present in {target})"),
                        ));
                        report.applied.push(Applied {
                            rule: rule.clone(),
                            element: path.clone(),
                        });
                    }
                }
                RuleAction::RenameAttribute { old, new } => {
                    if let Some(attr) = e.attributes.iter_mut().find(|a| a.name == *old) {
                        attr.name = new.to_string();
                        report.applied.push(Applied {
                            rule: rule.clone(),
                            element: path.clone(),
                        });
                    }
                }
                RuleAction::DropElementKind => {
                    report.warnings.push(Diagnostic::new(
                        Code::W101,
                        span,
                        format!("dropped {kind} {path} (not present in {target})"),
                    ));
                    report.applied.push(Applied {
                        rule: rule.clone(),
                        element: path.clone(),
                    });
                    dropped = true;
                    break;
                }
            }
        }
        if !dropped {
            e.children = rewrite(std::mem::take(&mut e.children), rules, target, path, report);
            kept.push(e);
        }
        path.truncate(len);
    }
    kept
}

/// Loads an EAXML document, migrates it to `target` and re-serializes it.
/// Loading and serialization findings are returned as `Err`.
pub fn migrate_file(xml: &str, target: SchemaVersion) -> Result<(String, MigrationReport), Vec<Diagnostic>> {
    let loaded = from_eaxml(xml, None)?;
    if has_errors(&loaded.diagnostics) {
        return Err(loaded.diagnostics);
    }
    let (model, report) = migrate(&loaded.model, target)
        .map_err(|e| vec![Diagnostic::new(Code::E005, Span::new(2, 1, 0, 0), e.to_string())])?;
    let text = to_eaxml(&model)?;
    Ok((text, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{model_equal, AttributeValue, QualifiedRef};
    use crate::validate::validate;

    fn hw_model() -> Model {
        Model::new(SchemaVersion::V2_1_12).with_root(
            Element::new(ElementKind::EAPackage, "P")
                .with_child(Element::new(ElementKind::HardwareComponentType, "HC"))
                .with_child(Element::new(ElementKind::HardwareFunctionType, "HF").with_attribute(
                    "hardwareComponent",
                    AttributeValue::Reference(QualifiedRef::relative(["HC"])),
                )),
        )
    }

    #[test]
    fn registered_rules() {
        let forward = rules_between(SchemaVersion::V2_1_12, SchemaVersion::V2_2).unwrap();
        assert_eq!(forward.len(), 1);
        assert_eq!(forward[0].action, RuleAction::DropAttribute("hardwareComponent"));
        assert_eq!(forward[0].kind, ElementKind::HardwareFunctionType);
        assert!(rules_between(SchemaVersion::V2_2, SchemaVersion::V2_1_12)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn drops_hardware_component() {
        let (out, report) = migrate(&hw_model(), SchemaVersion::V2_2).unwrap();
        assert_eq!(out.version, SchemaVersion::V2_2);
        assert!(out.roots[0].children[1].attributes.is_empty());
        assert_eq!(report.applied.len(), 1);
        assert_eq!(report.applied[0].element, "/P/HF");
        assert_eq!(report.warnings.len(), 1);
        assert_eq!(report.warnings[0].code, Code::W101);
        assert_eq!(
            report.warnings[0].message,
            "dropped 'hardwareComponent' on /P/HF (not present in 2.2)"
        );
        assert!(validate(&out).is_empty());
    }

    #[test]
    fn identity_and_reverse() {
        let m = hw_model();
        let (same, report) = migrate(&m, SchemaVersion::V2_1_12).unwrap();
        assert!(model_equal(&same, &m));
        assert!(report.is_empty());

        let (m22, _) = migrate(&m, SchemaVersion::V2_2).unwrap();
        let (back, report) = migrate(&m22, SchemaVersion::V2_1_12).unwrap();
        assert_eq!(back.version, SchemaVersion::V2_1_12);
        assert!(report.applied.is_empty());
        assert!(model_equal(&back, &m22));
    }

    #[test]
    fn idempotent() {
        let (once, _) = migrate(&hw_model(), SchemaVersion::V2_2).unwrap();
        let (twice, report) = migrate(&once, SchemaVersion::V2_2).unwrap();
        assert!(model_equal(&once, &twice));
        assert!(report.is_empty());
    }

    #[test]
    fn generic_actions() {
        let rules = vec![
            MigrationRule {
                from: SchemaVersion::V2_1_12,
                to: SchemaVersion::V2_2,
                kind: ElementKind::HardwareFunctionType,
                action: RuleAction::RenameAttribute {
                    old: "hardwareComponent",
                    new: "component",
                },
                note: "",
            },
            MigrationRule {
                from: SchemaVersion::V2_1_12,
                to: SchemaVersion::V2_2,
                kind: ElementKind::HardwareComponentType,
                action: RuleAction::DropElementKind,
                note: "",
            },
        ];
        let (out, report) = migrate_with(&hw_model(), SchemaVersion::V2_2, &rules);
        assert_eq!(out.roots[0].children.len(), 1);
        assert!(out.roots[0].children[0].attribute("component").is_some());
        assert_eq!(report.applied.len(), 2);
        assert_eq!(report.warnings.len(), 1);
    }

    #[test]
    fn file_migration() {
        let xml = crate::eaxml::to_eaxml(&hw_model()).unwrap();
        let (out, report) = migrate_file(&xml, SchemaVersion::V2_2).unwrap();
        assert_eq!(
            out.lines().nth(1).unwrap(),
            "<EAXML xmlns=\"http://east-adl.info/2.2\">"
        );
        assert!(!out.contains("HARDWARE-COMPONENT-TREF"));
        assert_eq!(report.applied.len(), 1);

        let (again, report) = migrate_file(&out, SchemaVersion::V2_2).unwrap();
        assert_eq!(again, out);
        assert!(report.is_empty());

        let bad = xml.replace("2.1.12", "9.9");
        let errs = migrate_file(&bad, SchemaVersion::V2_2).unwrap_err();
        assert_eq!(errs[0].code, Code::E005);
    }
}
