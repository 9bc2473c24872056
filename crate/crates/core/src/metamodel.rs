//! Version-keyed metamodel registry.
//!
//! Every table is plain data. A row either applies to all registered versions
//! or names the versions it belongs to, so registering another schema version
//! means adding rows, not code.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use thiserror::Error;

/// Registered schema versions, oldest first.
const VERSIONS: &[&str] = &["2.1.12", "2.2"];

/// Namespace prefix of the EAXML `xmlns` URI; the version is the suffix.
pub const NAMESPACE_PREFIX: &str = "http://east-adl.info/";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unsupported schema version '{found}'; supported: {}", supported_versions())]
pub struct UnknownVersion {
    pub found: String,
}

/// Identifier of a registered metamodel version.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SchemaVersion(&'static str);

impl SchemaVersion {
    pub const V2_1_12: SchemaVersion = SchemaVersion("2.1.12");
    pub const V2_2: SchemaVersion = SchemaVersion("2.2");

    pub fn parse(id: &str) -> Result<Self, UnknownVersion> {
        VERSIONS
            .iter()
            .find(|v| **v == id)
            .map(|v| SchemaVersion(v))
            .ok_or_else(|| UnknownVersion { found: id.to_string() })
    }

    pub fn id(self) -> &'static str {
        self.0
    }

    pub fn all() -> impl Iterator<Item = SchemaVersion> {
        VERSIONS.iter().map(|v| SchemaVersion(v))
    }

    /// The version tools default to.
    pub fn latest() -> SchemaVersion {
        SchemaVersion(VERSIONS[VERSIONS.len() - 1])
    }

    pub fn namespace(self) -> String {
        format!("{NAMESPACE_PREFIX}{}", self.0)
    }

    fn components(self) -> impl Iterator<Item = u32> {
        self.0.split('.').map(|c| c.parse().unwrap_or(0))
    }
}

impl Default for SchemaVersion {
    fn default() -> Self {
        SchemaVersion::latest()
    }
}

impl Ord for SchemaVersion {
    fn cmp(&self, other: &Self) -> Ordering {
        self.components().cmp(other.components())
    }
}

impl PartialOrd for SchemaVersion {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for SchemaVersion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.0)
    }
}

impl FromStr for SchemaVersion {
    type Err = UnknownVersion;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SchemaVersion::parse(s)
    }
}

/// Comma-separated list of registered versions, for messages.
pub fn supported_versions() -> String {
    VERSIONS.join(", ")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ElementKind {
    EAPackage,
    DesignFunctionType,
    AnalysisFunctionType,
    HardwareComponentType,
    HardwareFunctionType,
    FunctionFlowPort,
    DesignFunctionPrototype,
    FunctionConnector,
}

impl ElementKind {
    pub const ALL: [ElementKind; 8] = [
        ElementKind::EAPackage,
        ElementKind::DesignFunctionType,
        ElementKind::AnalysisFunctionType,
        ElementKind::HardwareComponentType,
        ElementKind::HardwareFunctionType,
        ElementKind::FunctionFlowPort,
        ElementKind::DesignFunctionPrototype,
        ElementKind::FunctionConnector,
    ];

    pub fn keyword(self) -> &'static str {
        match self {
            ElementKind::EAPackage => "EAPackage",
            ElementKind::DesignFunctionType => "DesignFunctionType",
            ElementKind::AnalysisFunctionType => "AnalysisFunctionType",
            ElementKind::HardwareComponentType => "HardwareComponentType",
            ElementKind::HardwareFunctionType => "HardwareFunctionType",
            ElementKind::FunctionFlowPort => "FunctionFlowPort",
            ElementKind::DesignFunctionPrototype => "DesignFunctionPrototype",
            ElementKind::FunctionConnector => "FunctionConnector",
        }
    }

    pub fn xml_tag(self) -> &'static str {
        match self {
            ElementKind::EAPackage => "EA-PACKAGE",
            ElementKind::DesignFunctionType => "DESIGN-FUNCTION-TYPE",
            ElementKind::AnalysisFunctionType => "ANALYSIS-FUNCTION-TYPE",
            ElementKind::HardwareComponentType => "HARDWARE-COMPONENT-TYPE",
            ElementKind::HardwareFunctionType => "HARDWARE-FUNCTION-TYPE",
            ElementKind::FunctionFlowPort => "FUNCTION-FLOW-PORT",
            ElementKind::DesignFunctionPrototype => "DESIGN-FUNCTION-PROTOTYPE",
            ElementKind::FunctionConnector => "FUNCTION-CONNECTOR",
        }
    }

    pub fn from_keyword(word: &str) -> Option<ElementKind> {
        ElementKind::ALL.into_iter().find(|k| k.keyword() == word)
    }

    pub fn from_xml_tag(tag: &str) -> Option<ElementKind> {
        ElementKind::ALL.into_iter().find(|k| k.xml_tag() == tag)
    }
}

impl fmt::Display for ElementKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

/// What an attribute value looks like.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ValueShape {
    /// `in`, `out` or `inout`.
    Direction,
    /// A qualified reference to an element of the given kind.
    Reference(ElementKind),
    /// `port` or `part.port`, relative to the enclosing type.
    PortReference,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AttributeSpec {
    pub name: &'static str,
    pub shape: ValueShape,
    pub required: bool,
}

struct AttributeRow {
    kind: ElementKind,
    spec: AttributeSpec,
    /// `None` means every registered version.
    versions: Option<&'static [&'static str]>,
}

struct ContainmentRow {
    parent: ElementKind,
    children: &'static [ElementKind],
    versions: Option<&'static [&'static str]>,
}

use ElementKind as K;

const TYPES_AND_PACKAGES: &[ElementKind] = &[
    K::EAPackage,
    K::DesignFunctionType,
    K::AnalysisFunctionType,
    K::HardwareComponentType,
    K::HardwareFunctionType,
];

const CONTAINMENT: &[ContainmentRow] = &[
    ContainmentRow {
        parent: K::EAPackage,
        children: TYPES_AND_PACKAGES,
        versions: None,
    },
    ContainmentRow {
        parent: K::DesignFunctionType,
        children: &[K::FunctionFlowPort, K::DesignFunctionPrototype, K::FunctionConnector],
        versions: None,
    },
    ContainmentRow {
        parent: K::AnalysisFunctionType,
        children: &[K::FunctionFlowPort],
        versions: None,
    },
    ContainmentRow {
        parent: K::HardwareComponentType,
        children: &[K::FunctionFlowPort],
        versions: None,
    },
    ContainmentRow {
        parent: K::HardwareFunctionType,
        children: &[K::FunctionFlowPort],
        versions: None,
    },
];

const ATTRIBUTES: &[AttributeRow] = &[
    AttributeRow {
        kind: K::FunctionFlowPort,
        spec: AttributeSpec {
            name: "direction",
            shape: ValueShape::Direction,
            required: true,
        },
        versions: None,
    },
    AttributeRow {
        kind: K::DesignFunctionPrototype,
        spec: AttributeSpec {
            name: "type",
            shape: ValueShape::Reference(K::DesignFunctionType),
            required: true,
        },
        versions: None,
    },
    AttributeRow {
        kind: K::FunctionConnector,
        spec: AttributeSpec {
            name: "from",
            shape: ValueShape::PortReference,
            required: true,
        },
        versions: None,
    },
    AttributeRow {
        kind: K::FunctionConnector,
        spec: AttributeSpec {
            name: "to",
            shape: ValueShape::PortReference,
            required: true,
        },
        versions: None,
    },
    AttributeRow {
        kind: K::HardwareFunctionType,
        spec: AttributeSpec {
            name: "hardwareComponent",
            shape: ValueShape::Reference(K::HardwareComponentType),
            required: false,
        },
        versions: Some(&["2.1.12"]),
    },
];

fn applies(versions: Option<&'static [&'static str]>, version: SchemaVersion) -> bool {
    versions.is_none_or(|vs| vs.contains(&version.id()))
}

/// Containment and attribute tables for one schema version.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetamodelRegistry {
    version: SchemaVersion,
    containment: Vec<(ElementKind, Vec<ElementKind>)>,
    attributes: Vec<(ElementKind, Vec<AttributeSpec>)>,
}

impl MetamodelRegistry {
    /// Tables for `version`; built once and shared.
    pub fn for_version(version: SchemaVersion) -> &'static MetamodelRegistry {
        static TABLES: OnceLock<Vec<MetamodelRegistry>> = OnceLock::new();
        let tables = TABLES.get_or_init(|| SchemaVersion::all().map(Self::build).collect());
        tables
            .iter()
            .find(|t| t.version == version)
            .expect("every SchemaVersion is registered")
    }

    fn build(version: SchemaVersion) -> MetamodelRegistry {
        let containment = ElementKind::ALL
            .into_iter()
            .map(|kind| {
                let children = CONTAINMENT
                    .iter()
                    .filter(|row| row.parent == kind && applies(row.versions, version))
                    .flat_map(|row| row.children.iter().copied())
                    .collect();
                (kind, children)
            })
            .collect();
        let attributes = ElementKind::ALL
            .into_iter()
            .map(|kind| {
                let specs = ATTRIBUTES
                    .iter()
                    .filter(|row| row.kind == kind && applies(row.versions, version))
                    .map(|row| row.spec)
                    .collect();
                (kind, specs)
            })
            .collect();
        MetamodelRegistry {
            version,
            containment,
            attributes,
        }
    }

    pub fn version(&self) -> SchemaVersion {
        self.version
    }

    /// Kinds legal as children of `parent`; `None` means the model root.
    pub fn children_of(&self, parent: Option<ElementKind>) -> &[ElementKind] {
        match parent {
            None => &[ElementKind::EAPackage],
            Some(kind) => &self.containment[kind as usize].1,
        }
    }

    pub fn allows_child(&self, parent: Option<ElementKind>, child: ElementKind) -> bool {
        self.children_of(parent).contains(&child)
    }

    pub fn attributes_of(&self, kind: ElementKind) -> &[AttributeSpec] {
        &self.attributes[kind as usize].1
    }

    pub fn attribute(&self, kind: ElementKind, name: &str) -> Option<&AttributeSpec> {
        self.attributes_of(kind).iter().find(|a| a.name == name)
    }

    /// Rows (as `kind.attribute` or `kind>child`) present in exactly one of
    /// the two registries.
    pub fn differences(&self, other: &MetamodelRegistry) -> Vec<String> {
        let rows = |r: &MetamodelRegistry| {
            let mut rows: Vec<String> = Vec::new();
            for (kind, children) in &r.containment {
                rows.extend(children.iter().map(|c| format!("{kind}>{c}")));
            }
            for (kind, specs) in &r.attributes {
                rows.extend(specs.iter().map(|s| format!("{kind}.{}", s.name)));
            }
            rows
        };
        let (a, b) = (rows(self), rows(other));
        let mut diff: Vec<String> = a
            .iter()
            .filter(|r| !b.contains(r))
            .chain(b.iter().filter(|r| !a.contains(r)))
            .cloned()
            .collect();
        diff.sort();
        diff
    }
}

/// The attribute spec for `name` on `kind` in any registered version. The
/// parser uses this so that attributes from other versions still parse and
/// can be reported precisely by validation.
pub fn attribute_in_any_version(kind: ElementKind, name: &str) -> Option<AttributeSpec> {
    ATTRIBUTES
        .iter()
        .find(|row| row.kind == kind && row.spec.name == name)
        .map(|row| row.spec)
}

/// Versions in which `kind` carries an attribute called `name`.
pub fn versions_with_attribute(kind: ElementKind, name: &str) -> Vec<SchemaVersion> {
    SchemaVersion::all()
        .filter(|v| MetamodelRegistry::for_version(*v).attribute(kind, name).is_some())
        .collect()
}

/// Every attribute name known to any kind in any version.
pub fn all_attribute_names() -> impl Iterator<Item = &'static str> {
    let mut names: Vec<&'static str> = ATTRIBUTES.iter().map(|r| r.spec.name).collect();
    names.sort_unstable();
    names.dedup();
    names.into_iter()
}
