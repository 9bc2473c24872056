//! Seeded generator of valid models, for tests and benchmarks.
//!
//! Generated models use every element kind, have globally unique names,
//! write references in their shortest resolving form, type prototypes only
//! with earlier types (so instance trees are finite) and connect ports only
//! in directions the validator accepts. They validate without findings.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::metamodel::{ElementKind, SchemaVersion};
use crate::model::{AttributeValue, Direction, Element, Model, PortRef, QualifiedRef};
use crate::resolve::minimal_ref;

type IndexPath = Vec<usize>;

struct TypeInfo {
    at: IndexPath,
    kind: ElementKind,
    ports: Vec<(String, Direction)>,
    /// Parts as (name, index into `types`).
    parts: Vec<(String, usize)>,
}

struct Gen {
    rng: ChaCha8Rng,
    model: Model,
    count: usize,
    serial: usize,
    packages: Vec<IndexPath>,
    types: Vec<TypeInfo>,
}

fn at_mut<'m>(roots: &'m mut [Element], at: &[usize]) -> &'m mut Element {
    let mut e = &mut roots[at[0]];
    for &i in &at[1..] {
        e = &mut e.children[i];
    }
    e
}

fn names_of(roots: &[Element], at: &[usize]) -> Vec<String> {
    let mut out = Vec::with_capacity(at.len());
    let mut level = roots;
    for &i in at {
        out.push(level[i].short_name.clone());
        level = &level[i].children;
    }
    out
}

impl Gen {
    fn name(&mut self, stem: &str) -> String {
        self.serial += 1;
        format!("{stem}{}", self.serial)
    }

    fn add(&mut self, parent: &[usize], e: Element) -> IndexPath {
        let p = at_mut(&mut self.model.roots, parent);
        p.children.push(e);
        let mut at = parent.to_vec();
        at.push(p.children.len() - 1);
        self.count += 1;
        at
    }

    fn package(&mut self) {
        let parent = self.packages.choose(&mut self.rng).expect("root package").clone();
        let e = Element::new(ElementKind::EAPackage, self.name("Pkg"));
        let at = self.add(&parent, e);
        self.packages.push(at);
    }

    fn type_(&mut self) {
        let kind = match self.rng.random_range(0..10) {
            0..=5 => ElementKind::DesignFunctionType,
            6 => ElementKind::AnalysisFunctionType,
            7 | 8 => ElementKind::HardwareComponentType,
            _ => ElementKind::HardwareFunctionType,
        };
        let stem = match kind {
            ElementKind::DesignFunctionType => "Fn",
            ElementKind::AnalysisFunctionType => "Af",
            ElementKind::HardwareComponentType => "Hc",
            _ => "Hf",
        };
        let parent = self.packages.choose(&mut self.rng).expect("root package").clone();
        let mut e = Element::new(kind, self.name(stem));
        if kind == ElementKind::HardwareFunctionType
            && self.model.version == SchemaVersion::V2_1_12
            && self.rng.random_bool(0.7)
        {
            let hcs: Vec<&TypeInfo> = self
                .types
                .iter()
                .filter(|t| t.kind == ElementKind::HardwareComponentType)
                .collect();
            if let Some(hc) = hcs.choose(&mut self.rng) {
                // Absolute for now; shortened in `finish`.
                let path = names_of(&self.model.roots, &hc.at);
                e.set_attribute(
                    "hardwareComponent",
                    AttributeValue::Reference(QualifiedRef::absolute(path)),
                );
            }
        }
        let at = self.add(&parent, e);
        self.types.push(TypeInfo {
            at,
            kind,
            ports: Vec::new(),
            parts: Vec::new(),
        });
    }

    fn port(&mut self) -> bool {
        if self.types.is_empty() {
            return false;
        }
        let t = self.rng.random_range(0..self.types.len());
        let direction = *Direction::ALL.choose(&mut self.rng).expect("three directions");
        let name = self.name("port");
        let e = Element::new(ElementKind::FunctionFlowPort, name.clone())
            .with_attribute("direction", AttributeValue::Direction(direction));
        let at = self.types[t].at.clone();
        self.add(&at, e);
        self.types[t].ports.push((name, direction));
        true
    }

    fn dfts(&self) -> Vec<usize> {
        (0..self.types.len())
            .filter(|&i| self.types[i].kind == ElementKind::DesignFunctionType)
            .collect()
    }

    fn prototype(&mut self) -> bool {
        let dfts = self.dfts();
        let hosts: Vec<usize> = dfts.iter().copied().filter(|&h| dfts[0] < h).collect();
        let Some(&host) = hosts.choose(&mut self.rng) else {
            return false;
        };
        let earlier: Vec<usize> = dfts.iter().copied().filter(|&d| d < host).collect();
        let ty = *earlier.choose(&mut self.rng).expect("host is not the first type");
        let path = names_of(&self.model.roots, &self.types[ty].at);
        let name = self.name("part");
        let e = Element::new(ElementKind::DesignFunctionPrototype, name.clone())
            .with_attribute("type", AttributeValue::Reference(QualifiedRef::absolute(path)));
        let at = self.types[host].at.clone();
        self.add(&at, e);
        self.types[host].parts.push((name, ty));
        true
    }

    /// Endpoints of `host`: own ports act inverted (they delegate).
    fn endpoints(&self, host: usize, sending: bool) -> Vec<PortRef> {
        let t = &self.types[host];
        let mut out = Vec::new();
        for (name, dir) in &t.ports {
            let ok = if sending { dir.can_receive() } else { dir.can_send() };
            if ok {
                out.push(PortRef {
                    part: None,
                    port: name.clone(),
                });
            }
        }
        for (part, ty) in &t.parts {
            for (name, dir) in &self.types[*ty].ports {
                let ok = if sending { dir.can_send() } else { dir.can_receive() };
                if ok {
                    out.push(PortRef {
                        part: Some(part.clone()),
                        port: name.clone(),
                    });
                }
            }
        }
        out
    }

    fn connector(&mut self) -> bool {
        let dfts = self.dfts();
        let Some(&host) = dfts.choose(&mut self.rng) else {
            return false;
        };
        let from = self.endpoints(host, true);
        let to = self.endpoints(host, false);
        let (Some(from), Some(to)) = (from.choose(&mut self.rng), to.choose(&mut self.rng)) else {
            return false;
        };
        let e = Element::new(ElementKind::FunctionConnector, self.name("conn"))
            .with_attribute("from", AttributeValue::Port(from.clone()))
            .with_attribute("to", AttributeValue::Port(to.clone()));
        let at = self.types[host].at.clone();
        self.add(&at, e);
        true
    }

    fn step(&mut self) {
        let roll = self.rng.random_range(0..100);
        let done = match roll {
            0..=4 => {
                self.package();
                true
            }
            5..=29 => {
                self.type_();
                true
            }
            30..=64 => self.port(),
            65..=84 => self.prototype(),
            _ => self.connector(),
        };
        if !done && !self.port() {
            self.type_();
        }
    }

    /// Rewrites every reference into its shortest resolving form.
    fn finish(mut self) -> Model {
        let mut rewrites: Vec<(IndexPath, &'static str, QualifiedRef)> = Vec::new();
        fn scan<'m>(
            level: &'m [Element],
            roots: &'m [Element],
            chain: &mut Vec<&'m Element>,
            at: &mut IndexPath,
            out: &mut Vec<(IndexPath, &'static str, QualifiedRef)>,
        ) {
            for (i, e) in level.iter().enumerate() {
                chain.push(e);
                at.push(i);
                for (attr, kind) in [
                    ("type", ElementKind::DesignFunctionType),
                    ("hardwareComponent", ElementKind::HardwareComponentType),
                ] {
                    if let Some(AttributeValue::Reference(r)) = e.attribute(attr) {
                        let target: Vec<&str> = r.segments.iter().map(String::as_str).collect();
                        out.push((at.clone(), attr, minimal_ref(roots, chain, &target, Some(kind))));
                    }
                }
                scan(&e.children, roots, chain, at, out);
                at.pop();
                chain.pop();
            }
        }
        let roots = &self.model.roots;
        scan(roots, roots, &mut Vec::new(), &mut Vec::new(), &mut rewrites);
        for (at, attr, r) in rewrites {
            at_mut(&mut self.model.roots, &at).set_attribute(attr, AttributeValue::Reference(r));
        }
        self.model
    }
}

/// A valid model of about `elements` elements (at least one package),
/// fully determined by `seed` and `version`.
pub fn generate(seed: u64, elements: usize, version: SchemaVersion) -> Model {
    let mut g = Gen {
        rng: ChaCha8Rng::seed_from_u64(seed),
        model: Model::new(version),
        count: 0,
        serial: 0,
        packages: Vec::new(),
        types: Vec::new(),
    };
    let roots = 1 + g.rng.random_range(0..3.min(elements.max(1)));
    for _ in 0..roots {
        let name = g.name("Root");
        g.model.roots.push(Element::new(ElementKind::EAPackage, name));
        g.packages.push(vec![g.model.roots.len() - 1]);
        g.count += 1;
    }
    while g.count < elements {
        g.step();
    }
    g.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::model_equal;
    use crate::validate::validate;

    #[test]
    fn deterministic() {
        let a = generate(7, 300, SchemaVersion::V2_2);
        let b = generate(7, 300, SchemaVersion::V2_2);
        assert!(model_equal(&a, &b));
        assert!(!model_equal(&a, &generate(8, 300, SchemaVersion::V2_2)));
    }

    #[test]
    fn valid_and_sized() {
        for seed in 0..40 {
            for version in SchemaVersion::all() {
                let m = generate(seed, 150, version);
                assert_eq!(m.element_count(), 150);
                let d = validate(&m);
                assert!(d.is_empty(), "seed {seed} {version}: {d:?}");
            }
        }
    }

    #[test]
    fn covers_every_kind() {
        let m = generate(3, 2000, SchemaVersion::V2_1_12);
        for kind in ElementKind::ALL {
            let mut seen = false;
            m.walk(|e| seen |= e.kind == kind);
            assert!(seen, "{kind} missing");
        }
        let mut hw = false;
        m.walk(|e| hw |= e.attribute("hardwareComponent").is_some());
        assert!(hw);
    }
}
