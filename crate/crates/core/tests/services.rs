use eatxt_core::services::{complete, outline, CompletionKind};
use eatxt_core::synth::generate;
use eatxt_core::{emit, ElementKind, MetamodelRegistry, SchemaVersion};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// With enough depth every real element shows up exactly once, and
    /// synthetic nodes never stand for a package or a type.
    #[test]
    fn outline_covers_model(seed in any::<u64>(), size in 1usize..200) {
        let m = generate(seed, size, SchemaVersion::V2_2);
        let o = outline(&m, 64);
        prop_assert!(o.diagnostics.is_empty());
        let mut real = 0;
        let mut bad_synthetic = 0;
        o.walk(|n| {
            if !n.synthetic {
                real += 1;
            } else if matches!(n.kind, ElementKind::EAPackage | ElementKind::DesignFunctionType) {
                bad_synthetic += 1;
            }
        });
        prop_assert_eq!(real, m.element_count());
        prop_assert_eq!(bad_synthetic, 0);
    }

    /// Generated prototypes only use earlier types, so nothing is recursive.
    #[test]
    fn acyclic_models_have_no_recursion_marks(seed in any::<u64>()) {
        let m = generate(seed, 120, SchemaVersion::V2_2);
        let mut marked = false;
        outline(&m, 64).walk(|n| marked |= n.is_recursive());
        prop_assert!(!marked);
    }

    /// Keyword proposals before any `}` are exactly what the registry allows.
    #[test]
    fn keyword_proposals_follow_registry(seed in any::<u64>()) {
        let m = generate(seed, 60, SchemaVersion::V2_2);
        let text = emit(&m);
        let reg = MetamodelRegistry::for_version(SchemaVersion::V2_2);
        let offsets: Vec<usize> = text.match_indices('}').map(|(i, _)| i).collect();
        for offset in offsets {
            for item in complete(&text, offset, SchemaVersion::V2_2) {
                if item.kind == CompletionKind::Template {
                    let kind = ElementKind::from_keyword(&item.label).unwrap();
                    prop_assert!(reg.children_of(None).contains(&kind)
                        || ElementKind::ALL.iter().any(|&p| reg.allows_child(Some(p), kind)));
                }
            }
        }
    }
}

#[test]
fn depth_limits_are_respected() {
    let m = generate(11, 400, SchemaVersion::V2_2);
    for depth in 1..6 {
        fn max_depth(nodes: &[eatxt_core::OutlineNode]) -> usize {
            nodes.iter().map(|n| 1 + max_depth(&n.children)).max().unwrap_or(0)
        }
        assert!(max_depth(&outline(&m, depth).nodes) <= depth);
    }
}
