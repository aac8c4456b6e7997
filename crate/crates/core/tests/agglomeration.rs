use proptest::prelude::*;
use vem_mg::agglomeration::{
    agglomerate, build_hierarchy, build_hierarchy_with, check_boundary_compatibility,
    DEFAULT_TARGETS,
};
use vem_mg::mesh::generate_structured_triangle_mesh;

#[test]
fn recount_of_parent_map() {
    let fine = generate_structured_triangle_mesh(16).unwrap();
    let h = build_hierarchy(&fine, 2, 4).unwrap();
    let parents = h.parents(2);
    let mut counts = vec![0usize; h.coarsest().num_cells()];
    for &p in parents {
        counts[p] += 1;
    }
    assert!(counts.iter().all(|&c| c >= 1));
    assert_eq!(counts.iter().sum::<usize>(), 512);
    let distinct: std::collections::BTreeSet<_> = parents.iter().collect();
    assert_eq!(distinct.len(), h.coarsest().num_cells());
    // greedy clusters of 4 with singletons absorbed: between 512/8 and 512/2
    let nc = h.coarsest().num_cells();
    assert!((64..=256).contains(&nc), "{nc}");
    let children = h.children(2);
    for (e, ch) in children.iter().enumerate() {
        assert_eq!(ch.len(), counts[e]);
    }
}

#[test]
fn four_level_benchmark_hierarchies() {
    for n in [16, 23, 31, 44] {
        let fine = generate_structured_triangle_mesh(n).unwrap();
        let h = build_hierarchy_with(&fine, 4, &DEFAULT_TARGETS).unwrap();
        assert_eq!(h.num_levels(), 4);
        assert!(h.early_stop().is_none());
        h.validate().unwrap();
        assert!(check_boundary_compatibility(&h).ok);
        for j in 2..=4 {
            assert!(h.level(j - 1).num_cells() < h.level(j).num_cells());
        }
    }
}

#[test]
fn identity_hierarchy_is_compatible() {
    let fine = generate_structured_triangle_mesh(5).unwrap();
    let h = build_hierarchy(&fine, 2, 1).unwrap();
    assert_eq!(h.level(1), &fine.clone().with_level_tag(1));
    assert!(check_boundary_compatibility(&h).ok);
}

#[test]
fn deterministic_serialization() {
    let fine = generate_structured_triangle_mesh(20).unwrap();
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let fa = build_hierarchy_with(&fine, 4, &DEFAULT_TARGETS)
        .unwrap()
        .write_to_dir(a.path())
        .unwrap();
    let fb = build_hierarchy_with(&fine, 4, &DEFAULT_TARGETS)
        .unwrap()
        .write_to_dir(b.path())
        .unwrap();
    assert_eq!(fa.len(), fb.len());
    for (x, y) in fa.iter().zip(&fb) {
        assert_eq!(std::fs::read(x).unwrap(), std::fs::read(y).unwrap());
    }
    let back = vem_mg::agglomeration::MeshHierarchy::read_from_dir(a.path()).unwrap();
    assert_eq!(back.num_levels(), 4);
    assert_eq!(
        back.parents(4),
        build_hierarchy_with(&fine, 4, &DEFAULT_TARGETS)
            .unwrap()
            .parents(4)
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn children_bounded_and_area_conserved(n in 3usize..18, target in 2usize..13) {
        let fine = generate_structured_triangle_mesh(n).unwrap();
        let agg = agglomerate(&fine, target).unwrap();
        let mut count = vec![0usize; agg.coarse.num_cells()];
        let mut area = vec![0.0; agg.coarse.num_cells()];
        for (c, &p) in agg.parent.iter().enumerate() {
            count[p] += 1;
            area[p] += fine.cell_area(c);
        }
        prop_assert!(count.iter().all(|&k| k >= 1 && k <= 2 * target));
        for (e, sum) in area.iter().enumerate() {
            let a = agg.coarse.cell_area(e);
            prop_assert!((a - sum).abs() <= 1e-12 * a);
        }
        for (cv, &fv) in agg.coarse_to_fine_vertex.iter().enumerate() {
            prop_assert_eq!(agg.coarse.vertex(cv), fine.vertex(fv));
        }
    }

    #[test]
    fn hierarchies_nest(n in 6usize..20, first in 3usize..14, later in 2usize..5) {
        let fine = generate_structured_triangle_mesh(n).unwrap();
        let h = build_hierarchy_with(&fine, 3, &[first, later]).unwrap();
        h.validate().unwrap();
        prop_assert!(check_boundary_compatibility(&h).ok);
    }
}
