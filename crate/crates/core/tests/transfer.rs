use nalgebra::DMatrix;
use vem_mg::agglomeration::{
    build_hierarchy, build_hierarchy_with, check_boundary_compatibility, MeshHierarchy,
    DEFAULT_TARGETS,
};
use vem_mg::mesh::{generate_structured_triangle_mesh, Point, PolygonalMesh};
use vem_mg::transfer::{
    coarse_operators, prolongation_matrix, prolongation_matrix_full, CoarseMode,
};
use vem_mg::vem::{assemble_stiffness, DofMap};

fn default_hierarchy(n: usize, levels: usize) -> MeshHierarchy {
    build_hierarchy_with(
        &generate_structured_triangle_mesh(n).unwrap(),
        levels,
        &DEFAULT_TARGETS,
    )
    .unwrap()
}

#[test]
fn galerkin_identity_on_every_level() {
    let h = default_hierarchy(16, 4);
    let (a, _) = assemble_stiffness(h.finest(), 1.0).unwrap();
    let t = coarse_operators(&a, &h, 1.0, CoarseMode::Inherited).unwrap();
    for j in 2..=4 {
        let p = t.prolongation(j).to_dense();
        let fine = t.operator(j).to_dense();
        let expected: DMatrix<f64> = p.transpose() * fine * &p;
        let got = t.operator(j - 1).to_dense();
        let rel = (got - &expected).abs().max() / expected.abs().max();
        assert!(rel < 1e-12, "level {j}: {rel:e}");
    }
}

#[test]
fn constants_and_linears_on_benchmark_hierarchy() {
    let h = default_hierarchy(16, 4);
    let lin = |q: Point| 1.5 + 0.25 * q.x - 3.0 * q.y;
    for j in 2..=4 {
        let p = prolongation_matrix_full(&h, j).unwrap();
        let ones = p.mul_vec(&vec![1.0; p.ncols()]);
        assert!(ones.iter().all(|&v| (v - 1.0).abs() < 1e-14));
        let coarse: Vec<f64> = h.level(j - 1).vertices().iter().map(|&q| lin(q)).collect();
        let fine = p.mul_vec(&coarse);
        for (v, val) in fine.iter().enumerate() {
            assert!((val - lin(h.level(j).vertex(v))).abs() < 1e-12);
        }
    }
}

#[test]
fn interior_prolongation_reproduces_linears_away_from_boundary() {
    // rows whose full stencil touches no boundary vertex
    let h = default_hierarchy(16, 3);
    let lin = |q: Point| 2.0 * q.x + q.y;
    for j in 2..=3 {
        let p = prolongation_matrix(&h, j).unwrap();
        let pf = prolongation_matrix_full(&h, j).unwrap();
        let (fd, cd) = (
            DofMap::interior(h.level(j)),
            DofMap::interior(h.level(j - 1)),
        );
        let coarse: Vec<f64> = (0..cd.len())
            .map(|d| lin(h.level(j - 1).vertex(cd.vertex(d))))
            .collect();
        let fine = p.mul_vec(&coarse);
        let mut checked = 0;
        for (d, val) in fine.iter().enumerate() {
            let v = fd.vertex(d);
            let (cols, _) = pf.row(v);
            if cols.iter().all(|&c| !h.level(j - 1).is_boundary(c)) {
                assert!((val - lin(h.level(j).vertex(v))).abs() < 1e-12);
                checked += 1;
            }
        }
        assert!(checked > fd.len() / 3);
    }
}

#[test]
fn row_rules_recount() {
    let h = default_hierarchy(16, 4);
    for j in 2..=4 {
        let p = prolongation_matrix(&h, j).unwrap();
        let (fine, coarse) = (h.level(j), h.level(j - 1));
        let (fd, cd) = (DofMap::interior(fine), DofMap::interior(coarse));
        let nodes = h.coarse_nodes(j);
        let shared: Vec<Option<usize>> = {
            let mut s = vec![None; fine.num_vertices()];
            for (cv, &fv) in nodes.iter().enumerate() {
                s[fv] = Some(cv);
            }
            s
        };
        let (mut identity_rows, mut polynomial_rows) = (0, 0);
        for d in 0..fd.len() {
            let v = fd.vertex(d);
            let (cols, vals) = p.row(d);
            match shared[v] {
                Some(cv) => {
                    assert_eq!(cols, [cd.dof(cv).unwrap()]);
                    assert_eq!(vals, [1.0]);
                    identity_rows += 1;
                }
                None => {
                    // every column lies on the one agglomerate containing v
                    let parents: Vec<usize> = (0..fine.num_cells())
                        .filter(|&c| fine.cell(c).contains(&v))
                        .map(|c| h.parents(j)[c])
                        .collect();
                    assert!(parents.windows(2).all(|w| w[0] == w[1]));
                    let cell = coarse.cell(parents[0]);
                    assert!(cols.iter().all(|&c| cell.contains(&cd.vertex(c))));
                    polynomial_rows += 1;
                }
            }
        }
        assert_eq!(identity_rows, coarse.num_interior_vertices());
        assert_eq!(
            identity_rows + polynomial_rows,
            fine.num_interior_vertices()
        );
    }
}

#[test]
fn restriction_is_the_transpose() {
    let h = default_hierarchy(12, 3);
    let (a, _) = assemble_stiffness(h.finest(), 1.0).unwrap();
    let t = coarse_operators(&a, &h, 1.0, CoarseMode::Inherited).unwrap();
    let p = t.prolongation(3);
    let r: Vec<f64> = (0..p.nrows()).map(|i| (i as f64).sin()).collect();
    let via_transpose = p.transpose().mul_vec(&r);
    let direct = p.mul_transpose_vec(&r);
    assert!(via_transpose
        .iter()
        .zip(&direct)
        .all(|(a, b)| (a - b).abs() < 1e-14));
}

#[test]
fn coarse_operators_are_spd_in_both_modes() {
    let h = default_hierarchy(8, 2);
    let (a, _) = assemble_stiffness(h.finest(), 1.0).unwrap();
    for mode in [CoarseMode::Inherited, CoarseMode::NonInherited] {
        let t = coarse_operators(&a, &h, 1.0, mode).unwrap();
        let a1 = t.operator(1);
        assert!(a1.max_asymmetry() < 1e-13);
        assert!(a1.to_dense().cholesky().is_some(), "{mode:?}");
    }
}

#[test]
fn identical_levels_give_identical_operators() {
    let h = build_hierarchy(&generate_structured_triangle_mesh(6).unwrap(), 2, 1).unwrap();
    let (a, _) = assemble_stiffness(h.finest(), 1.0).unwrap();
    let t = coarse_operators(&a, &h, 1.0, CoarseMode::NonInherited).unwrap();
    assert_eq!(t.operator(1), t.operator(2));
}

#[test]
fn dropped_collinear_vertex_is_one_violation() {
    let verts = vec![
        Point::new(0., 0.),
        Point::new(0.5, 0.),
        Point::new(1., 0.),
        Point::new(1., 1.),
        Point::new(0., 1.),
    ];
    let fine = PolygonalMesh::from_cells(
        verts.clone(),
        vec![vec![0, 1, 4], vec![1, 2, 3], vec![1, 3, 4]],
    )
    .unwrap();
    let coarse = PolygonalMesh::from_cells(
        vec![verts[0], verts[2], verts[3], verts[4]],
        vec![vec![0, 1, 2, 3]],
    )
    .unwrap();
    let h = MeshHierarchy::from_parts(
        vec![coarse, fine],
        vec![vec![0, 0, 0]],
        vec![vec![0, 2, 3, 4]],
    )
    .unwrap();
    let rep = check_boundary_compatibility(&h);
    assert!(!rep.ok);
    assert_eq!(rep.violations.len(), 1);
    assert_eq!(rep.violations[0].fine_vertex, 1);
    assert_eq!(rep.violations[0].coarse_cell, 0);
}
