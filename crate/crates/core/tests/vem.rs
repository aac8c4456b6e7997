mod common;

use common::{jittered_mesh, max_abs, p1_stiffness};
use nalgebra::DMatrix;
use proptest::prelude::*;
use vem_mg::mesh::{generate_structured_triangle_mesh, CellGeometry, Point, PolygonalMesh};
use vem_mg::vem::{
    assemble_full_stiffness, assemble_stiffness, element_stiffness, error_norms, interpolate,
    DofMap, ElementProjectors,
};

fn unit_square() -> Vec<Point> {
    vec![
        Point::new(0., 0.),
        Point::new(1., 0.),
        Point::new(1., 1.),
        Point::new(0., 1.),
    ]
}

#[test]
fn triangle_meshes_reduce_to_linear_elements() {
    for mesh in [
        generate_structured_triangle_mesh(6).unwrap(),
        jittered_mesh(7, 0.3),
    ] {
        let (a, dofs) = assemble_stiffness(&mesh, 1.0).unwrap();
        let oracle = p1_stiffness(&mesh, &dofs);
        assert!(max_abs(&(a.to_dense() - oracle)) < 1e-12);
    }
}

#[test]
fn right_triangle_element_matches_p1() {
    let pts = vec![Point::new(0., 0.), Point::new(1., 0.), Point::new(0., 1.)];
    let proj = ElementProjectors::new(&pts, 0).unwrap();
    let k = element_stiffness(&proj, &CellGeometry::from_points(&pts), 1.0);
    let expected =
        DMatrix::from_row_slice(3, 3, &[1.0, -0.5, -0.5, -0.5, 0.5, 0.0, -0.5, 0.0, 0.5]);
    assert!(max_abs(&(k - expected)) < 1e-12);
}

#[test]
fn square_grad_avg_matches_boundary_quadrature() {
    let pts = unit_square();
    let proj = ElementProjectors::new(&pts, 0).unwrap();
    // φ₀ is the boundary hat of vertex (0,0): 1 - s on the edges leaving and
    // entering it, zero elsewhere. GradAvg = (1/|E|) ∮ φ₀ n ds.
    let m = 10_000;
    let mut g = [0.0; 2];
    for e in 0..4 {
        let (a, b) = (pts[e], pts[(e + 1) % 4]);
        let len = a.dist(b);
        let normal = [(b.y - a.y) / len, (a.x - b.x) / len];
        for s in 0..m {
            let t = (s as f64 + 0.5) / m as f64;
            let phi = match e {
                0 => 1.0 - t,
                3 => t,
                _ => 0.0,
            };
            g[0] += phi * normal[0] * len / m as f64;
            g[1] += phi * normal[1] * len / m as f64;
        }
    }
    assert!((proj.grad_avg[(0, 0)] - g[0]).abs() < 1e-10);
    assert!((proj.grad_avg[(1, 0)] - g[1]).abs() < 1e-10);
}

#[test]
fn square_element_matches_dense_textbook_form() {
    let pts = unit_square();
    let (xc, h) = (Point::new(0.5, 0.5), 2f64.sqrt());
    let d = DMatrix::from_fn(4, 3, |i, g| match g {
        0 => 1.0,
        1 => (pts[i].x - xc.x) / h,
        _ => (pts[i].y - xc.y) / h,
    });
    // boundary mean row and the normal-flux rows of the unit square
    let mut b = DMatrix::zeros(3, 4);
    let flux = [(-0.5, -0.5), (0.5, -0.5), (0.5, 0.5), (-0.5, 0.5)];
    for i in 0..4 {
        b[(0, i)] = 0.25;
        b[(1, i)] = flux[i].0 / h;
        b[(2, i)] = flux[i].1 / h;
    }
    let g = &b * &d;
    let pi_star = g.clone().try_inverse().unwrap() * &b;
    let pi = &d * &pi_star;
    let mut g0 = g.clone();
    g0.row_mut(0).fill(0.0);
    let rem = DMatrix::<f64>::identity(4, 4) - &pi;
    let expected = pi_star.transpose() * g0 * &pi_star + rem.transpose() * rem;

    let proj = ElementProjectors::new(&pts, 0).unwrap();
    let k = element_stiffness(&proj, &CellGeometry::from_points(&pts), 1.0);
    assert!(max_abs(&(k - expected)) < 1e-12);
}

#[test]
fn full_stiffness_has_zero_row_sums() {
    for mesh in [jittered_mesh(6, 0.25), agglomerated_quads()] {
        let a = assemble_full_stiffness(&mesh, 1.0).unwrap();
        let ones = vec![1.0; a.ncols()];
        assert!(a.mul_vec(&ones).iter().all(|v| v.abs() < 1e-11));
        assert!(a.max_asymmetry() < 1e-14);
    }
}

fn agglomerated_quads() -> PolygonalMesh {
    let fine = generate_structured_triangle_mesh(8).unwrap();
    vem_mg::agglomeration::agglomerate(&fine, 5).unwrap().coarse
}

#[test]
fn scaling_with_mu() {
    let mesh = agglomerated_quads();
    let (a1, _) = assemble_stiffness(&mesh, 1.0).unwrap();
    let (a3, _) = assemble_stiffness(&mesh, 3.5).unwrap();
    let diff = a3.to_dense() - a1.to_dense() * 3.5;
    assert!(max_abs(&diff) <= 1e-15 * 3.5 * a1.max_abs() * 4.0);
}

#[test]
fn linear_consistency_on_every_element() {
    let mesh = agglomerated_quads();
    for c in 0..mesh.num_cells() {
        let proj = ElementProjectors::new(&mesh.cell_points(c), c).unwrap();
        let n = proj.num_dofs();
        let rem = DMatrix::<f64>::identity(n, n) - &proj.pi;
        assert!(max_abs(&(rem * &proj.d)) < 1e-12);
        let gd = &proj.b * &proj.d;
        let gm = DMatrix::from_fn(3, 3, |r, s| proj.g[(r, s)]);
        assert!((gd - &gm).norm() <= 1e-13 * gm.norm());
    }
}

fn observed_order(errors: &[f64]) -> f64 {
    let k = errors.len();
    (errors[k - 2] / errors[k - 1]).log2()
}

#[test]
fn interpolant_projection_error_orders() {
    let bubble = |q: Point| q.x * (1.0 - q.x) * q.y * (1.0 - q.y);
    let bubble_grad = |q: Point| {
        [
            (1.0 - 2.0 * q.x) * q.y * (1.0 - q.y),
            q.x * (1.0 - q.x) * (1.0 - 2.0 * q.y),
        ]
    };
    let pi = std::f64::consts::PI;
    let wave = |q: Point| (pi * q.x).sin() * (pi * q.y).sin();
    let wave_grad = |q: Point| {
        [
            pi * (pi * q.x).cos() * (pi * q.y).sin(),
            pi * (pi * q.x).sin() * (pi * q.y).cos(),
        ]
    };
    let mut bubble_l2 = Vec::new();
    let mut wave_l2 = Vec::new();
    for n in [4, 8, 16, 32] {
        let mesh = jittered_mesh(n, 0.2);
        let dofs = DofMap::interior(&mesh);
        let ub = interpolate(&mesh, &dofs, bubble);
        bubble_l2.push(
            error_norms(&mesh, &dofs, &ub, bubble, bubble_grad)
                .unwrap()
                .l2,
        );
        let uw = interpolate(&mesh, &dofs, wave);
        wave_l2.push(error_norms(&mesh, &dofs, &uw, wave, wave_grad).unwrap().l2);
    }
    assert!(observed_order(&bubble_l2[..3]) >= 1.8, "{bubble_l2:?}");
    for k in 2..=4 {
        assert!(observed_order(&wave_l2[..k]) >= 1.8, "{wave_l2:?}");
    }
}

#[test]
fn interpolation_examples() {
    let mesh = generate_structured_triangle_mesh(2).unwrap();
    let dofs = DofMap::interior(&mesh);
    assert_eq!(interpolate(&mesh, &dofs, |q| q.x), vec![0.5]);
    assert_eq!(
        interpolate(&mesh, &dofs, |q| q.x * (1.0 - q.x) * q.y * (1.0 - q.y)),
        vec![0.0625]
    );
    assert_eq!(interpolate(&mesh, &dofs, |_| 0.0), vec![0.0]);
}

proptest! {
    #[test]
    fn projector_identities_on_random_convex_cells(
        k in 3usize..10,
        radii in proptest::collection::vec(0.6f64..1.4, 10),
        stretch in 0.3f64..3.0,
        shift in -5.0f64..5.0,
    ) {
        let pts: Vec<Point> = (0..k)
            .map(|i| {
                let t = std::f64::consts::TAU * (i as f64 + 0.3 * (radii[i] - 1.0)) / k as f64;
                Point::new(shift + stretch * radii[i].min(1.0) * t.cos(), radii[i].min(1.0) * t.sin())
            })
            .collect();
        let proj = ElementProjectors::new(&pts, 0).unwrap();
        let gd = &proj.b * &proj.d;
        let gm = DMatrix::from_fn(3, 3, |r, s| proj.g[(r, s)]);
        prop_assert!((gd - &gm).norm() <= 1e-13 * gm.norm());
        let rem = DMatrix::<f64>::identity(k, k) - &proj.pi;
        prop_assert!(max_abs(&(&rem * &proj.d)) < 1e-12);
        let kk = element_stiffness(&proj, &CellGeometry::from_points(&pts), 1.0);
        let row_sums = &kk * DMatrix::from_element(k, 1, 1.0);
        prop_assert!(max_abs(&row_sums) < 1e-12 * (1.0 + max_abs(&kk)));
    }
}
