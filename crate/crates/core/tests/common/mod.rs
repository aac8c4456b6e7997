#![allow(dead_code)]

use nalgebra::DMatrix;
use vem_mg::mesh::{generate_structured_triangle_mesh, Point, PolygonalMesh};
use vem_mg::vem::DofMap;

/// Structured mesh with interior vertices moved by a deterministic offset of
/// at most `amp / n` in each direction.
pub fn jittered_mesh(n: usize, amp: f64) -> PolygonalMesh {
    let m = generate_structured_triangle_mesh(n).unwrap();
    let h = 1.0 / n as f64;
    let verts: Vec<Point> = m
        .vertices()
        .iter()
        .enumerate()
        .map(|(i, p)| {
            if m.is_boundary(i) {
                *p
            } else {
                let s = (i as f64 * 12.9898).sin() * 43_758.545;
                let t = (i as f64 * 78.233).sin() * 12_345.678;
                Point::new(p.x + amp * h * (s.fract()), p.y + amp * h * (t.fract()))
            }
        })
        .collect();
    PolygonalMesh::from_cells(verts, m.cells().to_vec()).unwrap()
}

/// Textbook linear finite element stiffness, built from barycentric
/// gradients and restricted to `dofs`.
pub fn p1_stiffness(mesh: &PolygonalMesh, dofs: &DofMap) -> DMatrix<f64> {
    let mut a = DMatrix::zeros(dofs.len(), dofs.len());
    for c in mesh.cells() {
        assert_eq!(c.len(), 3);
        let p: Vec<Point> = c.iter().map(|&v| mesh.vertex(v)).collect();
        let area2 = (p[1].x - p[0].x) * (p[2].y - p[0].y) - (p[2].x - p[0].x) * (p[1].y - p[0].y);
        let b: Vec<f64> = (0..3)
            .map(|i| p[(i + 1) % 3].y - p[(i + 2) % 3].y)
            .collect();
        let g: Vec<f64> = (0..3)
            .map(|i| p[(i + 2) % 3].x - p[(i + 1) % 3].x)
            .collect();
        for i in 0..3 {
            for j in 0..3 {
                if let (Some(di), Some(dj)) = (dofs.dof(c[i]), dofs.dof(c[j])) {
                    a[(di, dj)] += (b[i] * b[j] + g[i] * g[j]) / (2.0 * area2);
                }
            }
        }
    }
    a
}

pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |acc, v| acc.max(v.abs()))
}
