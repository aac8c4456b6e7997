use super::{orient, Point, PolygonalMesh};
use crate::error::{Error, Result};

/// Signed shoelace area, positive for counter-clockwise polygons.
///
/// Coordinates are shifted to the first vertex before summing, which keeps
/// the result translation invariant up to rounding.
pub fn polygon_area(pts: &[Point]) -> f64 {
    let o = pts[0];
    let k = pts.len();
    let mut twice = 0.0;
    for i in 1..k - 1 {
        twice += orient(o, pts[i], pts[i + 1]);
    }
    0.5 * twice
}

pub fn polygon_centroid(pts: &[Point]) -> Point {
    let o = pts[0];
    let mut twice_area = 0.0;
    let (mut cx, mut cy) = (0.0, 0.0);
    for i in 1..pts.len() - 1 {
        let (a, b) = (pts[i], pts[i + 1]);
        let w = orient(o, a, b);
        twice_area += w;
        cx += w * (a.x - o.x + b.x - o.x);
        cy += w * (a.y - o.y + b.y - o.y);
    }
    Point::new(o.x + cx / (3.0 * twice_area), o.y + cy / (3.0 * twice_area))
}

/// Largest pairwise vertex distance.
pub fn polygon_diameter(pts: &[Point]) -> f64 {
    let mut d: f64 = 0.0;
    for (i, &p) in pts.iter().enumerate() {
        for &q in &pts[i + 1..] {
            d = d.max(p.dist(q));
        }
    }
    d
}

#[derive(Clone, Debug, PartialEq)]
pub struct CellGeometry {
    pub area: f64,
    pub centroid: Point,
    pub diameter: f64,
    /// `edge_lengths[k]` is the length of local edge `k -> k+1`.
    pub edge_lengths: Vec<f64>,
}

impl CellGeometry {
    pub fn from_points(pts: &[Point]) -> Self {
        let k = pts.len();
        CellGeometry {
            area: polygon_area(pts),
            centroid: polygon_centroid(pts),
            diameter: polygon_diameter(pts),
            edge_lengths: (0..k).map(|i| pts[i].dist(pts[(i + 1) % k])).collect(),
        }
    }

    pub fn perimeter(&self) -> f64 {
        self.edge_lengths.iter().sum()
    }
}

pub fn cell_geometry(mesh: &PolygonalMesh, cell: usize) -> Result<CellGeometry> {
    if cell >= mesh.num_cells() {
        return Err(Error::CellOutOfRange(cell));
    }
    Ok(CellGeometry::from_points(&mesh.cell_points(cell)))
}

/// Star-shapedness with respect to the centroid: the centroid must lie on
/// the inner side of every edge line, i.e. inside the polygon kernel.
pub(crate) fn star_shaped_wrt_centroid(pts: &[Point], centroid: Point, diameter: f64) -> bool {
    let k = pts.len();
    let tol = 1e-14 * diameter * diameter;
    (0..k).all(|i| orient(pts[i], pts[(i + 1) % k], centroid) > tol)
}

#[derive(Clone, Debug, PartialEq)]
pub struct QualityReport {
    /// Per cell: shortest edge over diameter.
    pub min_edge_ratio: Vec<f64>,
    /// Per cell: longest edge over diameter.
    pub max_edge_ratio: Vec<f64>,
    pub min_diameter: f64,
    /// Mesh size: the largest cell diameter.
    pub max_diameter: f64,
    /// `min_diameter / max_diameter`.
    pub uniformity: f64,
    pub star_shaped: Vec<bool>,
}

impl QualityReport {
    pub fn worst_edge_ratio(&self) -> f64 {
        self.min_edge_ratio
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    pub fn all_star_shaped(&self) -> bool {
        self.star_shaped.iter().all(|&s| s)
    }
}

pub fn mesh_quality(mesh: &PolygonalMesh) -> QualityReport {
    let n = mesh.num_cells();
    let mut rep = QualityReport {
        min_edge_ratio: Vec::with_capacity(n),
        max_edge_ratio: Vec::with_capacity(n),
        min_diameter: f64::INFINITY,
        max_diameter: 0.0,
        uniformity: 0.0,
        star_shaped: Vec::with_capacity(n),
    };
    for c in 0..n {
        let pts = mesh.cell_points(c);
        let g = CellGeometry::from_points(&pts);
        let emin = g.edge_lengths.iter().copied().fold(f64::INFINITY, f64::min);
        let emax = g.edge_lengths.iter().copied().fold(0.0, f64::max);
        rep.min_edge_ratio.push(emin / g.diameter);
        rep.max_edge_ratio.push(emax / g.diameter);
        rep.min_diameter = rep.min_diameter.min(g.diameter);
        rep.max_diameter = rep.max_diameter.max(g.diameter);
        rep.star_shaped
            .push(star_shaped_wrt_centroid(&pts, g.centroid, g.diameter));
    }
    rep.uniformity = rep.min_diameter / rep.max_diameter;
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::generate_structured_triangle_mesh;
    use proptest::prelude::*;

    fn p(x: f64, y: f64) -> Point {
        Point::new(x, y)
    }

    #[test]
    fn unit_square_geometry() {
        let g = CellGeometry::from_points(&[p(0., 0.), p(1., 0.), p(1., 1.), p(0., 1.)]);
        assert!((g.area - 1.0).abs() < 1e-15);
        assert!((g.centroid.x - 0.5).abs() < 1e-15 && (g.centroid.y - 0.5).abs() < 1e-15);
        assert!((g.diameter - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn right_triangle_geometry() {
        let g = CellGeometry::from_points(&[p(0., 0.), p(1., 0.), p(0., 1.)]);
        assert!((g.area - 0.5).abs() < 1e-15);
        assert!((g.diameter - 2f64.sqrt()).abs() < 1e-15);
        assert!((g.centroid.x - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn regular_hexagon_area() {
        let pts: Vec<Point> = (0..6)
            .map(|k| {
                let t = k as f64 * std::f64::consts::PI / 3.0;
                p(t.cos(), t.sin())
            })
            .collect();
        let g = CellGeometry::from_points(&pts);
        let exact = 1.5 * 3f64.sqrt();
        assert!((g.area - exact).abs() < 1e-12);
        assert!(g.centroid.x.abs() < 1e-15 && g.centroid.y.abs() < 1e-15);
        assert!((g.diameter - 2.0).abs() < 1e-15);
    }

    #[test]
    fn invalid_cell_id() {
        let m = generate_structured_triangle_mesh(1).unwrap();
        assert!(matches!(
            cell_geometry(&m, 2),
            Err(Error::CellOutOfRange(2))
        ));
    }

    #[test]
    fn structured_mesh_is_uniform() {
        let m = generate_structured_triangle_mesh(4).unwrap();
        let q = mesh_quality(&m);
        assert!((q.uniformity - 1.0).abs() < 1e-12);
        assert!(q.all_star_shaped());
    }

    #[test]
    fn convex_polygons_are_star_shaped() {
        let pts: Vec<Point> = (0..9)
            .map(|k| {
                let t = k as f64 * 2.0 * std::f64::consts::PI / 9.0;
                p(2.0 * t.cos(), t.sin())
            })
            .collect();
        let g = CellGeometry::from_points(&pts);
        assert!(star_shaped_wrt_centroid(&pts, g.centroid, g.diameter));
    }

    proptest! {
        #[test]
        fn geometry_under_translation(dx in -100.0f64..100.0, dy in -100.0f64..100.0) {
            let base = [p(0., 0.), p(2., 0.), p(2., 1.), p(1., 1.), p(1., 2.), p(0., 2.)];
            let moved: Vec<Point> = base.iter().map(|q| p(q.x + dx, q.y + dy)).collect();
            let g0 = CellGeometry::from_points(&base);
            let g1 = CellGeometry::from_points(&moved);
            prop_assert!((g0.area - g1.area).abs() < 1e-11);
            prop_assert!((g0.diameter - g1.diameter).abs() < 1e-11);
            prop_assert!((g0.centroid.x + dx - g1.centroid.x).abs() < 1e-11);
            prop_assert!((g0.centroid.y + dy - g1.centroid.y).abs() < 1e-11);
            prop_assert!(g1.diameter >= g1.edge_lengths.iter().copied().fold(0.0, f64::max));
        }
    }
}
