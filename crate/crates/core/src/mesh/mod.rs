//! Polygonal meshes of the unit square.
//!
//! A [`PolygonalMesh`] is one level of a multigrid hierarchy: a vertex array,
//! counter-clockwise vertex cycles for the cells and a per-vertex flag marking
//! the Dirichlet boundary. Meshes are immutable once built.

mod geometry;
mod io;
mod svg;

use std::collections::HashMap;

pub use geometry::{
    cell_geometry, mesh_quality, polygon_area, polygon_centroid, polygon_diameter, CellGeometry,
    QualityReport,
};
pub use io::{load_triangle_format, read_native, write_native};
pub use svg::{export_hierarchy_svg, export_svg, render_svg, SvgOptions};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn dist(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Orientation of `c` relative to the directed line `a -> b` (twice the signed
/// triangle area).
pub fn orient(a: Point, b: Point, c: Point) -> f64 {
    (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
}

/// Undirected edge key with the smaller vertex first.
pub type EdgeKey = (usize, usize);

pub fn edge_key(a: usize, b: usize) -> EdgeKey {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PolygonalMesh {
    vertices: Vec<Point>,
    cells: Vec<Vec<usize>>,
    boundary_vertex: Vec<bool>,
    level_tag: usize,
}

impl PolygonalMesh {
    /// Builds a mesh with explicit boundary flags.
    ///
    /// Every cell must reference valid, distinct vertices and have positive
    /// signed area. Full topological validation lives in [`Self::validate`].
    pub fn from_parts(
        vertices: Vec<Point>,
        cells: Vec<Vec<usize>>,
        boundary_vertex: Vec<bool>,
    ) -> Result<Self> {
        if boundary_vertex.len() != vertices.len() {
            return Err(Error::InvalidMesh(format!(
                "{} boundary flags for {} vertices",
                boundary_vertex.len(),
                vertices.len()
            )));
        }
        for (c, cell) in cells.iter().enumerate() {
            check_cell_indices(c, cell, vertices.len())?;
            let pts: Vec<Point> = cell.iter().map(|&v| vertices[v]).collect();
            if polygon_area(&pts) <= 0.0 {
                return Err(Error::DegenerateCell {
                    cell: c,
                    reason: "non-positive signed area (cells must be CCW)".into(),
                });
            }
        }
        Ok(PolygonalMesh {
            vertices,
            cells,
            boundary_vertex,
            level_tag: 0,
        })
    }

    /// Builds a mesh and derives boundary flags from the topology: a vertex is
    /// on the boundary iff it touches an edge with a single incident cell.
    pub fn from_cells(vertices: Vec<Point>, cells: Vec<Vec<usize>>) -> Result<Self> {
        let mut boundary = vec![false; vertices.len()];
        for (c, cell) in cells.iter().enumerate() {
            check_cell_indices(c, cell, vertices.len())?;
        }
        for ((a, b), inc) in edge_incidence(&cells) {
            if inc.len() == 1 {
                boundary[a] = true;
                boundary[b] = true;
            }
        }
        Self::from_parts(vertices, cells, boundary)
    }

    pub fn with_level_tag(mut self, level: usize) -> Self {
        self.level_tag = level;
        self
    }

    pub fn level_tag(&self) -> usize {
        self.level_tag
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn vertex(&self, v: usize) -> Point {
        self.vertices[v]
    }

    pub fn cells(&self) -> &[Vec<usize>] {
        &self.cells
    }

    pub fn cell(&self, c: usize) -> &[usize] {
        &self.cells[c]
    }

    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_boundary(&self, v: usize) -> bool {
        self.boundary_vertex[v]
    }

    pub fn boundary_flags(&self) -> &[bool] {
        &self.boundary_vertex
    }

    pub fn cell_points(&self, c: usize) -> Vec<Point> {
        self.cells[c].iter().map(|&v| self.vertices[v]).collect()
    }

    pub fn cell_area(&self, c: usize) -> f64 {
        polygon_area(&self.cell_points(c))
    }

    pub fn total_area(&self) -> f64 {
        (0..self.num_cells()).map(|c| self.cell_area(c)).sum()
    }

    /// Number of vertices not on the Dirichlet boundary.
    pub fn num_interior_vertices(&self) -> usize {
        self.boundary_vertex.iter().filter(|&&b| !b).count()
    }

    /// Maps every edge to the cells containing it, in ascending cell order.
    pub fn edge_incidence(&self) -> HashMap<EdgeKey, Vec<usize>> {
        edge_incidence(&self.cells)
    }

    /// Neighbor across each local edge `cell[k] -> cell[k+1]`, `None` on the
    /// domain boundary.
    pub fn cell_neighbors(&self) -> Vec<Vec<Option<usize>>> {
        let inc = self.edge_incidence();
        self.cells
            .iter()
            .enumerate()
            .map(|(c, cell)| {
                let k = cell.len();
                (0..k)
                    .map(|i| {
                        let key = edge_key(cell[i], cell[(i + 1) % k]);
                        inc[&key].iter().copied().find(|&o| o != c)
                    })
                    .collect()
            })
            .collect()
    }

    /// Checks all structural invariants: simple CCW cells and edge
    /// manifoldness (interior edges shared by two cells, boundary edges by one).
    pub fn validate(&self) -> Result<()> {
        for c in 0..self.num_cells() {
            let pts = self.cell_points(c);
            if polygon_area(&pts) <= 0.0 {
                return Err(Error::DegenerateCell {
                    cell: c,
                    reason: "non-positive signed area".into(),
                });
            }
            if !is_simple_polygon(&pts) {
                return Err(Error::DegenerateCell {
                    cell: c,
                    reason: "self-intersecting boundary".into(),
                });
            }
        }
        for ((a, b), inc) in self.edge_incidence() {
            match inc.len() {
                1 => {
                    if !self.boundary_vertex[a] || !self.boundary_vertex[b] {
                        return Err(Error::InvalidMesh(format!(
                            "edge ({a}, {b}) has one incident cell but is not flagged boundary"
                        )));
                    }
                }
                2 => {
                    let (c0, c1) = (inc[0], inc[1]);
                    if directed_edge_in(&self.cells[c0], a, b)
                        == directed_edge_in(&self.cells[c1], a, b)
                    {
                        return Err(Error::InvalidMesh(format!(
                            "edge ({a}, {b}) traversed in the same direction by cells {c0} and {c1}"
                        )));
                    }
                }
                n => {
                    return Err(Error::InvalidMesh(format!(
                        "edge ({a}, {b}) shared by {n} cells"
                    )))
                }
            }
        }
        Ok(())
    }

    /// Breadth-first connectivity of the cell adjacency graph; returns the
    /// first unreachable cell on failure.
    pub fn check_connected(&self) -> Result<()> {
        if self.cells.is_empty() {
            return Err(Error::InvalidMesh("mesh has no cells".into()));
        }
        let nbrs = self.cell_neighbors();
        let mut seen = vec![false; self.num_cells()];
        let mut queue = std::collections::VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(c) = queue.pop_front() {
            for n in nbrs[c].iter().flatten() {
                if !seen[*n] {
                    seen[*n] = true;
                    queue.push_back(*n);
                }
            }
        }
        match seen.iter().position(|s| !s) {
            Some(c) => Err(Error::DisconnectedMesh(c)),
            None => Ok(()),
        }
    }
}

fn check_cell_indices(c: usize, cell: &[usize], nv: usize) -> Result<()> {
    if cell.len() < 3 {
        return Err(Error::DegenerateCell {
            cell: c,
            reason: format!("{} vertices", cell.len()),
        });
    }
    if let Some(&v) = cell.iter().find(|&&v| v >= nv) {
        return Err(Error::InvalidMesh(format!(
            "cell {c} references vertex {v} of {nv}"
        )));
    }
    let mut sorted = cell.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::DegenerateCell {
            cell: c,
            reason: "repeated vertex".into(),
        });
    }
    Ok(())
}

fn directed_edge_in(cell: &[usize], a: usize, b: usize) -> bool {
    let k = cell.len();
    (0..k).any(|i| cell[i] == a && cell[(i + 1) % k] == b)
}

pub(crate) fn edge_incidence(cells: &[Vec<usize>]) -> HashMap<EdgeKey, Vec<usize>> {
    let mut map: HashMap<EdgeKey, Vec<usize>> = HashMap::new();
    for (c, cell) in cells.iter().enumerate() {
        let k = cell.len();
        for i in 0..k {
            map.entry(edge_key(cell[i], cell[(i + 1) % k]))
                .or_default()
                .push(c);
        }
    }
    map
}

fn segments_touch(p1: Point, p2: Point, q1: Point, q2: Point) -> bool {
    let d1 = orient(q1, q2, p1);
    let d2 = orient(q1, q2, p2);
    let d3 = orient(p1, p2, q1);
    let d4 = orient(p1, p2, q2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    let on = |a: Point, b: Point, c: Point| {
        c.x >= a.x.min(b.x) && c.x <= a.x.max(b.x) && c.y >= a.y.min(b.y) && c.y <= a.y.max(b.y)
    };
    (d1 == 0.0 && on(q1, q2, p1))
        || (d2 == 0.0 && on(q1, q2, p2))
        || (d3 == 0.0 && on(p1, p2, q1))
        || (d4 == 0.0 && on(p1, p2, q2))
}

/// True when no two non-adjacent edges of the closed polygon touch.
pub fn is_simple_polygon(pts: &[Point]) -> bool {
    let k = pts.len();
    if k < 3 {
        return false;
    }
    for i in 0..k {
        let (a, b) = (pts[i], pts[(i + 1) % k]);
        if a == b {
            return false;
        }
        for j in (i + 1)..k {
            // adjacent edges share exactly one endpoint
            if j == i + 1 || (i == 0 && j == k - 1) {
                continue;
            }
            if segments_touch(a, b, pts[j], pts[(j + 1) % k]) {
                return false;
            }
        }
    }
    // adjacent edges folding back onto each other
    (0..k).all(|i| {
        let (a, b, c) = (pts[i], pts[(i + 1) % k], pts[(i + 2) % k]);
        orient(a, b, c) != 0.0 || (b.x - a.x) * (c.x - b.x) + (b.y - a.y) * (c.y - b.y) > 0.0
    })
}

/// Unit-square triangulation with `n` subdivisions per side. Every square is
/// split along its lower-left to upper-right diagonal.
///
/// Vertex `i + j (n + 1)` sits at `(i / n, j / n)`; the two triangles of
/// square `(i, j)` are cells `2 (i + j n)` and `2 (i + j n) + 1`.
pub fn generate_structured_triangle_mesh(n: usize) -> Result<PolygonalMesh> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "structured mesh needs at least one subdivision".into(),
        ));
    }
    let np = n + 1;
    let h = 1.0 / n as f64;
    let mut vertices = Vec::with_capacity(np * np);
    let mut boundary = Vec::with_capacity(np * np);
    for j in 0..np {
        for i in 0..np {
            // exact endpoints so boundary coordinates are exactly 0 or 1
            let x = if i == n { 1.0 } else { i as f64 * h };
            let y = if j == n { 1.0 } else { j as f64 * h };
            vertices.push(Point::new(x, y));
            boundary.push(i == 0 || j == 0 || i == n || j == n);
        }
    }
    let mut cells = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            let a = i + j * np;
            let b = a + 1;
            let c = a + np + 1;
            let d = a + np;
            cells.push(vec![a, b, c]);
            cells.push(vec![a, c, d]);
        }
    }
    PolygonalMesh::from_parts(vertices, cells, boundary)
}
