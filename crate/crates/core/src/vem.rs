//! Lowest-order enhanced virtual elements.
//!
//! Degrees of freedom are vertex values. Each element works in the scaled
//! monomial basis `{1, (x - xc)/h, (y - yc)/h}` centered at the polygon
//! centroid `(xc, yc)` and scaled by the diameter `h`. Everything the method
//! needs is computable from boundary data: on every edge the basis functions
//! are linear, so trapezoid sums are exact.
//!
//! In the enhanced space the L2 projection onto linears coincides with the
//! elliptic projection, so `PiNabla` stands in for both.

use nalgebra::{DMatrix, Matrix3};

use crate::error::{Error, Result};
use crate::mesh::{CellGeometry, Point, PolygonalMesh};
use crate::sparse::SparseMatrix;

pub const N_MONOMIALS: usize = 3;

/// Projector matrices of one element in its scaled-monomial basis.
#[derive(Clone, Debug)]
pub struct ElementProjectors {
    /// Monomial center (the centroid).
    pub center: Point,
    /// Monomial scaling (the diameter).
    pub scale: f64,
    /// `d[(i, g)] = m_g(x_i)`, `n × 3`.
    pub d: DMatrix<f64>,
    /// `3 × n`. Rows 1 and 2 hold `∫ ∇m_g · ∇φ_i`; row 0 is the boundary
    /// mean of `φ_i`, which fixes the constant part.
    pub b: DMatrix<f64>,
    pub g: Matrix3<f64>,
    /// Coefficients of `Π∇ φ_i` in the monomial basis, `3 × n`.
    pub pi_star: DMatrix<f64>,
    /// `Π∇` acting on dof vectors, `n × n`.
    pub pi: DMatrix<f64>,
    /// Cell-average gradient of each basis function, `2 × n`.
    pub grad_avg: DMatrix<f64>,
}

impl ElementProjectors {
    /// Builds the projectors of the CCW polygon `pts`; `cell` only labels
    /// errors.
    pub fn new(pts: &[Point], cell: usize) -> Result<Self> {
        let geo = CellGeometry::from_points(pts);
        if !(geo.area > 0.0) {
            return Err(Error::DegenerateCell {
                cell,
                reason: "non-positive area".into(),
            });
        }
        let n = pts.len();
        let (xc, h) = (geo.centroid, geo.diameter);
        let perimeter = geo.perimeter();

        let mut d = DMatrix::zeros(n, N_MONOMIALS);
        for (i, p) in pts.iter().enumerate() {
            d[(i, 0)] = 1.0;
            d[(i, 1)] = (p.x - xc.x) / h;
            d[(i, 2)] = (p.y - xc.y) / h;
        }

        // For linear m_g, ∫_E ∇m_g·∇φ_i = ∮ φ_i ∂m_g/∂n. With outward normal
        // (dy, -dx)/|e| on the CCW edge, the two edges at vertex i contribute
        // (y_{i+1} - y_{i-1}, x_{i-1} - x_{i+1}) / 2.
        let mut b = DMatrix::zeros(N_MONOMIALS, n);
        let mut grad_avg = DMatrix::zeros(2, n);
        for i in 0..n {
            let prev = pts[(i + n - 1) % n];
            let next = pts[(i + 1) % n];
            let nx = 0.5 * (next.y - prev.y);
            let ny = 0.5 * (prev.x - next.x);
            let e_prev = geo.edge_lengths[(i + n - 1) % n];
            let e_next = geo.edge_lengths[i];
            b[(0, i)] = 0.5 * (e_prev + e_next) / perimeter;
            b[(1, i)] = nx / h;
            b[(2, i)] = ny / h;
            grad_avg[(0, i)] = nx / geo.area;
            grad_avg[(1, i)] = ny / geo.area;
        }

        let gd = &b * &d;
        let g = Matrix3::from_fn(|r, c| gd[(r, c)]);
        let g_inv = g
            .try_inverse()
            .filter(|m| m.iter().all(|v| v.is_finite()))
            .ok_or_else(|| Error::DegenerateCell {
                cell,
                reason: "singular projector matrix G".into(),
            })?;
        let g_inv = DMatrix::from_fn(3, 3, |r, c| g_inv[(r, c)]);
        let pi_star = &g_inv * &b;
        let pi = &d * &pi_star;
        Ok(ElementProjectors {
            center: xc,
            scale: h,
            d,
            b,
            g,
            pi_star,
            pi,
            grad_avg,
        })
    }

    pub fn num_dofs(&self) -> usize {
        self.d.nrows()
    }

    pub fn monomials(&self, x: Point) -> [f64; 3] {
        [
            1.0,
            (x.x - self.center.x) / self.scale,
            (x.y - self.center.y) / self.scale,
        ]
    }

    /// `(Π∇ φ_i)(x)`.
    pub fn eval_basis_projection(&self, i: usize, x: Point) -> f64 {
        let m = self.monomials(x);
        (0..N_MONOMIALS).map(|g| self.pi_star[(g, i)] * m[g]).sum()
    }

    /// `(Π∇ v)(x)` for the local dof vector `v`.
    pub fn eval_projection(&self, v: &[f64], x: Point) -> f64 {
        (0..v.len())
            .map(|i| v[i] * self.eval_basis_projection(i, x))
            .sum()
    }

    /// Cell mean of `Π∇ φ_i`. The linear monomials have zero mean about the
    /// centroid, so only the constant coefficient survives.
    pub fn basis_projection_mean(&self, i: usize) -> f64 {
        self.pi_star[(0, i)]
    }
}

pub fn element_projectors(mesh: &PolygonalMesh, cell: usize) -> Result<ElementProjectors> {
    if cell >= mesh.num_cells() {
        return Err(Error::CellOutOfRange(cell));
    }
    ElementProjectors::new(&mesh.cell_points(cell), cell)
}

/// `μ |E| GᵀG + μ (I - Π∇)ᵀ(I - Π∇)` with `G` the average-gradient matrix:
/// consistency on linears plus the plain dof-product stabilization.
pub fn element_stiffness(
    proj: &ElementProjectors,
    geometry: &CellGeometry,
    mu: f64,
) -> DMatrix<f64> {
    let n = proj.num_dofs();
    let consistency = proj.grad_avg.transpose() * &proj.grad_avg * geometry.area;
    let rem = DMatrix::<f64>::identity(n, n) - &proj.pi;
    let stab = rem.transpose() * rem;
    (consistency + stab) * mu
}

/// Mesh vertex ↔ interior dof numbering (boundary vertices carry no dof).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DofMap {
    vertex_to_dof: Vec<Option<usize>>,
    dof_to_vertex: Vec<usize>,
}

impl DofMap {
    /// Interior vertices numbered in ascending vertex order.
    pub fn interior(mesh: &PolygonalMesh) -> Self {
        let mut vertex_to_dof = vec![None; mesh.num_vertices()];
        let mut dof_to_vertex = Vec::new();
        for (v, slot) in vertex_to_dof.iter_mut().enumerate() {
            if !mesh.is_boundary(v) {
                *slot = Some(dof_to_vertex.len());
                dof_to_vertex.push(v);
            }
        }
        DofMap {
            vertex_to_dof,
            dof_to_vertex,
        }
    }

    /// Every vertex is a dof.
    pub fn all(mesh: &PolygonalMesh) -> Self {
        let n = mesh.num_vertices();
        DofMap {
            vertex_to_dof: (0..n).map(Some).collect(),
            dof_to_vertex: (0..n).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.dof_to_vertex.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dof_to_vertex.is_empty()
    }

    pub fn dof(&self, vertex: usize) -> Option<usize> {
        self.vertex_to_dof[vertex]
    }

    pub fn vertex(&self, dof: usize) -> usize {
        self.dof_to_vertex[dof]
    }

    /// Expands a dof vector to all vertices, zero on boundary vertices.
    pub fn to_vertex_values(&self, dofs: &[f64]) -> Vec<f64> {
        self.vertex_to_dof
            .iter()
            .map(|d| d.map_or(0.0, |d| dofs[d]))
            .collect()
    }
}

/// Quadrature for the cell average of the load.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum LoadRule {
    /// `f(centroid)`.
    #[default]
    Centroid,
    /// Centroid fan with the mid-edge rule on every sub-triangle.
    Fan,
}

#[derive(Clone, Debug)]
pub struct AssembledSystem {
    pub a: SparseMatrix,
    pub rhs: Vec<f64>,
    pub dofs: DofMap,
}

/// Assembles the stiffness matrix and load vector over interior dofs with
/// homogeneous Dirichlet data.
pub fn assemble_system<F: Fn(Point) -> f64>(
    mesh: &PolygonalMesh,
    mu: f64,
    f: F,
) -> Result<AssembledSystem> {
    assemble_system_with(mesh, mu, f, LoadRule::Centroid)
}

pub fn assemble_system_with<F: Fn(Point) -> f64>(
    mesh: &PolygonalMesh,
    mu: f64,
    f: F,
    rule: LoadRule,
) -> Result<AssembledSystem> {
    let dofs = DofMap::interior(mesh);
    if dofs.is_empty() {
        return Err(Error::NoInteriorDofs);
    }
    let (a, rhs) = assemble(mesh, mu, &dofs, Some((&f, rule)))?;
    Ok(AssembledSystem { a, rhs, dofs })
}

/// Stiffness matrix over interior dofs only.
pub fn assemble_stiffness(mesh: &PolygonalMesh, mu: f64) -> Result<(SparseMatrix, DofMap)> {
    let dofs = DofMap::interior(mesh);
    if dofs.is_empty() {
        return Err(Error::NoInteriorDofs);
    }
    let (a, _) = assemble::<fn(Point) -> f64>(mesh, mu, &dofs, None)?;
    Ok((a, dofs))
}

/// Stiffness matrix over all vertices, before Dirichlet elimination.
pub fn assemble_full_stiffness(mesh: &PolygonalMesh, mu: f64) -> Result<SparseMatrix> {
    let dofs = DofMap::all(mesh);
    Ok(assemble::<fn(Point) -> f64>(mesh, mu, &dofs, None)?.0)
}

fn assemble<F: Fn(Point) -> f64>(
    mesh: &PolygonalMesh,
    mu: f64,
    dofs: &DofMap,
    load: Option<(&F, LoadRule)>,
) -> Result<(SparseMatrix, Vec<f64>)> {
    if mu <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "diffusion coefficient {mu} must be positive"
        )));
    }
    let mut triplets = Vec::new();
    let mut rhs = vec![0.0; dofs.len()];
    for c in 0..mesh.num_cells() {
        let pts = mesh.cell_points(c);
        let geo = CellGeometry::from_points(&pts);
        let proj = ElementProjectors::new(&pts, c)?;
        let k = element_stiffness(&proj, &geo, mu);
        let local: Vec<Option<usize>> = mesh.cell(c).iter().map(|&v| dofs.dof(v)).collect();
        for (i, di) in local.iter().enumerate() {
            let Some(di) = *di else { continue };
            for (j, dj) in local.iter().enumerate() {
                if let Some(dj) = *dj {
                    triplets.push((di, dj, k[(i, j)]));
                }
            }
        }
        if let Some((f, rule)) = load {
            let fbar = match rule {
                LoadRule::Centroid => f(geo.centroid),
                LoadRule::Fan => fan_integral(&pts, geo.centroid, f) / geo.area,
            };
            for (i, di) in local.iter().enumerate() {
                if let Some(di) = *di {
                    rhs[di] += fbar * geo.area * proj.basis_projection_mean(i);
                }
            }
        }
    }
    Ok((
        SparseMatrix::from_triplets(dofs.len(), dofs.len(), &triplets),
        rhs,
    ))
}

/// Integral over the polygon by fanning from `center` and applying the
/// three mid-edge point rule (exact for quadratics) on every sub-triangle.
pub fn fan_integral<F: Fn(Point) -> f64>(pts: &[Point], center: Point, f: F) -> f64 {
    let k = pts.len();
    let mid = |a: Point, b: Point| Point::new(0.5 * (a.x + b.x), 0.5 * (a.y + b.y));
    let mut total = 0.0;
    for i in 0..k {
        let (a, b) = (pts[i], pts[(i + 1) % k]);
        let area = 0.5 * crate::mesh::orient(center, a, b);
        total += area / 3.0 * (f(mid(center, a)) + f(mid(a, b)) + f(mid(b, center)));
    }
    total
}

/// Values of `g` at the interior vertices, in dof order.
pub fn interpolate<G: Fn(Point) -> f64>(mesh: &PolygonalMesh, dofs: &DofMap, g: G) -> Vec<f64> {
    (0..dofs.len())
        .map(|d| g(mesh.vertex(dofs.vertex(d))))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErrorNorms {
    /// `‖u - Π∇ u_h‖_{L2}` summed over elements.
    pub l2: f64,
    /// `‖∇u - Π⁰₀∇u_h‖_{L2}` summed over elements.
    pub h1: f64,
}

/// Computable error surrogates of the discrete solution `uh` (interior dof
/// vector, zero boundary values).
pub fn error_norms<U, GU>(
    mesh: &PolygonalMesh,
    dofs: &DofMap,
    uh: &[f64],
    u: U,
    grad_u: GU,
) -> Result<ErrorNorms>
where
    U: Fn(Point) -> f64,
    GU: Fn(Point) -> [f64; 2],
{
    let values = dofs.to_vertex_values(uh);
    let (mut l2, mut h1) = (0.0, 0.0);
    for c in 0..mesh.num_cells() {
        let pts = mesh.cell_points(c);
        let proj = ElementProjectors::new(&pts, c)?;
        let local: Vec<f64> = mesh.cell(c).iter().map(|&v| values[v]).collect();
        let gx: f64 = (0..local.len())
            .map(|i| proj.grad_avg[(0, i)] * local[i])
            .sum();
        let gy: f64 = (0..local.len())
            .map(|i| proj.grad_avg[(1, i)] * local[i])
            .sum();
        l2 += fan_integral(&pts, proj.center, |x| {
            let e = u(x) - proj.eval_projection(&local, x);
            e * e
        });
        h1 += fan_integral(&pts, proj.center, |x| {
            let g = grad_u(x);
            (g[0] - gx).powi(2) + (g[1] - gy).powi(2)
        });
    }
    Ok(ErrorNorms {
        l2: l2.sqrt(),
        h1: h1.sqrt(),
    })
}
