//! Intergrid transfer and the ladder of level operators.
//!
//! The prolongation from level `j - 1` to level `j` copies coarse vertex
//! values onto the identical fine vertices and, at fine vertices strictly
//! inside an agglomerate, evaluates the coarse element's projection of each
//! coarse basis function. Restriction is the transpose.

use crate::agglomeration::MeshHierarchy;
use crate::error::{Error, Result};
use crate::sparse::SparseMatrix;
use crate::vem::{assemble_stiffness, DofMap, ElementProjectors};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CoarseMode {
    /// Galerkin products `Pᵀ A P`.
    Inherited,
    /// Fresh assembly on each coarse mesh.
    NonInherited,
}

impl CoarseMode {
    pub fn as_str(self) -> &'static str {
        match self {
            CoarseMode::Inherited => "inherited",
            CoarseMode::NonInherited => "noninherited",
        }
    }
}

impl std::str::FromStr for CoarseMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inherited" => Ok(CoarseMode::Inherited),
            "noninherited" | "non-inherited" => Ok(CoarseMode::NonInherited),
            other => Err(Error::Config(format!("unknown mode `{other}`"))),
        }
    }
}

/// Prolongation over all vertices of levels `j - 1` (columns) and `j` (rows).
///
/// Fine vertices that coincide with a coarse vertex get a single unit entry.
/// Every other fine vertex lies strictly inside one agglomerate and gets the
/// values of that agglomerate's projected basis functions.
pub fn prolongation_matrix_full(h: &MeshHierarchy, j: usize) -> Result<SparseMatrix> {
    check_level(h, j)?;
    let (fine, coarse) = (h.level(j), h.level(j - 1));
    let nodes = h.coarse_nodes(j);
    let mut coarse_of_fine = vec![None; fine.num_vertices()];
    for (cv, &fv) in nodes.iter().enumerate() {
        coarse_of_fine[fv] = Some(cv);
    }
    let mut covered = vec![false; fine.num_vertices()];
    let mut triplets = Vec::new();
    for (cv, &fv) in nodes.iter().enumerate() {
        triplets.push((fv, cv, 1.0));
        covered[fv] = true;
    }
    for (e, children) in h.children(j).iter().enumerate() {
        let proj = ElementProjectors::new(&coarse.cell_points(e), e)?;
        let cell = coarse.cell(e);
        let mut inner: Vec<usize> = children
            .iter()
            .flat_map(|&c| fine.cell(c).iter().copied())
            .filter(|fv| !cell.iter().any(|&cv| nodes[cv] == *fv))
            .collect();
        inner.sort_unstable();
        inner.dedup();
        for fv in inner {
            if coarse_of_fine[fv].is_some() {
                return Err(Error::CorruptHierarchy {
                    level: j,
                    msg: format!(
                        "fine vertex {fv} is a coarse node and interior to coarse cell {e}"
                    ),
                });
            }
            if covered[fv] {
                return Err(Error::CorruptHierarchy {
                    level: j,
                    msg: format!("fine vertex {fv} is interior to more than one coarse cell"),
                });
            }
            covered[fv] = true;
            let x = fine.vertex(fv);
            for (t, &cv) in cell.iter().enumerate() {
                triplets.push((fv, cv, proj.eval_basis_projection(t, x)));
            }
        }
    }
    if let Some(v) = covered.iter().position(|c| !c) {
        return Err(Error::CorruptHierarchy {
            level: j,
            msg: format!("fine vertex {v} is not reached by the prolongation"),
        });
    }
    Ok(SparseMatrix::from_triplets(
        fine.num_vertices(),
        coarse.num_vertices(),
        &triplets,
    ))
}

/// Prolongation between interior dofs of levels `j - 1` and `j`: the
/// all-vertex operator with Dirichlet rows and columns removed.
pub fn prolongation_matrix(h: &MeshHierarchy, j: usize) -> Result<SparseMatrix> {
    let full = prolongation_matrix_full(h, j)?;
    let fine_dofs = DofMap::interior(h.level(j));
    let coarse_dofs = DofMap::interior(h.level(j - 1));
    let mut triplets = Vec::with_capacity(full.nnz());
    for fv in 0..full.nrows() {
        let Some(r) = fine_dofs.dof(fv) else { continue };
        let (cols, vals) = full.row(fv);
        for (&cv, &v) in cols.iter().zip(vals) {
            if let Some(c) = coarse_dofs.dof(cv) {
                triplets.push((r, c, v));
            }
        }
    }
    Ok(SparseMatrix::from_triplets(
        fine_dofs.len(),
        coarse_dofs.len(),
        &triplets,
    ))
}

fn check_level(h: &MeshHierarchy, j: usize) -> Result<()> {
    if j < 2 || j > h.num_levels() {
        return Err(Error::InvalidArgument(format!(
            "no prolongation into level {j} of a {}-level hierarchy",
            h.num_levels()
        )));
    }
    Ok(())
}

/// Prolongations and level operators for a whole hierarchy.
#[derive(Clone, Debug)]
pub struct TransferSet {
    // index k: level k + 2 from level k + 1
    prolongations: Vec<SparseMatrix>,
    // index k: level k + 1
    operators: Vec<SparseMatrix>,
    pub mode: CoarseMode,
}

impl TransferSet {
    /// `prolongations[k]` maps level `k + 1` into level `k + 2`; `operators[k]`
    /// is the operator of level `k + 1`.
    pub fn from_parts(
        prolongations: Vec<SparseMatrix>,
        operators: Vec<SparseMatrix>,
        mode: CoarseMode,
    ) -> Self {
        assert_eq!(prolongations.len() + 1, operators.len());
        TransferSet {
            prolongations,
            operators,
            mode,
        }
    }

    pub fn num_levels(&self) -> usize {
        self.operators.len()
    }

    /// Level operator `A_j`, 1-based.
    pub fn operator(&self, j: usize) -> &SparseMatrix {
        &self.operators[j - 1]
    }

    /// Prolongation into level `j` from level `j - 1`, `j >= 2`. Restriction
    /// is its transpose and is never stored.
    pub fn prolongation(&self, j: usize) -> &SparseMatrix {
        &self.prolongations[j - 2]
    }
}

/// Builds `P_j` for every level and the coarse operators below `a_fine`.
pub fn coarse_operators(
    a_fine: &SparseMatrix,
    h: &MeshHierarchy,
    mu: f64,
    mode: CoarseMode,
) -> Result<TransferSet> {
    let nl = h.num_levels();
    let fine_dofs = h.finest().num_interior_vertices();
    if a_fine.nrows() != fine_dofs || a_fine.ncols() != fine_dofs {
        return Err(Error::Dimension(format!(
            "fine operator is {}x{} but the finest level has {fine_dofs} dofs",
            a_fine.nrows(),
            a_fine.ncols()
        )));
    }
    let prolongations = (2..=nl)
        .map(|j| prolongation_matrix(h, j))
        .collect::<Result<Vec<_>>>()?;
    let mut operators = vec![a_fine.clone()];
    for j in (1..nl).rev() {
        let a = match mode {
            CoarseMode::Inherited => {
                SparseMatrix::galerkin(operators.last().unwrap(), &prolongations[j - 1])?
            }
            CoarseMode::NonInherited => assemble_stiffness(h.level(j), mu)?.0,
        };
        operators.push(a);
    }
    operators.reverse();
    Ok(TransferSet {
        prolongations,
        operators,
        mode,
    })
}
