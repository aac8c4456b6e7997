use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::multigrid::Multigrid;
use crate::error::{Error, Result};
use crate::sparse::{dot, SparseMatrix};
use crate::transfer::TransferSet;

pub const DEFAULT_SEED: u64 = 20_240_917;
pub const POWER_STEPS: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralEstimate {
    pub rho: f64,
    /// Set when the last two estimates still differ by more than 1e-3
    /// relative.
    pub unconverged: bool,
}

/// Power iteration on the two-level error propagation `e ↦ e − B(A e)`.
///
/// Norms are taken in the energy inner product, in which the map is
/// self-adjoint and positive semidefinite.
pub fn two_grid_spectral_radius(
    transfer: &TransferSet,
    nu: usize,
    seed: u64,
) -> Result<SpectralEstimate> {
    if transfer.num_levels() != 2 {
        return Err(Error::InvalidArgument(format!(
            "two-grid probe needs 2 levels, got {}",
            transfer.num_levels()
        )));
    }
    if nu == 0 {
        return Err(Error::InvalidArgument("nu must be at least 1".into()));
    }
    let mg = Multigrid::new(transfer)?;
    let a = mg.operator(2);
    let n = a.nrows();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut e: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    normalize(a, &mut e);
    let (mut rho, mut prev) = (0.0, f64::NAN);
    for _ in 0..POWER_STEPS {
        let be = mg.apply(&a.mul_vec(&e), nu, 1)?;
        let mut next: Vec<f64> = e.iter().zip(&be).map(|(x, y)| x - y).collect();
        prev = rho;
        rho = normalize(a, &mut next);
        e = next;
        if rho == 0.0 {
            break;
        }
    }
    let unconverged = (rho - prev).abs() > 1e-3 * rho.abs();
    Ok(SpectralEstimate { rho, unconverged })
}

fn normalize(a: &SparseMatrix, v: &mut [f64]) -> f64 {
    let norm = dot(&a.mul_vec(v), v).max(0.0).sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
    norm
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agglomeration::{build_hierarchy, build_hierarchy_with, DEFAULT_TARGETS};
    use crate::mesh::generate_structured_triangle_mesh;
    use crate::transfer::{coarse_operators, CoarseMode};
    use crate::vem::assemble_stiffness;

    #[test]
    fn contraction_and_monotone_in_nu() {
        let mesh = generate_structured_triangle_mesh(8).unwrap();
        let h = build_hierarchy_with(&mesh, 2, &DEFAULT_TARGETS).unwrap();
        let (a, _) = assemble_stiffness(&mesh, 1.0).unwrap();
        let t = coarse_operators(&a, &h, 1.0, CoarseMode::Inherited).unwrap();
        let r2 = two_grid_spectral_radius(&t, 2, DEFAULT_SEED).unwrap();
        let r8 = two_grid_spectral_radius(&t, 8, DEFAULT_SEED).unwrap();
        assert!(r2.rho > 0.0 && r2.rho < 1.0);
        assert!(r8.rho < r2.rho);
        assert_eq!(r2, two_grid_spectral_radius(&t, 2, DEFAULT_SEED).unwrap());
    }

    #[test]
    fn identity_hierarchy_is_exact() {
        let mesh = generate_structured_triangle_mesh(4).unwrap();
        let h = build_hierarchy(&mesh, 2, 1).unwrap();
        let (a, _) = assemble_stiffness(&mesh, 1.0).unwrap();
        let t = coarse_operators(&a, &h, 1.0, CoarseMode::Inherited).unwrap();
        let r = two_grid_spectral_radius(&t, 1, 1).unwrap();
        assert!(r.rho < 1e-10);
    }
}
