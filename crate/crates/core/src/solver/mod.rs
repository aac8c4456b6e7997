//! Smoothers, multigrid cycles, Krylov baselines and convergence diagnostics.

mod direct;
mod krylov;
mod multigrid;
mod report;
mod smoother;
mod spectral;

pub use direct::{DirectSolver, SkylineCholesky, DENSE_LIMIT};
pub use krylov::{cg_solve, ic_factorize, pcg_solve, IcFactor, DROP_TOL, MAX_FILL};
pub use multigrid::{mg_solve, CycleKind, MgConfig, Multigrid};
pub use report::{convergence_factor, SolveReport};
pub use smoother::{gauss_seidel_sweep, SweepDirection};
pub use spectral::{two_grid_spectral_radius, SpectralEstimate, DEFAULT_SEED, POWER_STEPS};
