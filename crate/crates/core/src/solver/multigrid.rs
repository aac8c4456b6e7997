use std::time::Instant;

use super::direct::DirectSolver;
use super::report::SolveReport;
use super::smoother::{gauss_seidel_sweep, SweepDirection};
use crate::error::{Error, Result};
use crate::sparse::{norm2, SparseMatrix};
use crate::transfer::{CoarseMode, TransferSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CycleKind {
    /// Two-level method: exact solve on the level below the finest.
    TwoLevel,
    V,
    W,
}

impl CycleKind {
    /// Number of recursive coarse corrections `p`.
    pub fn recursions(self) -> usize {
        match self {
            CycleKind::TwoLevel | CycleKind::V => 1,
            CycleKind::W => 2,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            CycleKind::TwoLevel => "TL",
            CycleKind::V => "V",
            CycleKind::W => "W",
        }
    }
}

impl std::str::FromStr for CycleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "tl" | "two-level" | "twolevel" => Ok(CycleKind::TwoLevel),
            "v" => Ok(CycleKind::V),
            "w" => Ok(CycleKind::W),
            other => Err(Error::Config(format!("unknown cycle `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MgConfig {
    pub cycle: CycleKind,
    pub nu: usize,
    pub levels: usize,
    pub mode: CoarseMode,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for MgConfig {
    fn default() -> Self {
        MgConfig {
            cycle: CycleKind::TwoLevel,
            nu: 2,
            levels: 2,
            mode: CoarseMode::Inherited,
            tol: 1e-8,
            max_iter: 200,
        }
    }
}

impl MgConfig {
    pub fn validate(&self) -> Result<()> {
        if self.nu == 0 {
            return Err(Error::Config("nu must be at least 1".into()));
        }
        if !(self.tol > 0.0) {
            return Err(Error::Config(format!(
                "tolerance must be positive, got {}",
                self.tol
            )));
        }
        if self.levels < 2 {
            return Err(Error::Config(format!(
                "need at least 2 levels, got {}",
                self.levels
            )));
        }
        if self.cycle == CycleKind::TwoLevel && self.levels != 2 {
            return Err(Error::Config(
                "the two-level method uses exactly 2 levels".into(),
            ));
        }
        Ok(())
    }
}

/// Level operators, prolongations and the cached coarsest factorization.
#[derive(Debug)]
pub struct Multigrid<'a> {
    transfer: &'a TransferSet,
    coarse: DirectSolver,
}

impl<'a> Multigrid<'a> {
    pub fn new(transfer: &'a TransferSet) -> Result<Self> {
        let coarse = DirectSolver::new(transfer.operator(1))?;
        Ok(Multigrid { transfer, coarse })
    }

    pub fn num_levels(&self) -> usize {
        self.transfer.num_levels()
    }

    pub fn operator(&self, j: usize) -> &SparseMatrix {
        self.transfer.operator(j)
    }

    /// One `p`-cycle on level `j` for `A_j y = g` from initial guess `x0`.
    pub fn cycle(
        &self,
        j: usize,
        g: &[f64],
        x0: Vec<f64>,
        nu: usize,
        p: usize,
    ) -> Result<Vec<f64>> {
        if j == 1 {
            return Ok(self.coarse.solve(g));
        }
        let a = self.transfer.operator(j);
        let mut x = x0;
        for l in 1..=nu {
            gauss_seidel_sweep(a, g, &mut x, SweepDirection::for_step(l, nu))?;
        }
        let prol = self.transfer.prolongation(j);
        let r = prol.mul_transpose_vec(&a.residual(g, &x));
        let mut q = vec![0.0; prol.ncols()];
        for _ in 0..p {
            q = self.cycle(j - 1, &r, q, nu, p)?;
        }
        for (xi, ci) in x.iter_mut().zip(prol.mul_vec(&q)) {
            *xi += ci;
        }
        for l in nu + 1..=2 * nu {
            gauss_seidel_sweep(a, g, &mut x, SweepDirection::for_step(l, nu))?;
        }
        Ok(x)
    }

    /// The preconditioner `B_J r`: one finest-level cycle from a zero guess.
    pub fn apply(&self, r: &[f64], nu: usize, p: usize) -> Result<Vec<f64>> {
        self.cycle(self.num_levels(), r, vec![0.0; r.len()], nu, p)
    }
}

/// Stationary multigrid iteration `u ← u + B(f − A u)` from `u = 0`.
pub fn mg_solve(transfer: &TransferSet, f: &[f64], config: &MgConfig) -> Result<SolveReport> {
    config.validate()?;
    if transfer.num_levels() != config.levels {
        return Err(Error::Config(format!(
            "config asks for {} levels, transfer set has {}",
            config.levels,
            transfer.num_levels()
        )));
    }
    let a = transfer.operator(transfer.num_levels());
    if f.len() != a.nrows() {
        return Err(Error::Dimension(format!(
            "rhs has {} entries, operator {} rows",
            f.len(),
            a.nrows()
        )));
    }
    let t0 = Instant::now();
    let mg = Multigrid::new(transfer)?;
    let p = config.cycle.recursions();
    let mut u = vec![0.0; f.len()];
    let mut r = f.to_vec();
    let r0 = norm2(&r);
    let mut history = vec![r0];
    let mut converged = r0 == 0.0;
    while !converged && history.len() <= config.max_iter {
        let c = mg.apply(&r, config.nu, p)?;
        for (ui, ci) in u.iter_mut().zip(&c) {
            *ui += ci;
        }
        r = a.residual(f, &u);
        let rk = norm2(&r);
        history.push(rk);
        converged = rk <= config.tol * r0;
    }
    Ok(SolveReport::finish(history, u, converged, t0.elapsed()))
}
