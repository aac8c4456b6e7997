use std::time::Duration;

/// Outcome of an iterative solve.
#[derive(Clone, Debug)]
pub struct SolveReport {
    pub iterations: usize,
    /// Euclidean residual norms `r_0 .. r_N`.
    pub residuals: Vec<f64>,
    pub rho: f64,
    pub wall_time: Duration,
    pub converged: bool,
    pub solution: Vec<f64>,
}

impl SolveReport {
    pub(crate) fn finish(
        residuals: Vec<f64>,
        solution: Vec<f64>,
        converged: bool,
        wall_time: Duration,
    ) -> Self {
        let rho = convergence_factor(&residuals);
        SolveReport {
            iterations: residuals.len() - 1,
            residuals,
            rho,
            wall_time,
            converged,
            solution,
        }
    }

    pub fn relative_residual(&self) -> f64 {
        let r0 = self.residuals[0];
        if r0 == 0.0 {
            0.0
        } else {
            self.residuals.last().unwrap() / r0
        }
    }
}

/// Geometric-mean residual reduction `exp(ln(r_N / r_0) / N)`.
///
/// Zero when `r_0 = 0` or the history has a single entry.
pub fn convergence_factor(residuals: &[f64]) -> f64 {
    let n = residuals.len().saturating_sub(1);
    if n == 0 || residuals[0] == 0.0 {
        return 0.0;
    }
    ((residuals[n] / residuals[0]).ln() / n as f64).exp()
}
