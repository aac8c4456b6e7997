use std::fmt::Write as _;
use std::fs;

use super::{benchmark_load, exact_gradient, exact_solution, status_of, BenchConfig};
use crate::error::{Error, Result};
use crate::mesh::generate_structured_triangle_mesh;
use crate::solver::DirectSolver;
use crate::vem::{assemble_system, error_norms, ErrorNorms};

#[derive(Clone, Debug, PartialEq)]
pub struct StudyRow {
    pub n: usize,
    pub h: f64,
    pub dofs: usize,
    pub errors: Option<ErrorNorms>,
    pub status: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrderTable {
    pub rows: Vec<StudyRow>,
    /// Least-squares slopes of `log e` against `log h`.
    pub l2_order: Option<f64>,
    pub h1_order: Option<f64>,
}

impl OrderTable {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("n,h,dofs,l2_error,h1_error,l2_order,h1_order,status\n");
        let fmt = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |v| format!("{v:.6e}"));
        let ord = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |v| format!("{v:.4}"));
        let mut prev: Option<(f64, ErrorNorms)> = None;
        for r in &self.rows {
            let (l2o, h1o) = match (prev, r.errors) {
                (Some((hp, ep)), Some(e)) => {
                    let lh = (r.h / hp).ln();
                    (
                        Some((e.l2 / ep.l2).ln() / lh),
                        Some((e.h1 / ep.h1).ln() / lh),
                    )
                }
                _ => (None, None),
            };
            let _ = writeln!(
                s,
                "{},{:.6},{},{},{},{},{},{}",
                r.n,
                r.h,
                r.dofs,
                fmt(r.errors.map(|e| e.l2)),
                fmt(r.errors.map(|e| e.h1)),
                ord(l2o),
                ord(h1o),
                r.status
            );
            if let Some(e) = r.errors {
                prev = Some((r.h, e));
            }
        }
        let _ = writeln!(
            s,
            "fit,-,-,-,-,{},{},{}",
            ord(self.l2_order),
            ord(self.h1_order),
            if self.l2_order.is_some() {
                "ok"
            } else {
                "error: fewer than two solved meshes"
            }
        );
        s
    }
}

/// Discretization errors of a direct solve on the structured mesh with `n`
/// subdivisions per side.
pub fn study_errors(n: usize) -> Result<(usize, ErrorNorms)> {
    let mesh = generate_structured_triangle_mesh(n)?;
    let sys = assemble_system(&mesh, 1.0, benchmark_load)?;
    let uh = DirectSolver::new(&sys.a)?.solve(&sys.rhs);
    let e = error_norms(&mesh, &sys.dofs, &uh, exact_solution, exact_gradient)?;
    Ok((sys.rhs.len(), e))
}

/// Slope of the least-squares line through `(x, y)`.
pub fn least_squares_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let m = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / m;
    let my = points.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Solves the benchmark problem on every `cfg.study_n` mesh, fits the
/// observed L2 and H1 orders and writes `orders.csv` under `cfg.out`.
pub fn run_convergence_study(cfg: &BenchConfig) -> Result<OrderTable> {
    if cfg.study_n.is_empty() {
        return Err(Error::Config("study_n list is empty".into()));
    }
    let rows: Vec<StudyRow> = cfg
        .study_n
        .iter()
        .map(|&n| {
            let h = 1.0 / n as f64;
            match study_errors(n) {
                Ok((dofs, e)) => StudyRow {
                    n,
                    h,
                    dofs,
                    errors: Some(e),
                    status: "ok".into(),
                },
                Err(err) => StudyRow {
                    n,
                    h,
                    dofs: 0,
                    errors: None,
                    status: status_of(&err),
                },
            }
        })
        .collect();
    let fit = |pick: fn(&ErrorNorms) -> f64| {
        let pts: Vec<(f64, f64)> = rows
            .iter()
            .filter_map(|r| r.errors.as_ref().map(|e| (r.h.ln(), pick(e).ln())))
            .collect();
        least_squares_slope(&pts)
    };
    let table = OrderTable {
        l2_order: fit(|e| e.l2),
        h1_order: fit(|e| e.h1),
        rows,
    };
    fs::create_dir_all(&cfg.out)?;
    fs::write(cfg.out.join("orders.csv"), table.to_csv())?;
    Ok(table)
}
