//! Benchmark grid and discretization-order study.

mod config;
mod study;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

pub use config::{BenchConfig, MeshSource, KEYS};
pub use study::{run_convergence_study, study_errors, OrderTable, StudyRow};

use crate::agglomeration::{build_hierarchy_with, MeshHierarchy};
use crate::error::{Error, Result};
use crate::mesh::{
    export_hierarchy_svg, generate_structured_triangle_mesh, load_triangle_format, Point,
    PolygonalMesh, SvgOptions,
};
use crate::solver::{
    cg_solve, ic_factorize, mg_solve, pcg_solve, CycleKind, MgConfig, SolveReport,
};
use crate::transfer::{coarse_operators, CoarseMode, TransferSet};
use crate::vem::{assemble_system, AssembledSystem};

/// Load of the benchmark problem; its exact solution is `x(1-x)y(1-y)`.
pub fn benchmark_load(p: Point) -> f64 {
    -2.0 * (p.x * (p.x - 1.0) + p.y * (p.y - 1.0))
}

pub fn exact_solution(p: Point) -> f64 {
    p.x * (1.0 - p.x) * p.y * (1.0 - p.y)
}

pub fn exact_gradient(p: Point) -> [f64; 2] {
    [
        (1.0 - 2.0 * p.x) * p.y * (1.0 - p.y),
        p.x * (1.0 - p.x) * (1.0 - 2.0 * p.y),
    ]
}

pub const CSV_HEADER: &str = "mesh,cells,dofs,cycle,levels,nu,mode,iterations,rho,wall_ms,status";

/// Solver of a result row.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RowSolver {
    Mg {
        cycle: CycleKind,
        levels: usize,
        nu: usize,
        mode: CoarseMode,
    },
    Cg,
    Pcg,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub mesh: String,
    pub cells: usize,
    pub dofs: usize,
    pub solver: RowSolver,
    pub iterations: Option<usize>,
    pub rho: Option<f64>,
    pub wall_ms: Option<f64>,
    pub status: String,
}

impl BenchRow {
    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }

    fn csv_line(&self) -> String {
        let dash = || "-".to_string();
        let (cycle, levels, nu, mode) = match self.solver {
            RowSolver::Mg {
                cycle,
                levels,
                nu,
                mode,
            } => (
                cycle.as_str().to_string(),
                levels.to_string(),
                nu.to_string(),
                mode.as_str().to_string(),
            ),
            RowSolver::Cg => ("CG".into(), dash(), dash(), dash()),
            RowSolver::Pcg => ("PCG".into(), dash(), dash(), dash()),
        };
        format!(
            "{},{},{},{cycle},{levels},{nu},{mode},{},{},{},{}",
            self.mesh,
            self.cells,
            self.dofs,
            self.iterations.map_or_else(dash, |i| i.to_string()),
            self.rho.map_or_else(dash, |r| format!("{r:.6}")),
            self.wall_ms.map_or_else(dash, |t| format!("{t:.3}")),
            self.status,
        )
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct BenchTable {
    pub rows: Vec<BenchRow>,
}

impl BenchTable {
    pub fn to_csv(&self) -> String {
        let mut s = String::from(CSV_HEADER);
        s.push('\n');
        for r in &self.rows {
            s.push_str(&r.csv_line());
            s.push('\n');
        }
        s
    }

    pub fn get(&self, mesh: &str, solver: RowSolver) -> Option<&BenchRow> {
        self.rows
            .iter()
            .find(|r| r.mesh == mesh && r.solver == solver)
    }

    /// Mesh ids in first-appearance order.
    pub fn mesh_ids(&self) -> Vec<String> {
        let mut ids: Vec<String> = Vec::new();
        for r in &self.rows {
            if !ids.contains(&r.mesh) {
                ids.push(r.mesh.clone());
            }
        }
        ids
    }

    /// Iteration count of a converged row.
    pub fn iterations(&self, mesh: &str, solver: RowSolver) -> Option<usize> {
        self.get(mesh, solver)
            .filter(|r| r.is_ok())
            .and_then(|r| r.iterations)
    }
}

pub fn load_mesh_sets(source: &MeshSource) -> Vec<(String, Result<PolygonalMesh>)> {
    match source {
        MeshSource::Structured(ns) => ns
            .iter()
            .map(|&n| (format!("n{n}"), generate_structured_triangle_mesh(n)))
            .collect(),
        MeshSource::Triangle(bases) => bases
            .iter()
            .map(|b| {
                let id = b.file_name().map_or_else(
                    || b.display().to_string(),
                    |f| f.to_string_lossy().into_owned(),
                );
                let node = with_suffix(b, "node");
                let ele = with_suffix(b, "ele");
                (id, load_triangle_format(&node, &ele))
            })
            .collect(),
    }
}

fn with_suffix(base: &Path, ext: &str) -> PathBuf {
    let mut s = base.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

/// Every row the configuration asks for on one mesh, in output order.
pub fn row_solvers(cfg: &BenchConfig) -> Vec<RowSolver> {
    let mut out = Vec::new();
    for &mode in &cfg.modes {
        for &cycle in &cfg.cycles {
            let depths = match cycle {
                CycleKind::TwoLevel => vec![2],
                _ => cfg.levels.clone(),
            };
            for levels in depths {
                for &nu in &cfg.nu {
                    out.push(RowSolver::Mg {
                        cycle,
                        levels,
                        nu,
                        mode,
                    });
                }
            }
        }
    }
    if cfg.baselines {
        out.push(RowSolver::Cg);
        out.push(RowSolver::Pcg);
    }
    out
}

pub(crate) fn status_of(err: &Error) -> String {
    let msg: String = err
        .to_string()
        .chars()
        .map(|c| if c == ',' || c == '\n' { ';' } else { c })
        .collect();
    format!("error: {msg}")
}

struct SetOutcome {
    rows: Vec<BenchRow>,
    hierarchy: Option<MeshHierarchy>,
}

fn run_mesh_set(cfg: &BenchConfig, id: &str, mesh: Result<PolygonalMesh>) -> SetOutcome {
    let solvers = row_solvers(cfg);
    let blank = |cells: usize, dofs: usize, solver: RowSolver, status: String| BenchRow {
        mesh: id.to_string(),
        cells,
        dofs,
        solver,
        iterations: None,
        rho: None,
        wall_ms: None,
        status,
    };
    let setup = mesh.and_then(|m| {
        let sys = assemble_system(&m, 1.0, benchmark_load)?;
        let h = build_hierarchy_with(&m, cfg.max_levels(), &cfg.target_children)?;
        Ok((m, sys, h))
    });
    let (mesh, sys, h) = match setup {
        Ok(s) => s,
        Err(e) => {
            let status = status_of(&e);
            return SetOutcome {
                rows: solvers
                    .into_iter()
                    .map(|s| blank(0, 0, s, status.clone()))
                    .collect(),
                hierarchy: None,
            };
        }
    };
    let (cells, dofs) = (mesh.num_cells(), sys.rhs.len());
    let mut transfers: BTreeMap<(CoarseMode, usize), Result<TransferSet>> = BTreeMap::new();
    let mut rows = Vec::with_capacity(solvers.len());
    for solver in solvers {
        let outcome = match solver {
            RowSolver::Mg {
                cycle,
                levels,
                nu,
                mode,
            } => {
                let t = transfers.entry((mode, levels)).or_insert_with(|| {
                    h.truncated(levels)
                        .map_err(|e| match h.early_stop() {
                            Some(why) => Error::InvalidArgument(why.to_string()),
                            None => e,
                        })
                        .and_then(|hl| coarse_operators(&sys.a, &hl, 1.0, mode))
                });
                let mg = MgConfig {
                    cycle,
                    nu,
                    levels,
                    mode,
                    tol: cfg.tol,
                    max_iter: cfg.max_iter,
                };
                match t {
                    Ok(t) => mg_solve(t, &sys.rhs, &mg),
                    Err(e) => Err(Error::InvalidArgument(e.to_string())),
                }
            }
            RowSolver::Cg => cg_solve(&sys.a, &sys.rhs, cfg.tol, 50 * cfg.max_iter),
            RowSolver::Pcg => baseline_pcg(cfg, &sys),
        };
        rows.push(match outcome {
            Ok(rep) => report_row(cfg, id, cells, dofs, solver, &rep),
            Err(e) => blank(cells, dofs, solver, status_of(&e)),
        });
    }
    SetOutcome {
        rows,
        hierarchy: Some(h),
    }
}

fn baseline_pcg(cfg: &BenchConfig, sys: &AssembledSystem) -> Result<SolveReport> {
    let start = Instant::now();
    let factor = ic_factorize(&sys.a, cfg.drop_tol, cfg.max_fill)?;
    let setup = start.elapsed();
    let mut rep = pcg_solve(&sys.a, &sys.rhs, &factor, cfg.tol, 50 * cfg.max_iter)?;
    rep.wall_time += setup;
    Ok(rep)
}

fn report_row(
    cfg: &BenchConfig,
    id: &str,
    cells: usize,
    dofs: usize,
    solver: RowSolver,
    rep: &SolveReport,
) -> BenchRow {
    BenchRow {
        mesh: id.to_string(),
        cells,
        dofs,
        solver,
        iterations: Some(rep.iterations),
        rho: Some(rep.rho),
        wall_ms: cfg.timing.then_some(rep.wall_time.as_secs_f64() * 1e3),
        status: if rep.converged {
            "ok".into()
        } else {
            "not converged".into()
        },
    }
}

/// Runs the full grid, one thread per mesh set, and writes `results.csv`
/// plus `meshes/<mesh>/level_<j>.{svg,txt}` under `cfg.out`.
pub fn run_benchmark(cfg: &BenchConfig) -> Result<BenchTable> {
    cfg.validate()?;
    let sets = load_mesh_sets(&cfg.meshes);
    let outcomes: Vec<(String, SetOutcome)> = std::thread::scope(|s| {
        let handles: Vec<_> = sets
            .into_iter()
            .map(|(id, mesh)| {
                s.spawn(move || {
                    let out = run_mesh_set(cfg, &id, mesh);
                    (id, out)
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("benchmark worker panicked"))
            .collect()
    });

    fs::create_dir_all(&cfg.out)?;
    let mut table = BenchTable::default();
    for (id, outcome) in outcomes {
        if let Some(h) = &outcome.hierarchy {
            let dir = cfg.out.join("meshes").join(&id);
            h.write_to_dir(&dir)?;
            export_hierarchy_svg(h.levels(), &dir, &SvgOptions::default())?;
        }
        table.rows.extend(outcome.rows);
    }
    fs::write(cfg.out.join("results.csv"), table.to_csv())?;
    Ok(table)
}

/// Aligned plain-text rendering of the iteration counts, one block per mode.
pub fn summary(table: &BenchTable) -> String {
    let mut s = String::new();
    for r in &table.rows {
        let label = match r.solver {
            RowSolver::Mg {
                cycle,
                levels,
                nu,
                mode,
            } => format!(
                "{:<3} J={levels} nu={nu} {:<12}",
                cycle.as_str(),
                mode.as_str()
            ),
            RowSolver::Cg => format!("{:<31}", "CG"),
            RowSolver::Pcg => format!("{:<31}", "PCG"),
        };
        let value = match (r.iterations, r.rho) {
            (Some(i), Some(rho)) if r.is_ok() => format!("{i:>4} ({rho:.3})"),
            _ => r.status.clone(),
        };
        let _ = writeln!(s, "{:<6} {label} {value}", r.mesh);
    }
    s
}
