use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use vem_mg::agglomeration::{build_hierarchy_with, check_boundary_compatibility};
use vem_mg::bench::{
    benchmark_load, load_mesh_sets, run_benchmark, run_convergence_study, summary, BenchConfig,
    MeshSource,
};
use vem_mg::mesh::{
    export_hierarchy_svg, export_svg, mesh_quality, write_native, PolygonalMesh, SvgOptions,
};
use vem_mg::solver::{
    cg_solve, ic_factorize, mg_solve, pcg_solve, two_grid_spectral_radius, CycleKind, MgConfig,
};
use vem_mg::transfer::coarse_operators;
use vem_mg::vem::assemble_system;

#[derive(Parser)]
#[command(name = "vem-mg", version)]
#[command(about = "Agglomeration multigrid for lowest-order virtual elements on polygonal meshes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate or import a fine mesh and write it in native and SVG form
    Mesh(MeshArgs),
    /// Build, validate and export an agglomeration hierarchy
    Hierarchy(MeshArgs),
    /// Run one solve and report iterations and convergence factor
    Solve(SolveArgs),
    /// Run the benchmark grid and write results.csv
    Bench(Common),
    /// Measure discretization orders and write orders.csv
    Study(Common),
}

#[derive(Args)]
struct Common {
    /// `key = value` configuration file
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// Smoothing steps, comma separated
    #[arg(long)]
    nu: Option<String>,
    /// Hierarchy depths for V- and W-cycles, comma separated
    #[arg(long)]
    levels: Option<String>,
    /// Cycles among tl, v, w, comma separated
    #[arg(long)]
    cycle: Option<String>,
    /// Coarse operators: inherited, noninherited, comma separated
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Any other configuration key, as KEY=VALUE (repeatable)
    #[arg(long = "set", value_name = "KEY=VALUE")]
    sets: Vec<String>,
}

impl Common {
    fn config(&self) -> Result<BenchConfig> {
        let mut cfg = match &self.config {
            Some(p) => BenchConfig::from_file(p)?,
            None => BenchConfig::default(),
        };
        for kv in &self.sets {
            let (k, v) = kv
                .split_once('=')
                .with_context(|| format!("--set expects KEY=VALUE, got `{kv}`"))?;
            cfg.set(k.trim(), v.trim())?;
        }
        let overrides = [
            ("nu", self.nu.clone()),
            ("levels", self.levels.clone()),
            ("cycles", self.cycle.clone()),
            ("modes", self.mode.clone()),
            ("tol", self.tol.map(|t| t.to_string())),
            ("seed", self.seed.map(|s| s.to_string())),
        ];
        for (k, v) in overrides {
            if let Some(v) = v {
                cfg.set(k, &v)?;
            }
        }
        if let Some(out) = &self.out {
            cfg.out = out.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args)]
struct MeshArgs {
    /// Structured mesh with N subdivisions per side
    #[arg(long, short, conflicts_with = "triangle")]
    n: Option<usize>,
    /// Triangle-format base path (reads BASE.node and BASE.ele)
    #[arg(long)]
    triangle: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

impl MeshArgs {
    fn mesh(&self) -> Result<(String, PolygonalMesh)> {
        let source = match (&self.triangle, self.n) {
            (Some(base), _) => MeshSource::Triangle(vec![base.clone()]),
            (None, n) => MeshSource::Structured(vec![n.unwrap_or(16)]),
        };
        let (id, mesh) = load_mesh_sets(&source).pop().expect("one mesh source");
        Ok((id, mesh?))
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SolverKind {
    Mg,
    Cg,
    Pcg,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    mesh: MeshArgs,
    #[arg(long, value_enum, default_value_t = SolverKind::Mg)]
    solver: SolverKind,
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Mesh(args) => mesh(&args),
        Command::Hierarchy(args) => hierarchy(&args),
        Command::Solve(args) => solve(&args),
        Command::Bench(common) => {
            let cfg = common.config()?;
            let table = run_benchmark(&cfg)?;
            print!("{}", summary(&table));
            let failed = table.rows.iter().filter(|r| !r.is_ok()).count();
            println!("wrote {}", cfg.out.join("results.csv").display());
            if failed > 0 {
                eprintln!("{failed} rows did not converge or failed; see the status column");
            }
            Ok(())
        }
        Command::Study(common) => {
            let cfg = common.config()?;
            let table = run_convergence_study(&cfg)?;
            print!("{}", table.to_csv());
            println!("wrote {}", cfg.out.join("orders.csv").display());
            Ok(())
        }
    }
}

fn mesh(args: &MeshArgs) -> Result<()> {
    let cfg = args.common.config()?;
    let (id, mesh) = args.mesh()?;
    fs::create_dir_all(&cfg.out)?;
    let txt = cfg.out.join(format!("{id}.txt"));
    let svg = cfg.out.join(format!("{id}.svg"));
    write_native(&mesh, &txt)?;
    export_svg(&mesh, &svg, &SvgOptions::default())?;
    let q = mesh_quality(&mesh);
    println!(
        "{id}: {} cells, {} vertices, {} interior",
        mesh.num_cells(),
        mesh.num_vertices(),
        mesh.num_interior_vertices()
    );
    println!(
        "h = {:.4e}, uniformity {:.3}, worst edge ratio {:.3}, star-shaped: {}",
        q.max_diameter,
        q.uniformity,
        q.worst_edge_ratio(),
        q.all_star_shaped()
    );
    println!("wrote {} and {}", txt.display(), svg.display());
    Ok(())
}

fn hierarchy(args: &MeshArgs) -> Result<()> {
    let cfg = args.common.config()?;
    let (id, mesh) = args.mesh()?;
    let h = build_hierarchy_with(&mesh, cfg.max_levels(), &cfg.target_children)?;
    if let Some(why) = h.early_stop() {
        eprintln!("warning: {why}");
    }
    h.validate()?;
    let compat = check_boundary_compatibility(&h);
    let dir = cfg.out.join("meshes").join(&id);
    h.write_to_dir(&dir)?;
    export_hierarchy_svg(h.levels(), &dir, &SvgOptions::default())?;
    for (j, m) in h.levels().iter().enumerate() {
        println!(
            "level {}: {} cells, {} dofs",
            j + 1,
            m.num_cells(),
            m.num_interior_vertices()
        );
    }
    println!(
        "boundary compatibility: {}",
        if compat.ok {
            "ok".to_string()
        } else {
            format!("{} violations", compat.violations.len())
        }
    );
    println!("wrote {}", dir.display());
    if !compat.ok {
        bail!("hierarchy is not boundary compatible");
    }
    Ok(())
}

fn solve(args: &SolveArgs) -> Result<()> {
    let cfg = args.mesh.common.config()?;
    let (id, mesh) = args.mesh.mesh()?;
    let sys = assemble_system(&mesh, 1.0, benchmark_load)?;
    println!("{id}: {} cells, {} dofs", mesh.num_cells(), sys.rhs.len());
    let report = match args.solver {
        SolverKind::Cg => cg_solve(&sys.a, &sys.rhs, cfg.tol, 50 * cfg.max_iter)?,
        SolverKind::Pcg => {
            let f = ic_factorize(&sys.a, cfg.drop_tol, cfg.max_fill)?;
            pcg_solve(&sys.a, &sys.rhs, &f, cfg.tol, 50 * cfg.max_iter)?
        }
        SolverKind::Mg => {
            let cycle = cfg.cycles[0];
            let levels = match cycle {
                CycleKind::TwoLevel => 2,
                _ => *cfg.levels.first().context("no levels given")?,
            };
            let mg = MgConfig {
                cycle,
                nu: cfg.nu[0],
                levels,
                mode: cfg.modes[0],
                tol: cfg.tol,
                max_iter: cfg.max_iter,
            };
            let h = build_hierarchy_with(&mesh, levels, &cfg.target_children)?;
            if let Some(why) = h.early_stop() {
                bail!("{why}");
            }
            let t = coarse_operators(&sys.a, &h, 1.0, mg.mode)?;
            println!(
                "{} cycle, J = {levels}, nu = {}, {} coarse operators",
                cycle.as_str(),
                mg.nu,
                mg.mode.as_str()
            );
            if cycle == CycleKind::TwoLevel {
                let est = two_grid_spectral_radius(&t, mg.nu, cfg.seed)?;
                println!(
                    "two-grid spectral radius {:.6}{}",
                    est.rho,
                    if est.unconverged {
                        " (power iteration not settled)"
                    } else {
                        ""
                    }
                );
            }
            mg_solve(&t, &sys.rhs, &mg)?
        }
    };
    println!(
        "iterations {}, rho {:.6}, relative residual {:.3e}, {:.3} ms{}",
        report.iterations,
        report.rho,
        report.relative_residual(),
        report.wall_time.as_secs_f64() * 1e3,
        if report.converged {
            ""
        } else {
            ", not converged"
        }
    );
    write_solution(
        &cfg.out,
        &id,
        &mesh,
        &sys.dofs.to_vertex_values(&report.solution),
    )
}

fn write_solution(out: &Path, id: &str, mesh: &PolygonalMesh, values: &[f64]) -> Result<()> {
    fs::create_dir_all(out)?;
    let path = out.join(format!("{id}_solution.txt"));
    let mut s = String::new();
    for (p, v) in mesh.vertices().iter().zip(values) {
        s.push_str(&format!("{} {} {:.12e}\n", p.x, p.y, v));
    }
    fs::write(&path, s)?;
    println!("wrote {}", path.display());
    Ok(())
}
